import math

import numpy as np
import pytest

from eobkit import gradcheck
from eobkit.losses import (EmaMagnitudes, HarmonizedConfig, freq_amp_phase,
                           freq_error_amp_phase, freq_real_imag_l1, freq_real_imag_l2,
                           harmonized_l1, harmonized_l2, temporal_l1, temporal_l2,
                           update_ema, whitened_loss)
from eobkit.transforms import dft_forward, dft_inverse, from_amp_phase, to_amp_phase


class TestTemporal:
    def test_zero_at_match(self, rng):
        x = rng.normal(size=8)
        for fn in (temporal_l2, temporal_l1):
            ev = fn(x, x.copy())
            assert ev.value == 0.0
            np.testing.assert_array_equal(ev.grad_wrt_prediction, 0.0)

    def test_hand_case_l2(self):
        ev = temporal_l2(np.array([1.0, 2.0]), np.array([0.0, 0.0]))
        assert ev.value == 5.0
        np.testing.assert_array_equal(ev.grad_wrt_prediction, [-2.0, -4.0])

    def test_hand_case_l1(self):
        ev = temporal_l1(np.array([1.0, 2.0]), np.array([0.0, 0.0]))
        assert ev.value == 3.0
        np.testing.assert_array_equal(ev.grad_wrt_prediction, [-1.0, -1.0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            temporal_l2(np.ones(3), np.ones(4))

    def test_scale_behavior(self, rng):
        # l2 gradient grows with the error; l1 gradient has magnitude 1 or 0
        x = rng.normal(size=16)
        e = rng.normal(size=16)
        g1 = temporal_l2(x, x - e).grad_wrt_prediction
        g2 = temporal_l2(x, x - 2 * e).grad_wrt_prediction
        np.testing.assert_allclose(g2, 2 * g1, rtol=1e-12)
        g = temporal_l1(x, x - e).grad_wrt_prediction
        assert set(np.abs(g)) <= {0.0, 1.0}


class TestRealImag:
    def test_l2_equals_temporal(self, rng):
        for L in (8, 32, 64, 128):
            x, x_hat = rng.normal(size=L), rng.normal(size=L)
            freq = freq_real_imag_l2(x, x_hat)
            temp = temporal_l2(x, x_hat)
            assert abs(freq.value - temp.value) < 1e-9 * temp.value
            denom = np.max(np.abs(temp.grad_wrt_prediction))
            assert np.max(np.abs(freq.grad_wrt_prediction
                                 - temp.grad_wrt_prediction)) < 1e-9 * denom

    def test_l1_impulse_error(self):
        # impulse error has a flat spectrum: 4 bins x (|0.5| + |0|) = 2
        x_hat = np.zeros(4)
        x = np.array([1.0, 0.0, 0.0, 0.0])
        assert freq_real_imag_l1(x, x_hat).value == pytest.approx(2.0, abs=1e-12)

    def test_l1_zero_at_match(self, rng):
        x = rng.normal(size=16)
        assert freq_real_imag_l1(x, x.copy()).value == 0.0

    def test_l1_differs_from_temporal(self, rng):
        # no rotational invariance for the l1 ball
        x, x_hat = rng.normal(size=16), rng.normal(size=16)
        assert freq_real_imag_l1(x, x_hat).value != pytest.approx(
            temporal_l1(x, x_hat).value, rel=1e-3)


class TestAmpPhase:
    def test_zero_at_match(self, rng):
        x = rng.normal(size=16)
        ev = freq_amp_phase(x, x.copy(), "l2")
        assert ev.value == 0.0
        assert ev.parts["amplitude"].value == 0.0
        assert ev.parts["phase"].value == 0.0

    def test_amplitude_only_perturbation_has_zero_phase_term(self, rng):
        # scale the spectrum magnitudes of a real signal, keep phases
        x_hat = rng.normal(size=32)
        ap = to_amp_phase(dft_forward(x_hat))
        scale = 1.0 + 0.4 * np.cos(2 * math.pi * np.arange(32) / 32)  # symmetric bins
        x = dft_inverse(from_amp_phase(type(ap)(amp=ap.amp * scale, phase=ap.phase)))
        for norm in ("l1", "l2"):
            ev = freq_amp_phase(x, x_hat, norm)
            assert ev.parts["phase"].value < 1e-9
            assert ev.parts["amplitude"].value > 0.01

    def test_dead_bins_excluded_from_phase(self):
        x_hat = np.zeros(8)  # all predicted amplitudes are zero
        x = np.sin(2 * math.pi * np.arange(8) / 8)
        ev = freq_amp_phase(x, x_hat, "l2")
        assert np.all(np.isfinite(ev.grad_wrt_prediction))
        assert ev.parts["phase"].value == 0.0


class TestErrorAmpPhase:
    def test_l2_amplitude_term_is_temporal_mse(self, rng):
        x, x_hat = rng.normal(size=64), rng.normal(size=64)
        ev = freq_error_amp_phase(x, x_hat, "l2")
        mse = temporal_l2(x, x_hat).value
        assert abs(ev.parts["error_amplitude"].value - mse) < 1e-9 * mse
        np.testing.assert_allclose(ev.parts["error_amplitude"].grad_wrt_prediction,
                                   -2.0 * (x - x_hat), atol=1e-12)

    def test_zero_error_convention(self, rng):
        x = rng.normal(size=16)
        ev = freq_error_amp_phase(x, x.copy(), "l1")
        assert ev.value == 0.0
        np.testing.assert_array_equal(ev.grad_wrt_prediction, 0.0)

    def test_l1_whitener_unit_spectrum(self, rng):
        x, x_hat = rng.normal(size=32), rng.normal(size=32)
        grad = freq_error_amp_phase(x, x_hat, "l1").parts["error_amplitude"].grad_wrt_prediction
        moduli = np.abs(np.fft.fft(grad, norm="ortho"))
        np.testing.assert_allclose(moduli, 1.0, atol=1e-9)


class TestHarmonized:
    def test_gamma_zero_is_plain_l2(self, rng):
        x, x_hat = rng.normal(size=32), rng.normal(size=32)
        cfg = HarmonizedConfig(norm="l2", gamma=0.0, transform="dft")
        ema = EmaMagnitudes(f_bar=rng.uniform(0.1, 2.0, size=32), beta=0.3)
        ev = harmonized_l2(x, x_hat, ema, cfg)
        assert ev.value == pytest.approx(temporal_l2(x, x_hat).value, rel=1e-12)

    def test_flat_profile_scales_mse(self, rng):
        # constant magnitude profile: loss = (1 + gamma/(C+eps)) * MSE
        cfg = HarmonizedConfig(norm="l2", gamma=0.5, eps=1e-8, transform="dft")
        C = 1.7
        ema = EmaMagnitudes(f_bar=np.full(16, C), beta=0.3)
        w = 1.0 + cfg.gamma / (C + cfg.eps)
        for _ in range(10):
            x, x_hat = rng.normal(size=16), rng.normal(size=16)
            ev = harmonized_l2(x, x_hat, ema, cfg)
            assert ev.value / temporal_l2(x, x_hat).value == pytest.approx(w, rel=1e-9)

    def test_unique_minimum_and_zero_gradient(self, rng):
        x = rng.normal(size=16)
        cfg = HarmonizedConfig(norm="l2", gamma=0.5, transform="dft")
        ema = EmaMagnitudes(f_bar=rng.uniform(0.1, 1.0, size=16), beta=0.3)
        ev = harmonized_l2(x, x.copy(), ema, cfg)
        assert ev.value == 0.0
        np.testing.assert_allclose(ev.grad_wrt_prediction, 0.0, atol=1e-12)
        perturbed = harmonized_l2(x, x + 1e-3 * rng.normal(size=16), ema, cfg)
        assert perturbed.value > 0.0

    def test_l1_gamma_zero_matches_unweighted(self, rng):
        x, x_hat = rng.normal(size=16), rng.normal(size=16)
        cfg = HarmonizedConfig(norm="l1", gamma=0.0, transform="dft")
        ema = EmaMagnitudes(f_bar=rng.uniform(0.1, 1.0, size=16), beta=0.3)
        assert harmonized_l1(x, x_hat, ema, cfg).value == pytest.approx(
            freq_real_imag_l1(x, x_hat).value, rel=1e-12)

    def test_l1_zero_profile_is_unweighted(self, rng):
        x, x_hat = rng.normal(size=16), rng.normal(size=16)
        cfg = HarmonizedConfig(norm="l1", gamma=0.5, transform="dft")
        ema = EmaMagnitudes.zeros(16, beta=0.3)
        assert harmonized_l1(x, x_hat, ema, cfg).value == pytest.approx(
            freq_real_imag_l1(x, x_hat).value, rel=1e-12)

    def test_weight_regimes(self):
        # strong bins: l2 weight -> 1 within gamma/f_bar; weak bins: ~ gamma/(f_bar+eps)
        gamma, eps = 0.5, 1e-8
        strong, weak = 1000.0, 1e-6
        w_strong = 1.0 + gamma / (strong + eps)
        assert abs(w_strong - 1.0) <= gamma / strong
        w_weak = 1.0 + gamma / (weak + eps)
        assert w_weak == pytest.approx(gamma / (weak + eps), rel=1e-3)

    def test_norm_config_mismatch(self, rng):
        x = rng.normal(size=8)
        cfg = HarmonizedConfig(norm="l1", gamma=0.5)
        ema = EmaMagnitudes.zeros(8, beta=0.3)
        with pytest.raises(ValueError, match="norm"):
            harmonized_l2(x, x, ema, cfg)

    def test_ema_length_mismatch(self, rng):
        x = rng.normal(size=8)
        cfg = HarmonizedConfig(norm="l2", gamma=0.5)
        ema = EmaMagnitudes.zeros(4, beta=0.3)
        with pytest.raises(ValueError, match="mismatch"):
            harmonized_l2(x, x, ema, cfg)


class TestWhitened:
    def test_unit_profile_is_plain_coefficient_mse(self, rng):
        x, x_hat = rng.normal(size=16), rng.normal(size=16)
        ev = whitened_loss(x, x_hat, np.ones(16), "l2")
        assert ev.value == pytest.approx(temporal_l2(x, x_hat).value, rel=1e-12)

    def test_halving_magnitude_quadruples_weight(self, rng):
        x, x_hat = rng.normal(size=16), rng.normal(size=16)
        base = np.full(16, 2.0)
        v1 = whitened_loss(x, x_hat, base, "l2").value
        v2 = whitened_loss(x, x_hat, base / 2.0, "l2").value
        assert v2 == pytest.approx(4.0 * v1, rel=1e-12)

    def test_zero_magnitude_rejected(self, rng):
        x = rng.normal(size=8)
        with pytest.raises(ValueError, match="positive"):
            whitened_loss(x, x, np.zeros(8), "l2")

    def test_tiny_magnitude_weight_explosion(self, rng):
        # documented pathology: near-zero bins dominate the value
        x, x_hat = rng.normal(size=16), rng.normal(size=16)
        f_bar = np.full(16, 1.0)
        f_bar[3] = 1e-6
        v = whitened_loss(x, x_hat, f_bar, "l2").value
        assert v > 1e6  # single tiny bin dominates


class TestEma:
    def test_single_update(self):
        ema = update_ema(EmaMagnitudes.zeros(1, beta=0.3), np.array([1.0]))
        assert ema.f_bar[0] == pytest.approx(0.7, abs=1e-15)
        assert ema.epoch == 1

    def test_geometric_convergence(self):
        m = np.array([2.0])
        ema = EmaMagnitudes.zeros(1, beta=0.3)
        for e in range(1, 11):
            ema = update_ema(ema, m)
            expected = 2.0 * (1.0 - 0.3**e)  # closed-form geometric series
            assert ema.f_bar[0] == pytest.approx(expected, rel=1e-12)

    def test_beta_zero_copies_target(self):
        ema = update_ema(EmaMagnitudes.zeros(2, beta=0.0), np.array([3.0, 4.0]))
        np.testing.assert_array_equal(ema.f_bar, [3.0, 4.0])

    def test_validation(self):
        with pytest.raises(ValueError):
            EmaMagnitudes(f_bar=np.array([-1.0]), beta=0.3)
        with pytest.raises(ValueError):
            EmaMagnitudes.zeros(2, beta=1.0)
        with pytest.raises(ValueError, match="mismatch"):
            update_ema(EmaMagnitudes.zeros(2, beta=0.3), np.ones(3))


class TestGradients:
    """Spot checks; the full 100-instance sweep runs in the acceptance suite."""

    @pytest.mark.parametrize("case", gradcheck.LOSS_CASES, ids=lambda c: c.name)
    def test_case_matches_finite_differences(self, case):
        reports = gradcheck.run_gradient_suite(lengths=(8, 32), instances=6, seed=3,
                                               names=(case.name,))
        assert reports[0].passed, f"{case.name}: {reports[0].max_rel_err:.3e}"

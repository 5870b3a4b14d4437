"""Finite-difference verification of every analytic loss gradient.

Central differences are the independent oracle: for each registered loss,
random instances are generated (with explicit margins keeping kinked
losses away from their non-differentiable points and phase losses away
from empty bins), the analytic gradient is compared coordinate-wise
against (f(x+h) - f(x-h)) / 2h, and the worst relative error is reported.

Smooth losses must agree to 1e-5, kinked ones to 1e-4 at margin-safe
points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import losses
from .processes import make_rng

__all__ = ["GradCase", "GradCheckReport", "LOSS_CASES", "central_difference",
           "relative_error", "run_gradient_suite"]

SMOOTH_TOL = 1e-5
KINKED_TOL = 1e-4


def central_difference(fn: Callable[[np.ndarray], float], x_hat: np.ndarray,
                       h_scale: float = 1e-6) -> np.ndarray:
    """Central finite differences of a scalar function of the prediction."""
    h = h_scale * max(1.0, float(np.max(np.abs(x_hat))))
    grad = np.zeros_like(x_hat)
    probe = x_hat.copy()
    for i in range(x_hat.size):
        keep = probe[i]
        probe[i] = keep + h
        up = fn(probe)
        probe[i] = keep - h
        down = fn(probe)
        probe[i] = keep
        grad[i] = (up - down) / (2.0 * h)
    return grad


def relative_error(analytic: np.ndarray, fd: np.ndarray) -> float:
    denom = max(float(np.max(np.abs(analytic))), float(np.max(np.abs(fd))), 1e-12)
    return float(np.max(np.abs(analytic - fd))) / denom


# ---------------------------------------------------------------------------
# Margin-safe instance constructors
# ---------------------------------------------------------------------------

def _hermitian_margin_spectrum(rng: np.random.Generator, L: int,
                               lo: float = 0.2, hi: float = 1.0) -> np.ndarray:
    """Spectrum of a real signal with |re|, |im| in [lo, hi] on all free bins."""
    spec = np.zeros(L, dtype=complex)
    half = L // 2
    for k in range(1, (L + 1) // 2):
        re = rng.choice([-1.0, 1.0]) * rng.uniform(lo, hi)
        im = rng.choice([-1.0, 1.0]) * rng.uniform(lo, hi)
        spec[k] = re + 1j * im
        spec[L - k] = re - 1j * im
    spec[0] = rng.choice([-1.0, 1.0]) * rng.uniform(lo, hi)
    if L % 2 == 0:
        spec[half] = rng.choice([-1.0, 1.0]) * rng.uniform(lo, hi)
    return spec


def _smooth_pair(rng: np.random.Generator, L: int) -> tuple[np.ndarray, np.ndarray]:
    x = rng.normal(size=L)
    return x, x + 0.5 * rng.normal(size=L)


def _time_margin_pair(rng: np.random.Generator, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Error entries bounded away from zero (temporal kinks)."""
    x_hat = rng.normal(size=L)
    e = rng.choice([-1.0, 1.0], size=L) * rng.uniform(0.2, 1.0, size=L)
    return x_hat + e, x_hat


def _spectral_margin_pair(rng: np.random.Generator, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Error spectrum bounded away from zero per re/im part (spectral kinks)."""
    x_hat = rng.normal(size=L)
    e = np.fft.ifft(_hermitian_margin_spectrum(rng, L), norm="ortho").real
    return x_hat + e, x_hat


def _polar_margin_pair(rng: np.random.Generator, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Both spectra with amplitudes >= 0.3; amp and phase gaps in [0.15, 0.5]."""
    amp_hat = np.zeros(L)
    phase_hat = np.zeros(L)
    amp = np.zeros(L)
    phase = np.zeros(L)
    for k in range(1, (L + 1) // 2):
        amp_hat[k] = amp_hat[L - k] = rng.uniform(0.5, 1.5)
        phase_hat[k] = rng.uniform(-2.0, 2.0)
        phase_hat[L - k] = -phase_hat[k]
        amp[k] = amp[L - k] = amp_hat[k] + rng.choice([-1.0, 1.0]) * rng.uniform(0.15, 0.3)
        dphi = rng.choice([-1.0, 1.0]) * rng.uniform(0.15, 0.5)
        phase[k] = phase_hat[k] + dphi
        phase[L - k] = -phase[k]
    # real bins carry an amplitude-only gap; their phase is locally constant
    amp_hat[0] = rng.uniform(0.5, 1.5)
    amp[0] = amp_hat[0] + rng.uniform(0.15, 0.3)
    if L % 2 == 0:
        amp_hat[L // 2] = rng.uniform(0.5, 1.5)
        amp[L // 2] = amp_hat[L // 2] + rng.uniform(0.15, 0.3)
    x_hat = np.fft.ifft(amp_hat * np.exp(1j * phase_hat), norm="ortho").real
    x = np.fft.ifft(amp * np.exp(1j * phase), norm="ortho").real
    return x, x_hat


def _positive_mags(rng: np.random.Generator, L: int) -> np.ndarray:
    return rng.uniform(0.2, 2.0, size=L)


# ---------------------------------------------------------------------------
# Case registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradCase:
    name: str
    tolerance: float
    make_pair: Callable[[np.random.Generator, int], tuple[np.ndarray, np.ndarray]]
    make_loss: Callable[[np.random.Generator, int], Callable[[np.ndarray, np.ndarray], losses.LossEval]]


def _fixed(fn):
    return lambda rng, L: fn


def _harmonized(norm: str, transform: str):
    def make(rng: np.random.Generator, L: int):
        cfg = losses.HarmonizedConfig(norm=norm, gamma=0.5, transform=transform,
                                      wavelet="db2", levels=1)
        ema = losses.EmaMagnitudes(f_bar=_positive_mags(rng, L), beta=0.3)
        if norm == "l2":
            return lambda x, xh: losses.harmonized_l2(x, xh, ema, cfg)
        return lambda x, xh: losses.harmonized_l1(x, xh, ema, cfg)
    return make


def _whitened(norm: str):
    def make(rng: np.random.Generator, L: int):
        f_bar = _positive_mags(rng, L)
        return lambda x, xh: losses.whitened_loss(x, xh, f_bar, norm)
    return make


LOSS_CASES: tuple[GradCase, ...] = (
    GradCase("temporal_l2", SMOOTH_TOL, _smooth_pair, _fixed(losses.temporal_l2)),
    GradCase("temporal_l1", KINKED_TOL, _time_margin_pair, _fixed(losses.temporal_l1)),
    GradCase("freq_real_imag_l2", SMOOTH_TOL, _smooth_pair, _fixed(losses.freq_real_imag_l2)),
    GradCase("freq_real_imag_l1", KINKED_TOL, _spectral_margin_pair,
             _fixed(losses.freq_real_imag_l1)),
    GradCase("amp_phase_l2", SMOOTH_TOL, _polar_margin_pair,
             _fixed(lambda x, xh: losses.freq_amp_phase(x, xh, "l2"))),
    GradCase("amp_phase_l1", KINKED_TOL, _polar_margin_pair,
             _fixed(lambda x, xh: losses.freq_amp_phase(x, xh, "l1"))),
    GradCase("error_amp_phase_l2", SMOOTH_TOL, _spectral_margin_pair,
             _fixed(lambda x, xh: losses.freq_error_amp_phase(x, xh, "l2"))),
    GradCase("error_amp_phase_l1", KINKED_TOL, _spectral_margin_pair,
             _fixed(lambda x, xh: losses.freq_error_amp_phase(x, xh, "l1"))),
    GradCase("harmonized_l2_dft", SMOOTH_TOL, _smooth_pair, _harmonized("l2", "dft")),
    GradCase("harmonized_l1_dft", KINKED_TOL, _spectral_margin_pair, _harmonized("l1", "dft")),
    GradCase("harmonized_l2_dwt", SMOOTH_TOL, _smooth_pair, _harmonized("l2", "dwt")),
    GradCase("harmonized_l1_identity", KINKED_TOL, _time_margin_pair,
             _harmonized("l1", "identity")),
    GradCase("whitened_l2", SMOOTH_TOL, _smooth_pair, _whitened("l2")),
    GradCase("whitened_l1", KINKED_TOL, _spectral_margin_pair, _whitened("l1")),
)


@dataclass(frozen=True)
class GradCheckReport:
    name: str
    tolerance: float
    max_rel_err: float
    instances: int

    @property
    def passed(self) -> bool:
        return self.max_rel_err < self.tolerance

    def to_dict(self) -> dict:
        return {"name": self.name, "tolerance": self.tolerance,
                "max_rel_err": self.max_rel_err, "instances": self.instances,
                "passed": self.passed}


def run_gradient_suite(lengths: tuple[int, ...] = (8, 32, 128), instances: int = 100,
                       seed: int = 0, names: tuple[str, ...] | None = None
                       ) -> list[GradCheckReport]:
    """Run the FD oracle on the registered losses.

    `instances` is per loss, spread evenly across the requested lengths.
    """
    cases = LOSS_CASES if names is None else tuple(c for c in LOSS_CASES if c.name in names)
    if names is not None and len(cases) != len(names):
        known = {c.name for c in LOSS_CASES}
        raise ValueError(f"unknown loss case(s): {sorted(set(names) - known)}")
    reports = []
    rng = make_rng(seed)
    per_length = max(1, instances // len(lengths))
    for case in cases:
        worst = 0.0
        count = 0
        for L in lengths:
            for _ in range(per_length):
                x, x_hat = case.make_pair(rng, L)
                loss_fn = case.make_loss(rng, L)
                analytic = loss_fn(x, x_hat).grad_wrt_prediction
                fd = central_difference(lambda xh: loss_fn(x, xh).value, x_hat)
                worst = max(worst, relative_error(analytic, fd))
                count += 1
        reports.append(GradCheckReport(name=case.name, tolerance=case.tolerance,
                                       max_rel_err=worst, instances=count))
    return reports

"""Synthetic time-series generators with exactly controlled structure.

The hybrid process is x_t = v_t + z_t where

* v_t is a sum of K sinusoids with amplitude-adjusted harmonics
  A_i = A*sqrt(K) / (k_i * sqrt(sum_j 1/k_j^2)), so that sum_i A_i^2 = K*A^2
  and var(v) = K*A^2 / 2 exactly over whole periods;
* z_t is a stationary AR(p) process z_t = c + sum_i phi_i z_{t-i} + eps_t
  driven by one of six innovation families, each mean-centered so the
  innovation is zero-mean with variance sigma_eps2.

Everything here is a pure function of (spec, seed): generators use a
counter-based Philox stream keyed by the seed, so identical inputs give
bit-identical output and independent sub-streams can be spawned for
parallel grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import signal


class NonStationaryError(ValueError):
    """AR coefficients define a non-stationary (or explosive) process."""


SeedLike = Union[int, np.random.SeedSequence]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Philox generator keyed by an integer seed or a SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def spawn_seeds(seed: SeedLike, n: int) -> list[np.random.SeedSequence]:
    """Derive n independent sub-streams from a seed, deterministically."""
    if isinstance(seed, np.random.SeedSequence):
        return seed.spawn(n)
    return np.random.SeedSequence(int(seed)).spawn(n)


# ---------------------------------------------------------------------------
# Innovation distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Binomial:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"binomial requires n >= 1, got n={self.n}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"binomial requires 0 < p <= 1, got p={self.p}")

    @property
    def mean(self) -> float:
        return self.n * self.p

    @property
    def variance(self) -> float:
        return self.n * self.p * (1.0 - self.p)

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.binomial(self.n, self.p, size=size).astype(float)


@dataclass(frozen=True)
class Geometric:
    p: float

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"geometric requires 0 < p <= 1, got p={self.p}")

    @property
    def mean(self) -> float:
        # support {1, 2, ...}
        return 1.0 / self.p

    @property
    def variance(self) -> float:
        return (1.0 - self.p) / self.p**2

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.geometric(self.p, size=size).astype(float)


@dataclass(frozen=True)
class Gaussian:
    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError(f"gaussian requires sigma > 0, got sigma={self.sigma}")

    @property
    def mean(self) -> float:
        return self.mu

    @property
    def variance(self) -> float:
        return self.sigma**2

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.mu, self.sigma, size=size)


@dataclass(frozen=True)
class Poisson:
    lam: float

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError(f"poisson requires lambda > 0, got lambda={self.lam}")

    @property
    def mean(self) -> float:
        return self.lam

    @property
    def variance(self) -> float:
        return self.lam

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.poisson(self.lam, size=size).astype(float)


@dataclass(frozen=True)
class StudentT:
    nu: float
    alpha: float

    def __post_init__(self):
        if self.nu <= 2.0:
            raise ValueError(f"student_t requires nu > 2 for finite variance, got nu={self.nu}")
        if self.alpha <= 0.0:
            raise ValueError(f"student_t requires alpha > 0, got alpha={self.alpha}")

    @property
    def mean(self) -> float:
        return 0.0

    @property
    def variance(self) -> float:
        return self.alpha**2 * self.nu / (self.nu - 2.0)

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.alpha * rng.standard_t(self.nu, size=size)


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"uniform requires b > a, got a={self.a}, b={self.b}")

    @property
    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def variance(self) -> float:
        return (self.b - self.a) ** 2 / 12.0

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.a, self.b, size=size)


InnovationDist = Union[Binomial, Geometric, Gaussian, Poisson, StudentT, Uniform]

_INNOVATION_KINDS = {
    "binomial": Binomial,
    "geometric": Geometric,
    "gaussian": Gaussian,
    "poisson": Poisson,
    "student_t": StudentT,
    "uniform": Uniform,
}


def innovation_kind(dist: InnovationDist) -> str:
    for kind, cls in _INNOVATION_KINDS.items():
        if isinstance(dist, cls):
            return kind
    raise TypeError(f"unknown innovation distribution type: {type(dist)!r}")


def calibrate_innovation(kind: str, sigma_eps2: float, nu: float = 5.0) -> InnovationDist:
    """Build an innovation of the given family with variance sigma_eps2.

    Uses the standard calibrations:
      binomial  n=1, p = (1 - sqrt(1 - 4*s2)) / 2        (needs s2 <= 1/4)
      geometric p = (-1 + sqrt(1 + 4*s2)) / (2*s2)
      gaussian  mu=0, sigma = sqrt(s2)
      poisson   lambda = s2  (variance of Poisson equals its rate)
      student_t alpha = sqrt(s2 * (nu-2)/nu)
      uniform   b = -a = sqrt(3*s2)
    """
    if sigma_eps2 <= 0.0:
        raise ValueError(f"sigma_eps2 must be positive, got {sigma_eps2}")
    s = math.sqrt(sigma_eps2)
    if kind == "binomial":
        if sigma_eps2 > 0.25:
            raise ValueError("binomial with n=1 cannot exceed variance 0.25")
        return Binomial(n=1, p=(1.0 - math.sqrt(1.0 - 4.0 * sigma_eps2)) / 2.0)
    if kind == "geometric":
        return Geometric(p=(-1.0 + math.sqrt(1.0 + 4.0 * sigma_eps2)) / (2.0 * sigma_eps2))
    if kind == "gaussian":
        return Gaussian(mu=0.0, sigma=s)
    if kind == "poisson":
        return Poisson(lam=sigma_eps2)
    if kind == "student_t":
        return StudentT(nu=nu, alpha=s * math.sqrt((nu - 2.0) / nu))
    if kind == "uniform":
        return Uniform(a=-math.sqrt(3.0) * s, b=math.sqrt(3.0) * s)
    raise ValueError(f"unknown innovation kind {kind!r}; expected one of {sorted(_INNOVATION_KINDS)}")


def sample_innovation(dist: InnovationDist, n: int, seed: SeedLike) -> np.ndarray:
    """Draw n i.i.d. innovations, centered by the analytic mean of the variant."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return np.empty(0, dtype=float)
    rng = make_rng(seed)
    return dist._draw(rng, n) - dist.mean


# ---------------------------------------------------------------------------
# Process specifications
# ---------------------------------------------------------------------------

def companion_spectral_radius(phi: tuple[float, ...]) -> float:
    """Spectral radius of the AR companion matrix (< 1 iff stationary)."""
    p = len(phi)
    if p == 0:
        return 0.0
    comp = np.zeros((p, p))
    comp[0, :] = phi
    if p > 1:
        comp[1:, :-1] = np.eye(p - 1)
    return float(np.max(np.abs(np.linalg.eigvals(comp))))


@dataclass(frozen=True)
class ARSpec:
    """Stationary AR(p) definition: z_t = c + sum_i phi_i z_{t-i} + eps_t."""

    c: float
    phi: tuple[float, ...]
    innovation: InnovationDist
    sigma_eps2: float

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(float(v) for v in self.phi))
        if self.sigma_eps2 <= 0.0:
            raise ValueError(f"sigma_eps2 must be positive, got {self.sigma_eps2}")
        if not math.isclose(self.innovation.variance, self.sigma_eps2,
                            rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError(
                f"innovation variance {self.innovation.variance:.12g} does not match "
                f"sigma_eps2={self.sigma_eps2:.12g}")
        radius = companion_spectral_radius(self.phi)
        if radius >= 1.0:
            raise NonStationaryError(
                f"AR coefficients {self.phi} are non-stationary "
                f"(companion spectral radius {radius:.6f} >= 1)")

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def mean(self) -> float:
        return self.c / (1.0 - sum(self.phi))

    @classmethod
    def white_noise(cls, sigma_eps2: float = 0.25, kind: str = "gaussian") -> "ARSpec":
        return cls(c=0.0, phi=(), innovation=calibrate_innovation(kind, sigma_eps2),
                   sigma_eps2=sigma_eps2)

    @classmethod
    def ar1_for_ssnr(cls, ssnr_z: float, sigma_eps2: float = 0.25,
                     kind: str = "gaussian") -> "ARSpec":
        """AR(1) whose marginal-to-innovation variance ratio equals ssnr_z.

        Inverts ssnr_z = 1/(1 - phi1^2), i.e. phi1 = sqrt((ssnr_z - 1)/ssnr_z).
        ssnr_z = 1 gives white noise.
        """
        if ssnr_z < 1.0:
            raise ValueError(f"ssnr_z must be >= 1, got {ssnr_z}")
        if ssnr_z == 1.0:
            return cls.white_noise(sigma_eps2, kind)
        phi1 = math.sqrt((ssnr_z - 1.0) / ssnr_z)
        return cls(c=0.0, phi=(phi1,), innovation=calibrate_innovation(kind, sigma_eps2),
                   sigma_eps2=sigma_eps2)


@dataclass(frozen=True)
class DeterministicSpec:
    """Sum of K sinusoids with amplitude-adjusted harmonics over period T."""

    base_amplitude: float
    freqs: tuple[int, ...]
    phases: tuple[float, ...]
    period: int

    def __post_init__(self):
        object.__setattr__(self, "freqs", tuple(int(k) for k in self.freqs))
        object.__setattr__(self, "phases", tuple(float(v) for v in self.phases))
        if len(self.freqs) == 0:
            raise ValueError("at least one harmonic frequency is required")
        if len(self.freqs) != len(self.phases):
            raise ValueError(
                f"freqs and phases length mismatch: {len(self.freqs)} vs {len(self.phases)}")
        if any(k == 0 for k in self.freqs):
            raise ValueError("zero frequency is not allowed (amplitude adjustment divides by k_i)")
        if any(not 0.0 <= ph < 2.0 * math.pi for ph in self.phases):
            raise ValueError("phases must lie in [0, 2*pi)")
        if self.period < 1:
            raise ValueError(f"period must be >= 1, got {self.period}")
        if self.base_amplitude < 0.0:
            raise ValueError(f"base_amplitude must be >= 0, got {self.base_amplitude}")

    @property
    def K(self) -> int:
        return len(self.freqs)

    def amplitudes(self) -> np.ndarray:
        """Per-harmonic amplitudes A_i = A*sqrt(K) / (k_i * sqrt(sum 1/k_j^2))."""
        k = np.asarray(self.freqs, dtype=float)
        norm = math.sqrt(float(np.sum(1.0 / k**2)))
        return self.base_amplitude * math.sqrt(self.K) / (np.abs(k) * norm)

    @property
    def variance(self) -> float:
        """Exact variance over whole periods: (1/2) * sum A_i^2 = K*A^2/2."""
        return 0.5 * self.K * self.base_amplitude**2

    @classmethod
    def for_ssnr(cls, ssnr_v: float, sigma_eps2: float, freqs: tuple[int, ...],
                 phases: tuple[float, ...], period: int) -> "DeterministicSpec":
        """Choose the base amplitude so that K*A^2/(2*sigma_eps2) = ssnr_v."""
        if ssnr_v < 0.0:
            raise ValueError(f"ssnr_v must be >= 0, got {ssnr_v}")
        amp = math.sqrt(2.0 * sigma_eps2 * ssnr_v / len(freqs))
        return cls(base_amplitude=amp, freqs=freqs, phases=phases, period=period)


@dataclass(frozen=True)
class HybridSpec:
    """Deterministic sinusoid stack plus stochastic AR core; x = v + z."""

    ar: ARSpec
    det: DeterministicSpec | None
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError(f"length must be >= 0, got {self.length}")

    def ssnr_v(self) -> float:
        if self.det is None:
            return 0.0
        return self.det.variance / self.ar.sigma_eps2


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def default_burn_in(p: int) -> int:
    return 10 * p + 100


def simulate_ar(spec: ARSpec, n: int, burn_in: int | None = None,
                seed: SeedLike = 0) -> np.ndarray:
    """Simulate n samples of the AR process after discarding burn_in.

    The centered recursion is run as an IIR filter initialized at zero
    (the process mean), then shifted by c/(1 - sum phi).
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if burn_in is None:
        burn_in = default_burn_in(spec.p)
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")
    if n == 0:
        return np.empty(0, dtype=float)
    eps = sample_innovation(spec.innovation, n + burn_in, seed)
    if spec.p == 0:
        z = eps
    else:
        a = np.concatenate(([1.0], -np.asarray(spec.phi)))
        z = signal.lfilter([1.0], a, eps)
    return spec.mean + z[burn_in:]


def synthesize_deterministic(spec: DeterministicSpec, n: int) -> np.ndarray:
    """Evaluate v_t = sum_i A_i sin(2*pi*k_i*t/T + phase_i) for t = 0..n-1."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    t = np.arange(n, dtype=float)
    amps = spec.amplitudes()
    v = np.zeros(n)
    for amp, k, ph in zip(amps, spec.freqs, spec.phases):
        v += amp * np.sin(2.0 * math.pi * k * t / spec.period + ph)
    return v


def synthesize_hybrid(spec: HybridSpec, seed: SeedLike = 0) -> np.ndarray:
    """Element-wise sum of the deterministic and AR paths."""
    if spec.length == 0:
        return np.empty(0, dtype=float)
    (ar_seed,) = spawn_seeds(seed, 1)
    z = simulate_ar(spec.ar, spec.length, seed=ar_seed)
    if spec.det is None:
        return z
    return synthesize_deterministic(spec.det, spec.length) + z


# ---------------------------------------------------------------------------
# JSON serialization (schema: {"ar": {...}, "det": {...}, "length": N})
# ---------------------------------------------------------------------------

_INNOVATION_JSON_FIELDS = {
    "binomial": ("n", "p"),
    "geometric": ("p",),
    "gaussian": ("mu", "sigma"),
    "poisson": ("lambda",),
    "student_t": ("nu", "alpha"),
    "uniform": ("a", "b"),
}


def _check_keys(obj: dict, allowed: tuple[str, ...], where: str) -> None:
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ValueError(f"unknown field(s) in {where}: {sorted(unknown)}")


def innovation_to_dict(dist: InnovationDist) -> dict:
    kind = innovation_kind(dist)
    out = {"kind": kind}
    for field_name in _INNOVATION_JSON_FIELDS[kind]:
        attr = "lam" if field_name == "lambda" else field_name
        out[field_name] = getattr(dist, attr)
    return out


def innovation_from_dict(obj: dict) -> InnovationDist:
    if "kind" not in obj:
        raise ValueError("innovation object requires a 'kind' field")
    kind = obj["kind"]
    if kind not in _INNOVATION_JSON_FIELDS:
        raise ValueError(f"unknown innovation kind {kind!r}")
    fields = _INNOVATION_JSON_FIELDS[kind]
    _check_keys(obj, ("kind",) + fields, f"innovation[{kind}]")
    missing = [f for f in fields if f not in obj]
    if missing:
        raise ValueError(f"innovation[{kind}] missing field(s): {missing}")
    kwargs = {("lam" if f == "lambda" else f): obj[f] for f in fields}
    if kind == "binomial":
        kwargs["n"] = int(kwargs["n"])
    return _INNOVATION_KINDS[kind](**kwargs)


def ar_spec_to_dict(spec: ARSpec) -> dict:
    return {
        "c": spec.c,
        "phi": list(spec.phi),
        "innovation": innovation_to_dict(spec.innovation),
        "sigma_eps2": spec.sigma_eps2,
    }


def ar_spec_from_dict(obj: dict) -> ARSpec:
    _check_keys(obj, ("c", "phi", "innovation", "sigma_eps2"), "ar")
    missing = [f for f in ("c", "phi", "innovation", "sigma_eps2") if f not in obj]
    if missing:
        raise ValueError(f"ar spec missing field(s): {missing}")
    return ARSpec(c=float(obj["c"]), phi=tuple(obj["phi"]),
                  innovation=innovation_from_dict(obj["innovation"]),
                  sigma_eps2=float(obj["sigma_eps2"]))


def det_spec_to_dict(spec: DeterministicSpec) -> dict:
    return {
        "K": spec.K,
        "base_amplitude": spec.base_amplitude,
        "freqs": list(spec.freqs),
        "phases": list(spec.phases),
        "period": spec.period,
    }


def det_spec_from_dict(obj: dict) -> DeterministicSpec:
    fields = ("K", "base_amplitude", "freqs", "phases", "period")
    _check_keys(obj, fields, "det")
    missing = [f for f in ("base_amplitude", "freqs", "phases", "period") if f not in obj]
    if missing:
        raise ValueError(f"det spec missing field(s): {missing}")
    spec = DeterministicSpec(base_amplitude=float(obj["base_amplitude"]),
                             freqs=tuple(obj["freqs"]), phases=tuple(obj["phases"]),
                             period=int(obj["period"]))
    if "K" in obj and int(obj["K"]) != spec.K:
        raise ValueError(f"det spec K={obj['K']} does not match len(freqs)={spec.K}")
    return spec


def hybrid_spec_to_dict(spec: HybridSpec) -> dict:
    out = {"ar": ar_spec_to_dict(spec.ar), "length": spec.length}
    if spec.det is not None:
        out["det"] = det_spec_to_dict(spec.det)
    return out


def hybrid_spec_from_dict(obj: dict) -> HybridSpec:
    _check_keys(obj, ("ar", "det", "length"), "process spec")
    if "ar" not in obj or "length" not in obj:
        raise ValueError("process spec requires 'ar' and 'length' fields")
    det = det_spec_from_dict(obj["det"]) if obj.get("det") is not None else None
    return HybridSpec(ar=ar_spec_from_dict(obj["ar"]), det=det, length=int(obj["length"]))

"""Closed-form expectation of optimization bias for stationary processes.

A point-wise loss implicitly factorizes the joint density of a length-T
window into a product of marginals. For a Gaussian stationary process the
expected log-likelihood gap between the true joint and that factorization
has two equivalent closed forms:

* correlation-determinant form:  E[B] = -1/2 * log det(R)
  with R the T x T autocorrelation matrix;
* AR(p) form:  E[B] = (T-p)/2 * log(SSNR) - 1/2 * log det(R_p)
  where SSNR = sigma_z^2 / sigma_eps^2 = 1 / (1 - sum_i phi_i rho_i)
  comes from the Yule-Walker equations and R_p is the p x p correlation
  matrix of the first p observations.

The two agree exactly through the determinant decomposition
det(R) = det(R_p) * SSNR^{-(T-p)}, and det(R)^{1/T} -> 1/SSNR as T grows
(Szegő limit). All logarithms are natural, so values are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .processes import ARSpec

__all__ = [
    "CorrMatrix",
    "EobReport",
    "NotPositiveDefiniteError",
    "YuleWalkerSolution",
    "autocorrelations",
    "corr_matrix_from_ar",
    "eob_ar_closed_form",
    "eob_gmm_lower_bound",
    "eob_mgm",
    "mixture_entropy",
    "snr_to_ssnr",
    "solve_yule_walker",
    "ssnr_to_snr",
    "szego_convergence_curve",
    "verify_determinant_decomposition",
]

NATS_TO_BITS = 1.0 / math.log(2.0)


class NotPositiveDefiniteError(ValueError):
    """Matrix is not positive definite; carries the offending min eigenvalue."""

    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(
            f"correlation matrix is not positive definite "
            f"(min eigenvalue {min_eigenvalue:.3e})")


@dataclass(frozen=True)
class YuleWalkerSolution:
    """Autocorrelations rho_1..rho_p with the implied variance and SSNR."""

    rho: np.ndarray
    sigma_z2: float
    ssnr: float

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)


@dataclass(frozen=True)
class CorrMatrix:
    """Symmetric PSD matrix with unit diagonal, immutable after construction."""

    values: np.ndarray

    # diagonal must be exactly 1; PSD up to -1e-10 * dim
    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"correlation matrix must be square, got shape {values.shape}")
        if values.shape[0] == 0:
            raise ValueError("correlation matrix must have dim >= 1")
        if not np.array_equal(np.diag(values), np.ones(values.shape[0])):
            raise ValueError("correlation matrix diagonal must be exactly 1")
        if not np.allclose(values, values.T, rtol=0.0, atol=1e-12):
            raise ValueError("correlation matrix must be symmetric")
        values = 0.5 * (values + values.T)
        np.fill_diagonal(values, 1.0)
        min_eig = float(np.linalg.eigvalsh(values)[0])
        if min_eig < -1e-10 * values.shape[0]:
            raise NotPositiveDefiniteError(min_eig)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "CorrMatrix":
        return cls(np.eye(dim))

    def log_det(self) -> float:
        """log det via Cholesky; rejects non-PD input with a diagnostic."""
        try:
            chol = np.linalg.cholesky(self.values)
        except np.linalg.LinAlgError:
            raise NotPositiveDefiniteError(float(np.linalg.eigvalsh(self.values)[0])) from None
        return 2.0 * float(np.sum(np.log(np.diag(chol))))


@dataclass(frozen=True)
class EobReport:
    """Expected optimization bias in nats, with its steady/transient split."""

    value_nats: float
    ssnr: float
    T: int
    p: int
    steady_term: float
    transient_term: float
    method: str

    @property
    def value_bits(self) -> float:
        return self.value_nats * NATS_TO_BITS

    def to_dict(self) -> dict:
        return {
            "value_nats": self.value_nats,
            "ssnr": self.ssnr,
            "T": self.T,
            "p": self.p,
            "steady_term": self.steady_term,
            "transient_term": self.transient_term,
            "method": self.method,
        }


# ---------------------------------------------------------------------------
# Yule-Walker and correlation structure
# ---------------------------------------------------------------------------

def solve_yule_walker(spec: ARSpec) -> YuleWalkerSolution:
    """Solve the p x p Yule-Walker system for rho_1..rho_p.

    rho_k = sum_i phi_i rho_{|k-i|} for k = 1..p with rho_0 = 1, then
    sigma_z^2 = sigma_eps^2 / (1 - sum_i phi_i rho_i).
    """
    p = spec.p
    phi = np.asarray(spec.phi, dtype=float)
    if p == 0:
        return YuleWalkerSolution(rho=np.empty(0), sigma_z2=spec.sigma_eps2, ssnr=1.0)
    # Collect coefficients on the unknowns rho_1..rho_p; the rho_0 terms
    # (|k-i| = 0) move to the right-hand side as phi_k.
    A = np.eye(p)
    for k in range(1, p + 1):
        for i in range(1, p + 1):
            lag = abs(k - i)
            if lag > 0:
                A[k - 1, lag - 1] -= phi[i - 1]
    try:
        rho = np.linalg.solve(A, phi)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"Yule-Walker system is singular for phi={spec.phi}") from exc
    denom = 1.0 - float(np.dot(phi, rho))
    if denom <= 0.0:
        raise ValueError(
            f"Yule-Walker solution implies non-positive innovation fraction "
            f"({denom:.3e}); phi={spec.phi} is numerically non-stationary")
    if np.any(np.abs(rho) > 1.0 + 1e-9):
        raise ValueError(f"Yule-Walker autocorrelations escape [-1, 1]: {rho}")
    return YuleWalkerSolution(rho=rho, sigma_z2=spec.sigma_eps2 / denom, ssnr=1.0 / denom)


def autocorrelations(spec: ARSpec, max_lag: int) -> np.ndarray:
    """rho_0..rho_max_lag, extended beyond lag p by rho_k = sum_i phi_i rho_{k-i}."""
    if max_lag < 0:
        raise ValueError(f"max_lag must be >= 0, got {max_lag}")
    yw = solve_yule_walker(spec)
    rho = np.ones(max_lag + 1)
    upto = min(spec.p, max_lag)
    rho[1:upto + 1] = yw.rho[:upto]
    phi = np.asarray(spec.phi)
    for k in range(spec.p + 1, max_lag + 1):
        rho[k] = float(np.dot(phi, rho[k - spec.p:k][::-1]))
    return rho


def corr_matrix_from_ar(spec: ARSpec, T: int) -> CorrMatrix:
    """Toeplitz matrix R_ij = rho_{|i-j|} for a window of length T."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    rho = autocorrelations(spec, T - 1)
    return CorrMatrix(linalg.toeplitz(rho))


# ---------------------------------------------------------------------------
# Bias formulas
# ---------------------------------------------------------------------------

def eob_ar_closed_form(spec: ARSpec, T: int) -> EobReport:
    """Closed-form bias: (T-p)/2 * log(SSNR) plus the transient constant.

    The transient constant is -1/2 * log det(R_p), the contribution of the
    first p observations; the total equals -1/2 * log det(R) exactly.
    """
    if T <= spec.p:
        raise ValueError(f"T must exceed the AR order p={spec.p}, got T={T}")
    yw = solve_yule_walker(spec)
    steady = 0.5 * (T - spec.p) * math.log(yw.ssnr)
    if spec.p == 0:
        transient = 0.0
    else:
        transient = -0.5 * corr_matrix_from_ar(spec, spec.p).log_det() + 0.0
    return EobReport(value_nats=steady + transient, ssnr=yw.ssnr, T=T, p=spec.p,
                     steady_term=steady, transient_term=transient,
                     method="ar_closed_form")


def eob_mgm(R: CorrMatrix) -> EobReport:
    """Bias from the correlation determinant: -1/2 * log det(R).

    No steady/transient split is available from a bare matrix; the whole
    value sits in steady_term. The reported SSNR is the geometric-mean
    implied value det(R)^{-1/T}.
    """
    log_det = R.log_det()
    value = -0.5 * log_det
    return EobReport(value_nats=value, ssnr=math.exp(-log_det / R.dim), T=R.dim, p=0,
                     steady_term=value, transient_term=0.0, method="mgm_determinant")


def verify_determinant_decomposition(spec: ARSpec, T: int) -> float:
    """Relative residual of det(R) = det(R_p) * SSNR^{-(T-p)}.

    Computed in the log domain as |expm1(delta)| so tiny determinants at
    large T do not underflow.
    """
    if T <= spec.p:
        raise ValueError(f"T must exceed the AR order p={spec.p}, got T={T}")
    yw = solve_yule_walker(spec)
    log_det_T = corr_matrix_from_ar(spec, T).log_det()
    log_det_p = corr_matrix_from_ar(spec, spec.p).log_det() if spec.p > 0 else 0.0
    delta = log_det_T - (log_det_p - (T - spec.p) * math.log(yw.ssnr))
    return abs(math.expm1(delta))


def szego_convergence_curve(spec: ARSpec, T_values) -> list[tuple[int, float]]:
    """(T, det(R)^{1/T}) pairs; the geometric mean tends to 1/SSNR."""
    out = []
    for T in T_values:
        T = int(T)
        log_det = corr_matrix_from_ar(spec, T).log_det()
        out.append((T, math.exp(log_det / T)))
    return out


def eob_gmm_lower_bound(weights, component_eobs) -> float:
    """Mixture lower bound: sum_k pi_k * B_k - H(pi).

    H(pi) is the Shannon entropy of the weights (nats, 0*log 0 = 0). The
    bound may be negative; it is not clamped. Component values are assumed
    to share the same window length.
    """
    pi = np.asarray(weights, dtype=float)
    eobs = np.asarray(component_eobs, dtype=float)
    if pi.shape != eobs.shape or pi.ndim != 1:
        raise ValueError(
            f"weights and component_eobs must be 1-d and equal length, "
            f"got {pi.shape} vs {eobs.shape}")
    if np.any(pi < 0.0):
        raise ValueError(f"mixture weights must be non-negative, got {pi}")
    if abs(float(np.sum(pi)) - 1.0) > 1e-12:
        raise ValueError(f"mixture weights must sum to 1 within 1e-12, got sum={np.sum(pi)!r}")
    return float(np.dot(pi, eobs)) - mixture_entropy(pi)


def mixture_entropy(weights) -> float:
    """Shannon entropy of a probability vector in nats, with 0*log 0 = 0."""
    pi = np.asarray(weights, dtype=float)
    nz = pi[pi > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def ssnr_to_snr(ssnr: float) -> float:
    if ssnr < 1.0:
        raise ValueError(f"ssnr must be >= 1, got {ssnr}")
    return ssnr - 1.0


def snr_to_ssnr(snr: float) -> float:
    if snr < 0.0:
        raise ValueError(f"snr must be >= 0, got {snr}")
    return snr + 1.0

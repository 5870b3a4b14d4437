"""Unitary DFT and orthogonal DWT with exact inverses.

The DFT uses the unitary normalization 1/sqrt(L), so energy is preserved
(Parseval) and the inverse is the conjugate transpose. The DWT is the
pyramidal filter-bank scheme with periodic boundary extension, which keeps
the analysis matrix W strictly orthogonal (W^T W = I) at every level, so
synthesis is plain transposition and round-trips are exact to rounding.

A truncation operator keeps the first `keep` spectral bins as a compact
optimization target; it is exactly invertible on inputs whose spectrum is
supported there, and reports the discarded energy otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AmpPhase",
    "Compressed",
    "Spectrum",
    "WaveletCoeffs",
    "WAVELET_FILTERS",
    "compress_truncate",
    "dft_forward",
    "dft_inverse",
    "dwt_forward",
    "dwt_inverse",
    "dwt_matrix",
    "from_amp_phase",
    "inverse_pad",
    "pad_edge_pow2",
    "real_fourier_coordinates",
    "to_amp_phase",
]


@dataclass(frozen=True)
class Spectrum:
    """Complex spectrum stored as separate real and imaginary vectors."""

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        re = np.asarray(self.re, dtype=float)
        im = np.asarray(self.im, dtype=float)
        if re.ndim != 1 or re.shape != im.shape:
            raise ValueError(f"re and im must be 1-d and equal length, got {re.shape} vs {im.shape}")
        re.flags.writeable = False
        im.flags.writeable = False
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @property
    def length(self) -> int:
        return self.re.shape[0]

    def as_complex(self) -> np.ndarray:
        return self.re + 1j * self.im

    @classmethod
    def from_complex(cls, values: np.ndarray) -> "Spectrum":
        values = np.asarray(values, dtype=complex)
        return cls(re=values.real.copy(), im=values.imag.copy())

    def energy(self) -> float:
        return float(np.sum(self.re**2 + self.im**2))


@dataclass(frozen=True)
class AmpPhase:
    """Polar form: amplitude >= 0, phase in (-pi, pi], zero bins get phase 0."""

    amp: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=float)
        phase = np.asarray(self.phase, dtype=float)
        if amp.shape != phase.shape or amp.ndim != 1:
            raise ValueError("amp and phase must be 1-d and equal length")
        if np.any(amp < 0.0):
            raise ValueError("amplitudes must be non-negative")
        amp.flags.writeable = False
        phase.flags.writeable = False
        object.__setattr__(self, "amp", amp)
        object.__setattr__(self, "phase", phase)


def dft_forward(x: np.ndarray) -> Spectrum:
    """Unitary DFT: f_k = (1/sqrt(L)) sum_l x_l exp(-2i*pi*k*l/L)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 1:
        raise ValueError(f"input must be a non-empty 1-d vector, got shape {x.shape}")
    return Spectrum.from_complex(np.fft.fft(x, norm="ortho"))


def dft_inverse(f: Spectrum) -> np.ndarray:
    """Conjugate-transpose inverse; returns the real part.

    For spectra of real signals (conjugate symmetric) the imaginary
    residue is at rounding level.
    """
    return np.fft.ifft(f.as_complex(), norm="ortho").real


def real_fourier_coordinates(x: np.ndarray) -> np.ndarray:
    """Orthonormal real trigonometric coordinates of real rows.

    Re-expresses each length-L row in the real Fourier basis (DC, then the
    scaled cosine and sine coefficients), keeping the dimension at L and
    the energy unchanged. Unlike stacking raw re/im parts of the full
    spectrum, this drops no axes and duplicates none, so correlation
    diagnostics of raw and transformed windows are directly comparable.
    """
    x = np.asarray(x, dtype=float)
    L = x.shape[-1]
    if L < 1:
        raise ValueError("input rows must be non-empty")
    f = np.fft.fft(x, norm="ortho", axis=-1)
    upper = (L + 1) // 2
    parts = [f.real[..., :1]]
    if upper > 1:
        parts.append(_SQRT2 * f.real[..., 1:upper])
    if L % 2 == 0 and L > 1:
        parts.append(f.real[..., L // 2:L // 2 + 1])
    if upper > 1:
        parts.append(_SQRT2 * f.imag[..., 1:upper])
    return np.concatenate(parts, axis=-1)


def to_amp_phase(f: Spectrum) -> AmpPhase:
    amp = np.hypot(f.re, f.im)
    phase = np.arctan2(f.im, f.re)
    phase[phase == -math.pi] = math.pi
    phase[amp == 0.0] = 0.0
    return AmpPhase(amp=amp, phase=phase)


def from_amp_phase(ap: AmpPhase) -> Spectrum:
    return Spectrum(re=ap.amp * np.cos(ap.phase), im=ap.amp * np.sin(ap.phase))


# ---------------------------------------------------------------------------
# Discrete wavelet transform (periodized, orthogonal)
# ---------------------------------------------------------------------------

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)

# Orthonormal scaling (lowpass) filters; highpass is the quadrature mirror
# g[n] = (-1)^n h[N-1-n].
WAVELET_FILTERS = {
    "haar": np.array([1.0, 1.0]) / _SQRT2,
    "db2": np.array([1.0 + _SQRT3, 3.0 + _SQRT3, 3.0 - _SQRT3, 1.0 - _SQRT3]) / (4.0 * _SQRT2),
}


def _filters(wavelet: str) -> tuple[np.ndarray, np.ndarray]:
    if wavelet not in WAVELET_FILTERS:
        raise ValueError(f"unknown wavelet {wavelet!r}; expected one of {sorted(WAVELET_FILTERS)}")
    h = WAVELET_FILTERS[wavelet]
    g = (h[::-1] * np.where(np.arange(h.size) % 2 == 0, 1.0, -1.0))
    return h, g


@dataclass(frozen=True)
class WaveletCoeffs:
    """Flat coefficient vector: approximation block, then details coarse to fine."""

    coeffs: np.ndarray
    levels: int
    wavelet: str

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        if coeffs.shape[0] % (1 << self.levels) != 0:
            raise ValueError(
                f"coefficient length {coeffs.shape[0]} is not divisible by 2^{self.levels}")

    @property
    def length(self) -> int:
        return self.coeffs.shape[0]

    def blocks(self) -> dict[str, np.ndarray]:
        """Named bands: a{J}, d{J}, d{J-1}, ..., d1."""
        out = {}
        size = self.length >> self.levels
        out[f"a{self.levels}"] = self.coeffs[:size]
        start = size
        for level in range(self.levels, 0, -1):
            out[f"d{level}"] = self.coeffs[start:start + size]
            start += size
            size *= 2
        return out

    def energy(self) -> float:
        return float(np.sum(self.coeffs**2))


def _analysis_step(x: np.ndarray, h: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    L = x.shape[0]
    idx = (2 * np.arange(L // 2)[:, None] + np.arange(h.size)[None, :]) % L
    windows = x[idx]
    return windows @ h, windows @ g


def _synthesis_step(a: np.ndarray, d: np.ndarray, h: np.ndarray, g: np.ndarray) -> np.ndarray:
    L = 2 * a.shape[0]
    idx = (2 * np.arange(a.shape[0])[:, None] + np.arange(h.size)[None, :]) % L
    x = np.zeros(L)
    np.add.at(x, idx, a[:, None] * h[None, :] + d[:, None] * g[None, :])
    return x


def dwt_forward(x: np.ndarray, wavelet: str = "haar", levels: int = 1) -> WaveletCoeffs:
    """Pyramidal analysis with periodic extension; O(L) per level."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"input must be 1-d, got shape {x.shape}")
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    if x.shape[0] % (1 << levels) != 0:
        raise ValueError(
            f"length {x.shape[0]} is not divisible by 2^{levels}; pad the input "
            f"(see pad_edge_pow2) or reduce the level count")
    h, g = _filters(wavelet)
    approx = x
    details: list[np.ndarray] = []
    for _ in range(levels):
        approx, detail = _analysis_step(approx, h, g)
        details.append(detail)
    return WaveletCoeffs(coeffs=np.concatenate([approx] + details[::-1]),
                         levels=levels, wavelet=wavelet)


def dwt_inverse(w: WaveletCoeffs) -> np.ndarray:
    """Synthesis by transposition of the orthogonal analysis; exact inverse."""
    h, g = _filters(w.wavelet)
    blocks = w.blocks()
    approx = blocks[f"a{w.levels}"]
    for level in range(w.levels, 0, -1):
        approx = _synthesis_step(approx, blocks[f"d{level}"], h, g)
    return approx


def dwt_matrix(length: int, wavelet: str = "haar", levels: int = 1) -> np.ndarray:
    """Materialize the analysis matrix W (rows map x to coefficients)."""
    W = np.empty((length, length))
    for i in range(length):
        e = np.zeros(length)
        e[i] = 1.0
        W[:, i] = dwt_forward(e, wavelet, levels).coeffs
    return W


def pad_edge_pow2(x: np.ndarray) -> tuple[np.ndarray, int]:
    """Pad with edge replication up to the next power of two.

    Returns (padded, original_length) so the caller can undo the padding.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n == 0:
        raise ValueError("cannot pad an empty vector")
    target = 1 << max(0, (n - 1).bit_length())
    if target == n:
        return x, n
    return np.concatenate([x, np.full(target - n, x[-1])]), n


# ---------------------------------------------------------------------------
# Spectral truncation (compact optimization targets)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Compressed:
    """Truncated spectrum plus what is needed to invert and audit it."""

    spectrum: Spectrum
    original_length: int
    discarded_energy: float
    total_energy: float

    @property
    def discarded_fraction(self) -> float:
        if self.total_energy == 0.0:
            return 0.0
        return self.discarded_energy / self.total_energy


def compress_truncate(f: Spectrum, keep: int) -> Compressed:
    """Keep the first `keep` spectral bins; report the energy thrown away.

    Inversion (inverse_pad) zero-fills the dropped bins, so by Parseval the
    reconstruction error equals the discarded energy: zero exactly when the
    input spectrum is supported on the kept bins, and reported otherwise.
    """
    if keep < 1:
        raise ValueError(f"keep must be >= 1, got {keep}")
    if keep > f.length:
        raise ValueError(f"keep={keep} exceeds spectrum length {f.length}")
    total = f.energy()
    kept = Spectrum(re=f.re[:keep].copy(), im=f.im[:keep].copy())
    return Compressed(spectrum=kept, original_length=f.length,
                      discarded_energy=total - kept.energy(), total_energy=total)


def inverse_pad(c: Compressed) -> Spectrum:
    """Zero-pad a truncated spectrum back to its original length."""
    re = np.zeros(c.original_length)
    im = np.zeros(c.original_length)
    keep = c.spectrum.length
    re[:keep] = c.spectrum.re
    im[:keep] = c.spectrum.im
    return Spectrum(re=re, im=im)

"""Signals, spectra, DFT conventions and the SHG-FROG forward model.

Conventions used throughout the package:

* forward DFT is unnormalized, ``X_k = sum_n x_n exp(-2*pi*i*k*n/N)``;
  the inverse carries the ``1/N`` factor,
* all signals are periodic with period N; indices are taken mod N,
* a trace stores squared magnitudes, not magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParametersError


def _frozen_complex_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidParametersError("expected a non-empty 1-D vector")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Signal:
    """Length-N complex time-domain vector, cyclic in its index."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_complex_vector(self.values))

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class Spectrum:
    """Length-N complex frequency-domain vector (unnormalized-DFT values)."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_complex_vector(self.values))

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class BandlimitSpec:
    """Support window of a spectrum: ``b`` possibly-nonzero consecutive
    coefficients starting at index ``start`` (cyclically).

    The remaining ``N - b`` coefficients are zero.  Recovery additionally
    requires ``b <= N/2``; the spec itself only pins the window.
    """

    b: int
    start: int = 0

    def __post_init__(self):
        if self.b < 1:
            raise InvalidParametersError("bandlimit b must be a positive integer")

    def indices(self, n: int) -> np.ndarray:
        """Cyclic positions of the band inside a length-``n`` spectrum."""
        if self.b > n:
            raise InvalidParametersError(f"bandlimit b={self.b} exceeds N={n}")
        return (self.start + np.arange(self.b)) % n

    def unwrapped_indices(self, n: int) -> np.ndarray:
        """Integer exponents ``start .. start+b-1`` used for continuous
        modulation; these do not wrap mod N."""
        if self.b > n:
            raise InvalidParametersError(f"bandlimit b={self.b} exceeds N={n}")
        return self.start + np.arange(self.b)

    def conforms(self, spectrum: Spectrum, rel_tol: float = 1e-12) -> bool:
        """True iff all coefficients outside the band are (numerically) zero."""
        n = spectrum.n
        if self.b >= n:
            return True
        mask = np.ones(n, dtype=bool)
        mask[self.indices(n)] = False
        scale = np.max(np.abs(spectrum.values))
        return bool(np.all(np.abs(spectrum.values[mask]) <= rel_tol * max(scale, 1e-300)))


@dataclass(frozen=True)
class FrogTrace:
    """N x r matrix of squared Fourier magnitudes of the shifted products,
    r = N/L.  Column m corresponds to shift m*L."""

    data: np.ndarray
    l: int

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise InvalidParametersError("trace data must be a 2-D array")
        n, r = arr.shape
        if self.l < 1 or n != r * self.l:
            raise InvalidParametersError(
                f"trace shape {arr.shape} inconsistent with L={self.l}: need r = N/L"
            )
        if np.min(arr) < 0:
            raise InvalidParametersError("trace entries must be nonnegative")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def r(self) -> int:
        return self.data.shape[1]


def _check_step(n: int, l: int) -> int:
    if l < 1 or n % l != 0:
        raise InvalidParametersError(f"step L={l} must divide N={n}")
    return n // l


def dft(x: Signal) -> Spectrum:
    """Unnormalized forward DFT."""
    return Spectrum(np.fft.fft(x.values))


def idft(xhat: Spectrum) -> Signal:
    """Inverse DFT with the 1/N factor."""
    return Signal(np.fft.ifft(xhat.values))


def shift_product_table(n: int, l: int) -> np.ndarray:
    """Index table ``idx[p, m] = (p + m*L) mod N`` for building all shifted
    products in one fancy-indexing step."""
    r = _check_step(n, l)
    p = np.arange(n)[:, None]
    m = np.arange(r)[None, :]
    return (p + m * l) % n


def product_signal(x: Signal, m: int, l: int) -> Signal:
    """Pointwise product of the signal with its own cyclic shift by m*L."""
    r = _check_step(x.n, l)
    if not 0 <= m < r:
        raise InvalidParametersError(f"shift index m={m} outside 0..{r - 1}")
    return Signal(x.values * np.roll(x.values, -m * l))


def frog_trace(x: Signal, l: int) -> FrogTrace:
    """Squared Fourier magnitudes of all r = N/L shifted self-products."""
    idx = shift_product_table(x.n, l)
    products = x.values[:, None] * x.values[idx]
    coeffs = np.fft.fft(products, axis=0)
    return FrogTrace(np.abs(coeffs) ** 2, l)


def frog_freq_coeffs(xhat: Spectrum, l: int) -> np.ndarray:
    """Trace coefficients computed in the frequency domain.

    Returns the N x r complex array
    ``out[k, m] = (1/N) * sum_l xhat_l * xhat_{(k-l) mod N} * w**(l*m)``
    with ``w = exp(2*pi*i/r)``.  Entrywise squared magnitudes equal the
    time-domain trace.
    """
    n = xhat.n
    r = _check_step(n, l)
    omega = np.exp(2j * np.pi / r)
    out = np.empty((n, r), dtype=np.complex128)
    base = np.fft.fft(xhat.values)
    ell = np.arange(n)
    for m in range(r):
        weighted = xhat.values * omega ** (ell * m)
        # circular convolution (weighted * xhat) via the convolution theorem
        out[:, m] = np.fft.ifft(np.fft.fft(weighted) * base) / n
    return out

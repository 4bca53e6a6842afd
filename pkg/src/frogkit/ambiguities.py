"""The trace symmetry group and a distance between spectra modulo it.

Generators acting on a spectrum: global phase rotation, translation
(modulation of coefficient k by ``exp(-2*pi*i*shift*k/N)``) and reflection
(entrywise conjugation).  Reflection and translation do not commute:
conjugating a modulated spectrum negates the shift, so the discrete part of
the group is dihedral.

For bandlimited spectra the translation parameter may be any real number.
Fractional shifts must modulate with the *unwrapped* band exponents
``start .. start+b-1``: when the band wraps past N the naive per-index
modulation inserts extra factors ``exp(-2*pi*i*shift)`` on the wrapped part
and breaks trace invariance, while the unwrapped exponents keep every trace
row multiplied by a single unimodular factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParametersError, InvalidUseError
from .signal_model import BandlimitSpec, Spectrum, frog_trace, idft

_INT_TOL = 1e-12


@dataclass(frozen=True)
class AmbiguityElement:
    """One symmetry: reflection, then translation by ``shift``, then global
    phase ``psi``.  ``shift`` must be an integer unless the spectrum it acts
    on is bandlimited."""

    psi: float = 0.0
    shift: float = 0.0
    reflected: bool = False


def _is_integral(shift: float) -> bool:
    return abs(shift - round(shift)) <= _INT_TOL


def _apply_raw(
    values: np.ndarray,
    psi: float,
    shift: float,
    reflected: bool,
    band: BandlimitSpec | None,
) -> np.ndarray:
    n = values.size
    out = np.conj(values) if reflected else values.copy()
    if shift != 0.0:
        if _is_integral(shift):
            k = np.arange(n)
            out = out * np.exp(-2j * np.pi * round(shift) * k / n)
        else:
            if band is None:
                raise InvalidUseError(
                    "fractional shift requires a bandlimit specification"
                )
            exps = band.unwrapped_indices(n)
            phase = np.exp(-2j * np.pi * shift * exps / n)
            out = out.copy()
            out[band.indices(n)] *= phase
    if psi != 0.0:
        out = out * np.exp(1j * psi)
    return out


def apply(
    g: AmbiguityElement, xhat: Spectrum, band: BandlimitSpec | None = None
) -> Spectrum:
    """Act on a spectrum: reflection first, then translation, then rotation."""
    return Spectrum(_apply_raw(xhat.values, g.psi, g.shift, g.reflected, band))


def trace_invariant(
    xhat: Spectrum,
    g: AmbiguityElement,
    l: int,
    band: BandlimitSpec | None = None,
    rel_tol: float = 1e-9,
) -> bool:
    """True iff applying ``g`` leaves the trace unchanged entrywise."""
    t0 = frog_trace(idft(xhat), l).data
    t1 = frog_trace(idft(apply(g, xhat, band)), l).data
    scale = max(float(np.max(t0)), 1e-300)
    return bool(np.max(np.abs(t0 - t1)) <= rel_tol * scale)


def _best_rotation_residual(u: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Distance and optimal phase for ``exp(i*psi)*u`` against ``b``.

    Returns ``(||exp(i*psi*)u - b||^2, psi*)`` minimized over psi.  The norm
    is evaluated on the actual difference: the inner-product shortcut cancels
    catastrophically when u is already close to b.
    """
    inner = np.vdot(b, u)  # sum conj(b) * u
    psi = float(-np.angle(inner)) if inner != 0 else 0.0
    d2 = float(np.linalg.norm(u * np.exp(1j * psi) - b) ** 2)
    return d2, psi


def _golden_section(f, lo: float, hi: float, tol: float) -> float:
    """Minimizer of a unimodal function on [lo, hi] to within ``tol``."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def _newton_polish(coeffs: np.ndarray, freqs: np.ndarray, s0: float, radius: float) -> float:
    """Sharpen a local maximizer of ``|sum coeffs*exp(i*freqs*s)|``.

    Golden section alone stalls at the sqrt(eps) argmax-location floor; the
    squared modulus is smooth, so Newton on its derivative reaches machine
    precision.  Falls back to ``s0`` if the iteration leaves the bracket.
    """
    s = s0
    for _ in range(60):
        phase = np.exp(1j * freqs * s)
        c = np.sum(coeffs * phase)
        c1 = np.sum(coeffs * (1j * freqs) * phase)
        c2 = np.sum(coeffs * (1j * freqs) ** 2 * phase)
        g = 2.0 * np.real(np.conj(c) * c1)
        h = 2.0 * (np.real(np.conj(c1) * c1) + np.real(np.conj(c) * c2))
        if h >= 0 or not np.isfinite(g):
            break
        delta = -g / h
        if abs(s + delta - s0) > radius:  # left the bracket: distrust Newton
            return s0
        s += delta
        if abs(delta) < 1e-14 * (1.0 + abs(s)):
            break
    return s


def dist_mod_group(
    a: Spectrum,
    b: Spectrum,
    band: BandlimitSpec | None = None,
) -> tuple[float, AmbiguityElement]:
    """Minimal relative l2 distance ``||apply(g, a) - b|| / ||b||`` over the
    group, with the minimizing element.

    Without a band the shift ranges over the integers 0..N-1; with a band the
    shift is continuous (grid of 16N points refined by golden section to
    1e-10).  The optimal global phase has a closed form per (shift,
    reflection).  Ties break toward smaller shift, then unreflected.
    """
    if a.n != b.n:
        raise InvalidParametersError("spectra must have equal length")
    bnorm = float(np.linalg.norm(b.values))
    if bnorm == 0.0:
        raise InvalidParametersError("reference spectrum must be nonzero")
    n = a.n

    best: tuple[float, float, int, float] | None = None  # (d2, shift, refl, psi)

    def consider(d2: float, shift: float, refl: int, psi: float):
        nonlocal best
        if best is None or (d2, shift, refl) < (best[0], best[1], best[2]):
            best = (d2, shift, refl, psi)

    if band is None:
        k = np.arange(n)
        for refl in (0, 1):
            base = np.conj(a.values) if refl else a.values
            for shift in range(n):
                u = base * np.exp(-2j * np.pi * shift * k / n)
                d2, psi = _best_rotation_residual(u, b.values)
                consider(d2, float(shift), refl, psi)
    else:
        exps = band.unwrapped_indices(n)
        pos = band.indices(n)
        freqs = -2.0 * np.pi * exps / n
        for refl in (0, 1):
            base = np.conj(a.values) if refl else a.values
            # the rotation-optimal distance is const - 2*|overlap(s)|, so
            # maximizing the on-band overlap minimizes the distance
            coeffs = base[pos] * np.conj(b.values[pos])

            def overlap(s: float) -> float:
                return abs(np.sum(coeffs * np.exp(1j * freqs * s)))

            grid = np.linspace(0.0, n, 16 * n, endpoint=False)
            vals = np.abs(np.exp(1j * np.outer(grid, freqs)) @ coeffs)
            i0 = int(np.argmax(vals))
            step = grid[1] - grid[0]
            s_star = _golden_section(
                lambda s: -overlap(s), grid[i0] - step, grid[i0] + step, 1e-10
            )
            if overlap(s_star) < vals[i0]:
                s_star = float(grid[i0])
            s_star = _newton_polish(coeffs, freqs, s_star, step)
            u = _apply_raw(a.values, 0.0, s_star, bool(refl), band)
            d2, psi = _best_rotation_residual(u, b.values)
            consider(d2, float(s_star), refl, psi)

    d2, shift, refl, psi = best
    g = AmbiguityElement(psi=psi % (2 * np.pi), shift=shift, reflected=bool(refl))
    return float(np.sqrt(max(d2, 0.0)) / bnorm), g

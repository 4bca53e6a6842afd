"""Phaseless linear systems |z + v_i| = n_i.

Geometrically these are circle-intersection problems in the complex plane:
equation i is the circle of radius n_i centered at -v_i.  ``CircleSystem``
stores the geometric centers (-v_i).  Two solver regimes:

* generic complex centers, at least three equations, some center-difference
  ratio nonreal: the pairwise differences of the squared equations form a
  full-rank 2x2 (or overdetermined) real linear system with at most one
  solution;
* all centers real: the system is symmetric under conjugation, giving a
  conjugate pair (or nothing).

Both return the achieved residual; callers decide what tolerance means.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    DegenerateSystemError,
    InvalidParametersError,
    UnderdeterminedSystemError,
)

_COINCIDENT_TOL = 1e-14


@dataclass(frozen=True)
class CircleSystem:
    """Circles |z - centers[i]| = radii[i]; the offsets v_i are -centers[i]."""

    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        c = np.array(self.centers, dtype=np.complex128)
        n = np.array(self.radii, dtype=np.float64)
        if c.ndim != 1 or n.shape != c.shape or c.size < 2:
            raise InvalidParametersError("need s >= 2 centers with matching radii")
        if np.min(n) < 0:
            raise InvalidParametersError("radii must be nonnegative")
        c.flags.writeable = False
        n.flags.writeable = False
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", n)

    @property
    def offsets(self) -> np.ndarray:
        return -self.centers

    def residual_at(self, z: complex) -> float:
        return float(np.max(np.abs(np.abs(z - self.centers) - self.radii)))


@dataclass(frozen=True)
class CircleSolution:
    """Outcome of a solve.  ``kind`` is "unique", "pair" or "none"; the
    residual is always reported so callers can apply their own tolerance."""

    kind: Literal["unique", "pair", "none"]
    z: complex | None
    z_conjugate: complex | None
    residual: float

    @property
    def candidates(self) -> tuple[complex, ...]:
        if self.kind == "unique":
            return (self.z,)
        if self.kind == "pair":
            return (self.z, self.z_conjugate)
        return ()


def default_tolerance(radii) -> float:
    return 1e-8 * (1.0 + float(np.max(radii)))


def ratio_is_nonreal(v: np.ndarray, p: int, q: int, eps: float | None = None) -> bool:
    """True iff (v[0]-v[p])/(v[0]-v[q]) has imaginary part above ``eps``.

    Equivalent to the three points being non-collinear, which is what makes
    the difference equations full rank.  Default eps scales with the ratio.
    """
    v = np.asarray(v, dtype=np.complex128)
    dp = v[0] - v[p]
    dq = v[0] - v[q]
    scale = max(abs(dp), abs(dq))
    if abs(dp) <= _COINCIDENT_TOL * (1.0 + scale) or abs(dq) <= _COINCIDENT_TOL * (
        1.0 + scale
    ):
        raise DegenerateSystemError("coincident offsets: ratio undefined")
    ratio = dp / dq
    if eps is None:
        eps = 1e-10 * (1.0 + abs(ratio))
    return bool(abs(ratio.imag) > eps)


def _difference_rows(v: np.ndarray, radii: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rows of the real linear system in (Re z, Im z) from subtracting
    equation pairs (1, j)."""
    d = np.conj(v[0]) - np.conj(v[1:])
    # Re{z * (c + i*d)} = Re(z)*c - Im(z)*d per row
    mat = np.column_stack([d.real, -d.imag])
    rhs = 0.5 * (
        radii[0] ** 2 - radii[1:] ** 2 + np.abs(v[1:]) ** 2 - np.abs(v[0]) ** 2
    )
    return mat, rhs


def _refine_candidate(z: complex, centers: np.ndarray, radii: np.ndarray) -> complex:
    """Iterative refinement of a candidate by Gauss-Newton on the per-circle
    distance errors; keeps the best point seen.

    For consistent systems this polishes the linear-reduction answer to the
    exact intersection; for inconsistent ones it brings the reported
    residual down to the local infeasibility level instead of whatever the
    radical-center point happens to give.
    """
    best = z
    best_res = float(np.max(np.abs(np.abs(z - centers) - radii)))
    for _ in range(12):
        d = z - centers
        dist = np.abs(d)
        if np.min(dist) < 1e-300:  # sitting on a center: direction undefined
            break
        f = dist - radii
        jac = np.column_stack([d.real / dist, d.imag / dist])
        step, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        z = z + complex(step[0], step[1])
        res = float(np.max(np.abs(np.abs(z - centers) - radii)))
        if res < best_res:
            best, best_res = z, res
        if np.hypot(step[0], step[1]) < 1e-15 * (1.0 + abs(z)):
            break
    return best


def solve_generic(sys: CircleSystem, tol: float | None = None) -> CircleSolution:
    """Solve with s >= 3 complex offsets whose difference ratios are not all
    real.  Returns the unique candidate if its residual passes ``tol``,
    otherwise kind "none" (with the residual)."""
    v = sys.offsets
    radii = sys.radii
    if v.size < 3:
        raise InvalidParametersError("generic solve needs at least 3 equations")
    if tol is None:
        tol = default_tolerance(radii)

    nonreal = False
    for p in range(1, v.size):
        for q in range(p + 1, v.size):
            try:
                if ratio_is_nonreal(v, p, q):
                    nonreal = True
                    break
            except DegenerateSystemError:
                continue
        if nonreal:
            break
    if not nonreal:
        raise DegenerateSystemError(
            "all offset-difference ratios are real (collinear centers)"
        )

    mat, rhs = _difference_rows(v, radii)
    sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    z = _refine_candidate(complex(sol[0], sol[1]), sys.centers, radii)
    residual = sys.residual_at(z)
    if residual <= tol:
        return CircleSolution("unique", z, None, residual)
    return CircleSolution("none", z, None, residual)


def solve_real_centers(sys: CircleSystem, tol: float | None = None) -> CircleSolution:
    """Solve with all offsets real: solutions come in conjugate pairs.

    The real part comes from the (least-squares) linear difference equations;
    the imaginary part from the first circle.  Returns kind "none" when the
    required squared imaginary part is negative beyond ``tol``.
    """
    v = sys.offsets
    radii = sys.radii
    if np.max(np.abs(v.imag)) > _COINCIDENT_TOL * (1.0 + np.max(np.abs(v))):
        raise InvalidParametersError("offsets must be real for this solver")
    vr = v.real
    if tol is None:
        tol = default_tolerance(radii)

    diffs = vr[0] - vr[1:]
    if np.max(np.abs(diffs)) <= _COINCIDENT_TOL * (1.0 + np.max(np.abs(vr))):
        raise UnderdeterminedSystemError("all offsets equal: real part unconstrained")
    rhs = 0.5 * (radii[0] ** 2 - radii[1:] ** 2 + vr[1:] ** 2 - vr[0] ** 2)
    a = float(np.dot(diffs, rhs) / np.dot(diffs, diffs))

    b_sq = radii[0] ** 2 - (a + vr[0]) ** 2
    if b_sq < -tol:
        z = complex(a, 0.0)
        return CircleSolution("none", z, None, sys.residual_at(z))
    b = float(np.sqrt(max(b_sq, 0.0)))
    z = complex(a, b)
    return CircleSolution("pair", z, complex(a, -b), sys.residual_at(z))

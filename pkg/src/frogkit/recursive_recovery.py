"""Entrywise recovery of a bandlimited spectrum from its trace.

The bandlimit gives each trace row a triangular ("pyramid") structure: row k
mixes only band entries 0..k, so scanning rows in order determines the band
entry by entry.  Each step reduces to a circle-intersection system whose
offsets are built from already-recovered entries:

    | x0*z + v_m | = N * sqrt(trace[k, m]) / |1 + w^(k*m)|,   w = exp(2*pi*i/r)

with z the unknown entry and v_m the pyramid offset for column m.  Columns
with w^(k*m) = -1 carry no information about z and are skipped; columns m and
r-m duplicate each other and only one of the pair is used.

Gauge fixing absorbs the symmetry group: entries 0 and 1 of the band are made
real nonnegative (rotation and continuous translation), and the reflection
branch is fixed by requiring a nonnegative imaginary part at entry 2.

Row 3's offsets are collinear through the origin, so it always yields a
conjugate pair of candidates; the spurious one becomes inconsistent at row 4.
Any later row with only two usable columns likewise yields a pair, resolved
by consistency at the following rows.  Rows past the band contain no unknown
and act as pure consistency checks.  All of this is handled uniformly by
carrying candidate branches forward and pruning those whose residual exceeds
the consistency tolerance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .circle_solver import (
    CircleSolution,
    CircleSystem,
    ratio_is_nonreal,
    solve_generic,
    solve_real_centers,
)
from .errors import (
    AmbiguousBranchError,
    DegenerateSignalError,
    DegenerateSystemError,
    EquationSelectionError,
    InconsistentTraceError,
    InvalidParametersError,
    UnderdeterminedSystemError,
)
from .signal_model import BandlimitSpec, FrogTrace, Spectrum

_BRANCH_RATIO = 1e2  # required residual separation between fork candidates
_FAIL_FACTOR = 1e3  # best branch above consistency_tol * this => inconsistent


@dataclass(frozen=True)
class RecoverySettings:
    """Knobs for the recursion.

    ``consistency_tol`` is a relative tolerance: every step residual is
    normalized by (1 + largest radius in that step's system).  Branch
    pruning is comparative (a candidate survives while within a factor 100
    of the best one, or under the tolerance outright), because residuals of
    the true branch degrade continuously as a signal approaches the
    non-generic set.  ``ratio_eps`` of None means the adaptive default of
    the ratio test.
    """

    r: int
    use_power_spectrum: bool = False
    consistency_tol: float = 1e-7
    ratio_eps: float | None = None
    max_equations_per_step: int = 3

    def __post_init__(self):
        if self.r < 3 or (self.r == 3 and not self.use_power_spectrum):
            raise InvalidParametersError(
                "need r >= 4, or r = 3 together with the power spectrum"
            )
        if self.max_equations_per_step < 2:
            raise InvalidParametersError("max_equations_per_step must be >= 2")
        if self.consistency_tol <= 0:
            raise InvalidParametersError("consistency_tol must be positive")


@dataclass(frozen=True)
class RecoveryReport:
    """Outcome of a recovery run.  Residuals are relative (see settings).

    ``x3_branch`` names the surviving candidate of the entry-3 fork ("first"
    has the nonnegative imaginary part in the rotated frame); None when the
    band is too short for a fork or the pair collapsed.
    ``x3_branch_residuals`` holds both candidates' residuals at the row that
    separated them.  ``equations_used`` maps band-relative row index to the
    trace columns read for it.
    """

    spectrum: Spectrum
    step_residuals: np.ndarray
    x3_branch: str | None
    x3_branch_residuals: tuple[float, float] | None
    equations_used: dict[int, list[int]]
    success: bool
    measurement_reads: int
    tail_residual: float


def is_degenerate_column(k: int, m: int, r: int) -> bool:
    """True iff w^(k*m) = -1, i.e. column m says nothing about row k's entry."""
    return (2 * k * m - r) % (2 * r) == 0


def usable_columns(k: int, r: int) -> list[int]:
    """Columns informative for row k: nondegenerate, one per {m, r-m} pair."""
    keep: list[int] = []
    for m in range(r):
        if is_degenerate_column(k, m, r):
            continue
        if m != 0 and (r - m) % r in keep:
            continue
        keep.append(m)
    return keep


def distinct_columns(r: int) -> list[int]:
    """One column per duplicate pair {m, r-m}, no degeneracy filter."""
    keep: list[int] = []
    for m in range(r):
        if m != 0 and (r - m) % r in keep:
            continue
        keep.append(m)
    return keep


def pyramid_centers(prefix: np.ndarray, k: int, m: int, r: int) -> complex:
    """Offset v_m of row k's circle system, from band entries 0..k-1.

    ``v_m = sum_{j=1..k-1} prefix[j] * prefix[k-j] * w^(j*m) / (1 + w^(k*m))``,
    which equals the row-k frequency-domain coefficient (times N, normalized)
    with the unknown entry zeroed out.
    """
    prefix = np.asarray(prefix, dtype=np.complex128)
    if prefix.size < k:
        raise InvalidParametersError(f"need entries 0..{k - 1} to form row {k} offsets")
    if is_degenerate_column(k, m, r):
        raise InvalidParametersError(
            f"column m={m} is degenerate for row {k} (w^(k*m) = -1)"
        )
    j = np.arange(1, k)
    if j.size == 0:
        return 0j
    w_jm = np.exp(2j * np.pi * ((j * m) % r) / r)
    s = np.sum(prefix[j] * prefix[k - j] * w_jm)
    denom = 1.0 + np.exp(2j * np.pi * ((k * m) % r) / r)
    return complex(s / denom)


def select_equations(k, r, centers_fn, ratio_eps: float | None = None):
    """Pick three trace columns for row k whose offsets are not collinear.

    Prefers (0, 1, 2); otherwise scans combinations of usable columns in
    increasing order.  Columns summing to r are never paired (they duplicate
    each other).
    """
    if r < 4:
        raise InvalidParametersError("a trace-only triple needs r >= 4")
    cands = usable_columns(k, r)
    for combo in itertools.combinations(cands, 3):
        v = np.array([centers_fn(m) for m in combo], dtype=np.complex128)
        try:
            if ratio_is_nonreal(v, 1, 2, eps=ratio_eps):
                return tuple(combo)
        except DegenerateSystemError:
            continue
    raise EquationSelectionError(f"no admissible column triple for row {k} with r={r}")


class _TraceReader:
    """Band-relative access to trace magnitudes with a read log.

    A band starting at i corresponds, after the demodulation that moves the
    band to index 0, to a cyclic row shift of the trace by 2*i.
    """

    def __init__(self, trace: FrogTrace, start: int):
        self._data = trace.data
        self._n = trace.n
        self._shift = (2 * start) % trace.n
        self.reads: set[tuple[int, int]] = set()

    def magnitude(self, k: int, m: int) -> float:
        self.reads.add((k, m))
        return float(np.sqrt(self._data[(k + self._shift) % self._n, m]))


@dataclass(frozen=True)
class _Branch:
    coeffs: tuple[complex, ...]
    residuals: tuple[float, ...]
    equations: tuple[tuple[int, tuple[int, ...]], ...]
    x3_choice: int | None = None

    def extended(self, z, res, row, ms, x3_choice=None):
        return _Branch(
            self.coeffs + (complex(z),),
            self.residuals + (float(res),),
            self.equations + ((row, tuple(ms)),),
            self.x3_choice if x3_choice is None else x3_choice,
        )

    def checked(self, res, row, ms):
        return replace(
            self,
            residuals=self.residuals + (float(res),),
            equations=self.equations + ((row, tuple(ms)),),
        )


def _pair_candidates(sol: CircleSolution) -> tuple[complex, ...]:
    """Candidates of a conjugate-pair solve; collapsed pairs give one."""
    if sol.kind == "pair":
        if sol.z == sol.z_conjugate:
            return (sol.z,)
        return (sol.z, sol.z_conjugate)
    return (sol.z,)


def _solve_collinear(offsets, radii, rot, tol_abs):
    """Offsets on the line through the origin with direction ``rot``: divide
    the direction out and solve the real-center system."""
    rotated = offsets / rot
    if float(np.max(np.abs(rotated.imag))) > 1e-9 * (
        1.0 + float(np.max(np.abs(rotated)))
    ):
        raise DegenerateSystemError("offsets are not collinear through the origin")
    sol = solve_real_centers(CircleSystem(-rotated.real.astype(complex), radii), tol=tol_abs)

    def back(z):
        return None if z is None else z * rot

    return CircleSolution(sol.kind, back(sol.z), back(sol.z_conjugate), sol.residual)


def _solve_row(branch, k, n, reader, settings, ps_radius):
    """Candidate continuations of one branch at row k.

    Children above tolerance are produced too; the caller prunes them and
    does the fork accounting.
    """
    r = settings.r
    prefix = np.asarray(branch.coeffs, dtype=np.complex128)
    x0 = prefix[0].real

    def center(m):
        return pyramid_centers(prefix, k, m, r)

    def radius(m):
        norm = abs(1.0 + np.exp(2j * np.pi * ((k * m) % r) / r))
        return n * reader.magnitude(k, m) / norm

    cols = usable_columns(k, r)

    if k in (2, 3):
        ms = cols[: settings.max_equations_per_step]
        offsets = np.array([center(m) for m in ms])
        radii = np.array([radius(m) for m in ms])
        scale = 1.0 + float(np.max(radii))
        if k == 2:
            rot = 1.0 + 0j  # offsets already real
        else:
            x2 = prefix[2]
            if abs(x2) <= 1e-13 * (1.0 + float(np.max(np.abs(prefix)))):
                raise DegenerateSignalError(
                    "band entry 2 vanishes; the row-3 rotation is undefined"
                )
            rot = x2 / abs(x2)
        sol = _solve_collinear(offsets, radii, rot, settings.consistency_tol * scale)
        rel = sol.residual / scale
        if k == 2:
            # reflection gauge: solve_real_centers puts Im >= 0 first
            return [branch.extended(sol.z / x0, rel, k, ms)]
        cands = _pair_candidates(sol)
        if len(cands) == 1:
            return [branch.extended(cands[0] / x0, rel, k, ms, x3_choice=0)]
        return [
            branch.extended(u / x0, rel, k, ms, x3_choice=idx)
            for idx, u in enumerate(cands)
        ]

    # rows 4 and beyond
    if len(cols) >= 3:
        ms = select_equations(k, r, center, settings.ratio_eps)
    else:
        ms = tuple(cols)
    offsets = [center(m) for m in ms]
    radii = [radius(m) for m in ms]
    if ps_radius is not None:
        offsets.append(0j)
        radii.append(ps_radius(k))
    offsets = np.array(offsets)
    radii = np.array(radii)
    scale = 1.0 + float(np.max(radii))

    if offsets.size >= 3:
        sol = solve_generic(
            CircleSystem(-offsets, radii), tol=settings.consistency_tol * scale
        )
        return [branch.extended(sol.z / x0, sol.residual / scale, k, ms)]

    # two distinct circles: rotate the center line onto the real axis and
    # solve the conjugate-pair system there
    delta = offsets[1] - offsets[0]
    if abs(delta) <= 1e-14 * scale:
        raise DegenerateSystemError(f"row {k}: coincident offsets")
    rot = delta / abs(delta)
    shifted = np.array([0.0, abs(delta)], dtype=complex)
    sol = solve_real_centers(
        CircleSystem(-shifted, radii), tol=settings.consistency_tol * scale
    )
    rel = sol.residual / scale
    return [
        branch.extended((w * rot - offsets[0]) / x0, rel, k, ms)
        for w in _pair_candidates(sol)
    ]


def _tail_residual(branch, k, n, r, reader, b):
    """Consistency mismatch of a fully-known row k >= b (relative)."""
    prefix = np.asarray(branch.coeffs, dtype=np.complex128)
    ms = distinct_columns(r)[:3]
    j = np.arange(max(0, k - b + 1), min(b - 1, k) + 1)
    worst = 0.0
    scale = 1.0
    for m in ms:
        w_jm = np.exp(2j * np.pi * ((j * m) % r) / r)
        pred = float(abs(np.sum(prefix[j] * prefix[k - j] * w_jm))) if j.size else 0.0
        meas = n * reader.magnitude(k, m)
        scale = max(scale, 1.0 + meas)
        worst = max(worst, abs(pred - meas))
    return worst / scale, ms


def recover(
    trace: FrogTrace,
    band: BandlimitSpec,
    settings: RecoverySettings,
    power_spectrum: np.ndarray | None = None,
) -> RecoveryReport:
    """Recover the band entries of a spectrum from its trace.

    The power spectrum (squared spectrum magnitudes at every physical index)
    is required for r = 3 and optional otherwise; when present it contributes
    one extra circle centered at the origin per row from 4 on.
    """
    n, r, b = trace.n, trace.r, band.b
    if settings.r != r:
        raise InvalidParametersError(f"settings r={settings.r} but trace has r={r}")
    if b > n // 2:
        raise InvalidParametersError(f"recovery requires b <= N/2 (b={b}, N={n})")
    if settings.use_power_spectrum:
        if power_spectrum is None:
            raise InvalidParametersError("settings request a power spectrum: none given")
        power_spectrum = np.asarray(power_spectrum, dtype=np.float64)
        if power_spectrum.shape != (n,):
            raise InvalidParametersError("power spectrum must have length N")
    elif r == 3:
        raise InvalidParametersError("r = 3 recovery needs the power spectrum")
    if r == 3:
        # the two shift columns are reflections of each other and must agree
        gap = float(np.max(np.abs(trace.data[:, 1] - trace.data[:, 2])))
        if gap > 1e-10 * max(float(np.max(trace.data)), 1e-300):
            raise InvalidParametersError(
                "columns 1 and 2 of an r=3 trace must be equal (reflected shifts)"
            )

    reader = _TraceReader(trace, band.start)
    peak = float(np.max(trace.data))
    if peak <= 0.0:
        raise DegenerateSignalError("trace is identically zero")
    amp_scale = float(np.sqrt(n * np.sqrt(peak)))
    # trace entries are squared magnitudes, so a coefficient that is zero up
    # to float noise surfaces at the sqrt(eps) scale, not at eps
    tiny = 1e-7 * amp_scale

    x0 = float(np.sqrt(n * reader.magnitude(0, 0)))
    if x0 <= tiny:
        raise DegenerateSignalError("leading band entry vanishes")

    if settings.use_power_spectrum:
        start = band.start

        def ps_radius(k):
            return x0 * float(np.sqrt(power_spectrum[(start + k) % n]))

    else:
        ps_radius = None

    branches = [_Branch((complex(x0),), (0.0,), ((0, (0,)),))]
    if b >= 2:
        x1 = n * reader.magnitude(1, 0) / (2.0 * x0)
        if x1 <= tiny:
            raise DegenerateSignalError("band entry 1 vanishes")
        branches = [branches[0].extended(x1, 0.0, 1, (0,))]

    tol = settings.consistency_tol
    fork_events: list[tuple[int, dict[int, float]]] = []

    def prune(children, row, dead_choices=None):
        """Keep candidates within the tolerance or within a factor 100 of
        the best one; log the entry-3 fork-resolution event."""
        by_choice: dict[int, float] = dict(dead_choices or {})
        for child in children:
            if child.x3_choice is not None:
                res = child.residuals[-1]
                by_choice[child.x3_choice] = min(
                    by_choice.get(child.x3_choice, np.inf), res
                )
        best = min(c.residuals[-1] for c in children)
        if best > _FAIL_FACTOR * tol:
            raise InconsistentTraceError(f"no branch fits the trace at row {row}", step=row)
        keep = max(tol, _BRANCH_RATIO * best)
        live = [c for c in children if c.residuals[-1] <= keep]
        choices_out = {c.x3_choice for c in live} - {None}
        if len(by_choice) == 2 and len(choices_out) == 1:
            fork_events.append((row, by_choice))
        return live

    for k in range(2, b):
        children: list[_Branch] = []
        dead: dict[int, float] = {}
        errors: list[Exception] = []
        for br in branches:
            try:
                children.extend(_solve_row(br, k, n, reader, settings, ps_radius))
            except (
                DegenerateSystemError,
                EquationSelectionError,
                UnderdeterminedSystemError,
            ) as exc:
                if br.x3_choice is not None:
                    dead[br.x3_choice] = np.inf
                errors.append(exc)
        if not children:
            if errors and all(isinstance(e, EquationSelectionError) for e in errors):
                raise errors[0]
            raise InconsistentTraceError(
                f"every branch degenerated at row {k}", step=k
            ) from (errors[0] if errors else None)
        branches = prune(children, k, dead)

    for k in range(b, 2 * b - 1):
        checked = []
        for br in branches:
            res, ms = _tail_residual(br, k, n, r, reader, b)
            checked.append(br.checked(res, k, ms))
        branches = prune(checked, k)
    tail_worst = 0.0
    if branches and len(branches[0].residuals) > b:
        tail_worst = max(max(br.residuals[b:]) for br in branches)

    # fork accounting: residual separation between the entry-3 candidates
    x3_branch = None
    x3_pair = None
    survivor_choices = {br.x3_choice for br in branches} - {None}
    if b >= 4:
        if len(survivor_choices) > 1:
            raise AmbiguousBranchError(
                "both entry-3 candidates remain consistent with the trace"
            )
        if fork_events:
            row, by_choice = fork_events[-1]
            winner = next(iter(survivor_choices), None)
            if winner is None:
                winner = min(by_choice, key=by_choice.get)
            loser = 1 - winner
            if by_choice[loser] < _BRANCH_RATIO * max(by_choice[winner], 1e-300):
                raise AmbiguousBranchError(
                    f"entry-3 candidates separated by less than {_BRANCH_RATIO:g}x "
                    f"at row {row} ({by_choice[loser]:.3e} vs {by_choice[winner]:.3e})"
                )
            x3_branch = "first" if winner == 0 else "second"
            x3_pair = (by_choice.get(0, np.inf), by_choice.get(1, np.inf))
        elif len(survivor_choices) == 1:
            x3_branch = "first" if next(iter(survivor_choices)) == 0 else "second"

    if len(branches) > 1:
        raise AmbiguousBranchError(
            f"{len(branches)} branches remain consistent with the trace"
        )

    winner_branch = branches[0]
    values = np.zeros(n, dtype=np.complex128)
    values[band.indices(n)] = np.asarray(winner_branch.coeffs, dtype=np.complex128)
    step_residuals = np.asarray(winner_branch.residuals[:b], dtype=float)

    return RecoveryReport(
        spectrum=Spectrum(values),
        step_residuals=step_residuals,
        x3_branch=x3_branch,
        x3_branch_residuals=x3_pair,
        equations_used={row: list(ms) for row, ms in winner_branch.equations},
        success=bool(step_residuals.size == 0 or np.max(step_residuals) <= tol),
        measurement_reads=len(reader.reads),
        tail_residual=float(tail_worst),
    )

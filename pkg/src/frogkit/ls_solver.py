"""Nonconvex least-squares route: objective, analytic gradient, descent.

The loss is half the sum of squared differences between the measured trace
and the trace of the iterate; as a polynomial of degree eight in the iterate
it is smooth but nonconvex, so a local method may stop at a local minimum.
The minimizer here is gradient descent with Armijo backtracking, which keeps
the objective sequence monotone.

Gradients are with respect to the real and imaginary parts, packaged as one
complex vector g = df/dRe + i*df/dIm (twice the conjugate-coordinate
derivative), so a step is plain ``z - t*g``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ambiguities import dist_mod_group
from .errors import InvalidParametersError
from .signal_model import FrogTrace, Signal, dft, frog_trace, shift_product_table

SUCCESS_DISTANCE = 1e-6


@dataclass(frozen=True)
class LsOptions:
    max_iters: int = 2000
    grad_tol: float = 1e-9
    step0: float = 1.0
    shrink: float = 0.5
    decrease: float = 1e-4  # Armijo sufficient-decrease constant

    def __post_init__(self):
        if self.max_iters < 1:
            raise InvalidParametersError("max_iters must be >= 1")
        if not 0.0 < self.shrink < 1.0:
            raise InvalidParametersError("shrink factor must lie in (0, 1)")
        if self.step0 <= 0 or self.decrease <= 0:
            raise InvalidParametersError("step0 and decrease must be positive")


@dataclass(frozen=True)
class BasinGrid:
    """Empirical success rates of the descent per (sigma, L) cell."""

    sigma_values: np.ndarray
    l_values: np.ndarray
    trials: int
    success_rate: np.ndarray
    seed: int


class _Workspace:
    """Cached index tables for one (N, L); makes objective/gradient single
    fancy-indexed FFT passes."""

    def __init__(self, n: int, l: int):
        self.n = n
        self.l = l
        self.fwd = shift_product_table(n, l)  # (p + m*L) mod N
        r = n // l
        p = np.arange(n)[:, None]
        m = np.arange(r)[None, :]
        self.bwd = (p - m * l) % n

    def model(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        coeffs = np.fft.fft(z[:, None] * z[self.fwd], axis=0)
        return np.abs(coeffs) ** 2, coeffs

    def objective(self, z: np.ndarray, data: np.ndarray) -> float:
        model, _ = self.model(z)
        return 0.5 * float(np.sum((data - model) ** 2))

    def gradient(self, z: np.ndarray, data: np.ndarray) -> np.ndarray:
        model, coeffs = self.model(z)
        err = data - model
        back = self.n * np.fft.ifft(err * coeffs, axis=0)
        term = np.conj(z[self.fwd]) * back
        term2 = (np.conj(z)[:, None] * back)[self.bwd, np.arange(back.shape[1])[None, :]]
        return -2.0 * np.sum(term + term2, axis=1)


def _workspace_for(trace: FrogTrace) -> _Workspace:
    return _Workspace(trace.n, trace.l)


def _check_dims(z: Signal, trace: FrogTrace, l: int):
    if l != trace.l:
        raise InvalidParametersError(f"step L={l} does not match the trace (L={trace.l})")
    if z.n != trace.n:
        raise InvalidParametersError("signal length does not match the trace")


def ls_objective(z: Signal, trace: FrogTrace, l: int) -> float:
    """Half the squared Frobenius mismatch between the trace of z and the
    measured trace."""
    _check_dims(z, trace, l)
    return _workspace_for(trace).objective(z.values, trace.data)


def ls_gradient(z: Signal, trace: FrogTrace, l: int) -> Signal:
    """Analytic gradient of the objective, as df/dRe + i*df/dIm."""
    _check_dims(z, trace, l)
    return Signal(_workspace_for(trace).gradient(z.values, trace.data))


def ls_minimize(
    z0: Signal,
    trace: FrogTrace,
    l: int,
    opts: LsOptions = LsOptions(),
    on_iterate=None,
) -> tuple[Signal, float, int]:
    """Gradient descent with backtracking from z0.

    Terminates on the gradient tolerance (relative to 1 + objective), step
    underflow, or the iteration cap; non-convergence is an outcome, not an
    error.  ``on_iterate(iteration, objective)`` is called after each
    accepted step.
    """
    _check_dims(z0, trace, l)
    ws = _workspace_for(trace)
    data = trace.data
    z = z0.values.copy()
    f = ws.objective(z, data)
    step = opts.step0
    iters = 0
    for _ in range(opts.max_iters):
        g = ws.gradient(z, data)
        gnorm2 = float(np.vdot(g, g).real)
        if np.sqrt(gnorm2) <= opts.grad_tol * (1.0 + abs(f)):
            break
        # backtrack from a step that grows again after successes
        t = step
        accepted = False
        while t > 1e-18:
            z_new = z - t * g
            f_new = ws.objective(z_new, data)
            if f_new <= f - opts.decrease * t * gnorm2:
                accepted = True
                break
            t *= opts.shrink
        if not accepted:
            break
        z, f = z_new, f_new
        step = t / opts.shrink  # allow the next step to be larger
        iters += 1
        if on_iterate is not None:
            on_iterate(iters, f)
    return Signal(z), float(f), iters


def _run_trial(n, l, sigma, seed_key, opts):
    rng = np.random.default_rng(seed_key)
    x = rng.standard_normal(n)
    signs = rng.integers(0, 2, size=n) * 2 - 1
    z0 = x + sigma * signs.astype(float)
    trace = frog_trace(Signal(x), l)
    z_fin, _, _ = ls_minimize(Signal(z0.astype(complex)), trace, l, opts)
    dist, _ = dist_mod_group(dft(z_fin), dft(Signal(x)))
    return dist <= SUCCESS_DISTANCE


def basin_experiment(
    n: int,
    l_values,
    sigma_values,
    trials: int,
    seed: int,
    opts: LsOptions = LsOptions(),
    threads: int = 1,
) -> BasinGrid:
    """Empirical success-rate grid of the descent under sign perturbations.

    Each trial draws a real standard-normal signal, perturbs it by sigma
    times a random sign vector, descends, and scores success by the group
    distance threshold of 1e-6.  Every trial derives its own RNG stream from
    (seed, sigma index, L index, trial index), so the grid is reproducible
    and schedule-independent.
    """
    l_values = [int(l) for l in l_values]
    sigma_values = [float(s) for s in sigma_values]
    for l in l_values:
        if l < 1 or n % l != 0:
            raise InvalidParametersError(f"step L={l} must divide N={n}")

    def run_cell(args):
        i_sigma, i_l = args
        sigma, l = sigma_values[i_sigma], l_values[i_l]
        wins = 0
        for t in range(trials):
            if _run_trial(n, l, sigma, (seed, i_sigma, i_l, t), opts):
                wins += 1
        return i_sigma, i_l, wins / trials

    cells = [(i, j) for i in range(len(sigma_values)) for j in range(len(l_values))]
    rate = np.zeros((len(sigma_values), len(l_values)))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(c) for c in cells]
    for i, j, val in results:
        rate[i, j] = val

    return BasinGrid(
        sigma_values=np.array(sigma_values),
        l_values=np.array(l_values),
        trials=trials,
        success_rate=rate,
        seed=seed,
    )

"""Discrete SHG-FROG toolkit: forward model, symmetry group, entrywise
recursive recovery, and nonconvex least squares."""

from .ambiguities import AmbiguityElement, apply, dist_mod_group, trace_invariant
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
    FrogkitError,
    InconsistentTraceError,
    InvalidParametersError,
    InvalidUseError,
    UnderdeterminedSystemError,
)
from .ls_solver import (
    BasinGrid,
    LsOptions,
    basin_experiment,
    ls_gradient,
    ls_minimize,
    ls_objective,
)
from .recursive_recovery import (
    RecoveryReport,
    RecoverySettings,
    pyramid_centers,
    recover,
    select_equations,
)
from .signal_model import (
    BandlimitSpec,
    FrogTrace,
    Signal,
    Spectrum,
    dft,
    frog_freq_coeffs,
    frog_trace,
    idft,
    product_signal,
)

__all__ = [
    "AmbiguityElement",
    "AmbiguousBranchError",
    "BandlimitSpec",
    "BasinGrid",
    "CircleSolution",
    "CircleSystem",
    "DegenerateSignalError",
    "DegenerateSystemError",
    "EquationSelectionError",
    "FrogkitError",
    "FrogTrace",
    "InconsistentTraceError",
    "InvalidParametersError",
    "InvalidUseError",
    "LsOptions",
    "RecoveryReport",
    "RecoverySettings",
    "Signal",
    "Spectrum",
    "UnderdeterminedSystemError",
    "apply",
    "basin_experiment",
    "dft",
    "dist_mod_group",
    "frog_freq_coeffs",
    "frog_trace",
    "idft",
    "ls_gradient",
    "ls_minimize",
    "ls_objective",
    "product_signal",
    "pyramid_centers",
    "ratio_is_nonreal",
    "recover",
    "select_equations",
    "solve_generic",
    "solve_real_centers",
    "trace_invariant",
]

__version__ = "0.1.0"

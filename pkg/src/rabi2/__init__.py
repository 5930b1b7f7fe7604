"""Exact G-function verification and truncated spectra for the two-photon Rabi model."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    Rabi2Error,
    RingMismatchError,
    SingularRecurrenceError,
    SolverError,
    SpectralCollapseError,
    UsageError,
)
from .exact import EPoly, GaussianRational, I  # noqa: E402
from .gfunction import (  # noqa: E402
    AllZeroUpTo,
    FirstNonzero,
    GSpec,
    build_g,
    check_derivative_conditions,
    g_root_scan,
    sweep_family,
    uniqueness_argument_check,
)
from .series import (  # noqa: E402
    SYMBOLIC,
    InitialConditions,
    ModelParams,
    PowerSeries,
    differentiate,
    linear_combine,
    ode4_residual,
    solve_system,
    substitute_iz,
    system_residual,
)
from .spectrum import (  # noqa: E402
    bargmann_norm_diag,
    build_hamiltonian,
    converged_spectrum,
    diagonalize,
    spectrum_vs_gscan,
)

__all__ = [
    "AllZeroUpTo",
    "bargmann_norm_diag",
    "build_g",
    "build_hamiltonian",
    "check_derivative_conditions",
    "converged_spectrum",
    "diagonalize",
    "differentiate",
    "EPoly",
    "FirstNonzero",
    "g_root_scan",
    "GaussianRational",
    "GSpec",
    "I",
    "InitialConditions",
    "linear_combine",
    "ModelParams",
    "ode4_residual",
    "PowerSeries",
    "Rabi2Error",
    "RingMismatchError",
    "SingularRecurrenceError",
    "solve_system",
    "SolverError",
    "SpectralCollapseError",
    "spectrum_vs_gscan",
    "substitute_iz",
    "sweep_family",
    "SYMBOLIC",
    "system_residual",
    "uniqueness_argument_check",
    "UsageError",
]

"""Propagators for the oscillator with an inverse-square coupling.

Closed-form kernels for H = p^2/2m + lam/(2m x^2) + m w^2 x^2/2 and the
group-theoretic factorizations that generate them, verified against a 2x2
matrix realization of the underlying algebra, a spectral quadrature oracle,
and a Crank-Nicolson grid evolver.
"""

from .evolve import (
    TestFunction,
    delta_limit_check,
    dilation_apply,
    l2_distance,
    propagate,
    schrodinger_residual,
)
from .kernels import (
    CAUSTIC_TOL,
    KERNEL_NAMES,
    ROUTE_IDS,
    CausticSingularity,
    KernelPoint,
    KernelValue,
    effective_time,
    free_kernel,
    kernel_values,
    kernel_via_route,
    radial_h0_kernel,
    radial_sho_kernel,
    sho_kernel,
)
from .numerics import (
    NonConvergenceError,
    QuadratureResult,
    QuadratureSpec,
    bessel_i_complex,
    bessel_j,
    gamma_real,
    integrate_oscillatory,
)
from .oracle import (
    BoundaryContaminationWarning,
    GridSpec,
    GridWavefunction,
    default_hankel_spec,
    eigenfunction_residual,
    grid_evolve,
    hankel_kernel_oracle,
    orthogonality_check,
)
from .sl2rep import (
    GENERATOR_IDS,
    IDENTITY_IDS,
    FactorCoeffs,
    PhysParams,
    adjoint_series_check,
    exp_traceless,
    factor_coeffs,
    generator_matrix,
    identity_residual,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BoundaryContaminationWarning",
    "CAUSTIC_TOL",
    "CausticSingularity",
    "FactorCoeffs",
    "GENERATOR_IDS",
    "GridSpec",
    "GridWavefunction",
    "IDENTITY_IDS",
    "KERNEL_NAMES",
    "KernelPoint",
    "KernelValue",
    "NonConvergenceError",
    "PhysParams",
    "QuadratureResult",
    "QuadratureSpec",
    "ROUTE_IDS",
    "TestFunction",
    "adjoint_series_check",
    "bessel_i_complex",
    "bessel_j",
    "default_hankel_spec",
    "delta_limit_check",
    "dilation_apply",
    "effective_time",
    "eigenfunction_residual",
    "exp_traceless",
    "factor_coeffs",
    "free_kernel",
    "gamma_real",
    "generator_matrix",
    "grid_evolve",
    "hankel_kernel_oracle",
    "identity_residual",
    "integrate_oscillatory",
    "kernel_values",
    "kernel_via_route",
    "l2_distance",
    "orthogonality_check",
    "propagate",
    "radial_h0_kernel",
    "radial_sho_kernel",
    "schrodinger_residual",
    "sho_kernel",
]

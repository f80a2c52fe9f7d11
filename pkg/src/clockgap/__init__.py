"""Spectral-gap certification for clock-model Hamiltonians.

Build the operators with :mod:`clockgap.operators`, compute low spectra with
:mod:`clockgap.eigensolver`, evaluate closed-form bounds with
:mod:`clockgap.bounds` and sweep/certify with :mod:`clockgap.certifier`.
"""
from .bounds import (
    AnalyticEigenpair,
    BoundCurve,
    block_lower_bound,
    bound_curve,
    crossing_point,
    gap_floor,
    gap_lower_g,
    lambda2_lower,
    lemma_spectrum,
    mu0_exact,
    neumann_spectrum,
    variational_upper,
)
from .certifier import (
    GapCertificate,
    SweepRow,
    certify,
    family_two_lowest,
    refine_minimum,
    sweep,
)
from .eigensolver import (
    SolverConfig,
    SpectrumResult,
    smallest_eigenvalues,
    sturm_count,
    two_lowest,
)
from .errors import ClockGapError, ConvergenceError, DimensionError, ParameterError
from .operators import (
    ClockFamilySpec,
    TridiagonalOperator,
    build_h0,
    build_hj,
    build_neumann_laplacian,
    difference_energy,
    eigen_residuals,
    quadratic_form,
)

__version__ = "0.1.0"

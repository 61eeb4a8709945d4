"""Simulation of the beta-Jacobi ensemble and its soft- and hard-edge limit operators."""
from .exceptions import (
    BetaJacobiError,
    ContractError,
    DegenerateScalingError,
    NumericalFailure,
    ParameterError,
    SingularMatrixError,
)
from .jacobi import (
    JacobiParams,
    build_Hn,
    build_M,
    build_W,
    build_Z,
    drift_variance_diagnostic,
    hard_edge_sample,
    sample_angles,
    sample_eigenvalues,
    scaling_constants,
    soft_edge_sample,
)
from .limitops import GridSpec, sae_eigenvalues, sbo_eigenvalues, sbo_inverse_kernel
from .randkit import RngStream, sample_brownian

__version__ = "0.1.0"

"""Solver suite for radial ground states of a nuclear NLS model.

Computes, classifies and certifies decaying radial profiles of the
arcsin-transformed field equation by shooting, checks the linearized
non-degeneracy machinery (variational solutions, Wronskian identities,
spherical-sector spectra), and continues the nonrelativistic profile into the
sigma-omega Dirac system by damped Newton iteration in the inverse nucleon
mass.
"""

from .scalar_model import Params, ScalarFns
from .sigma_omega import (
    BranchPoint,
    ContinuationError,
    ContinuationParams,
    NewtonError,
    RadialGrid,
    SigmaOmegaState,
    build_limit_state,
    continue_branch,
    newton_solve,
    physical_parameters,
    resolvent_bound_check,
    unscale_state,
)

__version__ = "0.1.0"

__all__ = [
    "Params",
    "ScalarFns",
    "BranchPoint",
    "ContinuationError",
    "ContinuationParams",
    "NewtonError",
    "RadialGrid",
    "SigmaOmegaState",
    "build_limit_state",
    "continue_branch",
    "newton_solve",
    "physical_parameters",
    "resolvent_bound_check",
    "unscale_state",
    "__version__",
]

"""Python bindings for the optlat energy-transport library."""

from ._core import (
    DegenerateFit,
    Error,
    ModelParams,
    MomentPair,
    Multipliers,
    NoConvergence,
    SingularJacobian,
    StepFailure,
    ValidationError,
    diffusion_matrix,
    fit_decay,
    invert_moments,
    jacobian_det,
    moments,
    selfconsistent_density,
    simulate,
)

__all__ = [
    "DegenerateFit",
    "Error",
    "ModelParams",
    "MomentPair",
    "Multipliers",
    "NoConvergence",
    "SingularJacobian",
    "StepFailure",
    "ValidationError",
    "diffusion_matrix",
    "fit_decay",
    "invert_moments",
    "jacobian_det",
    "moments",
    "selfconsistent_density",
    "simulate",
]

"""Mean-field steering of a population toward a two-atom target by a few controlled agents."""

from ._core import (
    __version__,
    Config,
    ConfigError,
    GaussianProfile,
    InstabilityError,
    KernelSet,
    NumericalError,
    Objective,
    OptimizerConfig,
    assign_particles_two_atoms,
    brute_force_transport,
    jacobian_K,
    jacobian_f,
    jacobian_g,
    kernel_K,
    kernel_f,
    kernel_g,
    main,
    optimize,
    particle_terminal_cost,
    pmp_residual,
    project_control,
    validation_study,
)

__all__ = [
    "Config",
    "ConfigError",
    "GaussianProfile",
    "InstabilityError",
    "KernelSet",
    "NumericalError",
    "Objective",
    "OptimizerConfig",
    "assign_particles_two_atoms",
    "brute_force_transport",
    "jacobian_K",
    "jacobian_f",
    "jacobian_g",
    "kernel_K",
    "kernel_f",
    "kernel_g",
    "main",
    "optimize",
    "particle_terminal_cost",
    "pmp_residual",
    "project_control",
    "validation_study",
]

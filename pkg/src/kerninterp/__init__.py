"""Kernel interpolation on spheres and boxes, with native-space norms,
pseudodifferential error functionals, and convergence-rate studies."""

from .geometry import (
    Domain,
    EuclidPoint,
    GeometryError,
    PointSet,
    SpherePoint,
    fibonacci_sphere,
    fill_distance,
    generate_points,
    geodesic_distance,
    load_points_csv,
    save_points_csv,
)
from .harness import (
    BuiltTarget,
    ConvergenceReport,
    HarnessError,
    StudyConfig,
    TargetSpec,
    assert_rates,
    build_target,
    fit_slope,
    predicted_rate,
    run_study,
)
from .interpolation import (
    FactorizationError,
    Interpolant,
    InterpolationError,
    build_interpolant,
    evaluate,
    load_interpolant_csv,
    native_norm_sq,
    power_function,
    pythagoras_check,
    save_interpolant_csv,
)
from .kernels import (
    EuclidRadialKernel,
    KernelError,
    SphereSeriesKernel,
    ValidationReport,
    gram_matrix,
    kernel_eval,
    kernel_from_config,
    kernel_to_config,
    validate_kernel,
)
from .orthopoly import (
    OrthopolyError,
    RadialProfile,
    SphereBasisTable,
    gegenbauer_addition,
    harmonic_dimension,
    matern_profile,
    radial_profile_eval,
    wendland_profile,
)
from .spectral import (
    PseudoDiffSymbol,
    SphereQuadrature,
    SpectralError,
    ZonalExpansion,
    apply_pseudodiff,
    error_hphi_norm_sq,
    error_mode_norms_sq,
    error_pseudo_l2_norm_sq,
    explicit_symbol,
    hlambdaphi_norm_sq,
    hphi_norm_sq,
    identity_symbol,
    interpolant_hphi_norm_sq,
    interpolant_mode_norms_sq,
    l2_norm,
    norm_comparison_check,
    power_symbol,
    sup_error,
    zonal_eval,
)

__version__ = "0.1.0"

__all__ = [
    "BuiltTarget",
    "ConvergenceReport",
    "Domain",
    "EuclidPoint",
    "EuclidRadialKernel",
    "FactorizationError",
    "GeometryError",
    "HarnessError",
    "Interpolant",
    "InterpolationError",
    "KernelError",
    "OrthopolyError",
    "PointSet",
    "PseudoDiffSymbol",
    "RadialProfile",
    "SphereBasisTable",
    "SphereQuadrature",
    "SpherePoint",
    "SphereSeriesKernel",
    "SpectralError",
    "StudyConfig",
    "TargetSpec",
    "ValidationReport",
    "ZonalExpansion",
    "apply_pseudodiff",
    "assert_rates",
    "build_interpolant",
    "build_target",
    "error_hphi_norm_sq",
    "error_mode_norms_sq",
    "error_pseudo_l2_norm_sq",
    "evaluate",
    "explicit_symbol",
    "fibonacci_sphere",
    "fill_distance",
    "fit_slope",
    "gegenbauer_addition",
    "generate_points",
    "geodesic_distance",
    "gram_matrix",
    "harmonic_dimension",
    "hlambdaphi_norm_sq",
    "hphi_norm_sq",
    "identity_symbol",
    "interpolant_hphi_norm_sq",
    "interpolant_mode_norms_sq",
    "kernel_eval",
    "kernel_from_config",
    "kernel_to_config",
    "l2_norm",
    "load_interpolant_csv",
    "load_points_csv",
    "matern_profile",
    "native_norm_sq",
    "norm_comparison_check",
    "power_function",
    "power_symbol",
    "predicted_rate",
    "pythagoras_check",
    "radial_profile_eval",
    "run_study",
    "save_interpolant_csv",
    "save_points_csv",
    "sup_error",
    "validate_kernel",
    "wendland_profile",
    "zonal_eval",
]

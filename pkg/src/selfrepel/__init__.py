"""Self-repelling diffusion on the circle: simulation and analysis toolkit."""

from .flow import (
    FlowPath,
    FlowSingularError,
    LeafDescriptor,
    RotatedState,
    classify_leaf,
    first_integral_H,
    rk4_flow,
    xi_forward,
    xi_inverse,
)
from .model import (
    CircleModel,
    ProductMeasure,
    State,
    drift,
    eigen_eval,
    growth_bound_K,
    invariant_measure,
    kernel_eval,
    measure_log_density,
    measure_sample,
    motivating_model,
    wrap_angle,
)
from .period import (
    DisplacementResult,
    PeriodResult,
    QuadratureError,
    RationalityReport,
    period_lower_bound,
    period_ode_oracle,
    period_quadrature,
    phi,
    phi_roots,
    rationality_report,
    x_displacement_check,
)
from .rates import (
    HypoConstants,
    compute_constants,
    decay_rate,
    decay_rate_from_eps0,
    rate_vs_sigma_table,
    sigma_argmax,
)
from .rng import RngStream
from .sde import (
    SimConfig,
    SimulationError,
    Trajectory,
    em_step,
    simulate,
    simulate_ensemble,
    snapshot,
)
from .spanning import SpanReport, check_derivative_span, derivative_matrix

__version__ = "0.1.0"

__all__ = [
    "CircleModel", "ProductMeasure", "State", "RngStream",
    "motivating_model", "invariant_measure", "wrap_angle",
    "eigen_eval", "kernel_eval", "drift", "growth_bound_K",
    "measure_sample", "measure_log_density",
    "SimConfig", "Trajectory", "SimulationError",
    "em_step", "simulate", "simulate_ensemble", "snapshot",
    "FlowPath", "FlowSingularError", "RotatedState", "LeafDescriptor",
    "rk4_flow", "xi_forward", "xi_inverse", "first_integral_H", "classify_leaf",
    "PeriodResult", "QuadratureError", "RationalityReport", "DisplacementResult",
    "phi", "phi_roots", "period_quadrature", "period_ode_oracle",
    "period_lower_bound", "rationality_report", "x_displacement_check",
    "HypoConstants", "compute_constants", "decay_rate", "decay_rate_from_eps0",
    "rate_vs_sigma_table", "sigma_argmax",
    "SpanReport", "check_derivative_span", "derivative_matrix",
]

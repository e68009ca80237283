"""Coordinate-chart tensor calculus.

Symbolic expression trees closed under exact differentiation; charts with
scalar, vector and tensor fields; the Leibniz coboundary of k-tensors by two
independent routes (the cochain formula and the local tensor-part plus
derivative-term expansion); the Riemannian apparatus (Christoffel symbols,
Levi-Civita connection, covariant derivatives, curvature); and functionals
over curves and immersed squares with exact and finite-difference first
variations.
"""

from .expr import (
    Expr,
    Constant,
    Variable,
    DomainError,
    EvalError,
    ParseError,
    compile_to_numpy,
    diff,
    evaluate,
    free_variables,
    parse_expr,
    substitute,
)
from .fields import (
    Chart,
    ChartMismatchError,
    ScalarField,
    TensorField,
    VectorField,
    bump_field,
    lie_bracket,
    lie_derivative,
    tensor_apply,
    tensor_apply_symbolic,
)
from .coboundary import (
    DerivTerm,
    GenericCochain,
    LocalCoboundary,
    apply_local,
    cochain_from_scalar,
    cochain_from_tensor,
    coboundary_tensor_part,
    d_squared_residual,
    global_coboundary,
    kform_obstructions,
    local_coboundary,
)
from .geometry import (
    ChristoffelFirst,
    ConnectionCoefficients,
    MetricTensor,
    christoffel_first,
    connection_coefficients,
    covariant_derivative_tensor,
    curvature_identity_residuals,
    dR_formula,
    levi_civita,
    metric_coboundary_check,
    riemann_apply_nested,
    riemann_tensor,
)
from .variation import (
    CurveFamily,
    QuadratureRule,
    SurfaceFamily,
    euler_lagrange_residual,
    first_variation_exact,
    first_variation_numeric,
    functional_curve,
    functional_surface,
    geodesic_pairing_residuals,
    geodesic_residual,
)
from .scene import SamplingConfig, Scene, SceneError, bundled_scene_path, load_scene
from .checks import CheckConfig, CheckResult, run_suite

__version__ = "0.1.0"

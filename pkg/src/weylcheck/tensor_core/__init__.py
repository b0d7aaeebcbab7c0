"""Chart-based tensor fields, connections, curvature and exterior calculus."""

from .connection import (
    AffineConnection,
    christoffel,
    covariant_derivative,
    curvature,
    first_bianchi,
    levi_civita,
    metric_compatibility,
    ricci,
    ricci_from_curvature,
    scalar_curvature,
    sectional_curvature,
)
from .fields import (
    ChartDomain,
    MetricField,
    TensorField,
    conformal_metric,
    constant_field,
    fd_convergence_order,
    fd_hessian,
    fd_jacobian,
    flat_metric,
    gram_schmidt,
    relative_eigvalsh,
    scalar_field,
)
from .forms import (
    alternate,
    codiff,
    complex_dual,
    d,
    flat,
    inner,
    inner_components,
    pointwise_norm,
    sharp,
    tensor_norm2,
    wedge,
    wedge_components,
)
from .trig import TrigField, sin_potential

__all__ = [
    "AffineConnection",
    "ChartDomain",
    "MetricField",
    "TensorField",
    "TrigField",
    "alternate",
    "christoffel",
    "codiff",
    "complex_dual",
    "conformal_metric",
    "constant_field",
    "covariant_derivative",
    "curvature",
    "d",
    "fd_convergence_order",
    "fd_hessian",
    "fd_jacobian",
    "first_bianchi",
    "flat",
    "flat_metric",
    "gram_schmidt",
    "inner",
    "inner_components",
    "levi_civita",
    "metric_compatibility",
    "pointwise_norm",
    "relative_eigvalsh",
    "ricci",
    "ricci_from_curvature",
    "scalar_curvature",
    "scalar_field",
    "sectional_curvature",
    "sharp",
    "sin_potential",
    "tensor_norm2",
    "wedge",
    "wedge_components",
]

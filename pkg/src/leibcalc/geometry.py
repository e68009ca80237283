"""Metric geometry: Christoffel symbols, connection, curvature.

Everything is derived symbolically from a symmetric invertible metric:
first-kind Christoffel symbols, the Levi-Civita connection, covariant
derivatives of vector fields and of arbitrary tensors (differentiation
direction in the last slot), and the curvature four-tensor.

The curvature tensor is built from connection coefficients and their
partials; the nested-connection form is kept as an independent oracle for
tests.  The sign convention is

    R(X, Y, Z, W) = < nabla_X nabla_Y Z - nabla_Y nabla_X Z
                      - nabla_[X,Y] Z , W >,

which makes R(d1, d2, d2, d1) = sin(x1)^2 on the unit sphere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coboundary import (
    LocalCoboundary,
    apply_local,
    coboundary_tensor_part,
    local_coboundary,
)
from .expr import Expr, ZERO, Constant, add, div, mul, neg, sub
from .fields import (
    Chart,
    ChartMismatchError,
    ScalarField,
    TensorField,
    VectorField,
    evaluate_grid,
    lie_bracket,
    lie_derivative,
    tensor_apply,
)

__all__ = [
    "MetricTensor",
    "ChristoffelFirst",
    "ConnectionCoefficients",
    "christoffel_first",
    "connection_coefficients",
    "levi_civita",
    "covariant_derivative_tensor",
    "riemann_tensor",
    "riemann_apply_nested",
    "dR_formula",
    "curvature_identity_residuals",
    "metric_coboundary_check",
]

_MAX_INVERSE_DIM = 4


def _symbolic_det(matrix: np.ndarray) -> Expr:
    n = matrix.shape[0]
    if n == 1:
        return matrix[0, 0]
    total = ZERO
    for j in range(n):
        minor = np.delete(np.delete(matrix, 0, axis=0), j, axis=1)
        term = mul(matrix[0, j], _symbolic_det(minor))
        total = add(total, term) if j % 2 == 0 else sub(total, term)
    return total


def _symbolic_inverse(matrix: np.ndarray) -> np.ndarray:
    n = matrix.shape[0]
    det = _symbolic_det(matrix)
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(matrix, j, axis=0), i, axis=1)
            cofactor = _symbolic_det(minor)
            if (i + j) % 2:
                cofactor = neg(cofactor)
            out[i, j] = div(cofactor, det)
    return out


@dataclass(frozen=True, eq=False)
class ChristoffelFirst:
    """First-kind symbols [ij, l], symmetric in i and j."""

    chart: Chart
    symbols: np.ndarray  # object array indexed [i, j, l]

    def expr(self, i: int, j: int, l: int) -> Expr:
        return self.symbols[i, j, l]

    def values_at(self, point) -> np.ndarray:
        return evaluate_grid(self.symbols, self.chart.env(point))


@dataclass(frozen=True, eq=False)
class ConnectionCoefficients:
    """Second-kind coefficients, indexed [m, i, j] for the m-th output."""

    chart: Chart
    coefficients: np.ndarray

    def expr(self, m: int, i: int, j: int) -> Expr:
        return self.coefficients[m, i, j]

    def values_at(self, point) -> np.ndarray:
        return evaluate_grid(self.coefficients, self.chart.env(point))

    def perturbed(self, m: int, i: int, j: int, amount: float) -> "ConnectionCoefficients":
        """A deliberately corrupted copy (test fixture for the detectors)."""
        grid = np.array(self.coefficients, dtype=object)
        grid[m, i, j] = add(grid[m, i, j], Constant(amount))
        grid[m, j, i] = grid[m, i, j]
        return ConnectionCoefficients(self.chart, grid)


class MetricTensor:
    """A symmetric, sampled-nondegenerate rank-2 tensor with cached geometry.

    Symmetry is accepted when component trees match exactly and otherwise
    checked by evaluation at seeded sample points, in line with the policy
    that mathematical equality is tested by evaluation.
    """

    def __init__(self, tensor: TensorField, *, check_points: int = 16):
        if tensor.rank != 2:
            raise ValueError("a metric must be a rank-2 tensor")
        n = tensor.chart.dimension
        if n > _MAX_INVERSE_DIM:
            raise ValueError(
                f"symbolic metric inversion is limited to dimension {_MAX_INVERSE_DIM}"
            )
        self.tensor = tensor
        self.chart = tensor.chart
        self._validate(check_points)
        self._inverse = None
        self._first = None
        self._connection = None
        self._riemann = None
        self._nabla_riemann = None
        self._local_coboundary = None

    def _validate(self, check_points: int):
        n = self.chart.dimension
        grid = self.tensor.coefficients
        points = self.chart.sample_points(check_points, np.random.default_rng(0))
        for i in range(n):
            for j in range(i + 1, n):
                if grid[i, j] == grid[j, i]:
                    continue
                for p in points:
                    env = self.chart.env(p)
                    a, b = grid[i, j].evaluate(env), grid[j, i].evaluate(env)
                    if abs(a - b) > 1e-9 * (1.0 + abs(a)):
                        raise ValueError("metric not symmetric")
        det = _symbolic_det(grid)
        for p in points:
            if abs(det.evaluate(self.chart.env(p))) < 1e-12:
                raise ValueError("metric degenerate at a sampled point")

    @property
    def dimension(self) -> int:
        return self.chart.dimension

    def component(self, i: int, j: int) -> Expr:
        return self.tensor.coefficients[i, j]

    @property
    def inverse_components(self) -> np.ndarray:
        if self._inverse is None:
            self._inverse = _symbolic_inverse(self.tensor.coefficients)
            self._inverse.setflags(write=False)
        return self._inverse

    def christoffel_first(self) -> ChristoffelFirst:
        if self._first is None:
            self._first = christoffel_first(self)
        return self._first

    def connection(self) -> ConnectionCoefficients:
        if self._connection is None:
            self._connection = connection_coefficients(self)
        return self._connection

    def riemann(self) -> TensorField:
        if self._riemann is None:
            self._riemann = riemann_tensor(self)
        return self._riemann

    def riemann_covariant(self) -> TensorField:
        """The covariant derivative of the curvature tensor, direction last."""
        if self._nabla_riemann is None:
            self._nabla_riemann = covariant_derivative_tensor(self, self.riemann())
        return self._nabla_riemann

    def local_coboundary(self) -> LocalCoboundary:
        if self._local_coboundary is None:
            self._local_coboundary = local_coboundary(self.tensor)
        return self._local_coboundary

    def inner(self, x: VectorField, y: VectorField) -> ScalarField:
        """The inner product <X, Y> as a scalar field."""
        if x.chart != self.chart or y.chart != self.chart:
            raise ChartMismatchError("fields live on a different chart")
        total = ZERO
        n = self.dimension
        for i in range(n):
            for j in range(n):
                total = add(
                    total,
                    mul(self.component(i, j), mul(x.components[i], y.components[j])),
                )
        return ScalarField(self.chart, total)


def christoffel_first(g: MetricTensor) -> ChristoffelFirst:
    """[ij, l] = (d g_jl / dx^i + d g_il / dx^j - d g_ij / dx^l) / 2."""
    chart = g.chart
    names = chart.coordinates
    n = chart.dimension
    half = Constant(0.5)
    grid = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            for l in range(n):
                term = sub(
                    add(
                        g.component(j, l).diff(names[i]),
                        g.component(i, l).diff(names[j]),
                    ),
                    g.component(i, j).diff(names[l]),
                )
                grid[i, j, l] = mul(half, term)
    return ChristoffelFirst(chart, grid)


def connection_coefficients(g: MetricTensor) -> ConnectionCoefficients:
    """Raise the last index of the first-kind symbols with the inverse metric."""
    chart = g.chart
    n = chart.dimension
    first = g.christoffel_first().symbols
    ginv = g.inverse_components
    grid = np.empty((n, n, n), dtype=object)
    for m in range(n):
        for i in range(n):
            for j in range(n):
                total = ZERO
                for l in range(n):
                    total = add(total, mul(ginv[m, l], first[i, j, l]))
                grid[m, i, j] = total
    return ConnectionCoefficients(chart, grid)


def levi_civita(
    g: MetricTensor,
    x: VectorField,
    y: VectorField,
    connection: ConnectionCoefficients | None = None,
) -> VectorField:
    """The covariant derivative nabla_X Y of one field along another."""
    chart = g.chart
    if x.chart != chart or y.chart != chart:
        raise ChartMismatchError("fields live on a different chart")
    gamma = (connection or g.connection()).coefficients
    names = chart.coordinates
    n = chart.dimension
    components = []
    for m in range(n):
        total = ZERO
        for j in range(n):
            total = add(total, mul(x.components[j], y.components[m].diff(names[j])))
            for i in range(n):
                total = add(
                    total,
                    mul(gamma[m, j, i], mul(x.components[j], y.components[i])),
                )
        components.append(total)
    return VectorField(chart, tuple(components))


def covariant_derivative_tensor(
    g: MetricTensor,
    omega: TensorField,
    connection: ConnectionCoefficients | None = None,
) -> TensorField:
    """The covariant derivative of a k-tensor, direction slot last.

    Component (i_1, ..., i_k, z) is the partial of the coefficient along
    coordinate z minus one connection contraction per original slot.
    """
    if omega.rank < 1:
        raise ValueError("the covariant derivative helper needs rank at least 1")
    chart = g.chart
    if omega.chart != chart:
        raise ChartMismatchError("tensor lives on a different chart")
    gamma = (connection or g.connection()).coefficients
    names = chart.coordinates
    n = chart.dimension
    k = omega.rank
    grid = np.empty((n,) * (k + 1), dtype=object)
    for index in np.ndindex(grid.shape):
        base, z = index[:k], index[k]
        total = omega.coefficients[base].diff(names[z])
        for slot in range(k):
            for q in range(n):
                replaced = base[:slot] + (q,) + base[slot + 1 :]
                total = sub(
                    total,
                    mul(gamma[q, z, base[slot]], omega.coefficients[replaced]),
                )
        grid[index] = total
    return TensorField(chart, grid)


def riemann_tensor(g: MetricTensor) -> TensorField:
    """Curvature four-tensor from connection coefficients and their partials."""
    chart = g.chart
    names = chart.coordinates
    n = chart.dimension
    gamma = g.connection().coefficients
    grid = np.empty((n, n, n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                # curvature operator component q of (nabla_i nabla_j - nabla_j nabla_i) d_k
                operator = []
                for q in range(n):
                    total = sub(
                        gamma[q, j, k].diff(names[i]),
                        gamma[q, i, k].diff(names[j]),
                    )
                    for m in range(n):
                        total = add(total, mul(gamma[m, j, k], gamma[q, i, m]))
                        total = sub(total, mul(gamma[m, i, k], gamma[q, j, m]))
                    operator.append(total)
                for l in range(n):
                    entry = ZERO
                    for q in range(n):
                        entry = add(entry, mul(g.component(q, l), operator[q]))
                    grid[i, j, k, l] = entry
    return TensorField(chart, grid)


def riemann_apply_nested(
    g: MetricTensor,
    x: VectorField,
    y: VectorField,
    z: VectorField,
    w: VectorField,
) -> ScalarField:
    """Curvature via nested connection applications (independent test oracle)."""
    first = levi_civita(g, x, levi_civita(g, y, z))
    second = levi_civita(g, y, levi_civita(g, x, z))
    third = levi_civita(g, lie_bracket(x, y), z)
    combined = first - second - third
    return g.inner(combined, w)


def dR_formula(
    g: MetricTensor,
    x: VectorField,
    y: VectorField,
    z: VectorField,
    w: VectorField,
    t: VectorField,
    point,
) -> float:
    """Coboundary of the curvature tensor via its covariant derivative.

    The value is -(nabla_Z R)(X, Y, W, T) plus eight curvature corrections in
    which one of the last two arguments is covariantly differentiated along X
    or Y.  Equals the cochain coboundary of R as a 4-cochain.
    """
    riemann = g.riemann()
    nabla_riemann = g.riemann_covariant()
    dxw = levi_civita(g, x, w)
    dxt = levi_civita(g, x, t)
    dyw = levi_civita(g, y, w)
    dyt = levi_civita(g, y, t)

    value = -tensor_apply(nabla_riemann, (x, y, w, t, z), point)
    value += tensor_apply(riemann, (z, t, y, dxw), point)
    value -= tensor_apply(riemann, (y, z, t, dxw), point)
    value -= tensor_apply(riemann, (z, w, y, dxt), point)
    value += tensor_apply(riemann, (y, z, w, dxt), point)
    value -= tensor_apply(riemann, (z, t, x, dyw), point)
    value += tensor_apply(riemann, (x, z, t, dyw), point)
    value += tensor_apply(riemann, (z, w, x, dyt), point)
    value -= tensor_apply(riemann, (x, z, w, dyt), point)
    return value


def curvature_identity_residuals(
    g: MetricTensor,
    fields: Sequence[VectorField],
    point,
) -> dict[str, float]:
    """Residuals of the curvature symmetries and both Bianchi cyclic sums.

    ``fields`` supplies (X, Y, Z, W, T); all residuals are exactly zero for a
    Levi-Civita connection.
    """
    x, y, z, w, t = fields
    riemann = g.riemann()
    nabla_riemann = g.riemann_covariant()

    def r(*args):
        return tensor_apply(riemann, args, point)

    def nr(direction, *args):
        return tensor_apply(nabla_riemann, (*args, direction), point)

    return {
        "swap_first_pair": r(x, y, z, t) + r(y, x, z, t),
        "swap_last_pair": r(x, y, z, t) + r(x, y, t, z),
        "pair_interchange": r(x, y, z, t) - r(z, t, x, y),
        "bianchi_cyclic_directions": nr(t, x, y, z, w)
        + nr(z, x, y, w, t)
        + nr(w, x, y, t, z),
        "bianchi_cyclic_arguments": nr(x, y, z, w, t)
        + nr(y, z, x, w, t)
        + nr(z, x, y, w, t),
    }


def metric_coboundary_check(
    g: MetricTensor,
    x: VectorField,
    y: VectorField,
    z: VectorField,
    point,
) -> tuple[float, float, float]:
    """Compare d g(X, Y, Z) with 2 <Y, nabla_X Z> at a point.

    Returns (lhs, rhs, residual).  On coordinate fields the left side is
    twice the first-kind Christoffel symbol.
    """
    lhs = apply_local(g.local_coboundary(), (x, y, z), point)
    rhs = 2.0 * g.inner(y, levi_civita(g, x, z)).value(point)
    return lhs, rhs, lhs - rhs

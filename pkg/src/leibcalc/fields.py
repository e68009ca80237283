"""Charts and the objects living on them.

A chart is a single global coordinate box; scalar, vector and tensor fields
carry a chart reference and expression-valued components.  Tensor
coefficients are stored densely as numpy object arrays indexed by the full
multi-index, which keeps contraction code trivial for the small dimensions
(n <= 4) and ranks (k <= 5) this library targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .expr import Expr, ZERO, ONE, Constant, Variable, add, as_expr, call, intpow, mul, sub

__all__ = [
    "PARAMETER_NAMES",
    "Chart",
    "ChartMismatchError",
    "ScalarField",
    "VectorField",
    "TensorField",
    "lie_derivative",
    "lie_bracket",
    "tensor_apply",
    "tensor_apply_symbolic",
    "bump_field",
    "evaluate_grid",
    "contract_all",
]

# reserved for curve/surface families; charts must not shadow them
PARAMETER_NAMES = ("s", "t", "t1", "t2")


class ChartMismatchError(ValueError):
    """Operation mixing objects from different charts."""


@dataclass(frozen=True)
class Chart:
    """An n-dimensional coordinate box with named coordinates."""

    coordinates: tuple[str, ...]
    domain: tuple[tuple[float, float], ...]

    def __init__(self, coordinates: Sequence[str], domain: Sequence[Sequence[float]]):
        coordinates = tuple(str(name) for name in coordinates)
        domain = tuple((float(lo), float(hi)) for lo, hi in domain)
        if len(coordinates) < 1:
            raise ValueError("chart dimension must be at least 1")
        if len(set(coordinates)) != len(coordinates):
            raise ValueError("coordinate names must be unique")
        for name in coordinates:
            if name in PARAMETER_NAMES:
                raise ValueError(f"coordinate name '{name}' is reserved for families")
        if len(domain) != len(coordinates):
            raise ValueError("domain box must have one interval per coordinate")
        for lo, hi in domain:
            if not lo < hi:
                raise ValueError(f"domain interval [{lo}, {hi}] is empty")
        object.__setattr__(self, "coordinates", coordinates)
        object.__setattr__(self, "domain", domain)

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def axis(self, name: str) -> int:
        try:
            return self.coordinates.index(name)
        except ValueError:
            raise KeyError(f"no coordinate named '{name}'") from None

    def validate_point(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float)
        if p.shape != (self.dimension,):
            raise ValueError(
                f"point has shape {p.shape}, expected ({self.dimension},)"
            )
        for value, (lo, hi) in zip(p, self.domain):
            if not (lo <= value <= hi):
                raise ValueError(f"point {p.tolist()} outside the chart domain")
        return p

    def contains(self, point, margin: float = 0.0) -> bool:
        p = np.asarray(point, dtype=float)
        if p.shape != (self.dimension,):
            return False
        return all(
            lo + margin <= v <= hi - margin for v, (lo, hi) in zip(p, self.domain)
        )

    def env(self, point, extra: Mapping[str, float] | None = None) -> dict:
        p = self.validate_point(point)
        bindings = dict(zip(self.coordinates, (float(v) for v in p)))
        if extra:
            bindings.update(extra)
        return bindings

    def sample_points(self, count: int, rng=None, inset: float = 0.1) -> np.ndarray:
        """Uniform points from the inset-shrunk domain box (reproducible)."""
        if rng is None:
            rng = np.random.default_rng(0)
        lows = np.array([lo + inset * (hi - lo) for lo, hi in self.domain])
        highs = np.array([hi - inset * (hi - lo) for lo, hi in self.domain])
        return rng.uniform(lows, highs, size=(count, self.dimension))

    def coordinate_field(self, axis: int) -> "VectorField":
        components = tuple(ONE if i == axis else ZERO for i in range(self.dimension))
        return VectorField(self, components)

    def coordinate_fields(self) -> tuple["VectorField", ...]:
        return tuple(self.coordinate_field(i) for i in range(self.dimension))


def _check_same_chart(*objects):
    chart = objects[0].chart
    for obj in objects[1:]:
        if obj.chart != chart:
            raise ChartMismatchError("objects live on different charts")
    return chart


def _check_chart_exprs(chart: Chart, exprs: Iterable[Expr]):
    allowed = set(chart.coordinates)
    for e in exprs:
        extra = e.free_variables() - allowed
        if extra:
            raise ValueError(f"expression '{e}' uses non-chart variables {sorted(extra)}")


@dataclass(frozen=True)
class ScalarField:
    """A smooth real function on the chart, backed by an expression."""

    chart: Chart
    expr: Expr

    def __post_init__(self):
        object.__setattr__(self, "expr", as_expr(self.expr))
        _check_chart_exprs(self.chart, (self.expr,))

    def value(self, point) -> float:
        return self.expr.evaluate(self.chart.env(point))

    def partial(self, axis: int) -> "ScalarField":
        return ScalarField(self.chart, self.expr.diff(self.chart.coordinates[axis]))

    def __add__(self, other):
        other = _coerce_scalar(self.chart, other)
        return ScalarField(self.chart, self.expr + other.expr)

    def __mul__(self, other):
        other = _coerce_scalar(self.chart, other)
        return ScalarField(self.chart, self.expr * other.expr)

    __radd__ = __add__
    __rmul__ = __mul__

    def __sub__(self, other):
        other = _coerce_scalar(self.chart, other)
        return ScalarField(self.chart, self.expr - other.expr)

    def __neg__(self):
        return ScalarField(self.chart, -self.expr)


def _coerce_scalar(chart: Chart, value) -> ScalarField:
    if isinstance(value, ScalarField):
        _check_same_chart_pair(chart, value.chart)
        return value
    return ScalarField(chart, as_expr(value))


def _check_same_chart_pair(a: Chart, b: Chart):
    if a != b:
        raise ChartMismatchError("objects live on different charts")


@dataclass(frozen=True)
class VectorField:
    """A vector field with one expression per coordinate direction."""

    chart: Chart
    components: tuple[Expr, ...]

    def __post_init__(self):
        components = tuple(as_expr(c) for c in self.components)
        if len(components) != self.chart.dimension:
            raise ValueError("component count does not match the chart dimension")
        _check_chart_exprs(self.chart, components)
        object.__setattr__(self, "components", components)

    def value(self, point) -> np.ndarray:
        env = self.chart.env(point)
        return np.array([c.evaluate(env) for c in self.components])

    @cached_property
    def jacobian_exprs(self) -> tuple[tuple[Expr, ...], ...]:
        """Row q, column l holds the partial of component q along coordinate l."""
        names = self.chart.coordinates
        return tuple(
            tuple(c.diff(name) for name in names) for c in self.components
        )

    def jacobian_value(self, point) -> np.ndarray:
        env = self.chart.env(point)
        return np.array(
            [[e.evaluate(env) for e in row] for row in self.jacobian_exprs]
        )

    def scaled(self, factor) -> "VectorField":
        """Multiply by a scalar field (or expression, or number)."""
        f = _coerce_scalar(self.chart, factor).expr
        return VectorField(self.chart, tuple(mul(f, c) for c in self.components))

    def __add__(self, other: "VectorField") -> "VectorField":
        _check_same_chart(self, other)
        return VectorField(
            self.chart,
            tuple(add(a, b) for a, b in zip(self.components, other.components)),
        )

    def __sub__(self, other: "VectorField") -> "VectorField":
        _check_same_chart(self, other)
        return VectorField(
            self.chart,
            tuple(sub(a, b) for a, b in zip(self.components, other.components)),
        )


@dataclass(frozen=True, eq=False)
class TensorField:
    """A rank-k tensor with a dense grid of expression coefficients.

    ``coefficients`` is an object ndarray of shape (n,)*k; rank 0 degenerates
    to a single scalar entry.  No symmetry of any kind is assumed.
    """

    chart: Chart
    coefficients: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.coefficients, dtype=object)
        n = self.chart.dimension
        if grid.shape != (n,) * grid.ndim:
            raise ValueError(
                f"coefficient grid shape {grid.shape} is not ({n},)*rank"
            )
        out = np.empty(grid.shape, dtype=object)
        for index in np.ndindex(grid.shape) if grid.ndim else [()]:
            out[index] = as_expr(grid[index])
        _check_chart_exprs(self.chart, out.flat if grid.ndim else [out[()]])
        out.setflags(write=False)
        object.__setattr__(self, "coefficients", out)

    @property
    def rank(self) -> int:
        return self.coefficients.ndim

    def component(self, *index: int) -> Expr:
        return self.coefficients[tuple(index)]

    @classmethod
    def from_nested(cls, chart: Chart, rank: int, nested) -> "TensorField":
        grid = np.empty((chart.dimension,) * rank, dtype=object)
        if rank == 0:
            grid[()] = nested
        else:
            for index in np.ndindex(grid.shape):
                entry = nested
                for i in index:
                    entry = entry[i]
                grid[index] = entry
        return cls(chart, grid)

    @classmethod
    def basis(cls, chart: Chart, index: Sequence[int]) -> "TensorField":
        """The covector product with coefficient 1 at ``index`` and 0 elsewhere."""
        grid = np.full((chart.dimension,) * len(index), ZERO, dtype=object)
        grid[tuple(index)] = ONE
        return cls(chart, grid)

    @classmethod
    def zero(cls, chart: Chart, rank: int) -> "TensorField":
        grid = np.full((chart.dimension,) * rank, ZERO, dtype=object)
        if rank == 0:
            grid = np.array(ZERO, dtype=object)
        return cls(chart, grid)

    def values_at(self, point) -> np.ndarray:
        return evaluate_grid(self.coefficients, self.chart.env(point))

    def apply(self, fields: Sequence[VectorField], point) -> float:
        return tensor_apply(self, fields, point)

    def apply_symbolic(self, fields: Sequence[VectorField]) -> ScalarField:
        return tensor_apply_symbolic(self, fields)

    def map_coefficients(self, fn) -> "TensorField":
        grid = np.empty(self.coefficients.shape, dtype=object)
        for index in np.ndindex(grid.shape) if grid.ndim else [()]:
            grid[index] = fn(self.coefficients[index])
        return TensorField(self.chart, grid)


def evaluate_grid(grid: np.ndarray, env: Mapping[str, float]) -> np.ndarray:
    """Evaluate an object array of expressions into a float array."""
    out = np.empty(grid.shape, dtype=float)
    if grid.ndim == 0:
        out[()] = grid[()].evaluate(env)
        return out
    for index in np.ndindex(grid.shape):
        out[index] = grid[index].evaluate(env)
    return out


def contract_all(values: np.ndarray, vectors: Sequence[np.ndarray]) -> float:
    """Contract the leading axes of ``values`` against one vector each."""
    out = values
    for v in vectors:
        out = np.tensordot(out, v, axes=([0], [0]))
    return float(out)


def lie_derivative(field: VectorField, f: ScalarField) -> ScalarField:
    """Directional derivative of f along the field, as a symbolic scalar."""
    _check_same_chart(field, f)
    names = field.chart.coordinates
    total = ZERO
    for c, name in zip(field.components, names):
        total = add(total, mul(c, f.expr.diff(name)))
    return ScalarField(field.chart, total)


def lie_bracket(x: VectorField, y: VectorField) -> VectorField:
    """Coordinate bracket [X, Y]^i = sum_j (X^j d_j Y^i - Y^j d_j X^i)."""
    chart = _check_same_chart(x, y)
    names = chart.coordinates
    components = []
    for i in range(chart.dimension):
        total = ZERO
        for j, name in enumerate(names):
            total = add(total, mul(x.components[j], y.components[i].diff(name)))
            total = sub(total, mul(y.components[j], x.components[i].diff(name)))
        components.append(total)
    return VectorField(chart, tuple(components))


def tensor_apply(omega: TensorField, fields: Sequence[VectorField], point) -> float:
    """Numeric multilinear application at a point."""
    fields = tuple(fields)
    if len(fields) != omega.rank:
        raise ValueError(
            f"tensor of rank {omega.rank} applied to {len(fields)} fields"
        )
    if fields:
        _check_same_chart(omega, *fields)
    values = omega.values_at(point)
    vectors = [f.value(point) for f in fields]
    return contract_all(values, vectors)


def tensor_apply_symbolic(
    omega: TensorField, fields: Sequence[VectorField]
) -> ScalarField:
    """Symbolic multilinear application: a scalar field that can be rediffed."""
    fields = tuple(fields)
    if len(fields) != omega.rank:
        raise ValueError(
            f"tensor of rank {omega.rank} applied to {len(fields)} fields"
        )
    chart = omega.chart
    if fields:
        _check_same_chart(omega, *fields)
    if omega.rank == 0:
        return ScalarField(chart, omega.coefficients[()])
    total = ZERO
    for index in np.ndindex(omega.coefficients.shape):
        term = omega.coefficients[index]
        for slot, i in enumerate(index):
            term = mul(term, fields[slot].components[i])
        total = add(total, term)
    return ScalarField(chart, total)


def bump_field(chart: Chart, center, r1: float, r2: float) -> ScalarField:
    """Smooth cutoff: 1 within distance r1 of the center, 0 beyond r2.

    The cutoff argument is an affine function of squared distance (r1 -> 1,
    r2 -> 2), so the composed expression is polynomial inside the built-in
    cutoff and smooth everywhere, including at the center.
    """
    if not (0.0 < r1 < r2):
        raise ValueError("radii must satisfy 0 < r1 < r2")
    p = chart.validate_point(center)
    for c, (lo, hi) in zip(p, chart.domain):
        if c - r2 < lo or c + r2 > hi:
            raise ValueError("the outer ball exits the chart domain")
    squared = ZERO
    for name, c in zip(chart.coordinates, p):
        squared = add(squared, intpow(sub(Variable(name), Constant(c)), 2))
    argument = add(
        ONE,
        mul(
            Constant(1.0 / (r2 * r2 - r1 * r1)),
            sub(squared, Constant(r1 * r1)),
        ),
    )
    return ScalarField(chart, call("bump", argument))

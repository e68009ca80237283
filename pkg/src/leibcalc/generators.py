"""Seeded random mathematical objects for verification sweeps and tests.

Polynomials are built in box-normalized coordinates (each coordinate mapped
affinely onto [-1, 1] over the chart domain), so sweep values stay O(1) on
any chart and the suite's absolute tolerances measure identity residuals,
not conditioning.  Everything is driven by a caller-supplied numpy generator
for reproducibility.
"""

from __future__ import annotations

import numpy as np

from .expr import Expr, ZERO, Constant, Variable, add, intpow, mul, sub
from .fields import Chart, TensorField, VectorField
from .variation import CurveFamily, SurfaceFamily

__all__ = [
    "normalized_coordinates",
    "random_polynomial",
    "random_tensor",
    "random_vector_field",
    "monomial_coordinate_field",
    "random_curve_family",
    "random_surface_family",
]


def normalized_coordinates(chart: Chart) -> tuple[Expr, ...]:
    """Affine images of the coordinates spanning [-1, 1] over the box."""
    out = []
    for name, (lo, hi) in zip(chart.coordinates, chart.domain):
        center = 0.5 * (lo + hi)
        halfwidth = 0.5 * (hi - lo)
        out.append(
            mul(Constant(1.0 / halfwidth), sub(Variable(name), Constant(center)))
        )
    return tuple(out)


def random_polynomial(
    rng: np.random.Generator,
    chart: Chart,
    terms: int = 3,
    max_degree: int = 2,
    coeff_span: int = 2,
) -> Expr:
    """A small polynomial in normalized coordinates, integer coefficients."""
    u = normalized_coordinates(chart)
    total = ZERO
    for _ in range(terms):
        c = int(rng.integers(-coeff_span, coeff_span + 1))
        term: Expr = Constant(float(c))
        for variable in u:
            degree = int(rng.integers(0, max_degree + 1))
            if degree:
                term = mul(term, intpow(variable, degree))
        total = add(total, term)
    return total


def random_tensor(rng: np.random.Generator, chart: Chart, rank: int, **kw) -> TensorField:
    grid = np.empty((chart.dimension,) * rank, dtype=object)
    if rank == 0:
        grid = np.array(None, dtype=object)
        grid[()] = random_polynomial(rng, chart, **kw)
    else:
        for index in np.ndindex(grid.shape):
            grid[index] = random_polynomial(rng, chart, **kw)
    return TensorField(chart, grid)


def random_vector_field(rng: np.random.Generator, chart: Chart, **kw) -> VectorField:
    return VectorField(
        chart,
        tuple(random_polynomial(rng, chart, **kw) for _ in range(chart.dimension)),
    )


def monomial_coordinate_field(rng: np.random.Generator, chart: Chart) -> VectorField:
    """A coordinate field scaled by a small normalized-coordinate monomial."""
    axis = int(rng.integers(0, chart.dimension))
    coefficient: Expr = Constant(float(rng.integers(1, 3)))
    for variable in normalized_coordinates(chart):
        degree = int(rng.integers(0, 2))
        if degree:
            coefficient = mul(coefficient, intpow(variable, degree))
    components = [ZERO] * chart.dimension
    components[axis] = coefficient
    return VectorField(chart, tuple(components))


def _t_poly(rng: np.random.Generator, var: str, amplitude: float) -> Expr:
    c0 = float(rng.uniform(-1.0, 1.0))
    c1 = float(rng.uniform(-1.0, 1.0))
    v = Variable(var)
    return mul(Constant(amplitude), add(Constant(c0), mul(Constant(c1), v)))


def random_curve_family(rng: np.random.Generator, chart: Chart) -> CurveFamily:
    """A boundary-fixed curve family safely inside the chart box.

    The base curve joins two well-inset points with a small t(1-t) wiggle;
    the variation direction is t(1-t) times a low-degree polynomial, so the
    endpoints are fixed exactly.
    """
    lows = np.array([lo for lo, _ in chart.domain])
    highs = np.array([hi for _, hi in chart.domain])
    width = highs - lows
    a = lows + width * rng.uniform(0.30, 0.45, size=chart.dimension)
    b = lows + width * rng.uniform(0.55, 0.70, size=chart.dimension)
    t = Variable("t")
    s = Variable("s")
    window = mul(t, sub(Constant(1.0), t))
    components = []
    for i in range(chart.dimension):
        base = add(
            Constant(float(a[i])),
            mul(Constant(float(b[i] - a[i])), t),
        )
        wiggle = mul(window, _t_poly(rng, "t", 0.10 * float(width[i])))
        variation = mul(s, mul(window, _t_poly(rng, "t", 0.15 * float(width[i]))))
        components.append(add(add(base, wiggle), variation))
    return CurveFamily(chart, tuple(components), s_halfwidth=0.5)


def random_surface_family(
    rng: np.random.Generator, chart: Chart, affine_base: bool = False
) -> SurfaceFamily:
    """A boundary-fixed square family safely inside the chart box.

    With ``affine_base`` the base square is affine in (t1, t2), so its mixed
    second parameter derivative vanishes identically.
    """
    lows = np.array([lo for lo, _ in chart.domain])
    highs = np.array([hi for _, hi in chart.domain])
    width = highs - lows
    origin = lows + width * rng.uniform(0.30, 0.40, size=chart.dimension)
    t1, t2, s = Variable("t1"), Variable("t2"), Variable("s")
    window = mul(
        mul(t1, sub(Constant(1.0), t1)),
        mul(t2, sub(Constant(1.0), t2)),
    )
    components = []
    for i in range(chart.dimension):
        span1 = float(width[i]) * rng.uniform(0.12, 0.25)
        span2 = float(width[i]) * rng.uniform(0.12, 0.25)
        base = add(
            Constant(float(origin[i])),
            add(mul(Constant(span1), t1), mul(Constant(span2), t2)),
        )
        if not affine_base:
            dome = mul(window, Constant(float(rng.uniform(-0.08, 0.08)) * float(width[i])))
            base = add(base, dome)
        variation = mul(
            s,
            mul(
                window,
                add(
                    _t_poly(rng, "t1", 0.10 * float(width[i])),
                    _t_poly(rng, "t2", 0.10 * float(width[i])),
                ),
            ),
        )
        components.append(add(base, variation))
    return SurfaceFamily(chart, tuple(components), s_halfwidth=0.5)

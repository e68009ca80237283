"""Functionals over curves and immersed squares, and their first variations.

A family is a smoothly varying curve alpha(s, t) or square alpha(s, t1, t2)
with fixed boundary: the s-derivative vanishes at the parameter boundary.
The exact first variation is assembled from the same coefficient blocks that
appear in the coboundary tensor part (plus the symmetric part of the tensor
for rank 2), which is the point of the whole construction; the numeric first
variation is an independent central-difference oracle.

Integrands are compiled to vectorized numpy callables and integrated with
tensor-product Gauss-Legendre rules, so quadrature error is negligible next
to the finite-difference tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coboundary import apply_local, coboundary_tensor_part
from .expr import Expr, ZERO, Constant, add, as_expr, compile_to_numpy, mul, substitute
from .fields import Chart, TensorField, VectorField, evaluate_grid
from .geometry import MetricTensor

__all__ = [
    "QuadratureRule",
    "CurveFamily",
    "SurfaceFamily",
    "functional_curve",
    "functional_surface",
    "first_variation_exact",
    "first_variation_numeric",
    "euler_lagrange_residual",
    "geodesic_residual",
    "geodesic_pairing_residuals",
]

_gauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_01(count: int) -> tuple[np.ndarray, np.ndarray]:
    cached = _gauss_cache.get(count)
    if cached is None:
        x, w = np.polynomial.legendre.leggauss(count)
        cached = ((x + 1.0) / 2.0, w / 2.0)
        _gauss_cache[count] = cached
    return cached


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre quadrature on [0, 1], ``nodes`` points per axis."""

    nodes: int = 32

    def __post_init__(self):
        if self.nodes < 2:
            raise ValueError("quadrature needs at least 2 nodes per axis")

    def integrate_1d(self, fn) -> float:
        x, w = _gauss_01(self.nodes)
        return float(np.dot(w, fn(x)))

    def integrate_2d(self, fn) -> float:
        x, w = _gauss_01(self.nodes)
        g1, g2 = np.meshgrid(x, x, indexing="ij")
        weights = np.outer(w, w)
        values = fn(g1.ravel(), g2.ravel()).reshape(self.nodes, self.nodes)
        return float(np.sum(weights * values))


_BOUNDARY_TOL = 1e-9


def _sample_s(s_halfwidth: float) -> np.ndarray:
    return np.linspace(-0.9 * s_halfwidth, 0.9 * s_halfwidth, 7)


@dataclass(frozen=True)
class CurveFamily:
    """A boundary-fixed variation alpha(s, t) of a curve, t in [0, 1].

    Components are expressions in the parameters s and t (a bare curve simply
    does not mention s).  Construction rejects families whose endpoints move
    with s or whose sampled image leaves the chart domain; nothing is clamped.
    """

    chart: Chart
    components: tuple[Expr, ...]
    s_halfwidth: float = 0.5

    def __post_init__(self):
        components = tuple(as_expr(c) for c in self.components)
        object.__setattr__(self, "components", components)
        if len(components) != self.chart.dimension:
            raise ValueError("family needs one component per coordinate")
        if self.s_halfwidth <= 0:
            raise ValueError("the s interval must have positive width")
        allowed = {"s", "t"}
        for c in components:
            extra = c.free_variables() - allowed
            if extra:
                raise ValueError(
                    f"curve component '{c}' uses variables {sorted(extra)}"
                )
        self._check_fixed_endpoints()
        self._check_image()

    def _check_fixed_endpoints(self):
        for c in self.components:
            rate = c.diff("s")
            for t_end in (0.0, 1.0):
                for s in _sample_s(self.s_halfwidth):
                    value = rate.evaluate({"s": float(s), "t": t_end})
                    if abs(value) > _BOUNDARY_TOL:
                        raise ValueError(
                            "family endpoints move with s (boundary not fixed)"
                        )

    def _check_image(self):
        ts = np.linspace(0.0, 1.0, 33)
        for s in _sample_s(self.s_halfwidth):
            for t in ts:
                point = [
                    c.evaluate({"s": float(s), "t": float(t)})
                    for c in self.components
                ]
                if not self.chart.contains(point):
                    raise ValueError(
                        f"family image leaves the chart domain at s={s:.3g}, t={t:.3g}"
                    )

    def at_s(self, s: float = 0.0) -> tuple[Expr, ...]:
        binding = {"s": Constant(float(s))}
        return tuple(substitute(c, binding) for c in self.components)

    def velocity(self) -> tuple[Expr, ...]:
        """d(curve)/dt at s = 0, expressions in t."""
        return tuple(c.diff("t") for c in self.at_s(0.0))

    def variation_field(self) -> tuple[Expr, ...]:
        """d(alpha)/ds at s = 0, expressions in t."""
        binding = {"s": ZERO}
        return tuple(substitute(c.diff("s"), binding) for c in self.components)

    def point_at(self, t: float, s: float = 0.0) -> np.ndarray:
        env = {"s": float(s), "t": float(t)}
        return np.array([c.evaluate(env) for c in self.components])


@dataclass(frozen=True)
class SurfaceFamily:
    """A boundary-fixed variation alpha(s, t1, t2) of an immersed square."""

    chart: Chart
    components: tuple[Expr, ...]
    s_halfwidth: float = 0.5

    def __post_init__(self):
        components = tuple(as_expr(c) for c in self.components)
        object.__setattr__(self, "components", components)
        if len(components) != self.chart.dimension:
            raise ValueError("family needs one component per coordinate")
        if self.s_halfwidth <= 0:
            raise ValueError("the s interval must have positive width")
        allowed = {"s", "t1", "t2"}
        for c in components:
            extra = c.free_variables() - allowed
            if extra:
                raise ValueError(
                    f"surface component '{c}' uses variables {sorted(extra)}"
                )
        self._check_fixed_boundary()
        self._check_image()

    def _check_fixed_boundary(self):
        edge = np.linspace(0.0, 1.0, 9)
        for c in self.components:
            rate = c.diff("s")
            for s in _sample_s(self.s_halfwidth):
                for u in edge:
                    for t1, t2 in (
                        (0.0, u),
                        (1.0, u),
                        (u, 0.0),
                        (u, 1.0),
                    ):
                        value = rate.evaluate(
                            {"s": float(s), "t1": float(t1), "t2": float(t2)}
                        )
                        if abs(value) > _BOUNDARY_TOL:
                            raise ValueError(
                                "family boundary moves with s (boundary not fixed)"
                            )

    def _check_image(self):
        grid = np.linspace(0.0, 1.0, 9)
        for s in _sample_s(self.s_halfwidth):
            for t1 in grid:
                for t2 in grid:
                    point = [
                        c.evaluate({"s": float(s), "t1": float(t1), "t2": float(t2)})
                        for c in self.components
                    ]
                    if not self.chart.contains(point):
                        raise ValueError(
                            "family image leaves the chart domain at "
                            f"s={s:.3g}, t1={t1:.3g}, t2={t2:.3g}"
                        )

    def at_s(self, s: float = 0.0) -> tuple[Expr, ...]:
        binding = {"s": Constant(float(s))}
        return tuple(substitute(c, binding) for c in self.components)

    def variation_field(self) -> tuple[Expr, ...]:
        binding = {"s": ZERO}
        return tuple(substitute(c.diff("s"), binding) for c in self.components)


def _compose(expr_on_chart: Expr, chart: Chart, components: Sequence[Expr]) -> Expr:
    """Substitute curve/surface components for the chart coordinates."""
    mapping = dict(zip(chart.coordinates, components))
    return substitute(expr_on_chart, mapping)


def _curve_integrand(omega: TensorField, family: CurveFamily) -> Expr:
    """Sum of a_i(alpha) d(alpha^i)/dt, an expression in s and t."""
    comps = family.components
    total = ZERO
    for i in range(family.chart.dimension):
        coefficient = _compose(omega.coefficients[i], family.chart, comps)
        total = add(total, mul(coefficient, comps[i].diff("t")))
    return total


def _surface_integrand(omega: TensorField, family: SurfaceFamily) -> Expr:
    """Sum of a_ij(alpha) d1(alpha^i) d2(alpha^j), in s, t1, t2."""
    comps = family.components
    n = family.chart.dimension
    total = ZERO
    for i in range(n):
        for j in range(n):
            coefficient = _compose(omega.coefficients[i, j], family.chart, comps)
            total = add(
                total,
                mul(coefficient, mul(comps[i].diff("t1"), comps[j].diff("t2"))),
            )
    return total


def functional_curve(
    omega: TensorField,
    family: CurveFamily,
    rule: QuadratureRule = QuadratureRule(),
    s: float = 0.0,
) -> float:
    """Integrate a rank-1 tensor along the family's curve at parameter s."""
    if omega.rank != 1:
        raise ValueError("functional_curve needs a rank-1 tensor")
    if omega.chart != family.chart:
        raise ValueError("tensor and family live on different charts")
    integrand = compile_to_numpy(_curve_integrand(omega, family), ("s", "t"))
    return rule.integrate_1d(lambda t: integrand(np.full_like(t, s), t))


def functional_surface(
    omega: TensorField,
    family: SurfaceFamily,
    rule: QuadratureRule = QuadratureRule(),
    s: float = 0.0,
) -> float:
    """Integrate a rank-2 tensor over the family's square at parameter s."""
    if omega.rank != 2:
        raise ValueError("functional_surface needs a rank-2 tensor")
    if omega.chart != family.chart:
        raise ValueError("tensor and family live on different charts")
    integrand = compile_to_numpy(_surface_integrand(omega, family), ("s", "t1", "t2"))
    return rule.integrate_2d(
        lambda t1, t2: integrand(np.full_like(t1, s), t1, t2)
    )


def first_variation_exact(
    omega: TensorField,
    family: CurveFamily | SurfaceFamily,
    rule: QuadratureRule = QuadratureRule(),
) -> float:
    """The derivative of the functional in s at s = 0, from the exact integrand.

    Rank 1: integral of V^l (d a_i/dx^l - d a_l/dx^i) gamma-dot^i, whose
    coefficient block is exactly the coboundary tensor part of omega.

    Rank 2: integral of V^l times the negated tensor-part block contracted
    with both tangent directions, minus the symmetrized coefficients against
    the mixed second derivative of the square.
    """
    if omega.rank == 1:
        if not isinstance(family, CurveFamily):
            raise ValueError("rank-1 tensors pair with curve families")
        block = coboundary_tensor_part(omega)  # block[l, i] = d a_i/dx^l - d a_l/dx^i
        gamma = family.at_s(0.0)
        v = family.variation_field()
        n = family.chart.dimension
        total = ZERO
        for l in range(n):
            for i in range(n):
                coefficient = _compose(block.coefficients[l, i], family.chart, gamma)
                total = add(total, mul(v[l], mul(coefficient, gamma[i].diff("t"))))
        fn = compile_to_numpy(total, ("t",))
        return rule.integrate_1d(fn)
    if omega.rank == 2:
        if not isinstance(family, SurfaceFamily):
            raise ValueError("rank-2 tensors pair with surface families")
        block = coboundary_tensor_part(omega)
        gamma = family.at_s(0.0)
        v = family.variation_field()
        n = family.chart.dimension
        total = ZERO
        for l in range(n):
            braces = ZERO
            for i in range(n):
                for j in range(n):
                    # (d a_ij/dx^l - d a_lj/dx^i - d a_il/dx^j) = -block[i, l, j]
                    coefficient = _compose(
                        block.coefficients[i, l, j], family.chart, gamma
                    )
                    braces = add(
                        braces,
                        mul(
                            -coefficient,
                            mul(gamma[i].diff("t1"), gamma[j].diff("t2")),
                        ),
                    )
            for j in range(n):
                symmetric = add(omega.coefficients[l, j], omega.coefficients[j, l])
                coefficient = _compose(symmetric, family.chart, gamma)
                braces = add(
                    braces,
                    mul(-coefficient, gamma[j].diff("t1").diff("t2")),
                )
            total = add(total, mul(v[l], braces))
        fn = compile_to_numpy(total, ("t1", "t2"))
        return rule.integrate_2d(fn)
    raise ValueError("first variation is defined for ranks 1 and 2")


def first_variation_numeric(
    omega: TensorField,
    family: CurveFamily | SurfaceFamily,
    rule: QuadratureRule = QuadratureRule(),
    h: float = 1e-3,
    richardson: bool = True,
) -> float:
    """Central-difference derivative of the functional at s = 0.

    With ``richardson`` the h and h/2 estimates are combined, cancelling the
    leading truncation term.
    """
    if not (0.0 < h < family.s_halfwidth):
        raise ValueError("step h must lie inside the family's s interval")
    if omega.rank == 1:
        value = functional_curve
    elif omega.rank == 2:
        value = functional_surface
    else:
        raise ValueError("first variation is defined for ranks 1 and 2")

    def central(step: float) -> float:
        return (
            value(omega, family, rule, s=step) - value(omega, family, rule, s=-step)
        ) / (2.0 * step)

    coarse = central(h)
    if not richardson:
        return coarse
    fine = central(h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def euler_lagrange_residual(
    omega: TensorField, family: CurveFamily | SurfaceFamily
) -> list[Expr]:
    """Stationarity residuals along the base curve or square, one per axis.

    The family is extremal for every admissible variation exactly when each
    residual vanishes identically (checked by sampling in the parameters).
    """
    if omega.rank == 1:
        if not isinstance(family, CurveFamily):
            raise ValueError("rank-1 tensors pair with curve families")
        block = coboundary_tensor_part(omega)
        gamma = family.at_s(0.0)
        n = family.chart.dimension
        residuals = []
        for l in range(n):
            total = ZERO
            for i in range(n):
                coefficient = _compose(block.coefficients[l, i], family.chart, gamma)
                total = add(total, mul(coefficient, gamma[i].diff("t")))
            residuals.append(total)
        return residuals
    if omega.rank == 2:
        if not isinstance(family, SurfaceFamily):
            raise ValueError("rank-2 tensors pair with surface families")
        block = coboundary_tensor_part(omega)
        gamma = family.at_s(0.0)
        n = family.chart.dimension
        residuals = []
        for l in range(n):
            total = ZERO
            for i in range(n):
                for j in range(n):
                    coefficient = _compose(
                        block.coefficients[i, l, j], family.chart, gamma
                    )
                    total = add(
                        total,
                        mul(coefficient, mul(gamma[i].diff("t1"), gamma[j].diff("t2"))),
                    )
            for j in range(n):
                symmetric = add(omega.coefficients[l, j], omega.coefficients[j, l])
                coefficient = _compose(symmetric, family.chart, gamma)
                total = add(total, mul(coefficient, gamma[j].diff("t1").diff("t2")))
            residuals.append(total)
        return residuals
    raise ValueError("stationarity residuals are defined for ranks 1 and 2")


def geodesic_residual(g: MetricTensor, family: CurveFamily) -> list[Expr]:
    """Components of the acceleration of the base curve, expressions in t.

    Component m is the second t-derivative plus the connection contraction
    of the velocity with itself; all components vanish on geodesics.
    """
    if g.chart != family.chart:
        raise ValueError("metric and curve live on different charts")
    gamma = family.at_s(0.0)
    velocity = [c.diff("t") for c in gamma]
    coefficients = g.connection().coefficients
    n = g.dimension
    residuals = []
    for m in range(n):
        total = velocity[m].diff("t")
        for i in range(n):
            for j in range(n):
                gamma_m_ij = _compose(coefficients[m, i, j], g.chart, gamma)
                total = add(total, mul(gamma_m_ij, mul(velocity[i], velocity[j])))
        residuals.append(total)
    return residuals


def geodesic_pairing_residuals(
    g: MetricTensor,
    family: CurveFamily,
    extension: VectorField,
    variation: VectorField,
    t_samples: Sequence[float],
) -> list[tuple[float, float]]:
    """Check d g(X, Y, X) / 2 = <Y, acceleration> along the curve.

    ``extension`` must be a chart field restricting to the curve velocity
    (verified at the sampled parameters; the library never invents an
    extension), ``variation`` plays the role of Y.  Returns (lhs, rhs) pairs
    at the sampled t values.
    """
    if extension.chart != g.chart or variation.chart != g.chart:
        raise ValueError("fields live on a different chart")
    gamma = family.at_s(0.0)
    velocity = [c.diff("t") for c in gamma]
    acceleration = geodesic_residual(g, family)
    d_g = g.local_coboundary()
    pairs = []
    for t in t_samples:
        env_t = {"t": float(t)}
        point = np.array([c.evaluate(env_t) for c in gamma])
        velocity_value = np.array([c.evaluate(env_t) for c in velocity])
        extension_value = extension.value(point)
        if not np.allclose(extension_value, velocity_value, atol=1e-8):
            raise ValueError(
                f"extension does not restrict to the curve velocity at t={t}"
            )
        lhs = 0.5 * apply_local(d_g, (extension, variation, extension), point)
        env_chart = g.chart.env(point)
        accel_value = np.array([a.evaluate(env_t) for a in acceleration])
        y_value = variation.value(point)
        metric_values = evaluate_grid(g.tensor.coefficients, env_chart)
        rhs = float(y_value @ metric_values @ accel_value)
        pairs.append((lhs, rhs))
    return pairs

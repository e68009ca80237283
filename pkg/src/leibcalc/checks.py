"""Named verification checks for the `leib verify` command and test suite.

Each check runs one identity sweep against a scene and returns structured
results (name, the identity being checked, the worst residual, tolerance,
pass/fail, sample count, seed).  Checks are deterministic given the scene and
seed: each draws from its own generator seeded by (seed, crc32(check name)),
so neither check ordering nor suite selection changes any result.

Detector checks (the symmetric-tensor flag and the corrupted-connection
fixture) invert the usual direction: they pass when the reported residual
EXCEEDS the threshold, as recorded in their notes.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from .coboundary import (
    DerivTerm,
    apply_local,
    cochain_from_tensor,
    coboundary_tensor_part,
    d_squared_residual,
    global_coboundary,
    kform_obstructions,
    local_coboundary,
)
from .expr import ZERO, Constant, Variable, add, call, mul, sub
from .fields import TensorField, VectorField, bump_field, evaluate_grid
from .generators import (
    monomial_coordinate_field,
    random_curve_family,
    random_polynomial,
    random_surface_family,
    random_tensor,
    random_vector_field,
)
from .geometry import (
    covariant_derivative_tensor,
    curvature_identity_residuals,
    dR_formula,
    metric_coboundary_check,
)
from .scene import Scene
from .variation import (
    CurveFamily,
    QuadratureRule,
    first_variation_exact,
    first_variation_numeric,
    geodesic_pairing_residuals,
    geodesic_residual,
)

__all__ = ["CheckConfig", "CheckResult", "run_suite", "SUITES", "CHECK_NAMES"]


@dataclass(frozen=True)
class CheckConfig:
    samples: int = 50
    seed: int = 42
    tol: float = 1e-9
    fd_step: float = 1e-3
    quad_nodes: int = 32


@dataclass
class CheckResult:
    name: str
    identity: str
    max_residual: float
    tolerance: float
    passed: bool
    samples: int
    seed: int
    skipped: str | None = None
    note: str = ""

    def record(self) -> dict:
        return {
            "name": self.name,
            "identity": self.identity,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "samples": self.samples,
            "seed": self.seed,
            "skipped": self.skipped,
            "note": self.note,
        }


def _rng(cfg: CheckConfig, name: str, salt: int = 0) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, zlib.crc32(name.encode()), salt])


def _points(scene: Scene, count: int, rng) -> np.ndarray:
    return scene.chart.sample_points(count, rng, inset=scene.sampling.inset)


def _relative(delta: float, value: float) -> float:
    return abs(delta) / (1.0 + abs(value))


# ---------------------------------------------------------------------------
# coboundary checks


def check_local_global_equivalence(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """Structured local coboundary against the cochain formula, ranks 1-3."""
    name = "local_global_equivalence"
    rng = _rng(cfg, name)
    chart = scene.chart
    worst = 0.0
    cases = 0
    for rank in (1, 2, 3):
        for _ in range(cfg.samples):
            omega = random_tensor(rng, chart, rank)
            fields = [random_vector_field(rng, chart) for _ in range(rank + 1)]
            point = _points(scene, 1, rng)[0]
            reference = global_coboundary(cochain_from_tensor(omega)).value(
                fields, point
            )
            local = apply_local(local_coboundary(omega), fields, point)
            worst = max(worst, _relative(local - reference, reference))
            cases += 1
    return [
        CheckResult(
            name,
            "local tensor-part plus derivative terms equals the cochain coboundary",
            worst,
            cfg.tol,
            worst <= cfg.tol,
            cases,
            cfg.seed,
        )
    ]


_EXPECTED_RANK2_TERMS = (
    # (contraction slot, derivative slot, sign, coefficient position fed by the
    #  derivative, positions carried by the remaining slots)
    (1, 3, 1, 2, (1,)),
    (1, 3, 1, 1, (2,)),
)


def _term_descriptor(term: DerivTerm):
    return (
        term.contraction_slot,
        term.derivative_slot,
        term.sign,
        term.q_position,
        term.passthrough_positions,
    )


def check_two_tensor_pin(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """Rank-2 expansion: three signed insertions plus two derivative terms."""
    name = "two_tensor_pin"
    rng = _rng(cfg, name)
    chart = scene.chart
    n = chart.dimension
    names = chart.coordinates

    omega = random_tensor(rng, chart, 2)
    expansion = local_coboundary(omega)
    structure_ok = sorted(map(_term_descriptor, expansion.deriv_terms)) == sorted(
        _EXPECTED_RANK2_TERMS
    )
    # coefficient grids: keeping the order pairs the second position with the
    # derivative; pushing the first factor right pairs the first position.
    for term in expansion.deriv_terms:
        expected_axes = (1, 0) if term.q_position == 2 else (0, 1)
        expected = np.transpose(omega.coefficients, expected_axes)
        for index in np.ndindex(expected.shape):
            if term.coefficients[index] != expected[index]:
                structure_ok = False

    # the tensor part entry (i, l, j) must evaluate to
    # d a_lj / dx^i - d a_ij / dx^l + d a_il / dx^j
    worst = 0.0
    points = _points(scene, 10, rng)
    for i in range(n):
        for l in range(n):
            for j in range(n):
                by_hand = add(
                    sub(
                        omega.coefficients[l, j].diff(names[i]),
                        omega.coefficients[i, j].diff(names[l]),
                    ),
                    omega.coefficients[i, l].diff(names[j]),
                )
                entry = expansion.tensor_part.coefficients[i, l, j]
                for p in points:
                    env = chart.env(p)
                    worst = max(
                        worst, abs(entry.evaluate(env) - by_hand.evaluate(env))
                    )

    cases = 0
    for _ in range(cfg.samples):
        omega = random_tensor(rng, chart, 2)
        fields = [random_vector_field(rng, chart) for _ in range(3)]
        point = _points(scene, 1, rng)[0]
        reference = global_coboundary(cochain_from_tensor(omega)).value(fields, point)
        local = apply_local(local_coboundary(omega), fields, point)
        worst = max(worst, _relative(local - reference, reference))
        cases += 1
    return [
        CheckResult(
            name,
            "rank-2 coboundary has the five-term structure and matches the cochain formula",
            worst,
            cfg.tol,
            structure_ok and worst <= cfg.tol,
            cases,
            cfg.seed,
            note="" if structure_ok else "derivative-term structure mismatch",
        )
    ]


def check_one_form_de_rham(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """Rank-1 coboundary is the antisymmetrized coefficient derivative."""
    name = "one_form_de_rham"
    rng = _rng(cfg, name)
    chart = scene.chart
    n = chart.dimension
    names = chart.coordinates
    worst = 0.0
    cases = 0
    for _ in range(max(1, cfg.samples // 5)):
        omega = random_tensor(rng, chart, 1)
        d_omega = global_coboundary(cochain_from_tensor(omega))
        fields = chart.coordinate_fields()
        points = _points(scene, 5, rng)
        for j in range(n):
            for i in range(n):
                expected = sub(
                    omega.coefficients[i].diff(names[j]),
                    omega.coefficients[j].diff(names[i]),
                )
                value_field = d_omega(fields[j], fields[i])
                for p in points:
                    env = chart.env(p)
                    worst = max(
                        worst,
                        abs(value_field.value(p) - expected.evaluate(env)),
                    )
                    cases += 1
    # exact one-forms are closed
    for _ in range(max(1, cfg.samples // 5)):
        potential = random_polynomial(rng, chart)
        exact = TensorField(
            chart,
            np.array([potential.diff(v) for v in names], dtype=object),
        )
        part = coboundary_tensor_part(exact)
        d_exact = global_coboundary(cochain_from_tensor(exact))
        fields = [random_vector_field(rng, chart) for _ in range(2)]
        for p in _points(scene, 5, rng):
            worst = max(worst, float(np.abs(part.values_at(p)).max()))
            worst = max(worst, abs(d_exact.value(fields, p)))
            cases += 1
    return [
        CheckResult(
            name,
            "rank-1 coboundary antisymmetrizes the coefficient partials; exact forms are closed",
            worst,
            cfg.tol,
            worst <= cfg.tol,
            cases,
            cfg.seed,
        )
    ]


def check_d_squared(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """Applying the coboundary twice gives zero (30 cases, ranks 0-2)."""
    name = "d_squared_zero"
    rng = _rng(cfg, name)
    chart = scene.chart
    worst = 0.0
    cases = 0
    for rank in (0, 1, 2):
        for _ in range(10):
            omega = random_tensor(rng, chart, rank)
            fields = [random_vector_field(rng, chart) for _ in range(rank + 2)]
            point = _points(scene, 1, rng)[0]
            worst = max(worst, abs(d_squared_residual(omega, fields, point)))
            cases += 1
    return [
        CheckResult(
            name,
            "d(d(.)) = 0 for the cochain coboundary",
            worst,
            cfg.tol,
            worst <= cfg.tol,
            cases,
            cfg.seed,
        )
    ]


def check_locality(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """Cutoff-multiplied fields leave coboundary values at the center alone."""
    name = "locality"
    rng = _rng(cfg, name)
    chart = scene.chart
    worst = 0.0
    cases = 20
    for _ in range(cases):
        rank = int(rng.integers(1, 3))
        omega = random_tensor(rng, chart, rank)
        fields = [random_vector_field(rng, chart) for _ in range(rank + 1)]
        point = chart.sample_points(1, rng, inset=0.25)[0]
        margin = min(
            min(p - lo, hi - p) for p, (lo, hi) in zip(point, chart.domain)
        )
        r2 = 0.8 * margin
        cutoff = bump_field(chart, point, 0.5 * r2, r2)
        masked = [f.scaled(cutoff) for f in fields]
        d_omega = global_coboundary(cochain_from_tensor(omega))
        plain = d_omega.value(fields, point)
        localized = d_omega.value(masked, point)
        worst = max(worst, abs(plain - localized))
    return [
        CheckResult(
            name,
            "coboundary values at p only depend on the fields near p",
            worst,
            cfg.tol,
            worst <= cfg.tol,
            cases,
            cfg.seed,
        )
    ]


def check_cocycle_skew(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """Symmetric tensors are flagged by swap obstructions; forms pass."""
    name = "cocycle_skew"
    rng = _rng(cfg, name)
    chart = scene.chart
    n = chart.dimension
    points = _points(scene, 10, rng)

    identity = TensorField.from_nested(
        chart, 2, [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    )
    _, skew = kform_obstructions(identity)
    flagged = 0.0
    for residual in skew:
        for p in points:
            flagged = max(flagged, abs(residual.evaluate(chart.env(p))))

    grid = np.full((n, n), ZERO, dtype=object)
    grid[0, 1] = Constant(1.0)
    grid[1, 0] = Constant(-1.0)
    form = TensorField(chart, grid)
    closedness, skew = kform_obstructions(form)
    clean = 0.0
    for residual in skew:
        for p in points:
            clean = max(clean, abs(residual.evaluate(chart.env(p))))
    for p in points:
        clean = max(clean, float(np.abs(closedness.values_at(p)).max()))

    passed = flagged > 0.1 and clean <= cfg.tol
    return [
        CheckResult(
            name,
            "cocycles must be forms: swap obstructions flag symmetric tensors",
            clean,
            cfg.tol,
            passed,
            len(points),
            cfg.seed,
            note=f"symmetric-tensor obstruction {flagged:.3f} (must exceed 0.1)",
        )
    ]


# ---------------------------------------------------------------------------
# metric checks (run once per named metric)


def check_metric_christoffel(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """d g on coordinate fields equals twice the first-kind symbols."""
    name = "metric_christoffel"
    results = []
    for metric_name in sorted(scene.metrics):
        g = scene.metrics[metric_name]
        rng = _rng(cfg, name, zlib.crc32(metric_name.encode()))
        chart = g.chart
        n = chart.dimension
        part = coboundary_tensor_part(g.tensor)
        first = g.christoffel_first()
        worst = 0.0
        points = _points(scene, cfg.samples, rng)
        for p in points:
            env = chart.env(p)
            part_values = evaluate_grid(part.coefficients, env)
            first_values = evaluate_grid(first.symbols, env)
            for i in range(n):
                for l in range(n):
                    for j in range(n):
                        worst = max(
                            worst,
                            abs(part_values[i, l, j] - 2.0 * first_values[i, j, l]),
                        )
        results.append(
            CheckResult(
                f"{name}:{metric_name}",
                "d g on coordinate fields is twice the first-kind Christoffel symbol",
                worst,
                cfg.tol,
                worst <= cfg.tol,
                len(points),
                cfg.seed,
            )
        )
    return results


def check_metric_connection(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """d g(X, Y, Z) = 2 <Y, nabla_X Z> for arbitrary fields."""
    name = "metric_connection"
    results = []
    for metric_name in sorted(scene.metrics):
        g = scene.metrics[metric_name]
        rng = _rng(cfg, name, zlib.crc32(metric_name.encode()))
        chart = g.chart
        worst = 0.0
        for case in range(cfg.samples):
            if case % 2 == 0:
                fields = [random_vector_field(rng, chart) for _ in range(3)]
            else:
                fields = [monomial_coordinate_field(rng, chart) for _ in range(3)]
            point = _points(scene, 1, rng)[0]
            lhs, rhs, residual = metric_coboundary_check(g, *fields, point)
            worst = max(worst, _relative(residual, rhs))
        results.append(
            CheckResult(
                f"{name}:{metric_name}",
                "d g(X, Y, Z) = 2 <Y, nabla_X Z>",
                worst,
                cfg.tol,
                worst <= cfg.tol,
                cfg.samples,
                cfg.seed,
            )
        )
    return results


def check_curvature_identities(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """Curvature swap symmetries, both Bianchi cyclic sums, nabla g = 0."""
    name = "curvature_identities"
    results = []
    for metric_name in sorted(scene.metrics):
        g = scene.metrics[metric_name]
        rng = _rng(cfg, name, zlib.crc32(metric_name.encode()))
        chart = g.chart
        nabla_g = covariant_derivative_tensor(g, g.tensor)
        worst = 0.0
        cases = max(1, cfg.samples // 5)
        for _ in range(cases):
            fields = [random_vector_field(rng, chart, max_degree=1) for _ in range(5)]
            point = _points(scene, 1, rng)[0]
            residuals = curvature_identity_residuals(g, fields, point)
            worst = max(worst, max(abs(v) for v in residuals.values()))
            worst = max(worst, float(np.abs(nabla_g.values_at(point)).max()))
        results.append(
            CheckResult(
                f"{name}:{metric_name}",
                "curvature swap symmetries, Bianchi cyclic sums, nabla g = 0",
                worst,
                cfg.tol,
                worst <= cfg.tol,
                cases,
                cfg.seed,
            )
        )
    return results


def check_sphere_curvature_value(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """|R(d1, d2, d2, d1)| = 1 at the equator of the unit sphere."""
    name = "sphere_curvature_value"
    g = scene.metrics.get("sphere")
    if g is None:
        return [
            CheckResult(
                name,
                "unit-sphere curvature component at the equator equals 1",
                0.0,
                cfg.tol,
                True,
                0,
                cfg.seed,
                skipped="scene does not define a metric named 'sphere'",
            )
        ]
    chart = g.chart
    point = np.array(
        [math.pi / 2.0, 0.5 * (chart.domain[1][0] + chart.domain[1][1])]
    )
    value = g.riemann().coefficients[0, 1, 1, 0].evaluate(chart.env(point))
    residual = abs(abs(value) - 1.0)
    return [
        CheckResult(
            name,
            "unit-sphere curvature component at the equator equals 1",
            residual,
            cfg.tol,
            residual <= cfg.tol,
            1,
            cfg.seed,
            note=f"signed value {value:+.12f} (positive in this sign convention)",
        )
    ]


def check_corruption_detector(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """A perturbed connection must break metric compatibility detectably."""
    name = "corruption_detector"
    results = []
    threshold = 1e-3
    for metric_name in sorted(scene.metrics):
        g = scene.metrics[metric_name]
        rng = _rng(cfg, name, zlib.crc32(metric_name.encode()))
        corrupted = g.connection().perturbed(0, 0, 0, 0.05)
        nabla_g = covariant_derivative_tensor(g, g.tensor, connection=corrupted)
        detected = 0.0
        for p in _points(scene, 10, rng):
            detected = max(detected, float(np.abs(nabla_g.values_at(p)).max()))
        results.append(
            CheckResult(
                f"{name}:{metric_name}",
                "nabla g residuals expose a non-Levi-Civita connection",
                detected,
                threshold,
                detected > threshold,
                10,
                cfg.seed,
                note="detector: residual must exceed the threshold",
            )
        )
    return results


def check_curvature_coboundary(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """dR via the covariant derivative against the cochain formula."""
    name = "curvature_coboundary"
    results = []
    for metric_name in sorted(scene.metrics):
        g = scene.metrics[metric_name]
        rng = _rng(cfg, name, zlib.crc32(metric_name.encode()))
        chart = g.chart
        oracle = global_coboundary(cochain_from_tensor(g.riemann()))
        worst = 0.0
        for _ in range(cfg.samples):
            fields = [monomial_coordinate_field(rng, chart) for _ in range(5)]
            point = _points(scene, 1, rng)[0]
            direct = dR_formula(g, *fields, point)
            reference = oracle.value(fields, point)
            worst = max(worst, _relative(direct - reference, reference))
        results.append(
            CheckResult(
                f"{name}:{metric_name}",
                "dR = -(nabla_Z R) plus eight curvature corrections",
                worst,
                cfg.tol,
                worst <= cfg.tol,
                cfg.samples,
                cfg.seed,
            )
        )
    return results


# ---------------------------------------------------------------------------
# variation checks


def check_first_variation_curves(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """Exact versus central-difference first variation for curve families."""
    name = "first_variation_curves"
    rng = _rng(cfg, name)
    chart = scene.chart
    rule = QuadratureRule(cfg.quad_nodes)
    tolerance = 1e-5
    worst = 0.0
    cases = 20
    for _ in range(cases):
        omega = random_tensor(rng, chart, 1)
        family = random_curve_family(rng, chart)
        exact = first_variation_exact(omega, family, rule)
        numeric = first_variation_numeric(omega, family, rule, h=cfg.fd_step)
        worst = max(worst, _relative(exact - numeric, exact))
    return [
        CheckResult(
            name,
            "exact first-variation integrand matches central differences (curves)",
            worst,
            tolerance,
            worst <= tolerance,
            cases,
            cfg.seed,
        )
    ]


def check_first_variation_closed_form(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """The rotation form over a straight segment: dJ/ds = -4/pi exactly."""
    name = "first_variation_closed_form"
    chart = scene.chart
    rule = QuadratureRule(cfg.quad_nodes)
    if chart.dimension < 2:
        return [
            CheckResult(
                name,
                "closed-form first variation -4/pi",
                0.0,
                1e-6,
                True,
                0,
                cfg.seed,
                skipped="needs a chart of dimension at least 2",
            )
        ]
    c1 = 0.5 * (chart.domain[0][0] + chart.domain[0][1])
    c2 = 0.5 * (chart.domain[1][0] + chart.domain[1][1])
    if (chart.domain[0][1] - chart.domain[0][0]) < 1.2 or (
        chart.domain[1][1] - chart.domain[1][0]
    ) < 1.2:
        return [
            CheckResult(
                name,
                "closed-form first variation -4/pi",
                0.0,
                1e-6,
                True,
                0,
                cfg.seed,
                skipped="chart box too small for the unit-width segment",
            )
        ]
    x1, x2 = Variable(chart.coordinates[0]), Variable(chart.coordinates[1])
    grid = np.full((chart.dimension,), ZERO, dtype=object)
    grid[0] = -(x2 - Constant(c2))
    grid[1] = x1 - Constant(c1)
    omega = TensorField(chart, grid)
    t, s = Variable("t"), Variable("s")
    components = [ZERO] * chart.dimension
    components[0] = add(Constant(c1 - 0.5), t)
    components[1] = add(Constant(c2), mul(s, call("sin", mul(Constant(math.pi), t))))
    family = CurveFamily(chart, tuple(components), s_halfwidth=0.5)
    exact = first_variation_exact(omega, family, rule)
    numeric = first_variation_numeric(omega, family, rule, h=cfg.fd_step)
    target = -4.0 / math.pi
    residual = max(abs(exact - target), abs(numeric - target))
    return [
        CheckResult(
            name,
            "closed-form first variation -4/pi",
            residual,
            1e-6,
            residual <= 1e-6,
            1,
            cfg.seed,
            note=f"exact {exact:.10f}, numeric {numeric:.10f}",
        )
    ]


def check_first_variation_surfaces(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """Exact versus central-difference first variation for square families."""
    name = "first_variation_surfaces"
    rng = _rng(cfg, name)
    chart = scene.chart
    rule = QuadratureRule(cfg.quad_nodes)
    tolerance = 1e-5
    worst = 0.0
    cases = 20
    for _ in range(cases):
        omega = random_tensor(rng, chart, 2)
        family = random_surface_family(rng, chart)
        exact = first_variation_exact(omega, family, rule)
        numeric = first_variation_numeric(omega, family, rule, h=cfg.fd_step)
        worst = max(worst, _relative(exact - numeric, exact))
    return [
        CheckResult(
            name,
            "exact first-variation integrand matches central differences (squares)",
            worst,
            tolerance,
            worst <= tolerance,
            cases,
            cfg.seed,
        )
    ]


def check_first_variation_constant(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """Constant tensors over affine squares are stationary to roundoff."""
    name = "first_variation_constant"
    rng = _rng(cfg, name)
    chart = scene.chart
    rule = QuadratureRule(cfg.quad_nodes)
    tolerance = 1e-10
    worst = 0.0
    cases = 10
    n = chart.dimension
    for _ in range(cases):
        grid = np.empty((n, n), dtype=object)
        for index in np.ndindex(grid.shape):
            grid[index] = Constant(float(rng.integers(-2, 3)))
        omega = TensorField(chart, grid)
        family = random_surface_family(rng, chart, affine_base=True)
        exact = first_variation_exact(omega, family, rule)
        numeric = first_variation_numeric(omega, family, rule, h=cfg.fd_step)
        worst = max(worst, abs(exact), abs(numeric))
    return [
        CheckResult(
            name,
            "constant tensors over affine squares have vanishing first variation",
            worst,
            tolerance,
            worst <= tolerance,
            cases,
            cfg.seed,
        )
    ]


def check_geodesics(scene: Scene, cfg: CheckConfig) -> list[CheckResult]:
    """Geodesic residuals and the arc-length pairing, per metric.

    Uses the scene's conventional fixtures: the curve 'geodesic0' (expected
    residual ~ 0), 'nongeodesic0' (expected residual > 0.1), the field 'ext0'
    extending the geodesic velocity, and 'vary0' as the variation direction.
    """
    name = "geodesics"
    results = []
    t_samples = np.linspace(0.05, 0.95, 13)
    for metric_name in sorted(scene.metrics):
        g = scene.metrics[metric_name]
        missing = [
            key
            for key, table in (
                ("geodesic0", scene.curves),
                ("nongeodesic0", scene.curves),
                ("ext0", scene.fields),
                ("vary0", scene.fields),
            )
            if key not in table
        ]
        if missing:
            results.append(
                CheckResult(
                    f"{name}:{metric_name}",
                    "geodesic residuals and the arc-length pairing",
                    0.0,
                    cfg.tol,
                    True,
                    0,
                    cfg.seed,
                    skipped=f"scene lacks fixtures: {', '.join(missing)}",
                )
            )
            continue
        geodesic = scene.curves["geodesic0"]
        crooked = scene.curves["nongeodesic0"]
        straight = 0.0
        for residual in geodesic_residual(g, geodesic):
            for t in t_samples:
                straight = max(straight, abs(residual.evaluate({"t": float(t)})))
        bent = 0.0
        for residual in geodesic_residual(g, crooked):
            for t in t_samples:
                bent = max(bent, abs(residual.evaluate({"t": float(t)})))
        pairing = 0.0
        pairs = geodesic_pairing_residuals(
            g, geodesic, scene.fields["ext0"], scene.fields["vary0"], t_samples
        )
        for lhs, rhs in pairs:
            pairing = max(pairing, abs(lhs - rhs))
        worst = max(straight, pairing)
        results.append(
            CheckResult(
                f"{name}:{metric_name}",
                "geodesic residuals vanish; the coboundary pairing matches; "
                "non-geodesics are flagged",
                worst,
                cfg.tol,
                worst <= cfg.tol and bent > 0.1,
                len(t_samples),
                cfg.seed,
                note=f"non-geodesic residual {bent:.3f} (must exceed 0.1)",
            )
        )
    return results


# ---------------------------------------------------------------------------
# registry

_CHECKS = (
    ("local_global_equivalence", "leibniz", check_local_global_equivalence),
    ("two_tensor_pin", "leibniz", check_two_tensor_pin),
    ("one_form_de_rham", "leibniz", check_one_form_de_rham),
    ("d_squared_zero", "leibniz", check_d_squared),
    ("locality", "leibniz", check_locality),
    ("cocycle_skew", "leibniz", check_cocycle_skew),
    ("metric_christoffel", "riemann", check_metric_christoffel),
    ("metric_connection", "riemann", check_metric_connection),
    ("curvature_identities", "riemann", check_curvature_identities),
    ("sphere_curvature_value", "riemann", check_sphere_curvature_value),
    ("corruption_detector", "riemann", check_corruption_detector),
    ("curvature_coboundary", "riemann", check_curvature_coboundary),
    ("first_variation_curves", "variation", check_first_variation_curves),
    ("first_variation_closed_form", "variation", check_first_variation_closed_form),
    ("first_variation_surfaces", "variation", check_first_variation_surfaces),
    ("first_variation_constant", "variation", check_first_variation_constant),
    ("geodesics", "variation", check_geodesics),
)

SUITES = ("all", "leibniz", "riemann", "variation")
CHECK_NAMES = tuple(name for name, _, _ in _CHECKS)


def run_suite(scene: Scene, suite: str = "all", cfg: CheckConfig | None = None) -> list[CheckResult]:
    """Run one suite (or all) against a scene, in registry order."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite '{suite}' (choose from {SUITES})")
    cfg = cfg or CheckConfig()
    results: list[CheckResult] = []
    for _, group, fn in _CHECKS:
        if suite != "all" and group != suite:
            continue
        results.extend(fn(scene, cfg))
    return results

"""The ``leib`` command line: scene loading, dispatch, JSON reports.

Reports are machine-readable JSON on stdout; a short human summary goes to
stderr.  Exit codes: 0 on success, 1 on verification failure, 2 on usage or
scene errors.  Given the same scene, seed and flags, the report is
byte-identical apart from the wall-time field.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .checks import CheckConfig, SUITES, run_suite
from .coboundary import (
    apply_local,
    cochain_from_tensor,
    global_coboundary,
    local_coboundary,
)
from .expr import EvalError
from .generators import random_vector_field
from .geometry import curvature_identity_residuals
from .scene import Scene, SceneError, load_scene
from .variation import (
    QuadratureRule,
    euler_lagrange_residual,
    first_variation_exact,
    first_variation_numeric,
    functional_curve,
    functional_surface,
)

__all__ = ["main"]


class UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leib",
        description="Coordinate-chart tensor calculus: coboundaries, curvature, variations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scene", required=True, help="scene file path or bundled name")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--samples", type=int, default=50)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--fd-step", type=float, default=1e-3)
        p.add_argument("--quad-nodes", type=int, default=32)

    p = sub.add_parser("christoffel", help="first-kind symbols and connection coefficients")
    common(p)
    p.add_argument("--metric", help="metric name (defaults to the only one)")

    p = sub.add_parser("coboundary", help="coboundary structure or pointwise value")
    common(p)
    p.add_argument("--tensor", help="tensor name (metric names also resolve)")
    p.add_argument("--metric", help="alias for --tensor, for metric coboundaries")
    p.add_argument("--fields", help="comma-separated field names (d1..dn built in)")
    p.add_argument("--point", help="comma-separated coordinates")

    p = sub.add_parser("curvature", help="curvature components and identity residuals")
    common(p)
    p.add_argument("--metric", help="metric name (defaults to the only one)")
    p.add_argument("--point", help="comma-separated coordinates")

    p = sub.add_parser("variation", help="functional value and first variations")
    common(p)
    p.add_argument("--tensor", required=True)
    p.add_argument("--family", required=True, help="curve or surface name")

    p = sub.add_parser("verify", help="run the verification suites")
    common(p)
    p.add_argument("--suite", choices=SUITES, default="all")
    return parser


def _pick_metric(scene: Scene, name: str | None):
    if name is not None:
        if name not in scene.metrics:
            raise UsageError(
                f"unknown metric '{name}' (scene has: {', '.join(sorted(scene.metrics)) or 'none'})"
            )
        return name, scene.metrics[name]
    if len(scene.metrics) == 1:
        return next(iter(scene.metrics.items()))
    raise UsageError(
        f"--metric required (scene has: {', '.join(sorted(scene.metrics)) or 'none'})"
    )


def _parse_point(scene: Scene, text: str) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse point '{text}'") from None
    try:
        return scene.chart.validate_point(values)
    except ValueError as error:
        raise UsageError(str(error)) from None


def _grid_strings(grid):
    if not isinstance(grid, np.ndarray):
        return str(grid)
    if grid.ndim == 0:
        return str(grid[()])
    return [_grid_strings(grid[i]) for i in range(grid.shape[0])]


def _cmd_christoffel(scene: Scene, args) -> tuple[dict, list]:
    name, metric = _pick_metric(scene, args.metric)
    first = metric.christoffel_first()
    connection = metric.connection()
    results = {
        "metric": name,
        "first_kind": _grid_strings(first.symbols),
        "connection": _grid_strings(connection.coefficients),
        "index_order": {
            "first_kind": "[i][j][l] for [ij, l]",
            "connection": "[m][i][j] for the m-th output component",
        },
    }
    summary = [f"christoffel symbols of '{name}' on {scene.path}"]
    return results, summary


def _cmd_coboundary(scene: Scene, args) -> tuple[dict, list]:
    name = args.tensor or args.metric
    if not name:
        raise UsageError("--tensor (or --metric) is required")
    try:
        omega = scene.lookup_tensor(name)
    except SceneError as error:
        raise UsageError(str(error)) from None
    if name in scene.metrics:
        expansion = scene.metrics[name].local_coboundary()
    else:
        expansion = local_coboundary(omega)
    results: dict = {"tensor": name, "rank": omega.rank}
    summary = [f"coboundary of '{name}' (rank {omega.rank})"]
    if args.fields or args.point:
        if not (args.fields and args.point):
            raise UsageError("--fields and --point must be given together")
        field_names = [f.strip() for f in args.fields.split(",")]
        if len(field_names) != omega.rank + 1:
            raise UsageError(
                f"coboundary of a rank-{omega.rank} tensor needs {omega.rank + 1} fields"
            )
        try:
            fields = [scene.lookup_field(f) for f in field_names]
        except SceneError as error:
            raise UsageError(str(error)) from None
        point = _parse_point(scene, args.point)
        local_value = apply_local(expansion, fields, point)
        global_value = global_coboundary(cochain_from_tensor(omega)).value(
            fields, point
        )
        results.update(
            {
                "fields": field_names,
                "point": [float(v) for v in point],
                "value": local_value,
                "global_value": global_value,
                "route_difference": local_value - global_value,
            }
        )
        summary.append(f"value at point: {local_value:.12g}")
    else:
        results.update(
            {
                "tensor_part": _grid_strings(expansion.tensor_part.coefficients),
                "deriv_terms": [
                    {
                        "contraction_slot": term.contraction_slot,
                        "derivative_slot": term.derivative_slot,
                        "sign": term.sign,
                        "derived_position": term.q_position,
                        "passthrough_positions": list(term.passthrough_positions),
                        "coefficients": _grid_strings(term.coefficients),
                    }
                    for term in expansion.deriv_terms
                ],
            }
        )
        summary.append(
            f"tensor part rank {expansion.rank}, {len(expansion.deriv_terms)} derivative terms"
        )
    return results, summary


def _cmd_curvature(scene: Scene, args) -> tuple[dict, list]:
    name, metric = _pick_metric(scene, args.metric)
    riemann = metric.riemann()
    results: dict = {
        "metric": name,
        "components": _grid_strings(riemann.coefficients),
        "index_order": "[i][j][k][l] for R(d_i, d_j, d_k, d_l)",
    }
    rng = np.random.default_rng(args.seed)
    points = (
        [_parse_point(scene, args.point)]
        if args.point
        else scene.chart.sample_points(5, rng, inset=scene.sampling.inset)
    )
    worst: dict[str, float] = {}
    for p in points:
        fields = [random_vector_field(rng, scene.chart, max_degree=1) for _ in range(5)]
        for key, value in curvature_identity_residuals(metric, fields, p).items():
            worst[key] = max(worst.get(key, 0.0), abs(value))
    results["identity_residuals"] = {k: worst[k] for k in sorted(worst)}
    summary = [
        f"curvature of '{name}', worst identity residual "
        f"{max(worst.values()):.3e}"
    ]
    return results, summary


def _cmd_variation(scene: Scene, args) -> tuple[dict, list]:
    try:
        omega = scene.lookup_tensor(args.tensor)
    except SceneError as error:
        raise UsageError(str(error)) from None
    rule = QuadratureRule(args.quad_nodes)
    if args.family in scene.curves:
        family = scene.curves[args.family]
        if omega.rank != 1:
            raise UsageError("curve families pair with rank-1 tensors")
        value = functional_curve(omega, family, rule)
    elif args.family in scene.surfaces:
        family = scene.surfaces[args.family]
        if omega.rank != 2:
            raise UsageError("surface families pair with rank-2 tensors")
        value = functional_surface(omega, family, rule)
    else:
        raise UsageError(f"unknown family '{args.family}'")
    exact = first_variation_exact(omega, family, rule)
    numeric = first_variation_numeric(omega, family, rule, h=args.fd_step)
    residuals = euler_lagrange_residual(omega, family)
    if args.family in scene.curves:
        grid = [{"t": float(t)} for t in np.linspace(0.05, 0.95, 13)]
    else:
        grid = [
            {"t1": float(a), "t2": float(b)}
            for a in np.linspace(0.1, 0.9, 5)
            for b in np.linspace(0.1, 0.9, 5)
        ]
    stationarity = max(
        abs(r.evaluate(env)) for r in residuals for env in grid
    )
    results = {
        "tensor": args.tensor,
        "family": args.family,
        "functional": value,
        "first_variation_exact": exact,
        "first_variation_numeric": numeric,
        "stationarity_residual_max": stationarity,
    }
    summary = [
        f"J = {value:.12g}, dJ/ds exact {exact:.6g} vs numeric {numeric:.6g}",
    ]
    return results, summary


def _cmd_verify(scene: Scene, args) -> tuple[dict, list, bool]:
    cfg = CheckConfig(
        samples=args.samples,
        seed=args.seed,
        tol=args.tol,
        fd_step=args.fd_step,
        quad_nodes=args.quad_nodes,
    )
    checks = run_suite(scene, args.suite, cfg)
    failed = [c for c in checks if not c.passed and not c.skipped]
    skipped = [c for c in checks if c.skipped]
    summary = []
    for c in checks:
        status = "SKIP" if c.skipped else ("PASS" if c.passed else "FAIL")
        summary.append(
            f"[{status}] {c.name}: max residual {c.max_residual:.3e}"
            f" (tol {c.tolerance:.1e})"
            + (f" - {c.skipped}" if c.skipped else "")
        )
    summary.append(
        f"{len(checks) - len(failed) - len(skipped)} passed, "
        f"{len(failed)} failed, {len(skipped)} skipped"
    )
    results = {"suite": args.suite, "checks": [c.record() for c in checks]}
    return results, summary, not failed


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_info:
        return 2 if exit_info.code not in (0, None) else 0
    started = time.perf_counter()
    try:
        scene = load_scene(args.scene)
        ok = True
        if args.command == "christoffel":
            results, summary = _cmd_christoffel(scene, args)
            checks = []
        elif args.command == "coboundary":
            results, summary = _cmd_coboundary(scene, args)
            checks = []
        elif args.command == "curvature":
            results, summary = _cmd_curvature(scene, args)
            checks = []
        elif args.command == "variation":
            results, summary = _cmd_variation(scene, args)
            checks = []
        else:
            results, summary, ok = _cmd_verify(scene, args)
            checks = results.pop("checks")
    except (SceneError, UsageError, EvalError, ValueError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 2
    report = {
        "command": args.command,
        "scene_hash": scene.source_hash,
        "seed": args.seed,
        "parameters": {
            "samples": args.samples,
            "tol": args.tol,
            "fd_step": args.fd_step,
            "quad_nodes": args.quad_nodes,
        },
        "checks": checks,
        "results": results,
        "wall_time_s": round(time.perf_counter() - started, 6),
    }
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    for line in summary:
        print(line, file=sys.stderr)
    if not ok:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Scene files: a chart plus named metrics, tensors, fields and families.

A scene is a single JSON document with all mathematical content written as
expression strings, parsed and validated eagerly on load.  The bundled
fixtures live in ``leibcalc/scenes`` and can be addressed by bare name.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .expr import Expr, ParseError, parse_expr
from .fields import Chart, TensorField, VectorField
from .geometry import MetricTensor
from .variation import CurveFamily, SurfaceFamily

__all__ = ["Scene", "SamplingConfig", "SceneError", "load_scene", "bundled_scene_path"]

_TOP_LEVEL_KEYS = {
    "dimension",
    "coordinates",
    "domain",
    "metrics",
    "tensors",
    "fields",
    "curves",
    "surfaces",
    "sampling",
}


class SceneError(Exception):
    """Malformed or inconsistent scene content, with a location hint."""


@dataclass(frozen=True)
class SamplingConfig:
    seed: int = 42
    count: int = 50
    inset: float = 0.1


@dataclass
class Scene:
    chart: Chart
    metrics: dict[str, MetricTensor] = field(default_factory=dict)
    tensors: dict[str, TensorField] = field(default_factory=dict)
    fields: dict[str, VectorField] = field(default_factory=dict)
    curves: dict[str, CurveFamily] = field(default_factory=dict)
    surfaces: dict[str, SurfaceFamily] = field(default_factory=dict)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    source_hash: str = ""
    path: str = ""

    def lookup_field(self, name: str) -> VectorField:
        """Named field, or the coordinate fields under the names d1..dn."""
        if name in self.fields:
            return self.fields[name]
        if name.startswith("d") and name[1:].isdigit():
            axis = int(name[1:]) - 1
            if 0 <= axis < self.chart.dimension:
                return self.chart.coordinate_field(axis)
        raise SceneError(f"unknown field '{name}'")

    def lookup_tensor(self, name: str) -> TensorField:
        """Named tensor; metric names resolve to their underlying tensor."""
        if name in self.tensors:
            return self.tensors[name]
        if name in self.metrics:
            return self.metrics[name].tensor
        raise SceneError(f"unknown tensor '{name}'")


def bundled_scene_path(name: str) -> Path:
    """Path of a bundled fixture; accepts 'sphere' or 'sphere.scene.json'."""
    filename = name if name.endswith(".scene.json") else f"{name}.scene.json"
    root = resources.files("leibcalc") / "scenes" / filename
    with resources.as_file(root) as path:
        return Path(path)


def _parse(text, allowed, location: str) -> Expr:
    if not isinstance(text, str):
        raise SceneError(f"{location}: expected an expression string, got {text!r}")
    try:
        return parse_expr(text, allowed)
    except ParseError as error:
        raise SceneError(f"{location}: {error}") from None


def _nested_grid(chart: Chart, rank: int, nested, allowed, location: str) -> np.ndarray:
    n = chart.dimension
    grid = np.empty((n,) * rank, dtype=object)
    if rank == 0:
        grid = np.array(None, dtype=object)
        grid[()] = _parse(nested, allowed, location)
        return grid
    for index in np.ndindex(grid.shape):
        entry = nested
        where = location
        try:
            for i in index:
                entry = entry[i]
                where += f"[{i}]"
        except (IndexError, KeyError, TypeError):
            raise SceneError(
                f"{location}: coefficient grid does not have shape ({n},)*{rank}"
            ) from None
        grid[index] = _parse(entry, allowed, where)
    return grid


def _component_list(chart, names, values, allowed, location) -> tuple[Expr, ...]:
    if not isinstance(values, (list, tuple)) or len(values) != chart.dimension:
        raise SceneError(
            f"{location}: expected {chart.dimension} component strings"
        )
    return tuple(
        _parse(v, allowed, f"{location}[{i}]") for i, v in enumerate(values)
    )


def load_scene(path) -> Scene:
    """Load and eagerly validate a scene file.

    Bare names resolve to bundled fixtures.  Every expression is parsed,
    every metric is checked for symmetry and sampled nondegeneracy, and all
    grids must match the declared ranks.
    """
    path = Path(path)
    if not path.exists() and not path.suffix:
        path = bundled_scene_path(path.name)
    try:
        raw = path.read_bytes()
    except OSError as error:
        raise SceneError(f"cannot read scene file: {error}") from None
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as error:
        raise SceneError(f"invalid JSON: {error}") from None
    if not isinstance(doc, dict):
        raise SceneError("scene document must be a JSON object")
    unknown = set(doc) - _TOP_LEVEL_KEYS
    if unknown:
        raise SceneError(f"unknown top-level keys: {sorted(unknown)}")
    for key in ("dimension", "coordinates", "domain"):
        if key not in doc:
            raise SceneError(f"missing required key '{key}'")

    dimension = doc["dimension"]
    coordinates = doc["coordinates"]
    domain = doc["domain"]
    if not isinstance(dimension, int) or dimension < 1:
        raise SceneError("dimension must be a positive integer")
    if not isinstance(coordinates, list) or len(coordinates) != dimension:
        raise SceneError("coordinates must list one name per dimension")
    try:
        chart = Chart(coordinates, domain)
    except (ValueError, TypeError) as error:
        raise SceneError(f"invalid chart: {error}") from None

    coords = chart.coordinates
    scene = Scene(
        chart=chart,
        source_hash=hashlib.sha256(raw).hexdigest(),
        path=str(path),
    )

    for name, grid in (doc.get("metrics") or {}).items():
        location = f"metrics.{name}"
        parsed = _nested_grid(chart, 2, grid, coords, location)
        try:
            scene.metrics[name] = MetricTensor(TensorField(chart, parsed))
        except ValueError as error:
            raise SceneError(f"{location}: {error}") from None

    for name, spec in (doc.get("tensors") or {}).items():
        location = f"tensors.{name}"
        if not isinstance(spec, dict) or "rank" not in spec or "coefficients" not in spec:
            raise SceneError(f"{location}: expected {{rank, coefficients}}")
        rank = spec["rank"]
        if not isinstance(rank, int) or rank < 0:
            raise SceneError(f"{location}: rank must be a non-negative integer")
        parsed = _nested_grid(
            chart, rank, spec["coefficients"], coords, f"{location}.coefficients"
        )
        scene.tensors[name] = TensorField(chart, parsed)

    for name, values in (doc.get("fields") or {}).items():
        location = f"fields.{name}"
        components = _component_list(chart, coords, values, coords, location)
        scene.fields[name] = VectorField(chart, components)

    for name, values in (doc.get("curves") or {}).items():
        location = f"curves.{name}"
        components = _component_list(chart, coords, values, ("s", "t"), location)
        try:
            scene.curves[name] = CurveFamily(chart, components)
        except ValueError as error:
            raise SceneError(f"{location}: {error}") from None

    for name, values in (doc.get("surfaces") or {}).items():
        location = f"surfaces.{name}"
        components = _component_list(chart, coords, values, ("s", "t1", "t2"), location)
        try:
            scene.surfaces[name] = SurfaceFamily(chart, components)
        except ValueError as error:
            raise SceneError(f"{location}: {error}") from None

    sampling = doc.get("sampling") or {}
    if not isinstance(sampling, dict):
        raise SceneError("sampling must be an object")
    unknown = set(sampling) - {"seed", "count", "inset"}
    if unknown:
        raise SceneError(f"sampling: unknown keys {sorted(unknown)}")
    scene.sampling = SamplingConfig(
        seed=int(sampling.get("seed", 42)),
        count=int(sampling.get("count", 50)),
        inset=float(sampling.get("inset", 0.1)),
    )
    _check_unique_names(scene)
    return scene


def _check_unique_names(scene: Scene):
    seen: dict[str, str] = {}
    for kind, names in (
        ("metric", scene.metrics),
        ("tensor", scene.tensors),
        ("field", scene.fields),
        ("curve", scene.curves),
        ("surface", scene.surfaces),
    ):
        for name in names:
            if name in seen:
                raise SceneError(
                    f"name '{name}' used for both a {seen[name]} and a {kind}"
                )
            seen[name] = kind

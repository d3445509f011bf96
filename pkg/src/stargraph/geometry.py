"""Star graph geometry, grids, measures and quadrature.

A metric star graph with ``m`` edges is the disjoint union of ``m`` copies of
the half-line glued at the common origin (the vertex).  Points are addressed
by an edge index and a radius; all points of radius zero are identified.

Functions on the graph are stored as per-edge samples on a shared uniform
radial grid, optionally backed by per-edge callables so that consumers may
re-sample beyond the stored cutoff.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import (
    InvalidGraphError,
    InvalidPointError,
    NumericalInputError,
    ShapeError,
    VertexContinuityError,
)

__all__ = [
    "StarGraph",
    "StarPoint",
    "GridSpec",
    "MeasureKind",
    "StarFunction",
    "mu_density",
    "integrate_star",
    "sup_distance",
    "simpson_weights",
]

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class StarGraph:
    """Star with ``m`` half-line edges; ``truncation`` limits each edge to [0, n]."""

    m: int
    truncation: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.m, (int, np.integer)) or isinstance(self.m, bool):
            raise InvalidGraphError(f"edge count must be an integer, got {self.m!r}")
        if self.m < 1:
            raise InvalidGraphError(f"edge count must be >= 1, got {self.m}")
        if self.truncation is not None:
            if not math.isfinite(self.truncation) or self.truncation <= 0:
                raise InvalidGraphError(
                    f"truncation must be a positive finite radius, got {self.truncation}"
                )

    def contains(self, p: "StarPoint") -> bool:
        if p.edge > self.m:
            return False
        if self.truncation is not None and p.radius > self.truncation:
            return False
        return True


class StarPoint:
    """Point on a star graph: an edge index (1-based) and a radius >= 0.

    All radius-zero points compare equal regardless of edge index.
    """

    __slots__ = ("edge", "radius")

    def __init__(self, edge: int, radius: float):
        if not isinstance(edge, (int, np.integer)) or isinstance(edge, bool):
            raise InvalidPointError(f"edge index must be an integer, got {edge!r}")
        if edge < 1:
            raise InvalidPointError(f"edge index must be >= 1, got {edge}")
        radius = float(radius)
        if not math.isfinite(radius) or radius < 0:
            raise InvalidPointError(f"radius must be finite and >= 0, got {radius}")
        object.__setattr__(self, "edge", int(edge))
        object.__setattr__(self, "radius", radius)

    def __setattr__(self, name, value):
        raise AttributeError("StarPoint is immutable")

    def is_vertex(self) -> bool:
        return self.radius == 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, StarPoint):
            return NotImplemented
        if self.radius == 0.0 and other.radius == 0.0:
            return True
        return self.edge == other.edge and self.radius == other.radius

    def __hash__(self) -> int:
        if self.radius == 0.0:
            return hash((0, 0.0))
        return hash((self.edge, self.radius))

    def __repr__(self) -> str:
        return f"StarPoint(edge={self.edge}, radius={self.radius})"


@dataclass(frozen=True)
class GridSpec:
    """Uniform radial grid on [0, cutoff] with ``points_per_edge`` nodes."""

    cutoff: float = 6.0
    points_per_edge: int = 513

    def __post_init__(self) -> None:
        if not math.isfinite(self.cutoff) or self.cutoff <= 0:
            raise ShapeError(f"cutoff must be positive and finite, got {self.cutoff}")
        if self.points_per_edge < 2:
            raise ShapeError(
                f"points_per_edge must be >= 2, got {self.points_per_edge}"
            )

    @property
    def h(self) -> float:
        return self.cutoff / (self.points_per_edge - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.cutoff, self.points_per_edge)


class MeasureKind(str, Enum):
    LEBESGUE = "lebesgue"
    GAUSSIAN_MU = "gaussian_mu"


def mu_density(p, m: int):
    """Density of the invariant probability measure w.r.t. edge Lebesgue measure.

    Per edge the density at radius r is (2 / (m sqrt(pi))) exp(-r^2); summed over
    the m edges it integrates to one.
    """

    if m < 1:
        raise InvalidGraphError(f"edge count must be >= 1, got {m}")
    if isinstance(p, StarPoint):
        r = p.radius
    else:
        r = np.asarray(p, dtype=float)
        if np.any(~np.isfinite(r)) or np.any(r < 0):
            raise InvalidPointError("radii must be finite and >= 0")
    return (2.0 / (m * SQRT_PI)) * np.exp(-np.square(r))


def simpson_weights(n_points: int, h: float) -> np.ndarray:
    """Composite quadrature weights on a uniform grid, exact for cubics.

    Even interval counts use the composite Simpson rule; odd counts splice a
    3/8 block onto the final three intervals.  A single interval falls back to
    the trapezoid rule.
    """

    if n_points < 2:
        raise ShapeError(f"quadrature needs >= 2 points, got {n_points}")
    if not math.isfinite(h) or h <= 0:
        raise ShapeError(f"grid spacing must be positive, got {h}")
    intervals = n_points - 1
    w = np.zeros(n_points)
    if intervals == 1:
        w[:] = h / 2.0
        return w
    if intervals % 2 == 0:
        w[0] = w[-1] = h / 3.0
        w[1:-1:2] = 4.0 * h / 3.0
        w[2:-1:2] = 2.0 * h / 3.0
        return w
    # odd interval count: Simpson up to the last three intervals, 3/8 there
    head = intervals - 3
    if head > 0:
        w[0] = h / 3.0
        w[1:head:2] = 4.0 * h / 3.0
        w[2:head:2] = 2.0 * h / 3.0
        w[head] = h / 3.0
    w[head:] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    return w


Profile = Callable[[np.ndarray], np.ndarray]


class StarFunction:
    """Scalar function on a star graph, sampled per edge on a shared grid.

    ``values`` has shape (m, points_per_edge).  When the function is flagged
    continuous at the vertex the radius-zero sample is stored once and
    mirrored to every edge, so continuity is structural rather than checked
    downstream.  Optional per-edge ``profiles`` (callables of the radius)
    allow re-evaluation beyond the stored grid.
    """

    __slots__ = ("graph", "grid", "values", "continuous_at_vertex", "profiles",
                 "trusted_cutoff")

    def __init__(
        self,
        graph: StarGraph,
        grid: GridSpec,
        values: np.ndarray,
        *,
        continuous_at_vertex: bool = False,
        profiles: tuple[Profile, ...] | None = None,
        trusted_cutoff: float | None = None,
        vertex_tol: float = 1e-9,
    ):
        values = np.array(values, dtype=float)
        if values.shape != (graph.m, grid.points_per_edge):
            raise ShapeError(
                f"values must have shape {(graph.m, grid.points_per_edge)}, "
                f"got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise NumericalInputError("values must be finite")
        if profiles is not None and len(profiles) != graph.m:
            raise ShapeError(
                f"need one profile per edge ({graph.m}), got {len(profiles)}"
            )
        if continuous_at_vertex:
            col = values[:, 0]
            spread = float(col.max() - col.min())
            scale = max(1.0, float(np.abs(col).max()))
            if spread > vertex_tol * scale:
                raise VertexContinuityError(
                    f"vertex values disagree by {spread:.3e} "
                    f"(tolerance {vertex_tol * scale:.3e})"
                )
            values[:, 0] = col[0]
        values.flags.writeable = False
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "continuous_at_vertex", bool(continuous_at_vertex))
        object.__setattr__(self, "profiles", profiles)
        object.__setattr__(self, "trusted_cutoff", trusted_cutoff)

    def __setattr__(self, name, value):
        raise AttributeError("StarFunction is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_samples(
        cls,
        graph: StarGraph,
        grid: GridSpec,
        values: np.ndarray,
        *,
        continuous_at_vertex: bool = False,
        vertex_tol: float = 1e-9,
    ) -> "StarFunction":
        return cls(
            graph,
            grid,
            values,
            continuous_at_vertex=continuous_at_vertex,
            vertex_tol=vertex_tol,
        )

    @classmethod
    def from_callables(
        cls,
        graph: StarGraph,
        grid: GridSpec,
        profiles: Sequence[Profile],
        *,
        continuous_at_vertex: bool | None = None,
    ) -> "StarFunction":
        """Sample per-edge callables; vertex continuity is auto-detected when
        ``continuous_at_vertex`` is None."""

        profiles = tuple(profiles)
        if len(profiles) != graph.m:
            raise ShapeError(
                f"need one profile per edge ({graph.m}), got {len(profiles)}"
            )
        nodes = grid.nodes()
        values = np.empty((graph.m, grid.points_per_edge))
        for i, fn in enumerate(profiles):
            values[i] = np.asarray(fn(nodes), dtype=float)
        if continuous_at_vertex is None:
            col = values[:, 0]
            scale = max(1.0, float(np.abs(col).max()))
            continuous_at_vertex = float(col.max() - col.min()) <= 1e-12 * scale
        return cls(
            graph,
            grid,
            values,
            continuous_at_vertex=continuous_at_vertex,
            profiles=profiles,
        )

    @classmethod
    def constant(cls, graph: StarGraph, grid: GridSpec, value: float) -> "StarFunction":
        value = float(value)
        profiles = tuple(
            (lambda x, v=value: np.full_like(np.asarray(x, dtype=float), v))
            for _ in range(graph.m)
        )
        return cls.from_callables(graph, grid, profiles, continuous_at_vertex=True)

    @classmethod
    def zero(cls, graph: StarGraph, grid: GridSpec) -> "StarFunction":
        return cls.constant(graph, grid, 0.0)

    # -- basic queries -----------------------------------------------------

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def vertex_value(self) -> float:
        return float(self.values[0, 0])

    def edge_values(self, edge: int) -> np.ndarray:
        if edge < 1 or edge > self.graph.m:
            raise InvalidPointError(f"edge must be in 1..{self.graph.m}, got {edge}")
        return self.values[edge - 1]

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    def has_profiles(self) -> bool:
        return self.profiles is not None

    def evaluate_profiles(self, radii: np.ndarray) -> np.ndarray:
        """Evaluate the backing callables on arbitrary radii, shape (m, len(radii))."""

        if self.profiles is None:
            raise ShapeError("this StarFunction has no callable profiles")
        radii = np.asarray(radii, dtype=float)
        out = np.empty((self.graph.m, radii.size))
        for i, fn in enumerate(self.profiles):
            out[i] = np.asarray(fn(radii), dtype=float)
        return out

    # -- serialization -----------------------------------------------------

    def to_csv(self, path) -> None:
        nodes = self.grid.nodes()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["edge", "radius", "value"])
            for i in range(self.graph.m):
                for j, r in enumerate(nodes):
                    writer.writerow([i + 1, f"{r:.17g}", f"{self.values[i, j]:.17g}"])

    @classmethod
    def from_csv(cls, path) -> "StarFunction":
        per_edge: dict[int, list[tuple[float, float]]] = {}
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip() for c in header[:3]] != ["edge", "radius", "value"]:
                raise ShapeError(f"expected header 'edge,radius,value' in {path}")
            for row in reader:
                if not row:
                    continue
                edge = int(row[0])
                per_edge.setdefault(edge, []).append((float(row[1]), float(row[2])))
        if not per_edge:
            raise ShapeError(f"no data rows in {path}")
        m = max(per_edge)
        if sorted(per_edge) != list(range(1, m + 1)):
            raise ShapeError(f"edge indices must cover 1..{m} in {path}")
        counts = {len(rows) for rows in per_edge.values()}
        if len(counts) != 1:
            raise ShapeError(f"edges carry different sample counts in {path}")
        n = counts.pop()
        if n < 2:
            raise ShapeError(f"need >= 2 samples per edge in {path}")
        values = np.empty((m, n))
        radii_ref = None
        for edge, rows in per_edge.items():
            rows.sort(key=lambda rv: rv[0])
            radii = np.array([rv[0] for rv in rows])
            if radii_ref is None:
                radii_ref = radii
            elif not np.allclose(radii, radii_ref, rtol=0.0, atol=1e-12):
                raise ShapeError(f"edges carry different radial grids in {path}")
            values[edge - 1] = [rv[1] for rv in rows]
        spacing = np.diff(radii_ref)
        if radii_ref[0] != 0.0 or np.any(np.abs(spacing - spacing[0]) > 1e-9 * spacing[0]):
            raise ShapeError(f"radial grid must be uniform starting at 0 in {path}")
        grid = GridSpec(cutoff=float(radii_ref[-1]), points_per_edge=n)
        col = values[:, 0]
        scale = max(1.0, float(np.abs(col).max()))
        continuous = float(col.max() - col.min()) <= 1e-12 * scale
        return cls(StarGraph(m), grid, values, continuous_at_vertex=continuous)

    def to_json(self, path) -> None:
        payload = {
            "m": self.graph.m,
            "cutoff": self.grid.cutoff,
            "points_per_edge": self.grid.points_per_edge,
            "values": [[float(v) for v in row] for row in self.values],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "StarFunction":
        with open(path) as fh:
            payload = json.load(fh)
        try:
            m = payload["m"]
            grid = GridSpec(
                cutoff=float(payload["cutoff"]),
                points_per_edge=int(payload["points_per_edge"]),
            )
            values = np.asarray(payload["values"], dtype=float)
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed StarFunction JSON in {path}: {exc}") from exc
        col = values[:, 0] if values.ndim == 2 and values.shape[1] else np.zeros(1)
        scale = max(1.0, float(np.abs(col).max()))
        continuous = float(col.max() - col.min()) <= 1e-12 * scale
        return cls(StarGraph(int(m)), grid, values, continuous_at_vertex=continuous)


def integrate_star(
    f: StarFunction,
    measure: MeasureKind | str = MeasureKind.GAUSSIAN_MU,
    grid: GridSpec | None = None,
) -> float:
    """Integrate a StarFunction over the truncated star.

    ``gaussian_mu`` integrates against the invariant probability measure,
    ``lebesgue`` against edge arclength on [0, cutoff].
    """

    measure = MeasureKind(measure)
    if grid is not None and grid != f.grid:
        raise ShapeError("explicit grid must match the sample grid of f")
    g = f.grid
    w = simpson_weights(g.points_per_edge, g.h)
    if measure is MeasureKind.GAUSSIAN_MU:
        w = w * mu_density(g.nodes(), f.graph.m)
    return float(np.dot(f.values, w).sum())


def sup_distance(f: StarFunction, g: StarFunction, radius_max: float | None = None) -> float:
    """Supremum distance over shared grid nodes, optionally windowed in radius."""

    if f.graph.m != g.graph.m:
        raise ShapeError("functions live on stars with different edge counts")
    if f.grid != g.grid:
        raise ShapeError("functions are sampled on different grids")
    diff = np.abs(f.values - g.values)
    if radius_max is not None:
        mask = f.grid.nodes() <= radius_max + 1e-12
        diff = diff[:, mask]
    return float(diff.max())

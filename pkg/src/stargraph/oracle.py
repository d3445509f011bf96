"""Finite-difference reference solver for the extended line problems.

Each edge of the star yields one parabolic problem on a symmetric interval
(-n, n) with homogeneous Dirichlet ends: d_t u = q u'' + b u' + c u with the
parity-extended coefficients.  A theta-weighted step (trapezoidal by
default) advances the centered second-order discretization; the tridiagonal
system is solved directly each step.  Folding the per-edge solutions back to
the star tests the vertex conditions instead of imposing them: continuity
holds because odd data stays odd, the flux balance holds at the stencil
order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError, NumericalInputError, ShapeError, StabilityError
from .extension import (
    CoefficientTriple,
    LineCoefficients,
    LineFunction,
    extend_coefficients,
    reflect_extend,
)
from .geometry import GridSpec, StarFunction, StarGraph
from .kernels import TabulatedLineKernel

__all__ = [
    "OracleConfig",
    "LineEvolution",
    "StarEvolution",
    "TruncationRow",
    "solve_line_dirichlet",
    "solve_star",
    "truncation_study",
    "tabulate_kernel",
    "worker_count",
]


def worker_count(requested: int | None = None) -> int:
    """Worker cap for independent line solves; STARGRAPH_THREADS bounds it."""

    env = os.environ.get("STARGRAPH_THREADS", "")
    try:
        cap = int(env) if env else 1
    except ValueError:
        cap = 1
    cap = max(1, cap)
    if requested is None:
        return cap
    return max(1, min(int(requested), cap))


@dataclass(frozen=True)
class OracleConfig:
    """Discretization of the truncated line problems.

    ``n`` is the half-width of the interval, ``h`` the mesh width (n/h must
    be an integer), ``dt`` the step size and ``theta`` the implicit weight
    (1/2 = trapezoidal, 1 = backward Euler).
    """

    n: float = 8.0
    h: float = 1.0 / 64.0
    dt: float = 1e-3
    theta: float = 0.5
    t_final: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.n) and self.n > 0):
            raise DomainError(f"n must be positive, got {self.n}")
        if not (math.isfinite(self.h) and self.h > 0):
            raise DomainError(f"h must be positive, got {self.h}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise DomainError(f"dt must be positive, got {self.dt}")
        if not (0.5 <= self.theta <= 1.0):
            raise DomainError(f"theta must lie in [1/2, 1], got {self.theta}")
        if not (math.isfinite(self.t_final) and self.t_final > 0):
            raise DomainError(f"t_final must be positive, got {self.t_final}")
        if abs(self.n / self.h - round(self.n / self.h)) > 1e-9:
            raise DomainError(f"n/h must be an integer, got {self.n / self.h}")
        if abs(self.t_final / self.dt - round(self.t_final / self.dt)) > 1e-6:
            raise DomainError(
                f"t_final/dt must be an integer, got {self.t_final / self.dt}"
            )

    @property
    def half_intervals(self) -> int:
        return int(round(self.n / self.h))

    @property
    def steps(self) -> int:
        return int(round(self.t_final / self.dt))

    def grid(self) -> np.ndarray:
        """Symmetric nodes (j - M) h; exact negation symmetry in floats."""

        m = self.half_intervals
        return (np.arange(2 * m + 1) - m) * self.h


@dataclass
class LineEvolution:
    """All time levels of one line solve."""

    x: np.ndarray
    times: np.ndarray
    values: np.ndarray  # (steps + 1, len(x))

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, k: int) -> LineFunction:
        return LineFunction(self.x, self.values[k])

    def at_time(self, t: float) -> LineFunction:
        k = _time_level(self.times, t)
        return LineFunction(self.x, self.values[k])


def _time_level(times: np.ndarray, t: float) -> int:
    hits = np.nonzero(np.abs(times - t) <= 1e-9 * max(1.0, abs(t)))[0]
    if hits.size == 0:
        raise DomainError(f"time {t} is not a stored level")
    return int(hits[0])


def _initial_values(f0, x: np.ndarray) -> np.ndarray:
    if isinstance(f0, LineFunction):
        if f0.x.shape == x.shape and np.all(np.abs(f0.x - x) <= 1e-12 * max(1.0, float(x[-1]))):
            return np.array(f0.values, dtype=float)
        if f0.profile is not None:
            return np.asarray(f0.profile(x), dtype=float)
        raise ShapeError("initial line data lives on a different grid and has no profile")
    if callable(f0):
        return np.asarray(f0(x), dtype=float)
    raise ShapeError("initial data must be a LineFunction or a callable")


def solve_line_dirichlet(
    coeffs: LineCoefficients,
    f0,
    cfg: OracleConfig,
) -> LineEvolution:
    """Theta-method solve of d_t u = q u'' + b u' + c u on (-n, n), u(±n) = 0.

    The initial level keeps the boundary samples of the data; from the first
    step on the ends are pinned to zero.  The sup norm is monitored against
    the growth bound 1.05 exp(c_sup t) ||f0||.
    """

    x = cfg.grid()
    h, dt, theta = cfg.h, cfg.dt, cfg.theta

    u0 = _initial_values(f0, x)
    if u0.shape != x.shape or not np.all(np.isfinite(u0)):
        raise NumericalInputError("initial data must be finite on the solver grid")

    qv = np.asarray(coeffs.q(x), dtype=float)
    bv = np.asarray(coeffs.b(x), dtype=float)
    cv = np.asarray(coeffs.c(x), dtype=float)
    if np.any(qv <= 0):
        raise DomainError("diffusion coefficient must be positive on the grid")
    peclet = float(np.max(np.abs(bv) * h / (2.0 * qv)))
    if peclet > 1.0:
        raise DomainError(
            f"cell Peclet number {peclet:.3f} > 1; refine h to keep the "
            "centered discretization monotone"
        )

    # interior stencil coefficients of q u'' + b u' + c u
    qi, bi, ci = qv[1:-1], bv[1:-1], cv[1:-1]
    lower = qi / h**2 - bi / (2.0 * h)
    diag = -2.0 * qi / h**2 + ci
    upper = qi / h**2 + bi / (2.0 * h)

    n_int = x.size - 2
    ab = np.zeros((3, n_int))
    ab[0, 1:] = -theta * dt * upper[:-1]
    ab[1, :] = 1.0 - theta * dt * diag
    ab[2, :-1] = -theta * dt * lower[1:]

    steps = cfg.steps
    values = np.empty((steps + 1, x.size))
    values[0] = u0
    times = np.arange(steps + 1) * dt

    bound_base = 1.05 * float(np.abs(u0).max())
    c0 = coeffs.c_sup_bound
    explicit = (1.0 - theta) * dt

    u = u0.copy()
    for k in range(1, steps + 1):
        rhs = u[1:-1] + explicit * (lower * u[:-2] + diag * u[1:-1] + upper * u[2:])
        u_int = solve_banded((1, 1), ab, rhs, check_finite=False)
        u = np.zeros_like(u)
        u[1:-1] = u_int
        sup = float(np.abs(u_int).max()) if n_int else 0.0
        if not math.isfinite(sup):
            raise StabilityError(f"solution became non-finite at step {k}")
        if sup > bound_base * math.exp(c0 * k * dt):
            raise StabilityError(
                f"sup norm {sup:.6g} exceeds the growth bound "
                f"{bound_base * math.exp(c0 * k * dt):.6g} at t = {k * dt:.6g}"
            )
        values[k] = u
    return LineEvolution(x=x, times=times, values=values)


@dataclass
class StarEvolution:
    """Folded star snapshots of the per-edge line solves."""

    graph: StarGraph
    grid: GridSpec
    times: np.ndarray
    values: np.ndarray  # (steps + 1, m, points_per_edge)
    continuity_defects: np.ndarray
    kirchhoff_defects: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def snapshot(self, k: int) -> StarFunction:
        vals = self.values[k]
        col = vals[:, 0]
        scale = max(1.0, float(np.abs(col).max()))
        continuous = float(col.max() - col.min()) <= 1e-9 * scale
        return StarFunction(
            self.graph,
            self.grid,
            vals,
            continuous_at_vertex=continuous,
            vertex_tol=math.inf,
        )

    def at_time(self, t: float) -> StarFunction:
        return self.snapshot(_time_level(self.times, t))


def _edge_initial(f: StarFunction, edge: int, x: np.ndarray) -> np.ndarray:
    if f.has_profiles():
        return reflect_extend(f, edge, x=x).values
    # sample-backed data must already live on the oracle mesh
    half = x[x >= -1e-15]
    n_half = half.size
    if f.grid.points_per_edge < n_half or abs(f.grid.h - float(x[1] - x[0])) > 1e-12:
        raise ShapeError(
            "sample-backed initial data must share the oracle mesh width and "
            "reach the truncation radius; provide callable profiles otherwise"
        )
    line = reflect_extend(f, edge)
    center = line.x.size // 2
    lo = center - (n_half - 1)
    return np.array(line.values[lo : center + n_half], dtype=float)


def solve_star(
    coeffs: CoefficientTriple,
    f: StarFunction,
    cfg: OracleConfig,
    *,
    threads: int | None = None,
) -> StarEvolution:
    """Reference evolution on the star: extend, solve per edge, fold back."""

    line_coeffs = extend_coefficients(coeffs)
    x = cfg.grid()
    m = f.graph.m

    initials = [_edge_initial(f, i, x) for i in range(1, m + 1)]

    workers = worker_count(threads)
    if workers > 1 and m > 1:
        with ThreadPoolExecutor(max_workers=min(workers, m)) as pool:
            line_runs = list(
                pool.map(lambda u0: solve_line_dirichlet(line_coeffs, lambda _: u0, cfg), initials)
            )
    else:
        line_runs = [
            solve_line_dirichlet(line_coeffs, lambda _, u0=u0: u0, cfg)
            for u0 in initials
        ]

    mid = x.size // 2
    steps = cfg.steps
    n_half = x.size - mid
    values = np.empty((steps + 1, m, n_half))
    for i, run in enumerate(line_runs):
        values[:, i, :] = run.values[:, mid:]

    vertex = values[:, :, 0]
    continuity = vertex.max(axis=1) - vertex.min(axis=1)
    slopes = (-3.0 * values[:, :, 0] + 4.0 * values[:, :, 1] - values[:, :, 2]) / (2.0 * cfg.h)
    kirchhoff = np.abs(slopes.sum(axis=1))

    grid = GridSpec(cutoff=float(cfg.n), points_per_edge=n_half)
    return StarEvolution(
        graph=f.graph,
        grid=grid,
        times=np.arange(steps + 1) * cfg.dt,
        values=values,
        continuity_defects=continuity,
        kirchhoff_defects=kirchhoff,
    )


@dataclass(frozen=True)
class TruncationRow:
    n: float
    t: float
    sup_defect: float


def truncation_study(
    coeffs: CoefficientTriple,
    f: StarFunction,
    cfg: OracleConfig,
    n_list: Sequence[float],
    times: Sequence[float] | None = None,
) -> list[TruncationRow]:
    """Sup distance between successive truncation radii on the window [0, n_min].

    Rows are keyed by the larger radius of each consecutive pair; identical
    radii give zero rows.  Confinement shows up as defects collapsing with n.
    """

    n_list = [float(n) for n in n_list]
    if len(n_list) < 2:
        raise DomainError("need at least two truncation radii")
    if any(n2 < n1 for n1, n2 in zip(n_list, n_list[1:])):
        raise DomainError("truncation radii must be non-decreasing")
    if times is None:
        times = [cfg.t_final]
    times = [float(t) for t in times]

    window = int(round(min(n_list) / cfg.h)) + 1
    runs = []
    for n in n_list:
        run = solve_star(coeffs, f, replace(cfg, n=n))
        levels = [_time_level(run.times, t) for t in times]
        runs.append(run.values[levels][:, :, :window])

    rows: list[TruncationRow] = []
    for prev, cur, n in zip(runs, runs[1:], n_list[1:]):
        for ti, t in enumerate(times):
            rows.append(
                TruncationRow(
                    n=n,
                    t=t,
                    sup_defect=float(np.abs(cur[ti] - prev[ti]).max()),
                )
            )
    return rows


def tabulate_kernel(
    coeffs: LineCoefficients,
    cfg: OracleConfig,
    times: Sequence[float],
    stride: int = 1,
) -> TabulatedLineKernel:
    """Tabulate the line kernel by propagating unit-mass hats from each node.

    Column y of the table is the solution at the requested times for initial
    data concentrated at y (height 1/h); Dirichlet ends give zero columns at
    the truncation radius.  ``stride`` thins the tabulation grid; it must
    divide n/h so the thinned grid stays symmetric.
    """

    if stride < 1 or cfg.half_intervals % stride != 0:
        raise DomainError("stride must be >= 1 and divide n/h")
    times = [float(t) for t in times]
    if not times:
        raise DomainError("need at least one tabulation time")

    x = cfg.grid()
    sub = np.arange(0, x.size, stride)
    x_sub = x[sub]
    levels = [int(round(t / cfg.dt)) for t in times]
    for t, k in zip(times, levels):
        if abs(k * cfg.dt - t) > 1e-9 or k < 1 or k > cfg.steps:
            raise DomainError(f"time {t} is not a positive stored level")

    values = np.zeros((len(times), x_sub.size, x_sub.size))
    for col, j in enumerate(sub):
        if j == 0 or j == x.size - 1:
            continue  # absorbed at the boundary: zero column
        u0 = np.zeros_like(x)
        u0[j] = 1.0 / cfg.h
        run = solve_line_dirichlet(coeffs, lambda _, u0=u0: u0, cfg)
        for ti, k in enumerate(levels):
            values[ti, :, col] = run.values[k][sub]
    return TabulatedLineKernel(times, x_sub, values)

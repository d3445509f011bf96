"""Transition kernels on the line and their star-graph assembly.

Closed forms cover the drift-toward-origin diffusion (Gaussian kernel with
exponentially shrinking mean) and the quadratic-potential propagator; a
tabulated variant carries solver output for coefficients without a closed
form.  On the star the line kernel is combined with a scattering matrix:
same-edge propagation keeps the direct part, every edge pair shares the
reflected part with weight 2/m.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InvalidPointError, NumericalInputError, ShapeError
from .geometry import StarPoint

__all__ = [
    "MIN_TIME",
    "KernelSpec",
    "TabulatedLineKernel",
    "OU",
    "HARMONIC",
    "ou_line_kernel",
    "ho_line_kernel",
    "line_kernel",
    "scattering_matrix",
    "star_kernel",
]

# below this horizon the quadrature consumers cannot resolve the kernel anyway
MIN_TIME = 1e-8


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t):
        raise NumericalInputError(f"time must be finite, got {t}")
    if t < MIN_TIME:
        raise DomainError(f"time must be >= {MIN_TIME}, got {t}")
    return t


def ou_line_kernel(t: float, x, y):
    """Transition density of the unit-rate drift-to-origin diffusion.

    Gaussian in y with mean e^{-t} x and variance (1 - e^{-2t})/2; integrates
    to one over the line and converges to exp(-y^2)/sqrt(pi) as t grows.
    """

    t = _check_time(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = -math.expm1(-2.0 * t)  # 1 - e^{-2t}, accurate for small t
    z = math.exp(-t) * x - y
    return np.exp(-(z * z) / s) / math.sqrt(math.pi * s)


def ho_line_kernel(t: float, x, y):
    """Propagator of the quadratic-potential operator (f'' - x^2 f + f)/2.

    Symmetric in (x, y); fixes the Gaussian ground state exp(-x^2/2).
    """

    t = _check_time(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = -math.expm1(-2.0 * t)
    e = math.exp(-t)
    expo = (4.0 * x * y * e - (x * x + y * y) * (1.0 + e * e)) / (2.0 * s)
    return np.exp(expo) / math.sqrt(math.pi * s)


class TabulatedLineKernel:
    """Kernel values on a symmetric line grid at a fixed list of times.

    Exists so that solver output for general coefficients can feed the same
    star assembly as the closed forms; evaluation interpolates bilinearly in
    (x, y) and is only defined at the stored times.
    """

    def __init__(self, times, x, values):
        times = np.asarray(times, dtype=float)
        x = np.asarray(x, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or times.size < 1:
            raise ShapeError("need at least one stored time")
        if np.any(np.diff(times) <= 0):
            raise ShapeError("stored times must be strictly increasing")
        if np.any(times < MIN_TIME):
            raise DomainError(f"stored times must be >= {MIN_TIME}")
        if x.ndim != 1 or x.size < 2:
            raise ShapeError("x grid must be 1-D with >= 2 points")
        steps = np.diff(x)
        if np.any(steps <= 0) or np.any(np.abs(steps - steps[0]) > 1e-9 * steps[0]):
            raise ShapeError("x grid must be uniform and increasing")
        if np.any(np.abs(x + x[::-1]) > 1e-9 * max(1.0, float(x[-1]))):
            raise ShapeError("x grid must be symmetric about the origin")
        if values.shape != (times.size, x.size, x.size):
            raise ShapeError(
                f"values must have shape {(times.size, x.size, x.size)}, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise NumericalInputError("kernel table must be finite")
        self.times = times
        self.x = x
        self.values = values

    def _time_index(self, t: float) -> int:
        hits = np.nonzero(np.abs(self.times - t) <= 1e-12 * max(1.0, abs(t)))[0]
        if hits.size == 0:
            raise DomainError(
                f"kernel tabulated only at times {self.times.tolist()}, got {t}"
            )
        return int(hits[0])

    def evaluate(self, t: float, x, y):
        ti = self._time_index(_check_time(t))
        table = self.values[ti]
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        lo, hi = self.x[0], self.x[-1]
        tol = 1e-12 * max(1.0, hi)
        if np.any(x < lo - tol) or np.any(x > hi + tol) or np.any(y < lo - tol) or np.any(y > hi + tol):
            raise DomainError("query point outside the tabulated window")
        h = float(self.x[1] - self.x[0])
        n = self.x.size
        fx = np.clip((x - lo) / h, 0.0, n - 1 - 1e-12)
        fy = np.clip((y - lo) / h, 0.0, n - 1 - 1e-12)
        ix = fx.astype(int)
        iy = fy.astype(int)
        ax = fx - ix
        ay = fy - iy
        v00 = table[ix, iy]
        v01 = table[ix, iy + 1]
        v10 = table[ix + 1, iy]
        v11 = table[ix + 1, iy + 1]
        return (
            (1 - ax) * (1 - ay) * v00
            + (1 - ax) * ay * v01
            + ax * (1 - ay) * v10
            + ax * ay * v11
        )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "x", "y", "value"])
            for ti, t in enumerate(self.times):
                for xi, xv in enumerate(self.x):
                    for yi, yv in enumerate(self.x):
                        writer.writerow(
                            [
                                f"{t:.17g}",
                                f"{xv:.17g}",
                                f"{yv:.17g}",
                                f"{self.values[ti, xi, yi]:.17g}",
                            ]
                        )

    @classmethod
    def from_csv(cls, path) -> "TabulatedLineKernel":
        rows: list[tuple[float, float, float, float]] = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip() for c in header[:4]] != ["t", "x", "y", "value"]:
                raise ShapeError(f"expected header 't,x,y,value' in {path}")
            for row in reader:
                if not row:
                    continue
                rows.append((float(row[0]), float(row[1]), float(row[2]), float(row[3])))
        if not rows:
            raise ShapeError(f"no data rows in {path}")
        times = np.unique([r[0] for r in rows])
        xs = np.unique([r[1] for r in rows])
        values = np.full((times.size, xs.size, xs.size), np.nan)
        t_idx = {t: i for i, t in enumerate(times)}
        x_idx = {x: i for i, x in enumerate(xs)}
        for t, x, y, v in rows:
            values[t_idx[t], x_idx[x], x_idx[y]] = v
        if np.any(np.isnan(values)):
            raise ShapeError(f"kernel table in {path} is not a full (t, x, y) product")
        return cls(times, xs, values)


@dataclass(frozen=True)
class KernelSpec:
    """Which line kernel to use: a closed form or an attached table."""

    tag: str
    table: Optional[TabulatedLineKernel] = None

    def __post_init__(self) -> None:
        if self.tag not in ("ou", "harmonic_oscillator", "tabulated"):
            raise ShapeError(f"unknown kernel tag {self.tag!r}")
        if self.tag == "tabulated" and self.table is None:
            raise ShapeError("tabulated kernel spec needs a table")
        if self.tag != "tabulated" and self.table is not None:
            raise ShapeError("closed-form kernel spec must not carry a table")


OU = KernelSpec("ou")
HARMONIC = KernelSpec("harmonic_oscillator")


def line_kernel(spec: KernelSpec, t: float, x, y):
    """Evaluate the line kernel selected by ``spec`` (broadcasts over x, y)."""

    if spec.tag == "ou":
        return ou_line_kernel(t, x, y)
    if spec.tag == "harmonic_oscillator":
        return ho_line_kernel(t, x, y)
    return spec.table.evaluate(t, x, y)


def scattering_matrix(m: int) -> np.ndarray:
    """Vertex scattering weights: (2 - m)/m on the diagonal, 2/m elsewhere.

    Rows sum to one; the matrix is symmetric and orthogonal.
    """

    if not isinstance(m, (int, np.integer)) or isinstance(m, bool) or m < 1:
        raise ShapeError(f"edge count must be a positive integer, got {m!r}")
    sigma = np.full((m, m), 2.0 / m)
    np.fill_diagonal(sigma, (2.0 - m) / m)
    return sigma


def star_kernel(spec: KernelSpec, m: int, t: float, x: StarPoint, y: StarPoint) -> float:
    """Transition kernel between two star points.

    Same-edge pairs combine the direct and reflected line kernels; distinct
    edges see only the reflected part with weight 2/m.  Radius-zero points
    give the same value on every edge because the line kernels are even in
    the second argument at the origin.
    """

    if not isinstance(x, StarPoint) or not isinstance(y, StarPoint):
        raise InvalidPointError("x and y must be StarPoint instances")
    if m < 1:
        raise ShapeError(f"edge count must be >= 1, got {m}")
    if x.edge > m or y.edge > m:
        raise InvalidPointError(
            f"point uses edge beyond the {m}-edge star: {x.edge}, {y.edge}"
        )
    # the vertex belongs to every edge; pin its label so the arithmetic
    # (and hence the rounding) cannot depend on which edge named it
    if x.radius == 0.0:
        x = StarPoint(y.edge, 0.0)
    elif y.radius == 0.0:
        y = StarPoint(x.edge, 0.0)
    k_refl = line_kernel(spec, t, x.radius, -y.radius)
    if x.edge == y.edge:
        k_direct = line_kernel(spec, t, x.radius, y.radius)
        return float(k_direct + ((2.0 - m) / m) * k_refl)
    return float((2.0 / m) * k_refl)

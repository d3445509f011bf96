import math

import numpy as np
import pytest

from stargraph.errors import DomainError, VertexContinuityError
from stargraph.geometry import (
    GridSpec,
    MeasureKind,
    StarFunction,
    StarGraph,
    integrate_star,
)
from stargraph.kernels import HARMONIC, OU
from stargraph.semigroup import apply, evolve_sequence, vertex_defect
from stargraph.spectral import RotationOperator
from stargraph.transform import ground_state

# h = 1/64 puts the probe radii 0.5, 1, 2 on grid nodes
GRID8 = GridSpec(cutoff=8.0, points_per_edge=513)


def gauss_profile(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-x * x)


def xgauss_profile(x):
    x = np.asarray(x, dtype=float)
    return x * np.exp(-x * x)


def zero_profile(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def test_single_edge_frozen_values():
    # adaptive-quadrature values of the half-line evolution of e^{-y^2}
    # (direct plus reflected kernel, full diagonal weight at m=1)
    f = StarFunction.from_callables(StarGraph(1), GRID8, (gauss_profile,))
    u = apply(OU, 1, 0.5, f)
    nodes = GRID8.nodes()
    j0 = 0
    j1 = int(round(1.0 / GRID8.h))
    assert u.values[0, j0] == pytest.approx(0.7827514527487522, abs=1e-11)
    assert u.values[0, j1] == pytest.approx(0.6247899683377954, abs=1e-11)
    u2 = apply(OU, 1, 1.0, f)
    j2 = int(round(2.0 / GRID8.h))
    assert u2.values[0, j2] == pytest.approx(0.5477938964301402, abs=1e-11)
    assert nodes[j2] == 2.0

    uh = apply(HARMONIC, 1, 0.5, f)
    assert uh.values[0, j1] == pytest.approx(0.45974341406550534, abs=1e-11)


def test_three_edge_frozen_values():
    # initial data y e^{-y^2} on edge 1 only (vertex-continuous);
    # frozen from adaptive quadrature of the direct/reflected combination
    f = StarFunction.from_callables(
        StarGraph(3), GRID8, (xgauss_profile, zero_profile, zero_profile)
    )
    u = apply(OU, 3, 0.5, f)
    j1 = int(round(1.0 / GRID8.h))
    assert u.values[0, j1] == pytest.approx(0.25254314106295694, abs=1e-9)
    assert u.values[1, j1] == pytest.approx(0.02035792065880372, abs=1e-9)
    assert u.values[2, j1] == pytest.approx(0.02035792065880372, abs=1e-9)
    # the evolved function is continuous at the vertex with value frozen
    # from the same quadrature
    assert u.values[0, 0] == pytest.approx(0.09161182425028433, abs=1e-9)
    assert u.continuous_at_vertex
    vertex_col = u.values[:, 0]
    assert vertex_col.max() == vertex_col.min()


def test_requires_vertex_continuity(grid):
    vals = np.zeros((2, grid.points_per_edge))
    vals[0, :] = 1.0
    f = StarFunction.from_samples(StarGraph(2), grid, vals)
    with pytest.raises(VertexContinuityError):
        apply(OU, 2, 0.5, f)


def test_conservativity_smoke(grid):
    one = StarFunction.constant(StarGraph(3), grid, 1.0)
    u = apply(OU, 3, 0.7, one, grid)
    assert abs(u.values - 1.0).max() < 1e-10


def test_positivity_and_contraction(grid, rng):
    vals = np.abs(rng.normal(size=(3, grid.points_per_edge)))
    vals[:, 0] = vals[0, 0]
    f = StarFunction.from_samples(StarGraph(3), grid, vals, continuous_at_vertex=True)
    u = apply(OU, 3, 0.4, f, grid)
    assert u.values.min() > -1e-12
    assert u.sup_norm() <= f.sup_norm() * (1 + 1e-12)


def test_invariant_measure_smoke(grid):
    # x^2 e^{-(x-2)^2} on one edge; frozen from adaptive quadrature against
    # the edge density 2/(3 sqrt(pi)) e^{-x^2}
    def bump(x):
        x = np.asarray(x, dtype=float)
        return x * x * np.exp(-((x - 2.0) ** 2))

    f = StarFunction.from_callables(StarGraph(3), grid, (bump, zero_profile, zero_profile))
    base = integrate_star(f, MeasureKind.GAUSSIAN_MU)
    assert base == pytest.approx(0.07965507260269152, abs=1e-9)
    u = apply(OU, 3, 0.7, f, grid)
    assert integrate_star(u, MeasureKind.GAUSSIAN_MU) == pytest.approx(base, abs=1e-9)


def test_rotation_commutes_with_the_flow(grid, rng):
    vals = rng.normal(size=(4, grid.points_per_edge))
    vals[:, 0] = vals[0, 0]
    f = StarFunction.from_samples(StarGraph(4), grid, vals, continuous_at_vertex=True)
    rot = RotationOperator(4)
    left = apply(OU, 4, 0.5, rot(f), grid)
    right = rot(apply(OU, 4, 0.5, f, grid))
    # the edge sum is reordered by the rotation, so agreement is up to
    # a few ulps rather than bitwise
    assert np.abs(left.values - right.values).max() < 1e-14


def test_semigroup_law_smoke(grid):
    f = StarFunction.from_callables(
        StarGraph(2), grid, (gauss_profile, gauss_profile), continuous_at_vertex=True
    )
    direct = apply(OU, 2, 0.75, f, grid)
    # evolve to s, then from the sampled result to s + t
    mid = apply(OU, 2, 0.25, f, grid)
    composed = apply(OU, 2, 0.5, mid, grid)
    window = grid.nodes() <= 4.0
    defect = np.abs(direct.values[:, window] - composed.values[:, window]).max()
    assert defect < 1e-7


def test_vertex_defect_paths():
    g = ground_state(3, GRID8)
    d = vertex_defect(g)
    # analytic derivative of e^{-x^2/2} vanishes at the origin
    assert d.continuity == 0.0
    assert d.kirchhoff == 0.0
    sampled = StarFunction.from_samples(
        StarGraph(3), GRID8, g.values, continuous_at_vertex=True
    )
    ds = vertex_defect(sampled)
    assert ds.continuity == 0.0
    assert abs(ds.kirchhoff) < 1e-4  # one-sided stencil error only


def test_evolve_sequence_validation(grid):
    one = StarFunction.constant(StarGraph(2), grid, 1.0)
    with pytest.raises(DomainError):
        evolve_sequence(OU, 2, [0.5, 0.5], one, grid)
    with pytest.raises(DomainError):
        evolve_sequence(OU, 2, [1.0, 0.5], one, grid)
    with pytest.raises(DomainError):
        evolve_sequence(OU, 2, [0.0, 0.5], one, grid)
    snaps = evolve_sequence(OU, 2, [0.25, 0.75], one, grid)
    assert len(snaps) == 2
    assert abs(snaps[1].values - 1.0).max() < 1e-10


def test_output_flags(grid):
    f = StarFunction.from_callables(StarGraph(2), grid, (gauss_profile,) * 2)
    u = apply(HARMONIC, 2, 0.3, f, grid)
    assert u.continuous_at_vertex
    assert not u.has_profiles()

import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conic_geom.core import (
    AbsorptionFamily,
    AbsorptionQuery,
    ConeFamily,
    ConeSpec,
    Estimate,
    GridDensity,
    IntrinsicVolumeVector,
    ParameterError,
    PolytopeFamily,
    PolytopeSpec,
    binomial,
    face_count,
)


@pytest.mark.parametrize("n,k,expected", [(4, 2, 6), (3, 5, 0), (10, 5, 252), (5, -1, 0), (64, 32, math.comb(64, 32))])
def test_binomial(n, k, expected):
    assert binomial(n, k) == expected


def test_binomial_rejects_large_n():
    with pytest.raises(ParameterError):
        binomial(65, 3)


@pytest.mark.parametrize("family,n,k,expected", [
    ("cube", 3, 1, 12),
    ("crosspolytope", 3, 2, 8),
    ("simplex", 3, 1, 6),
    ("cube", 3, 3, 0),
    ("simplex", 3, 3, 1),
    ("crosspolytope", 4, -1, 0),
])
def test_face_count(family, n, k, expected):
    assert face_count(PolytopeSpec(family, n), k) == expected


@pytest.mark.parametrize("n", range(1, 9))
def test_euler_relation(n):
    for fam in (PolytopeFamily.CUBE, PolytopeFamily.CROSSPOLYTOPE):
        p = PolytopeSpec(fam, n)
        assert sum((-1) ** k * face_count(p, k) for k in range(n)) == 1 - (-1) ** n
    s = PolytopeSpec(PolytopeFamily.SIMPLEX, n)
    assert sum((-1) ** k * face_count(s, k) for k in range(n + 1)) == 1


@pytest.mark.parametrize("family", list(PolytopeFamily))
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_enumerated_faces_match_counts(family, n):
    p = PolytopeSpec(family, n)
    for k in range(p.max_face_dim() + 1):
        faces = p.faces(k)
        assert len(faces) == face_count(p, k)
        for f in faces[:5]:
            v = p.face_vertices(f)
            assert v.shape[0] == (2 ** k if family is PolytopeFamily.CUBE else k + 1)


@pytest.mark.parametrize("family", list(PolytopeFamily))
@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_vertices_satisfy_halfspaces(family, n):
    p = PolytopeSpec(family, n)
    A, b = p.halfspaces()
    V = p.vertices()
    slack = b[None, :] - V @ A.T
    assert slack.min() > -1e-12
    # every vertex is tight on at least n constraints
    assert ((np.abs(slack) < 1e-12).sum(axis=1) >= n).all()
    # origin strictly inside
    assert (b > 0).all()


def test_cube_and_cross_vertex_sets():
    assert_allclose(sorted(map(tuple, PolytopeSpec("cube", 2).vertices())), [(-1, -1), (-1, 1), (1, -1), (1, 1)])
    V = PolytopeSpec("crosspolytope", 3).vertices()
    assert V.shape == (6, 3)
    assert_allclose(np.abs(V).sum(axis=1), 1.0)


def test_simplex_is_regular_and_centred():
    p = PolytopeSpec("simplex", 4)
    V = p.vertices()
    assert V.shape == (5, 4)
    assert_allclose(V.mean(axis=0), 0.0, atol=1e-14)
    d = [np.linalg.norm(a - b) for a, b in itertools.combinations(V, 2)]
    assert_allclose(d, math.sqrt(2.0))
    E = p.simplex_basis
    assert_allclose(E.T @ E, np.eye(4), atol=1e-12)


def test_crosspolytope_halfspaces_limited():
    with pytest.raises(ParameterError):
        PolytopeSpec("crosspolytope", 17).halfspaces()


def _gram_expected(c):
    n, p = c.n, c.param
    if c.family is ConeFamily.SIMPLEX:
        return np.eye(n) + p
    if c.family is ConeFamily.CROSS:
        G = np.full((2 * n, 2 * n), p)
        for i in range(n):
            G[i, i] = G[n + i, n + i] = 1 + p
            G[i, n + i] = G[n + i, i] = p - 1
        return G
    V = np.array(list(itertools.product([-1.0, 1.0], repeat=n))).reshape(2 ** n, n)
    return V @ V.T + p


@pytest.mark.parametrize("family,n,p", [
    ("simplex", 3, 0.5), ("simplex", 4, -0.15), ("simplex", 2, 0.0),
    ("cross", 3, 0.25), ("cross", 1, 4.0), ("cube", 3, 1.0), ("cube", 2, 0.25),
])
def test_generator_gram_matrices(family, n, p):
    c = ConeSpec(family, n, p)
    V = c.generators()
    assert V.shape[1] == c.ambient_dim
    G = V @ V.T
    assert_allclose(G, _gram_expected(c), atol=1e-12)
    assert_allclose(c.gram(), G, atol=1e-12)


def test_conespec_validation():
    with pytest.raises(ParameterError):
        ConeSpec("simplex", 3, -1 / 3)
    with pytest.raises(ParameterError):
        ConeSpec("cube", 2, 0.0)
    with pytest.raises(ParameterError):
        ConeSpec("cross", -1, 1.0)
    assert ConeSpec("simplex", 3, 0.0).ambient_dim == 3
    assert ConeSpec("cube", 3, 1.0).ambient_dim == 4


def test_intrinsic_volume_vector_helpers():
    v = IntrinsicVolumeVector([0.125, 0.375, 0.375, 0.125])
    assert v[7] == 0.0 and v[-1] == 0.0
    assert v.total() == 1.0
    assert v.odd_sum() == 0.5 and v.even_sum() == 0.5
    assert v.tail_up(1) == 0.5
    assert v.tail_down(2) == 0.5
    assert v.tail_down(-1) == 0.0


def test_estimate_agrees():
    e = Estimate(0.5, 0.01, 100, 1)
    assert e.agrees(0.53)
    assert not e.agrees(0.55)
    assert e.agrees(0.55, atol=0.06)


def test_grid_density():
    step = 1e-3
    x = np.arange(0, 30, step)
    g = GridDensity(0.0, step, np.exp(-x))
    assert abs(g.mass() - 1.0) < 1e-6
    assert abs(g.mean() - 1.0) < 1e-5
    assert_allclose(g(0.5), math.exp(-0.5), rtol=1e-6)
    with pytest.raises(ParameterError):
        GridDensity(0.0, 0.0, [1.0])


def test_absorption_query():
    q = AbsorptionQuery("cross", 3, 2, s2=1.0)
    assert q.family is AbsorptionFamily.SYMMETRIC_GAUSSIAN
    with pytest.raises(ParameterError):
        AbsorptionQuery("cube", 1, 2)
    with pytest.raises(ParameterError):
        AbsorptionQuery("cube", 2, 2, s2=-1.0)
    with pytest.raises(ParameterError):
        AbsorptionQuery("cube", 2, 2, u=-1.0)

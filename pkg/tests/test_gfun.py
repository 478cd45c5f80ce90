import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from conic_geom.core import ConeSpec, ParameterError
from conic_geom.gfun import (
    EvalMethod,
    folded_sum_density,
    g_cross,
    g_cube,
    g_equicorr,
    g_simplex,
)

S2_GRID = (0.25, 1.0, 4.0)


def planar(s2):
    return math.atan(1.0 / math.sqrt(s2)) / math.pi


# closed forms in dimension 2 (orthant of a bivariate normal)
def cross2(s2):
    a2 = 1.0 / (2.0 * s2)
    return math.asin(a2 / (1.0 + a2)) / math.pi


def cube2(s2):
    return math.asin(1.0 / (1.0 + s2)) / math.pi


class TestExamples:
    def test_zero_dimensional(self):
        assert g_cube(0, 3.0).value == 0.5
        assert g_cross(0, 0.1).value == 0.5
        assert g_simplex(0, 5.0).value == 1.0
        assert g_simplex(1, -0.9).value == 0.5

    def test_cube_values(self):
        assert_allclose(g_cube(1, 1.0).value, 0.25, atol=1e-12)
        assert_allclose(g_cube(3, 1.0).value, 0.125, atol=1e-10)

    def test_cross_planar(self):
        assert_allclose(g_cross(1, 4.0).value, 0.1475836, atol=1e-7)

    def test_equicorr(self):
        assert g_equicorr(4, 0.0).value == 2.0 ** -4
        assert g_equicorr(1, 3.0).value == 0.5
        assert_allclose(g_equicorr(2, -0.25).value, math.acos(1 / 3) / (2 * math.pi), atol=1e-12)

    def test_simplex(self):
        assert_allclose(g_simplex(2, 1.0).value, 1 / 6, atol=1e-12)
        for n in range(1, 7):
            assert_allclose(g_simplex(n, 0.0).value, 2.0 ** -n, atol=1e-15)


@pytest.mark.parametrize("s2", S2_GRID + (0.01, 100.0))
def test_closed_forms_low_dimension(s2):
    assert_allclose(g_cube(1, s2).value, planar(s2), atol=1e-12)
    assert_allclose(g_cross(1, s2).value, planar(s2), atol=1e-12)
    assert_allclose(g_cross(2, s2).value, cross2(s2), atol=1e-12)
    assert_allclose(g_cube(2, s2).value, cube2(s2), atol=1e-12)


@pytest.mark.parametrize("n", range(0, 9))
def test_cube_exchangeable(n):
    assert_allclose(g_cube(n, 1.0).value, 1.0 / (2 * (n + 1)), atol=1e-12)


@pytest.mark.parametrize("m", [2, 3, 4, 6])
def test_equicorr_bivariate_trivariate_closed_forms(m):
    # orthant probabilities with correlation rho = c / (1 + c)
    for c in (-0.9 / m, -0.2 / m, 0.3, 2.0):
        rho = c / (1 + c)
        if m == 2:
            assert_allclose(g_equicorr(2, c).value, 0.25 + math.asin(rho) / (2 * math.pi), atol=1e-12)
        elif m == 3:
            assert_allclose(g_equicorr(3, c).value, 0.125 + 3 * math.asin(rho) / (4 * math.pi), atol=1e-12)


def test_equicorr_continuous_at_zero():
    for m in (3, 7):
        lo = g_equicorr(m, -1e-7).value
        hi = g_equicorr(m, 1e-7).value
        assert abs(lo - 2.0 ** -m) < 1e-7 and abs(hi - 2.0 ** -m) < 1e-7


def test_equicorr_tiny_values_are_resolved():
    # the orthant probability of I - J/21 in dimension 20 is the polar angle of
    # the regular simplex cone; it is positive and tiny
    v = g_equicorr(20, -1.0 / 21).value
    assert 1e-18 < v < 1e-15
    # decreasing in dimension along c = -1/(m+1)
    vals = [g_equicorr(m, -1.0 / (m + 1)).value for m in range(2, 16)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_equicorr_matches_mpmath_reference():


    m, c = 9, -1.0 / 10
    with mpmath.workdps(30):
        a = mpmath.sqrt(-mpmath.mpf(c)) / mpmath.sqrt(2)
        ref = mpmath.quad(lambda t: 2 * mpmath.npdf(t) * mpmath.re((0.5 + 0.5j * mpmath.erfi(a * t)) ** m),
                          [0, 1, 2, 4, 8, 16, 32, mpmath.inf])
    assert_allclose(g_equicorr(m, c).value, float(ref), rtol=1e-8)


@pytest.mark.parametrize("fn", [g_cube, g_cross])
@pytest.mark.parametrize("n", [1, 2, 4, 6])
def test_monotone_in_s2(fn, n):
    grid = np.geomspace(0.05, 20, 12)
    vals = [fn(n, s2).value for s2 in grid]
    assert all(b < a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("s2", S2_GRID)
def test_cross_nested_in_cube(n, s2):
    # for n = 1 the two cones coincide
    assert g_cross(n, s2).value <= g_cube(n, s2).value + 1e-12


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("s2", S2_GRID)
def test_quadrature_vs_mc(n, s2):
    meth = EvalMethod.mc(10 ** 6, seed=11)
    for fn in (g_cube, g_cross):
        q = fn(n, s2).value
        mc = fn(n, s2, meth)
        assert abs(q - mc.value) <= 4 * mc.error_bound, (fn.__name__, q, mc)


@pytest.mark.parametrize("n", range(1, 5))
def test_direct_cone_sampling(n):
    # membership in the lifted cube / crosspolytope cones via their inequalities
    rng = np.random.default_rng(1000 + n)
    N = 400_000
    for s2 in S2_GRID:
        x = rng.standard_normal((N, n + 1))
        sigma = math.sqrt(s2)
        in_cube = x[:, n] >= sigma * np.abs(x[:, :n]).max(axis=1)
        in_cross = x[:, n] >= sigma * np.abs(x[:, :n]).sum(axis=1)
        for ind, fn in ((in_cube, g_cube), (in_cross, g_cross)):
            p = ind.mean()
            se = math.sqrt(p * (1 - p) / N)
            assert abs(p - fn(n, s2).value) <= 4 * se


@pytest.mark.parametrize("n", range(2, 5))
def test_simplex_vs_generator_sampling(n):
    # a standard Gaussian in R^n lies in pos{u_i} iff its coordinates in the
    # generator basis are nonnegative
    rng = np.random.default_rng(77 + n)
    N = 400_000
    for r in (-1.0 / (n + 1) + 0.05, 0.0, 1.0):
        V = ConeSpec("simplex", n, r).generators()
        x = rng.standard_normal((N, n))
        lam = np.linalg.solve(V.T, x.T).T
        p = (lam >= 0).all(axis=1).mean()
        se = math.sqrt(p * (1 - p) / N)
        assert abs(p - g_simplex(n, r).value) <= 4 * se


def test_equicorr_negative_vs_mc():
    for m, c in ((4, -0.2), (5, -0.15), (6, -1 / 7)):
        q = g_equicorr(m, c).value
        mc = g_equicorr(m, c, EvalMethod.mc(10 ** 6, seed=5))
        assert abs(q - mc.value) <= 4 * mc.error_bound


class TestFoldedDensity:
    def test_half_normal(self):
        g = folded_sum_density(1)
        assert_allclose(g.values[0], math.sqrt(2 / math.pi), atol=1e-6)

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
    def test_mass_and_mean(self, n):
        g = folded_sum_density(n)
        assert abs(g.mass() - 1.0) < 1e-6
        assert abs(g.mean() - n * math.sqrt(2 / math.pi)) < 1e-4

    def test_bad_arguments(self):
        with pytest.raises(ParameterError):
            folded_sum_density(3, step=0.0)
        with pytest.raises(ParameterError):
            folded_sum_density(4, truncation=2.0)


class TestErrors:
    def test_nonpositive_s2(self):
        for fn in (g_cube, g_cross):
            with pytest.raises(ParameterError):
                fn(2, 0.0)
            with pytest.raises(ParameterError):
                fn(2, -1.0)

    def test_equicorr_domain(self):
        with pytest.raises(ParameterError):
            g_equicorr(3, -1 / 3)
        with pytest.raises(ParameterError):
            g_simplex(4, -0.25)

    def test_mc_needs_seed_and_samples(self):
        with pytest.raises(ParameterError):
            EvalMethod.mc(10 ** 5, seed=None)
        with pytest.raises(ParameterError):
            EvalMethod.mc(100, seed=1)
        with pytest.raises(ParameterError):
            EvalMethod.quadrature(tol=0.0)


def test_mc_deterministic_across_threads():
    a = g_cross(3, 1.0, EvalMethod.mc(10 ** 5, seed=3, threads=1))
    b = g_cross(3, 1.0, EvalMethod.mc(10 ** 5, seed=3, threads=4))
    assert a.value == b.value and a.error_bound == b.error_bound


@pytest.mark.parametrize("n", [1, 4, 16])
@pytest.mark.parametrize("s2", [1e-12, 1e-6, 1e-2, 1e4, 1e8])
def test_g_cube_extreme_scale(n, s2):
    mpmath.mp.dps = 30
    s = mpmath.sqrt(s2)
    ref = mpmath.quad(lambda t: mpmath.npdf(t) * mpmath.erf(t / (s * mpmath.sqrt(2))) ** n,
                      [0, min(8 * s, 1), 1, 4, 12, mpmath.inf])
    assert abs(g_cube(n, s2).value - float(ref)) < 1e-12

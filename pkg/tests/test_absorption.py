import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conic_geom.absorption import (
    f_cross_d2,
    f_cross_d2_parts,
    laplace_grid,
    laplace_lhs_exact_d2,
    laplace_lhs_numeric,
    laplace_lhs_quad_d2,
    laplace_rhs,
    p_cross,
    p_cube,
)
from conic_geom.conic import intrinsic_volumes
from conic_geom.core import AbsorptionQuery, ConeSpec, ParameterError
from conic_geom.gfun import g_cube, g_simplex
from conic_geom.mc.oracles import estimate_absorption, estimate_random_point_absorption


class TestExamples:
    def test_p_cross(self):
        assert abs(p_cross(3, 1, 1.0) - 0.25) < 1e-10
        assert_allclose(p_cross(2, 2, 1.0), 4 * g_cube(1, 2.0).value, atol=1e-12)
        assert_allclose(p_cross(2, 2, 1.0), 0.7836531, atol=1e-7)

    def test_p_cube(self):
        assert abs(p_cube(1, 1, 1.0) - 0.5) < 1e-10
        assert abs(p_cube(2, 2, 1.0) - 2 / 3) < 1e-10

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_p_cross_one_dimensional(self, n):
        # by exchangeability |X| is the largest of n + 1 absolute values w.p. 1/(n+1)
        assert abs(p_cross(n, 1, 1.0) - 1 / (n + 1)) < 1e-10

    def test_far_point(self):
        for n, d in [(2, 2), (4, 3)]:
            assert p_cross(n, d, 1e8) > 0.999
            assert p_cube(n, d, 1e8) > 0.999

    def test_domain(self):
        with pytest.raises(ParameterError):
            p_cross(2, 3, 1.0)
        with pytest.raises(ParameterError):
            p_cube(2, 2, 0.0)


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3), (5, 4)])
@pytest.mark.parametrize("s2", [0.25, 1.0, 4.0])
def test_parity_complement(n, d, s2):
    for fam, p in (("cross", p_cross), ("cube", p_cube)):
        v = intrinsic_volumes(ConeSpec(fam, n, s2))
        other = 2 * sum(v[k] for k in range(d + 1, len(v), 2))
        assert abs(p(n, d, s2) + other - 1) < 1e-6


@pytest.mark.parametrize("fam,n,d,s2", [("cross", 3, 2, 0.25), ("cross", 4, 3, 4.0), ("cube", 3, 3, 1.0),
                                        ("cube", 4, 2, 0.25)])
def test_random_point_mc(fam, n, d, s2):
    q = AbsorptionQuery(fam, n, d, s2=s2)
    est = estimate_random_point_absorption(q, 10 ** 5, seed=31)
    exact = p_cross(n, d, s2) if fam == "cross" else p_cube(n, d, s2)
    assert est.agrees(exact)


class TestPlanarFormula:
    def test_origin(self):
        for n in (2, 3, 6):
            assert f_cross_d2(n, 0.0) == 0.0

    def test_limit(self):
        assert f_cross_d2(3, 40.0) > 1 - 1e-12

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_monotone_and_bounded(self, n):
        u = np.linspace(0, 12, 61)
        f = np.array([f_cross_d2(n, x) for x in u])
        assert (np.diff(f) >= -1e-12).all()
        assert f.min() >= 0 and f.max() <= 1

    def test_parts(self):
        r = f_cross_d2_parts(3, 1.0)
        assert r.excess == 0.0
        assert_allclose(r.value, r.cdf + r.density)

    def test_domain(self):
        with pytest.raises(ParameterError):
            f_cross_d2(1, 1.0)
        with pytest.raises(ParameterError):
            f_cross_d2(3, -0.1)

    @pytest.mark.parametrize("u", [0.25, 1.0])
    def test_vs_mc(self, u):
        q = AbsorptionQuery("cross", 3, 2)
        est = estimate_absorption(q, math.sqrt(2 * u), 10 ** 5, seed=41)
        assert est.agrees(f_cross_d2(3, u))

    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
    def test_laplace_transform_of_formula(self, n, lam):
        # the planar formula integrated against e^{-lam u} reproduces the cone side
        assert_allclose(laplace_lhs_quad_d2(n, lam), laplace_rhs("cross", n, 2, lam), rtol=1e-8)


class TestLaplace:
    def test_examples(self):
        assert_allclose(laplace_rhs("cross", 3, 2, 1.0), 6 * g_cube(2, 2.0).value, atol=1e-12)
        assert_allclose(laplace_rhs("cube", 2, 2, 1.0), 4 * g_simplex(2, 1.0).value, atol=1e-12)
        assert_allclose(laplace_rhs("cube", 2, 2, 1.0), 2 / 3, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 5])
    @pytest.mark.parametrize("lam", [0.3, 1.0, 3.0])
    def test_planar_simplifications(self, n, lam):
        assert_allclose(laplace_rhs("cross", n, 2, lam), 2 * n / lam * g_cube(n - 1, lam + 1).value, rtol=1e-9)
        assert_allclose(laplace_rhs("cube", n, 2, lam), 2 ** n / lam * g_simplex(n, lam).value, rtol=1e-9)

    def test_general_d(self):
        for fam, p in (("cross", p_cross), ("cube", p_cube)):
            for n, d, lam in [(4, 3, 0.7), (5, 4, 2.0), (3, 1, 1.5)]:
                assert_allclose(laplace_rhs(fam, n, d, lam), math.gamma(d / 2) * lam ** (-d / 2) * p(n, d, 1 / lam))

    def test_large_lambda_decays(self):
        vals = [laplace_rhs("cross", 3, 2, lam) for lam in (1.0, 10.0, 100.0)]
        assert vals[0] > vals[1] > vals[2] > 0

    def test_grid(self):
        u = laplace_grid(2, 1.0)
        assert len(u) == 64 and u[0] == 0.0
        assert math.exp(-u[-1]) == pytest.approx(1e-12, rel=1e-6)
        u3 = laplace_grid(3, 0.5)
        assert math.sqrt(u3[-1]) * math.exp(-0.5 * u3[-1]) == pytest.approx(1e-12, rel=1e-6)

    def test_trapezoid_bias_small(self):
        for lam in (0.5, 1.0, 2.0):
            exact = laplace_rhs("cross", 3, 2, lam)
            assert abs(laplace_lhs_exact_d2(3, lam) / exact - 1) < 0.01

    @pytest.mark.parametrize("fam", ["cross", "cube"])
    def test_numeric_vs_rhs(self, fam):
        rhs = laplace_rhs(fam, 3, 2, 1.0)
        est = laplace_lhs_numeric(fam, 3, 2, 1.0, 5000, seed=2)
        assert est.agrees(rhs, atol=0.02 * rhs)

    def test_numeric_deterministic(self):
        a = laplace_lhs_numeric("cube", 3, 2, 1.0, 1500, seed=8, threads=1)
        b = laplace_lhs_numeric("cube", 3, 2, 1.0, 1500, seed=8, threads=2)
        assert a == b

    def test_domain(self):
        with pytest.raises(ParameterError):
            laplace_rhs("cross", 3, 2, 0.0)
        with pytest.raises(ParameterError):
            laplace_rhs("cross", 1, 2, 1.0)

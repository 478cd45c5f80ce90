import math

from hypothesis import given, settings
from hypothesis import strategies as st

from conic_geom.absorption import p_cross, p_cube
from conic_geom.conic import grassmann_angle_from, intrinsic_volumes, polar
from conic_geom.core import ConeSpec

scale = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)
dims = st.integers(min_value=1, max_value=9)
fams = st.sampled_from(["cube", "cross"])


@settings(max_examples=60, deadline=None)
@given(fams, dims, scale)
def test_normalization_and_parity(fam, n, s2):
    v = intrinsic_volumes(ConeSpec(fam, n, s2))
    assert abs(v.values.sum() - 1) < 1e-6
    assert abs(v.values[1::2].sum() - 0.5) < 1e-6
    assert (v.values >= -1e-12).all()


@settings(max_examples=40, deadline=None)
@given(fams, dims, scale)
def test_polarity_reverses(fam, n, s2):
    c = ConeSpec(fam, n, s2)
    a = intrinsic_volumes(c).values
    b = intrinsic_volumes(polar(c)).values
    assert max(abs(a - b[::-1])) < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=7), st.floats(min_value=-0.12, max_value=5.0))
def test_simplex_normalization(n, r):
    v = intrinsic_volumes(ConeSpec("simplex", n, r)).values
    assert abs(v.sum() - 1) < 1e-6 and (v >= -1e-9).all()


@settings(max_examples=40, deadline=None)
@given(fams, st.integers(min_value=2, max_value=7), scale, st.data())
def test_grassmann_pair_sums_to_one(fam, n, s2, data):
    l = data.draw(st.integers(min_value=1, max_value=n))
    hit, miss = grassmann_angle_from(intrinsic_volumes(ConeSpec(fam, n, s2)), l)
    assert abs(hit + miss - 1) < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=7), st.data(), st.floats(min_value=0.05, max_value=20.0))
def test_absorption_monotone_in_scale(n, data, s2):
    d = data.draw(st.integers(min_value=1, max_value=n))
    for p in (p_cross, p_cube):
        lo, hi = p(n, d, s2), p(n, d, 2 * s2)
        assert 0 <= lo <= hi + 1e-9 <= 1 + 1e-9
    assert math.isfinite(p_cross(n, d, s2))

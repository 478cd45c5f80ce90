"""Conic intrinsic volumes, polarity, Grassmann angles and crosspolytope angles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ConeFamily, ConeSpec, IntrinsicVolumeVector, ParameterError, binomial
from .gfun import QUADRATURE, EvalMethod, GValue, g_cross, g_cube, g_equicorr, g_simplex


@dataclass(frozen=True)
class GrassmannQuery:
    cone: ConeSpec
    l: int

    def __post_init__(self):
        if not isinstance(self.l, (int, np.integer)) or not 0 <= self.l <= self.cone.ambient_dim:
            raise ParameterError(f"codimension l must lie in 0..{self.cone.ambient_dim}")


def _product(coef, *gs):
    """``coef * prod(g)`` with first-order propagation of the error bounds."""
    val = coef
    for g in gs:
        val *= g.value
    err = 0.0
    for i, g in enumerate(gs):
        others = coef
        for h in gs[:i] + gs[i + 1:]:
            others *= h.value
        err += (others * g.error_bound) ** 2
    return val, math.sqrt(err)


def _g_eq(m, c, method):
    if m == 0:
        return GValue(1.0, method, 0.0)
    return g_equicorr(m, c, method)


def _cube_values(n, s2, method):
    g0 = g_cross(n, 1.0 / s2, method)
    out = [(g0.value, g0.error_bound)]
    for k in range(1, n + 2):
        out.append(_product(
            2.0 ** (n - k + 1) * binomial(n, k - 1),
            g_cube(k - 1, s2 + n - k + 1, method),
            g_simplex(n - k + 1, 1.0 / s2, method),
        ))
    return out


def _cross_values(n, s2, method):
    out = []
    for k in range(0, n + 1):
        out.append(_product(
            2.0 ** k * binomial(n, k),
            g_cube(n - k, 1.0 / s2 + k, method),
            g_simplex(k, s2, method),
        ))
    g = g_cross(n, s2, method)
    out.append((g.value, g.error_bound))
    return out


def _simplex_values(n, r, method):
    out = []
    for k in range(0, n + 1):
        d = 1.0 + k * r
        out.append(_product(
            float(binomial(n, k)),
            _g_eq(k, -r / d, method),
            _g_eq(n - k, r / d, method),
        ))
    return out


def intrinsic_volumes(c: ConeSpec, method: EvalMethod = QUADRATURE) -> IntrinsicVolumeVector:
    """Conic intrinsic volumes ``v_0, ..., v_m`` of ``c`` (``m`` = ambient dimension).

    In Monte Carlo mode every g-value is an independent estimate and the
    returned ``stderr`` is the first-order propagated error of each product.
    """
    if c.family is ConeFamily.CUBE:
        vals = _cube_values(c.n, c.param, method)
    elif c.family is ConeFamily.CROSS:
        vals = _cross_values(c.n, c.param, method)
    else:
        vals = _simplex_values(c.n, c.param, method)
    v = np.array([x[0] for x in vals])
    e = np.array([x[1] for x in vals])
    return IntrinsicVolumeVector(v, e)


def polar(c: ConeSpec) -> ConeSpec:
    """Polar cone, up to isometry."""
    if c.family is ConeFamily.CUBE:
        return ConeSpec(ConeFamily.CROSS, c.n, 1.0 / c.param)
    if c.family is ConeFamily.CROSS:
        return ConeSpec(ConeFamily.CUBE, c.n, 1.0 / c.param)
    return ConeSpec(ConeFamily.SIMPLEX, c.n, -c.param / (1.0 + c.n * c.param))


def grassmann_angle_from(v: IntrinsicVolumeVector, l: int) -> tuple[float, float]:
    """``(P(C meets L nontrivially), P(C meets L only at 0))`` for codim ``l``."""
    hit = 2.0 * sum(v[i] for i in range(l + 1, len(v.values), 2))
    miss = 2.0 * sum(v[i] for i in range(l - 1, -1, -2))
    return hit, miss


def grassmann_angle(q: GrassmannQuery, method: EvalMethod = QUADRATURE) -> float:
    """Probability that a uniform subspace of codimension ``q.l`` meets the
    cone outside the origin."""
    return grassmann_angle_from(intrinsic_volumes(q.cone, method), q.l)[0]


def grassmann_angle_complement(q: GrassmannQuery, method: EvalMethod = QUADRATURE) -> float:
    return grassmann_angle_from(intrinsic_volumes(q.cone, method), q.l)[1]


def _check_face(n, k):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError("n must be a positive integer")
    if not isinstance(k, (int, np.integer)) or not 0 <= k <= n - 1:
        raise ParameterError(f"face dimension must lie in 0..{n - 1}")


def crosspoly_internal_angle(n: int, k: int, method: EvalMethod = QUADRATURE) -> GValue:
    """Internal solid angle of the ``n``-crosspolytope at a ``k``-face."""
    _check_face(n, k)
    return g_cross(n - k - 1, 1.0 / (k + 1), method)


def crosspoly_external_angle(n: int, k: int, method: EvalMethod = QUADRATURE) -> GValue:
    """Normal (external) solid angle of the ``n``-crosspolytope at a ``k``-face."""
    _check_face(n, k)
    return g_cube(n - k - 1, float(k + 1), method)

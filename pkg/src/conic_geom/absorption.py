"""Absorption probabilities of symmetric Gaussian polytopes and Gaussian zonotopes.

With ``X_1, ..., X_n`` i.i.d. standard Gaussian in ``R^d``:

* ``p_cross(n, d, s2)``: probability that ``sigma X`` lies outside ``conv{+-X_i}``;
* ``p_cube(n, d, s2)``: probability that ``sigma X`` lies outside ``sum [-X_i, X_i]``.

Both are twice a parity tail of the intrinsic volumes of the crosspolytope
and cube cones. For a deterministic point ``x`` with ``|x| = sqrt(2u)`` the
non-absorption probability ``f(sqrt(2u))`` is linked to ``p`` by a Laplace
transform in ``u``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .conic import intrinsic_volumes
from .core import (
    AbsorptionFamily,
    AbsorptionQuery,
    ConeFamily,
    ConeSpec,
    Estimate,
    ParameterError,
)
from .gfun import QUADRATURE, EvalMethod
from .mc.oracles import nonabsorption_grid

LAPLACE_GRID_POINTS = 64
LAPLACE_WEIGHT_FLOOR = 1e-12


def _query(family, n, d, s2=None):
    return AbsorptionQuery(family, n, d, s2=s2)


def _p(cone_family, n, d, s2, method):
    v = intrinsic_volumes(ConeSpec(cone_family, n, s2), method)
    return min(max(2.0 * v.tail_down(d - 1), 0.0), 1.0)


def p_cross(n: int, d: int, s2: float, method: EvalMethod = QUADRATURE) -> float:
    """Probability that ``sigma X`` is not in the symmetric Gaussian polytope."""
    q = _query(AbsorptionFamily.SYMMETRIC_GAUSSIAN, n, d, s2)
    return _p(ConeFamily.CROSS, q.n, q.d, float(s2), method)


def p_cube(n: int, d: int, s2: float, method: EvalMethod = QUADRATURE) -> float:
    """Probability that ``sigma X`` is not in the Gaussian zonotope."""
    q = _query(AbsorptionFamily.GAUSSIAN_ZONOTOPE, n, d, s2)
    return _p(ConeFamily.CUBE, q.n, q.d, float(s2), method)


def p_family(family, n: int, d: int, s2: float, method: EvalMethod = QUADRATURE) -> float:
    family = AbsorptionFamily.parse(family)
    if family is AbsorptionFamily.SYMMETRIC_GAUSSIAN:
        return p_cross(n, d, s2, method)
    return p_cube(n, d, s2, method)


@dataclass(frozen=True)
class PlanarNonAbsorption:
    """Pieces of the planar non-absorption formula at one ``u``.

    ``value`` is ``cdf + density`` clamped to ``[0, 1]``; ``excess`` is the
    amount removed by clamping.
    """

    cdf: float
    density: float
    value: float
    excess: float


def _max_sq_density(n):
    # density of L_n^2 / 2 with L_n = max |xi_i|: d/dt erf(sqrt t)^n
    def f(t):
        if t <= 0.0:
            return 4.0 / math.pi if n == 2 else 0.0
        s = math.sqrt(t)
        return n * math.erf(s) ** (n - 1) * math.exp(-t) / math.sqrt(math.pi * t)
    return f


def f_cross_d2_parts(n: int, u: float) -> PlanarNonAbsorption:
    """Evaluate both convolution integrals after the substitution ``t = u - v^2``."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ParameterError("n must be an integer >= 2")
    if not (u >= 0 and math.isfinite(u)):
        raise ParameterError("u must be a finite nonnegative number")
    if u == 0:
        # right limit: both integrals vanish with the interval
        return PlanarNonAbsorption(0.0, 0.0, 0.0, 0.0)
    fl = _max_sq_density(int(n))
    b = math.sqrt(u)

    def cdf_integrand(v):
        return fl(u - v * v) * math.erf(v) * 2.0 * v

    def dens_integrand(v):
        return fl(u - v * v) * math.exp(-v * v) * 2.0 / math.sqrt(math.pi)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        cdf = integrate.quad(cdf_integrand, 0.0, b, epsabs=1e-13, epsrel=1e-12, limit=400)[0]
        dens = integrate.quad(dens_integrand, 0.0, b, epsabs=1e-13, epsrel=1e-12, limit=400)[0]
    raw = cdf + dens
    value = min(max(raw, 0.0), 1.0)
    return PlanarNonAbsorption(cdf, dens, value, raw - value)


def f_cross_d2(n: int, u: float) -> float:
    """Probability that a fixed point of norm ``sqrt(2u)`` in the plane lies
    outside ``conv{+-X_1, ..., +-X_n}``."""
    return f_cross_d2_parts(n, u).value


def _check_lambda(lam):
    if not (lam > 0 and math.isfinite(lam)):
        raise ParameterError("lambda must be positive and finite")
    return float(lam)


def laplace_rhs(family, n: int, d: int, lam: float, method: EvalMethod = QUADRATURE) -> float:
    """``int_0^inf f(sqrt(2u)) u^{d/2-1} e^{-lam u} du`` from the intrinsic volumes."""
    lam = _check_lambda(lam)
    q = _query(family, n, d)
    return math.gamma(q.d / 2.0) * lam ** (-q.d / 2.0) * p_family(q.family, q.n, q.d, 1.0 / lam, method)


def laplace_grid(d: int, lam: float, points: int = LAPLACE_GRID_POINTS):
    """Geometric ``u``-grid (with ``u = 0`` prepended) ending where the weight
    ``u^{d/2-1} e^{-lam u}`` drops below the floor."""
    lam = _check_lambda(lam)
    a = d / 2.0 - 1.0
    mode = a / lam if a > 0 else 0.0

    def logw(u):
        return a * math.log(u) - lam * u - math.log(LAPLACE_WEIGHT_FLOOR)

    hi = max(mode, 1.0 / lam) * 2.0 + 1.0
    while logw(hi) > 0:
        hi *= 2.0
    u_max = optimize.brentq(logw, max(mode, 1e-300) if a > 0 else 1e-12, hi)
    u_min = 1e-4 * min(u_max, 1.0 / lam)
    return np.concatenate([[0.0], np.geomspace(u_min, u_max, points - 1)])


def laplace_lhs_numeric(family, n: int, d: int, lam: float, mc_samples: int, seed,
                        threads=None, points: int = LAPLACE_GRID_POINTS) -> Estimate:
    """Monte Carlo value of the Laplace transform side.

    Every point cloud is tested against all grid radii, so each cloud yields
    one trapezoid integral; mean and standard error are taken over clouds.
    """
    lam = _check_lambda(lam)
    q = _query(family, n, d)
    u = laplace_grid(q.d, lam, points)
    with np.errstate(divide="ignore"):
        w = np.where(u > 0, u ** (q.d / 2.0 - 1.0), 1.0 if q.d == 2 else 0.0) * np.exp(-lam * u)
    if q.d == 1:
        # u^{-1/2} is singular at 0; the first interval uses f(0) = 0 for n >= 1
        w[0] = 0.0
    ind = nonabsorption_grid(q, np.sqrt(2.0 * u), mc_samples, seed, threads)
    good = ~np.isnan(ind).any(axis=1)
    discarded = int((~good).sum())
    if discarded > 1e-3 * mc_samples:
        raise RuntimeError(f"{discarded} degenerate point clouds out of {mc_samples}")
    vals = np.trapezoid(ind[good] * w, u, axis=1)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return Estimate(mean, stderr, int(len(vals)), int(seed), discarded)


def laplace_lhs_exact_d2(n: int, lam: float, points: int = LAPLACE_GRID_POINTS) -> float:
    """Trapezoid value of the Laplace side on the same grid using ``f_cross_d2``
    in place of the Monte Carlo indicators; isolates the discretization bias."""
    u = laplace_grid(2, lam, points)
    f = np.array([f_cross_d2(n, x) for x in u])
    return float(np.trapezoid(f * np.exp(-lam * u), u))


def laplace_lhs_quad_d2(n: int, lam: float) -> float:
    """Adaptive-quadrature value of the Laplace side with ``f_cross_d2``."""
    lam = _check_lambda(lam)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(lambda x: f_cross_d2(n, x) * math.exp(-lam * x), 0.0, np.inf, limit=200)[0]


__all__ = [
    "PlanarNonAbsorption",
    "f_cross_d2",
    "f_cross_d2_parts",
    "laplace_grid",
    "laplace_lhs_exact_d2",
    "laplace_lhs_numeric",
    "laplace_lhs_quad_d2",
    "laplace_rhs",
    "p_cross",
    "p_cube",
    "p_family",
]

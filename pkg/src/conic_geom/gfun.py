"""Solid-angle functions of the simplex, crosspolytope and cube cones.

``g_cube(n, s2)``   = P(xi_{n+1} / sigma >= max_j |xi_j|)
``g_cross(n, s2)``  = P(xi_{n+1} / sigma >= sum_j |xi_j|)
``g_equicorr(m, c)`` = P(eta_1 < 0, ..., eta_m < 0), Cov(eta) = I + c J
``g_simplex(n, r)`` = g_equicorr(n, -r / (1 + n r))
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate, signal, special, stats

from .core import GridDensity, ParameterError
from .mc.rng import check_seed, estimate_mean

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)
GRID_STEP = 2.0 ** -10

# below this value / L1-mass ratio the c < 0 integral is redone in extended precision
_CANCELLATION_RATIO = 1e-9


@dataclass(frozen=True)
class EvalMethod:
    kind: str = "quadrature"
    samples: int = 10 ** 7
    seed: int | None = None
    tol: float = 1e-10
    threads: int | None = None

    def __post_init__(self):
        if self.kind not in ("quadrature", "mc"):
            raise ParameterError(f"unknown evaluation method {self.kind!r}")
        if not self.tol > 0:
            raise ParameterError("tolerance must be positive")
        if self.kind == "mc":
            if self.samples < 10 ** 4:
                raise ParameterError("Monte Carlo evaluation needs at least 1e4 samples")
            check_seed(self.seed)

    @classmethod
    def quadrature(cls, tol=1e-10):
        return cls("quadrature", tol=tol)

    @classmethod
    def mc(cls, samples, seed, threads=None):
        return cls("mc", samples=int(samples), seed=seed, threads=threads)

    @property
    def is_mc(self) -> bool:
        return self.kind == "mc"


QUADRATURE = EvalMethod.quadrature()


@dataclass(frozen=True)
class GValue:
    value: float
    method: EvalMethod
    error_bound: float

    def __float__(self):
        return self.value


def _exact(v, method):
    return GValue(float(v), method, 0.0)


def _quad(f, a, b, tol, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=tol * 1e-2, epsrel=1e-12, limit=500, **kw)
    return val, err


def _mc(indicator, method, stream):
    est = estimate_mean(indicator, method.samples, method.seed, stream, threads=method.threads)
    return GValue(min(max(est.mean, 0.0), 1.0), method, est.stderr)


def _check_s2(s2):
    if not (isinstance(s2, (int, float, np.floating)) and s2 > 0 and math.isfinite(s2)):
        raise ParameterError(f"sigma^2 must be positive and finite, got {s2!r}")
    return float(s2)


def _check_dim(n, name="n"):
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ParameterError(f"{name} must be a nonnegative integer")
    return int(n)


def g_cube(n: int, s2: float, method: EvalMethod = QUADRATURE) -> GValue:
    """Solid angle of the cube cone ``C_n(s2)``."""
    n, s2 = _check_dim(n), _check_s2(s2)
    if n == 0:
        return _exact(0.5, method)
    sigma = math.sqrt(s2)
    if method.is_mc:
        def ind(rng, count):
            xi = rng.standard_normal((count, n + 1))
            return (xi[:, n] >= sigma * np.abs(xi[:, :n]).max(axis=1)).astype(float)
        return _mc(ind, method, f"g_cube/{n}/{s2!r}")

    def f(t):
        return math.exp(-0.5 * t * t) / SQRT2PI * math.erf(t / (sigma * SQRT2)) ** n

    # the Gaussian factor is below 1e-31 past t = 12; split where erf saturates
    edge = 8.0 * sigma
    points = [edge] if edge < 12.0 else None
    val, err = _quad(f, 0.0, 12.0, method.tol, points=points)
    return GValue(min(max(val, 0.0), 1.0), method, err)


def folded_sum_density(n: int, step: float = GRID_STEP, truncation: float | None = None) -> GridDensity:
    """Density of ``|xi_1| + ... + |xi_n|`` on a uniform grid.

    The half-normal density is convolved with itself ``n - 1`` times using the
    trapezoid rule on the grid nodes.
    """
    n = _check_dim(n)
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not step > 0:
        raise ParameterError("grid step must be positive")
    if truncation is None:
        truncation = n + 8.0 * math.sqrt(n) + 8.0
    if truncation < n + 6.0 * math.sqrt(n):
        raise ParameterError("truncation too small to hold the mass of the sum")
    size = int(math.ceil(truncation / step)) + 1
    x = step * np.arange(size)
    half = 2.0 * stats.norm.pdf(x)
    dens = half.copy()
    for _ in range(n - 1):
        full = signal.fftconvolve(dens, half)[:size] * step
        full -= 0.5 * step * (dens[0] * half + dens * half[0])
        dens = np.maximum(full, 0.0)
    return GridDensity(0.0, step, dens)


def _g_cross_grid(n, sigma, step):
    dens = folded_sum_density(n, step)
    tail = special.ndtr(-sigma * dens.grid)
    return float(np.trapezoid(tail * dens.values, dx=step))


def g_cross(n: int, s2: float, method: EvalMethod = QUADRATURE, step: float = GRID_STEP) -> GValue:
    """Solid angle of the crosspolytope cone ``C_n(s2)``.

    For ``n >= 2`` the grid integral is evaluated at steps ``h`` and ``2h``
    and combined by Richardson extrapolation; the reported error bound is
    the size of that correction.
    """
    n, s2 = _check_dim(n), _check_s2(s2)
    if n == 0:
        return _exact(0.5, method)
    sigma = math.sqrt(s2)
    if method.is_mc:
        def ind(rng, count):
            xi = rng.standard_normal((count, n + 1))
            return (xi[:, n] >= sigma * np.abs(xi[:, :n]).sum(axis=1)).astype(float)
        return _mc(ind, method, f"g_cross/{n}/{s2!r}")
    if n == 1:
        def f(s):
            return 2.0 * math.exp(-0.5 * s * s) / SQRT2PI * special.ndtr(-sigma * s)
        val, err = _quad(f, 0.0, 40.0, method.tol)
        return GValue(min(max(val, 0.0), 1.0), method, err)
    fine = _g_cross_grid(n, sigma, step)
    coarse = _g_cross_grid(n, sigma, 2 * step)
    val = (4.0 * fine - coarse) / 3.0
    return GValue(min(max(val, 0.0), 1.0), method, abs(fine - coarse) / 3.0)


def _equicorr_negative(m, c, tol):
    a = math.sqrt(-c)
    kappa = 1.0 - m * (-c)
    scale = a / SQRT2

    # Phi(i y) = e^{x^2} (e^{-x^2}/2 + i D(x)/sqrt(pi)) with x = y/sqrt(2), D = Dawson
    def w(t):
        x = scale * t
        return complex(math.exp(-x * x) / 2.0, special.dawsn(x) / math.sqrt(math.pi))

    def f(t):
        return 2.0 * math.exp(-0.5 * kappa * t * t) * (w(t) ** m).real / SQRT2PI

    def fabs(t):
        return 2.0 * math.exp(-0.5 * kappa * t * t) * abs(w(t)) ** m / SQRT2PI

    upper = math.sqrt(2.0 * 80.0 / kappa)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, 0.0, upper, epsabs=0.0, epsrel=1e-13, limit=1000)
        mass = integrate.quad(fabs, 0.0, upper, limit=1000)[0]
    if abs(val) < _CANCELLATION_RATIO * mass:
        with mpmath.workdps(40):
            am = mpmath.sqrt(-mpmath.mpf(c)) / mpmath.sqrt(2)
            half = mpmath.mpf(1) / 2

            def fm(t):
                return 2 * mpmath.npdf(t) * mpmath.re((half + 1j * half * mpmath.erfi(am * t)) ** m)

            pts = [0] + [2.0 ** k for k in range(0, 7)] + [mpmath.inf]
            val = float(mpmath.quad(fm, pts))
        err = abs(val) * 1e-12
    return val, max(err, 1e-16 * mass)


def g_equicorr(m: int, c: float, method: EvalMethod = QUADRATURE) -> GValue:
    """Orthant probability of a centred Gaussian vector with covariance ``I + c J``.

    ``c >= 0`` uses ``eta = xi + sqrt(c) zeta``. For ``-1/m < c < 0`` the same
    one-dimensional integral is continued to imaginary ``sqrt(c)``; it
    converges exactly on the admissible range.
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ParameterError("m must be a positive integer")
    m = int(m)
    c = float(c)
    if not c > -1.0 / m:
        raise ParameterError(f"covariance I + cJ is not positive definite for c={c}, m={m}")
    if m == 1:
        return _exact(0.5, method)
    if c == 0.0:
        return _exact(2.0 ** -m, method)
    if method.is_mc:
        chol = np.linalg.cholesky(np.eye(m) + c * np.ones((m, m)))

        def pairs(rng, count):
            z = rng.standard_normal((count, m)) @ chol.T
            return 0.5 * ((z < 0).all(axis=1).astype(float) + (z > 0).all(axis=1).astype(float))

        # each antithetic pair is one draw of the estimator
        npairs = max(method.samples // 2, 1)
        sub = EvalMethod("mc", samples=max(npairs, 10 ** 4), seed=method.seed, threads=method.threads)
        est = _mc(pairs, sub, f"g_equicorr/{m}/{c!r}")
        return GValue(est.value, method, est.error_bound)
    if c > 0:
        a = math.sqrt(c)

        def f(t):
            return math.exp(-0.5 * t * t) / SQRT2PI * special.ndtr(a * t) ** m

        val, err = _quad(f, -40.0, 40.0, method.tol, points=[0.0])
    else:
        val, err = _equicorr_negative(m, c, method.tol)
    return GValue(min(max(val, 0.0), 1.0), method, err)


def g_simplex(n: int, r: float, method: EvalMethod = QUADRATURE) -> GValue:
    """Solid angle of ``C_n(r)``, the cone with Gram matrix ``r + delta_ij``."""
    n = _check_dim(n)
    r = float(r)
    if n == 0:
        return _exact(1.0, method)
    if n == 1:
        return _exact(0.5, method)
    if not r > -1.0 / n:
        raise ParameterError(f"simplex cone needs r > -1/n, got r={r} for n={n}")
    return g_equicorr(n, -r / (1.0 + n * r), method)

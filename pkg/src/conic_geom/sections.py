"""Expected face numbers of central sections of the cube, crosspolytope and
regular simplex by uniform random linear subspaces, and their asymptotics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conic import intrinsic_volumes
from .core import (
    ConeFamily,
    ConeSpec,
    Estimate,
    ParameterError,
    PolytopeFamily,
    PolytopeSpec,
    binomial,
    face_count,
)
from .gfun import QUADRATURE, EvalMethod, g_simplex
from .mc import oracles
from .mc.rng import check_seed, estimate_mean, map_blocks


@dataclass(frozen=True)
class SectionQuery:
    """``j``-faces of ``polytope ∩ L`` with ``L`` uniform of dimension ``k``."""

    polytope: PolytopeSpec
    k: int
    j: int

    def __post_init__(self):
        n = self.polytope.n
        if not all(isinstance(x, (int, np.integer)) for x in (self.k, self.j)):
            raise ParameterError("k and j must be integers")
        if not n > self.k > self.j >= 0:
            raise ParameterError(f"need n > k > j >= 0, got n={n}, k={self.k}, j={self.j}")

    @property
    def l(self) -> int:
        return self.polytope.n - self.k


def _cube_hit(n, d, l, method):
    return 2.0 * intrinsic_volumes(ConeSpec(ConeFamily.CUBE, d, float(n - d)), method).tail_up(l + 1)


def _simplex_hit(n, d, l, method):
    v = intrinsic_volumes(ConeSpec(ConeFamily.SIMPLEX, d + 1, -1.0 / (n + 1)), method)
    return 2.0 * v.tail_up(l + 1)


def prob_face_hit(p: PolytopeSpec, d: int, l: int, method: EvalMethod = QUADRATURE) -> float:
    """Probability that a uniform subspace of codimension ``l`` meets a fixed ``d``-face."""
    n = p.n
    if not 1 <= l <= n - 1:
        raise ParameterError(f"codimension l must lie in 1..{n - 1}")
    if not l <= d <= n - 1:
        raise ParameterError(f"face dimension d must lie in {l}..{n - 1}")
    if p.family is PolytopeFamily.CUBE:
        return _cube_hit(n, d, l, method)
    if p.family is PolytopeFamily.CROSSPOLYTOPE:
        return sum(binomial(d, m) for m in range(l, d + 1)) / 2.0 ** d
    return _simplex_hit(n, d, l, method)


def expected_faces(q: SectionQuery, method: EvalMethod = QUADRATURE) -> float:
    """Expected number of ``j``-faces of the random section."""
    p, l = q.polytope, q.l
    return face_count(p, q.j + l) * prob_face_hit(p, q.j + l, l, method)


def simplex_deficit(i: int, l: int, n: int, method: EvalMethod = QUADRATURE) -> float:
    """``C(n+1, n-i+l+1) - E[f_{n-i}]`` for a codimension-``l`` section of the simplex.

    Evaluated through the complementary parity tail so that no cancellation
    occurs when the deficit is tiny.
    """
    _check_deficit_args(i, l, n)
    d = n - i + l
    v = intrinsic_volumes(ConeSpec(ConeFamily.SIMPLEX, d + 1, -1.0 / (n + 1)), method)
    return 2.0 * binomial(n + 1, d + 1) * v.tail_down(l - 1)


def _check_deficit_args(i, l, n):
    if not (isinstance(i, (int, np.integer)) and isinstance(l, (int, np.integer))):
        raise ParameterError("i and l must be integers")
    if not i > l >= 1:
        raise ParameterError("need i > l >= 1")
    if not (isinstance(n, (int, np.integer)) and n > i - 1 and n - i + l + 1 >= 0):
        raise ParameterError("n too small for the given (i, l)")


def simplex_deficit_constant(i: int, l: int) -> float:
    if not i > l >= 1:
        raise ParameterError("need i > l >= 1")
    return (math.pi ** ((i - 2) / 2) * 2.0 ** ((i - 2 * l + 1) / 2) * math.exp((3 * l - 3 * i) / 2)
            / (math.factorial(l - 1) * math.factorial(i - l) * (i - l) ** ((i - 1) / 2)))


def asymp_simplex_deficit(i: int, l: int, n: int) -> float:
    """Leading-order deficit of the expected ``(n-i)``-face count of a
    codimension-``l`` simplex section relative to the face count of the simplex."""
    _check_deficit_args(i, l, n)
    logv = (math.log(simplex_deficit_constant(i, l)) - 0.5 * n * math.log(n)
            + 0.5 * (3 * i - 3) * math.log(n) + 0.5 * n * math.log((i - l) * math.e / (2 * math.pi)))
    return math.exp(logv)


def asymp_cube_lowdim(j: int, l: int, n: int) -> float:
    """Leading-order ``E[f_j]`` of a codimension-``l`` cube section, ``j, l`` fixed."""
    if not (j >= 0 and l >= 1 and n >= 1):
        raise ParameterError("need j >= 0, l >= 1, n >= 1")
    logv = ((n - j) * math.log(2.0) + (j + l / 2) * math.log(n) - math.lgamma(l + 1) - math.lgamma(j + 1)
            + math.lgamma((l + 1) / 2) - (l + 1) / 2 * math.log(math.pi))
    return math.exp(logv)


def asymp_cube_fixed_codim(m: int, l: int, n: int) -> float:
    """Leading-order ``E[f_{n-m}]`` of a codimension-``l`` cube section, ``m, l`` fixed."""
    if not 1 <= l < m:
        raise ParameterError("need 1 <= l < m")
    if n < 1:
        raise ParameterError("n must be positive")
    return (2.0 * n) ** (m - l) / math.factorial(m - l)


def boroczky_henk_constant(j: int, k: int) -> float:
    """Constant in the growth rate of ``E[f_j]`` for ``k``-dimensional cube sections."""
    if not (isinstance(j, (int, np.integer)) and isinstance(k, (int, np.integer)) and 0 <= j < k):
        raise ParameterError("need 0 <= j < k")
    return (2.0 ** k * math.pi ** ((k - 1) / 2) * math.sqrt(k) * math.factorial(k - 1)
            / (math.factorial(k - j) * math.factorial(j)) * g_simplex(j, 1.0 / (k - j)).value)


def estimate_expected_faces(q: SectionQuery, samples: int, seed, threads=None) -> Estimate:
    """Monte Carlo mean of the number of ``(j+l)``-faces met by the random subspace."""
    return oracles.estimate_face_hits(q.polytope, q.k, q.j, samples, seed, threads)


def estimate_polygon_vertices(p: PolytopeSpec, samples: int, seed, threads=None) -> Estimate:
    """Mean vertex count of exact planar sections ``p ∩ L``, ``dim L = 2``."""
    n = p.n
    if n < 3:
        raise ParameterError("need n >= 3 for a proper planar section")

    def trial(rng, count):
        L, _ = oracles.sample_subspace_batch(n, 2, rng, count)
        counts, degen = oracles.section_vertex_counts(p, L)
        return np.where(degen, np.nan, counts.astype(float))

    return estimate_mean(trial, samples, seed, f"polygon/{p.family.value}/{n}", threads)


@dataclass(frozen=True)
class PlanarAgreement:
    trials: int
    equal: int
    degenerate: int
    vertex_counts: np.ndarray

    @property
    def rate(self) -> float:
        kept = self.trials - self.degenerate
        return self.equal / kept if kept else 0.0


def planar_face_agreement(p: PolytopeSpec, trials: int, seed, threads=None) -> PlanarAgreement:
    """Compare, per sampled plane, the exact section vertex count with the
    number of ``(n-2)``-faces the plane meets."""
    n = p.n
    seed = check_seed(seed)

    def block(rng, count):
        L, Q = oracles.sample_subspace_batch(n, 2, rng, count)
        vc, vd = oracles.section_vertex_counts(p, L)
        hc, hd = oracles.face_hit_counts(p, n - 2, Q)
        degen = vd | hd
        return vc, int(((vc == hc) & ~degen).sum()), int(degen.sum())

    parts = map_blocks(block, trials, seed, f"agree/{p.family.value}/{n}", threads, block_size=2048)
    return PlanarAgreement(
        int(trials),
        sum(x[1] for x in parts),
        sum(x[2] for x in parts),
        np.concatenate([x[0] for x in parts]),
    )

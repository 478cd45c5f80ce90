"""Randomized and optimization-based oracles.

Nothing here evaluates an intrinsic-volume formula; every estimate is built
from Gaussian sampling plus LP feasibility, NNLS projection or exact planar
geometry, so it can be checked against the analytic side independently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..core import (
    AbsorptionFamily,
    AbsorptionQuery,
    ConeSpec,
    Estimate,
    IntrinsicVolumeVector,
    ParameterError,
    PolytopeSpec,
)
from .lp import DEFAULT_TOL, LpResult, feasible_batch
from .nnls import project_batch
from .rng import check_seed, estimate_mean, map_blocks

LP_CHUNK = 1 << 15
POLYGON_TOL = 1e-9


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis (as columns) of a ``dim``-dimensional subspace of ``R^n``."""

    n: int
    dim: int
    columns: np.ndarray

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=float).reshape(self.n, self.dim)
        object.__setattr__(self, "columns", cols)

    def complement(self) -> "SubspaceBasis":
        if self.dim == 0:
            return SubspaceBasis(self.n, self.n, np.eye(self.n))
        q, _ = np.linalg.qr(self.columns, mode="complete")
        return SubspaceBasis(self.n, self.n - self.dim, q[:, self.dim:])


def _haar_orthogonal(rng, n, count):
    """``count`` Haar-distributed orthogonal ``n x n`` matrices."""
    g = rng.standard_normal((count, n, n))
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r, axis1=1, axis2=2)
    bad = np.abs(diag).min(axis=1) < 1e-12
    while bad.any():
        # rank deficiency has probability zero; redraw those matrices
        g[bad] = rng.standard_normal((int(bad.sum()), n, n))
        q, r = np.linalg.qr(g)
        diag = np.diagonal(r, axis1=1, axis2=2)
        bad = np.abs(diag).min(axis=1) < 1e-12
    return q * np.sign(diag)[:, None, :]


def sample_uniform_subspace(n: int, dim: int, stream: np.random.Generator) -> SubspaceBasis:
    """Uniform random ``dim``-dimensional subspace of ``R^n`` via QR of a Gaussian matrix."""
    if not 0 <= dim <= n:
        raise ParameterError("need 0 <= dim <= n")
    if dim == 0:
        return SubspaceBasis(n, 0, np.zeros((n, 0)))
    while True:
        g = stream.standard_normal((n, dim))
        q, r = np.linalg.qr(g)
        d = np.diagonal(r)
        if np.abs(d).min() > 1e-12:
            return SubspaceBasis(n, dim, q * np.sign(d))


def sample_subspace_batch(n: int, dim: int, rng: np.random.Generator, count: int):
    """Return ``(L, Lperp)`` bases of shape ``(count, n, dim)`` and ``(count, n, n - dim)``."""
    q = _haar_orthogonal(rng, n, count)
    return q[:, :, :dim], q[:, :, dim:]


def _lp(A, b, tol):
    feas = np.empty(len(A), dtype=bool)
    degen = np.empty(len(A), dtype=bool)
    for s in range(0, len(A), LP_CHUNK):
        res = feasible_batch(A[s:s + LP_CHUNK], b[s:s + LP_CHUNK], tol)
        feas[s:s + LP_CHUNK] = res.feasible
        degen[s:s + LP_CHUNK] = res.degenerate
    return feas, degen


def _hull_system(P, x):
    """``P`` (B, N, d) points as rows, ``x`` (B, d) -> LP data for ``x in conv P``."""
    B, N, d = P.shape
    A = np.concatenate([np.swapaxes(P, 1, 2), np.ones((B, 1, N))], axis=1)
    b = np.concatenate([x, np.ones((B, 1))], axis=1)
    return A, b


def _zonotope_system(G, x):
    """``G`` (B, n, d) generators as rows. Variables ``mu, s >= 0`` with
    ``lambda = 2 mu - 1`` and ``mu + s = 1``."""
    B, n, d = G.shape
    top = np.concatenate([2.0 * np.swapaxes(G, 1, 2), np.zeros((B, d, n))], axis=2)
    eye = np.broadcast_to(np.eye(n), (B, n, n))
    bottom = np.concatenate([eye, eye], axis=2)
    A = np.concatenate([top, bottom], axis=1)
    b = np.concatenate([x + G.sum(axis=1), np.ones((B, n))], axis=1)
    return A, b


def hull_contains_batch(P, x, tol=DEFAULT_TOL):
    return _lp(*_hull_system(np.asarray(P, float), np.asarray(x, float)), tol)


def zonotope_contains_batch(G, x, tol=DEFAULT_TOL):
    return _lp(*_zonotope_system(np.asarray(G, float), np.asarray(x, float)), tol)


def point_in_hull(points, x, tol=DEFAULT_TOL) -> LpResult:
    """Is ``x`` in the convex hull of ``points`` (one point per row)?"""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if len(P) < 1:
        raise ParameterError("need at least one point")
    A, b = _hull_system(P[None], np.asarray(x, dtype=float)[None])
    return feasible_batch(A, b, tol)[0]


def point_in_zonotope(generators, x, tol=DEFAULT_TOL) -> LpResult:
    """Is ``x = sum lambda_i g_i`` for some ``lambda`` in ``[-1, 1]^n``?

    The certificate is returned in terms of ``lambda``.
    """
    G = np.atleast_2d(np.asarray(generators, dtype=float))
    A, b = _zonotope_system(G[None], np.asarray(x, dtype=float)[None])
    res = feasible_batch(A, b, tol)[0]
    if res.feasible:
        lam = 2.0 * res.certificate[: len(G)] - 1.0
        return LpResult(True, lam, res.tolerance, res.degenerate)
    return res


def _subspace_system(P, Q):
    """Points ``P`` (B, N, m), ``Q`` (B, m, l) orthonormal basis of ``L^perp``:
    LP data for ``conv(P)`` meeting ``L``."""
    B, N, _ = P.shape
    proj = np.swapaxes(P @ Q, 1, 2)
    A = np.concatenate([proj, np.ones((B, 1, N))], axis=1)
    b = np.zeros((B, Q.shape[2] + 1))
    b[:, -1] = 1.0
    return A, b


def _as_basis(Lperp):
    if isinstance(Lperp, SubspaceBasis):
        return Lperp.columns
    return np.asarray(Lperp, dtype=float)


def cone_hits_subspace(generators, Lperp, tol=DEFAULT_TOL) -> LpResult:
    """Does ``pos(generators)`` meet ``L`` outside the origin?

    ``Lperp`` is an orthonormal basis of the orthogonal complement of ``L``.
    Feasible iff some convex combination of the generators lies in ``L``.
    """
    V = np.atleast_2d(np.asarray(generators, dtype=float))
    A, b = _subspace_system(V[None], _as_basis(Lperp)[None])
    return feasible_batch(A, b, tol)[0]


def face_hits_subspace(vertices, Lperp, tol=DEFAULT_TOL) -> LpResult:
    """Does the face ``conv(vertices)`` meet the linear subspace ``L``?"""
    return cone_hits_subspace(vertices, Lperp, tol)


def subspace_hits_batch(P, Q, tol=DEFAULT_TOL):
    return _lp(*_subspace_system(np.asarray(P, float), np.asarray(Q, float)), tol)


def nnls_project_cone(generators, x, tol=None):
    """Metric projection of ``x`` onto ``pos(generators)``.

    Returns ``(projection, face_dim)``; ``face_dim`` is the rank of the
    generators with positive NNLS weight, 0 when the projection is the origin.
    """
    V = np.atleast_2d(np.asarray(generators, dtype=float))
    proj, face_dim, _ = project_batch(V.T, np.asarray(x, dtype=float)[None], tol=tol)
    return proj[0], int(face_dim[0])


def estimate_intrinsic_volumes(c: ConeSpec, samples: int, seed, threads=None) -> IntrinsicVolumeVector:
    """Histogram of the face dimension hit by projecting standard Gaussian
    vectors onto the cone, normalized; ``stderr`` holds binomial errors."""
    V = c.generators()
    if V.shape[0] > 2 ** 12:
        raise ParameterError("too many generators for the projection oracle")
    m = c.ambient_dim
    if m == 0:
        return IntrinsicVolumeVector(np.ones(1), np.zeros(1))

    def block(rng, count):
        x = rng.standard_normal((count, m))
        _, fd, _ = project_batch(V.T, x)
        return np.bincount(fd, minlength=m + 1)

    seed = check_seed(seed)
    counts = sum(map_blocks(block, samples, seed, f"iv/{c.family.value}/{c.n}/{c.param!r}", threads))
    p = counts / samples
    return IntrinsicVolumeVector(p, np.sqrt(p * (1 - p) / samples))


def estimate_grassmann_angle(c: ConeSpec, l: int, samples: int, seed, threads=None) -> Estimate:
    """Frequency with which a uniform codimension-``l`` subspace meets the cone nontrivially."""
    m = c.ambient_dim
    if not 0 <= l <= m:
        raise ParameterError("codimension out of range")
    V = c.generators()

    def trial(rng, count):
        if l == 0:
            return np.ones(count)
        _, Q = sample_subspace_batch(m, m - l, rng, count)
        feas, degen = subspace_hits_batch(np.broadcast_to(V, (count,) + V.shape), Q)
        return np.where(degen, np.nan, feas.astype(float))

    return estimate_mean(trial, samples, seed, f"grassmann/{c.family.value}/{c.n}/{c.param!r}/{l}", threads)


def _face_vertex_array(p: PolytopeSpec, dim: int):
    faces = p.faces(dim)
    if not faces:
        raise ParameterError(f"polytope has no faces of dimension {dim}")
    return np.stack([p.face_vertices(f) for f in faces])


def face_hit_counts(p: PolytopeSpec, face_dim: int, Lperp, tol=DEFAULT_TOL):
    """Number of ``face_dim``-faces of ``p`` met by ``L`` for each basis in
    ``Lperp`` (shape ``(B, n, l)``). Returns ``(counts, degenerate)``."""
    W = _face_vertex_array(p, face_dim)
    Q = np.asarray(Lperp, dtype=float)
    B, F = len(Q), len(W)
    P = np.broadcast_to(W[None], (B,) + W.shape).reshape(B * F, *W.shape[1:])
    Qr = np.repeat(Q, F, axis=0)
    feas, degen = subspace_hits_batch(P, Qr, tol)
    return feas.reshape(B, F).sum(axis=1), degen.reshape(B, F).any(axis=1)


def estimate_face_hits(p: PolytopeSpec, k: int, j: int, samples: int, seed, threads=None) -> Estimate:
    """Mean number of ``(j + n - k)``-faces met by a uniform ``k``-dimensional subspace."""
    n = p.n
    if not n > k > j >= 0:
        raise ParameterError("need n > k > j >= 0")
    l = n - k

    def trial(rng, count):
        _, Q = sample_subspace_batch(n, k, rng, count)
        counts, degen = face_hit_counts(p, j + l, Q)
        return np.where(degen, np.nan, counts.astype(float))

    return estimate_mean(trial, samples, seed, f"faces/{p.family.value}/{n}/{k}/{j}", threads,
                         block_size=2048)


def _pairs(M):
    i, j = np.triu_indices(M, k=1)
    return i, j


def section_vertex_counts(p: PolytopeSpec, bases, tol=POLYGON_TOL):
    """Vertex counts of the polygons ``p ∩ span(U)`` for bases ``U`` of shape (B, n, 2).

    Returns ``(counts, degenerate)``; a trial is degenerate when a vertex has
    more than two tight constraints or a vertex comes from a near-parallel pair.
    """
    A, b = p.halfspaces()
    U = np.asarray(bases, dtype=float)
    B = len(U)
    counts = np.zeros(B, dtype=int)
    degen = np.zeros(B, dtype=bool)
    ii, jj = _pairs(len(A))
    chunk = max(1, 2 ** 22 // (len(ii) * len(A)))
    for s in range(0, B, chunk):
        A2 = A @ U[s:s + chunk]  # (c, M, 2)
        ai, aj = A2[:, ii, :], A2[:, jj, :]
        det = ai[..., 0] * aj[..., 1] - ai[..., 1] * aj[..., 0]
        ok = np.abs(det) > 1e-12
        sdet = np.where(ok, det, 1.0)
        px = (b[ii] * aj[..., 1] - b[jj] * ai[..., 1]) / sdet
        py = (ai[..., 0] * b[jj] - aj[..., 0] * b[ii]) / sdet
        slack = b[None, None, :] - (A2[:, None, :, 0] * px[..., None] + A2[:, None, :, 1] * py[..., None])
        feasible = ok & (slack.min(axis=2) >= -tol)
        tight = (np.abs(slack) <= tol).sum(axis=2)
        counts[s:s + chunk] = feasible.sum(axis=1)
        near_parallel = (~ok) & (np.abs(det) > 0)
        degen[s:s + chunk] = (feasible & (tight > 2)).any(axis=1) | near_parallel.any(axis=1)
    return counts, degen


def section_polygon_2d(p: PolytopeSpec, basis: SubspaceBasis, tol=POLYGON_TOL):
    """Exact central section of ``p`` by a 2-dimensional subspace.

    Returns ``(vertex_count, polygon)`` with the polygon's vertices in the
    coordinates of ``basis``, ordered counter-clockwise.
    """
    if basis.dim != 2 or basis.n != p.n:
        raise ParameterError("need a 2-dimensional subspace of the polytope's space")
    A, b = p.halfspaces()
    A2 = A @ basis.columns
    verts = []
    for i, j in itertools.combinations(range(len(A)), 2):
        M = A2[[i, j]]
        if abs(np.linalg.det(M)) <= 1e-12:
            continue
        v = np.linalg.solve(M, b[[i, j]])
        if (A2 @ v <= b + tol).all():
            if not any(np.linalg.norm(v - w) <= 1e-7 for w in verts):
                verts.append(v)
    poly = np.array(verts).reshape(-1, 2)
    if len(poly):
        poly = poly[np.argsort(np.arctan2(poly[:, 1], poly[:, 0]))]
    return len(poly), poly


def _absorption_trial(q: AbsorptionQuery, point_fn):
    n, d = q.n, q.d

    def trial(rng, count):
        X = rng.standard_normal((count, n, d))
        x = point_fn(rng, count)
        if q.family is AbsorptionFamily.SYMMETRIC_GAUSSIAN:
            feas, degen = hull_contains_batch(np.concatenate([X, -X], axis=1), x)
        else:
            feas, degen = zonotope_contains_batch(X, x)
        return np.where(degen, np.nan, (~feas).astype(float))

    return trial


def estimate_absorption(q: AbsorptionQuery, x_norm: float, samples: int, seed, threads=None) -> Estimate:
    """Frequency of ``x = (x_norm, 0, ..., 0)`` lying outside the random polytope."""
    if x_norm < 0:
        raise ParameterError("x_norm must be nonnegative")

    def point(rng, count):
        x = np.zeros((count, q.d))
        x[:, 0] = x_norm
        return x

    stream = f"absorb/{q.family.value}/{q.n}/{q.d}/{float(x_norm)!r}"
    return estimate_mean(_absorption_trial(q, point), samples, seed, stream, threads)


def estimate_random_point_absorption(q: AbsorptionQuery, samples: int, seed, threads=None) -> Estimate:
    """Frequency of ``sigma X`` (fresh Gaussian ``X``) lying outside the random polytope."""
    if q.s2 is None:
        raise ParameterError("query needs s2")
    sigma = float(np.sqrt(q.s2))

    def point(rng, count):
        return sigma * rng.standard_normal((count, q.d))

    stream = f"p/{q.family.value}/{q.n}/{q.d}/{float(q.s2)!r}"
    return estimate_mean(_absorption_trial(q, point), samples, seed, stream, threads)


def nonabsorption_grid(q: AbsorptionQuery, radii, clouds: int, seed, threads=None):
    """Indicators ``x_r not in P`` for every radius in ``radii`` under shared
    point clouds (common random numbers). Returns shape ``(clouds, len(radii))``
    with ``nan`` rows for degenerate clouds."""
    radii = np.asarray(radii, dtype=float)
    n, d, R = q.n, q.d, len(radii)

    def block(rng, count):
        X = rng.standard_normal((count, n, d))
        Xr = np.repeat(X, R, axis=0)
        x = np.zeros((count * R, d))
        x[:, 0] = np.tile(radii, count)
        if q.family is AbsorptionFamily.SYMMETRIC_GAUSSIAN:
            feas, degen = hull_contains_batch(np.concatenate([Xr, -Xr], axis=1), x)
        else:
            feas, degen = zonotope_contains_batch(Xr, x)
        out = (~feas).astype(float).reshape(count, R)
        out[degen.reshape(count, R).any(axis=1)] = np.nan
        return out

    seed = check_seed(seed)
    stream = f"laplace/{q.family.value}/{n}/{d}"
    return np.concatenate(map_blocks(block, clouds, seed, stream, threads, block_size=1024))

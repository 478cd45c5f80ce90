"""Lawson-Hanson active-set NNLS run in lockstep over many right-hand sides
sharing one generator matrix."""

from __future__ import annotations

import numpy as np


class NnlsError(RuntimeError):
    """The active-set iteration did not converge within its iteration cap."""


def nnls_batch(V, X, tol=None, max_iter=None):
    """Minimize ``|V lam - x|`` over ``lam >= 0`` for every row ``x`` of ``X``.

    Parameters
    ----------
    V : array_like, shape (m, N)
        Generators as columns.
    X : array_like, shape (B, m)
    tol : float, optional
        Threshold on the dual vector ``V^T (x - V lam)`` used as the stopping
        rule; defaults to ``1e-10`` times the problem scale.
    max_iter : int, optional
        Defaults to ``50 * N``.

    Returns
    -------
    lam : ndarray, shape (B, N)
    """
    V = np.asarray(V, dtype=float)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    m, N = V.shape
    B = X.shape[0]
    if max_iter is None:
        max_iter = 50 * N
    G = V.T @ V
    bvec = X @ V
    if tol is None:
        tol = 1e-10 * max(1.0, np.abs(G).max()) * np.maximum(1.0, np.abs(X).max(axis=1))
    tol = np.broadcast_to(np.asarray(tol, dtype=float), (B,))

    lam = np.zeros((B, N))
    passive = np.zeros((B, N), dtype=bool)
    inner = np.zeros(B, dtype=bool)
    live = np.arange(B)
    eye = np.eye(N, dtype=bool)

    for _ in range(max_iter):
        if len(live) == 0:
            return lam
        P, L, inn = passive[live], lam[live], inner[live]
        w = bvec[live] - L @ G
        cand = (~P) & (w > tol[live, None])
        outer = ~inn
        converged = outer & ~cand.any(axis=1)
        if converged.any():
            keep = ~converged
            live, P, L, inn, w, cand = live[keep], P[keep], L[keep], inn[keep], w[keep], cand[keep]
            outer = ~inn
            if len(live) == 0:
                return lam
        add = np.argmax(np.where(cand, w, -np.inf), axis=1)
        rows = np.flatnonzero(outer)
        P[rows, add[rows]] = True

        mask = P[:, :, None] & P[:, None, :]
        M = np.where(mask, G, 0.0) + (eye & ~P[:, :, None])
        rhs = np.where(P, bvec[live], 0.0)
        z = np.linalg.solve(M, rhs[:, :, None])[:, :, 0]

        bad = P & (z <= 0)
        ok = ~bad.any(axis=1)
        L = np.where(ok[:, None], z, L)
        if not ok.all():
            r = ~ok
            Lr, zr, br = L[r], z[r], bad[r]
            with np.errstate(divide="ignore", invalid="ignore"):
                q = np.where(br, Lr / (Lr - zr), np.inf)
            alpha = q.min(axis=1, keepdims=True)
            Lr = Lr + alpha * (zr - Lr)
            Pr = P[r] & (Lr > 1e-14 * np.maximum(1.0, np.abs(Lr).max(axis=1, keepdims=True)))
            # the blocking index leaves the passive set even under roundoff
            Pr[np.arange(len(Lr)), np.argmin(q, axis=1)] = False
            Lr = np.where(Pr, Lr, 0.0)
            L[r], P[r] = Lr, Pr
        passive[live], lam[live], inner[live] = P, L, ~ok
    raise NnlsError(
        f"NNLS did not converge for {len(live)} of {B} problems after {max_iter} iterations "
        f"(generators: {N}, dimension: {m})"
    )


def project_batch(V, X, tol=None):
    """Metric projection of each row of ``X`` onto ``pos(V)``.

    Returns ``(projection, face_dim, lam)`` where ``face_dim`` is the rank of
    the generators carrying positive weight.
    """
    V = np.asarray(V, dtype=float)
    lam = nnls_batch(V, X, tol=tol)
    proj = lam @ V.T
    active = lam > 1e-12 * np.maximum(1.0, lam.max(axis=1, keepdims=True))
    counts = active.sum(axis=1)
    face_dim = np.zeros(len(lam), dtype=int)
    some = counts > 0
    if some.any():
        sub = np.where(active[some][:, None, :], V[None, :, :], 0.0)
        face_dim[some] = np.linalg.matrix_rank(sub)
    return proj, face_dim, lam

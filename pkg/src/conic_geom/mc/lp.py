"""Dense phase-1 simplex for LP feasibility, vectorized over a batch of
problems of identical shape.

Each problem asks for ``x >= 0`` with ``A x = b``. Artificial variables form
the starting basis and their sum is minimized; Bland's rule picks both the
entering column and (among ratio-test ties) the leaving row, which rules out
cycling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9
_COST_EPS = 1e-10
_PIVOT_EPS = 1e-11


@dataclass(frozen=True)
class LpResult:
    feasible: bool
    certificate: np.ndarray | None
    tolerance: float
    degenerate: bool = False


@dataclass
class BatchLpResult:
    feasible: np.ndarray
    certificate: np.ndarray
    degenerate: np.ndarray
    infeasibility: np.ndarray
    tolerance: float

    def __getitem__(self, i) -> LpResult:
        ok = bool(self.feasible[i])
        return LpResult(ok, self.certificate[i] if ok else None, self.tolerance, bool(self.degenerate[i]))


def feasible_batch(A, b, tol=DEFAULT_TOL, max_iter=None) -> BatchLpResult:
    """Solve ``{x >= 0 : A[i] x = b[i]}`` for every ``i``.

    Parameters
    ----------
    A : array_like, shape (B, m, N)
    b : array_like, shape (B, m)
    tol : float
        Feasibility tolerance on the residual, after rows are scaled to unit
        maximum magnitude.

    Returns
    -------
    BatchLpResult
        ``degenerate`` marks problems whose phase-1 optimum lands in the band
        ``(tol, 1e3 * tol)`` or whose certificate fails re-validation against
        the unscaled constraints at ``10 * tol``.
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    A0 = np.asarray(A, dtype=float)
    b0 = np.asarray(b, dtype=float)
    if A0.ndim != 3 or b0.shape != A0.shape[:2]:
        raise ValueError("expected A of shape (B, m, N) and b of shape (B, m)")
    B, m, N = A0.shape
    if max_iter is None:
        max_iter = 50 * (N + m)

    sign = np.where(b0 < 0, -1.0, 1.0)
    scale = np.maximum(np.abs(A0).max(axis=2, initial=0.0), np.abs(b0))
    scale[scale == 0] = 1.0
    As = A0 * (sign / scale)[:, :, None]
    bs = b0 * sign / scale

    T = np.zeros((B, m + 1, N + m + 1))
    T[:, :m, :N] = As
    T[:, :m, N:N + m] = np.eye(m)
    T[:, :m, -1] = bs
    T[:, m, :N] = -As.sum(axis=1)
    T[:, m, -1] = -bs.sum(axis=1)
    basis = np.broadcast_to(np.arange(N, N + m), (B, m)).copy()
    idx = np.arange(B)

    xs = np.zeros((B, N))
    w = np.zeros(B)
    stalled = np.zeros(B, dtype=bool)

    def finish(sel, hit_cap=False):
        Ts, bas, ids = T[sel], basis[sel], idx[sel]
        full = np.zeros((len(ids), N + m))
        np.put_along_axis(full, bas, Ts[:, :m, -1], axis=1)
        xs[ids] = full[:, :N]
        w[ids] = -Ts[:, m, -1]
        if hit_cap:
            stalled[ids] = True

    for _ in range(max_iter):
        if len(idx) == 0:
            break
        cost = T[:, m, :N + m]
        cand = cost < -_COST_EPS
        col_j = np.argmax(cand, axis=1)
        col = np.take_along_axis(T[:, :m, :], col_j[:, None, None], axis=2)[:, :, 0]
        pos = col > _PIVOT_EPS
        go = cand.any(axis=1) & pos.any(axis=1)
        if not go.all():
            finish(~go)
            T, basis, idx = T[go], basis[go], idx[go]
            col_j, col, pos = col_j[go], col[go], pos[go]
            if len(idx) == 0:
                break
        rhs = T[:, :m, -1]
        ratio = np.where(pos, rhs / np.where(pos, col, 1.0), np.inf)
        rmin = ratio.min(axis=1, keepdims=True)
        tie = ratio <= rmin + 1e-12 * (1.0 + np.abs(rmin))
        row = np.argmin(np.where(tie, basis, N + m + 1), axis=1)

        k = np.arange(len(idx))
        prow = T[k, row, :] / T[k, row, col_j][:, None]
        colv = T[k, :, col_j]
        T -= colv[:, :, None] * prow[:, None, :]
        T[k, row, :] = prow
        basis[k, row] = col_j
    else:
        if len(idx):
            finish(np.ones(len(idx), dtype=bool), hit_cap=True)

    feasible = w <= tol * max(1, m)
    resid = np.abs(np.einsum("bmn,bn->bm", A0, xs) - b0).max(axis=1, initial=0.0)
    valid = (resid <= 10 * tol * np.abs(scale).max(axis=1)) & (xs.min(axis=1, initial=0.0) >= -10 * tol)
    degenerate = stalled | (feasible & ~valid) | (~feasible & (w < 1e3 * tol * max(1, m)))
    return BatchLpResult(feasible & valid, xs, degenerate, w, tol)


def feasible(A, b, tol=DEFAULT_TOL) -> LpResult:
    """Single-problem form of :func:`feasible_batch`."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    return feasible_batch(A[None], b[None], tol)[0]

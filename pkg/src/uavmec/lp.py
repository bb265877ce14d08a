"""Dense two-phase simplex for small/medium LPs.

Solves  min c.x  s.t.  A_ub x <= b_ub,  A_eq x = d,  lo <= x <= hi.

Pivoting is Dantzig's rule with lowest-index tie-breaks, switching
permanently to Bland's rule after a run of degenerate pivots, so the
method is deterministic and cannot cycle. An optimal return carries the
dual point recovered from the final basis; the reported kkt_residual is
the primal-dual objective gap.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITER_LIMIT = "iter_limit"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class SolveStatus:
    status: Status
    objective: float = np.nan
    x: np.ndarray | None = None
    kkt_residual: float = np.nan
    iterations: int = 0
    dual_objective: float = np.nan


@dataclass
class LinearProgram:
    c: np.ndarray
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lo: np.ndarray | None = None      # defaults to 0
    hi: np.ndarray | None = None      # defaults to +inf

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        n = self.c.size
        if self.a_ub is None:
            self.a_ub = np.zeros((0, n))
            self.b_ub = np.zeros(0)
        self.a_ub = np.atleast_2d(np.asarray(self.a_ub, dtype=float))
        self.b_ub = np.atleast_1d(np.asarray(self.b_ub, dtype=float))
        if self.a_eq is None:
            self.a_eq = np.zeros((0, n))
            self.b_eq = np.zeros(0)
        self.a_eq = np.atleast_2d(np.asarray(self.a_eq, dtype=float))
        self.b_eq = np.atleast_1d(np.asarray(self.b_eq, dtype=float))
        self.lo = (np.zeros(n) if self.lo is None
                   else np.asarray(self.lo, dtype=float))
        self.hi = (np.full(n, np.inf) if self.hi is None
                   else np.asarray(self.hi, dtype=float))
        if self.a_ub.shape != (self.b_ub.size, n):
            raise ValueError("a_ub/b_ub dimensions inconsistent with c")
        if self.a_eq.shape != (self.b_eq.size, n):
            raise ValueError("a_eq/b_eq dimensions inconsistent with c")
        if self.lo.size != n or self.hi.size != n:
            raise ValueError("bounds dimensions inconsistent with c")
        if np.any(self.lo > self.hi):
            raise ValueError("lo > hi for some variable")


def _standardize(lp: LinearProgram):
    """Rewrite as  min c.y  s.t.  A y (<=,=) b,  y >= 0.

    Finite lower bounds are shifted out; variables with an infinite lower
    bound are split into positive and negative parts; finite upper bounds
    become extra <= rows. Returns (c, A_ub, b_ub, A_eq, b_eq, recover,
    offset): recover maps a standard-form point back to original
    variables, offset is the constant c . shift dropped from the
    objective (needed to compare dual and primal values).
    """
    n = lp.c.size
    shift = np.where(np.isfinite(lp.lo), lp.lo, 0.0)
    split = ~np.isfinite(lp.lo)
    n_split = int(split.sum())
    # columns: n shifted vars, then negative parts of split vars
    def widen(a):
        if n_split == 0:
            return a.copy()
        return np.hstack([a, -a[:, split]])

    c = np.concatenate([lp.c, -lp.c[split]])
    a_ub = widen(lp.a_ub)
    b_ub = lp.b_ub - lp.a_ub @ shift
    a_eq = widen(lp.a_eq)
    b_eq = lp.b_eq - lp.a_eq @ shift
    # finite upper bounds as rows (on the shifted variable)
    ub_idx = np.where(np.isfinite(lp.hi))[0]
    if ub_idx.size:
        rows = np.zeros((ub_idx.size, c.size))
        rows[np.arange(ub_idx.size), ub_idx] = 1.0
        if n_split:
            for r, j in enumerate(ub_idx):
                if split[j]:
                    rows[r, n + np.flatnonzero(np.flatnonzero(split) == j)[0]] = -1.0
        a_ub = np.vstack([a_ub, rows])
        b_ub = np.concatenate([b_ub, lp.hi[ub_idx] - shift[ub_idx]])

    split_cols = np.flatnonzero(split)

    def recover(y):
        x = y[:n] + shift
        if n_split:
            x[split_cols] -= y[n:n + n_split]
        return x

    return c, a_ub, b_ub, a_eq, b_eq, recover, float(lp.c @ shift)


class _Tableau:
    """Equality-form tableau  A y = b, b >= 0, with an explicit basis."""

    def __init__(self, a, b, n_real):
        self.a = a
        self.b = b
        self.n_real = n_real
        self.basis = None
        self.degenerate_run = 0
        self.use_bland = False
        self.iterations = 0

    def run(self, c, max_iter):
        """Primal simplex on the current basis for objective c (full length)."""
        a, b = self.a, self.b
        m = a.shape[0]
        basis = self.basis
        while True:
            if self.iterations >= max_iter:
                return Status.ITER_LIMIT
            cb = c[basis]
            # reduced costs via the current (already pivoted) tableau rows
            z = cb @ a - c
            if self.use_bland:
                cand = np.flatnonzero(z > 1e-10)
                if cand.size == 0:
                    return Status.OPTIMAL
                enter = cand[0]
            else:
                enter = int(np.argmax(z))
                if z[enter] <= 1e-10:
                    return Status.OPTIMAL
            col = a[:, enter]
            pos = col > 1e-10
            if not np.any(pos):
                return Status.UNBOUNDED
            ratios = np.full(m, np.inf)
            ratios[pos] = b[pos] / col[pos]
            rmin = ratios.min()
            if self.use_bland:
                # leaving: smallest basis index among the min-ratio rows
                rows = np.flatnonzero(ratios <= rmin + 1e-12)
                leave = rows[np.argmin(basis[rows])]
            else:
                leave = int(np.argmin(ratios))
            if rmin <= 1e-12:
                self.degenerate_run += 1
                if self.degenerate_run > 2 * (m + a.shape[1]):
                    self.use_bland = True
            else:
                self.degenerate_run = 0
            self._pivot(leave, enter)
            basis[leave] = enter
            self.iterations += 1

    def _pivot(self, row, col):
        a, b = self.a, self.b
        piv = a[row, col]
        a[row] /= piv
        b[row] /= piv
        factors = a[:, col].copy()
        factors[row] = 0.0
        a -= np.outer(factors, a[row])
        b -= factors * b[row]
        np.maximum(b, 0.0, out=b)


def solve_lp(lp: LinearProgram, tol: float = 1e-9,
             max_iter: int | None = None) -> SolveStatus:
    c, a_ub, b_ub, a_eq, b_eq, recover, offset = _standardize(lp)
    n = c.size
    m_ub, m_eq = a_ub.shape[0], a_eq.shape[0]
    m = m_ub + m_eq

    # equality form with slack columns for the <= rows
    a = np.zeros((m, n + m_ub))
    a[:m_ub, :n] = a_ub
    a[:m_ub, n:n + m_ub] = np.eye(m_ub)
    a[m_ub:, :n] = a_eq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    a[neg] *= -1.0
    b[neg] *= -1.0

    # initial basis: slack columns where usable, artificials elsewhere
    n_cols = n + m_ub
    basis = np.full(m, -1, dtype=int)
    art_rows = []
    for i in range(m):
        if i < m_ub and not neg[i]:
            basis[i] = n + i
        else:
            art_rows.append(i)
    if art_rows:
        art = np.zeros((m, len(art_rows)))
        for k, i in enumerate(art_rows):
            art[i, k] = 1.0
            basis[i] = n_cols + k
        a = np.hstack([a, art])
    total_cols = a.shape[1]

    a0 = a.copy()
    b0 = b.copy()
    tab = _Tableau(a, b, n_cols)
    tab.basis = basis
    if max_iter is None:
        max_iter = 200 * (m + total_cols)

    if art_rows:
        c1 = np.zeros(total_cols)
        c1[n_cols:] = 1.0
        st = tab.run(c1, max_iter)
        if st is Status.ITER_LIMIT:
            return SolveStatus(Status.ITER_LIMIT, iterations=tab.iterations)
        phase1_obj = float(c1[tab.basis] @ tab.b)
        if phase1_obj > 1e-7:
            return SolveStatus(Status.INFEASIBLE, iterations=tab.iterations)
        # drive remaining artificials out of the basis where possible
        for i in range(m):
            if tab.basis[i] >= n_cols:
                row = tab.a[i, :n_cols]
                j = int(np.argmax(np.abs(row)))
                if abs(row[j]) > 1e-9:
                    tab._pivot(i, j)
                    tab.basis[i] = j
        # freeze artificial columns at zero
        tab.a[:, n_cols:] = 0.0

    c2 = np.zeros(total_cols)
    c2[:n] = c
    st = tab.run(c2, max_iter)
    if st is Status.ITER_LIMIT:
        return SolveStatus(Status.ITER_LIMIT, iterations=tab.iterations)
    if st is Status.UNBOUNDED:
        return SolveStatus(Status.UNBOUNDED, iterations=tab.iterations)

    y = np.zeros(total_cols)
    y[tab.basis] = tab.b
    x = recover(y[:n])
    primal = float(lp.c @ x)
    # dual point from the final basis of the original equality-form system:
    # solve B^T pi = c_B, dual objective = pi . b0
    try:
        bb = tab.basis.copy()
        pi = np.linalg.lstsq(a0[:, bb].T, c2[bb], rcond=None)[0]
        dual = float(pi @ b0) + offset
    except np.linalg.LinAlgError:
        return SolveStatus(Status.NUMERICAL_FAILURE, objective=primal, x=x,
                           iterations=tab.iterations)
    scale = max(1.0, abs(primal))
    kkt = abs(primal - dual) / scale
    if kkt > max(tol, 1e-7):
        return SolveStatus(Status.NUMERICAL_FAILURE, objective=primal, x=x,
                           kkt_residual=kkt, iterations=tab.iterations,
                           dual_objective=dual)
    return SolveStatus(Status.OPTIMAL, objective=primal, x=x,
                       kkt_residual=kkt, iterations=tab.iterations,
                       dual_objective=dual)

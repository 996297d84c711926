"""Dense linear programming: two-phase tableau simplex, Chebyshev ball and
axis-aligned bounding box of an H-polytope.

``solve_lp`` maximises ``c . x`` subject to ``A x <= b`` with ``x`` free.
It works on the dual ``min b . y  s.t.  A^T y = c,  y >= 0`` whose tableau
has only ``m`` rows, so polytopes with thousands of facets stay cheap.  The
primal point is recovered from the optimal basis by complementary
slackness.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InfeasibleError, NumericalError, UnboundedError
from .geom import Box, HPolytope

PIVOT_TOL = 1e-9
# consecutive degenerate pivots tolerated before Dantzig pricing hands over to Bland
_STALL_LIMIT = 25


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class LPOutcome:
    status: LPStatus
    x: np.ndarray | None = None
    value: float | None = None
    iterations: int = 0


@dataclass(frozen=True)
class ChebyshevBall:
    c: np.ndarray
    rc: float


class _Tableau:
    """Standard-form tableau for ``min cost . y  s.t.  Aeq y = beq, y >= 0``."""

    def __init__(self, Aeq, beq, rule):
        m, N = Aeq.shape
        flip = beq < 0
        Aeq = np.where(flip[:, None], -Aeq, Aeq)
        beq = np.where(flip, -beq, beq)
        self.N = N
        self.T = np.hstack([Aeq, np.eye(m), beq[:, None]])
        self.basis = np.arange(N, N + m)
        self.tol = PIVOT_TOL * max(1.0, float(np.max(np.abs(Aeq), initial=0.0)))
        self.rule = rule
        self.iterations = 0
        self.r = None

    def set_cost(self, cost):
        cost = np.concatenate([cost, [0.0]])
        self.r = cost - cost[self.basis] @ self.T
        self.ctol = PIVOT_TOL * max(1.0, float(np.max(np.abs(cost))))

    def pivot(self, i, j):
        T = self.T
        T[i] /= T[i, j]
        col = T[:, j].copy()
        col[i] = 0.0
        T -= np.outer(col, T[i])
        self.r -= self.r[j] * T[i]
        rhs = T[:, -1]
        rhs[rhs < 0.0] = 0.0
        self.basis[i] = j
        self.iterations += 1

    def _entering(self, allowed, bland):
        cand = np.flatnonzero(self.r[:allowed] < -self.ctol)
        if cand.size == 0:
            return None
        if bland:
            return int(cand[0])
        return int(cand[np.argmin(self.r[cand])])

    def _leaving(self, j):
        col = self.T[:, j]
        rows = np.flatnonzero(col > self.tol)
        if rows.size == 0:
            return None
        ratios = self.T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + self.tol * max(1.0, abs(best))]
        return int(ties[np.argmin(self.basis[ties])])

    def run(self, allowed, max_iter):
        """Optimise over the first ``allowed`` columns; returns a status string."""
        bland = self.rule == "bland"
        stall = 0
        while True:
            if self.iterations >= max_iter:
                return "limit"
            j = self._entering(allowed, bland or stall >= _STALL_LIMIT)
            if j is None:
                return "optimal"
            i = self._leaving(j)
            if i is None:
                return "unbounded"
            degenerate = self.T[i, -1] <= self.tol
            self.pivot(i, j)
            stall = stall + 1 if degenerate else 0

    def drive_out_artificials(self):
        """Pivot zero-level artificials out of the basis, dropping redundant rows."""
        keep = []
        for i in range(self.T.shape[0]):
            if self.basis[i] < self.N:
                keep.append(i)
                continue
            row = self.T[i, :self.N]
            nz = np.flatnonzero(np.abs(row) > self.tol)
            if nz.size:
                self.pivot(i, int(nz[0]))
                keep.append(i)
        self.T = np.delete(self.T[keep], np.s_[self.N:-1], axis=1)
        self.basis = self.basis[keep]


def _simplex_std(cost, Aeq, beq, max_iter, rule):
    """Two-phase simplex; returns ``(status, y, basis, iterations)``."""
    m, N = Aeq.shape
    tab = _Tableau(Aeq, beq, rule)
    tab.set_cost(np.concatenate([np.zeros(N), np.ones(m)]))
    st = tab.run(N, max_iter)
    if st == "limit":
        return "limit", None, None, tab.iterations
    infeas = tab.T[:, -1][tab.basis >= N].sum()
    if infeas > tab.tol * max(1.0, float(np.max(np.abs(beq), initial=0.0))) * max(1, m):
        return "infeasible", None, None, tab.iterations
    tab.drive_out_artificials()
    tab.set_cost(np.asarray(cost, float))
    st = tab.run(N, max_iter)
    if st != "optimal":
        return st, None, None, tab.iterations
    y = np.zeros(N)
    y[tab.basis] = tab.T[:, -1]
    return "optimal", y, tab.basis.copy(), tab.iterations


def solve_lp(c, A, b, max_iter: int | None = None, rule: str = "dantzig") -> LPOutcome:
    """Maximise ``c . x`` subject to ``A x <= b`` over free ``x``.

    Parameters
    ----------
    c : (m,) objective
    A : (n, m) constraint matrix
    b : (n,) right-hand side
    max_iter : pivot budget per phase sequence, default ``50 (n + m)``
    rule : ``"bland"`` (smallest-index pricing) or ``"dantzig"`` (most
        negative reduced cost, falling back to Bland after a degenerate stall)

    Returns
    -------
    LPOutcome
        ``ITERATION_LIMIT`` signals a numerical failure rather than a verdict.
    """
    c = np.asarray(c, float).reshape(-1)
    A = np.atleast_2d(np.asarray(A, float))
    b = np.asarray(b, float).reshape(-1)
    n, m = A.shape
    if c.size != m or b.size != n or n < 1 or m < 1:
        raise DimensionError(f"inconsistent LP shapes c{c.shape} A{A.shape} b{b.shape}")
    if rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    if max_iter is None:
        max_iter = 50 * (n + m)

    # unit-normal rows keep the dual tableau well scaled
    norms = np.linalg.norm(A, axis=1)
    null = norms == 0.0
    if np.any(b[null] < 0):
        return LPOutcome(LPStatus.INFEASIBLE)
    A = A[~null] / norms[~null, None]
    b = b[~null] / norms[~null]
    n = A.shape[0]
    if n == 0:
        return LPOutcome(LPStatus.UNBOUNDED if np.any(c) else LPStatus.OPTIMAL,
                         x=None if np.any(c) else np.zeros(m),
                         value=None if np.any(c) else 0.0)

    st, y, basis, it = _simplex_std(b, A.T, c, max_iter, rule)
    if st == "limit":
        return LPOutcome(LPStatus.ITERATION_LIMIT, iterations=it)
    if st == "unbounded":
        return LPOutcome(LPStatus.INFEASIBLE, iterations=it)
    if st == "infeasible":
        # dual infeasible: primal is unbounded or infeasible; a Farkas
        # certificate y >= 0, A^T y = 0, b . y < 0 decides which
        Aeq = np.vstack([A.T, np.ones((1, n))])
        beq = np.concatenate([np.zeros(m), [1.0]])
        st2, y2, _, it2 = _simplex_std(b, Aeq, beq, max_iter, rule)
        it += it2
        if st2 == "limit":
            return LPOutcome(LPStatus.ITERATION_LIMIT, iterations=it)
        bscale = max(1.0, float(np.max(np.abs(b))))
        if st2 == "optimal" and b @ y2 < -PIVOT_TOL * bscale:
            return LPOutcome(LPStatus.INFEASIBLE, iterations=it)
        return LPOutcome(LPStatus.UNBOUNDED, iterations=it)

    AJ, bJ = A[basis], b[basis]
    if AJ.shape[0] == m:
        try:
            x = np.linalg.solve(AJ, bJ)
        except np.linalg.LinAlgError:
            x = np.linalg.lstsq(AJ, bJ, rcond=None)[0]
    else:
        x = np.linalg.lstsq(AJ, bJ, rcond=None)[0]
    return LPOutcome(LPStatus.OPTIMAL, x=x, value=float(c @ x), iterations=it)


def chebyshev_center(P: HPolytope, rule: str = "dantzig") -> ChebyshevBall:
    """Centre and radius of the largest ball inside ``P``."""
    A = np.hstack([P.A, P.row_norms[:, None]])
    c = np.zeros(P.d + 1)
    c[-1] = 1.0
    out = solve_lp(c, A, P.b, rule=rule)
    if out.status is LPStatus.UNBOUNDED:
        raise UnboundedError("polytope contains arbitrarily large balls")
    if out.status is not LPStatus.OPTIMAL:
        raise NumericalError(f"Chebyshev LP ended with status {out.status.value}")
    rc = float(out.x[-1])
    if rc < -PIVOT_TOL * P.scale:
        raise InfeasibleError("polytope is empty")
    return ChebyshevBall(out.x[:-1].copy(), max(rc, 0.0))


def bounding_box(P: HPolytope, rule: str = "dantzig") -> Box:
    """Axis-aligned bounding box from ``2d`` linear programs."""
    lo = np.empty(P.d)
    hi = np.empty(P.d)
    for j in range(P.d):
        for sign, store in ((1.0, hi), (-1.0, lo)):
            c = np.zeros(P.d)
            c[j] = sign
            out = solve_lp(c, P.A, P.b, rule=rule)
            if out.status is LPStatus.UNBOUNDED:
                label = f"{'+' if sign > 0 else '-'}x{j}"
                raise UnboundedError(f"polytope is unbounded along {label}",
                                     direction=(j, int(sign)))
            if out.status is LPStatus.INFEASIBLE:
                raise InfeasibleError("polytope is empty")
            if out.status is not LPStatus.OPTIMAL:
                raise NumericalError(f"bounding-box LP ended with status {out.status.value}")
            store[j] = sign * out.value
    return Box(np.minimum(lo, hi), np.maximum(lo, hi))


def diameter_upper_bound(box: Box) -> float:
    """Box diagonal, which dominates the polytope's diameter."""
    return box.diagonal

"""Dense two-phase simplex with Bland's rule, plus the L1-minimisation wrapper.

Problems here are tiny (tens of variables, at most a few hundred rows), so a
dense tableau is the simplest deterministic option.  All pivoting decisions
use Bland's lowest-index rule, so identical inputs give bit-identical
results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

GE, LE, EQ = ">=", "<=", "="

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-10
MAX_ITER = 50_000


class LpError(RuntimeError):
    pass


class IterationLimitExceeded(LpError):
    pass


@dataclass
class LpProblem:
    """``min objective·x`` subject to ``constraints`` and per-variable ``bounds``.

    ``bounds[j]`` is ``(lo, hi)`` with ``None`` for an infinite side; the
    default is a free variable.
    """

    num_vars: int
    objective: np.ndarray
    constraints: list = field(default_factory=list)
    bounds: list | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(self.num_vars)
        if self.bounds is None:
            self.bounds = [(None, None)] * self.num_vars
        if len(self.bounds) != self.num_vars:
            raise LpError("one bound pair per variable is required")
        cons = []
        for coeffs, rel, rhs in self.constraints:
            coeffs = np.asarray(coeffs, dtype=float).reshape(-1)
            if coeffs.shape[0] != self.num_vars:
                raise LpError(f"constraint has {coeffs.shape[0]} coefficients, expected {self.num_vars}")
            if rel not in (GE, LE, EQ):
                raise LpError(f"unknown relation {rel!r}")
            if not (np.all(np.isfinite(coeffs)) and np.isfinite(rhs)):
                raise LpError("constraint entries must be finite")
            cons.append((coeffs, rel, float(rhs)))
        self.constraints = cons

    def add(self, coeffs, rel, rhs) -> None:
        self.constraints.append((np.asarray(coeffs, dtype=float), rel, float(rhs)))
        self.__post_init__()

    def max_violation(self, x) -> float:
        x = np.asarray(x, dtype=float)
        worst = 0.0
        for coeffs, rel, rhs in self.constraints:
            lhs = float(coeffs @ x)
            if rel == GE:
                worst = max(worst, rhs - lhs)
            elif rel == LE:
                worst = max(worst, lhs - rhs)
            else:
                worst = max(worst, abs(lhs - rhs))
        for xj, (lo, hi) in zip(x, self.bounds):
            if lo is not None:
                worst = max(worst, lo - xj)
            if hi is not None:
                worst = max(worst, xj - hi)
        return worst


@dataclass
class LpSolution:
    status: str
    x: np.ndarray | None = None
    objective_value: float = float("nan")
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


# ---------------------------------------------------------------- tableau core

def _pivot(T: np.ndarray, r: int, c: int) -> None:
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T: np.ndarray, basis: np.ndarray, ncols: int, pivot_tol: float, opt_tol: float,
         max_iter: int, iters: int) -> tuple[str, int]:
    """Iterate on tableau ``T`` (last row = reduced costs, last column = rhs).

    Only the first ``ncols`` columns may enter the basis.
    """
    m = T.shape[0] - 1
    while True:
        costs = T[m, :ncols]
        neg = np.flatnonzero(costs < -opt_tol)
        if neg.size == 0:
            return OPTIMAL, iters
        if iters >= max_iter:
            raise IterationLimitExceeded(f"simplex exceeded {max_iter} iterations")
        c = int(neg[0])
        col = T[:m, c]
        pos = np.flatnonzero(col > pivot_tol)
        if pos.size == 0:
            return UNBOUNDED, iters
        ratios = T[pos, -1] / col[pos]
        best = ratios.min()
        tied = pos[ratios <= best + 1e-12 * (1.0 + abs(best))]
        r = int(tied[np.argmin(basis[tied])])
        _pivot(T, r, c)
        basis[r] = c
        iters += 1


def simplex_standard(A, b, c, feas_tol: float = FEAS_TOL, pivot_tol: float = PIVOT_TOL,
                     max_iter: int = MAX_ITER, phase1_only: bool = False) -> LpSolution:
    """Solve ``min c·x  s.t.  A x = b, x ≥ 0`` by the two-phase method."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    m, nv = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase 1: one artificial per row
    T = np.zeros((m + 1, nv + m + 1))
    T[:m, :nv] = A
    T[:m, nv : nv + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :nv] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = np.arange(nv, nv + m)
    status, iters = _run(T, basis, nv, pivot_tol, feas_tol * 1e-3, max_iter, 0)
    if -T[m, -1] > feas_tol * max(1.0, float(b.max(initial=0.0))):
        return LpSolution(INFEASIBLE, iterations=iters)

    # drive remaining artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= nv:
            cand = np.flatnonzero(np.abs(T[r, :nv]) > pivot_tol)
            if cand.size == 0:
                continue
            _pivot(T, r, int(cand[0]))
            basis[r] = int(cand[0])
        keep.append(r)
    rows = np.array(keep, dtype=int)

    if phase1_only:
        x = np.zeros(nv)
        x[basis[rows]] = T[rows, -1]
        return LpSolution(OPTIMAL, x, float(c @ x), iters)

    T2 = np.zeros((rows.size + 1, nv + 1))
    T2[:-1, :nv] = T[rows, :nv]
    T2[:-1, -1] = T[rows, -1]
    basis = basis[rows].copy()
    T2[-1, :nv] = c
    for r, v in enumerate(basis):
        if c[v] != 0.0:
            T2[-1] -= c[v] * T2[r]
    status, iters = _run(T2, basis, nv, pivot_tol, feas_tol * 1e-3, max_iter, iters)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, iterations=iters)
    x = np.zeros(nv)
    x[basis] = np.maximum(T2[:-1, -1], 0.0)
    return LpSolution(OPTIMAL, x, float(c @ x), iters)


# ---------------------------------------------------------------- general problems

def _to_standard(p: LpProblem):
    """Map ``p`` to standard form; returns ``(A, b, c, recover)``."""
    cols = []          # (var, sign) per structural column
    shift = np.zeros(p.num_vars)
    extra_rows = []    # upper bounds on shifted variables
    for j, (lo, hi) in enumerate(p.bounds):
        if lo is None and hi is None:
            cols += [(j, 1.0), (j, -1.0)]
        elif lo is not None:
            shift[j] = lo
            cols.append((j, 1.0))
            if hi is not None:
                extra_rows.append((len(cols) - 1, hi - lo))
        else:
            shift[j] = hi
            cols.append((j, -1.0))
    nstruct = len(cols)
    M = np.zeros((p.num_vars, nstruct))
    for k, (j, s) in enumerate(cols):
        M[j, k] = s

    rows, rhs, rels = [], [], []
    for coeffs, rel, r in p.constraints:
        rows.append(coeffs @ M)
        rhs.append(r - coeffs @ shift)
        rels.append(rel)
    for k, ub in extra_rows:
        e = np.zeros(nstruct)
        e[k] = 1.0
        rows.append(e)
        rhs.append(ub)
        rels.append(LE)
    nslack = sum(rel != EQ for rel in rels)
    A = np.zeros((len(rows), nstruct + nslack))
    s = nstruct
    for i, (row, rel) in enumerate(zip(rows, rels)):
        A[i, :nstruct] = row
        if rel == GE:
            A[i, s] = -1.0
            s += 1
        elif rel == LE:
            A[i, s] = 1.0
            s += 1
    c = np.zeros(nstruct + nslack)
    c[:nstruct] = p.objective @ M

    def recover(z):
        return M @ z[:nstruct] + shift

    return A, np.array(rhs, dtype=float), c, recover


def solve(p: LpProblem, feas_tol: float = FEAS_TOL, pivot_tol: float = PIVOT_TOL,
          max_iter: int = MAX_ITER) -> LpSolution:
    A, b, c, recover = _to_standard(p)
    sol = simplex_standard(A, b, c, feas_tol, pivot_tol, max_iter)
    if not sol.optimal:
        return sol
    x = recover(sol.x)
    return LpSolution(OPTIMAL, x, float(p.objective @ x), sol.iterations)


# ---------------------------------------------------------------- L1 minimisation

@dataclass
class L1Result:
    status: str
    u: np.ndarray | None = None
    norm: float = float("nan")
    iterations: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == OPTIMAL


def _l1_standard(rows: np.ndarray, rhs: np.ndarray):
    k, p = rows.shape
    # columns: u+ (p), u- (p), surplus (k)
    A = np.hstack([rows, -rows, -np.eye(k)])
    c = np.concatenate([np.ones(2 * p), np.zeros(k)])
    return A, c


def l1_minimize(rows: Sequence, rhs: Sequence, feas_tol: float = FEAS_TOL,
                pivot_tol: float = PIVOT_TOL, max_iter: int = MAX_ITER) -> L1Result:
    """``min ‖u‖₁  s.t.  rows @ u ≥ rhs`` via the split ``u = u⁺ - u⁻``."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    rhs = np.asarray(rhs, dtype=float).reshape(-1)
    if rows.shape[0] != rhs.shape[0]:
        raise LpError("rows and rhs disagree in length")
    p = rows.shape[1]
    if rows.shape[0] == 0:
        return L1Result(OPTIMAL, np.zeros(p), 0.0)
    A, c = _l1_standard(rows, rhs)
    sol = simplex_standard(A, rhs, c, feas_tol, pivot_tol, max_iter)
    if not sol.optimal:
        return L1Result(sol.status, iterations=sol.iterations)
    u = sol.x[:p] - sol.x[p : 2 * p]
    return L1Result(OPTIMAL, u, float(np.abs(u).sum()), sol.iterations)


def is_feasible(rows, rhs, feas_tol: float = FEAS_TOL, pivot_tol: float = PIVOT_TOL,
                max_iter: int = MAX_ITER) -> bool:
    """Phase-1 only feasibility test of ``rows @ u ≥ rhs`` with ``u`` free."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    rhs = np.asarray(rhs, dtype=float).reshape(-1)
    if rows.shape[0] == 0:
        return True
    A, c = _l1_standard(rows, rhs)
    return simplex_standard(A, rhs, c, feas_tol, pivot_tol, max_iter, phase1_only=True).optimal

"""Small dense two-phase simplex solver.

Solves  minimize c.x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0
on dense numpy tableaus.  Pivoting follows Bland's smallest-index rule
throughout, which rules out cycling at the cost of speed; the problems
this package builds are small enough that this does not matter.

Not a general-purpose LP library: no bounds other than x >= 0, no
sparsity, no presolve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_ITERATION_LIMIT = "iteration-limit"

_PIVOT_TOL = 1e-9  # entries smaller than this count as zero when pivoting


@dataclass(frozen=True)
class LpResult:
    status: str
    objective: float      # meaningful only when status == "optimal"
    x: np.ndarray
    iterations: int


def _pivot(tableau: np.ndarray, reduced: np.ndarray, basis: np.ndarray, row: int, col: int):
    tableau[row] /= tableau[row, col]
    column = tableau[:, col].copy()
    column[row] = 0.0
    tableau -= np.outer(column, tableau[row])
    reduced -= reduced[col] * tableau[row]
    basis[row] = col


def _bland_loop(tableau, reduced, basis, active_cols: int, max_pivots: int, start_iter: int):
    """Pivot until optimal; returns (status, iterations)."""
    iters = start_iter
    while True:
        entering = -1
        candidates = np.flatnonzero(reduced[:active_cols] < -_PIVOT_TOL)
        if candidates.size:
            entering = int(candidates[0])
        if entering < 0:
            return STATUS_OPTIMAL, iters
        column = tableau[:, entering]
        positive = np.flatnonzero(column > _PIVOT_TOL)
        if positive.size == 0:
            return STATUS_UNBOUNDED, iters
        ratios = tableau[positive, -1] / column[positive]
        best = ratios.min()
        ties = positive[ratios == best]
        leaving = int(ties[np.argmin(basis[ties])])
        _pivot(tableau, reduced, basis, leaving, entering)
        iters += 1
        if iters >= max_pivots:
            return STATUS_ITERATION_LIMIT, iters


def solve_lp(
    c,
    a_ub=None,
    b_ub=None,
    a_eq=None,
    b_eq=None,
    feasibility_tol: float = 1e-7,
    max_pivots: int = 1_000_000,
) -> LpResult:
    """Minimize c.x over {A_ub x <= b_ub, A_eq x = b_eq, x >= 0}."""
    c = np.asarray(c, dtype=float)
    n = c.size
    if n == 0:
        raise ValidationError("LP has no variables")

    blocks = []
    rhs_parts = []
    m_ub = 0
    if a_ub is not None:
        a_ub = np.asarray(a_ub, dtype=float).reshape(-1, n)
        b_ub = np.asarray(b_ub, dtype=float).ravel()
        if a_ub.shape[0] != b_ub.size:
            raise ValidationError("a_ub and b_ub disagree on the number of rows")
        m_ub = a_ub.shape[0]
        blocks.append(a_ub)
        rhs_parts.append(b_ub)
    m_eq = 0
    if a_eq is not None:
        a_eq = np.asarray(a_eq, dtype=float).reshape(-1, n)
        b_eq = np.asarray(b_eq, dtype=float).ravel()
        if a_eq.shape[0] != b_eq.size:
            raise ValidationError("a_eq and b_eq disagree on the number of rows")
        m_eq = a_eq.shape[0]
        blocks.append(a_eq)
        rhs_parts.append(b_eq)
    m = m_ub + m_eq
    if m == 0:
        raise ValidationError("LP has no constraints")

    body = np.vstack(blocks)
    rhs = np.concatenate(rhs_parts)

    # slacks for the inequality rows, then sign-normalize the right side
    with_slack = np.zeros((m, n + m_ub))
    with_slack[:, :n] = body
    if m_ub:
        with_slack[np.arange(m_ub), n + np.arange(m_ub)] = 1.0
    negative = rhs < 0
    with_slack[negative] *= -1.0
    rhs = np.where(negative, -rhs, rhs)

    # rows whose slack cannot start basic need an artificial variable
    needs_art = np.zeros(m, dtype=bool)
    needs_art[m_ub:] = True
    needs_art[:m_ub] |= negative[:m_ub]
    art_rows = np.flatnonzero(needs_art)
    n_art = art_rows.size
    art_start = n + m_ub

    tableau = np.zeros((m, art_start + n_art + 1))
    tableau[:, :art_start] = with_slack
    tableau[:, -1] = rhs
    basis = np.empty(m, dtype=int)
    for i in range(m_ub):
        basis[i] = n + i
    for pos, i in enumerate(art_rows):
        tableau[i, art_start + pos] = 1.0
        basis[i] = art_start + pos

    iterations = 0
    if n_art:
        reduced = np.zeros(tableau.shape[1])
        reduced[art_start:-1] = 1.0
        for i in art_rows:
            reduced -= tableau[i]
        status, iterations = _bland_loop(tableau, reduced, basis, art_start + n_art, max_pivots, iterations)
        if status == STATUS_ITERATION_LIMIT:
            return LpResult(status, float("nan"), np.zeros(n), iterations)
        if -reduced[-1] > feasibility_tol:
            return LpResult(STATUS_INFEASIBLE, float("nan"), np.zeros(n), iterations)
        # force lingering artificials out of the basis, dropping redundant rows
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= art_start:
                pivot_cols = np.flatnonzero(np.abs(tableau[i, :art_start]) > _PIVOT_TOL)
                if pivot_cols.size:
                    _pivot(tableau, reduced, basis, i, int(pivot_cols[0]))
                else:
                    keep[i] = False
        tableau = tableau[keep]
        basis = basis[keep]
        m = tableau.shape[0]
        tableau = np.hstack([tableau[:, :art_start], tableau[:, -1:]])

    reduced = np.zeros(art_start + 1)
    reduced[:n] = c
    for i in range(m):
        if reduced[basis[i]] != 0.0:
            reduced -= reduced[basis[i]] * tableau[i]
    status, iterations = _bland_loop(tableau, reduced, basis, art_start, max_pivots, iterations)
    if status != STATUS_OPTIMAL:
        return LpResult(status, float("nan"), np.zeros(n), iterations)

    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tableau[i, -1]
    return LpResult(STATUS_OPTIMAL, float(-reduced[-1]), x, iterations)

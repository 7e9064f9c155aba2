"""Exact rational two-phase simplex with Bland's anti-cycling rule.

Solves  maximize c.w  subject to  A w = b, w >= 0  entirely in Fractions.
Small and dense on purpose: the callers here have at most a dozen rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Optional[Fraction]
    solution: Optional[list[Fraction]]


def solve_standard_form(
    A: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
    c: Sequence[Fraction],
) -> LPResult:
    m = len(A)
    n = len(c)
    rows = [[Fraction(x) for x in row] for row in A]
    rhs = [Fraction(x) for x in b]
    for i in range(m):
        if len(rows[i]) != n:
            raise ValueError("A and c have inconsistent widths")
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]

    # Phase 1: artificial variable per row, drive their sum to zero.
    tableau = [rows[i] + [Fraction(int(k == i)) for k in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    phase1_cost = [Fraction(0)] * n + [Fraction(-1)] * m
    _price_out(tableau, basis, phase1_cost)
    status = _pivot_until_optimal(tableau, basis, width=n + m)
    if status != OPTIMAL or tableau[-1][-1] != 0:
        return LPResult(INFEASIBLE, None, None)

    # Remove artificials: pivot them out of the basis where possible, drop
    # redundant rows otherwise.
    keep_rows: list[int] = []
    for i in range(m):
        if basis[i] >= n:
            pivot_col = next((j for j in range(n) if tableau[i][j] != 0), None)
            if pivot_col is None:
                continue  # redundant constraint
            _pivot(tableau, basis, i, pivot_col)
        keep_rows.append(i)
    tableau = [
        [tableau[i][j] for j in range(n)] + [tableau[i][-1]] for i in keep_rows
    ]
    basis = [basis[i] for i in keep_rows]

    # Phase 2.
    cost = [Fraction(x) for x in c]
    tableau.append([Fraction(0)] * (n + 1))
    _price_out(tableau, basis, cost)
    status = _pivot_until_optimal(tableau, basis, width=n)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, None)
    solution = [Fraction(0)] * n
    for i, var in enumerate(basis):
        solution[var] = tableau[i][-1]
    return LPResult(OPTIMAL, tableau[-1][-1], solution)


def _price_out(tableau, basis, cost) -> None:
    """Append/refresh the objective row in reduced form for the given basis."""
    n_cols = len(tableau[0]) - 1
    if len(tableau) == len(basis):
        tableau.append([Fraction(0)] * (n_cols + 1))
    z = tableau[-1]
    for j in range(n_cols + 1):
        z[j] = Fraction(0)
    for j in range(n_cols):
        z[j] = -cost[j] if j < len(cost) else Fraction(0)
    for i, var in enumerate(basis):
        coeff = cost[var] if var < len(cost) else Fraction(0)
        if coeff != 0:
            for j in range(n_cols + 1):
                z[j] += coeff * tableau[i][j]


def _pivot_until_optimal(tableau, basis, width: int) -> str:
    z = tableau[-1]
    while True:
        entering = next((j for j in range(width) if z[j] < 0), None)  # Bland: lowest index
        if entering is None:
            return OPTIMAL
        ratio: Optional[Fraction] = None
        leaving: Optional[int] = None
        for i in range(len(basis)):
            coeff = tableau[i][entering]
            if coeff > 0:
                r = tableau[i][-1] / coeff
                if ratio is None or r < ratio or (r == ratio and basis[i] < basis[leaving]):
                    ratio = r
                    leaving = i
        if leaving is None:
            return UNBOUNDED
        _pivot(tableau, basis, leaving, entering)


def _pivot(tableau, basis, row: int, col: int) -> None:
    # rows are mutated in place: callers hold references into the tableau
    prow = tableau[row]
    pivot = prow[col]
    for j in range(len(prow)):
        prow[j] /= pivot
    for i, other in enumerate(tableau):
        if i != row and other[col] != 0:
            factor = other[col]
            for j in range(len(other)):
                other[j] -= factor * prow[j]
    basis[row] = col

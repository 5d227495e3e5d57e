"""Exact phase-one simplex over the rationals.

Only what the small-instance CE oracle needs: find x >= 0 with sum(x) = 1
and A x <= 0.  Bland's rule, so degenerate problems cannot cycle.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class Infeasible(RuntimeError):
    pass


def simplex_feasible_point(A: Sequence[Sequence[Fraction]], num_vars: int) -> list[Fraction]:
    """Return x >= 0, sum(x) = 1, A x <= 0, or raise Infeasible.

    Columns: the num_vars decision variables, one slack per row of A, and a
    single artificial variable on the normalisation row.  Phase one
    minimises the artificial.
    """
    m = len(A)
    slack0 = num_vars
    art = num_vars + m
    width = art + 1
    zero, one = Fraction(0), Fraction(1)

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for r, a in enumerate(A):
        row = [Fraction(c) for c in a] + [zero] * (m + 1)
        row[slack0 + r] = one
        rows.append(row)
        rhs.append(zero)
    rows.append([one] * num_vars + [zero] * m + [one])
    rhs.append(one)
    basis = list(range(slack0, slack0 + m)) + [art]

    # objective row: reduced costs of "minimise art", expressed in the
    # current basis (art is basic in the last row)
    cost = [-c for c in rows[-1]]
    cost[art] = zero
    value = -rhs[-1]

    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for r, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                ratio = rhs[r] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    leave, best = r, ratio
        if leave is None:
            raise Infeasible("phase one unbounded; cannot happen for a bounded simplex")
        _pivot(rows, rhs, leave, enter)
        f = cost[enter]
        if f:
            prow = rows[leave]
            for j in range(width):
                if prow[j]:
                    cost[j] -= f * prow[j]
            value -= f * rhs[leave]
        basis[leave] = enter

    if value != 0:
        raise Infeasible(f"phase one optimum {-value} > 0")
    x = [zero] * num_vars
    for r, j in enumerate(basis):
        if j < num_vars:
            x[j] = rhs[r]
    return x


def _pivot(rows, rhs, r, c):
    prow = rows[r]
    p = prow[c]
    if p != 1:
        inv = 1 / p
        rows[r] = prow = [v * inv if v else v for v in prow]
        rhs[r] = rhs[r] * inv
    nz = [j for j, v in enumerate(prow) if v]
    for k, row in enumerate(rows):
        if k == r:
            continue
        f = row[c]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
            rhs[k] -= f * rhs[r]

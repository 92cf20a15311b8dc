"""Phase-one simplex over exact rationals.

Only feasibility is needed: find x >= 0 with A x = b. Bland's rule keeps the
pivoting finite; Fractions keep it exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence


def _pivot(tab: list[list[Fraction]], row: int, col: int) -> None:
    pr = tab[row]
    piv = pr[col]
    if piv != 1:
        tab[row] = pr = [v / piv for v in pr]
    for r, line in enumerate(tab):
        if r == row:
            continue
        factor = line[col]
        if factor:
            tab[r] = [a - factor * b for a, b in zip(line, pr)]


def feasible_point(A: Sequence[Sequence], b: Sequence) -> Optional[list[Fraction]]:
    """Return some x >= 0 with A x = b, or None if the system is infeasible."""
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    for i in range(m):
        coeffs = [Fraction(v) for v in A[i]]
        rhs = Fraction(b[i])
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        rows.append(coeffs + art + [rhs])
    width = n + m
    # objective row: minimise the sum of artificials, stored as reduced costs
    obj = [Fraction(0)] * (width + 1)
    for r in rows:
        for j in range(n):
            obj[j] -= r[j]
        obj[width] -= r[width]
    tab = rows + [obj]
    basis = list(range(n, n + m))

    while True:
        z = tab[m]
        col = next((j for j in range(width) if z[j] < 0), None)
        if col is None:
            break
        best, row = None, None
        for i in range(m):
            a = tab[i][col]
            if a > 0:
                ratio = tab[i][width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                    best, row = ratio, i
        if row is None:  # cannot happen in phase one: the objective is bounded below by 0
            break
        _pivot(tab, row, col)
        basis[row] = col

    if tab[m][width] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = tab[i][width]
    return x

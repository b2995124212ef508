"""Exact linear programming over the rationals.

Dense two-phase simplex on equality-constrained problems ``A x = b, x >= 0``
with Bland's rule, so every comparison is exact and cycling is impossible.
Small by design: the systems here have at most a few hundred rows (one per
observation) and a few thousand columns (one per choice type).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible"
    x: tuple[Fraction, ...] | None
    value: Fraction | None
    farkas: tuple[Fraction, ...] | None  # y with y.A <= 0, y.b > 0 when infeasible


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction]):
        self.m = len(rows)
        self.k = len(rows[0]) if rows else 0
        self.signs = []
        self.rows = []
        for i in range(self.m):
            row = [Fraction(v) for v in rows[i]]
            b = Fraction(rhs[i])
            sign = 1
            if b < 0:
                row = [-v for v in row]
                b = -b
                sign = -1
            row.extend(_ONE if j == i else _ZERO for j in range(self.m))
            row.append(b)
            self.rows.append(row)
            self.signs.append(sign)
        self.rhs_col = self.k + self.m
        self.basis = [self.k + i for i in range(self.m)]
        self.top: list[Fraction] = []

    def set_objective(self, cost: list[Fraction]) -> None:
        # top row holds z_j - c_j; basic columns are eliminated to zero
        width = self.rhs_col + 1
        top = [_ZERO] * width
        for j, c in enumerate(cost):
            top[j] = -c
        for r in range(self.m):
            coef = top[self.basis[r]]
            if coef:
                row = self.rows[r]
                self.rows_axpy(top, row, coef)
        self.top = top

    @staticmethod
    def rows_axpy(target: list[Fraction], source: list[Fraction], factor: Fraction) -> None:
        for j, v in enumerate(source):
            if v:
                target[j] -= factor * v

    def pivot(self, prow: int, pcol: int) -> None:
        row = self.rows[prow]
        piv = row[pcol]
        if piv != 1:
            inv = _ONE / piv
            row = [v * inv for v in row]
            self.rows[prow] = row
        for r in range(self.m):
            if r != prow:
                factor = self.rows[r][pcol]
                if factor:
                    self.rows_axpy(self.rows[r], row, factor)
        factor = self.top[pcol]
        if factor:
            self.rows_axpy(self.top, row, factor)
        self.basis[prow] = pcol

    def run(self, allowed: int) -> None:
        # Bland: smallest eligible entering column, smallest basic leaving var
        while True:
            entering = -1
            for j in range(allowed):
                if self.top[j] < 0:
                    entering = j
                    break
            if entering < 0:
                return
            leaving = -1
            best = None
            for r in range(self.m):
                coef = self.rows[r][entering]
                if coef > 0:
                    ratio = self.rows[r][self.rhs_col] / coef
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[r] < self.basis[leaving])
                    ):
                        best = ratio
                        leaving = r
            if leaving < 0:
                raise ValueError("unbounded objective on a supposedly bounded polytope")
            self.pivot(leaving, entering)

    def objective_value(self) -> Fraction:
        # the top row is [z_j - c_j | z] once basic columns are eliminated
        return self.top[self.rhs_col]


def solve_rational_lp(
    rows: list[list[Fraction]],
    rhs: list[Fraction],
    objective: list[Fraction] | None = None,
) -> LPResult:
    """Solve ``max objective . x`` subject to ``rows . x = rhs``, ``x >= 0``.

    With ``objective=None`` only feasibility is decided; the returned point is
    then an arbitrary vertex.  Infeasible systems come back with an exact
    Farkas certificate.  The feasible sets here are sub-polytopes of a
    probability simplex, so unboundedness is treated as a caller error.
    """
    tab = _Tableau(rows, rhs)
    m, k = tab.m, tab.k

    # phase 1: minimize artificial mass (maximize its negative)
    tab.set_objective([_ZERO] * k + [-_ONE] * m)
    tab.run(k + m)
    mass = -tab.objective_value()
    if mass > 0:
        # y = c_B B^(-1) read off the artificial columns of the top row
        farkas = [tab.signs[i] * (_ONE - tab.top[k + i]) for i in range(m)]
        return LPResult("infeasible", None, None, tuple(farkas))

    # pivot zero-valued artificials out; rows that cannot pivot are redundant
    for r in range(m):
        if tab.basis[r] >= k:
            for j in range(k):
                if tab.rows[r][j]:
                    tab.pivot(r, j)
                    break
    keep = [r for r in range(m) if tab.basis[r] < k]
    if len(keep) < m:
        tab.rows = [tab.rows[r] for r in keep]
        tab.basis = [tab.basis[r] for r in keep]
        tab.m = m = len(keep)

    if objective is not None:
        tab.set_objective([Fraction(c) for c in objective] + [_ZERO] * m)
        tab.run(k)

    x = [_ZERO] * k
    for r in range(m):
        if tab.basis[r] < k:
            x[tab.basis[r]] = tab.rows[r][tab.rhs_col]
    value = None
    if objective is not None:
        value = sum((objective[j] * x[j] for j in range(k) if x[j]), _ZERO)
    return LPResult("optimal", tuple(x), value, None)

"""Exact simplex on a condensed (Tucker) tableau with integer pivoting.

The tableau is kept as integers ``T`` over a common positive denominator
``D``; the value of an entry is ``T[i, j] / D``.  A pivot replaces every entry
by a 2x2 determinant divided exactly by the previous denominator, so no
fractions are ever reduced.  Bland's rule is used in both the primal and the
dual method, which rules out cycling.

Problem form throughout: maximise ``c.x`` subject to ``A x <= b``, ``x >= 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class Infeasible(ArithmeticError):
    pass


class Unbounded(ArithmeticError):
    pass


@dataclass
class SimplexResult:
    x: list[Fraction]        # primal solution
    y: list[Fraction]        # dual solution (one per constraint row)
    value: Fraction
    pivots: int


class Tableau:
    def __init__(self, A, b, c):
        A = [[int(v) for v in row] for row in A]
        m = len(A)
        k = len(c)
        T = np.empty((m + 1, k + 1), dtype=object)
        for i in range(m):
            if len(A[i]) != k:
                raise ValueError("ragged constraint matrix")
            T[i, :k] = A[i]
            T[i, k] = int(b[i])
        T[m, :k] = [-int(v) for v in c]
        T[m, k] = 0
        self.T = T
        self.D = 1
        self.m, self.k = m, k
        # labels: structural variables 0..k-1, slacks k..k+m-1
        self.nonbasic = list(range(k))
        self.basic = list(range(k, k + m))
        self.pivots = 0

    def pivot(self, r: int, s: int):
        T, D = self.T, self.D
        p = T[r, s]
        row = T[r, :].copy()
        col = T[:, s].copy()
        new = (T * p - np.outer(col, row)) // D
        new[r, :] = row
        new[:, s] = -col
        new[r, s] = D
        if p < 0:
            new = -new
            p = -p
        self.T, self.D = new, p
        self.basic[r], self.nonbasic[s] = self.nonbasic[s], self.basic[r]
        self.pivots += 1

    def primal(self):
        """Primal simplex; needs every right-hand side >= 0."""
        m, k = self.m, self.k
        while True:
            T = self.T
            cand = [j for j in range(k) if T[m, j] < 0]  # stored row holds -c
            if not cand:
                return
            s = min(cand, key=lambda j: self.nonbasic[j])
            best = None
            for i in range(m):
                a = T[i, s]
                if a > 0:
                    # ratio T[i,k]/a, ties broken by smallest basic label
                    key = (Fraction(int(T[i, k]), int(a)), self.basic[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise Unbounded("objective unbounded")
            self.pivot(best[1], s)

    def dual(self):
        """Dual simplex; needs every reduced cost <= 0 (stored row >= 0)."""
        m, k = self.m, self.k
        while True:
            T = self.T
            cand = [i for i in range(m) if T[i, k] < 0]
            if not cand:
                return
            r = min(cand, key=lambda i: self.basic[i])
            best = None
            for j in range(k):
                a = T[r, j]
                if a < 0:
                    key = (Fraction(int(T[m, j]), int(-a)), self.nonbasic[j])
                    if best is None or key < best[0]:
                        best = (key, j)
            if best is None:
                raise Infeasible("constraints are infeasible")
            self.pivot(r, best[1])

    def result(self) -> SimplexResult:
        T, D, m, k = self.T, self.D, self.m, self.k
        x = [Fraction(0)] * k
        y = [Fraction(0)] * m
        for i, lab in enumerate(self.basic):
            if lab < k:
                x[lab] = Fraction(int(T[i, k]), D)
        for j, lab in enumerate(self.nonbasic):
            if lab >= k:
                y[lab - k] = Fraction(int(T[m, j]), D)
        return SimplexResult(x, y, Fraction(int(T[m, k]), D), self.pivots)


def _lcm_den(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


def _integral(A, b, c):
    """Scale rational data to integers.  Returns the objective scale."""
    A2, b2 = [], []
    for row, rhs in zip(A, b):
        s = _lcm_den(list(row) + [rhs])
        A2.append([int(Fraction(v) * s) for v in row])
        b2.append(int(Fraction(rhs) * s))
    cs = _lcm_den(c)
    return A2, b2, [int(Fraction(v) * cs) for v in c], [_lcm_den(list(r) + [h]) for r, h in zip(A, b)], cs


def _solve(A, b, c, method) -> SimplexResult:
    A2, b2, c2, row_scale, cs = _integral(A, b, c)
    t = Tableau(A2, b2, c2)
    method(t)
    res = t.result()
    # undo the scaling: x unchanged, y_i scales by row_scale_i / cs
    res.y = [y * row_scale[i] / cs for i, y in enumerate(res.y)]
    res.value = res.value / cs
    return res


def maximize(A, b, c) -> SimplexResult:
    """max c.x s.t. A x <= b, x >= 0 with rational data and b >= 0."""
    if any(v < 0 for v in b):
        raise ValueError("primal simplex start needs b >= 0")
    return _solve(A, b, c, Tableau.primal)


def maximize_dual_start(A, b, c) -> SimplexResult:
    """max c.x s.t. A x <= b, x >= 0 with c <= 0 (slack basis dual feasible)."""
    if any(v > 0 for v in c):
        raise ValueError("dual simplex start needs c <= 0")
    return _solve(A, b, c, Tableau.dual)

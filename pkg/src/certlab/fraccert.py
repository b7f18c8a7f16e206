"""Fractional certificate complexity as an exact linear program.

At a claimed input X the covering LP is

    minimise sum(lam)  subject to  sum_{i in D} lam_i >= 1 for every row D,

where the rows are the minimal disagreement sets of X.  Its dual is the packing
LP: maximise sum(mu) over rows with every column load at most 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import lp as simplex
from .funcore import (
    UNDEF, BooleanFunction, PromiseFunction, SymmetricFunction, as_mask, mask_of, popcount,
)
from .measures import MeasureError, _base_value, disagreement_antichain


class CandidateInfeasible(ValueError):
    """A supplied primal or dual candidate violates a constraint."""

    def __init__(self, message, witness):
        super().__init__(f"{message}: {witness!r}")
        self.witness = witness


@dataclass(frozen=True)
class CertificateLP:
    n: int
    x: object
    rows: tuple[int, ...]        # antichain of disagreement masks

    @property
    def row_count(self) -> int:
        return len(self.rows)

    def row_sets(self) -> list[tuple[int, ...]]:
        return [tuple(i + 1 for i in range(self.n) if (r >> i) & 1) for r in self.rows]


@dataclass(frozen=True)
class LPSolution:
    lam: tuple[Fraction, ...]    # one per position
    mu: tuple[Fraction, ...]     # one per row
    value: Fraction

    def check(self, lp: CertificateLP):
        """Assert primal and dual feasibility and equal objectives."""
        if any(v < 0 for v in self.lam) or any(v < 0 for v in self.mu):
            raise AssertionError("negative LP variable")
        for r in lp.rows:
            if sum(self.lam[i] for i in range(lp.n) if (r >> i) & 1) < 1:
                raise AssertionError("primal row uncovered")
        for i in range(lp.n):
            if sum(m for m, r in zip(self.mu, lp.rows) if (r >> i) & 1) > 1:
                raise AssertionError("dual column overloaded")
        if sum(self.lam) != self.value or sum(self.mu) != self.value:
            raise AssertionError("duality gap")


def build_cert_lp(f: BooleanFunction, x) -> CertificateLP:
    if f.is_boolean:
        x = as_mask(x, f.n)
    else:
        x = tuple(x)
    _base_value(f, x)
    return CertificateLP(f.n, x, disagreement_antichain(f, x))


def _column_matrix(n: int, rows: tuple[int, ...]):
    return [[(r >> i) & 1 for r in rows] for i in range(n)]


@lru_cache(maxsize=1 << 14)
def _solve_packing(n: int, rows: tuple[int, ...]) -> LPSolution:
    if not rows:
        return LPSolution((Fraction(0),) * n, (), Fraction(0))
    res = simplex.maximize(_column_matrix(n, rows), [1] * n, [1] * len(rows))
    return LPSolution(tuple(res.y), tuple(res.x), res.value)


@lru_cache(maxsize=1 << 14)
def _solve_covering(n: int, rows: tuple[int, ...]) -> LPSolution:
    if not rows:
        return LPSolution((Fraction(0),) * n, (), Fraction(0))
    A = [[-((r >> i) & 1) for i in range(n)] for r in rows]
    res = simplex.maximize_dual_start(A, [-1] * len(rows), [-1] * n)
    return LPSolution(tuple(res.x), tuple(res.y), -res.value)


def solve_dual(lp: CertificateLP) -> LPSolution:
    """Primal simplex on the packing LP; lam is read off its dual prices."""
    sol = _solve_packing(lp.n, lp.rows)
    sol.check(lp)
    return sol


def solve_primal(lp: CertificateLP) -> LPSolution:
    """Dual simplex on the covering LP; mu is read off its dual prices."""
    sol = _solve_covering(lp.n, lp.rows)
    sol.check(lp)
    return sol


def fractional_certificate(f: BooleanFunction, x) -> Fraction:
    """FC^X(f), solved both ways and checked for equality."""
    if isinstance(f, SymmetricFunction):
        return fc_symmetric(f, popcount(as_mask(x, f.n)))
    lp = build_cert_lp(f, x)
    a = solve_primal(lp)
    b = solve_dual(lp)
    if a.value != b.value:
        raise AssertionError("primal and dual optima differ")
    return a.value


def fc_max(f: BooleanFunction) -> tuple[Fraction, Fraction, Fraction]:
    """(FC^0, FC^1, FC) over the domain."""
    best = {0: Fraction(0), 1: Fraction(0)}
    if isinstance(f, SymmetricFunction):
        for w in range(f.n + 1):
            v = f.profile[w]
            best[v] = max(best[v], fc_symmetric(f, w))
    else:
        for x in _domain_points(f):
            v = f.evaluate(x)
            best[v] = max(best[v], fractional_certificate(f, x))
    return best[0], best[1], max(best.values())


def fc_symmetric(f: SymmetricFunction, w: int) -> Fraction:
    """FC at any weight-w input via the two-variable symmetrised LP.

    Averaging an optimal lam over the permutations fixing X keeps it optimal,
    so one weight for zero positions and one for one positions suffice.
    """
    if not isinstance(f, SymmetricFunction):
        raise MeasureError("fc_symmetric needs a symmetric profile")
    n = f.n
    if not 0 <= w <= n:
        raise MeasureError("weight out of range")
    v = f.profile[w]
    pairs = [(a, b) for a in range(n - w + 1) for b in range(w + 1)
             if f.profile[w + a - b] != v]
    # keep only pairs not dominated coordinatewise
    pairs = [p for p in pairs
             if not any(q != p and q[0] <= p[0] and q[1] <= p[1] for q in pairs)]
    if not pairs:
        return Fraction(0)
    A = [[-a, -b] for a, b in pairs]
    res = simplex.maximize_dual_start(A, [-1] * len(pairs), [-(n - w), -w])
    return -res.value


def qc_estimate(fc) -> float:
    """sqrt(FC), exact when FC is a perfect rational square."""
    fc = Fraction(fc)
    if fc < 0:
        raise ValueError("fc must be non-negative")
    p, q = fc.numerator, fc.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return rp / rq
    return math.sqrt(fc)


def _disagreement(n: int, x, y) -> int:
    if isinstance(x, int):
        return x ^ as_mask(y, n)
    return sum(1 << i for i in range(n) if x[i] != y[i])


def fc_bounds_promise(f: BooleanFunction, x, lam=None, mu=None, rows=None):
    """Certified bounds (upper, lower) on FC^X from candidate solutions.

    ``lam`` is a per-position vector; it is checked against ``rows`` (an
    iterable of disagreement sets or masks) or, by default, against every
    disagreeing point of the enumerated domain.  ``mu`` maps disagreeing
    inputs to weights and is checked on every column.  Either may be None.
    """
    n = f.n
    if f.is_boolean:
        x = as_mask(x, n)
    else:
        x = tuple(x)
    fx = _base_value(f, x)
    upper = lower = None
    if lam is not None:
        lam = [Fraction(v) for v in lam]
        if len(lam) != n or any(v < 0 for v in lam):
            raise ValueError("lam must be n non-negative numbers")
        if rows is None:
            rows = (_disagreement(n, x, y) for y in _domain_points(f)
                    if f.evaluate(y) != fx)
        for r in rows:
            m = r if isinstance(r, int) else mask_of(r)
            if sum(lam[i] for i in range(n) if (m >> i) & 1) < 1:
                raise CandidateInfeasible("primal row uncovered",
                                          tuple(i + 1 for i in range(n) if (m >> i) & 1))
        upper = sum(lam)
    if mu is not None:
        load = [Fraction(0)] * n
        for y, wgt in mu.items():
            wgt = Fraction(wgt)
            if wgt < 0:
                raise CandidateInfeasible("negative dual weight", y)
            fy = f.evaluate(y)
            if fy is None or fy == fx:
                raise CandidateInfeasible("dual support outside the disagreeing set", y)
            m = _disagreement(n, x, y)
            for i in range(n):
                if (m >> i) & 1:
                    load[i] += wgt
        for i, s in enumerate(load):
            if s > 1:
                raise CandidateInfeasible("dual column overloaded", i + 1)
        lower = sum(Fraction(w) for w in mu.values())
    return upper, lower


def _domain_points(f: BooleanFunction):
    if isinstance(f, PromiseFunction) or not f.is_boolean:
        return f.domain()
    return [int(i) for i in np.flatnonzero(f.table() != UNDEF)]

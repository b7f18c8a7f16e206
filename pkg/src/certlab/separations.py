"""Growth recurrences for iterated compositions and the searches that feed
them: weight windows with equal block sensitivities, and 6-variable
functions whose certificate complexity and block sensitivity are the same
at every input."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .fraccert import fc_max
from .funcore import SymmetricFunction, TruthTable, make_weight_window
from .verifiers import child_hit_minimax
from .measures import _sym_scan, block_sensitivity, certificate_complexity, symmetric_measures


@dataclass
class RecurrenceSpec:
    """C^v_t = max over (p, q) in terms[v] of p*C^1_{t-1} + q*C^0_{t-1}.

    ``c0``/``c1`` are the level-1 values, ``bs`` the level-1 block sensitivity
    (bs_t = bs^t) and ``fc`` the level-1 fractional certificate complexity.
    """

    c0: int
    c1: int
    bs: int
    terms: dict = field(default_factory=dict)
    fc: Fraction | None = None
    name: str = ""

    @classmethod
    def linear(cls, c0, c1, bs, a, b, k, fc=None, name=""):
        """C^1_t = a C^1 + b C^0 and C^0_t = k max(C^1, C^0)."""
        return cls(c0, c1, bs, {1: [(a, b)], 0: [(k, 0), (0, k)]}, fc, name)

    @classmethod
    def uniform(cls, c, bs, fc=None, name=""):
        """Every input has the same certificate size c, so C_t = c^t."""
        return cls(c, c, bs, {1: [(c, 0), (0, c)], 0: [(c, 0), (0, c)]}, fc, name)

    @classmethod
    def from_window(cls, f: SymmetricFunction):
        n = f.n
        terms = {0: set(), 1: set()}
        c = {0: 0, 1: 0}
        bs = {0: 0, 1: 0}
        for w in range(n + 1):
            v = f.profile[w]
            L, R, _, _ = _sym_scan(f.profile, w)
            terms[v].add((L, n - R))
            cw, bw = symmetric_measures(f, w)
            c[v] = max(c[v], cw)
            bs[v] = max(bs[v], bw)
        spec = cls(c[0], c[1], min(bs.values()),
                   {v: sorted(t) for v, t in terms.items()}, name=f.ctor() or "")
        spec.bs_pair = (bs[0], bs[1])
        return spec

    def step(self, c0: int, c1: int) -> tuple[int, int]:
        new = {}
        for v in (0, 1):
            new[v] = max(p * c1 + q * c0 for p, q in self.terms[v]) if self.terms.get(v) else 0
        return new[0], new[1]

    def sequence(self, steps: int) -> list[tuple[int, int]]:
        out = [(self.c0, self.c1)]
        for _ in range(steps - 1):
            out.append(self.step(*out[-1]))
        return out


@dataclass
class Growth:
    ratio: float
    converged: bool


def growth_constant(r: RecurrenceSpec, steps: int = 200, tol: float = 1e-6) -> Growth:
    """Limit of C_t / C_{t-1} for C_t = max(C^0_t, C^1_t), in exact integers.

    A two-step average is used when consecutive ratios oscillate.
    """
    seq = [max(a, b) for a, b in r.sequence(steps)]
    if seq[-1] == 0:
        return Growth(0.0, False)

    def ratio(i, j):
        return float(Fraction(seq[i], seq[j]))

    r1, r2 = ratio(-1, -2), ratio(-2, -3)
    if abs(r1 - r2) <= tol:
        return Growth(r1, True)
    two = math.sqrt(ratio(-1, -3))
    return Growth(two, abs(two - math.sqrt(ratio(-2, -4))) <= tol)


@dataclass
class Exponents:
    rc_vs_c: float
    c_vs_qc: float
    rc_vs_fc: float | None = None


def separation_exponents(r: RecurrenceSpec) -> Exponents:
    """ln(bs)/ln(growth), its inverse doubled, and ln(bs)/ln(FC) if known."""
    g = growth_constant(r)
    e = math.log(r.bs) / math.log(g.ratio)
    fc = math.log(r.bs) / math.log(r.fc) if r.fc else None
    return Exponents(e, 2 / e, fc)


G1_SPEC = RecurrenceSpec.linear(17, 26, 17, 13, 13, 17, name="window(29,13,16)")


def closed_form_g1() -> float:
    return (13 + math.sqrt(1053)) / 2


# ---------------------------------------------------------------------------
# window search


@dataclass
class WindowRow:
    n: int
    a: int
    b: int
    c0: int
    c1: int
    bs0: int
    bs1: int
    ratio: float
    exponent: float          # ln(RC growth) / ln(C growth)
    bs_exponent: float       # ln(min bs) / ln(C growth), a lower exponent
    rc_growth: Fraction      # 1 / (best worst-case child hit probability)
    proven: bool             # bs0 == bs1
    converged: bool

    @property
    def tight(self) -> bool:
        """RC growth equals bs, so the exponent is exact."""
        return self.rc_growth == min(self.bs0, self.bs1)


def window_search(n_max: int) -> tuple[list[WindowRow], list[WindowRow]]:
    """Rank weight windows by how slowly RC grows against C.

    RC of the t-fold composition is at least bs^t, and the recursive child
    sampler gives RC = O(r^t) with r the inverse of the best worst-case hit
    probability, so the ranking key is ln(r)/ln(C growth); it coincides with
    ln(bs)/ln(C growth) exactly when r = bs.  Smaller is a stronger gap.

    Returns (ranked rows with bs0 == bs1, rows with unequal bs, keyed on the
    smaller bs and not backed by a proof).  Windows with bs 1 are skipped.
    """
    if n_max > 64:
        raise ValueError("n_max must be at most 64")
    main, other = [], []
    for n in range(1, n_max + 1):
        for a in range(n + 1):
            for b in range(a, n + 1):
                if a == 0 and b == n:
                    continue
                f = make_weight_window(n, a, b)
                spec = RecurrenceSpec.from_window(f)
                bs0, bs1 = spec.bs_pair
                if min(bs0, bs1) < 2:
                    continue
                g = growth_constant(spec)
                if g.ratio <= 1:
                    continue
                lower = math.log(min(bs0, bs1)) / math.log(g.ratio)
                if bs0 == bs1:
                    rc = 1 / child_hit_minimax(f).optimal_value
                    e = math.log(rc) / math.log(g.ratio)
                else:
                    rc, e = Fraction(min(bs0, bs1)), lower
                row = WindowRow(n, a, b, spec.c0, spec.c1, bs0, bs1, g.ratio, e, lower,
                                rc, bs0 == bs1, g.converged)
                (main if bs0 == bs1 else other).append(row)
    key = lambda r: (round(r.exponent, 12), r.n, r.a, r.b)
    return sorted(main, key=key), sorted(other, key=key)


# ---------------------------------------------------------------------------
# functions with uniform certificate size and block sensitivity


@dataclass
class UniformCheck:
    ok: bool
    witness: int | None = None
    c: int | None = None
    bs: int | None = None

    def __bool__(self):
        return self.ok


def uniform_measure_check(f, c_target: int = 5, bs_target: int = 4) -> UniformCheck:
    """C^X = 5 and bs^X = 4 at all 64 inputs of a 6-variable function."""
    if f.n != 6 or not f.is_total:
        raise ValueError("need a total function on 6 variables")
    for x in range(64):
        c, _ = certificate_complexity(f, x)
        b, _ = block_sensitivity(f, x)
        if c != c_target or b != bs_target:
            return UniformCheck(False, x, c, b)
    return UniformCheck(True)


def _violation(values: np.ndarray, c_target: int, bs_target: int) -> int:
    f = TruthTable(6, values)
    score = 0
    for x in range(64):
        c, _ = certificate_complexity(f, x)
        b, _ = block_sensitivity(f, x)
        score += abs(c - c_target) + abs(b - bs_target)
    return score


def uniform_measure_search(budget: int, seed: int, c_target: int = 5, bs_target: int = 4,
                           restart: int = 2000):
    """Seeded bit-flip hill climbing on the 64-entry truth table.

    Returns a passing TruthTable or None when the budget runs out.
    """
    rng = np.random.default_rng(seed)
    cur = rng.integers(0, 2, 64).astype(np.int8)
    score = _violation(cur, c_target, bs_target)
    stale = 0
    for _ in range(budget):
        if score == 0:
            f = TruthTable(6, cur)
            return f if uniform_measure_check(f, c_target, bs_target) else None
        j = int(rng.integers(64))
        cand = cur.copy()
        cand[j] ^= 1
        s = _violation(cand, c_target, bs_target)
        if s <= score:
            stale = 0 if s < score else stale + 1
            cur, score = cand, s
        else:
            stale += 1
        if stale > restart:
            cur = rng.integers(0, 2, 64).astype(np.int8)
            score = _violation(cur, c_target, bs_target)
            stale = 0
    return None


# Truth table (entry x is h(x), position i is bit i-1 of x) with C^X = 5 and
# bs^X = 4 at every input.  Found offline by a SAT search over the equivalent
# local conditions: no constant 2-dimensional face and no fully sensitive
# point (C^X = 5), and 4 but never 5 disjoint sensitive blocks (bs^X = 4).
H1_TABLE = "0001100011011011101111011000000101111110010000100010010011100111"


def h1() -> TruthTable:
    """The frozen uniform candidate, re-verified with the exact engines."""
    f = TruthTable(6, [int(c) for c in H1_TABLE])
    check = uniform_measure_check(f)
    if not check:
        raise AssertionError(f"h1 fails at input {check.witness}")
    return f


def h_spec(h=None) -> RecurrenceSpec:
    """Recurrence for compositions of a verified uniform 6-variable function."""
    h = h1() if h is None else h
    if not uniform_measure_check(h):
        raise ValueError("h does not have C^X = 5 and bs^X = 4 everywhere")
    _, _, fc = fc_max(h)
    return RecurrenceSpec.uniform(5, 4, fc=fc, name="h1")

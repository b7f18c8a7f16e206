"""Randomized verifiers and the classical algorithms built from them."""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .fraccert import _solve_covering
from .funcore import (
    BooleanFunction, CapExceeded, FunctionError, SymmetricFunction, as_mask, compose,
    popcount, restrict_table,
)
from .measures import minimal_masks


@dataclass
class VerifierSpec:
    x: int
    lam: list

    def __post_init__(self):
        if any(not 0 <= v <= 1 for v in self.lam):
            raise ValueError("query probabilities must lie in [0, 1]")

    @property
    def n(self) -> int:
        return len(self.lam)

    @property
    def expected_queries(self):
        return sum(self.lam)


def run_nonadaptive(v: VerifierSpec, y, seed=None, rng=None):
    """Query each i with probability lam_i; reject iff a queried bit differs.

    Returns (rejected, queried positions).
    """
    rng = rng if rng is not None else np.random.default_rng(seed)
    y = as_mask(y, v.n)
    draws = rng.random(v.n)
    queried = tuple(i + 1 for i in range(v.n) if draws[i] < v.lam[i])
    diff = y ^ v.x
    rejected = any((diff >> (p - 1)) & 1 for p in queried)
    return rejected, queried


def rejection_rate(v: VerifierSpec, y, trials: int, seed: int = 0) -> float:
    """Monte Carlo rejection probability of a nonadaptive verifier (vectorised)."""
    rng = np.random.default_rng(seed)
    lam = np.asarray([float(p) for p in v.lam])
    diff = as_mask(y, v.n) ^ v.x
    bad = np.array([(diff >> i) & 1 for i in range(v.n)], dtype=bool)
    if not bad.any():
        return 0.0
    hits = rng.random((trials, int(bad.sum()))) < lam[bad]
    return float(hits.any(axis=1).mean())


# ---------------------------------------------------------------------------
# adaptive verifiers


@dataclass
class AdaptiveVerifier:
    """Distribution over deterministic query strategies for a claimed X.

    A strategy rejects at its first disagreement with X, so the only path
    that matters is the one on which every answer agrees with X; each
    strategy is stored as that query sequence.
    """

    x: int
    n: int
    branches: list = field(default_factory=list)    # (probability, positions)

    def __post_init__(self):
        total = sum(Fraction(p) for p, _ in self.branches)
        if total != 1:
            raise ValueError("branch probabilities must sum to 1")
        for _, seq in self.branches:
            if any(not 1 <= i <= self.n for i in seq):
                raise ValueError("query position out of range")

    @property
    def expected_queries(self) -> Fraction:
        return sum(Fraction(p) * len(seq) for p, seq in self.branches)

    def run(self, y, rng) -> tuple[bool, tuple]:
        y = as_mask(y, self.n)
        probs = np.array([float(p) for p, _ in self.branches])
        k = rng.choice(len(self.branches), p=probs / probs.sum())
        seq = self.branches[k][1]
        queried = []
        for i in seq:
            queried.append(i)
            if ((y ^ self.x) >> (i - 1)) & 1:
                return True, tuple(queried)
        return False, tuple(queried)


def adaptive_to_nonadaptive(V: AdaptiveVerifier, x=None, samples: int | None = None,
                            seed: int = 0) -> VerifierSpec:
    """Nonadaptive verifier from an adaptive one.

    T = ceil(2 S_V).  One repetition picks t uniform in 1..T and a strategy
    from V, and queries that strategy's t-th position (nothing if it stops
    earlier).  lam_i is the chance of querying i in at least one of 4T
    independent repetitions; exact unless ``samples`` is given.
    """
    x = V.x if x is None else as_mask(x, V.n)
    T = math.ceil(2 * V.expected_queries)
    T = max(T, 1)
    if samples is None:
        q = [Fraction(0)] * V.n
        for p, seq in V.branches:
            for t in range(min(T, len(seq))):
                q[seq[t] - 1] += Fraction(p) / T
        lam = [1 - (1 - qi) ** (4 * T) for qi in q]
    else:
        rng = np.random.default_rng(seed)
        hits = np.zeros(V.n)
        probs = np.array([float(p) for p, _ in V.branches])
        for _ in range(samples):
            seen = set()
            for _ in range(4 * T):
                seq = V.branches[rng.choice(len(probs), p=probs)][1]
                t = rng.integers(T)
                if t < len(seq):
                    seen.add(seq[t])
            for i in seen:
                hits[i - 1] += 1
        lam = list(hits / samples)
    return VerifierSpec(x, lam)


# ---------------------------------------------------------------------------
# making a verifier one-sided


class SyntheticVerifier:
    """Finds a disagreement with probability q; otherwise rejects with
    probability r after querying only agreeing positions."""

    def __init__(self, x: int, n: int, q: float, r: float):
        self.x, self.n, self.q, self.r = x, n, q, r

    def __call__(self, y, rng):
        diff = as_mask(y, self.n) ^ self.x
        if diff and rng.random() < self.q:
            i = (diff & -diff).bit_length()
            return True, {i: ((self.x ^ diff) >> (i - 1)) & 1}
        same = [i for i in range(1, self.n + 1) if not (diff >> (i - 1)) & 1]
        seen = {}
        if same:
            i = same[rng.integers(len(same))]
            seen[i] = (self.x >> (i - 1)) & 1
        return bool(rng.random() < self.r), seen


def one_sided_transform(V, x: int):
    """V* runs V but accepts whenever V rejects without seeing a disagreement."""

    def vstar(y, rng):
        rejected, seen = V(y, rng)
        found = any(((x >> (i - 1)) & 1) != b for i, b in seen.items())
        return rejected and found, seen

    return vstar


def error_rates(V, x: int, bad_inputs, trials: int, seed: int = 0):
    """(eps0, eps1): rejection rate on X and worst acceptance rate on bad Y."""
    rng = np.random.default_rng(seed)
    eps0 = sum(V(x, rng)[0] for _ in range(trials)) / trials
    eps1 = 0.0
    for y in bad_inputs:
        acc = sum(not V(y, rng)[0] for _ in range(trials)) / trials
        eps1 = max(eps1, acc)
    return eps0, eps1


@dataclass
class OneSidedBound:
    value: float
    vacuous: bool


def one_sided_bound(eps0: float, eps1: float) -> OneSidedBound:
    """(1 - eps1)(1 - 2 eps0 / (1 - eps1)), flagged when it says nothing."""
    if eps1 >= 1:
        return OneSidedBound(0.0, True)
    v = (1 - eps1) * (1 - 2 * eps0 / (1 - eps1))
    return OneSidedBound(v, v <= 0)


# ---------------------------------------------------------------------------
# recursive verifier for compositions of a symmetric base

G1_CHILD_TABLE = {**{k: Fraction(0) for k in range(13)},
                  13: Fraction(13, 17), 14: Fraction(7, 12),
                  15: Fraction(5, 12), 16: Fraction(4, 17),
                  **{k: Fraction(1) for k in range(17, 30)}}


def recursive_child_sampler(base: SymmetricFunction, p_table, x, levels: int = 1,
                            seed=None, rng=None) -> int:
    """Descend from the root to a leaf variable (1-based position).

    At each level K counts the claimed-1 children; a claimed-1 child is
    chosen with probability p_K, otherwise a claimed-0 child, uniformly
    within the class.
    """
    rng = rng if rng is not None else np.random.default_rng(seed)
    k = base.n
    f = compose(base, base, levels)
    x = as_mask(x, f.n)
    offset = 0
    node = f
    part = x
    for depth in range(levels, 0, -1):
        width = k ** (depth - 1)
        if depth == 1:
            vals = [(part >> j) & 1 for j in range(k)]
        else:
            vals = node.child_values(part)
        K = sum(vals)
        p = Fraction(p_table[K])
        ones = [j for j in range(k) if vals[j]]
        zeros = [j for j in range(k) if not vals[j]]
        if (p == 1 and not ones) or (p == 0 and not zeros):
            raise ValueError(f"p_{K} forces an empty class")
        pick_one = rng.random() < p
        pool = ones if pick_one else zeros
        if not pool:
            raise ValueError(f"empty class drawn at K={K}")
        j = pool[rng.integers(len(pool))]
        offset += j * width
        part = (part >> (j * width)) & ((1 << width) - 1)
        if depth > 2:
            node = node.child
    return offset + 1


@dataclass
class MinimaxResult:
    value: Fraction
    worst: tuple | None           # (K, a, b) attaining the minimum
    optimal_table: dict
    optimal_value: Fraction
    vacuous: bool = False


def _hit(p: Fraction, K: int, k: int, a: int, b: int) -> Fraction:
    h = Fraction(0)
    if b:
        h += p * Fraction(b, K)
    if a:
        h += (1 - p) * Fraction(a, k - K)
    return h


def _profiles(base: SymmetricFunction, K: int):
    """Coordinatewise-minimal (a, b) flips that change the value at weight K.

    The hit probability grows with a and b, so larger pairs never attain
    the minimum.
    """
    k = base.n
    v = base.profile[K]
    pairs = []
    best_b = K + 1
    for a in range(k - K + 1):
        b = next((b for b in range(min(best_b, K + 1)) if base.profile[K + a - b] != v), None)
        if b is not None:
            pairs.append((a, b))
            best_b = b
    return pairs


def _best_p(K: int, k: int, pairs) -> tuple[Fraction, Fraction]:
    """Maximise over p in [0,1] the minimum hit probability (exact)."""
    if K == 0:
        cands = [Fraction(0)]
    elif K == k:
        cands = [Fraction(1)]
    else:
        lines = {(Fraction(b, K) - Fraction(a, k - K), Fraction(a, k - K)) for a, b in pairs}
        cands = {Fraction(0), Fraction(1)}
        lines = list(lines)
        for i in range(len(lines)):
            for j in range(i + 1, len(lines)):
                (s1, c1), (s2, c2) = lines[i], lines[j]
                if s1 != s2:
                    p = (c2 - c1) / (s1 - s2)
                    if 0 <= p <= 1:
                        cands.add(p)
        cands = sorted(cands)
    best = None
    for p in cands:
        val = min(_hit(p, K, k, a, b) for a, b in pairs)
        if best is None or val > best[1]:
            best = (p, val)
    return best


def child_hit_minimax(base: SymmetricFunction, p_table=None) -> MinimaxResult:
    """Worst-case probability that the sampled child disagrees.

    For claimed weight K and a disagreeing input that flips a claimed-0 and
    b claimed-1 children, the chosen child differs with probability
    p_K b/K + (1 - p_K) a/(k - K).
    """
    if not isinstance(base, SymmetricFunction):
        raise FunctionError("child_hit_minimax needs a symmetric base")
    k = base.n
    value, worst = None, None
    table, opt = {}, None
    for K in range(k + 1):
        pairs = _profiles(base, K)
        if not pairs:
            continue
        if p_table is not None:
            p = Fraction(p_table[K])
            for a, b in pairs:
                h = _hit(p, K, k, a, b)
                if value is None or h < value:
                    value, worst = h, (K, a, b)
        p_best, v_best = _best_p(K, k, pairs)
        table[K] = p_best
        opt = v_best if opt is None else min(opt, v_best)
    if opt is None:
        return MinimaxResult(Fraction(1), None, {}, Fraction(1), vacuous=True)
    if p_table is None:
        value = opt
    return MinimaxResult(value, worst, table, opt)


# ---------------------------------------------------------------------------
# zero-error evaluation


@lru_cache(maxsize=1 << 16)
def _optimal_lambda(n: int, key: bytes, x: int) -> tuple:
    t = np.frombuffer(key, dtype=np.int8)
    shifted = t[np.arange(1 << n) ^ x]
    rows = minimal_masks(np.flatnonzero(shifted != t[x]), n)
    return _solve_covering(n, rows).lam


def table_hash(t: np.ndarray) -> str:
    return hashlib.blake2b(t.tobytes(), digest_size=8).hexdigest()


@dataclass
class EvalResult:
    value: int
    queries: int
    iterations: int
    transcript: list = field(default_factory=list)


def zero_error_eval(f: BooleanFunction, y, seed=None, rng=None,
                    transcript: bool = False) -> EvalResult:
    """Evaluate f(Y) with zero error by repeated verifier-guided querying.

    While the restriction is not constant: take the smallest 0-input X' of
    the restriction, include each free position with probability
    min(1, 2 lam_i) for an optimal fractional certificate lam at X', query
    those positions of Y and restrict.
    """
    if not f.is_total:
        raise FunctionError("zero_error_eval needs a total function")
    if f.n > 16:
        raise CapExceeded("zero_error_eval is limited to n <= 16")
    rng = rng if rng is not None else np.random.default_rng(seed)
    y = as_mask(y, f.n)
    cur = np.ascontiguousarray(f.table())
    free = list(range(1, f.n + 1))
    queried = 0
    iterations = 0
    lines = []
    while not np.all(cur == cur[0]):
        iterations += 1
        m = len(free)
        xp = int(np.flatnonzero(cur == 0)[0])
        lam = _optimal_lambda(m, cur.tobytes(), xp)
        draw = rng.random(m)
        pick = [j for j in range(m) if draw[j] < min(1, 2 * lam[j])]
        if not pick:
            continue
        for j in reversed(pick):
            pos = free[j]
            val = (y >> (pos - 1)) & 1
            cur = restrict_table(cur, len(free), {j + 1: val})
            del free[j]
            queried += 1
            if transcript:
                lines.append(f"{pos}\t{val}\t{table_hash(cur)}")
    return EvalResult(int(cur[0]), queried, iterations, lines)

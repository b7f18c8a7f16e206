"""Set designs with bounded pairwise intersections and the symmetric partial
functions built from them."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from fractions import Fraction

import numpy as np

from .funcore import FunctionError, PromiseFunction

UNIVERSE_CAP = 4096


class DesignError(ValueError):
    pass


@dataclass
class SetDesign:
    u: int
    gamma: float
    n: int
    sets: list[tuple[int, ...]]          # sorted, 1-based elements
    bound: int

    @property
    def m(self) -> int:
        return len(self.sets)


@dataclass
class DesignCheck:
    ok: bool
    witness: tuple[int, int] | None = None
    max_intersection: int = 0

    def __bool__(self):
        return self.ok


def intersection_bound(n: int, gamma) -> int:
    return math.ceil(n / gamma)


def build_design(n: int, gamma, target_m: int, seed: int = 0, budget: int = 200_000
                 ) -> SetDesign:
    """Greedy random design on {1..ceil(gamma n)} with pairwise intersections
    at most ceil(n / gamma).

    Each attempt walks the universe in a fresh random order and keeps an
    element whenever no intersection with an accepted set would exceed the
    bound; attempts that end short of n elements are discarded.
    """
    if gamma <= 1:
        raise DesignError("gamma must exceed 1")
    u = math.ceil(gamma * n)
    if u > UNIVERSE_CAP:
        raise DesignError(f"universe {u} exceeds the cap {UNIVERSE_CAP}")
    bound = intersection_bound(n, gamma)
    rng = np.random.default_rng(seed)
    kept = np.zeros((0, u), dtype=np.int16)
    sets: list[tuple[int, ...]] = []
    for _ in range(budget):
        if len(sets) >= target_m:
            break
        load = np.zeros(len(sets), dtype=np.int16)
        pick = []
        for e in rng.permutation(u):
            if len(sets) and (load + kept[:, e]).max() > bound:
                continue
            pick.append(int(e))
            if len(sets):
                load += kept[:, e]
            if len(pick) == n:
                break
        if len(pick) < n or tuple(sorted(pick)) in {tuple(v - 1 for v in t) for t in sets}:
            continue
        row = np.zeros(u, dtype=np.int16)
        row[pick] = 1
        kept = np.vstack([kept, row])
        sets.append(tuple(v + 1 for v in sorted(pick)))
    d = SetDesign(u, gamma, n, sets, bound)
    if d.m < target_m:
        raise DesignError(f"budget exhausted with m={d.m} < {target_m}")
    return d


def verify_design(d: SetDesign) -> DesignCheck:
    """Exhaustive pairwise check of sizes, range and intersections."""
    best = 0
    for i, s in enumerate(d.sets):
        if len(set(s)) != d.n or any(not 1 <= v <= d.u for v in s):
            return DesignCheck(False, (i, i))
    for i, j in itertools.combinations(range(d.m), 2):
        k = len(set(d.sets[i]) & set(d.sets[j]))
        best = max(best, k)
        if k > d.bound:
            return DesignCheck(False, (i, j), best)
    return DesignCheck(True, None, best)


def write_design(d: SetDesign, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_design(d))


def format_design(d: SetDesign) -> str:
    lines = [f"{d.u} {d.gamma:g} {d.n} {d.m}",
             f"# pairwise intersections <= {d.bound} = ceil(n/gamma), inclusive"]
    lines += [" ".join(map(str, s)) for s in d.sets]
    return "\n".join(lines) + "\n"


def parse_design(text: str) -> SetDesign:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise DesignError("empty design file")
    head = rows[0].split()
    if len(head) != 4:
        raise DesignError("header must be 'u gamma n m'")
    try:
        u, gamma, n, m = int(head[0]), float(head[1]), int(head[2]), int(head[3])
        sets = [tuple(int(v) for v in r.split()) for r in rows[1:]]
    except ValueError as exc:
        raise DesignError(f"malformed design file: {exc}") from None
    if len(sets) != m:
        raise DesignError(f"header says m={m} but {len(sets)} sets follow")
    for s in sets:
        if len(s) != n or list(s) != sorted(s):
            raise DesignError("each set needs n sorted entries")
    return SetDesign(u, gamma, n, sets, intersection_bound(n, gamma))


def read_design(path) -> SetDesign:
    with open(path) as fh:
        return parse_design(fh.read())


def design_to_symmetric_partial(d: SetDesign, labels=None, seed: int = 0) -> PromiseFunction:
    """Inputs are orderings of some S_j (symbol s stands for element s+1);
    the value is labels[j].  Labels default to seeded random bits."""
    if len({tuple(s) for s in d.sets}) != d.m:
        raise DesignError("duplicate sets")
    if labels is None:
        labels = [int(b) for b in np.random.default_rng(seed).integers(0, 2, d.m)]
    if len(labels) != d.m:
        raise DesignError("one label per set")
    index = {frozenset(v - 1 for v in s): j for j, s in enumerate(d.sets)}
    labels = list(labels)

    def rule(y):
        if len(set(y)) != len(y):
            return None
        j = index.get(frozenset(y))
        return None if j is None else labels[j]

    def enum():
        for s in d.sets:
            yield from itertools.permutations([v - 1 for v in s])

    f = PromiseFunction(d.n, d.u, rule, enum if math.factorial(d.n) * d.m <= 10 ** 6 else None,
                        name=None, symmetric=True)
    f.design = d
    f.labels = labels
    return f


def min_pairwise_disagreement(f: PromiseFunction, samples: int = 10_000, seed: int = 0) -> int:
    """Smallest number of positions on which a 0-input and a 1-input differ.

    Exact for design functions and for enumerable domains; sampled otherwise.
    """
    d = getattr(f, "design", None)
    if d is not None:
        labels = f.labels
        if len(set(labels)) < 2:
            raise DesignError("need both values among the sets")
        worst = max(len(set(d.sets[i]) & set(d.sets[j]))
                    for i, j in itertools.combinations(range(d.m), 2)
                    if labels[i] != labels[j])
        return d.n - worst
    try:
        dom = f.domain()
    except Exception:
        dom = None
    if dom is not None:
        zeros = np.array([y for y in dom if f.evaluate(y) == 0])
        ones = np.array([y for y in dom if f.evaluate(y) == 1])
        if not len(zeros) or not len(ones):
            raise FunctionError("fewer than two value classes")
        best = f.n
        for chunk in range(0, len(ones), 64):
            block = ones[chunk:chunk + 64]
            diff = (zeros[:, None, :] != block[None, :, :]).sum(axis=2)
            best = min(best, int(diff.min()))
        return best
    if not (f.name or "").startswith("collision"):
        raise FunctionError("domain is not enumerable and no sampler is available")
    rng = np.random.default_rng(seed)
    n, k = f.n, f.alphabet
    best = n
    for _ in range(samples):
        y0 = rng.choice(k, size=n, replace=False)
        vals = rng.choice(k, size=n // 2, replace=False)
        y1 = rng.permutation(np.repeat(vals, 2))
        best = min(best, int((y0 != y1).sum()))
    return best


def design_fc_certificate(f: PromiseFunction, j: int):
    """Uniform covering certificate at the claimed input sorted(S_j).

    Every input with the other label is an ordering of some S_k and agrees
    with X on at most |S_j & S_k| positions, so each disagreement set has at
    least n - max overlap = dmin positions.  lam_i = 1/dmin then covers every
    dmin-subset, and hence every disagreement set.  Returns (x, lam, rows).
    """
    d, labels = f.design, f.labels
    overlap = max(len(set(d.sets[j]) & set(d.sets[k]))
                  for k in range(d.m) if labels[k] != labels[j])
    dmin = d.n - overlap
    x = tuple(v - 1 for v in d.sets[j])
    lam = [Fraction(1, dmin)] * d.n
    return x, lam, itertools.combinations(range(1, d.n + 1), dmin)

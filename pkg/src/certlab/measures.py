"""Exact deterministic measures: certificates, block sensitivity, minimal
blocks, neighbourhoods and decision-tree depth.

Everything at an input X is driven by the antichain of minimal disagreement
sets ``{i : y_i != x_i}`` over the Y in the domain with ``f(Y) != f(X)``.  For
Boolean functions these sets are exactly the minimal sensitive blocks of X,
so certificates are minimum hitting sets of the antichain and block
sensitivity is a maximum disjoint packing of it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .funcore import (
    DENSE_CAP, UNDEF, BooleanFunction, CapExceeded, ComposedFunction, FunctionError,
    LatticeFunction, SymmetricFunction, as_mask, mask_of, popcount, popcounts,
    positions_of, restrict_table,
)

EXACT_CAP = 20          # largest n for the generic subset-lattice engines
DT_CAP = 16
MAX_BLOCK_LIST = 200_000


class MeasureError(FunctionError):
    pass


@dataclass(frozen=True)
class Certificate:
    positions: tuple[int, ...]
    base: object

    def __len__(self):
        return len(self.positions)


@dataclass(frozen=True)
class BlockSet:
    blocks: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.blocks)


# ---------------------------------------------------------------------------
# subset-lattice helpers


def _subset_or(ind: np.ndarray, n: int) -> np.ndarray:
    """out[Z] = any(ind[W] for W subset of Z)."""
    out = ind.copy()
    for i in range(n):
        v = out.reshape(-1, 2, 1 << i)
        v[:, 1, :] |= v[:, 0, :]
    return out


def minimal_masks(masks, n: int) -> tuple[int, ...]:
    """Inclusion-minimal members of a family of masks, sorted."""
    masks = sorted(set(int(m) for m in masks), key=lambda m: (popcount(m), m))
    if n <= 10 or n > EXACT_CAP or len(masks) < 64:
        keep: list[int] = []
        for m in masks:
            if not any(k & m == k for k in keep):
                keep.append(m)
        return tuple(sorted(keep))
    ind = np.zeros(1 << n, dtype=bool)
    ind[masks] = True
    closed = _subset_or(ind, n)
    strict = np.zeros_like(ind)
    for i in range(n):
        s = strict.reshape(-1, 2, 1 << i)
        s[:, 1, :] |= closed.reshape(-1, 2, 1 << i)[:, 0, :]
    return tuple(int(z) for z in np.flatnonzero(ind & ~strict))


def _base_value(f: BooleanFunction, x):
    v = f.evaluate(x)
    if v is None:
        raise MeasureError("input is outside the domain")
    return v


def _sym_scan(profile, w: int):
    """(L, R, a*, b*) for a symmetric profile at weight w.

    ``[L, R]`` is the maximal run of constant value around w; ``a*``/``b*``
    are the fewest zeros/ones whose flip changes the value (None if none).
    """
    n = len(profile) - 1
    v = profile[w]
    L = w
    while L > 0 and profile[L - 1] == v:
        L -= 1
    R = w
    while R < n and profile[R + 1] == v:
        R += 1
    a = R + 1 - w if R < n else None
    b = w - L + 1 if L > 0 else None
    return L, R, a, b


def sensitive_masks(f: BooleanFunction, x) -> np.ndarray:
    """All Z with f(X xor Z) defined and different from f(X) (dense path)."""
    if f.n > EXACT_CAP:
        raise CapExceeded(f"n={f.n} exceeds the exact cap {EXACT_CAP}")
    x = as_mask(x, f.n)
    t = f.table(cap=1 << EXACT_CAP)
    fx = t[x]
    if fx == UNDEF:
        raise MeasureError("input is outside the domain")
    shifted = t[np.arange(1 << f.n) ^ x]
    return np.flatnonzero((shifted != UNDEF) & (shifted != fx))


def disagreement_antichain(f: BooleanFunction, x) -> tuple[int, ...]:
    """Minimal disagreement sets at ``x`` as sorted masks."""
    if not f.is_boolean:
        return _promise_antichain(f, tuple(x))
    x = as_mask(x, f.n)
    if isinstance(f, SymmetricFunction) and f.n > EXACT_CAP:
        return tuple(sorted(_symmetric_minimal(f, x)))
    if isinstance(f, LatticeFunction) and f.n > EXACT_CAP:
        if f.evaluate(x):
            raise CapExceeded("minimal blocks of a lattice 1-input need the dense engine")
        return minimal_masks({sq & ~x for sq in f.squares}, f.n)
    if f.n > EXACT_CAP:
        raise CapExceeded(f"n={f.n} exceeds the exact cap {EXACT_CAP}")
    return minimal_masks(sensitive_masks(f, x), f.n)


def _promise_antichain(f, x: tuple) -> tuple[int, ...]:
    fx = f.evaluate(x)
    if fx is None:
        raise MeasureError("input is outside the domain")
    sets = set()
    for y in f.domain():
        if f.evaluate(y) != fx:
            sets.add(sum(1 << i for i in range(f.n) if y[i] != x[i]))
    return minimal_masks(sets, f.n)


def _symmetric_minimal(f: SymmetricFunction, x: int):
    n = f.n
    w = popcount(x)
    _, _, a, b = _sym_scan(f.profile, w)
    zeros = [i for i in range(n) if not (x >> i) & 1]
    ones = [i for i in range(n) if (x >> i) & 1]
    count = 0
    for size, pool in ((a, zeros), (b, ones)):
        if size is None:
            continue
        for combo in itertools.combinations(pool, size):
            count += 1
            if count > MAX_BLOCK_LIST:
                raise CapExceeded("too many minimal blocks to list")
            yield sum(1 << i for i in combo)


# ---------------------------------------------------------------------------
# minimum hitting set and maximum packing over an antichain


@lru_cache(maxsize=1 << 16)
def min_hitting_set(n: int, rows: tuple[int, ...]) -> int:
    """Lexicographically first minimum hitting set, as a mask."""
    if not rows:
        return 0
    if n > EXACT_CAP:
        raise CapExceeded(f"n={n} exceeds the exact cap {EXACT_CAP}")
    if n <= 6:
        for size in range(n + 1):
            for combo in itertools.combinations(range(n), size):
                s = sum(1 << i for i in combo)
                if all(r & s for r in rows):
                    return s
    ind = np.zeros(1 << n, dtype=bool)
    ind[list(rows)] = True
    contains = _subset_or(ind, n)
    free = np.flatnonzero(~contains)       # complements of certificates
    w = popcounts(n)[free]
    top = free[w == w.max()]
    full = (1 << n) - 1
    return min((full ^ int(F) for F in top), key=positions_of)


@lru_cache(maxsize=1 << 16)
def max_packing(rows: tuple[int, ...]) -> tuple[int, ...]:
    """Maximum family of pairwise disjoint rows (exact branch and bound)."""
    rows = tuple(sorted(rows, key=lambda r: ((r & -r).bit_length(), popcount(r), r)))

    @lru_cache(maxsize=None)
    def best(avail: int) -> tuple[int, ...]:
        fit = [r for r in rows if r & ~avail == 0]
        if not fit:
            return ()
        union = 0
        for r in fit:
            union |= r
        bound = popcount(union) // min(popcount(r) for r in fit)
        e = union & -union
        chosen: tuple[int, ...] = ()
        for r in fit:
            if r & e:
                cand = (r,) + best(avail & ~r)
                if len(cand) > len(chosen):
                    chosen = cand
                    if len(chosen) == bound:
                        return chosen
        rest = best(avail & ~e)
        return rest if len(rest) > len(chosen) else chosen

    full = 0
    for r in rows:
        full |= r
    return tuple(sorted(best(full), key=positions_of))


# ---------------------------------------------------------------------------
# certificate complexity


def is_certificate(f: BooleanFunction, x, positions) -> bool:
    """True iff fixing ``positions`` to their values in ``x`` forces f(x)."""
    positions = tuple(positions)
    if isinstance(f, SymmetricFunction):
        x = as_mask(x, f.n)
        s = mask_of(positions)
        s1 = popcount(x & s)
        s0 = len(positions) - s1
        v = f.profile[popcount(x)]
        return all(f.profile[u] == v for u in range(s1, f.n - s0 + 1))
    if isinstance(f, ComposedFunction) and f.n > EXACT_CAP:
        return _composed_is_certificate(f, as_mask(x, f.n), mask_of(positions))
    if not f.is_boolean:
        x = tuple(x)
        fx = _base_value(f, x)
        for y in f.domain():
            if all(y[p - 1] == x[p - 1] for p in positions) and f.evaluate(y) != fx:
                return False
        return True
    x = as_mask(x, f.n)
    t = f.table(cap=1 << EXACT_CAP)
    fx = t[x]
    s = mask_of(positions)
    idx = np.arange(1 << f.n)
    agree = ((idx ^ x) & s) == 0
    vals = t[agree]
    return bool(np.all((vals == fx) | (vals == UNDEF)))


def certificate_complexity(f: BooleanFunction, x) -> tuple[int, Certificate]:
    """C^X(f) with a lexicographically first minimum certificate."""
    if isinstance(f, SymmetricFunction):
        x = as_mask(x, f.n)
        mask = _symmetric_certificate(f, x)
    elif isinstance(f, ComposedFunction) and isinstance(f.outer, SymmetricFunction) \
            and f.n > EXACT_CAP:
        x = as_mask(x, f.n)
        mask = _composed(f, x)[0]
    else:
        if f.is_boolean:
            x = as_mask(x, f.n)
        _base_value(f, x)
        mask = min_hitting_set(f.n, disagreement_antichain(f, x))
    cert = Certificate(positions_of(mask), x)
    if not is_certificate(f, x, cert.positions):
        raise AssertionError("certificate failed re-verification")
    return len(cert), cert


def _symmetric_certificate(f: SymmetricFunction, x: int) -> int:
    L, R, _, _ = _sym_scan(f.profile, popcount(x))
    ones = [i for i in range(f.n) if (x >> i) & 1][:L]
    zeros = [i for i in range(f.n) if not (x >> i) & 1][:f.n - R]
    return sum(1 << i for i in ones + zeros)


# ---------------------------------------------------------------------------
# block sensitivity and minimal blocks


def is_sensitive(f: BooleanFunction, x: int, block_mask: int) -> bool:
    fx = f.evaluate(x)
    fy = f.evaluate(x ^ block_mask)
    return fy is not None and fy != fx


def minimal_blocks(f: BooleanFunction, x) -> list[tuple[int, ...]]:
    """All inclusion-minimal sensitive blocks of x."""
    if not f.is_boolean:
        raise MeasureError("minimal blocks need a Boolean alphabet")
    x = as_mask(x, f.n)
    _base_value(f, x)
    rows = disagreement_antichain(f, x)
    for r in rows:
        if not is_sensitive(f, x, r):
            raise AssertionError("block is not sensitive")
        for p in positions_of(r):
            if is_sensitive(f, x, r & ~(1 << (p - 1))):
                raise AssertionError("block is not minimal")
    return sorted((positions_of(r) for r in rows), key=lambda b: (len(b), b))


def neighborhood(f: BooleanFunction, x) -> list[int]:
    """X together with X^(B) for every minimal block B (packed masks)."""
    x = as_mask(x, f.n)
    out = {x}
    for b in minimal_blocks(f, x):
        out.add(x ^ mask_of(b))
    return sorted(out)


def block_sensitivity(f: BooleanFunction, x) -> tuple[int, BlockSet]:
    """bs^X(f) with a witness family of disjoint sensitive blocks."""
    if not f.is_boolean:
        raise MeasureError("block sensitivity needs a Boolean alphabet")
    x = as_mask(x, f.n)
    _base_value(f, x)
    if isinstance(f, SymmetricFunction):
        masks = _symmetric_packing(f, x)
    elif isinstance(f, ComposedFunction) and isinstance(f.outer, SymmetricFunction) \
            and f.n > EXACT_CAP:
        masks = _composed(f, x)[1]
    else:
        masks = max_packing(disagreement_antichain(f, x))
    used = 0
    for m in masks:
        if m & used or not is_sensitive(f, x, m):
            raise AssertionError("block family failed re-verification")
        used |= m
    return len(masks), BlockSet(tuple(positions_of(m) for m in masks))


def _symmetric_packing(f: SymmetricFunction, x: int) -> list[int]:
    _, _, a, b = _sym_scan(f.profile, popcount(x))
    out = []
    for size, bit in ((a, 0), (b, 1)):
        if size is None:
            continue
        pool = [i for i in range(f.n) if (x >> i) & 1 == bit]
        for j in range(len(pool) // size):
            out.append(sum(1 << i for i in pool[j * size:(j + 1) * size]))
    return out


def symmetric_measures(f: SymmetricFunction, w: int) -> tuple[int, int]:
    """Closed-form (C^X, bs^X) for any X of weight w.

    A certificate fixes s1 ones and s0 zeros so that the profile is constant on
    [s1, n - s0]; the cheapest choice is s1 = L, s0 = n - R for the maximal
    constant run [L, R] through w.  A block flipping a zeros and b ones is
    sensitive iff profile[w + a - b] differs, and any such block contains a
    pure block of a* zeros or b* ones, so disjoint packings use only those.
    """
    if not isinstance(f, SymmetricFunction):
        raise MeasureError("symmetric_measures needs a symmetric profile")
    if not 0 <= w <= f.n:
        raise MeasureError("weight out of range")
    L, R, a, b = _sym_scan(f.profile, w)
    bs = ((f.n - w) // a if a else 0) + (w // b if b else 0)
    return L + (f.n - R), bs


# ---------------------------------------------------------------------------
# composed fast path (symmetric outer)


def _block_count(caps: list[int], size: int) -> int:
    """Most size-subsets with element i used at most caps[i] times."""
    k = 0
    hi = sum(caps) // size
    while k < hi and sum(min(c, k + 1) for c in caps) >= size * (k + 1):
        k += 1
    return k


def _composed(f: ComposedFunction, x: int):
    """(certificate mask, packing masks) at x, built from child witnesses."""
    width = f.block
    low = (1 << width) - 1
    child = f.child
    parts = [(x >> (j * width)) & low for j in range(f.k)]
    sub = []
    for p in parts:
        if isinstance(child, ComposedFunction) and child.n > EXACT_CAP:
            sub.append(_composed(child, p))
        else:
            _, c = certificate_complexity(child, p)
            _, bset = block_sensitivity(child, p)
            sub.append((mask_of(c.positions), [mask_of(b) for b in bset.blocks]))
    vals = [child.evaluate(p) for p in parts]
    z = sum(v << j for j, v in enumerate(vals))
    L, R, a, b = _sym_scan(f.outer.profile, popcount(z))
    # certificate: cheapest L one-children and n-R zero-children
    cert = 0
    for need, bit in ((L, 1), (f.k - R, 0)):
        idx = [j for j in range(f.k) if vals[j] == bit]
        idx.sort(key=lambda j: (popcount(sub[j][0]), j))
        for j in idx[:need]:
            cert |= sub[j][0] << (j * width)
    # packing: b-matching of pure outer blocks against child packings
    blocks = []
    for size, bit in ((a, 0), (b, 1)):
        if size is None:
            continue
        idx = [j for j in range(f.k) if vals[j] == bit]
        caps = [len(sub[j][1]) for j in idx]
        k = _block_count(caps, size)
        seq = [j for j, c in zip(idx, caps) for _ in range(min(c, k))]
        nxt = {j: 0 for j in idx}
        for t in range(k):
            m = 0
            for u in range(size):
                j = seq[t + u * k]
                m |= sub[j][1][nxt[j]] << (j * width)
                nxt[j] += 1
            blocks.append(m)
    return cert, blocks


def _composed_is_certificate(f: ComposedFunction, x: int, s: int) -> bool:
    width = f.block
    low = (1 << width) - 1
    child = f.child
    fixed = 0  # children whose block part certifies them
    ones = 0
    for j in range(f.k):
        part = (x >> (j * width)) & low
        cpos = positions_of((s >> (j * width)) & low)
        if child.evaluate(part):
            ones |= 1 << j
        if is_certificate(child, part, cpos):
            fixed |= 1 << j
    return is_certificate(f.outer, ones, positions_of(fixed))


@dataclass(frozen=True)
class LevelValues:
    c0: int
    c1: int
    bs0: int
    bs1: int

    @property
    def c(self):
        return max(self.c0, self.c1)

    @property
    def bs(self):
        return max(self.bs0, self.bs1)


def compose_level(outer: SymmetricFunction, child: LevelValues) -> LevelValues:
    """Worst-case measures of outer(child, ..., child) from the child's values.

    Every child can independently sit at its worst input for either value, so
    the maxima follow from the outer profile alone.
    """
    n = outer.n
    c = {0: 0, 1: 0}
    bs = {0: 0, 1: 0}
    cap = {0: child.bs0, 1: child.bs1}
    for w in range(n + 1):
        v = outer.profile[w]
        L, R, a, b = _sym_scan(outer.profile, w)
        c[v] = max(c[v], L * child.c1 + (n - R) * child.c0)
        k = 0
        if a:
            k += _block_count([cap[0]] * (n - w), a)
        if b:
            k += _block_count([cap[1]] * w, b)
        bs[v] = max(bs[v], k)
    return LevelValues(c[0], c[1], bs[0], bs[1])


def _max_measures(f: BooleanFunction) -> LevelValues:
    if isinstance(f, SymmetricFunction):
        c = {0: 0, 1: 0}
        bs = {0: 0, 1: 0}
        for w in range(f.n + 1):
            cw, bw = symmetric_measures(f, w)
            v = f.profile[w]
            c[v] = max(c[v], cw)
            bs[v] = max(bs[v], bw)
        return LevelValues(c[0], c[1], bs[0], bs[1])
    if isinstance(f, ComposedFunction) and isinstance(f.outer, SymmetricFunction) \
            and _nonconstant(f.inner):
        return compose_level(f.outer, _max_measures(f.child))
    c = {0: 0, 1: 0}
    bs = {0: 0, 1: 0}
    points = (f.domain() if not f.is_boolean else
              [int(i) for i in np.flatnonzero(f.table(cap=1 << EXACT_CAP) != UNDEF)])
    for x in points:
        v = f.evaluate(x)
        c[v] = max(c[v], certificate_complexity(f, x)[0])
        if f.is_boolean:
            bs[v] = max(bs[v], block_sensitivity(f, x)[0])
    return LevelValues(c[0], c[1], bs[0], bs[1])


def _nonconstant(f: BooleanFunction) -> bool:
    if isinstance(f, SymmetricFunction):
        return len(set(f.profile)) > 1
    return len(set(f.table().tolist())) > 1


def certificate_complexity_max(f: BooleanFunction) -> tuple[int, int, int]:
    """(C^0, C^1, C); a value class with no inputs contributes 0."""
    m = _max_measures(f)
    return m.c0, m.c1, m.c


def block_sensitivity_max(f: BooleanFunction) -> tuple[int, int, int]:
    """(bs^0, bs^1, bs)."""
    if not f.is_boolean:
        raise MeasureError("block sensitivity needs a Boolean alphabet")
    m = _max_measures(f)
    return m.bs0, m.bs1, m.bs


# ---------------------------------------------------------------------------
# decision trees


def decision_tree_complexity(f: BooleanFunction) -> int:
    """D(f) by memoised recursion over restrictions."""
    if not f.is_total:
        raise MeasureError("decision-tree depth needs a total function")
    if f.n > DT_CAP:
        raise CapExceeded(f"n={f.n} exceeds the decision-tree cap {DT_CAP}")
    return _dt(f.n, f.table().tobytes())


@lru_cache(maxsize=1 << 20)
def _dt(n: int, key: bytes) -> int:
    t = np.frombuffer(key, dtype=np.int8)
    if np.all(t == t[0]):
        return 0
    best = n
    for p in range(1, n + 1):
        d0 = _dt(n - 1, restrict_table(t, n, {p: 0}).tobytes())
        if 1 + d0 >= best:
            continue
        d1 = _dt(n - 1, restrict_table(t, n, {p: 1}).tobytes())
        best = min(best, 1 + max(d0, d1))
    return best


def dense_cap_ok(f: BooleanFunction) -> bool:
    return f.is_boolean and (1 << f.n) <= DENSE_CAP

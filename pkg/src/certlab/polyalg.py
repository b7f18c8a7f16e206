"""Multilinear polynomials over the Boolean cube.

Monomials are masks (bit i-1 set for variable x_i); the empty mask is the
constant term.  Coefficients are Python ints or Fractions, never floats.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import flint

from .funcore import BooleanFunction, CapExceeded, FunctionError, popcount, popcounts, positions_of

NDEG_CAP = 12
MODULUS = (1 << 31) - 1


class PolyError(ValueError):
    pass


@dataclass
class MultilinearPoly:
    n: int
    coeffs: dict[int, object] = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {m: c for m, c in self.coeffs.items() if c != 0}

    @property
    def degree(self) -> int:
        """Largest monomial size; -1 for the zero polynomial."""
        return max((popcount(m) for m in self.coeffs), default=-1)

    @property
    def monomials(self) -> list[int]:
        return sorted(self.coeffs, key=lambda m: (popcount(m), m))

    def is_zero(self) -> bool:
        return not self.coeffs

    def evaluate(self, x: int):
        return sum((c for m, c in self.coeffs.items() if m & x == m), 0)

    def values(self) -> np.ndarray:
        """All 2^n evaluations (object array, exact)."""
        a = np.zeros(1 << self.n, dtype=object)
        for m, c in self.coeffs.items():
            a[m] = c
        for i in range(self.n):
            v = a.reshape(-1, 2, 1 << i)
            v[:, 1, :] += v[:, 0, :]
        return a

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for m in self.monomials:
            c = self.coeffs[m]
            name = "".join(f"x{p}" for p in positions_of(m)) or "1"
            if name == "1":
                parts.append(str(c))
            else:
                parts.append(name if c == 1 else f"-{name}" if c == -1 else f"{c}*{name}")
        return " + ".join(parts).replace("+ -", "- ")


def _mobius_ints(values, n: int) -> np.ndarray:
    a = np.array(values, dtype=object)
    for i in range(n):
        v = a.reshape(-1, 2, 1 << i)
        v[:, 1, :] -= v[:, 0, :]
    return a


def mobius_transform(f: BooleanFunction) -> MultilinearPoly:
    """The unique multilinear polynomial agreeing with f on the cube."""
    if not f.is_total:
        raise FunctionError("the Moebius transform needs a total function")
    if f.n > 20:
        raise CapExceeded("n > 20")
    t = f.table().astype(np.int64)
    for i in range(f.n):
        v = t.reshape(-1, 2, 1 << i)
        v[:, 1, :] -= v[:, 0, :]
    nz = np.flatnonzero(t)
    return MultilinearPoly(f.n, {int(m): int(t[m]) for m in nz})


def degree(f: BooleanFunction) -> int:
    return max(mobius_transform(f).degree, 0)


# ---------------------------------------------------------------------------
# nondeterministic degree


@dataclass
class NdegResult:
    degree: int
    witness: MultilinearPoly
    degenerate: bool = False
    # an X in f^-1(1) forced to zero by every polynomial of degree < degree
    blocked_input: int | None = None

    def __iter__(self):
        return iter((self.degree, self.witness))


def _constraints(n: int, ones: np.ndarray, d: int):
    """Rows: monomials of size > d; columns: points of f^-1(1).

    Entry (M, X) is (-1)^{|M|-|X|} when X is a subset of M, so row M is the
    Moebius coefficient of M for a function supported on f^-1(1).
    """
    w = popcounts(n)
    rows = np.flatnonzero(w > d)
    sub = (rows[:, None] & ones[None, :]) == ones[None, :]
    sign = np.where((w[rows][:, None] - w[ones][None, :]) % 2, -1, 1)
    mat = np.where(sub, sign, 0)
    keep = np.any(mat != 0, axis=1)
    return mat[keep]


def _rref_mod(mat: np.ndarray) -> tuple[np.ndarray, int, list[int]]:
    """Reduced row echelon form mod p as (matrix, rank, pivot columns)."""
    r, c = mat.shape
    m = flint.nmod_mat(r, c, (mat.astype(np.int64) % MODULUS).ravel().tolist(), MODULUS)
    red, rank = m.rref()
    red = np.array([int(v) for v in red.entries()], dtype=np.int64).reshape(r, c)[:rank]
    piv = [int(np.flatnonzero(row)[0]) for row in red]
    return red, rank, piv


def _forced_mod(mat: np.ndarray) -> tuple[list[int], int, list[int]]:
    """Columns that vanish on the whole kernel (mod p), with rank and pivots."""
    if mat.shape[0] == 0:
        return [], 0, []
    red, rank, piv = _rref_mod(mat)
    free = np.ones(mat.shape[1], dtype=bool)
    free[piv] = False
    loose = red[:, free].any(axis=1)
    return [j for j, ok in zip(piv, loose) if not ok], rank, piv


def _independent_rows(mat: np.ndarray, rank: int) -> list[int]:
    _, r2, rows = _rref_mod(mat.T)
    if r2 != rank:
        raise ArithmeticError("inconsistent modular rank")
    return rows


def _fmpz(mat) -> flint.fmpz_mat:
    mat = np.asarray(mat)
    return flint.fmpz_mat(int(mat.shape[0]), int(mat.shape[1]), mat.astype(np.int64).ravel().tolist())


def _solve_exact(A: np.ndarray, b: list[int]) -> list[Fraction] | None:
    """Solve a square nonsingular integer system exactly (Dixon lifting)."""
    Aq = flint.fmpq_mat(_fmpz(A))
    bq = flint.fmpq_mat(len(b), 1, [int(v) for v in b])
    try:
        sol = Aq.solve(bq, algorithm="dixon")
    except ZeroDivisionError:
        return None
    return [Fraction(int(sol[i, 0].p), int(sol[i, 0].q)) for i in range(len(b))]


def _kernel_witness(mat: np.ndarray, piv, rank, seed: int = 1):
    """An exact integer kernel vector with every coordinate nonzero, or None."""
    cols = mat.shape[1]
    pivset = set(piv)
    free = [j for j in range(cols) if j not in pivset]
    rows = _independent_rows(mat, rank) if rank else []
    rng = np.random.default_rng(seed)
    for attempt in range(4):
        v = [Fraction(0)] * cols
        vf = (np.ones(len(free), dtype=np.int64) if attempt == 0
              else rng.integers(1, 1 << 20, size=len(free)))
        for j, val in zip(free, vf):
            v[j] = Fraction(int(val))
        if rank:
            sub = mat[np.ix_(rows, piv)]
            rhs = (-(mat[np.ix_(rows, free)].astype(np.int64) @ vf)).tolist()
            vp = _solve_exact(sub, rhs)
            if vp is None:
                return None
            for j, val in zip(piv, vp):
                v[j] = val
        den = math.lcm(*(x.denominator for x in v)) if v else 1
        iv = [int(x * den) for x in v]
        if any(x == 0 for x in iv):
            continue
        prod = _fmpz(mat) * flint.fmpz_mat(cols, 1, iv)
        if all(int(prod[i, 0]) == 0 for i in range(mat.shape[0])):
            return iv
        return None
    return None


def _forced_certificate(mat: np.ndarray, rank: int, piv, col: int) -> bool:
    """Exactly certify that column ``col`` is zero on the whole kernel by
    expressing the unit vector e_col as a rational combination of rows."""
    rows = _independent_rows(mat, rank)
    sub = mat[np.ix_(rows, piv)].T
    target = [1 if j == col else 0 for j in piv]
    y = _solve_exact(sub, target)
    if y is None:
        return False
    den = math.lcm(*(x.denominator for x in y))
    iy = [int(x * den) for x in y]
    comb = flint.fmpz_mat(1, len(rows), iy) * _fmpz(mat[rows])
    return all(int(comb[0, j]) == (den if j == col else 0) for j in range(mat.shape[1]))


def _exact_forced(mat: np.ndarray) -> list[int]:
    """Slow exact fallback: forced columns from an exact rational rref."""
    q = flint.fmpq_mat(_fmpz(mat))
    red, rank = q.rref()
    cols = mat.shape[1]
    piv = []
    j = 0
    for i in range(rank):
        while red[i, j] == 0:
            j += 1
        piv.append(j)
        j += 1
    free = [k for k in range(cols) if k not in set(piv)]
    return [j for i, j in enumerate(piv) if all(red[i, k] == 0 for k in free)]


class _Levels:
    """Constraint matrices and their modular analysis, memoised per degree."""

    def __init__(self, n: int, ones: np.ndarray):
        self.n, self.ones = n, ones
        self._cache = {}

    def get(self, d: int):
        if d not in self._cache:
            mat = _constraints(self.n, self.ones, d)
            self._cache[d] = (mat,) + _forced_mod(mat)
        return self._cache[d]

    def feasible(self, d: int) -> bool:
        return not self.get(d)[1]


def ndeg(f: BooleanFunction) -> NdegResult:
    """Minimum degree of a polynomial that is nonzero exactly on f^-1(1).

    A polynomial vanishing on f^-1(0) is the same thing as a function g
    supported on f^-1(1); its degree is at most d iff every Moebius
    coefficient of size > d vanishes.  The threshold d is located modulo a
    large prime, then the witness at d and an obstruction at d-1 are
    produced and checked in exact arithmetic.
    """
    if not f.is_total:
        raise FunctionError("ndeg needs a total function")
    if f.n > NDEG_CAP:
        raise CapExceeded(f"n={f.n} exceeds the ndeg cap {NDEG_CAP}")
    n = f.n
    ones = np.flatnonzero(f.table() == 1)
    if ones.size == 0:
        return NdegResult(0, MultilinearPoly(n), degenerate=True)
    top = degree(f)
    levels = _Levels(n, ones)
    # feasibility is monotone in d; random functions sit near n/2
    d = min(top, (n + 1) // 2)
    if levels.feasible(d):
        while d > 0 and levels.feasible(d - 1):
            d -= 1
    else:
        while d < top and not levels.feasible(d):
            d += 1
    while True:
        witness = _witness_at(f, levels, d)
        if witness is not None:
            break
        d += 1
    blocked = None
    while d > 0:
        blocked = _obstruction_at(levels, d - 1)
        if blocked is not None:
            break
        w2 = _witness_at(f, levels, d - 1)
        if w2 is None:
            raise ArithmeticError("could not certify the degree")
        witness, d = w2, d - 1
    return NdegResult(d, witness, blocked_input=blocked)


def _witness_at(f: BooleanFunction, levels: _Levels, d: int) -> MultilinearPoly | None:
    n = f.n
    if d >= degree(f):
        return mobius_transform(f)
    mat, forced, rank, piv = levels.get(d)
    if forced and _exact_forced(mat):
        return None
    g = _kernel_witness(mat, piv, rank) if mat.shape[0] else [1] * len(levels.ones)
    if g is None:
        return None
    vals = [0] * (1 << n)
    for x, v in zip(levels.ones, g):
        vals[int(x)] = v
    coeffs = _mobius_ints(vals, n)
    p = MultilinearPoly(n, {m: int(c) for m, c in enumerate(coeffs) if c != 0})
    if not verify_nondeterministic(p, f, d):
        return None
    return p


def _obstruction_at(levels: _Levels, d: int) -> int | None:
    """An X in f^-1(1) on which every degree-<=d candidate vanishes."""
    mat, forced, rank, piv = levels.get(d)
    if not forced:
        return None
    if _forced_certificate(mat, rank, piv, forced[0]):
        return int(levels.ones[forced[0]])
    exact = _exact_forced(mat)
    return int(levels.ones[exact[0]]) if exact else None


def verify_nondeterministic(p: MultilinearPoly, f: BooleanFunction, d: int | None = None) -> bool:
    """p(X) != 0 exactly when f(X) = 1, and deg p <= d if given."""
    if d is not None and p.degree > d:
        return False
    vals = p.values()
    t = f.table()
    nz = np.array([v != 0 for v in vals], dtype=bool)
    return bool(np.array_equal(nz, t == 1))


# ---------------------------------------------------------------------------
# maxonomials and the shrinking process


def maxonomials(p: MultilinearPoly) -> list[int]:
    """Monomials of p not strictly contained in another monomial of p."""
    if p.is_zero():
        raise PolyError("the zero polynomial has no monomials")
    mons = p.monomials
    return [m for m in mons if not any(o != m and o & m == m for o in mons)]


def nisan_smolensky_block(p: MultilinearPoly, f: BooleanFunction, monomial: int, x: int):
    """A block B inside ``monomial`` with f(X^(B)) = 1, for f(X) = 0.

    Blocks are tried by size, then lexicographically.
    """
    if not verify_nondeterministic(p, f):
        raise PolyError("p does not represent f nondeterministically")
    if monomial not in maxonomials(p):
        raise PolyError("not a maxonomial of p")
    if f.evaluate(x) != 0:
        raise PolyError("X must be a 0-input")
    pos = positions_of(monomial)
    for size in range(1, len(pos) + 1):
        for combo in itertools.combinations(pos, size):
            b = sum(1 << (q - 1) for q in combo)
            if f.evaluate(x ^ b) == 1:
                return combo
    raise AssertionError("no sensitive block inside the maxonomial")


def omega_weight(monomials) -> int:
    """Sum of deg(M)! over the set (the constant monomial counts 0! = 1)."""
    return sum(math.factorial(popcount(m)) for m in set(monomials))


def _trace_weight(mons) -> int:
    return sum(math.factorial(popcount(m)) for m in mons if m)


def drop_largest(m: int) -> int:
    return m & ~(1 << (m.bit_length() - 1))


def fair_coin_rule(rng, monomial: int):
    """Shrink with probability 1/2 by dropping the largest variable."""
    return drop_largest(monomial) if rng.random() < 0.5 else None


@dataclass
class ShrinkTrace:
    iterations: int
    omega: list[int]           # weight before each iteration, then the final one


def shrink_simulation(p: MultilinearPoly, shrink_rule=None, rng_seed: int = 0,
                      max_iterations: int = 1_000_000) -> ShrinkTrace:
    """Run the shrinking process until only a constant (or nothing) is left.

    ``shrink_rule(rng, M)`` returns the replacement monomial or None.
    """
    rule = shrink_rule or fair_coin_rule
    rng = np.random.default_rng(rng_seed)
    mons = set(p.coeffs)
    trace = [_trace_weight(mons)]
    it = 0
    while any(m for m in mons):
        if it >= max_iterations:
            raise RuntimeError("shrinking did not finish")
        tops = maxonomials(MultilinearPoly(p.n, {m: 1 for m in mons}))
        new = set(mons)
        for m in tops:
            r = rule(rng, m)
            if r is not None:
                if popcount(r) != popcount(m) - 1:
                    raise PolyError("a shrink must lower the degree by exactly one")
                new.discard(m)
                new.add(r)
        mons = new
        it += 1
        trace.append(_trace_weight(mons))
    return ShrinkTrace(it, trace)


def shrink_bound(n: int, deg: int) -> float:
    """log_{4e/(4e-1)}(2 n^deg deg!)."""
    if deg <= 0:
        return 0.0
    return math.log(2 * n ** deg * math.factorial(deg)) / math.log(4 * math.e / (4 * math.e - 1))


def shrink_batch(p: MultilinearPoly, runs: int, rng_seed: int = 0, prob: float = 0.5,
                 max_iterations: int = 10_000) -> np.ndarray:
    """Iteration counts of ``runs`` independent fair-coin shrink processes.

    Vectorised over runs: each row of a boolean matrix is a monomial set.
    """
    n = p.n
    size = 1 << n
    rng = np.random.default_rng(rng_seed)
    S = np.zeros((runs, size), dtype=bool)
    S[:, list(p.coeffs)] = True
    counts = np.zeros(runs, dtype=np.int64)
    active = S[:, 1:].any(axis=1)
    it = 0
    while active.any():
        if it >= max_iterations:
            raise RuntimeError("shrinking did not finish")
        idx = np.flatnonzero(active)
        cur = S[idx]
        sup = cur.copy()                  # sup[M] = some monomial contains M
        for i in range(n):
            v = sup.reshape(len(idx), -1, 2, 1 << i)
            v[:, :, 0, :] |= v[:, :, 1, :]
        strict = np.zeros_like(cur)
        for i in range(n):
            s = strict.reshape(len(idx), -1, 2, 1 << i)
            s[:, :, 0, :] |= sup.reshape(len(idx), -1, 2, 1 << i)[:, :, 1, :]
        tops = cur & ~strict
        tops[:, 0] = False
        shrunk = tops & (rng.random(tops.shape) < prob)
        cur &= ~shrunk
        for k in range(n):
            lo, hi = 1 << k, 1 << (k + 1)
            cur[:, :lo] |= shrunk[:, lo:hi]
        S[idx] = cur
        counts[idx] += 1
        active[idx] = cur[:, 1:].any(axis=1)
        it += 1
    return counts

"""Function representations, constructors and the text format.

Boolean inputs are packed as integers: position ``i`` (1-based) is bit ``i-1``,
so position 1 is the least significant bit of a truth-table index.  Inputs over
larger alphabets are tuples of symbols ``0 .. alphabet-1``.

Truth tables are ``int8`` numpy arrays holding 0, 1 or ``-1`` (undefined).
"""
from __future__ import annotations

import itertools
import math
import re
from functools import cached_property

import numpy as np

DENSE_CAP = 1 << 20
UNDEF = -1


class FunctionError(ValueError):
    pass


class CapExceeded(FunctionError):
    pass


def popcount(x: int) -> int:
    return bin(x).count("1")


_POPCOUNT_CACHE: dict[int, np.ndarray] = {}


def popcounts(n: int) -> np.ndarray:
    """Hamming weights of ``0 .. 2**n - 1`` as an int64 array."""
    if n not in _POPCOUNT_CACHE:
        w = np.zeros(1, dtype=np.int64)
        for _ in range(n):
            w = np.concatenate([w, w + 1])
        _POPCOUNT_CACHE[n] = w
    return _POPCOUNT_CACHE[n]


def mask_of(positions) -> int:
    m = 0
    for p in positions:
        m |= 1 << (p - 1)
    return m


def positions_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def parse_bits(s: str) -> int:
    """``"1010"`` lists x1 x2 x3 x4 left to right; returns the packed mask."""
    s = s.strip()
    if not s or set(s) - {"0", "1"}:
        raise FunctionError(f"not a bit string: {s!r}")
    return sum(1 << i for i, ch in enumerate(s) if ch == "1")


def format_bits(x: int, n: int) -> str:
    return "".join("1" if (x >> i) & 1 else "0" for i in range(n))


def as_mask(x, n: int) -> int:
    """Normalise a Boolean input (int mask, bit string or 0/1 sequence)."""
    if isinstance(x, (int, np.integer)):
        x = int(x)
        if x < 0 or x >> n:
            raise FunctionError(f"input {x} does not fit in {n} bits")
        return x
    if isinstance(x, str):
        m = parse_bits(x)
        if len(x.strip()) != n:
            raise FunctionError(f"expected {n} bits, got {len(x.strip())}")
        return m
    bits = list(x)
    if len(bits) != n:
        raise FunctionError(f"expected {n} values, got {len(bits)}")
    m = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise FunctionError(f"symbol {b!r} outside the Boolean alphabet")
        m |= int(b) << i
    return m


def flip_block(x, block, n: int | None = None):
    """Return ``x`` with every position in ``block`` flipped.

    ``x`` may be a packed int or a 0/1 sequence; the result has the same form.
    """
    block = list(block)
    if isinstance(x, (int, np.integer)):
        if n is not None:
            for p in block:
                if not 1 <= p <= n:
                    raise FunctionError(f"position {p} out of range 1..{n}")
        elif any(p < 1 for p in block):
            raise FunctionError("positions are 1-based")
        return int(x) ^ mask_of(block)
    seq = list(x)
    for p in block:
        if not 1 <= p <= len(seq):
            raise FunctionError(f"position {p} out of range 1..{len(seq)}")
        if seq[p - 1] not in (0, 1):
            raise FunctionError("flip_block needs a Boolean input")
        seq[p - 1] ^= 1
    return type(x)(seq) if isinstance(x, tuple) else seq


# ---------------------------------------------------------------------------
# function kinds


class BooleanFunction:
    """Base class.  Subclasses set ``n``, ``alphabet`` and ``kind``."""

    n: int
    alphabet: int = 2
    kind: str = "abstract"

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Value at ``x``: 0, 1 or ``None`` when ``x`` is outside the domain."""
        raise NotImplementedError

    @property
    def is_boolean(self) -> bool:
        return self.alphabet == 2

    @property
    def is_total(self) -> bool:
        raise NotImplementedError

    def table(self, cap: int = DENSE_CAP) -> np.ndarray:
        if not self.is_boolean:
            raise FunctionError("dense tables exist only for Boolean functions")
        size = 1 << self.n
        if size > cap:
            raise CapExceeded(f"2^{self.n} entries exceeds the dense cap {cap}")
        return self._expand()

    def _expand(self) -> np.ndarray:
        out = np.empty(1 << self.n, dtype=np.int8)
        for x in range(1 << self.n):
            v = self.evaluate(x)
            out[x] = UNDEF if v is None else v
        return out

    def restrict(self, assignment: dict[int, int]) -> BooleanFunction:
        return restrict(self, assignment)

    def ctor(self) -> str | None:
        return None

    def __repr__(self):
        c = self.ctor()
        return f"<{type(self).__name__} {c or ''} n={self.n}>"


class TruthTable(BooleanFunction):
    kind = "dense-table"

    def __init__(self, n: int, values):
        values = np.asarray(values, dtype=np.int8)
        if values.ndim != 1 or values.size != 1 << n:
            raise FunctionError(f"table length {values.size} != 2^{n}")
        if np.any((values != 0) & (values != 1) & (values != UNDEF)):
            raise FunctionError("table entries must be 0, 1 or undefined")
        self.n = n
        self.values = values
        self.values.setflags(write=False)

    @classmethod
    def from_int(cls, n: int, bits: int) -> TruthTable:
        """Total function whose value at index j is bit j of ``bits``."""
        return cls(n, [(bits >> j) & 1 for j in range(1 << n)])

    def evaluate(self, x):
        v = int(self.values[as_mask(x, self.n)])
        return None if v == UNDEF else v

    @property
    def is_total(self):
        return not np.any(self.values == UNDEF)

    def _expand(self):
        return self.values

    def __eq__(self, other):
        return (isinstance(other, TruthTable) and other.n == self.n
                and np.array_equal(other.values, self.values))

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))


class SymmetricFunction(BooleanFunction):
    """Total function whose value depends only on the Hamming weight."""

    kind = "symmetric-profile"

    def __init__(self, profile, name: str | None = None):
        profile = tuple(int(v) for v in profile)
        if not profile or set(profile) - {0, 1}:
            raise FunctionError("profile must be a non-empty 0/1 sequence")
        self.profile = profile
        self.n = len(profile) - 1
        self.name = name

    def evaluate(self, x):
        return self.profile[popcount(as_mask(x, self.n))]

    @property
    def is_total(self):
        return True

    def _expand(self):
        return np.asarray(self.profile, dtype=np.int8)[popcounts(self.n)]

    def ctor(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, SymmetricFunction) and other.profile == self.profile

    def __hash__(self):
        return hash(self.profile)


class ComposedFunction(BooleanFunction):
    """``levels``-fold composition: level 1 is ``inner``, level t applies
    ``outer`` to k consecutive blocks each evaluated by level t-1."""

    kind = "composed"

    def __init__(self, outer: BooleanFunction, inner: BooleanFunction, levels: int,
                 name: str | None = None):
        self.outer = outer
        self.inner = inner
        self.levels = levels
        self.k = outer.n
        self.block = self.k ** (levels - 2) * inner.n  # size of each child block
        self.n = self.k * self.block
        self.name = name

    @cached_property
    def child(self) -> BooleanFunction:
        if self.levels == 2:
            return self.inner
        return ComposedFunction(self.outer, self.inner, self.levels - 1)

    def child_values(self, x) -> list[int]:
        x = as_mask(x, self.n)
        width = self.block
        low = (1 << width) - 1
        return [self.child.evaluate((x >> (j * width)) & low) for j in range(self.k)]

    def evaluate(self, x):
        z = 0
        for j, v in enumerate(self.child_values(x)):
            z |= v << j
        return self.outer.evaluate(z)

    @property
    def is_total(self):
        return True

    def _expand(self):
        child = self.child.table(cap=1 << self.n)
        idx = np.arange(1 << self.n, dtype=np.int64)
        z = np.zeros(1 << self.n, dtype=np.int64)
        low = (1 << self.block) - 1
        for j in range(self.k):
            z |= child[(idx >> (j * self.block)) & low].astype(np.int64) << j
        return self.outer.table()[z]

    def ctor(self):
        return self.name


class LatticeFunction(BooleanFunction):
    """1 iff some m-by-m square on the s-by-s torus has every perimeter cell 1.

    Cell (r, c), 0-based, is position ``r*s + c + 1``.
    """

    kind = "lattice"

    def __init__(self, s: int, m: int):
        if not s >= m >= 1:
            raise FunctionError("lattice needs s >= m >= 1")
        self.s, self.m = s, m
        self.n = s * s

    @cached_property
    def squares(self) -> tuple[int, ...]:
        """Perimeter masks of all s^2 wrapped squares, by top-left cell."""
        s, m = self.s, self.m
        out = []
        for r0 in range(s):
            for c0 in range(s):
                cells = set()
                for d in range(m):
                    for (r, c) in ((r0, c0 + d), (r0 + m - 1, c0 + d),
                                   (r0 + d, c0), (r0 + d, c0 + m - 1)):
                        cells.add((r % s) * s + (c % s))
                out.append(sum(1 << c for c in cells))
        return tuple(out)

    def evaluate(self, x):
        x = as_mask(x, self.n)
        return int(any(x & sq == sq for sq in self.squares))

    @property
    def is_total(self):
        return True

    def _expand(self):
        idx = np.arange(1 << self.n, dtype=np.int64)
        out = np.zeros(1 << self.n, dtype=np.int8)
        for sq in set(self.squares):
            out |= ((idx & sq) == sq).astype(np.int8)
        return out

    def ctor(self):
        return f"lattice({self.s},{self.m})"


class PromiseFunction(BooleanFunction):
    """Partial function given by a membership/value predicate.

    ``rule(y)`` returns 0, 1 or ``None`` for a tuple of symbols ``y``.
    ``enumerate_domain`` (optional) yields every point of the domain.
    """

    kind = "promise-enumerated"

    def __init__(self, n: int, alphabet: int, rule, enumerate_domain=None,
                 name: str | None = None, symmetric: bool = False):
        self.n = n
        self.alphabet = alphabet
        self._rule = rule
        self._enum = enumerate_domain
        self.name = name
        self.symmetric = symmetric

    def _point(self, x) -> tuple:
        if self.alphabet == 2 and isinstance(x, (int, np.integer, str)):
            m = as_mask(x, self.n)
            return tuple((m >> i) & 1 for i in range(self.n))
        y = tuple(int(v) for v in x)
        if len(y) != self.n:
            raise FunctionError(f"expected {self.n} symbols, got {len(y)}")
        if any(not 0 <= v < self.alphabet for v in y):
            raise FunctionError(f"symbol outside alphabet of size {self.alphabet}")
        return y

    def evaluate(self, x):
        return self._rule(self._point(x))

    @property
    def is_total(self):
        return False

    @cached_property
    def _domain(self) -> tuple:
        if self._enum is not None:
            return tuple(self._enum())
        if self.alphabet ** self.n > DENSE_CAP:
            raise CapExceeded("domain too large to enumerate")
        return tuple(y for y in itertools.product(range(self.alphabet), repeat=self.n)
                     if self._rule(y) is not None)

    def domain(self):
        """All domain points as symbol tuples."""
        return self._domain

    def _expand(self):
        if self.alphabet != 2:
            raise FunctionError("not Boolean")
        return BooleanFunction._expand(self)

    def ctor(self):
        return self.name


class RestrictedFunction(BooleanFunction):
    """A structured function with some positions fixed (lazy)."""

    kind = "restricted"

    def __init__(self, base: BooleanFunction, assignment: dict[int, int]):
        self.base = base
        self.assignment = dict(assignment)
        self.free = tuple(p for p in range(1, base.n + 1) if p not in self.assignment)
        self.n = len(self.free)
        self.alphabet = base.alphabet

    def _extend(self, x) -> tuple:
        if self.alphabet == 2 and isinstance(x, (int, np.integer, str)):
            m = as_mask(x, self.n)
            vals = [(m >> i) & 1 for i in range(self.n)]
        else:
            vals = list(x)
            if len(vals) != self.n:
                raise FunctionError(f"expected {self.n} symbols")
        full = [0] * self.base.n
        for p, v in self.assignment.items():
            full[p - 1] = v
        for p, v in zip(self.free, vals):
            full[p - 1] = v
        return tuple(full)

    def evaluate(self, x):
        full = self._extend(x)
        if self.alphabet == 2:
            return self.base.evaluate(as_mask(full, self.base.n))
        return self.base.evaluate(full)

    @property
    def is_total(self):
        return self.base.is_total

    def domain(self):
        out = []
        for y in self.base.domain():
            if all(y[p - 1] == v for p, v in self.assignment.items()):
                out.append(tuple(y[p - 1] for p in self.free))
        return out


def _check_assignment(f: BooleanFunction, assignment: dict[int, int]):
    for p, v in assignment.items():
        if not 1 <= p <= f.n:
            raise FunctionError(f"position {p} out of range 1..{f.n}")
        if not 0 <= v < f.alphabet:
            raise FunctionError(f"symbol {v} outside alphabet")


def restrict_table(values: np.ndarray, n: int, assignment: dict[int, int]) -> np.ndarray:
    """Restrict a dense table; free positions keep their relative order."""
    if not assignment:
        return values
    # axis k of the reshaped array is position n-k
    cube = values.reshape((2,) * n)
    index = tuple(assignment.get(n - k, slice(None)) for k in range(n))
    return np.ascontiguousarray(cube[index]).reshape(-1)


def restrict(f: BooleanFunction, assignment: dict[int, int]) -> BooleanFunction:
    """Fix the positions in ``assignment`` (position -> symbol)."""
    _check_assignment(f, assignment)
    if not assignment:
        return f
    if isinstance(f, SymmetricFunction):
        ones = sum(assignment.values())
        rest = f.n - len(assignment)
        return SymmetricFunction(f.profile[ones:ones + rest + 1])
    if f.is_boolean and (1 << f.n) <= DENSE_CAP:
        return TruthTable(f.n - len(assignment), restrict_table(f.table(), f.n, assignment))
    return RestrictedFunction(f, assignment)


# ---------------------------------------------------------------------------
# constructors


def make_weight_window(n: int, a: int, b: int) -> SymmetricFunction:
    if not 0 <= a <= b <= n:
        raise FunctionError("window needs 0 <= a <= b <= n")
    return SymmetricFunction([int(a <= w <= b) for w in range(n + 1)],
                             name=f"window({n},{a},{b})")


def make_threshold(n: int) -> SymmetricFunction:
    """1 iff the weight is at least ceil(sqrt(n))."""
    if n < 1:
        raise FunctionError("threshold needs n >= 1")
    t = math.isqrt(n - 1) + 1  # ceil(sqrt(n))
    return SymmetricFunction([int(w >= t) for w in range(n + 1)], name=f"threshold({n})")


def make_lattice(s: int, m: int) -> LatticeFunction:
    return LatticeFunction(s, m)


def make_or(n: int) -> SymmetricFunction:
    return SymmetricFunction([0] + [1] * n, name=f"or({n})")


def make_and(n: int) -> SymmetricFunction:
    return SymmetricFunction([0] * n + [1], name=f"and({n})")


def make_parity(n: int) -> SymmetricFunction:
    return SymmetricFunction([w % 2 for w in range(n + 1)], name=f"parity({n})")


def make_majority(n: int) -> SymmetricFunction:
    return SymmetricFunction([int(2 * w > n) for w in range(n + 1)], name=f"maj({n})")


def make_constant(n: int, value: int) -> SymmetricFunction:
    return SymmetricFunction([value] * (n + 1), name=f"const({n},{value})")


def compose(outer: BooleanFunction, inner: BooleanFunction, t: int,
            cap: int = DENSE_CAP) -> BooleanFunction:
    """t=1 gives ``inner``; t>1 gives the recursive k-ary composition.

    ``cap`` guards the size of the result only when a dense table is later
    requested; structured evaluation works at any size.
    """
    if t < 1:
        raise FunctionError("level count must be >= 1")
    if not (outer.is_boolean and outer.is_total and inner.is_boolean and inner.is_total):
        raise FunctionError("composition needs total Boolean functions")
    if t == 1:
        return inner
    name = None
    if inner.ctor() and outer == inner:
        name = f"compose({inner.ctor()},{t})"
    return ComposedFunction(outer, inner, t, name=name)


def make_collision(n: int) -> PromiseFunction:
    """Symbols 0..n^2-1; 0 on one-to-one inputs, 1 on two-to-one inputs."""
    if n < 2 or n % 2:
        raise FunctionError("collision needs an even n >= 2")

    def rule(y):
        counts = {}
        for v in y:
            counts[v] = counts.get(v, 0) + 1
        vals = set(counts.values())
        if vals == {1}:
            return 0
        if vals == {2}:
            return 1
        return None

    def enum():
        alpha = range(n * n)
        yield from itertools.permutations(alpha, n)
        for pair_vals in itertools.combinations(alpha, n // 2):
            base = [v for v in pair_vals for _ in range(2)]
            yield from sorted(set(itertools.permutations(base)))

    domain = enum if n <= 6 else None
    return PromiseFunction(n, n * n, rule, domain, name=f"collision({n})", symmetric=True)


# ---------------------------------------------------------------------------
# text format

_CTOR_RE = re.compile(r"^\s*([a-z]+)\s*\((.*)\)\s*$")


def _split_args(s: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def build_ctor(text: str) -> BooleanFunction:
    """Build a function from e.g. ``window(29,13,16)`` or ``compose(or(2),3)``."""
    m = _CTOR_RE.match(text)
    if not m:
        raise FunctionError(f"bad constructor: {text!r}")
    name, args = m.group(1), _split_args(m.group(2))
    if name == "compose":
        if len(args) != 2:
            raise FunctionError("compose(<ctor>, <levels>)")
        base = build_ctor(args[0])
        return compose(base, base, _int(args[1]))
    ints = [_int(a) for a in args]
    simple = {
        "window": (make_weight_window, 3), "threshold": (make_threshold, 1),
        "lattice": (make_lattice, 2), "or": (make_or, 1), "and": (make_and, 1),
        "parity": (make_parity, 1), "maj": (make_majority, 1),
        "collision": (make_collision, 1), "const": (make_constant, 2),
    }
    if name not in simple:
        raise FunctionError(f"unknown constructor {name!r}")
    fn, arity = simple[name]
    if len(ints) != arity:
        raise FunctionError(f"{name} takes {arity} argument(s)")
    return fn(*ints)


def _int(s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise FunctionError(f"expected an integer, got {s!r}") from None


MAX_TT_VARS = 20


def parse_function(text: str) -> BooleanFunction:
    """Parse the ``n=``/``alpha=``/``tt=``/``ctor=`` text format.

    Lines may also be separated by ``;``.
    """
    fields = {}
    for raw in re.split(r"[\n;]", text):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FunctionError(f"malformed line {line!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in ("n", "alpha", "tt", "ctor"):
            raise FunctionError(f"unknown field {key!r}")
        fields[key] = val
    if ("tt" in fields) == ("ctor" in fields):
        raise FunctionError("exactly one of tt= or ctor= is required")
    alpha = _int(fields.get("alpha", "2"))
    if "ctor" in fields:
        f = build_ctor(fields["ctor"])
        if "n" in fields and _int(fields["n"]) != f.n:
            raise FunctionError(f"n={fields['n']} disagrees with constructor (n={f.n})")
        if "alpha" in fields and alpha != f.alphabet:
            raise FunctionError("alpha disagrees with constructor")
        return f
    if "n" not in fields:
        raise FunctionError("tt= needs n=")
    n = _int(fields["n"])
    if alpha != 2:
        raise FunctionError("tt= tables are Boolean only")
    if not 0 <= n <= MAX_TT_VARS:
        raise FunctionError(f"n={n} outside supported range 0..{MAX_TT_VARS}")
    tt = fields["tt"]
    if len(tt) != 1 << n:
        raise FunctionError(f"tt has length {len(tt)}, expected {1 << n}")
    bad = set(tt) - set("01*")
    if bad:
        raise FunctionError(f"illegal character(s) {sorted(bad)} in tt")
    lookup = {"0": 0, "1": 1, "*": UNDEF}
    return TruthTable(n, np.fromiter((lookup[c] for c in tt), dtype=np.int8, count=len(tt)))


def serialize_function(f: BooleanFunction) -> str:
    if isinstance(f, TruthTable):
        chars = np.array(["0", "1", "*"])[np.where(f.values == UNDEF, 2, f.values)]
        return f"n={f.n}\ntt={''.join(chars)}\n"
    c = f.ctor()
    if c is None:
        if f.is_boolean and f.n <= MAX_TT_VARS:
            return serialize_function(TruthTable(f.n, f.table()))
        raise FunctionError(f"{f!r} has no text form")
    head = f"n={f.n}\n" + (f"alpha={f.alphabet}\n" if f.alphabet != 2 else "")
    return head + f"ctor={c}\n"

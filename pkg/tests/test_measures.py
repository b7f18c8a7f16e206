import itertools
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from certlab import measures
from certlab.funcore import (
    CapExceeded, SymmetricFunction, TruthTable, compose, make_and, make_constant, make_lattice, make_majority, make_or,
    make_parity, make_threshold, make_weight_window, mask_of,
)


# --- brute-force oracles -------------------------------------------------------

def oracle_cert(t, n, x):
    for k in range(n + 1):
        for S in itertools.combinations(range(n), k):
            m = sum(1 << i for i in S)
            if all(t[y] == t[x] for y in range(1 << n) if (y ^ x) & m == 0):
                return k


def oracle_bs(t, n, x):
    sens = [b for b in range(1, 1 << n) if t[x ^ b] != t[x]]

    def best(used, start):
        out = 0
        for j in range(start, len(sens)):
            if sens[j] & used == 0:
                out = max(out, 1 + best(used | sens[j], j + 1))
        return out
    return best(0, 0)


def oracle_dt(t, n):
    @lru_cache(None)
    def go(fixed_mask, fixed_val):
        pts = [y for y in range(1 << n) if y & fixed_mask == fixed_val]
        if len({t[y] for y in pts}) == 1:
            return 0
        return min(1 + max(go(fixed_mask | 1 << i, fixed_val), go(fixed_mask | 1 << i, fixed_val | 1 << i))
                   for i in range(n) if not fixed_mask >> i & 1)
    return go(0, 0)


tables = st.integers(1, 5).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n)))


@given(tables, st.data())
@settings(max_examples=120, deadline=None)
def test_certificate_and_bs_match_oracles(nt, data):
    n, vals = nt
    f = TruthTable(n, vals)
    x = data.draw(st.integers(0, (1 << n) - 1))
    c, cert = measures.certificate_complexity(f, x)
    assert c == oracle_cert(vals, n, x)
    assert len(cert.positions) == c and measures.is_certificate(f, x, cert.positions)
    b, blocks = measures.block_sensitivity(f, x)
    assert b == oracle_bs(vals, n, x) == len(blocks.blocks)
    masks = [mask_of(bl) for bl in blocks.blocks]
    assert all(a & m == 0 for a, m in itertools.combinations(masks, 2))
    assert all(measures.is_sensitive(f, x, m) for m in masks)
    assert b <= c


@given(tables)
@settings(max_examples=60, deadline=None)
def test_decision_tree_matches_oracle(nt):
    n, vals = nt
    assert measures.decision_tree_complexity(TruthTable(n, vals)) == oracle_dt(vals, n)


def test_or4_examples():
    f = make_or(4)
    assert measures.certificate_complexity(f, 0)[0] == 4
    assert measures.minimal_blocks(f, 0) == [(1,), (2,), (3,), (4,)]
    assert measures.block_sensitivity(f, 0)[0] == 4
    assert measures.neighborhood(f, 0) == [0, 1, 2, 4, 8]
    assert measures.decision_tree_complexity(f) == 4


def test_and2_blocks_and_constants():
    assert measures.minimal_blocks(make_and(2), 0b11) == [(1,), (2,)]
    assert measures.neighborhood(make_constant(3, 1), 5) == [5]
    assert measures.decision_tree_complexity(make_constant(3, 0)) == 0
    assert measures.decision_tree_complexity(make_parity(3)) == 3
    assert measures.decision_tree_complexity(make_majority(5)) == 5


def test_g1_values():
    g = make_weight_window(29, 13, 16)
    assert measures.certificate_complexity_max(g) == (17, 26, 26)
    assert measures.block_sensitivity_max(g) == (17, 17, 17)
    w17 = (1 << 17) - 1
    assert measures.symmetric_measures(g, 17) == (17, 17)
    assert measures.symmetric_measures(g, 14)[0] == 26
    assert measures.minimal_blocks(g, w17) == [(i,) for i in range(1, 18)]


def test_threshold16():
    t = make_threshold(16)
    assert measures.certificate_complexity(t, 0)[0] == 13
    assert measures.symmetric_measures(t, 0) == (13, 4)
    nb = measures.neighborhood(t, 0)
    assert len(nb) == 1 + 1820 and all(bin(y).count("1") in (0, 4) for y in nb)


def test_symmetric_path_matches_generic():
    rng = np.random.default_rng(1)
    for _ in range(40):
        n = int(rng.integers(1, 9))
        prof = rng.integers(0, 2, n + 1)
        f = SymmetricFunction([int(v) for v in prof])
        dense = TruthTable(n, f.table())
        for w in range(n + 1):
            x = (1 << w) - 1
            assert measures.symmetric_measures(f, w) == (
                measures.certificate_complexity(dense, x)[0], measures.block_sensitivity(dense, x)[0])


def test_lattice_bs():
    b, blocks = measures.block_sensitivity(make_lattice(8, 2), 0)
    assert b == 16


def test_composed_window_matches_recurrence_and_dense_points():
    base = make_weight_window(5, 2, 3)
    f = compose(base, base, 2)
    lv = measures.compose_level(base, measures.LevelValues(*measures.certificate_complexity_max(base)[:2],
                                                           *measures.block_sensitivity_max(base)[:2]))
    assert measures.certificate_complexity_max(f)[:2] == (lv.c0, lv.c1)
    assert measures.block_sensitivity_max(f)[:2] == (lv.bs0, lv.bs1)
    rng = np.random.default_rng(5)
    for x in rng.integers(0, 1 << 25, 5):
        c, cert = measures.certificate_complexity(f, int(x))
        assert measures.is_certificate(f, int(x), cert.positions)
        # the witness is a minimum certificate, so no position can be dropped
        for p in cert.positions:
            assert not measures.is_certificate(f, int(x), [q for q in cert.positions if q != p])


def test_caps():
    with pytest.raises(CapExceeded):
        measures.decision_tree_complexity(make_weight_window(29, 13, 16))

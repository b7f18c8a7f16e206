import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from certlab.funcore import (
    CapExceeded, FunctionError, SymmetricFunction, TruthTable, build_ctor, compose, flip_block,
    make_and, make_collision, make_lattice, make_or, make_threshold, make_weight_window,
    parse_function, popcount, restrict, serialize_function,
)


def test_or4_at_zero():
    assert make_or(4)(0) == 0


def test_window_value_by_weight():
    g = make_weight_window(29, 13, 16)
    for w in range(30):
        assert g((1 << w) - 1) == int(13 <= w <= 16)
    assert g(0b10101010101010101010101010101) == 1      # weight 15


def test_threshold_profile():
    t = make_threshold(16)
    assert t.profile[3] == 0 and t.profile[4] == 1


def test_lattice_displayed_input_and_all_ones():
    bits = "00000" "00000" "10011" "10010" "10011"
    x = sum(int(c) << i for i, c in enumerate(bits))
    assert make_lattice(5, 3)(x) == 1
    assert make_lattice(5, 3)((1 << 25) - 1) == 1
    assert make_lattice(5, 3)(0) == 0


def test_flip_block():
    assert flip_block(0b0000, {1, 3}, 4) == 0b0101
    assert flip_block(0b1011, set(), 4) == 0b1011
    assert flip_block(0b111, {1, 2, 3}, 3) == 0


def test_restrict_or2():
    f = make_or(2)
    one = restrict(f, {1: 1})
    assert one.n == 1 and [one(y) for y in (0, 1)] == [1, 1]
    ident = restrict(f, {1: 0})
    assert [ident(y) for y in (0, 1)] == [0, 1]


def test_restrict_window_profile():
    r = restrict(make_weight_window(5, 2, 3), {1: 1})
    assert r.n == 4
    for y in range(16):
        assert r(y) == int(2 <= popcount(y) + 1 <= 3)


def test_compose_identity_and_dense():
    g = make_weight_window(29, 13, 16)
    once = compose(g, g, 1)
    assert once.n == 29 and all(once((1 << w) - 1) == g((1 << w) - 1) for w in range(30))
    f = compose(make_or(2), make_and(2), 2)
    for x in range(16):
        bit = [(x >> i) & 1 for i in range(4)]
        assert f(x) == int((bit[0] and bit[1]) or (bit[2] and bit[3]))


def test_compose_window_matches_child_evaluation():
    base = make_weight_window(5, 2, 3)
    f = compose(base, base, 2)
    rng = np.random.default_rng(0)
    for x in rng.integers(0, 1 << 25, 200):
        x = int(x)
        kids = [base((x >> (5 * j)) & 31) for j in range(5)]
        assert f(x) == base(sum(b << j for j, b in enumerate(kids)))


def test_collision_values():
    c = make_collision(4)
    assert c((1, 2, 3, 4)) == 0
    assert c((5, 5, 9, 9)) == 1
    assert c((1, 1, 1, 2)) is None


def test_parse_examples():
    f = parse_function("n=2\ntt=0111")
    assert [f(x) for x in range(4)] == [0, 1, 1, 1]
    p = parse_function("n=1\ntt=0*")
    assert p(0) == 0 and p(1) is None and not p.is_total
    with pytest.raises(FunctionError):
        parse_function("n=2\ntt=011")
    with pytest.raises(FunctionError):
        parse_function("ctor=nosuch(3)")
    assert parse_function("ctor=compose(window(29,13,16),2)").n == 29 * 29


def test_serialize_roundtrip():
    for text in ("n=3\ntt=01101001\n", "n=29\nctor=window(29,13,16)\n", "n=4\nalpha=16\nctor=collision(4)\n"):
        assert serialize_function(parse_function(text)) == text


def test_dense_cap():
    with pytest.raises(CapExceeded):
        make_weight_window(29, 13, 16).table()


@given(st.integers(1, 8), st.data())
@settings(max_examples=40, deadline=None)
def test_symmetric_depends_on_weight_only(n, data):
    prof = data.draw(st.lists(st.integers(0, 1), min_size=n + 1, max_size=n + 1))
    f = SymmetricFunction(prof)
    x = data.draw(st.integers(0, (1 << n) - 1))
    perm = data.draw(st.permutations(range(n)))
    y = sum(((x >> i) & 1) << perm[i] for i in range(n))
    assert f(x) == f(y) == prof[popcount(x)]


@given(st.integers(0, 255))
def test_truth_table_roundtrip(bits):
    f = TruthTable.from_int(3, bits)
    assert parse_function(serialize_function(f)) == f

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from certlab import fraccert, lp, measures
from certlab.funcore import (
    SymmetricFunction, TruthTable, make_collision, make_constant, make_lattice, make_or,
    make_threshold, make_weight_window,
)


def float_fc(n, rows):
    if not rows:
        return 0.0
    A = [[-((r >> i) & 1) for i in range(n)] for r in rows]
    res = linprog(np.ones(n), A_ub=A, b_ub=-np.ones(len(rows)), bounds=[(0, None)] * n)
    return res.fun


tables = st.integers(1, 5).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n)))


@given(tables, st.data())
@settings(max_examples=80, deadline=None)
def test_fc_matches_float_lp_and_sandwich(nt, data):
    n, vals = nt
    f = TruthTable(n, vals)
    x = data.draw(st.integers(0, (1 << n) - 1))
    lpi = fraccert.build_cert_lp(f, x)
    primal, dual = fraccert.solve_primal(lpi), fraccert.solve_dual(lpi)
    assert primal.value == dual.value
    assert abs(float(primal.value) - float_fc(n, lpi.rows)) < 1e-7
    assert measures.block_sensitivity(f, x)[0] <= primal.value <= measures.certificate_complexity(f, x)[0]


def test_or4_lp():
    lpi = fraccert.build_cert_lp(make_or(4), 0)
    assert lpi.row_sets() == [(1,), (2,), (3,), (4,)]
    sol = fraccert.solve_primal(lpi)
    assert sol.value == 4 and sol.lam == (1, 1, 1, 1)
    assert fraccert.solve_dual(lpi).mu == (1, 1, 1, 1)


def test_constant_lp_is_empty():
    lpi = fraccert.build_cert_lp(make_constant(3, 1), 0)
    assert lpi.row_count == 0 and fraccert.solve_primal(lpi).value == 0
    assert fraccert.fc_symmetric(make_constant(3, 1), 2) == 0


def test_threshold16_lp():
    lpi = fraccert.build_cert_lp(make_threshold(16), 0)
    assert lpi.row_count == 1820 and all(bin(r).count("1") == 4 for r in lpi.rows)
    assert fraccert.fc_symmetric(make_threshold(16), 0) == 4


def test_g1_weight17():
    g = make_weight_window(29, 13, 16)
    assert fraccert.fractional_certificate(g, (1 << 17) - 1) == 17
    assert fraccert.fc_symmetric(g, 17) == 17


def test_fc_symmetric_matches_generic():
    rng = np.random.default_rng(4)
    for _ in range(60):
        n = int(rng.integers(1, 8))
        f = SymmetricFunction([int(v) for v in rng.integers(0, 2, n + 1)])
        dense = TruthTable(n, f.table())
        for w in range(n + 1):
            lpi = fraccert.build_cert_lp(dense, (1 << w) - 1)
            assert fraccert.fc_symmetric(f, w) == fraccert.solve_primal(lpi).value


def test_qc_estimate():
    assert fraccert.qc_estimate(16) == 4
    assert fraccert.qc_estimate(0) == 0
    assert fraccert.qc_estimate(Fraction(9, 4)) == 1.5


def test_promise_bounds():
    col = make_collision(4)
    up, _ = fraccert.fc_bounds_promise(col, (1, 2, 3, 4), lam=[Fraction(1, 2)] * 4)
    assert up == 2
    with pytest.raises(fraccert.CandidateInfeasible):
        fraccert.fc_bounds_promise(col, (1, 2, 3, 4), lam=[Fraction(1, 4)] * 4)
    lat = make_lattice(8, 2)
    mu = {sq: Fraction(1, 4) for sq in lat.squares}     # uniform over single-square inputs
    _, low = fraccert.fc_bounds_promise(lat, 0, mu=mu)
    assert low == 16
    with pytest.raises(fraccert.CandidateInfeasible):
        fraccert.fc_bounds_promise(lat, 0, mu={sq: Fraction(1, 2) for sq in lat.squares})


def test_simplex_small_and_errors():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    res = lp.maximize([[1, 2], [3, 1]], [4, 6], [1, 1])
    assert res.value == Fraction(14, 5)
    with pytest.raises(lp.Unbounded):
        lp.maximize([[1, -1]], [1], [1, 1])


@given(st.integers(1, 4), st.integers(1, 5), st.data())
@settings(max_examples=60, deadline=None)
def test_simplex_matches_scipy(m, k, data):
    A = [[data.draw(st.integers(0, 4)) for _ in range(k)] for _ in range(m)]
    b = [data.draw(st.integers(1, 6)) for _ in range(m)]
    c = [data.draw(st.integers(0, 5)) for _ in range(k)]
    ref = linprog(-np.array(c), A_ub=A, b_ub=b, bounds=[(0, None)] * k)
    if ref.status == 3:
        with pytest.raises(lp.Unbounded):
            lp.maximize(A, b, c)
        return
    res = lp.maximize(A, b, c)
    assert abs(float(res.value) + ref.fun) < 1e-7
    # covering form through the dual-simplex start: min b.y s.t. A^T y >= c
    At = [[-A[i][j] for i in range(m)] for j in range(k)]
    dual = lp.maximize_dual_start(At, [-v for v in c], [-v for v in b])
    assert -dual.value == res.value

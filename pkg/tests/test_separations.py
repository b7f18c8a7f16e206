import math
from fractions import Fraction

import numpy as np
import pytest

from certlab import measures, separations
from certlab.funcore import TruthTable, compose, make_constant, make_weight_window


def test_g1_growth_matches_closed_form():
    g = separations.growth_constant(separations.G1_SPEC)
    assert g.converged and abs(g.ratio - separations.closed_form_g1()) < 1e-6
    e = separations.separation_exponents(separations.G1_SPEC)
    assert e.rc_vs_c == pytest.approx(0.907, abs=1e-3)
    assert e.c_vs_qc == pytest.approx(2.205, abs=2e-3)


def test_recurrence_matches_composed_measures():
    spec = separations.RecurrenceSpec.from_window(make_weight_window(5, 2, 3))
    seq = spec.sequence(3)
    for t, (c0, c1) in enumerate(seq, start=1):
        f = make_weight_window(5, 2, 3) if t == 1 else compose(make_weight_window(5, 2, 3),
                                                                make_weight_window(5, 2, 3), t)
        assert measures.certificate_complexity_max(f)[:2] == (c0, c1)


def test_h1_candidate():
    h = separations.h1()
    assert separations.uniform_measure_check(h)
    spec = separations.h_spec(h)
    assert spec.fc == Fraction(9, 2)
    e = separations.separation_exponents(spec)
    assert e.rc_vs_c == pytest.approx(math.log(4) / math.log(5))
    assert e.rc_vs_fc == pytest.approx(0.922, abs=1e-3)


def test_uniform_check_failures():
    res = separations.uniform_measure_check(make_constant(6, 0))
    assert not res and res.c == 0
    vals = np.zeros(64, dtype=np.int8)
    vals[63] = 1                                    # AND6: C^{1^6} = 6
    res = separations.uniform_measure_check(TruthTable(6, vals))
    assert not res and res.witness is not None


def test_uniform_search_is_seeded():
    a = separations.uniform_measure_search(30, seed=3)
    b = separations.uniform_measure_search(30, seed=3)
    assert (a is None) == (b is None)


def test_window_search_small():
    tiny, _ = separations.window_search(2)
    assert all(r.exponent == pytest.approx(1.0) for r in tiny)     # only 2-bit parity, no gap
    main, other = separations.window_search(5)
    # brute-force oracle over every window with n <= 5
    rows = []
    for n in range(1, 6):
        for a in range(n + 1):
            for b in range(a, n + 1):
                if a == 0 and b == n:
                    continue
                f = make_weight_window(n, a, b)
                c0, c1, _ = measures.certificate_complexity_max(f)
                b0, b1, _ = measures.block_sensitivity_max(f)
                if b0 == b1 >= 2:
                    rows.append((n, a, b, c0, c1))
    assert sorted((r.n, r.a, r.b, r.c0, r.c1) for r in main) == sorted(rows)
    assert main == sorted(main, key=lambda r: (round(r.exponent, 12), r.n, r.a, r.b))
    assert all(r.exponent >= r.bs_exponent - 1e-12 for r in main)
    assert separations.window_search(5) == (main, other)


def test_window_search_top_row():
    main, other = separations.window_search(32)
    top = main[0]
    assert (top.n, top.a, top.b) == (29, 13, 16) and top.tight
    assert top.exponent == pytest.approx(0.907, abs=1e-3)
    assert all(not r.proven for r in other)

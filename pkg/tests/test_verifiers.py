import math
from fractions import Fraction

import numpy as np
import pytest

from certlab import fraccert, polyalg, verifiers
from certlab.funcore import (
    SymmetricFunction, TruthTable, make_and, make_constant, make_or, make_threshold,
    make_weight_window,
)
from certlab.verifiers import AdaptiveVerifier, VerifierSpec


def test_nonadaptive_extremes():
    rng = np.random.default_rng(0)
    v = VerifierSpec(0b0101, [1, 1, 1, 1])
    assert all(verifiers.run_nonadaptive(v, 0b0100, rng=rng)[0] for _ in range(50))
    z = VerifierSpec(0b0101, [0, 0, 0, 0])
    assert not any(verifiers.run_nonadaptive(z, 0b1010, rng=rng)[0] for _ in range(50))
    with pytest.raises(ValueError):
        VerifierSpec(0, [2, 0])


def test_threshold_rejection_rate():
    f = make_threshold(16)
    lam = fraccert.solve_primal(fraccert.build_cert_lp(f, 0)).lam
    v = VerifierSpec(0, [min(1, 2 * l) for l in lam])
    trials = 100_000
    rate = verifiers.rejection_rate(v, 0b1111, trials, seed=1)
    sigma = math.sqrt(rate * (1 - rate) / trials)
    assert rate >= 1 - math.exp(-2) - 3 * sigma
    assert rate == pytest.approx(1 - 0.5 ** 4, abs=5 * sigma + 1e-3)


def test_adaptive_conversion_examples():
    once = AdaptiveVerifier(0, 4, [(1, (1,))])
    v = verifiers.adaptive_to_nonadaptive(once)
    # T = 2; position 1 is hit with probability 1/2 per repetition, 8 repetitions
    assert v.lam[0] == 1 - Fraction(1, 2) ** 8 and v.lam[1:] == [0, 0, 0]
    assert v.expected_queries <= 4 * 2
    two = AdaptiveVerifier(0, 4, [(Fraction(1, 2), (1,)), (Fraction(1, 2), (2,))])
    w = verifiers.adaptive_to_nonadaptive(two)
    assert w.lam[0] == w.lam[1] and 0 < w.lam[0] < 1 and w.lam[2] == 0
    assert w.expected_queries <= 8


def test_adaptive_conversion_sampled_agrees_with_exact():
    V = AdaptiveVerifier(0, 5, [(Fraction(1, 3), (1, 2, 3)), (Fraction(2, 3), (4, 1))])
    exact = verifiers.adaptive_to_nonadaptive(V)
    sampled = verifiers.adaptive_to_nonadaptive(V, samples=4000, seed=3)
    T = math.ceil(2 * V.expected_queries)
    assert exact.expected_queries <= 4 * T
    for a, b in zip(exact.lam, sampled.lam):
        assert abs(float(a) - b) < 0.04


def test_one_sided_transform():
    rng = np.random.default_rng(4)
    x, n = 0b1100, 4
    exact = verifiers.SyntheticVerifier(x, n, 0.9, 0.0)
    vstar = verifiers.one_sided_transform(exact, x)
    assert not any(vstar(x, rng)[0] for _ in range(2000))
    V = verifiers.SyntheticVerifier(x, n, 0.85, 0.1)
    eps0, eps1 = verifiers.error_rates(V, x, [x ^ 1, x ^ 6], 20_000, seed=5)
    vstar = verifiers.one_sided_transform(V, x)
    assert not any(vstar(x, rng)[0] for _ in range(5000))
    bound = verifiers.one_sided_bound(eps0, eps1)
    trials = 20_000
    rate = sum(vstar(x ^ 1, rng)[0] for _ in range(trials)) / trials
    assert rate >= bound.value - 3 * math.sqrt(rate * (1 - rate) / trials)
    assert verifiers.one_sided_bound(0.1, 0.1).value == pytest.approx(0.7)
    assert verifiers.one_sided_bound(0.0, 1.0).vacuous


def test_child_sampler_and_minimax():
    g = make_weight_window(29, 13, 16)
    r = verifiers.child_hit_minimax(g, verifiers.G1_CHILD_TABLE)
    assert r.value == Fraction(1, 17) and r.optimal_value == Fraction(1, 17)
    rng = np.random.default_rng(0)
    x = (1 << 14) - 1
    for _ in range(20):
        leaf = verifiers.recursive_child_sampler(g, verifiers.G1_CHILD_TABLE, x, rng=rng)
        assert 1 <= leaf <= 29
    # K = 0 with p_0 = 0 always picks a claimed-0 child
    assert all(verifiers.recursive_child_sampler(g, verifiers.G1_CHILD_TABLE, 0, rng=rng) >= 1
               for _ in range(10))
    w = verifiers.child_hit_minimax(make_weight_window(5, 2, 3))
    assert w.value == w.optimal_value
    assert 0 < w.optimal_value <= Fraction(1, 3)
    assert verifiers.child_hit_minimax(make_constant(5, 1)).vacuous


def test_minimax_is_exact_against_grid():
    base = make_weight_window(5, 2, 3)
    r = verifiers.child_hit_minimax(base)
    k = base.n
    for K in range(k + 1):
        pairs = verifiers._profiles(base, K)
        if not pairs:
            continue
        best = max(min(verifiers._hit(Fraction(i, 200), K, k, a, b) for a, b in pairs)
                   for i in range(201))
        assert best <= verifiers._best_p(K, k, pairs)[1]


def test_zero_error_examples():
    r = verifiers.zero_error_eval(make_or(4), 0, seed=0)
    assert r.value == 0 and r.queries == 4
    assert verifiers.zero_error_eval(make_and(4), 0b1111, seed=0).value == 1


def test_zero_error_window_and_transcript():
    f = make_weight_window(5, 2, 3)
    rng = np.random.default_rng(7)
    q = []
    for y in rng.integers(0, 32, 10_000):
        r = verifiers.zero_error_eval(f, int(y), rng=rng)
        assert r.value == f(int(y))
        q.append(r.queries)
    fc = fraccert.fc_max(f)[2]
    nd = polyalg.ndeg(f).degree
    assert np.mean(q) <= 10 * fc * nd * (1 + math.log2(5))
    tr = verifiers.zero_error_eval(f, 0b10110, seed=1, transcript=True).transcript
    assert tr and all(len(line.split("\t")) == 3 for line in tr)
    assert tr == verifiers.zero_error_eval(f, 0b10110, seed=1, transcript=True).transcript

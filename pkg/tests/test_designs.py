import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from certlab import designs, fraccert
from certlab.designs import SetDesign
from certlab.funcore import make_collision

HAND = SetDesign(8, 2, 4, [(1, 2, 3, 4), (5, 6, 7, 8), (1, 2, 5, 6), (3, 4, 7, 8)], 2)


def test_hand_design_and_failure_witness():
    assert designs.verify_design(HAND).ok
    dup = SetDesign(8, 2, 4, [(1, 2, 3, 4), (1, 2, 3, 4)], 2)
    check = designs.verify_design(dup)
    assert not check.ok and check.witness == (0, 1)


@pytest.mark.parametrize("seed", range(4))
def test_build_design(seed):
    d = designs.build_design(12, 3, 16, seed=seed)
    assert d.m == 16 and d.bound == 4 and designs.verify_design(d).ok
    one = designs.build_design(12, 3, 1, seed=seed)
    assert one.m == 1 and len(one.sets[0]) == 12


def test_file_roundtrip(tmp_path):
    d = designs.build_design(6, 2, 5, seed=1)
    path = tmp_path / "d.txt"
    designs.write_design(d, path)
    text = path.read_text()
    assert text.splitlines()[0] == f"{d.u} 2 6 5" and "inclusive" in text
    back = designs.read_design(path)
    assert back.sets == d.sets and back.bound == d.bound
    with pytest.raises(designs.DesignError):
        designs.parse_design("8 2 4 2\n1 2 3 4\n")


def test_symmetric_partial_function():
    d = SetDesign(8, 2, 4, [(1, 2, 3, 4), (5, 6, 7, 8)], 2)
    f = designs.design_to_symmetric_partial(d, labels=[0, 1])
    dom = list(f.domain())
    assert len(dom) == 2 * math.factorial(4)
    for y in dom[:10]:
        for perm in itertools.permutations(range(4)):
            z = tuple(y[p] for p in perm)
            assert f(z) == f(y)
    assert f((0, 1, 2, 4)) is None


def test_design_fc_and_distance():
    d = designs.build_design(12, 3, 16, seed=2)
    f = designs.design_to_symmetric_partial(d, seed=2)
    assert designs.min_pairwise_disagreement(f) >= 8
    for j in range(d.m):
        x, lam, rows = designs.design_fc_certificate(f, j)
        up, _ = fraccert.fc_bounds_promise(f, x, lam=lam, rows=rows)
        assert up <= Fraction(3, 2)


def test_collision_distance():
    assert designs.min_pairwise_disagreement(make_collision(4)) == 2


def test_single_class_is_an_error():
    d = SetDesign(8, 2, 4, [(1, 2, 3, 4)], 2)
    with pytest.raises(designs.DesignError):
        designs.min_pairwise_disagreement(designs.design_to_symmetric_partial(d, labels=[1]))

import itertools

import pytest

from conftest import random_subset, small_groups
from sigmakneser.errors import EmptySetError, EnumerationCapExceeded, GroupMismatchError
from sigmakneser.group import GroupSet, make_group
from sigmakneser.kneser import factor_shapes, kneser_check, kneser_exhaustive
from sigmakneser.sumset import saturate, stabilizer_naive, sumset


def S(g, r):
    return GroupSet.from_ranks(g, r)


def test_certificate_examples():
    z8 = make_group([8])
    c = kneser_check(S(z8, [0, 4]), S(z8, [0, 4]))
    assert (c.size_sum, c.size_h, c.a, c.b, c.c) == (2, 2, 1, 1, 1) and c.equality_c and c.ok
    z13 = make_group([13])
    c = kneser_check(S(z13, [0, 1]), S(z13, [0, 1, 2]))
    # |A+B| = |A|+|B|-1: small doubling, but not the strict form, and H = {0}
    assert c.size_sum == 4 and c.size_h == 1 and c.inequality_ok
    assert c.small_doubling and not c.strict_small_doubling and c.equality_c
    full = GroupSet.full(z8)
    c = kneser_check(full, full)
    assert c.size_h == 8 and (c.a, c.b, c.c) == (1, 1, 1) and c.inequality_ok


def test_certificate_errors():
    z8 = make_group([8])
    with pytest.raises(EmptySetError):
        kneser_check(GroupSet.empty(z8), S(z8, [0]))
    with pytest.raises(GroupMismatchError):
        kneser_check(S(z8, [0]), S(make_group([2, 4]), [0]))


def _naive_summary(g):
    """Plain loops over every pair, recomputing everything from scratch."""
    n = g.order
    subsets = [S(g, [r for r in range(n) if (m >> r) & 1]) for m in range(1, 1 << n)]
    out = dict(pairs=0, violations=0, small=0, strict=0, small_trivial=0, eq_fail=0)
    for a, b in itertools.product(subsets, repeat=2):
        s = sumset(a, b)
        h = stabilizer_naive(s)
        rhs = len(saturate(a, h)) + len(saturate(b, h)) - h.order
        out["pairs"] += 1
        out["violations"] += len(s) < rhs
        if len(s) < len(a) + len(b):
            out["small"] += 1
            out["small_trivial"] += h.order == 1
            out["eq_fail"] += len(s) != rhs
        out["strict"] += len(s) < len(a) + len(b) - 1
    return out


@pytest.mark.parametrize("factors", [(2,), (3,), (4,), (2, 2), (5,), (6,), (7,)])
def test_exhaustive_matches_naive(factors):
    g = make_group(factors)
    fast = kneser_exhaustive(g)
    ref = _naive_summary(g)
    assert fast.pairs == ref["pairs"] == (2**g.order - 1) ** 2
    assert fast.violations == ref["violations"] == 0
    assert fast.small_doubling == ref["small"]
    assert fast.strict_small_doubling == ref["strict"]
    assert fast.small_doubling_trivial_h == ref["small_trivial"]
    assert fast.equality_c_failures == ref["eq_fail"] == 0


def test_exhaustive_caps_and_shapes():
    with pytest.raises(EnumerationCapExceeded):
        kneser_exhaustive(make_group([13]))
    shapes = list(factor_shapes(12))
    assert len(shapes) == len(set(shapes)) == 27
    assert kneser_exhaustive(make_group([2, 2])).ok


@pytest.mark.parametrize("g", small_groups(), ids=str)
def test_kneser_properties_random(g, rng):
    for _ in range(40):
        a, b = random_subset(g, rng, rng.random()), random_subset(g, rng, rng.random())
        c = kneser_check(a, b)
        assert c.inequality_ok
        if c.small_doubling:
            assert c.equality_c
        if c.strict_small_doubling:
            assert c.nontrivial
        if c.size_h == 1:
            assert c.size_sum >= c.size_a + c.size_b - 1


def test_small_doubling_with_trivial_stabilizer_exists():
    # a singleton summand gives |A+B| = |B| < |A|+|B| with nothing periodic
    z7 = make_group([7])
    c = kneser_check(S(z7, [0]), S(z7, [1, 2]))
    assert c.small_doubling and not c.nontrivial and c.equality_c

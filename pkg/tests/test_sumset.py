import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_subset, small_groups
from sigmakneser.errors import GroupMismatchError
from sigmakneser.group import GroupSet, make_group
from sigmakneser.lattice import enumerate_subgroups, generate_subgroup
from sigmakneser.ntt import cyclic_convolve
from sigmakneser.sumset import (
    cosets_met,
    project_to_quotient,
    quotient,
    saturate,
    stabilizer,
    stabilizer_naive,
    sumset,
    sumset_fast,
)


def S(g, ranks):
    return GroupSet.from_ranks(g, ranks)


def test_sumset_examples():
    z5 = make_group([5])
    assert sumset(S(z5, [0, 1]), S(z5, [0, 1])) == S(z5, [0, 1, 2])
    b = S(z5, [1, 3])
    assert sumset(S(z5, [0]), b) == b
    assert sumset(GroupSet.empty(z5), b) == GroupSet.empty(z5)
    assert sumset_fast(GroupSet.full(z5), b) == GroupSet.full(z5)
    assert sumset_fast(b, S(z5, [0])) == b
    with pytest.raises(GroupMismatchError):
        sumset(b, S(make_group([6]), [0]))


@pytest.mark.parametrize("shape", [(7,), (6, 10), (3, 9, 27), (2,) * 10, (65536,), (4, 4, 4, 4)])
def test_ntt_matches_float_fft(shape, rng):
    n = int(np.prod(shape))
    a = (rng.random(n) < 0.3).astype(np.int64)
    b = (rng.random(n) < 0.3).astype(np.int64)
    got = cyclic_convolve(a, b, shape, bound=n)
    fa, fb = np.fft.fftn(a.reshape(shape)), np.fft.fftn(b.reshape(shape))
    ref = np.rint(np.fft.ifftn(fa * fb).real).astype(np.int64)
    assert np.array_equal(got, ref)


def test_sumset_fast_oracle_large_sets(rng):
    # dense operands force the transform path
    g = make_group([2, 64, 128])
    for _ in range(3):
        a, b = random_subset(g, rng, 0.2), random_subset(g, rng, 0.01)
        assert sumset_fast(a, b) == sumset(a, b)


def test_stabilizer_examples():
    z8 = make_group([8])
    assert stabilizer(S(z8, [0, 4])).elements == S(z8, [0, 4])
    assert stabilizer(GroupSet.full(z8)).order == 8
    g = make_group([2, 4])
    for h in enumerate_subgroups(g):
        for x in g:
            coset = h.elements.translate(x)
            assert stabilizer(coset) == h


@pytest.mark.parametrize("g", small_groups(), ids=str)
def test_stabilizer_matches_naive(g, rng):
    for _ in range(20):
        x = random_subset(g, rng, rng.random())
        assert stabilizer(x) == stabilizer_naive(x)


@pytest.mark.parametrize("factors", [(2, 2), (6,), (2, 4), (3, 3), (10,)])
def test_stabilizer_is_maximal_saturating_subgroup(factors):
    g = make_group(factors)
    subs = enumerate_subgroups(g)
    for mask in range(1, 1 << g.order):
        x = GroupSet(g, [(mask >> r) & 1 for r in range(g.order)])
        st_ = stabilizer(x)
        for h in subs:
            assert (saturate(x, h) == x) == h.issubset(st_)


@pytest.mark.parametrize("factors", [(24,), (2, 12), (2, 2, 6)])
def test_stabilizer_maximal_random_order24(factors, rng):
    g = make_group(factors)
    subs = enumerate_subgroups(g)
    for _ in range(40):
        x = random_subset(g, rng, rng.random())
        st_ = stabilizer(x)
        assert st_ in subs
        for h in subs:
            assert (saturate(x, h) == x) == h.issubset(st_)


def test_cosets_and_quotient_examples():
    z8 = make_group([8])
    h = generate_subgroup(z8, [(4,)])
    x = S(z8, [0, 1, 4, 5])
    cd = cosets_met(x, h)
    assert cd.count == 2 and cd.representatives == ((0,), (1,))
    proj, q = project_to_quotient(x, h)
    assert q.group.order == 4 and proj == S(q.group, [0, 1])
    assert project_to_quotient(h.elements, h)[0] == S(q.group, [0])
    assert cosets_met(h.elements, h).count == 1
    assert cosets_met(GroupSet.full(z8), h).count == h.index


@pytest.mark.parametrize("g", small_groups(), ids=str)
def test_coset_count_bound(g, rng):
    for h in enumerate_subgroups(g):
        x = random_subset(g, rng)
        c = cosets_met(x, h).count
        assert c * h.order >= len(x)
        assert (c * h.order == len(x)) == h.issubset(stabilizer(x))


@pytest.mark.parametrize("factors", [(8,), (2, 4), (4, 6), (2, 2, 3), (3, 9)])
def test_projection_is_homomorphism(factors, rng):
    g = make_group(factors)
    for h in enumerate_subgroups(g):
        q = quotient(h)
        assert q.group.order * h.order == g.order
        a, b = random_subset(g, rng, 0.3), random_subset(g, rng, 0.3)
        assert q.project(sumset(a, b)) == sumset(q.project(a), q.project(b))
        assert q.preimage(q.project(a)) == saturate(a, h)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(2, 7), min_size=1, max_size=3), st.data())
def test_sumset_laws(factors, data):
    g = make_group(factors)
    sets = [GroupSet.from_ranks(g, data.draw(st.lists(st.integers(0, g.order - 1), max_size=8))) for _ in range(3)]
    a, b, c = sets
    assert sumset_fast(a, b) == sumset_fast(b, a)
    assert sumset(sumset(a, b), c) == sumset(a, sumset(b, c))
    if a and b:
        assert len(sumset(a, b)) >= max(len(a), len(b))

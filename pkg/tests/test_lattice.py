import itertools

import numpy as np
import pytest

from sigmakneser.errors import DescentImpossible, EmptySequenceError, EnumerationCapExceeded
from sigmakneser.group import make_group
from sigmakneser.kneser import factor_shapes
from sigmakneser.lattice import (
    Subgroup,
    build_path,
    constant_index_subsequence,
    descend_subgroup,
    enumerate_subgroups,
    generate_subgroup,
    intersect,
    limit_subgroup,
    subgroups_of_index,
)
from sigmakneser.sigma import make_family


def ranks(h):
    return [int(r) for r in h.elements.ranks()]


def closed_subsets(g):
    """Every subset containing 0 and closed under addition, by brute force over bitmasks."""
    n = g.order
    coords = g.unrank_many(np.arange(n))
    add = g.rank_many(coords[:, None, :] + coords[None, :, :])
    masks = np.arange(1, 1 << n, 2, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    ok = np.ones(len(masks), dtype=bool)
    for x in range(n):
        for y in range(x, n):
            ok &= ~(bits[:, x] & bits[:, y]) | bits[:, add[x, y]]
    return {tuple(np.flatnonzero(row).tolist()) for row in bits[ok]}


def generated_subsets(g):
    """Subgroups of an r-factor group need at most r generators: close every r-tuple."""
    r = len(g.factors)
    out = set()
    for gens in itertools.combinations_with_replacement(list(g), r):
        out.add(tuple(ranks(generate_subgroup(g, gens))))
    return out


def test_generate_examples():
    z8, klein = make_group([8]), make_group([2, 2])
    t = generate_subgroup(z8, [])
    assert ranks(t) == [0] and t.index == 8
    h = generate_subgroup(z8, [(2,)])
    assert ranks(h) == [0, 2, 4, 6] and h.index == 2
    assert generate_subgroup(klein, [(1, 0), (0, 1)]).index == 1


def test_index_examples():
    assert [ranks(h) for h in subgroups_of_index(make_group([4]), 2)] == [[0, 2]]
    fam = subgroups_of_index(make_group([2, 2]), 2)
    assert sorted(ranks(h) for h in fam) == [[0, 1], [0, 2], [0, 3]]
    assert len(subgroups_of_index(make_group([5]), 3)) == 0
    with pytest.raises(EnumerationCapExceeded):
        subgroups_of_index(make_group([64, 128]), 2, cap=4096)


def test_intersect_examples():
    z8, klein = make_group([8]), make_group([2, 2])
    h, l = generate_subgroup(z8, [(2,)]), generate_subgroup(z8, [(4,)])
    assert intersect(h, h) == h
    assert ranks(intersect(h, l)) == [0, 4]
    a, b = generate_subgroup(klein, [(1, 0)]), generate_subgroup(klein, [(0, 1)])
    assert ranks(intersect(a, b)) == [0]


@pytest.mark.parametrize("factors", [f for f in factor_shapes(16)])
def test_enumeration_matches_subset_bruteforce(factors):
    g = make_group(factors)
    brute = closed_subsets(g)
    assert {tuple(ranks(h)) for h in enumerate_subgroups(g)} == brute
    for k in range(1, g.order + 1):
        fam = subgroups_of_index(g, k)
        got = [tuple(ranks(h)) for h in fam]
        assert len(set(got)) == len(got)
        assert set(got) == {s for s in brute if len(s) * k == g.order}
        assert all(h.is_closed() for h in fam)


@pytest.mark.parametrize("factors", [(2, 2, 2, 2), (2, 2, 4), (4, 8), (2, 16), (32,), (3, 9), (2, 2, 6)])
def test_enumeration_matches_generator_bruteforce(factors):
    g = make_group(factors)
    brute = generated_subsets(g)
    for k in range(1, g.order + 1):
        got = {tuple(ranks(h)) for h in subgroups_of_index(g, k)}
        assert got == {s for s in brute if len(s) * k == g.order}


def test_canonical_order_deterministic():
    g = make_group([2, 4, 4])
    a = [ranks(h) for h in subgroups_of_index(g, 4)]
    b = [ranks(h) for h in subgroups_of_index(g, 4, chunk_rows=64)]
    assert a == b == sorted(a)


def test_descend_examples():
    z4 = make_group([4])
    g1 = generate_subgroup(z4, [(2,)])
    l = generate_subgroup(z4, [(2,)]).with_parent(Subgroup.whole(z4))
    k = descend_subgroup(l, g1, 2)
    assert ranks(k) == [0] and k.index == 2
    whole = Subgroup.whole(z4).with_parent(Subgroup.whole(z4))
    assert descend_subgroup(whole, g1, 1) == g1
    # G_1 = G_2: K = L
    g = make_group([2, 4])
    top = Subgroup.whole(g)
    for l in subgroups_of_index(top, 2):
        assert descend_subgroup(l, top, 2) == l


def test_descend_impossible():
    z8 = make_group([8])
    top = Subgroup.whole(z8)
    l = subgroups_of_index(top, 2)[0]  # {0,2,4,6}
    lo = generate_subgroup(z8, [(4,)])
    # [lo : L n lo] = 1 divides 2, fine; an index-4 subgroup over a level of order 2 cannot exist
    with pytest.raises(ValueError):
        descend_subgroup(l, lo, 4)
    # Z_3 inside Z_6 has no index-2 subgroup to descend to
    odd = make_family("nested-cyclic", {"divisors": [3, 6]})
    l2 = subgroups_of_index(odd.levels[1], 2)[0]
    with pytest.raises(DescentImpossible):
        descend_subgroup(l2, odd.levels[0], 2)


def test_descend_raises_on_non_divisible():
    g = make_group([4])
    top = Subgroup.whole(g)
    l = subgroups_of_index(top, 2)[0]
    lo = Subgroup.whole(g)
    # the lower level is not nested inside L's level once L's parent is replaced
    l_bad = l.with_parent(generate_subgroup(g, [(2,)]))
    with pytest.raises(DescentImpossible):
        descend_subgroup(l_bad.with_parent(l_bad), lo, 1)


def test_build_path_examples():
    m = make_family("prufer", {"p": 2}, depth=3)
    target = m.levels[1].with_parent(m.levels[2])
    path = build_path(list(m.levels), target, 2)
    assert [ranks(h) for h in path.chain] == [[0], [0, 4], [0, 2, 4, 6]]
    assert all(h.index == 2 for h in path.chain) and path.is_monotone()
    single = build_path([m.levels[2]], target, 2)
    assert single.chain == [target]
    whole = build_path(list(m.levels), m.levels[2].with_parent(m.levels[2]), 1)
    assert whole.chain == list(m.levels)


def test_limit_examples():
    m = make_family("product", {"blocks": [[2], [2], [2], [2], [2]]})
    h = generate_subgroup(m.ambient, [tuple(int(i == j) for i in range(5)) for j in range(1, 5)])
    # one index-2 subgroup seen at every level
    seq = [(n, lvl, intersect(h, lvl, parent=lvl)) for n, lvl in enumerate(m.levels, start=1)]
    res = limit_subgroup(seq)
    assert res.subgroup == h and res.levels == [1, 2, 3, 4, 5] and res.k == 2
    assert res.chain == [x for _, _, x in seq]
    assert constant_index_subsequence([2, 2, 4, 2, 2]) == (2, [0, 1, 3, 4])
    with pytest.raises(EmptySequenceError):
        limit_subgroup([])


def test_limit_chain_is_monotone_and_ends_at_deepest():
    m = make_family("product", {"blocks": [[2, 2], [2], [2], [2]]})
    rng = np.random.Generator(np.random.PCG64(3))
    for _ in range(10):
        seq = []
        for n, lvl in enumerate(m.levels, start=1):
            fam = subgroups_of_index(lvl, 2)
            seq.append((n, lvl, fam[int(rng.integers(len(fam)))]))
        res = limit_subgroup(seq)
        assert res.k == 2
        assert all(a.issubset(b) for a, b in zip(res.chain, res.chain[1:]))
        assert res.subgroup == seq[-1][2]

import numpy as np
import pytest

from sigmakneser.errors import DepthError, DivisibilityError, KneserError, LevelRangeError, PrimalityError
from sigmakneser.group import GroupSet
from sigmakneser.sigma import embed, folner_coset_sequence, level_group, make_family
from sigmakneser.sumset import stabilizer

MODELS = [
    ("prufer", {"p": 2}, 6),
    ("prufer", {"p": 3}, 4),
    ("nested-cyclic", {"divisors": [2, 6, 12, 60]}, None),
    ("polynomial", {"p": 3, "r": 1}, 4),
    ("polynomial", {"p": 2, "r": 2}, 4),
    ("product", {"blocks": [[5], [2], [2]]}, None),
    ("product", {"blocks": [[2], [2, 2], [2, 2, 2]]}, None),
    ("growing-product", {"c": 1}, 4),
]


def test_prufer_example():
    m = make_family("prufer", {"p": 2}, depth=3)
    assert m.ambient.factors == (8,)
    assert [m.level_group(n).elements.ranks().tolist() for n in (1, 2, 3)] == [[0, 4], [0, 2, 4, 6], list(range(8))]
    assert embed(m, 1, (1,)) == (4,)
    assert [g.order for g in m.level_groups] == [2, 4, 8]


def test_polynomial_and_product_examples():
    m = make_family("polynomial", {"p": 3, "r": 1}, depth=2)
    assert m.ambient.factors == (3, 3)
    assert {tuple(x) for x in level_group(m, 1).elements} == {(0, 0), (1, 0), (2, 0)}
    g = make_family("product", {"blocks": [[2] * i for i in range(1, 5)]})
    assert [x.order for x in g.level_groups] == [2 ** (n * (n + 1) // 2) for n in range(1, 5)]


def test_errors():
    with pytest.raises(DivisibilityError):
        make_family("nested-cyclic", {"divisors": [2, 3]})
    with pytest.raises(PrimalityError):
        make_family("prufer", {"p": 4}, depth=2)
    with pytest.raises(DepthError):
        make_family("prufer", {"p": 2}, depth=0)
    with pytest.raises(KneserError):
        make_family("nope", {}, depth=2)
    m = make_family("prufer", {"p": 2}, depth=3)
    with pytest.raises(LevelRangeError):
        m.level_group(4)
    with pytest.raises(KneserError):
        m.level_group(0, base="other")


@pytest.mark.parametrize("family,params,depth", MODELS)
def test_level_chain_invariants(family, params, depth):
    m = make_family(family, params, depth)
    for n in range(1, m.depth):
        lo, hi = m.level_group(n), m.level_group(n + 1)
        assert lo.elements.issubset(hi.elements)
        assert hi.order % lo.order == 0
    for n in range(1, m.depth + 1):
        lvl = m.level_group(n)
        assert lvl.order == m.level_order(n)
        assert lvl.is_closed()
        assert stabilizer(lvl.elements) == lvl
        if family in ("prufer", "nested-cyclic"):
            assert max(m.ambient.element_order(g) for g in lvl.generators or [m.ambient.zero]) == lvl.order


@pytest.mark.parametrize("family,params,depth", MODELS)
def test_embedding_is_injective_homomorphism(family, params, depth):
    m = make_family(family, params, depth)
    rng = np.random.Generator(np.random.PCG64(1))
    for n in range(1, m.depth + 1):
        lg = m.level_as_group(n)
        table = m.embedding_table(n)
        assert len(set(table)) == lg.order
        assert m.level_group(n).elements == GroupSet.from_ranks(m.ambient, table)
        for _ in range(10):
            x, y = lg.unrank(int(rng.integers(lg.order))), lg.unrank(int(rng.integers(lg.order)))
            assert m.embed(n, lg.add(x, y)) == m.ambient.add(m.embed(n, x), m.embed(n, y))
        s = GroupSet(lg, rng.random(lg.order) < 0.5)
        assert m.restrict(m.extend(s, n), n) == s


def test_stationary_levels():
    m = make_family("product", {"blocks": [[5], [2], [2]]})
    from sigmakneser.lattice import generate_subgroup

    h = generate_subgroup(m.ambient, [(0, 1, 0), (0, 0, 1)])
    assert m.stationary_levels(h) == [1, 2, 3]
    p = make_family("prufer", {"p": 2}, depth=4)
    h = generate_subgroup(p.ambient, [(2,)])
    assert p.stationary_levels(h) == [4]


def test_folner_sequence():
    m = make_family("polynomial", {"p": 3}, depth=3)
    seq = folner_coset_sequence(m, [(0, 1, 0), (0, 0, 1)])
    assert [t.level for t in seq] == [1, 2]
    assert len(seq[0].coset()) == 3
    assert (0, 1, 0) in seq[0].coset()

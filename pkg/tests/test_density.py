from fractions import Fraction

import numpy as np
import pytest

from sigmakneser.density import (
    density_profile,
    folner_profile,
    lower_upper_estimates,
    periodic_density,
)
from sigmakneser.errors import WindowError
from sigmakneser.group import GroupSet
from sigmakneser.lattice import generate_subgroup
from sigmakneser.sets import SigmaSet, band_set, periodic_set, random_set, shifted_coset_set
from sigmakneser.sigma import folner_coset_sequence, make_family
from sigmakneser.sumset import sumset_fast


def test_full_and_empty_profiles():
    m = make_family("polynomial", {"p": 3}, depth=4)
    full = SigmaSet(m, GroupSet.full(m.ambient))
    empty = SigmaSet(m, GroupSet.empty(m.ambient))
    assert all(v == 1 for v in density_profile(full).values)
    a, wl = shifted_coset_set(m)
    seq = folner_coset_sequence(m, wl.witnesses, wl.levels())
    assert folner_profile(a, seq).all_ones()
    assert all(v == 0 for v in folner_profile(empty, seq).values)
    assert folner_profile(full, seq).all_ones()


@pytest.mark.parametrize("family,params,depth", [("polynomial", {"p": 2}, 8), ("prufer", {"p": 3}, 5),
                                                  ("growing-product", {"c": 1}, 4)])
def test_profile_values_are_popcount_ratios(family, params, depth):
    m = make_family(family, params, depth)
    s = random_set(m, Fraction(2, 7), seed=11)
    p = density_profile(s)
    for n, v, c in zip(p.levels, p.values, p.counts):
        members = m.level_group(n).bits
        num = int(np.count_nonzero(members & s.bits.bits))
        den = int(np.count_nonzero(members))
        assert c == num
        assert v.numerator * den == num * v.denominator
    assert [tuple(r) for r in p.csv_rows()] == [(n, v.numerator, v.denominator) for n, v in zip(p.levels, p.values)]


def test_band_profile_alternates():
    m = make_family("growing-product", {"c": 1}, depth=5)
    vals = density_profile(band_set(m, "even")).values
    assert vals[1] == Fraction(3, 4)
    assert all(vals[i] > Fraction(1, 2) for i in (1, 3))
    assert all(vals[i] < Fraction(1, 2) for i in (0, 2, 4))


def test_estimates():
    m = make_family("growing-product", {"c": 1}, depth=5)
    even = band_set(m, "even")
    p = density_profile(even)
    est = lower_upper_estimates(p, 2)
    assert est.exactness == "symbolic" and (est.lower, est.upper) == (0, 1)
    assert est.tail_min <= est.tail_max
    # the tail window widens toward the symbolic interval
    spans = [lower_upper_estimates(p, t) for t in range(1, 6)]
    assert all(a.tail_min >= b.tail_min and a.tail_max <= b.tail_max for a, b in zip(spans, spans[1:]))
    assert all(0 <= e.tail_min <= e.tail_max <= 1 for e in spans)
    r = random_set(m, Fraction(1, 2), seed=0)
    e = lower_upper_estimates(density_profile(r), 3)
    assert e.exactness == "empirical" and e.lower <= e.upper and e.consistent is None
    with pytest.raises(WindowError):
        lower_upper_estimates(p, 0)


def test_symbolic_consistency_flag():
    m = make_family("product", {"blocks": [[5], [2], [2]]})
    h = generate_subgroup(m.ambient, [(0, 1, 0), (0, 0, 1)])
    s = periodic_set(m, h, [(0, 0, 0), (1, 0, 0)])
    e = lower_upper_estimates(density_profile(s), 3)
    assert e.consistent is True and e.lower == Fraction(2, 5)


def test_periodic_density():
    m = make_family("product", {"blocks": [[5], [2], [2]]})
    h = generate_subgroup(m.ambient, [(0, 1, 0), (0, 0, 1)])
    s = periodic_set(m, h, [(0, 0, 0), (1, 0, 0)])
    pd = periodic_density(m, sumset_fast(s.bits, s.bits))
    assert pd.value == Fraction(3, 5) and pd.cosets == 3 and pd.subgroup == h
    assert periodic_density(m, GroupSet.empty(m.ambient)).value == 0
    p = make_family("prufer", {"p": 2}, depth=4)
    assert periodic_density(p, generate_subgroup(p.ambient, [(2,)]).elements) is None

"""Exact density profiles along the exhausting sequence and along coset Følner sequences.

A truncation only ever shows finitely many ratios, so estimates of liminf and
limsup are tail minima and maxima and are labelled ``empirical``; only values
carried over from a construction are labelled ``symbolic``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import WindowError
from .group import GroupSet
from .lattice import Subgroup
from .sets import SigmaSet
from .sigma import FolnerTerm, SigmaGroupModel
from .sumset import cosets_met, stabilizer


@dataclass(frozen=True)
class DensityProfile:
    levels: tuple[int, ...]
    counts: tuple[int, ...]
    sizes: tuple[int, ...]
    symbolic_lower: Optional[Fraction] = None
    symbolic_upper: Optional[Fraction] = None

    @property
    def values(self) -> list[Fraction]:
        return [Fraction(c, s) for c, s in zip(self.counts, self.sizes)]

    def tail(self, window: int) -> list[Fraction]:
        if window < 1:
            raise WindowError("tail window must be >= 1")
        return self.values[-window:]

    def to_json(self) -> dict:
        return {
            "levels": list(self.levels),
            "values": [str(v) for v in self.values],
            "numerators": list(self.counts),
            "denominators": list(self.sizes),
            "symbolic_lower": None if self.symbolic_lower is None else str(self.symbolic_lower),
            "symbolic_upper": None if self.symbolic_upper is None else str(self.symbolic_upper),
        }

    def csv_rows(self) -> list[tuple[int, int, int]]:
        # reduced fractions; the raw counts are in to_json
        return [(n, v.numerator, v.denominator) for n, v in zip(self.levels, self.values)]


def level_counts(model: SigmaGroupModel, bits: GroupSet) -> list[int]:
    return [int(np.count_nonzero(bits.bits[r])) for r in model.level_ranks]


def density_profile(s: SigmaSet) -> DensityProfile:
    model = s.model
    return DensityProfile(
        levels=tuple(range(1, model.depth + 1)),
        counts=tuple(level_counts(model, s.bits)),
        sizes=tuple(g.order for g in model.level_groups),
        symbolic_lower=s.lower,
        symbolic_upper=s.upper,
    )


@dataclass(frozen=True)
class Estimate:
    lower: Fraction
    upper: Fraction
    exactness: str
    tail_min: Fraction
    tail_max: Fraction
    window: int
    consistent: Optional[bool]

    def to_json(self) -> dict:
        return {
            "lower": str(self.lower),
            "upper": str(self.upper),
            "exactness": self.exactness,
            "tail_min": str(self.tail_min),
            "tail_max": str(self.tail_max),
            "window": self.window,
            "consistent": self.consistent,
        }


def lower_upper_estimates(p: DensityProfile, tail: int) -> Estimate:
    """Tail min/max, or the symbolic limits when the construction supplied them.

    Consistency is only checkable for an exact density d (lower == upper): the
    deepest value must equal d.  Otherwise it is reported as None.
    """
    if tail < 1:
        raise WindowError("tail window must be >= 1")
    vals = p.tail(min(tail, len(p.values)))
    lo, hi = min(vals), max(vals)
    if p.symbolic_lower is not None and p.symbolic_upper is not None:
        consistent = None
        if p.symbolic_lower == p.symbolic_upper:
            consistent = vals[-1] == p.symbolic_lower
        return Estimate(p.symbolic_lower, p.symbolic_upper, "symbolic", lo, hi, len(vals), consistent)
    return Estimate(lo, hi, "empirical", lo, hi, len(vals), None)


@dataclass(frozen=True)
class FolnerProfile:
    levels: tuple[int, ...]
    counts: tuple[int, ...]
    sizes: tuple[int, ...]

    @property
    def values(self) -> list[Fraction]:
        return [Fraction(c, s) for c, s in zip(self.counts, self.sizes)]

    def all_ones(self) -> bool:
        return bool(self.counts) and all(c == s for c, s in zip(self.counts, self.sizes))

    def to_json(self) -> dict:
        return {"levels": list(self.levels), "values": [str(v) for v in self.values]}


def folner_profile(s: SigmaSet, seq: Sequence[FolnerTerm]) -> FolnerProfile:
    """|A n (x_n + G_n)| / |G_n| along the given cosets."""
    counts, sizes = [], []
    for term in seq:
        coset = term.coset()
        counts.append(int(np.count_nonzero(coset.bits & s.bits.bits)))
        sizes.append(term.subgroup.order)
    return FolnerProfile(tuple(t.level for t in seq), tuple(counts), tuple(sizes))


@dataclass(frozen=True)
class PeriodicDensity:
    value: Fraction
    subgroup: Subgroup
    cosets: int
    first_level: int


def periodic_density(model: SigmaGroupModel, x: GroupSet) -> Optional[PeriodicDensity]:
    """Exact density c/q of a set that is a union of c cosets of its stabilizer H.

    Valid when H is stationary (G_n + H = G_N) at a level n < N, which is what
    makes |X n G_n|/|G_n| constant from that level on.  Returns None otherwise.
    """
    h = stabilizer(x)
    if not x:
        return PeriodicDensity(Fraction(0), h, 0, 1)
    if h.order == model.ambient.order:
        return PeriodicDensity(Fraction(1), h, 1, 1)
    levels = [n for n in model.stationary_levels(h) if n < model.depth]
    if not levels:
        return None
    c = cosets_met(x, h).count
    return PeriodicDensity(Fraction(c, h.index), h, c, levels[0])

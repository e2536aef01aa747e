"""Subsets of a truncated σ-finite group, with exact densities where the construction fixes them."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import Exponent2Obstruction, KneserError, LevelRangeError
from .group import Element, GroupSet
from .lattice import Subgroup
from .sigma import SigmaGroupModel
from .sumset import cosets_met, saturate

RNG_NAME = "numpy.random.PCG64"


@dataclass(frozen=True, eq=False)
class SigmaSet:
    model: SigmaGroupModel
    bits: GroupSet
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    note: str = ""
    kind: str = "explicit"

    @property
    def exactness(self) -> str:
        return "symbolic" if self.lower is not None and self.upper is not None else "empirical"

    def with_bits(self, bits: GroupSet, kind: str) -> "SigmaSet":
        return SigmaSet(self.model, bits, kind=kind)

    def __len__(self) -> int:
        return len(self.bits)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "size": len(self.bits),
            "lower": None if self.lower is None else str(self.lower),
            "upper": None if self.upper is None else str(self.upper),
            "exactness": self.exactness,
            "note": self.note,
            "ranks": [int(r) for r in self.bits.ranks()],
        }


@dataclass(frozen=True)
class WitnessList:
    """x_n in G_{n+1} minus G_n with 2x_n outside G_n, for n = start .. N-1."""

    start: int
    base: str
    witnesses: tuple[Element, ...]
    certificates: tuple[tuple[bool, bool], ...] = field(default=())

    def levels(self) -> list[int]:
        return list(range(self.start, self.start + len(self.witnesses)))

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "base": self.base,
            "witnesses": [{"level": n, "x": list(x), "outside_next_lower": c[0], "double_outside": c[1]}
                          for n, x, c in zip(self.levels(), self.witnesses, self.certificates)],
        }


def periodic_set(model: SigmaGroupModel, h: Subgroup, reps: Sequence[Sequence[int]]) -> SigmaSet:
    """Union of the cosets r + H."""
    if not reps:
        raise KneserError("periodic set needs at least one coset representative")
    amb = model.ambient
    pts = GroupSet.from_elements(amb, reps)
    bits = saturate(pts, h)
    count = cosets_met(pts, h).count
    if count < len(reps):
        warnings.warn(f"{len(reps) - count} duplicate coset representative(s) collapsed", stacklevel=2)
    q = h.index
    stat = [n for n in model.stationary_levels(h) if n < model.depth]
    if h.order == amb.order or stat:
        d = Fraction(count, q)
        first = 1 if h.order == amb.order else stat[0]
        note = f"union of {count} cosets of an index-{q} subgroup stationary from level {first}"
        return SigmaSet(model, bits, d, d, note, "periodic")
    note = f"index-{q} subgroup not stationary below depth {model.depth}; density empirical only"
    return SigmaSet(model, bits, None, None, note, "periodic")


def band_set(model: SigmaGroupModel, parity: str, base: str = "trivial") -> SigmaSet:
    """Union of the bands G_n minus G_{n-1} over even (n >= 2) or odd (n >= 1) n <= N."""
    if parity not in ("even", "odd"):
        raise KneserError(f"parity must be 'even' or 'odd', got {parity!r}")
    if model.depth < 2:
        raise LevelRangeError("band sets need depth >= 2")
    bits = np.zeros(model.ambient.order, dtype=bool)
    first = 2 if parity == "even" else 1
    for n in range(first, model.depth + 1, 2):
        bits |= model.level_group(n).bits & ~model.level_group(n - 1, base=base).bits
    lower = upper = None
    note = "density profile only"
    if model.ratios_diverge:
        # |G_{n+1}|/|G_n| -> oo: the top band carries almost all of each level
        lower, upper = Fraction(0), Fraction(1)
        note = "liminf 0 / limsup 1 forced by |G_{n+1}|/|G_n| -> oo"
    return SigmaSet(model, GroupSet(model.ambient, bits), lower, upper, note, f"band-{parity}")


def _witness(model: SigmaGroupModel, lo: np.ndarray, hi: np.ndarray) -> Optional[int]:
    amb = model.ambient
    cand = np.flatnonzero(hi & ~lo)
    if cand.size == 0:
        return None
    doubled = amb.rank_many(2 * amb.unrank_many(cand))
    ok = cand[~lo[doubled]]
    return int(ok[0]) if ok.size else None


def shifted_coset_set(model: SigmaGroupModel, start: int = 0, base: str = "trivial") -> tuple[SigmaSet, WitnessList]:
    """A = union of x_n + G_n for n = start .. N-1, with G_0 the chosen base.

    With start = 0 the base term x_0 + G_0 is included, which is what makes the
    stabilizer of A+A exactly G_0; with start = 1 it is G_1.
    """
    if start not in (0, 1):
        raise KneserError("start must be 0 or 1")
    amb = model.ambient
    wits, certs = [], []
    bits = np.zeros(amb.order, dtype=bool)
    for n in range(start, model.depth):
        lo = model.level_group(n, base=base)
        hi = model.level_group(n + 1)
        r = _witness(model, lo.bits, hi.bits)
        if r is None:
            raise Exponent2Obstruction(
                f"no x in G_{n + 1} minus G_{n} with 2x outside G_{n}: the quotient has exponent <= 2"
            )
        x = amb.unrank(r)
        wits.append(x)
        certs.append((bool(hi.bits[r] and not lo.bits[r]), not bool(lo.bits[amb.rank(amb.scale(2, x))])))
        bits |= amb.translate_bits(lo.bits, x)
    note = f"union of x_n + G_n for n = {start}..{model.depth - 1}"
    s = SigmaSet(model, GroupSet(amb, bits), None, None, note, "shifted")
    return s, WitnessList(start, base, tuple(wits), tuple(certs))


def random_set(model: SigmaGroupModel, density, seed: int = 0) -> SigmaSet:
    """Independent inclusion of each ambient element with probability ``density``."""
    density = Fraction(str(density)) if isinstance(density, float) else Fraction(density)
    if not 0 <= density <= 1:
        raise KneserError(f"target density must be in [0, 1], got {density}")
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.random(model.ambient.order)
    bits = draws < float(density)
    if density == 1:
        bits[:] = True
    return SigmaSet(model, GroupSet(model.ambient, bits), None, None,
                    f"{RNG_NAME} seed={seed} p={density}", "random")


def explicit_set(model: SigmaGroupModel, levels: Optional[Mapping[int, Sequence[int]]] = None,
                 ranks: Sequence[int] = ()) -> SigmaSet:
    """Union of per-level rank lists (ranks in each abstract level group) and ambient ranks."""
    bits = GroupSet.from_ranks(model.ambient, ranks).bits.copy()
    for n, rs in (levels or {}).items():
        n = int(n)
        lg = model.level_as_group(n)
        bits |= model.extend(GroupSet.from_ranks(lg, rs), n).bits
    return SigmaSet(model, GroupSet(model.ambient, bits), None, None, "explicit ranks", "explicit")

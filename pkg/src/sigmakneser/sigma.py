"""σ-finite groups truncated at depth N.

The exhausting sequence G_1 <= ... <= G_N is realised inside one ambient group
G_N.  Level n is also available as an abstract group (its own cyclic factors)
together with the table of ambient ranks of its elements, so sets can be moved
between the ambient and a level without coordinate arithmetic.

Level 0 is the base G_0 used by the counterexample constructions: the trivial
subgroup by default, or G_1 itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from sympy import isprime

from .errors import DepthError, DivisibilityError, KneserError, LevelRangeError, PrimalityError
from .group import DEFAULT_SIZE_CAP, Element, FiniteAbelianGroup, GroupSet, make_group
from .lattice import Subgroup

FAMILIES = ("product", "growing-product", "polynomial", "prufer", "nested-cyclic")
BASES = ("trivial", "level1")


@dataclass(frozen=True, eq=False)
class SigmaGroupModel:
    family: str
    params: dict
    depth: int
    ambient: FiniteAbelianGroup
    level_groups: tuple[FiniteAbelianGroup, ...]
    level_ranks: tuple[np.ndarray, ...] = field(repr=False)
    levels: tuple[Subgroup, ...] = field(repr=False)
    ratios_diverge: bool = False
    no_finite_index_subgroups: bool = False

    def _check_level(self, n: int, allow_zero: bool = False) -> None:
        lo = 0 if allow_zero else 1
        if not lo <= n <= self.depth:
            raise LevelRangeError(f"level {n} outside [{lo}, {self.depth}]")

    def level_group(self, n: int, base: str = "trivial") -> Subgroup:
        """G_n as a subgroup of the ambient; n = 0 gives the base G_0."""
        self._check_level(n, allow_zero=True)
        if n == 0:
            if base == "trivial":
                return Subgroup.trivial(self.ambient, parent=self.levels[0])
            if base == "level1":
                return self.levels[0]
            raise KneserError(f"unknown base {base!r}; expected one of {BASES}")
        return self.levels[n - 1]

    def level_as_group(self, n: int) -> FiniteAbelianGroup:
        self._check_level(n)
        return self.level_groups[n - 1]

    def level_order(self, n: int) -> int:
        self._check_level(n)
        return self.level_groups[n - 1].order

    def embed(self, n: int, x: Sequence[int]) -> Element:
        """Image in the ambient of an element of the abstract level-n group."""
        lg = self.level_as_group(n)
        return self.ambient.unrank(int(self.level_ranks[n - 1][lg.rank(lg.element(x))]))

    def restrict(self, x: GroupSet, n: int) -> GroupSet:
        """A_n = A n G_n as a subset of the abstract level-n group."""
        self._check_level(n)
        return GroupSet(self.level_groups[n - 1], x.bits[self.level_ranks[n - 1]])

    def extend(self, y: GroupSet, n: int) -> GroupSet:
        """Image in the ambient of a subset of the abstract level-n group."""
        self._check_level(n)
        bits = np.zeros(self.ambient.order, dtype=bool)
        bits[self.level_ranks[n - 1][y.bits]] = True
        return GroupSet(self.ambient, bits)

    def extend_subgroup(self, h: Subgroup, n: int) -> Subgroup:
        gens = [self.embed(n, g) for g in h.generators]
        return Subgroup(self.ambient, self.extend(h.elements, n), gens, parent=self.levels[n - 1])

    def stationary_levels(self, h: Subgroup) -> list[int]:
        """Levels n with G_n + H = G_N, the finite-truncation witness of finite index."""
        out = []
        for n, lvl in enumerate(self.levels, start=1):
            meet = int(np.count_nonzero(lvl.bits & h.bits))
            if lvl.order * h.order == meet * self.ambient.order:
                out.append(n)
        return out

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "depth": self.depth,
            "ambient": list(self.ambient.factors),
            "level_orders": [g.order for g in self.level_groups],
            "level_factors": [list(g.factors) for g in self.level_groups],
        }

    def embedding_table(self, n: int) -> list[int]:
        """Ambient rank of each level-n element, in level rank order."""
        self._check_level(n)
        return [int(r) for r in self.level_ranks[n - 1]]


def _check_prime(p: int) -> None:
    if not isprime(int(p)):
        raise PrimalityError(f"{p} is not prime")


def _prefix_model(family, params, blocks, cap, **flags) -> SigmaGroupModel:
    factors = [d for blk in blocks for d in blk]
    ambient = make_group(factors, cap=cap)
    level_groups, ranks, levels = [], [], []
    used = 0
    for blk in blocks:
        used += len(blk)
        lg = FiniteAbelianGroup(tuple(factors[:used]))
        stride = math.prod(factors[used:])
        r = np.arange(lg.order, dtype=np.int64) * stride
        bits = np.zeros(ambient.order, dtype=bool)
        bits[r] = True
        gens = [tuple(int(i == j) for j in range(len(factors))) for i in range(used)]
        level_groups.append(lg)
        ranks.append(r)
        levels.append(Subgroup(ambient, GroupSet(ambient, bits), gens))
    return SigmaGroupModel(family, params, len(blocks), ambient, tuple(level_groups), tuple(ranks), tuple(levels), **flags)


def _cyclic_model(family, params, divisors, cap, **flags) -> SigmaGroupModel:
    for lo, hi in zip(divisors, divisors[1:]):
        if hi % lo:
            raise DivisibilityError(f"{lo} does not divide {hi}")
    top = divisors[-1]
    ambient = make_group([top], cap=cap)
    level_groups, ranks, levels = [], [], []
    for d in divisors:
        step = top // d
        lg = FiniteAbelianGroup((d,) if d > 1 else ())
        r = np.arange(d, dtype=np.int64) * step
        bits = np.zeros(ambient.order, dtype=bool)
        bits[r] = True
        level_groups.append(lg)
        ranks.append(r)
        levels.append(Subgroup(ambient, GroupSet(ambient, bits), [(step % top,)] if d > 1 else []))
    return SigmaGroupModel(family, params, len(divisors), ambient, tuple(level_groups), tuple(ranks), tuple(levels), **flags)


def make_family(family: str, params: Optional[dict] = None, depth: Optional[int] = None, cap: int = DEFAULT_SIZE_CAP) -> SigmaGroupModel:
    """Build a truncated σ-finite model.

    product          blocks: list of factor lists, block n is C_n; G_n = C_1 x ... x C_n
    growing-product  c: C_n = (Z_2)^(c*n), so |G_{n+1}|/|G_n| grows without bound
    polynomial       p, r: polynomials over F_{p^r} of degree < n, i.e. (Z_p)^(r*n)
    prufer           p: G_n = Z_{p^n} inside Z_{p^N}
    nested-cyclic    divisors: d_1 | d_2 | ... ; G_n = Z_{d_n} inside Z_{d_N}
    """
    params = dict(params or {})
    if family == "product":
        blocks = [list(map(int, b)) for b in params["blocks"]]
        depth = len(blocks) if depth is None else depth
        if depth < 1:
            raise DepthError(f"depth must be >= 1, got {depth}")
        if depth > len(blocks):
            raise DepthError(f"depth {depth} exceeds the {len(blocks)} blocks given")
        for b in blocks[:depth]:
            if not b:
                raise KneserError("product blocks must be nonempty")
        params["blocks"] = blocks[:depth]
        return _prefix_model(family, params, blocks[:depth], cap)
    if family == "growing-product":
        c = int(params.get("c", 1))
        if depth is None or depth < 1:
            raise DepthError(f"depth must be >= 1, got {depth}")
        params["c"] = c
        blocks = [[2] * (c * n) for n in range(1, depth + 1)]
        return _prefix_model(family, params, blocks, cap, ratios_diverge=True)
    if family == "polynomial":
        p, r = int(params["p"]), int(params.get("r", 1))
        _check_prime(p)
        if r < 1:
            raise KneserError(f"r must be >= 1, got {r}")
        if depth is None or depth < 1:
            raise DepthError(f"depth must be >= 1, got {depth}")
        params.update(p=p, r=r)
        return _prefix_model(family, params, [[p] * r for _ in range(depth)], cap)
    if family == "prufer":
        p = int(params["p"])
        _check_prime(p)
        if depth is None or depth < 1:
            raise DepthError(f"depth must be >= 1, got {depth}")
        params["p"] = p
        return _cyclic_model(family, params, [p**n for n in range(1, depth + 1)], cap, no_finite_index_subgroups=True)
    if family == "nested-cyclic":
        divisors = [int(d) for d in params["divisors"]]
        depth = len(divisors) if depth is None else depth
        if depth < 1:
            raise DepthError(f"depth must be >= 1, got {depth}")
        if depth > len(divisors):
            raise DepthError(f"depth {depth} exceeds the {len(divisors)} divisors given")
        if any(d < 1 for d in divisors):
            raise DivisibilityError("divisors must be positive")
        params["divisors"] = divisors[:depth]
        return _cyclic_model(family, params, divisors[:depth], cap)
    raise KneserError(f"unknown family {family!r}; expected one of {FAMILIES}")


def level_group(model: SigmaGroupModel, n: int) -> Subgroup:
    return model.level_group(n)


def embed(model: SigmaGroupModel, n: int, x) -> Element:
    return model.embed(n, x)


@dataclass(frozen=True)
class FolnerTerm:
    witness: Element
    level: int
    subgroup: Subgroup

    def coset(self) -> GroupSet:
        return self.subgroup.elements.translate(self.witness)


def folner_coset_sequence(model: SigmaGroupModel, witnesses: Sequence[Sequence[int]], levels: Optional[Sequence[int]] = None, base: str = "trivial") -> list[FolnerTerm]:
    """Pair witness i with level ``levels[i]`` (default 1, 2, ...): the cosets x_n + G_n."""
    if levels is None:
        levels = range(1, len(witnesses) + 1)
    out = []
    for x, n in zip(witnesses, levels):
        out.append(FolnerTerm(model.ambient.element(x), int(n), model.level_group(int(n), base=base)))
    return out

"""Finite abelian groups given as products of cyclic factors, and bit-vector subsets.

Elements are plain tuples of residues.  Ranks are mixed-radix with the last
factor varying fastest, so ``rank`` agrees with ``numpy.ravel_multi_index`` in
C order and a subset of the group is a flat boolean array that can be viewed as
an array of shape ``factors``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    ElementArityError,
    GroupMismatchError,
    InvalidFactorError,
    RankError,
    SizeCapExceeded,
)

DEFAULT_SIZE_CAP = 1 << 24

Element = tuple[int, ...]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Z_{d_1} x ... x Z_{d_m}.  An empty factor list is the trivial group."""

    factors: tuple[int, ...]
    order: int = field(init=False, compare=False)

    def __post_init__(self):
        factors = tuple(int(d) for d in self.factors)
        for d in factors:
            if d < 2:
                raise InvalidFactorError(f"cyclic factor must be >= 2, got {d}")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "order", math.prod(factors))

    def __repr__(self):
        return f"FiniteAbelianGroup({list(self.factors)})"

    @property
    def rank_count(self) -> int:
        return len(self.factors)

    @property
    def shape(self) -> tuple[int, ...]:
        # numpy needs a non-empty shape for the trivial group
        return self.factors or (1,)

    @property
    def zero(self) -> Element:
        return (0,) * len(self.factors)

    def _check(self, x: Sequence[int]) -> None:
        if len(x) != len(self.factors):
            raise ElementArityError(
                f"element {tuple(x)} has arity {len(x)}, group {list(self.factors)} needs {len(self.factors)}"
            )

    def element(self, x: Sequence[int]) -> Element:
        """Reduce a coordinate sequence into canonical form."""
        self._check(x)
        return tuple(int(c) % d for c, d in zip(x, self.factors))

    def add(self, x: Sequence[int], y: Sequence[int]) -> Element:
        self._check(x)
        self._check(y)
        return tuple((a + b) % d for a, b, d in zip(x, y, self.factors))

    def sub(self, x: Sequence[int], y: Sequence[int]) -> Element:
        return self.add(x, self.negate(y))

    def negate(self, x: Sequence[int]) -> Element:
        self._check(x)
        return tuple((d - a) % d for a, d in zip(x, self.factors))

    def scale(self, n: int, x: Sequence[int]) -> Element:
        self._check(x)
        return tuple((n * a) % d for a, d in zip(x, self.factors))

    def element_order(self, x: Sequence[int]) -> int:
        x = self.element(x)
        return math.lcm(1, *(d // math.gcd(a, d) for a, d in zip(x, self.factors)))

    def rank(self, x: Sequence[int]) -> int:
        self._check(x)
        r = 0
        for a, d in zip(x, self.factors):
            if not 0 <= a < d:
                raise RankError(f"coordinate {a} not reduced modulo {d}")
            r = r * d + a
        return r

    def unrank(self, r: int) -> Element:
        if not 0 <= r < self.order:
            raise RankError(f"rank {r} outside [0, {self.order})")
        out = []
        for d in reversed(self.factors):
            r, a = divmod(r, d)
            out.append(a)
        return tuple(reversed(out))

    def __iter__(self) -> Iterator[Element]:
        for r in range(self.order):
            yield self.unrank(r)

    def to_json(self) -> dict:
        return {"factors": list(self.factors)}

    # -- vectorised helpers -------------------------------------------------

    def axis_coords(self, axis: int) -> np.ndarray:
        """Coordinate ``axis`` of every element, shaped for broadcasting against ``shape``."""
        d = self.factors[axis]
        view = [1] * len(self.factors)
        view[axis] = d
        return np.arange(d, dtype=np.int64).reshape(view)

    def unrank_many(self, ranks: np.ndarray) -> np.ndarray:
        ranks = np.asarray(ranks, dtype=np.int64)
        if not self.factors:
            return np.zeros((len(ranks), 0), dtype=np.int64)
        return np.stack(np.unravel_index(ranks, self.factors), axis=1).astype(np.int64)

    def rank_many(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        if not self.factors:
            return np.zeros(len(coords), dtype=np.int64)
        mods = np.mod(coords, np.array(self.factors, dtype=np.int64))
        return np.ravel_multi_index(tuple(mods.T), self.factors).astype(np.int64)

    @cached_property
    def order_table(self) -> np.ndarray:
        """Element orders indexed by rank."""
        acc = np.ones(self.shape, dtype=np.int64)
        for i, d in enumerate(self.factors):
            acc = np.lcm(acc, d // np.gcd(self.axis_coords(i), d))
        return acc.reshape(-1)

    def translate_bits(self, bits: np.ndarray, g: Sequence[int]) -> np.ndarray:
        """Indicator of X + g given the indicator of X."""
        g = self.element(g)
        if not any(g):
            return bits.copy()
        grid = bits.reshape(self.shape)
        # one axis at a time: a multi-axis np.roll costs 2^rank slice copies
        for axis, shift in enumerate(g):
            if shift:
                grid = np.roll(grid, shift, axis=axis)
        return np.ascontiguousarray(grid).reshape(-1)

    def negate_bits(self, bits: np.ndarray) -> np.ndarray:
        grid = bits.reshape(self.shape)
        for axis in range(len(self.factors)):
            # x -> -x along one axis: index 0 fixed, the rest reversed
            grid = np.roll(np.flip(grid, axis=axis), 1, axis=axis)
        return np.ascontiguousarray(grid).reshape(-1)


def make_group(factors: Iterable[int], cap: int = DEFAULT_SIZE_CAP) -> FiniteAbelianGroup:
    """Validated constructor enforcing the size cap."""
    factors = [int(d) for d in factors]
    for d in factors:
        if d < 2:
            raise InvalidFactorError(f"cyclic factor must be >= 2, got {d}")
    order = math.prod(factors)
    if order > cap:
        raise SizeCapExceeded(f"group order {order} exceeds cap {cap}")
    return FiniteAbelianGroup(tuple(factors))


def add(g: FiniteAbelianGroup, x, y) -> Element:
    return g.add(x, y)


def negate(g: FiniteAbelianGroup, x) -> Element:
    return g.negate(x)


def rank(g: FiniteAbelianGroup, x) -> int:
    return g.rank(x)


def unrank(g: FiniteAbelianGroup, r: int) -> Element:
    return g.unrank(r)


class GroupSet:
    """A subset of a finite abelian group stored as a rank-indexed bit vector."""

    __slots__ = ("group", "bits")

    def __init__(self, group: FiniteAbelianGroup, bits):
        bits = np.asarray(bits, dtype=bool).reshape(-1)
        if bits.shape[0] != group.order:
            raise GroupMismatchError(
                f"bit vector of length {bits.shape[0]} for group of order {group.order}"
            )
        if bits.flags.writeable:
            bits = bits.copy()
            bits.flags.writeable = False
        self.group = group
        self.bits = bits

    # -- constructors -------------------------------------------------------

    @classmethod
    def empty(cls, group: FiniteAbelianGroup) -> "GroupSet":
        return cls(group, np.zeros(group.order, dtype=bool))

    @classmethod
    def full(cls, group: FiniteAbelianGroup) -> "GroupSet":
        return cls(group, np.ones(group.order, dtype=bool))

    @classmethod
    def from_ranks(cls, group: FiniteAbelianGroup, ranks: Iterable[int]) -> "GroupSet":
        bits = np.zeros(group.order, dtype=bool)
        ranks = np.fromiter((int(r) for r in ranks), dtype=np.int64)
        if ranks.size and (ranks.min() < 0 or ranks.max() >= group.order):
            raise RankError(f"rank out of range for group of order {group.order}")
        bits[ranks] = True
        return cls(group, bits)

    @classmethod
    def from_elements(cls, group: FiniteAbelianGroup, elements: Iterable[Sequence[int]]) -> "GroupSet":
        return cls.from_ranks(group, (group.rank(group.element(x)) for x in elements))

    # -- basic protocol -----------------------------------------------------

    def __len__(self) -> int:
        return int(np.count_nonzero(self.bits))

    def __bool__(self) -> bool:
        return bool(self.bits.any())

    def __contains__(self, x) -> bool:
        return bool(self.bits[self.group.rank(self.group.element(x))])

    def __iter__(self) -> Iterator[Element]:
        for r in self.ranks():
            yield self.group.unrank(int(r))

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupSet):
            return NotImplemented
        return self.group == other.group and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.group, self.bits.tobytes()))

    def __repr__(self) -> str:
        shown = [self.group.unrank(int(r)) for r in self.ranks()[:8]]
        more = ", ..." if len(self) > 8 else ""
        return f"GroupSet({list(self.group.factors)}, {shown}{more})"

    def ranks(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def _same(self, other: "GroupSet") -> None:
        if self.group != other.group:
            raise GroupMismatchError(f"{self.group} vs {other.group}")

    def __or__(self, other: "GroupSet") -> "GroupSet":
        self._same(other)
        return GroupSet(self.group, self.bits | other.bits)

    def __and__(self, other: "GroupSet") -> "GroupSet":
        self._same(other)
        return GroupSet(self.group, self.bits & other.bits)

    def __sub__(self, other: "GroupSet") -> "GroupSet":
        self._same(other)
        return GroupSet(self.group, self.bits & ~other.bits)

    def __invert__(self) -> "GroupSet":
        return GroupSet(self.group, ~self.bits)

    def issubset(self, other: "GroupSet") -> bool:
        self._same(other)
        return not bool((self.bits & ~other.bits).any())

    def isdisjoint(self, other: "GroupSet") -> bool:
        self._same(other)
        return not bool((self.bits & other.bits).any())

    def translate(self, g) -> "GroupSet":
        return GroupSet(self.group, self.group.translate_bits(self.bits, g))

    def negate(self) -> "GroupSet":
        return GroupSet(self.group, self.group.negate_bits(self.bits))

    # -- serialisation ------------------------------------------------------

    def to_json(self, form: str = "ranks") -> dict:
        if form == "bits":
            # bit i of the hex string (MSB first) is rank i
            return {"bits": np.packbits(self.bits).tobytes().hex(), "order": self.group.order}
        return {"ranks": [int(r) for r in self.ranks()]}

    @classmethod
    def from_json(cls, group: FiniteAbelianGroup, data: dict) -> "GroupSet":
        if "ranks" in data:
            return cls.from_ranks(group, data["ranks"])
        if "elements" in data:
            return cls.from_elements(group, data["elements"])
        if "bits" in data:
            raw = np.frombuffer(bytes.fromhex(data["bits"]), dtype=np.uint8)
            bits = np.unpackbits(raw)[: group.order]
            if bits.size != group.order:
                raise GroupMismatchError("hex bit string shorter than group order")
            return cls(group, bits.astype(bool))
        raise GroupMismatchError("set JSON needs one of 'ranks', 'elements', 'bits'")

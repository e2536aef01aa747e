"""Subgroups inside an ambient finite abelian group.

A :class:`Subgroup` is a closed subset of an ambient group together with a
generator list and, optionally, the subgroup it is considered a member of
(``parent``); the index is measured against that parent.  Level groups of an
exhausting sequence are themselves ``Subgroup`` objects of the deepest level,
so "a subgroup of G_n" is just a ``Subgroup`` whose parent is the level.

Index-k subgroups are enumerated as kernels of surjections onto the abelian
groups of order k.  ``enumerate_subgroups`` does the slower breadth-first
join closure and serves as an independent cross-check.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import (
    DescentImpossible,
    EmptySequenceError,
    EnumerationCapExceeded,
    GroupMismatchError,
)
from .group import Element, FiniteAbelianGroup, GroupSet

DEFAULT_ENUMERATION_CAP = 4096


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _join_cyclic(group: FiniteAbelianGroup, span: np.ndarray, g: Element) -> np.ndarray:
    """Indicator of span + <g> for a subgroup indicator ``span``."""
    t = next(t for t in _divisors(group.element_order(g)) if span[group.rank(group.scale(t, g))])
    acc = span
    covered = 1
    while covered < t:
        acc = acc | group.translate_bits(acc, group.scale(covered, g))
        covered *= 2
    return acc


def greedy_generators(group: FiniteAbelianGroup, bits: np.ndarray) -> tuple[Element, ...]:
    """A short generating list for the subgroup with indicator ``bits``.

    Repeatedly takes the element of largest order (lowest rank on ties) not yet
    in the span.  Each step at least doubles the span.
    """
    orders = group.order_table
    span = np.zeros(group.order, dtype=bool)
    span[0] = True
    gens = []
    while True:
        cand = np.flatnonzero(bits & ~span)
        if cand.size == 0:
            return tuple(gens)
        r = int(cand[np.argmax(orders[cand])])
        g = group.unrank(r)
        gens.append(g)
        span = _join_cyclic(group, span, g)


class Subgroup:
    """Subgroup of an ambient group, optionally viewed inside a containing subgroup."""

    __slots__ = ("group", "elements", "generators", "parent")

    def __init__(
        self,
        group: FiniteAbelianGroup,
        elements: GroupSet,
        generators: Sequence[Element],
        parent: Optional["Subgroup"] = None,
    ):
        if elements.group != group:
            raise GroupMismatchError("element set lives in a different group")
        if parent is not None and parent.group != group:
            raise GroupMismatchError("parent lives in a different group")
        self.group = group
        self.elements = elements
        self.generators = tuple(tuple(int(c) for c in g) for g in generators)
        self.parent = parent

    @classmethod
    def from_bits(cls, group, bits, parent=None, generators=None) -> "Subgroup":
        bits = np.asarray(bits, dtype=bool)
        if generators is None:
            generators = greedy_generators(group, bits)
        return cls(group, GroupSet(group, bits), generators, parent)

    @classmethod
    def whole(cls, group: FiniteAbelianGroup) -> "Subgroup":
        gens = [tuple(int(i == j) for j in range(len(group.factors))) for i in range(len(group.factors))]
        return cls(group, GroupSet.full(group), gens)

    @classmethod
    def trivial(cls, group: FiniteAbelianGroup, parent=None) -> "Subgroup":
        bits = np.zeros(group.order, dtype=bool)
        bits[0] = True
        return cls(group, GroupSet(group, bits), (), parent)

    @property
    def bits(self) -> np.ndarray:
        return self.elements.bits

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def parent_order(self) -> int:
        return self.group.order if self.parent is None else self.parent.order

    @property
    def index(self) -> int:
        return self.parent_order // self.order

    def with_parent(self, parent: Optional["Subgroup"]) -> "Subgroup":
        return Subgroup(self.group, self.elements, self.generators, parent)

    def issubset(self, other: "Subgroup") -> bool:
        return self.elements.issubset(other.elements)

    def is_closed(self) -> bool:
        if not self.bits[0]:
            return False
        for g in self.generators:
            if not np.array_equal(self.group.translate_bits(self.bits, g), self.bits):
                return False
        return self.elements == generate_subgroup(self.group, self.generators).elements

    def sort_key(self) -> tuple[int, ...]:
        return tuple(int(r) for r in self.elements.ranks())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, index={self.index}, gens={list(self.generators)})"

    def to_json(self, with_elements: bool = True) -> dict:
        out = {"generators": [list(g) for g in self.generators], "order": self.order, "index": self.index}
        if with_elements:
            out["elements"] = [int(r) for r in self.elements.ranks()]
        return out


GroupLike = Union[FiniteAbelianGroup, Subgroup]


def as_subgroup(parent: GroupLike) -> Subgroup:
    return Subgroup.whole(parent) if isinstance(parent, FiniteAbelianGroup) else parent


def generate_subgroup(group: FiniteAbelianGroup, gens: Iterable[Sequence[int]], parent=None) -> Subgroup:
    """Smallest subgroup containing ``gens``."""
    gens = [group.element(g) for g in gens]
    span = np.zeros(group.order, dtype=bool)
    span[0] = True
    for g in gens:
        span = _join_cyclic(group, span, g)
    return Subgroup(group, GroupSet(group, span), gens, parent)


def intersect(h: Subgroup, l: Subgroup, parent: Optional[Subgroup] = None) -> Subgroup:
    if h.group != l.group:
        raise GroupMismatchError(f"{h.group} vs {l.group}")
    if parent is None and h.parent is not None and h.parent == l.parent:
        parent = h.parent
    return Subgroup.from_bits(h.group, h.bits & l.bits, parent)


def join(h: Subgroup, l: Subgroup, parent: Optional[Subgroup] = None) -> Subgroup:
    if h.group != l.group:
        raise GroupMismatchError(f"{h.group} vs {l.group}")
    span = h.bits
    for g in l.generators:
        span = _join_cyclic(h.group, span, g)
    return Subgroup(h.group, GroupSet(h.group, span), h.generators + l.generators, parent)


def abelian_shapes(n: int) -> list[tuple[int, ...]]:
    """Invariant-factor lists d_1 | d_2 | ... with product n: one per isomorphism type."""

    def rec(rest: int, smallest: int) -> list[tuple[int, ...]]:
        if rest == 1:
            return [()]
        out = []
        for d in _divisors(rest):
            if d >= 2 and d % smallest == 0:
                for tail in rec(rest // d, d):
                    if not tail or tail[0] % d == 0:
                        out.append((d,) + tail)
        return out

    return rec(n, 1)


@dataclass
class IndexFamily:
    """All subgroups of index exactly ``k`` in a level group, in canonical order."""

    level: Optional[int]
    k: int
    members: list[Subgroup] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i) -> Subgroup:
        return self.members[i]


@dataclass
class _Presentation:
    ranks: np.ndarray  # sorted ambient ranks of the subgroup
    gens: tuple[Element, ...]
    gen_orders: list[int]
    bfs: list[tuple[int, int, int]]  # (position, parent position, generator)
    shift: np.ndarray  # shift[e, i] = position of element e + gen i


def _presentation(s: Subgroup) -> _Presentation:
    group = s.group
    ranks = s.elements.ranks()
    gens = greedy_generators(group, s.bits)
    coords = group.unrank_many(ranks)
    shift = np.empty((len(ranks), len(gens)), dtype=np.int64)
    for i, g in enumerate(gens):
        moved = group.rank_many(coords + np.array(g, dtype=np.int64))
        shift[:, i] = np.searchsorted(ranks, moved)
    seen = np.zeros(len(ranks), dtype=bool)
    seen[0] = True
    bfs = []
    frontier = [0]
    while frontier:
        nxt = []
        for e in frontier:
            for i in range(len(gens)):
                f = int(shift[e, i])
                if not seen[f]:
                    seen[f] = True
                    bfs.append((f, e, i))
                    nxt.append(f)
        frontier = nxt
    return _Presentation(ranks, gens, [group.element_order(g) for g in gens], bfs, shift)


def _kernels_onto(pres: _Presentation, shape: tuple[int, ...], chunk_rows: int) -> set[bytes]:
    """Kernels (as packed bit rows over the subgroup's elements) of surjections onto Z_shape."""
    q = FiniteAbelianGroup(shape)
    k = q.order
    qcoords = q.unrank_many(np.arange(k))
    addq = np.empty((k, k), dtype=np.int64)
    for y in range(k):
        addq[:, y] = q.rank_many(qcoords + qcoords[y])
    qorders = q.order_table
    allowed = [np.flatnonzero(o % qorders == 0) for o in pres.gen_orders]
    radices = [len(a) for a in allowed]
    total = math.prod(radices)
    n = len(pres.ranks)
    kernel_size = n // k
    found: set[bytes] = set()
    step = max(1, chunk_rows // max(n, 1))
    for start in range(0, total, step):
        idx = np.arange(start, min(total, start + step), dtype=np.int64)
        digits = np.unravel_index(idx, radices) if radices else ()
        y = np.stack([allowed[i][digits[i]] for i in range(len(allowed))], axis=1)
        phi = np.zeros((len(idx), n), dtype=np.int64)
        for pos, par, gi in pres.bfs:
            phi[:, pos] = addq[phi[:, par], y[:, gi]]
        ok = (phi == 0).sum(axis=1) == kernel_size
        for gi in range(len(pres.gens)):
            if not ok.any():
                break
            ok &= (phi[:, pres.shift[:, gi]] == addq[phi, y[:, gi : gi + 1]]).all(axis=1)
        for row in np.packbits(phi[ok] == 0, axis=1):
            found.add(row.tobytes())
    return found


def subgroups_of_index(
    parent: GroupLike,
    k: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    level: Optional[int] = None,
    chunk_rows: int = 1 << 22,
) -> IndexFamily:
    """Every subgroup of index exactly ``k`` in ``parent``, sorted by element ranks."""
    if k < 1:
        raise ValueError(f"index must be >= 1, got {k}")
    s = as_subgroup(parent)
    if s.order % k:
        return IndexFamily(level, k, [])
    if s.order > cap:
        raise EnumerationCapExceeded(f"subgroup order {s.order} exceeds enumeration cap {cap}")
    if k == 1:
        return IndexFamily(level, k, [s.with_parent(s)])
    pres = _presentation(s)
    group = s.group
    n = len(pres.ranks)
    members = []
    for shape in abelian_shapes(k):
        for packed in _kernels_onto(pres, shape, chunk_rows):
            row = np.unpackbits(np.frombuffer(packed, dtype=np.uint8))[:n].astype(bool)
            bits = np.zeros(group.order, dtype=bool)
            bits[pres.ranks[row]] = True
            members.append(Subgroup.from_bits(group, bits, s))
    members.sort(key=Subgroup.sort_key)
    return IndexFamily(level, k, members)


def enumerate_subgroups(parent: GroupLike, cap: int = 256) -> list[Subgroup]:
    """All subgroups by breadth-first closure under joins with cyclic subgroups."""
    s = as_subgroup(parent)
    if s.order > cap:
        raise EnumerationCapExceeded(f"subgroup order {s.order} exceeds lattice cap {cap}")
    group = s.group
    cyclic = {}
    for r in s.elements.ranks():
        c = generate_subgroup(group, [group.unrank(int(r))], parent=s)
        cyclic.setdefault(c.bits.tobytes(), c)
    start = Subgroup.trivial(group, parent=s)
    seen = {start.bits.tobytes(): start}
    frontier = [start]
    while frontier:
        nxt = []
        for h in frontier:
            for c in cyclic.values():
                if c.issubset(h):
                    continue
                j = join(h, c, parent=s)
                key = j.bits.tobytes()
                if key not in seen:
                    seen[key] = Subgroup.from_bits(group, j.bits, s)
                    nxt.append(seen[key])
        frontier = nxt
    return sorted(seen.values(), key=lambda h: (h.order, h.sort_key()))


def descend_subgroup(l: Subgroup, level_lo: Subgroup, k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Subgroup:
    """Given L of index k in a level, find K inside L and the lower level with index k there.

    K' = L n level_lo has index dividing k in level_lo; K is the first subgroup
    of K' of the complementary index h in canonical order.
    """
    if l.index != k:
        raise ValueError(f"L has index {l.index} in its level, expected {k}")
    if l.group != level_lo.group:
        raise GroupMismatchError("L and the lower level live in different groups")
    if l.parent is not None and not level_lo.issubset(l.parent):
        raise DescentImpossible("lower level is not contained in L's level")
    if level_lo.order % k:
        # no index-k subgroup exists below; the descent needs k | |G_lo|
        raise DescentImpossible(f"k = {k} does not divide the lower level order {level_lo.order}")
    kp = intersect(l, level_lo, parent=level_lo)
    idx = kp.index
    if k % idx:
        raise DescentImpossible(f"[G_lo : L n G_lo] = {idx} does not divide k = {k}")
    h = k // idx
    fam = subgroups_of_index(kp, h, cap=cap)
    return fam.members[0].with_parent(level_lo)


@dataclass
class SubgroupPath:
    """Inclusion-monotone chain, one member of index k per level."""

    levels: list[int]
    chain: list[Subgroup]
    k: int

    def is_monotone(self) -> bool:
        return all(a.issubset(b) for a, b in zip(self.chain, self.chain[1:]))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "levels": self.levels,
            "chain": [h.to_json() for h in self.chain],
        }


def build_path(
    levels: Sequence[Subgroup],
    target: Subgroup,
    k: int,
    labels: Optional[Sequence[int]] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> SubgroupPath:
    """Non-decreasing chain ending at ``target`` built by descending level by level."""
    if not levels:
        raise EmptySequenceError("no levels given")
    labels = list(labels) if labels is not None else list(range(1, len(levels) + 1))
    top = target.with_parent(levels[-1])
    if not target.issubset(levels[-1]):
        raise DescentImpossible("target is not inside the top level")
    if top.index != k:
        raise ValueError(f"target has index {top.index} in the top level, expected {k}")
    chain = [top]
    for lvl in reversed(levels[:-1]):
        chain.insert(0, descend_subgroup(chain[0], lvl, k, cap=cap))
    return SubgroupPath(labels, chain, k)


@dataclass
class LimitResult:
    """Outcome of the finite pigeonhole construction."""

    subgroup: Subgroup
    k: int
    levels: list[int]
    chain: list[Subgroup]
    support: list[int]
    indices: list[tuple[int, int]]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "selected_levels": self.levels,
            "indices": [list(p) for p in self.indices],
            "support": self.support,
            "limit": self.subgroup.to_json(),
            "chain": [h.to_json(with_elements=False) for h in self.chain],
        }


def constant_index_subsequence(indices: Sequence[int]) -> tuple[int, list[int]]:
    """Most frequent index and the positions carrying it (ties: deepest last occurrence)."""
    if not indices:
        raise EmptySequenceError("empty index sequence")
    counts = Counter(indices)
    last = {v: i for i, v in enumerate(indices)}
    k = max(counts, key=lambda v: (counts[v], last[v]))
    return k, [i for i, v in enumerate(indices) if v == k]


def _containment(lo: list[Subgroup], hi: list[Subgroup]) -> np.ndarray:
    a = np.array([h.bits for h in lo], dtype=np.int32)
    b = np.array([~h.bits for h in hi], dtype=np.int32)
    return (a @ b.T) == 0


def limit_subgroup(
    stab_seq: Sequence[tuple[int, Subgroup, Subgroup]],
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> LimitResult:
    """Pigeonhole extraction over (label, level group, stabilizer) triples.

    Keeps the levels whose stabilizer has the most frequent index k, then picks
    K_1, K_2, ... greedily: each K_i contains K_{i-1}, lies on a path to the
    deepest stabilizer, and is the member through which paths to the largest
    number of later stabilizers pass (first in canonical order on ties).
    """
    if not stab_seq:
        raise EmptySequenceError("empty stabilizer sequence")
    indices = [(lab, lvl.order // h.order) for lab, lvl, h in stab_seq]
    k, picked = constant_index_subsequence([i for _, i in indices])
    sel = [stab_seq[i] for i in picked]
    fams = [subgroups_of_index(lvl, k, cap=cap).members for _, lvl, _ in sel]
    m = len(sel)
    targets = []
    for fam, (_, lvl, h) in zip(fams, sel):
        pos = [i for i, c in enumerate(fam) if c == h]
        targets.append(pos[0])
    contain = [_containment(fams[i], fams[i + 1]) for i in range(m - 1)]
    # reach[j][l]: members of level l with a path to H_j
    reach = []
    for j in range(m):
        rows = [None] * (j + 1)
        v = np.zeros(len(fams[j]), dtype=bool)
        v[targets[j]] = True
        rows[j] = v
        for l in range(j - 1, -1, -1):
            rows[l] = (contain[l].astype(np.int32) @ rows[l + 1].astype(np.int32)) > 0
        reach.append(rows)

    def support(l: int, i: int) -> int:
        return sum(1 for j in range(l, m) if reach[j][l][i])

    chain_idx = []
    for l in range(m):
        cands = [i for i in range(len(fams[l])) if reach[m - 1][l][i]]
        if chain_idx:
            prev = chain_idx[-1]
            cands = [i for i in cands if contain[l - 1][prev, i]]
        best = max(cands, key=lambda i: (support(l, i), -i))
        chain_idx.append(best)
    chain = [fams[l][i] for l, i in enumerate(chain_idx)]
    return LimitResult(
        subgroup=chain[-1],
        k=k,
        levels=[lab for lab, _, _ in sel],
        chain=chain,
        support=[support(l, i) for l, i in enumerate(chain_idx)],
        indices=indices,
    )

"""Sumsets, stabilizers, coset counts and quotient projections."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GroupMismatchError
from .group import Element, FiniteAbelianGroup, GroupSet
from .lattice import Subgroup
from .ntt import cyclic_convolve


def _same_group(a: GroupSet, b: GroupSet) -> FiniteAbelianGroup:
    if a.group != b.group:
        raise GroupMismatchError(f"{a.group} vs {b.group}")
    return a.group


def sumset(a: GroupSet, b: GroupSet) -> GroupSet:
    """A + B by translating the larger operand by every element of the smaller."""
    group = _same_group(a, b)
    if len(a) > len(b):
        a, b = b, a
    out = np.zeros(group.order, dtype=bool)
    for r in a.ranks():
        out |= group.translate_bits(b.bits, group.unrank(int(r)))
    return GroupSet(group, out)


def convolution_counts(a: GroupSet, b: GroupSet) -> np.ndarray:
    """r(x) = #{(s, t) in A x B : s + t = x}, exact."""
    group = _same_group(a, b)
    bound = min(len(a), len(b))
    counts = cyclic_convolve(a.bits, b.bits, group.shape, bound)
    return counts.reshape(-1)


# below this many pair operations the translation loop beats three transforms
_FAST_CUTOVER = 1 << 14


def sumset_fast(a: GroupSet, b: GroupSet) -> GroupSet:
    """A + B through an exact number-theoretic convolution of the indicators."""
    group = _same_group(a, b)
    if not a or not b:
        return GroupSet.empty(group)
    if min(len(a), len(b)) == 1:
        (r,) = (a if len(a) == 1 else b).ranks()
        other = b if len(a) == 1 else a
        return other.translate(group.unrank(int(r)))
    if min(len(a), len(b)) * 64 < _FAST_CUTOVER:
        return sumset(a, b)
    return GroupSet(group, convolution_counts(a, b) > 0)


def stabilizer(x: GroupSet) -> Subgroup:
    """Stab(X) = {g : g + X = X}.  Stab of the empty set and of G is G.

    g stabilizes X iff it stabilizes the complement, so the smaller of the two
    is used; g is a period iff |Y n (Y - g)| = |Y|, read off the exact
    autocorrelation of the indicator of Y.
    """
    group = x.group
    y = x if 2 * len(x) <= group.order else ~x
    if not y:
        return Subgroup.whole(group)
    size = len(y)
    if size == 1:
        return Subgroup.trivial(group)
    corr = convolution_counts(y, y.negate())
    return Subgroup.from_bits(group, corr == size)


def stabilizer_naive(x: GroupSet) -> Subgroup:
    """Direct shift test over every group element."""
    group = x.group
    bits = np.zeros(group.order, dtype=bool)
    for r in range(group.order):
        bits[r] = np.array_equal(group.translate_bits(x.bits, group.unrank(r)), x.bits)
    return Subgroup.from_bits(group, bits)


def saturate(x: GroupSet, h: Subgroup) -> GroupSet:
    """X + H."""
    if x.group != h.group:
        raise GroupMismatchError(f"{x.group} vs {h.group}")
    return sumset_fast(x, h.elements)


# -- quotients --------------------------------------------------------------


def smith_normal_form(rows: Sequence[Sequence[int]], ncols: int) -> tuple[list[int], list[list[int]]]:
    """Diagonal of the Smith form of an integer matrix and the column transform V.

    Returns (diag, V) with U * M * V = diag(diag) for some unimodular U.  Only V
    is tracked since the quotient map needs just the column change of basis.
    """
    a = [list(map(int, r)) for r in rows]
    nrows = len(a)
    v = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    diag = []

    def col_op(dst, src, q):
        # column dst -= q * column src
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    for t in range(min(nrows, ncols)):
        while True:
            nz = [(abs(a[i][j]), i, j) for i in range(t, nrows) for j in range(t, ncols) if a[i][j]]
            if not nz:
                return diag, v
            _, pi, pj = min(nz)
            a[t], a[pi] = a[pi], a[t]
            swap_cols(t, pj)
            piv = a[t][t]
            done = True
            for i in range(t + 1, nrows):
                q = a[i][t] // piv
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, ncols):
                q = a[t][j] // piv
                if q:
                    col_op(j, t, q)
                if a[t][j]:
                    done = False
            if not done:
                continue
            bad = [i for i in range(t + 1, nrows) if any(a[i][j] % piv for j in range(t + 1, ncols))]
            if bad:
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
        diag.append(a[t][t])
    return diag, v


@dataclass(frozen=True)
class Quotient:
    """G/H realised as a product of cyclic groups with an explicit projection table."""

    source: FiniteAbelianGroup
    subgroup: Subgroup
    group: FiniteAbelianGroup
    projection: np.ndarray  # ambient rank -> quotient rank

    def project(self, x: GroupSet) -> GroupSet:
        if x.group != self.source:
            raise GroupMismatchError(f"{x.group} vs {self.source}")
        bits = np.zeros(self.group.order, dtype=bool)
        bits[self.projection[x.bits]] = True
        return GroupSet(self.group, bits)

    def project_element(self, x: Sequence[int]) -> Element:
        return self.group.unrank(int(self.projection[self.source.rank(self.source.element(x))]))

    def preimage(self, y: GroupSet) -> GroupSet:
        return GroupSet(self.source, y.bits[self.projection])


def quotient(h: Subgroup) -> Quotient:
    g = h.group
    m = len(g.factors)
    rels = [[d if i == j else 0 for j in range(m)] for i, d in enumerate(g.factors)]
    rels += [list(x) for x in h.generators]
    diag, v = smith_normal_form(rels, m)
    keep = [i for i, s in enumerate(diag) if s > 1]
    qgroup = FiniteAbelianGroup(tuple(diag[i] for i in keep))
    qrank = np.zeros(g.shape, dtype=np.int64)
    for i in keep:
        s = diag[i]
        col = np.zeros(g.shape, dtype=np.int64)
        for ax in range(m):
            c = v[ax][i] % s
            if c:
                col = col + g.axis_coords(ax) * c
        qrank = qrank * s + col % s
    proj = qrank.reshape(-1)
    if not np.array_equal(proj == 0, h.bits):
        raise ArithmeticError("quotient map kernel differs from the subgroup")
    return Quotient(g, h, qgroup, proj)


def project_to_quotient(x: GroupSet, h: Subgroup) -> tuple[GroupSet, Quotient]:
    q = quotient(h)
    return q.project(x), q


@dataclass(frozen=True)
class CosetDecomposition:
    subgroup: Subgroup
    representatives: tuple[Element, ...]

    @property
    def count(self) -> int:
        return len(self.representatives)

    def to_json(self) -> dict:
        return {"count": self.count, "representatives": [list(r) for r in self.representatives]}


def cosets_met(x: GroupSet, h: Subgroup) -> CosetDecomposition:
    """Cosets of H meeting X, each represented by its minimal-rank member of X."""
    if x.group != h.group:
        raise GroupMismatchError(f"{x.group} vs {h.group}")
    q = quotient(h)
    ranks = x.ranks()
    labels = q.projection[ranks]
    _, first = np.unique(labels, return_index=True)
    reps = sorted(int(ranks[i]) for i in first)
    return CosetDecomposition(h, tuple(x.group.unrank(r) for r in reps))

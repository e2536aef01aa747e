"""Kneser's theorem in finite abelian groups: per-pair certificates and exhaustive sweeps.

For nonempty A, B with H = Stab(A+B), Kneser's theorem gives

    |A+B| >= |A+H| + |B+H| - |H|,

with equality whenever |A+B| < |A|+|B|; dividing by |H| this is c = a+b-1 for the
coset counts a, b, c.  H is nontrivial as soon as |A+B| < |A|+|B|-1.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterator

import numpy as np

from .errors import EmptySetError, EnumerationCapExceeded, GroupMismatchError
from .group import FiniteAbelianGroup, GroupSet, make_group
from .lattice import Subgroup
from .sumset import saturate, stabilizer, sumset_fast

DEFAULT_EXHAUSTIVE_CAP = 12


@dataclass(frozen=True)
class KneserCertificate:
    H: Subgroup
    size_a: int
    size_b: int
    size_sum: int
    size_a_h: int
    size_b_h: int
    size_h: int
    a: int
    b: int
    c: int
    small_doubling: bool
    strict_small_doubling: bool
    inequality_ok: bool
    equality_c: bool

    @property
    def nontrivial(self) -> bool:
        return self.size_h > 1

    @property
    def ok(self) -> bool:
        """Everything Kneser's theorem promises for this pair."""
        if not self.inequality_ok:
            return False
        if self.small_doubling and not self.equality_c:
            return False
        if self.strict_small_doubling and not self.nontrivial:
            return False
        return True

    def to_json(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "H"}
        out["H"] = self.H.to_json()
        out["nontrivial"] = self.nontrivial
        out["ok"] = self.ok
        return out


def kneser_check(a: GroupSet, b: GroupSet) -> KneserCertificate:
    if a.group != b.group:
        raise GroupMismatchError(f"{a.group} vs {b.group}")
    if not a or not b:
        raise EmptySetError("Kneser's theorem needs nonempty A and B")
    s = sumset_fast(a, b)
    h = stabilizer(s)
    na, nb, ns, nh = len(a), len(b), len(s), h.order
    nah = len(saturate(a, h))
    nbh = len(saturate(b, h))
    return KneserCertificate(
        H=h,
        size_a=na,
        size_b=nb,
        size_sum=ns,
        size_a_h=nah,
        size_b_h=nbh,
        size_h=nh,
        a=nah // nh,
        b=nbh // nh,
        c=ns // nh,
        small_doubling=ns < na + nb,
        strict_small_doubling=ns < na + nb - 1,
        inequality_ok=ns >= nah + nbh - nh,
        equality_c=ns // nh == nah // nh + nbh // nh - 1,
    )


@dataclass
class ExhaustiveSummary:
    factors: tuple[int, ...]
    pairs: int = 0
    violations: int = 0
    small_doubling: int = 0
    strict_small_doubling: int = 0
    small_doubling_trivial_h: int = 0
    equality_c_failures: int = 0
    trivial_h_failures: int = 0
    extremal: int = 0

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.equality_c_failures == 0 and self.trivial_h_failures == 0

    def to_json(self) -> dict:
        out = asdict(self)
        out["factors"] = list(self.factors)
        out["ok"] = self.ok
        return out

    CSV_COLUMNS = ("group", "pairs", "violations", "small_doubling", "strict_small_doubling",
                   "small_doubling_trivial_h", "equality_c_failures", "trivial_h_failures", "extremal")

    def csv_row(self) -> list:
        return ["x".join(map(str, self.factors)) or "1"] + [getattr(self, c) for c in self.CSV_COLUMNS[1:]]


def _translation_tables(group: FiniteAbelianGroup) -> np.ndarray:
    """trans[g, X] = bitmask of X + g for every bitmask X."""
    n = group.order
    masks = np.arange(1 << n, dtype=np.int64)
    coords = group.unrank_many(np.arange(n))
    trans = np.zeros((n, 1 << n), dtype=np.int64)
    for g in range(n):
        perm = group.rank_many(coords + coords[g])
        acc = np.zeros(1 << n, dtype=np.int64)
        for r in range(n):
            acc |= ((masks >> r) & 1) << int(perm[r])
        trans[g] = acc
    return trans


def kneser_exhaustive(group: FiniteAbelianGroup, cap: int = DEFAULT_EXHAUSTIVE_CAP, rows: int = 256) -> ExhaustiveSummary:
    """Check Kneser's theorem for every pair of nonempty subsets of ``group``.

    All subsets are bitmasks; sums[A, B] is built once by dynamic programming
    over the lowest set bit of A, stabilizers are a lookup table, and every
    certificate quantity is then a vectorised table lookup.
    """
    n = group.order
    if n > cap:
        raise EnumerationCapExceeded(f"exhaustive sweep needs order <= {cap}, got {n}")
    size = 1 << n
    dtype = np.uint16 if n <= 16 else np.uint32
    trans = _translation_tables(group)
    sums = np.zeros((size, size), dtype=dtype)
    for x in range(1, size):
        low = x & -x
        sums[x] = sums[x ^ low] | trans[low.bit_length() - 1].astype(dtype)
    sums[0] = 0
    masks = np.arange(size, dtype=np.int64)
    stab = np.zeros(size, dtype=np.int64)
    for g in range(n):
        stab |= (trans[g] == masks).astype(np.int64) << g
    pc = np.array([bin(x).count("1") for x in range(size)], dtype=np.int64)

    out = ExhaustiveSummary(tuple(group.factors))
    bidx = np.arange(1, size)
    for start in range(1, size, rows):
        aidx = np.arange(start, min(size, start + rows))
        s = sums[aidx][:, 1:].astype(np.int64)
        h = stab[s]
        ns, nh = pc[s], pc[h]
        na = pc[aidx][:, None]
        nb = pc[bidx][None, :]
        nah = pc[sums[aidx[:, None], h]]
        nbh = pc[sums[bidx[None, :], h]]
        rhs = nah + nbh - nh
        small = ns < na + nb
        strict = ns < na + nb - 1
        out.pairs += s.size
        out.violations += int(np.count_nonzero(ns < rhs))
        out.extremal += int(np.count_nonzero(ns == rhs))
        out.small_doubling += int(np.count_nonzero(small))
        out.strict_small_doubling += int(np.count_nonzero(strict))
        out.small_doubling_trivial_h += int(np.count_nonzero(small & (nh == 1)))
        out.equality_c_failures += int(np.count_nonzero(small & (ns != rhs)))
        out.trivial_h_failures += int(np.count_nonzero(strict & (nh == 1)))
    return out


def factor_shapes(max_order: int) -> Iterator[tuple[int, ...]]:
    """Every ordered factor list (factors >= 2) with product <= max_order."""

    def rec(limit: int) -> Iterator[tuple[int, ...]]:
        for d in range(2, limit + 1):
            yield (d,)
            for tail in rec(limit // d):
                yield (d,) + tail

    yield from sorted(rec(max_order), key=lambda f: (math.prod(f), f))


def kneser_exhaustive_all(max_order: int = DEFAULT_EXHAUSTIVE_CAP) -> list[ExhaustiveSummary]:
    return [kneser_exhaustive(make_group(f), cap=max_order) for f in factor_shapes(max_order)]

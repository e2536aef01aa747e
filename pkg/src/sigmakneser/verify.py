"""End-to-end checks of the density theorem and of the two counterexample constructions.

Everything here runs on a truncation G_1 <= ... <= G_N.  Statements about the
infinite group are only ever reported as finite evidence: stationarity of
G_n + H, constancy of density profiles, bit-exact identities at depth N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .density import density_profile, folner_profile, level_counts, lower_upper_estimates, periodic_density
from .errors import GroupMismatchError, HypothesisShapeError, KneserError
from .group import GroupSet
from .kneser import kneser_check
from .lattice import DEFAULT_ENUMERATION_CAP, LimitResult, Subgroup, constant_index_subsequence, limit_subgroup
from .sets import SigmaSet, band_set, shifted_coset_set
from .sigma import SigmaGroupModel, folner_coset_sequence
from .sumset import quotient, saturate, stabilizer, sumset_fast

DEFAULT_TAIL = 3


def _model_of(a: SigmaSet, b: SigmaSet) -> SigmaGroupModel:
    if a.model is not b.model and a.model.ambient != b.model.ambient:
        raise GroupMismatchError("A and B live in different models")
    return a.model


@dataclass
class LevelRow:
    level: int
    size_a: int
    size_b: int
    size_sum: int
    stabilizer: Subgroup
    index: int

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "size_a": self.size_a,
            "size_b": self.size_b,
            "size_sum": self.size_sum,
            "stabilizer_order": self.stabilizer.order,
            "index": self.index,
            "generators": [list(g) for g in self.stabilizer.generators],
        }


def _level_rows(a: SigmaSet, b: SigmaSet) -> list[LevelRow]:
    model = _model_of(a, b)
    rows = []
    for n in range(1, model.depth + 1):
        an, bn = model.restrict(a.bits, n), model.restrict(b.bits, n)
        sn = sumset_fast(an, bn)
        hn = model.extend_subgroup(stabilizer(sn), n)
        rows.append(LevelRow(n, len(an), len(bn), len(sn), hn, hn.index))
    return rows


@dataclass
class SmallDoubling:
    epsilon: Fraction
    levels: list[int]
    strict_levels: list[int]

    def to_json(self) -> dict:
        return {"epsilon": str(self.epsilon), "levels": self.levels, "strict_levels": self.strict_levels}


def _small_doubling(rows: list[LevelRow], epsilon: Fraction) -> SmallDoubling:
    factor = 1 - epsilon / 3
    levels = [r.level for r in rows if r.size_sum < factor * (r.size_a + r.size_b)]
    strict = [r.level for r in rows if r.size_sum < r.size_a + r.size_b - 1]
    return SmallDoubling(epsilon, levels, strict)


def small_doubling_levels(a: SigmaSet, b: SigmaSet, epsilon) -> SmallDoubling:
    """Levels with |A_n+B_n| < (1 - eps/3)(|A_n|+|B_n|), plus those with |A_n+B_n| < |A_n|+|B_n|-1."""
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise KneserError(f"epsilon must lie in (0, 1), got {epsilon}")
    return _small_doubling(_level_rows(a, b), epsilon)


@dataclass
class StabilizerTrace:
    rows: list[LevelRow]
    k: int
    constant_levels: list[int]
    strict_levels: list[int]
    small_doubling: Optional[SmallDoubling] = None

    def triples(self, model: SigmaGroupModel) -> list[tuple[int, Subgroup, Subgroup]]:
        return [(r.level, model.level_group(r.level), r.stabilizer) for r in self.rows]

    def to_json(self) -> dict:
        return {
            "rows": [r.to_json() for r in self.rows],
            "constant_index": self.k,
            "constant_levels": self.constant_levels,
            "strict_small_doubling_levels": self.strict_levels,
            "small_doubling": None if self.small_doubling is None else self.small_doubling.to_json(),
        }


def stabilizer_trace(a: SigmaSet, b: SigmaSet, epsilon=None) -> StabilizerTrace:
    rows = _level_rows(a, b)
    k, pos = constant_index_subsequence([r.index for r in rows])
    strict = [r.level for r in rows if r.size_sum < r.size_a + r.size_b - 1]
    sd = None if epsilon is None else _small_doubling(rows, Fraction(epsilon))
    return StabilizerTrace(rows, k, [rows[i].level for i in pos], strict, sd)


def trace_limit(trace: StabilizerTrace, model: SigmaGroupModel, cap: int = DEFAULT_ENUMERATION_CAP) -> LimitResult:
    return limit_subgroup(trace.triples(model), cap=cap)


# -- density theorem reports ----------------------------------------------------


def _frac(x: Optional[Fraction]) -> Optional[str]:
    return None if x is None else str(x)


@dataclass
class TheoremReport:
    kind: int
    depth: int
    exactness: str
    alpha: Fraction
    beta: Fraction
    sum_density: Fraction
    hypothesis_holds: bool
    epsilon: Optional[Fraction] = None
    H: Optional[Subgroup] = None
    q: Optional[int] = None
    a: Optional[int] = None
    b: Optional[int] = None
    c: Optional[int] = None
    checks: dict = field(default_factory=dict)
    stationary_levels: list = field(default_factory=list)
    h_profile: list = field(default_factory=list)
    trace: Optional[StabilizerTrace] = None
    limit: Optional[LimitResult] = None
    full_sumset: Optional[dict] = None
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.hypothesis_holds and bool(self.checks) and all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "depth": self.depth,
            "exactness": self.exactness,
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "sum_density": str(self.sum_density),
            "hypothesis_holds": self.hypothesis_holds,
            "epsilon": _frac(self.epsilon),
            "H": None if self.H is None else self.H.to_json(with_elements=False),
            "q": self.q,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "checks": self.checks,
            "passed": self.passed,
            "stationary_levels": self.stationary_levels,
            "h_profile": [str(v) for v in self.h_profile],
            "trace": None if self.trace is None else self.trace.to_json(),
            "limit": None if self.limit is None else self.limit.to_json(),
            "full_sumset": self.full_sumset,
            "notes": self.notes,
        }

    def summary(self) -> str:
        lines = [
            f"theorem {self.kind} at depth {self.depth} ({self.exactness} densities)",
            f"  alpha={self.alpha} beta={self.beta} d(A+B)={self.sum_density}",
            f"  hypothesis holds: {self.hypothesis_holds}",
        ]
        if self.hypothesis_holds:
            lines.append(f"  eps={self.epsilon} q={self.q} a={self.a} b={self.b} c={self.c}")
            for name, ok in self.checks.items():
                lines.append(f"  [{'PASS' if ok else 'FAIL'}] {name}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


def _estimates(s: SigmaSet, tail: int):
    return lower_upper_estimates(density_profile(s), tail)


def verify_theorem(kind: int, a: SigmaSet, b: SigmaSet, tail: int = DEFAULT_TAIL, trace: bool = True,
                   cap: int = DEFAULT_ENUMERATION_CAP) -> TheoremReport:
    """Evaluate hypothesis ``kind`` and, when it holds, every conclusion and bound."""
    if kind not in (1, 2, 3):
        raise KneserError(f"kind must be 1, 2 or 3, got {kind}")
    model = _model_of(a, b)
    if kind == 2 and not (a.bits == b.bits or a.bits == b.bits.negate()):
        raise HypothesisShapeError("kind 2 needs A = B or A = -B")
    notes = []
    s_bits = sumset_fast(a.bits, b.bits)
    ea, eb = _estimates(a, tail), _estimates(b, tail)
    pd = periodic_density(model, s_bits)
    if pd is not None:
        s_lower = s_upper = pd.value
        s_exact = True
    else:
        s_est = lower_upper_estimates(density_profile(SigmaSet(model, s_bits)), tail)
        s_lower, s_upper, s_exact = s_est.lower, s_est.upper, False
    if kind == 1:
        alpha, beta, sumd = ea.lower, eb.lower, s_lower
    elif kind == 2:
        alpha, beta, sumd = ea.upper, eb.upper, s_upper
    else:
        alpha, beta, sumd = ea.upper, eb.lower, s_upper
    exact = ea.exactness == "symbolic" and eb.exactness == "symbolic" and s_exact
    exactness = "symbolic" if exact else "empirical"
    if not exact:
        notes.append("empirical-hypothesis: densities are tail estimates at this truncation")
        if kind in (2, 3):
            notes.append("advisory: upper-density hypotheses need genuine limsup information")
    holds = alpha + beta > 0 and sumd < alpha + beta
    report = TheoremReport(kind, model.depth, exactness, alpha, beta, sumd, holds, notes=notes)

    if model.no_finite_index_subgroups:
        full = bool(s_bits.bits.all())
        report.full_sumset = {
            "applies": True,
            "sumset_is_full": full,
            "note": "no proper finite-index subgroup: the conclusion forces A+B = G, "
                    "so the hypothesis can only hold when d(A)+d(B) > 1",
        }
    if trace:
        report.trace = stabilizer_trace(a, b)
    if not holds:
        if alpha + beta == 0:
            notes.append("alpha + beta = 0: hypothesis cannot hold")
        return report

    eps = 1 - sumd / (alpha + beta)
    h = stabilizer(s_bits)
    q = h.index
    report.epsilon, report.H, report.q = eps, h, q
    if report.trace is not None:
        report.trace.small_doubling = _small_doubling(report.trace.rows, eps) if eps < 1 else None

    stat = model.stationary_levels(h)
    witnessed = [n for n in stat if n < model.depth]
    report.stationary_levels = stat
    checks = {}
    checks["finite-index"] = q == 1 or bool(witnessed)
    h_counts = level_counts(model, h.elements)
    report.h_profile = [Fraction(c, g.order) for c, g in zip(h_counts, model.level_groups)]
    checks["density-H-equals-1/q"] = bool(stat) and all(report.h_profile[n - 1] == Fraction(1, q) for n in stat) \
        and (q == 1 or bool(witnessed))
    checks["periodicity"] = saturate(s_bits, h) == s_bits

    quo = quotient(h)
    cq, dq, fq = quo.project(a.bits), quo.project(b.bits), quo.project(s_bits)
    cert = kneser_check(cq, dq)
    ra, rb, rc = len(cq), len(dq), len(fq)
    report.a, report.b, report.c = ra, rb, rc
    checks["projection-commutes"] = sumset_fast(cq, dq) == fq
    checks["quotient-stabilizer-trivial"] = cert.H.order == 1
    checks["c-equality"] = rc == ra + rb - 1
    checks["a+b-bound"] = (ra + rb) * eps <= 1
    checks["q-bound"] = q * (alpha + beta - sumd) <= 1
    if model.no_finite_index_subgroups:
        checks["prufer-full-sumset"] = q == 1 and bool(s_bits.bits.all())
    report.checks = checks

    if report.trace is not None and model.level_groups[-1].order <= cap:
        lim = trace_limit(report.trace, model, cap=cap)
        report.limit = lim
        checks["limit-inside-stabilizer"] = lim.subgroup.issubset(h)
        deepest = model.level_group(lim.levels[-1])
        checks["limit-equals-H-on-deepest-level"] = lim.subgroup.elements == (h.elements & deepest.elements)
    elif report.trace is not None:
        notes.append(f"limit subgroup skipped: level order exceeds enumeration cap {cap}")
    if not exact:
        notes.append("bounds evaluated on estimates; they certify nothing about the infinite group")
    return report


# -- counterexample constructions --------------------------------------------


@dataclass
class CounterexampleReport:
    """``checks`` are the identities exactly as claimed; ``corrected`` are the
    identities that actually hold at truncation (see each builder's docstring)."""

    name: str
    depth: int
    checks: dict
    corrected: dict
    data: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def corrected_passed(self) -> bool:
        return all(self.corrected.values())

    def to_json(self) -> dict:
        return {"name": self.name, "depth": self.depth, "checks": self.checks, "passed": self.passed,
                "corrected": self.corrected, "corrected_passed": self.corrected_passed, **self.data}

    def summary(self) -> str:
        lines = [f"{self.name} at depth {self.depth}", "  as claimed:"]
        lines += [f"    [{'PASS' if ok else 'FAIL'}] {k}" for k, ok in self.checks.items()]
        lines.append("  corrected:")
        lines += [f"    [{'PASS' if ok else 'FAIL'}] {k}" for k, ok in self.corrected.items()]
        lines += [f"  note: {n}" for n in self.data.get("notes", [])]
        return "\n".join(lines)


def _band(model: SigmaGroupModel, n: int, base: str) -> np.ndarray:
    return model.level_group(n).bits & ~model.level_group(n - 1, base=base).bits


def verify_band_counterexample(model: SigmaGroupModel, base: str = "trivial") -> CounterexampleReport:
    """Even/odd band sets A, B and the claims A+B = A u B = G minus G_0, Stab(A+B) = G_0.

    A sum a+b with a, b in different bands lies in the higher of the two bands,
    so the lowest band G_1 minus G_0 is never reached: what holds is
    A+B = G minus G_1 and Stab(A+B) = G_1, still a finite subgroup.
    """
    notes = []
    orders = [g.order for g in model.level_groups]
    ratios = [Fraction(hi, lo) for lo, hi in zip(orders, orders[1:])]
    if not all(r2 > r1 for r1, r2 in zip(ratios, ratios[1:])):
        notes.append("level ratios |G_{n+1}|/|G_n| are not increasing")
    amb = model.ambient
    A, B = band_set(model, "even", base), band_set(model, "odd", base)
    g0 = model.level_group(0, base=base)
    g1 = model.level_group(1)
    s = sumset_fast(A.bits, B.bits)
    union = A.bits | B.bits
    st = stabilizer(s)
    missing = union - s
    lowest = GroupSet(amb, _band(model, 1, base))

    pairs = []
    ingredient_ok = True
    for n in range(2, model.depth + 1):
        bn = model.restrict(GroupSet(amb, _band(model, n, base)), n)
        for m in range(1, n):
            bm = model.restrict(GroupSet(amb, _band(model, m, base)), n)
            if not bm:
                continue
            ok = sumset_fast(bn, bm) == bn
            pairs.append([n, m, ok])
            ingredient_ok &= ok

    trace = stabilizer_trace(A, B)
    profiles = {name: density_profile(x) for name, x in (("A", A), ("B", B), ("A+B", SigmaSet(model, s)))}
    even = list(range(2, model.depth + 1, 2))
    odd = list(range(1, model.depth + 1, 2))

    def rising(prof, levels):
        vals = [prof.values[n - 1] for n in levels]
        return all(y > x for x, y in zip(vals, vals[1:]))

    checks = {
        "union-is-complement-of-G0": union == ~g0.elements,
        "sum-equals-union": s == union,
        "stabilizer-is-G0": st.elements == g0.elements,
        "ingredient-identity": ingredient_ok and bool(pairs),
    }
    corrected = {
        "sum-equals-complement-of-G1": s == ~g1.elements,
        "missing-part-is-lowest-band": missing == lowest,
        "stabilizer-is-G1": st.elements == g1.elements,
        "trace-index-grows": all(y.index > x.index for x, y in zip(trace.rows[1:], trace.rows[2:])),
        "upper-profiles-rise-on-bands": rising(profiles["A"], even) and rising(profiles["B"], odd)
        and rising(profiles["A+B"], list(range(1, model.depth + 1))),
    }
    if missing:
        notes.append(f"A+B misses {len(missing)} elements of A u B"
                     + ("; they are exactly G_1 minus G_0" if missing == lowest else ""))
    data = {
        "base": base,
        "level_orders": orders,
        "ratios": [str(r) for r in ratios],
        "sizes": {"A": len(A), "B": len(B), "A+B": len(s), "A|B": len(union), "G0": g0.order},
        "stabilizer_order": st.order,
        "missing_from_sum": len(missing),
        "ingredient_pairs": pairs,
        "trace_indices": [r.index for r in trace.rows],
        "profiles": {k: [str(v) for v in p.values] for k, p in profiles.items()},
        "symbolic_upper": {"A": _frac(A.upper), "B": _frac(B.upper)},
        "notes": notes,
    }
    return CounterexampleReport("band counterexample", model.depth, checks, corrected, data)


def verify_shifted_counterexample(model: SigmaGroupModel, start: int = 0, base: str = "trivial",
                                  dichotomy_cap: int = 1 << 12) -> CounterexampleReport:
    """A = union of x_n + G_n and the claims A+A = union of {x_n, 2x_n} + G_n,
    A n -A empty, Stab(A+A) = G_0, Følner density 1 for A and A+A along x_n + G_n.

    The first block x_s + G_s (s = start) only meets itself inside A+A, giving
    2x_s + G_s; nothing else lands in G_{s+1}.  So x_s + G_s is missing from
    A+A and the coset profile of A+A is 0 at the first term, 1 afterwards.
    """
    amb = model.ambient
    A, wl = shifted_coset_set(model, start=start, base=base)
    s = sumset_fast(A.bits, A.bits)
    expected = np.zeros(amb.order, dtype=bool)
    blocks = []
    for n, x in zip(wl.levels(), wl.witnesses):
        gn = model.level_group(n, base=base).bits
        blk = amb.translate_bits(gn, x) | amb.translate_bits(gn, amb.scale(2, x))
        blocks.append(blk)
        expected |= blk
    first = amb.translate_bits(model.level_group(wl.levels()[0], base=base).bits, wl.witnesses[0])
    g0 = model.level_group(0, base=base)
    gs = model.level_group(start, base=base)
    st = stabilizer(s)
    seq = folner_coset_sequence(model, wl.witnesses, wl.levels(), base=base)
    fa = folner_profile(A, seq)
    fs = folner_profile(SigmaSet(model, s), seq)

    checks = {
        "sumset-identity": bool(np.array_equal(s.bits, expected)),
        "A-disjoint-from-minus-A": A.bits.isdisjoint(A.bits.negate()),
        "G0-inside-stabilizer": g0.issubset(st),
        "stabilizer-is-G0": st.elements == g0.elements,
        "folner-A-all-ones": fa.all_ones(),
        "folner-A+A-all-ones": fs.all_ones(),
    }
    corrected = {
        "witness-certificates": all(c[0] and c[1] for c in wl.certificates),
        "sumset-identity-minus-first-block": bool(np.array_equal(s.bits, expected & ~first)),
        f"stabilizer-is-G{start}": st.elements == gs.elements,
        "folner-A+A-ones-after-first-term": fs.values[0] == 0 and all(v == 1 for v in fs.values[1:]),
    }
    notes = []
    if amb.order <= dichotomy_cap:
        # every x in G_{k+1} minus G_k moves the block {x_k, 2x_k} + G_k off A+A
        ok = True
        for k, blk in zip(wl.levels(), blocks):
            band = model.level_group(k + 1).bits & ~model.level_group(k, base=base).bits
            for r in np.flatnonzero(band):
                moved = amb.translate_bits(blk, amb.unrank(int(r)))
                if not (moved & ~s.bits).any():
                    ok = False
        corrected["shift-dichotomy"] = ok
    else:
        notes.append(f"shift-dichotomy skipped above ambient order {dichotomy_cap}")
    if start == 1:
        notes.append("start=1 omits x_0 + G_0, so A+A is a union of G_1-cosets")
    data = {
        "start": start,
        "base": base,
        "witnesses": wl.to_json()["witnesses"],
        "sizes": {"A": len(A), "A+A": len(s), "G0": g0.order},
        "stabilizer_order": st.order,
        "missing_from_sum": int(np.count_nonzero(expected & ~s.bits)),
        "folner_A": [str(v) for v in fa.values],
        "folner_A+A": [str(v) for v in fs.values],
        "notes": notes,
    }
    return CounterexampleReport("shifted-coset counterexample", model.depth, checks, corrected, data)

"""Command line entry point: ``sigmakneser <command> ...``.

Exit codes: 0 success (and every applicable check passed), 1 a check failed,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Callable, Optional

from . import __version__
from .density import density_profile, folner_profile, lower_upper_estimates
from .errors import KneserError
from .group import make_group
from .kneser import ExhaustiveSummary, factor_shapes, kneser_check, kneser_exhaustive
from .lattice import DEFAULT_ENUMERATION_CAP, enumerate_subgroups, subgroups_of_index
from .sets import RNG_NAME, shifted_coset_set
from .sigma import folner_coset_sequence, make_family
from .specs import load_json, parse_factors, parse_group, parse_group_set, parse_model, parse_set
from .sumset import stabilizer, sumset, sumset_fast
from .verify import (
    DEFAULT_TAIL,
    stabilizer_trace,
    trace_limit,
    verify_band_counterexample,
    verify_shifted_counterexample,
    verify_theorem,
)

COMMANDS = ("group", "lattice", "sumset", "stab", "kneser", "kneser-exhaustive", "family", "build-set",
            "density", "folner", "trace", "verify", "counterexample-band", "counterexample-shifted")


@dataclass
class RunConfig:
    command: str
    output: Optional[str]
    fmt: str
    seed: int
    tail: int
    enum_cap: int
    exhaustive_cap: int


@dataclass
class Outcome:
    payload: dict
    text: str
    rows: Optional[list[list]] = None
    ok: bool = True


# -- helpers -------------------------------------------------------------------


def _finite_group(args):
    if args.factors:
        return make_group(parse_factors(args.factors))
    if args.group:
        return parse_group(args.group)
    raise KneserError("give --factors or --group")


def _model(args):
    if getattr(args, "group", None):
        return parse_model(args.group)
    if getattr(args, "family", None):
        params = load_json(args.params) if args.params else {}
        return make_family(args.family, params, args.depth)
    raise KneserError("give --group (family spec) or --family")


def _kv_rows(d: dict) -> list[list]:
    return [["key", "value"]] + [[k, json.dumps(v) if isinstance(v, (dict, list)) else v] for k, v in d.items()]


# -- commands ------------------------------------------------------------------


def cmd_group(args, cfg) -> Outcome:
    g = _finite_group(args)
    out = {"factors": list(g.factors), "order": g.order, "exponent": int(g.order_table.max()) if g.order else 1}
    if args.rank:
        x = g.element(parse_factors(args.rank))
        out["rank"] = {"element": list(x), "rank": g.rank(x), "order": g.element_order(x)}
    if args.unrank is not None:
        out["unrank"] = {"rank": args.unrank, "element": list(g.unrank(args.unrank))}
    text = f"group {g} of order {g.order}, exponent {out['exponent']}"
    return Outcome(out, text)


def cmd_lattice(args, cfg) -> Outcome:
    g = _finite_group(args)
    if args.index is None:
        subs = enumerate_subgroups(g, cap=cfg.enum_cap)
        subs.sort(key=lambda h: (h.order, h.sort_key()))
    else:
        subs = subgroups_of_index(g, args.index, cap=cfg.enum_cap).members
    out = {"factors": list(g.factors), "index": args.index, "count": len(subs),
           "subgroups": [h.to_json() for h in subs]}
    rows = [["order", "index", "generators", "elements"]] + [
        [h.order, h.index, json.dumps([list(x) for x in h.generators]), " ".join(map(str, h.elements.ranks()))]
        for h in subs
    ]
    text = "\n".join([f"{len(subs)} subgroups"] + [f"  {h!r}" for h in subs])
    return Outcome(out, text, rows)


def cmd_sumset(args, cfg) -> Outcome:
    g = _finite_group(args)
    a, b = parse_group_set(args.a, g), parse_group_set(args.b, g)
    s = sumset(a, b) if args.naive else sumset_fast(a, b)
    out = {"factors": list(g.factors), "size_a": len(a), "size_b": len(b), "size": len(s), **s.to_json()}
    rows = [["rank", "element"]] + [[int(r), " ".join(map(str, g.unrank(int(r))))] for r in s.ranks()]
    return Outcome(out, f"|A+B| = {len(s)}: {[int(r) for r in s.ranks()]}", rows)


def cmd_stab(args, cfg) -> Outcome:
    g = _finite_group(args)
    x = parse_group_set(args.x, g)
    h = stabilizer(x)
    out = {"factors": list(g.factors), "size": len(x), "stabilizer": h.to_json()}
    return Outcome(out, f"Stab(X) has order {h.order} (index {h.index}), generators {list(h.generators)}",
                   _kv_rows({"order": h.order, "index": h.index}))


def cmd_kneser(args, cfg) -> Outcome:
    g = _finite_group(args)
    cert = kneser_check(parse_group_set(args.a, g), parse_group_set(args.b, g))
    out = cert.to_json()
    text = (f"|A|={cert.size_a} |B|={cert.size_b} |A+B|={cert.size_sum} |H|={cert.size_h}\n"
            f"a={cert.a} b={cert.b} c={cert.c} inequality {'ok' if cert.inequality_ok else 'VIOLATED'}"
            f"{' small doubling' if cert.small_doubling else ''}")
    return Outcome(out, text, _kv_rows({k: v for k, v in out.items() if k != "H"}), cert.ok)


def cmd_kneser_exhaustive(args, cfg) -> Outcome:
    if args.factors:
        shapes = [tuple(parse_factors(args.factors))]
    else:
        shapes = list(factor_shapes(args.max_order))
    sums = [kneser_exhaustive(make_group(f), cap=cfg.exhaustive_cap) for f in shapes]
    ok = all(s.ok for s in sums)
    out = {"groups": [s.to_json() for s in sums], "ok": ok,
           "pairs": sum(s.pairs for s in sums), "violations": sum(s.violations for s in sums)}
    rows = [list(ExhaustiveSummary.CSV_COLUMNS)] + [s.csv_row() for s in sums]
    lines = [f"{'x'.join(map(str, s.factors))}: {s.pairs} pairs, {s.violations} violations, "
             f"{s.small_doubling} small-doubling ({s.small_doubling_trivial_h} with trivial H), "
             f"{s.equality_c_failures} c-equality failures" for s in sums]
    return Outcome(out, "\n".join(lines), rows, ok)


def cmd_family(args, cfg) -> Outcome:
    m = _model(args)
    out = m.to_json()
    out["level_embeddings"] = [m.embedding_table(n) for n in range(1, m.depth + 1)] if args.embeddings else None
    rows = [["level", "order", "factors"]] + [[n, g.order, "x".join(map(str, g.factors)) or "1"]
                                              for n, g in enumerate(m.level_groups, start=1)]
    text = f"{m.family} depth {m.depth}: level orders {[g.order for g in m.level_groups]}"
    return Outcome(out, text, rows)


def cmd_build_set(args, cfg) -> Outcome:
    m = _model(args)
    s = parse_set(args.set, m, seed=cfg.seed)
    out = {"model": m.to_json(), "set": s.to_json()}
    rows = [["rank"]] + [[int(r)] for r in s.bits.ranks()]
    return Outcome(out, f"{s.kind} set of size {len(s)} ({s.exactness} density) {s.note}", rows)


def cmd_density(args, cfg) -> Outcome:
    m = _model(args)
    s = parse_set(args.set, m, seed=cfg.seed)
    p = density_profile(s)
    est = lower_upper_estimates(p, cfg.tail)
    out = {"profile": p.to_json(), "estimate": est.to_json()}
    rows = [["level", "numerator", "denominator"]] + [list(r) for r in p.csv_rows()]
    text = "\n".join([f"level {n}: {v}" for n, v in zip(p.levels, p.values)]
                     + [f"lower {est.lower} upper {est.upper} ({est.exactness}, tail {est.window})"])
    return Outcome(out, text, rows)


def cmd_folner(args, cfg) -> Outcome:
    m = _model(args)
    s = parse_set(args.set, m, seed=cfg.seed)
    if args.witnesses:
        wits = load_json(args.witnesses)
        levels = load_json(args.levels) if args.levels else None
        base = "trivial"
    else:
        _, wl = shifted_coset_set(m, start=args.start, base=args.base)
        wits, levels, base = wl.witnesses, wl.levels(), args.base
    seq = folner_coset_sequence(m, wits, levels, base=base)
    fp = folner_profile(s, seq)
    out = {"profile": fp.to_json(), "all_ones": fp.all_ones(), "witnesses": [list(map(int, w)) for w in wits]}
    rows = [["level", "numerator", "denominator"]] + [
        [n, v.numerator, v.denominator] for n, v in zip(fp.levels, fp.values)]
    text = "\n".join(f"x_{n} + G_{n}: {v}" for n, v in zip(fp.levels, fp.values))
    return Outcome(out, text, rows)


def cmd_trace(args, cfg) -> Outcome:
    m = _model(args)
    a, b = parse_set(args.a, m, seed=cfg.seed), parse_set(args.b, m, seed=cfg.seed + 1)
    tr = stabilizer_trace(a, b, epsilon=args.epsilon)
    out = {"trace": tr.to_json()}
    if args.limit:
        out["limit"] = trace_limit(tr, m, cap=cfg.enum_cap).to_json()
    rows = [["level", "size_a", "size_b", "size_sum", "stabilizer_order", "index"]] + [
        [r.level, r.size_a, r.size_b, r.size_sum, r.stabilizer.order, r.index] for r in tr.rows]
    text = "\n".join([f"level {r.level}: |A+B|={r.size_sum} |H_n|={r.stabilizer.order} k_n={r.index}"
                      for r in tr.rows] + [f"constant index {tr.k} on levels {tr.constant_levels}"])
    return Outcome(out, text, rows)


def cmd_verify(args, cfg) -> Outcome:
    m = _model(args)
    a = parse_set(args.a, m, seed=cfg.seed)
    b = parse_set(args.b, m, seed=cfg.seed + 1) if args.b else a
    rep = verify_theorem(args.kind, a, b, tail=cfg.tail, trace=not args.no_trace, cap=cfg.enum_cap)
    out = rep.to_json()
    rows = [["check", "passed"]] + [[k, v] for k, v in rep.checks.items()]
    return Outcome(out, rep.summary(), rows, rep.passed)


def _counterexample(rep) -> Outcome:
    rows = [["check", "group", "passed"]] + [[k, "claimed", v] for k, v in rep.checks.items()] + [
        [k, "corrected", v] for k, v in rep.corrected.items()]
    return Outcome(rep.to_json(), rep.summary(), rows, rep.passed)


def cmd_band(args, cfg) -> Outcome:
    m = _model(args) if (args.group or args.family) else make_family("growing-product", {"c": 1}, args.depth or 6)
    return _counterexample(verify_band_counterexample(m, base=args.base))


def cmd_shifted(args, cfg) -> Outcome:
    m = _model(args) if (args.group or args.family) else make_family("polynomial", {"p": 3, "r": 1}, args.depth or 5)
    return _counterexample(verify_shifted_counterexample(m, start=args.start, base=args.base))


HANDLERS: dict[str, Callable] = {
    "group": cmd_group,
    "lattice": cmd_lattice,
    "sumset": cmd_sumset,
    "stab": cmd_stab,
    "kneser": cmd_kneser,
    "kneser-exhaustive": cmd_kneser_exhaustive,
    "family": cmd_family,
    "build-set": cmd_build_set,
    "density": cmd_density,
    "folner": cmd_folner,
    "trace": cmd_trace,
    "verify": cmd_verify,
    "counterexample-band": cmd_band,
    "counterexample-shifted": cmd_shifted,
}


# -- parser --------------------------------------------------------------------


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tail", type=_positive, default=DEFAULT_TAIL, help="tail window for density estimates")
    common.add_argument("--enum-cap", type=_positive, default=DEFAULT_ENUMERATION_CAP)
    common.add_argument("--exhaustive-cap", type=_positive, default=12)

    finite = argparse.ArgumentParser(add_help=False)
    finite.add_argument("--factors", help="cyclic factors, e.g. 2,4")
    finite.add_argument("--group", help="group spec (file or inline JSON)")

    sigma = argparse.ArgumentParser(add_help=False)
    sigma.add_argument("--group", help="family spec (file or inline JSON)")
    sigma.add_argument("--family", help="family name, with --params and --depth")
    sigma.add_argument("--params", help="family parameters as JSON")
    sigma.add_argument("--depth", type=_positive)

    p = argparse.ArgumentParser(prog="sigmakneser", description="Kneser-type density checks in truncated σ-finite abelian groups")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("group", parents=[common, finite], help="group order, rank/unrank")
    s.add_argument("--rank", help="element to rank, e.g. 1,3")
    s.add_argument("--unrank", type=int)

    s = sub.add_parser("lattice", parents=[common, finite], help="subgroups (of a given index)")
    s.add_argument("--index", type=_positive)

    for name, hlp in (("sumset", "A+B"), ("kneser", "Kneser certificate for (A, B)")):
        s = sub.add_parser(name, parents=[common, finite], help=hlp)
        s.add_argument("--a", required=True)
        s.add_argument("--b", required=True)
        if name == "sumset":
            s.add_argument("--naive", action="store_true", help="use the translation loop")

    s = sub.add_parser("stab", parents=[common, finite], help="stabilizer of X")
    s.add_argument("--x", required=True)

    s = sub.add_parser("kneser-exhaustive", parents=[common], help="all pairs in small groups")
    s.add_argument("--factors")
    s.add_argument("--max-order", type=_positive, default=12)

    s = sub.add_parser("family", parents=[common, sigma], help="describe a truncated σ-finite model")
    s.add_argument("--embeddings", action="store_true")

    for name, hlp in (("build-set", "materialize a set spec"), ("density", "level density profile of a set"),
                      ("folner", "density along coset Følner sequences")):
        s = sub.add_parser(name, parents=[common, sigma], help=hlp)
        s.add_argument("--set", required=True)
        if name == "folner":
            s.add_argument("--witnesses", help="JSON list of coset shifts x_n (default: shifted-set witnesses)")
            s.add_argument("--levels", help="JSON list of levels paired with the witnesses")
            s.add_argument("--start", type=int, default=0, choices=(0, 1))
            s.add_argument("--base", default="trivial", choices=("trivial", "level1"))

    s = sub.add_parser("trace", parents=[common, sigma], help="per-level stabilizers of A_n + B_n")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--epsilon", help="also list small-doubling levels for this epsilon")
    s.add_argument("--limit", action="store_true", help="run the pigeonhole limit construction")

    s = sub.add_parser("verify", parents=[common, sigma], help="theorem checks on (A, B)")
    s.add_argument("--kind", type=int, choices=(1, 2, 3), default=1)
    s.add_argument("--a", required=True)
    s.add_argument("--b", help="defaults to A")
    s.add_argument("--no-trace", action="store_true")

    s = sub.add_parser("counterexample-band", parents=[common, sigma], help="even/odd band sets")
    s.add_argument("--base", default="trivial", choices=("trivial", "level1"))

    s = sub.add_parser("counterexample-shifted", parents=[common, sigma], help="shifted coset set")
    s.add_argument("--start", type=int, default=0, choices=(0, 1))
    s.add_argument("--base", default="trivial", choices=("trivial", "level1"))
    return p


def _render(cfg: RunConfig, out: Outcome) -> str:
    if cfg.fmt == "json":
        doc = {"command": cfg.command, "version": __version__, "seed": cfg.seed, "rng": RNG_NAME,
               "ok": out.ok, "result": out.payload}
        return json.dumps(doc, indent=2) + "\n"
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerows(out.rows if out.rows is not None else _kv_rows(out.payload))
        return buf.getvalue()
    return f"{out.text}\nseed={cfg.seed} result={'ok' if out.ok else 'FAILED'}\n"


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    cfg = RunConfig(args.command, args.output, args.format, args.seed, args.tail, args.enum_cap, args.exhaustive_cap)
    try:
        out = HANDLERS[args.command](args, cfg)
    except KneserError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except KeyError as e:
        print(f"error: missing field {e}", file=sys.stderr)
        return 2
    text = _render(cfg, out)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if out.ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

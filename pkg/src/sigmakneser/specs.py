"""JSON specs for groups, σ-finite models and sets.

Group      {"factors": [2, 4]}
Family     {"family": "product", "params": {"blocks": [[5], [2], [2]]}, "depth": 3}
Set        {"kind": "periodic", "subgroup": {...}, "reps": [[0, 0, 0], [1, 0, 0]]}
           {"kind": "band", "parity": "even", "base": "trivial"}
           {"kind": "shifted", "start": 0, "base": "trivial"}
           {"kind": "random", "density": "1/3", "seed": 0}
           {"kind": "explicit", "levels": {"1": [0, 1]}, "ranks": [7]}
           {"kind": "level", "level": 2}
Subgroup   {"generators": [[0, 1, 0]]}, {"axes": [1, 2]} or {"level": 1}
Plain set  [3, 5] (ranks), [[0, 1], [1, 1]] (elements), or {"ranks"|"elements"|"bits": ...}

Every string argument is either a path to a JSON file or inline JSON.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction
from typing import Any, Union

from .errors import SpecError
from .group import FiniteAbelianGroup, GroupSet, make_group
from .lattice import Subgroup, generate_subgroup
from .sets import SigmaSet, band_set, explicit_set, periodic_set, random_set, shifted_coset_set
from .sigma import SigmaGroupModel, make_family


def parse_json(text: str, source: str = "<inline>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        err = SpecError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}")
        err.line, err.column = e.lineno, e.colno
        raise err from None


def load_json(arg: Union[str, dict, list]) -> Any:
    """Parse ``arg`` as a file path if one exists, else as inline JSON."""
    if not isinstance(arg, str):
        return arg
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return parse_json(fh.read(), arg)
    return parse_json(arg)


def parse_factors(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace("x", ",").split(",") if t.strip()]
    except ValueError:
        raise SpecError(f"factors must be comma separated integers, got {text!r}") from None


def _require(obj: dict, key: str, what: str):
    if key not in obj:
        raise SpecError(f"{what} spec needs a {key!r} field")
    return obj[key]


def parse_group(spec) -> FiniteAbelianGroup:
    spec = load_json(spec)
    if isinstance(spec, list):
        return make_group(spec)
    if isinstance(spec, dict):
        return make_group(_require(spec, "factors", "group"), cap=spec.get("cap", 1 << 24))
    raise SpecError("group spec must be a list of factors or an object with 'factors'")


def parse_model(spec) -> SigmaGroupModel:
    """Family spec; a plain group spec becomes a depth-1 product model."""
    spec = load_json(spec)
    if isinstance(spec, dict) and "family" in spec:
        kwargs = {"cap": spec["cap"]} if "cap" in spec else {}
        return make_family(spec["family"], spec.get("params", {}), spec.get("depth"), **kwargs)
    g = parse_group(spec)
    return make_family("product", {"blocks": [list(g.factors)]})


def parse_group_set(spec, group: FiniteAbelianGroup) -> GroupSet:
    spec = load_json(spec)
    if isinstance(spec, list):
        if all(isinstance(x, int) for x in spec):
            return GroupSet.from_ranks(group, spec)
        return GroupSet.from_elements(group, spec)
    if isinstance(spec, dict):
        return GroupSet.from_json(group, spec)
    raise SpecError("set spec must be a list or an object")


def parse_subgroup(spec, model: SigmaGroupModel) -> Subgroup:
    spec = load_json(spec)
    amb = model.ambient
    if not isinstance(spec, dict):
        raise SpecError("subgroup spec must be an object")
    if "level" in spec:
        return model.level_group(int(spec["level"]))
    if "axes" in spec:
        gens = [tuple(int(i == a) for i in range(amb.rank_count)) for a in spec["axes"]]
        return generate_subgroup(amb, gens)
    if "generators" in spec:
        return generate_subgroup(amb, spec["generators"])
    raise SpecError("subgroup spec needs 'generators', 'axes' or 'level'")


def parse_set(spec, model: SigmaGroupModel, seed: int = 0) -> SigmaSet:
    spec = load_json(spec)
    if isinstance(spec, list) or (isinstance(spec, dict) and "kind" not in spec):
        return SigmaSet(model, parse_group_set(spec, model.ambient))
    kind = spec["kind"]
    if kind == "periodic":
        h = parse_subgroup(_require(spec, "subgroup", "periodic set"), model)
        return periodic_set(model, h, _require(spec, "reps", "periodic set"))
    if kind == "band":
        return band_set(model, _require(spec, "parity", "band set"), spec.get("base", "trivial"))
    if kind == "shifted":
        return shifted_coset_set(model, int(spec.get("start", 0)), spec.get("base", "trivial"))[0]
    if kind == "random":
        density = spec.get("density", "1/2")
        density = Fraction(density) if isinstance(density, (str, int)) else density
        return random_set(model, density, int(spec.get("seed", seed)))
    if kind == "explicit":
        return explicit_set(model, spec.get("levels"), spec.get("ranks", ()))
    if kind == "level":
        lvl = model.level_group(int(_require(spec, "level", "level set")))
        d = Fraction(1) if lvl.order == model.ambient.order else None
        return SigmaSet(model, lvl.elements, d, d, "level subgroup", "level")
    raise SpecError(f"unknown set kind {kind!r}")

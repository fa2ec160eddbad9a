"""Run configuration: JSON schema, validation and conversion to library objects."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import jsonschema

from .construction import Construction, ConstructionParams, LevelSet, union
from .errors import ConfigError

_INT = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^-?[0-9]+$"}]}
_RATIONAL = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"}]}
_INT_LIST = {"type": "array", "items": _INT, "minItems": 1}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


_PART = _obj({"set": {"type": "string"}, "k": _INT}, ["set", "k"])
_FACTOR = _obj({"set": {"type": "string"}, "shift": _INT, "k": _INT}, ["set", "shift", "k"])

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "sidon-poisson run configuration",
    **_obj({
        "params": _obj({
            "base_width": _RATIONAL,
            "rule": {"oneOf": [
                _obj({"kind": {"const": "paper_sidon"}, "d": _INT}, ["kind", "d"]),
                _obj({"kind": {"const": "explicit"},
                      "stages": {"type": "array", "minItems": 1, "items": _obj({"r": _INT, "s": _INT_LIST}, ["r", "s"])}},
                     ["kind", "stages"]),
            ]},
        }, ["rule"]),
        "precision": {"type": "integer", "minimum": 1, "maximum": 1000},
        "seed": _INT,
        "stage_cap": {"type": "integer", "minimum": 1},
        "budget_floors": _INT,
        "sets": {"type": "object", "additionalProperties": {"oneOf": [
            _obj({"tower": _INT}, ["tower"]),
            _obj({"column": {"type": "array", "items": _INT, "minItems": 2, "maxItems": 2}}, ["column"]),
            _obj({"stage": _INT, "ranges": {"type": "array", "items": {
                "type": "array", "items": _INT, "minItems": 2, "maxItems": 2}}}, ["stage", "ranges"]),
            _obj({"union": {"type": "array", "items": {"type": "string"}, "minItems": 1}}, ["union"]),
        ]}},
        "stages": _obj({"to": _INT}, ["to"]),
        "sidon": _obj({"j": _INT_LIST, "budget": _INT, "random": _INT}, ["j"]),
        "theorem3": _obj({"set": {"type": "string"}, "j": _INT_LIST,
                          "directions": {"type": "array", "items": {"enum": ["forward", "inverse"]}, "minItems": 1}},
                         ["set", "j"]),
        "asymmetry": _obj({"set": {"type": "string"}, "j": _INT_LIST}, ["set", "j"]),
        "mixing": _obj({
            "a": {"type": "string"}, "b": {"type": "string"}, "n": _INT_LIST,
            "range": _obj({"start": _INT, "stop": _INT, "step": _INT}, ["start", "stop"]),
        }, ["a", "b"]),
        "poisson_exact": _obj({
            "cylinders": {"type": "array", "items": _obj(
                {"name": {"type": "string"}, "parts": {"type": "array", "items": _PART}}, ["name", "parts"])},
            "joints": {"type": "array", "items": _obj(
                {"name": {"type": "string"}, "factors": {"type": "array", "items": _FACTOR, "minItems": 1}},
                ["name", "factors"])},
            "gaps": {"type": "array", "items": _obj(
                {"name": {"type": "string"}, "c": {"type": "array", "items": _PART},
                 "c_prime": {"type": "array", "items": _PART}, "n": _INT_LIST},
                ["name", "c", "c_prime", "n"])},
        }),
        "poisson_mc": _obj({"runs": {"type": "array", "minItems": 1, "items": _obj(
            {"name": {"type": "string"}, "factors": {"type": "array", "items": _FACTOR, "minItems": 1},
             "samples": _INT, "workers": {"type": "integer", "minimum": 1}},
            ["name", "factors", "samples"])}}, ["runs"]),
        "oracle_check": _obj({"set_stage": _INT, "random_sets": _INT, "max_shift": _INT,
                              "sidon_j": _INT_LIST}, ["set_stage"]),
    }, ["params"]),
}


def to_int(v) -> int:
    return int(v)


def to_fraction(v) -> Fraction:
    return Fraction(v)


def params_from_json(block: dict) -> ConstructionParams:
    rule = block["rule"]
    base = to_fraction(block.get("base_width", 1))
    if rule["kind"] == "paper_sidon":
        return ConstructionParams.paper(to_int(rule["d"]), base)
    return ConstructionParams.explicit(
        [(to_int(st["r"]), tuple(to_int(s) for s in st["s"])) for st in rule["stages"]], base)


def params_to_json(params: ConstructionParams) -> dict:
    from .construction import PaperSidon
    rule = params.rule
    if isinstance(rule, PaperSidon):
        r = {"kind": "paper_sidon", "d": str(rule.d)}
    else:
        r = {"kind": "explicit", "stages": [{"r": str(a), "s": [str(x) for x in s]} for a, s in rule.stages]}
    return {"base_width": str(params.base_width), "rule": r}


def level_set_to_json(A: LevelSet) -> dict:
    return {"stage": str(A.stage), "ranges": [[str(a), str(b)] for a, b in A.ranges]}


@dataclass
class RunConfig:
    raw: dict
    params: ConstructionParams
    precision: int = 12
    seed: int = 0
    stage_cap: int = 12
    budget_floors: int = 10**5
    _sets: dict[str, LevelSet] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        try:
            jsonschema.validate(raw, SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"config invalid at {where}: {exc.message}") from exc
        try:
            params = params_from_json(raw["params"])
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(str(exc)) from exc
        return cls(
            raw=raw, params=params,
            precision=raw.get("precision", 12),
            seed=to_int(raw.get("seed", 0)),
            stage_cap=raw.get("stage_cap", 12),
            budget_floors=to_int(raw.get("budget_floors", 10**5)),
        )

    def construction(self) -> Construction:
        return Construction(self.params, stage_cap=self.stage_cap)

    def resolve_set(self, con: Construction, name: str, _stack=()) -> LevelSet:
        if name in self._sets:
            return self._sets[name]
        m = re.fullmatch(r"X(\d+)", name)
        defs = self.raw.get("sets", {})
        if name not in defs:
            if m:
                return con.tower(int(m.group(1)))
            raise ConfigError(f"unknown set {name!r}")
        if name in _stack:
            raise ConfigError(f"set {name!r} is defined in terms of itself")
        d = defs[name]
        try:
            if "tower" in d:
                A = con.tower(to_int(d["tower"]))
            elif "column" in d:
                A = con.column(to_int(d["column"][0]), to_int(d["column"][1]))
            elif "ranges" in d:
                A = con.level_set(to_int(d["stage"]), [(to_int(a), to_int(b)) for a, b in d["ranges"]])
            else:
                parts = [self.resolve_set(con, p, _stack + (name,)) for p in d["union"]]
                K = max(p.stage for p in parts)
                A = con.lift(parts[0], K)
                for p in parts[1:]:
                    A = union(A, con.lift(p, K))
        except ValueError as exc:
            raise ConfigError(f"set {name!r}: {exc}") from exc
        self._sets[name] = A
        return A


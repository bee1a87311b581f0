"""Scenario files (JSON), report serialisation and CSV output."""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from .errors import DomainError
from .fan_construction import FanSubsolution
from .lifted_algebra import State
from .young_measures import TwoAtomYM

SUPPORTED_MAJOR = 1
CURRENT_VERSION = "1.0.0"
FAN_FIELDS = FanSubsolution.FIELDS

_number = {"type": "number"}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "entries"],
    "properties": {
        "version": {"type": "string", "pattern": r"^\d+\.\d+\.\d+$"},
        "seed": {"type": "integer"},
        "description": {"type": "string"},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["type", "id"],
                "properties": {
                    "type": {"enum": ["fan", "state", "ym", "experiment"]},
                    "id": {"type": "string", "minLength": 1},
                },
                "allOf": [
                    {"if": {"properties": {"type": {"const": "fan"}}},
                     "then": {"required": list(FAN_FIELDS),
                              "properties": {k: _number for k in FAN_FIELDS}}},
                    {"if": {"properties": {"type": {"const": "state"}}},
                     "then": {"required": ["rho", "u"],
                              "properties": {"rho": _number,
                                             "u": {"type": "array", "items": _number,
                                                   "minItems": 2, "maxItems": 2}}}},
                    {"if": {"properties": {"type": {"const": "ym"}}},
                     "then": {"required": ["lambda", "atom_a", "atom_b"],
                              "properties": {"lambda": _number, "gamma": _number,
                                             "atom_a": {"type": "string"},
                                             "atom_b": {"type": "string"}}}},
                    {"if": {"properties": {"type": {"const": "experiment"}}},
                     "then": {"required": ["kind"],
                              "properties": {"kind": {"enum": ["rigidity", "interval"]},
                                             "params": {"type": "object"}}}},
                ],
            },
        },
    },
}


class ScenarioError(ValueError):
    """Invalid scenario; ``problems`` lists every issue found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class Scenario:
    version: str = CURRENT_VERSION
    entries: list = field(default_factory=list)
    seed: int = 0
    description: str = ""

    def by_id(self):
        return {e["id"]: e for e in self.entries}

    def of_type(self, kind):
        return [e for e in self.entries if e["type"] == kind]

    def to_dict(self):
        out = {"version": self.version}
        if self.description:
            out["description"] = self.description
        out["seed"] = self.seed
        out["entries"] = self.entries
        return out

    def atom(self, ref):
        e = self.by_id()[ref]
        if e["type"] == "fan":
            return FanSubsolution(*(float(e[k]) for k in FAN_FIELDS))
        return State(float(e["rho"]), tuple(float(v) for v in e["u"]))

    def build_ym(self, entry):
        """TwoAtomYM for a ym entry; DomainError messages name the entry id."""
        try:
            return TwoAtomYM(float(entry["lambda"]), self.atom(entry["atom_a"]),
                             self.atom(entry["atom_b"]), float(entry.get("gamma", 2.0)))
        except DomainError as exc:
            raise DomainError(f"ym '{entry['id']}': {exc}") from None


def _path(err):
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def _nonfinite(obj, where=""):
    if isinstance(obj, float) and not math.isfinite(obj):
        yield where or "<root>"
    elif isinstance(obj, dict):
        for k, v in obj.items():
            yield from _nonfinite(v, f"{where}/{k}" if where else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _nonfinite(v, f"{where}/{i}" if where else str(i))


def validate(data):
    """All problems with a scenario document, schema and semantic."""
    problems = []
    validator = jsonschema.Draft202012Validator(SCHEMA)
    for err in sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path))):
        problems.append(f"{_path(err)}: {err.message}")
    problems += [f"{p}: number is not finite" for p in _nonfinite(data)]
    if not isinstance(data, dict):
        return problems
    version = data.get("version")
    if isinstance(version, str) and version.split(".")[0].isdigit():
        if int(version.split(".")[0]) != SUPPORTED_MAJOR:
            problems.append(f"version: unsupported major version in {version!r}")
    entries = data.get("entries") if isinstance(data.get("entries"), list) else []
    seen = {}
    for i, e in enumerate(entries):
        if not isinstance(e, dict) or not isinstance(e.get("id"), str):
            continue
        if e["id"] in seen:
            problems.append(f"entries/{i}: duplicate id {e['id']!r} (first at entries/{seen[e['id']]})")
        else:
            seen[e["id"]] = i
    kinds = {e.get("id"): e.get("type") for e in entries if isinstance(e, dict)}
    for i, e in enumerate(entries):
        if not isinstance(e, dict) or e.get("type") != "ym":
            continue
        for slot in ("atom_a", "atom_b"):
            ref = e.get(slot)
            if isinstance(ref, str) and kinds.get(ref) not in ("fan", "state"):
                problems.append(f"entries/{i}/{slot}: {ref!r} is not a fan or state id")
    return problems


def from_dict(data):
    problems = validate(data)
    if problems:
        raise ScenarioError(problems)
    return Scenario(data["version"], list(data["entries"]), int(data.get("seed", 0)),
                    data.get("description", ""))


def loads(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"line {exc.lineno} column {exc.colno}: {exc.msg}"]) from None
    return from_dict(data)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def bundled(name="paper_witness.json"):
    return loads(resources.files("eulerwave").joinpath("data", name).read_text(encoding="utf-8"))


def _plain(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def dumps(obj):
    """JSON with shortest round-trip float repr and a trailing newline."""
    return json.dumps(obj, indent=2, allow_nan=False, default=_plain) + "\n"


def dump_scenario(scenario):
    return dumps(scenario.to_dict())


def fan_entry(ident, f):
    return {"type": "fan", "id": ident, **{k: float(getattr(f, k)) for k in FAN_FIELDS}}


def format_float(x):
    return "%.17g" % x


def write_csv(path_or_buffer, header, rows):
    """CSV with floats at 17 significant digits."""
    def cell(v):
        return format_float(v) if isinstance(v, float) else v

    if isinstance(path_or_buffer, io.TextIOBase):
        out = path_or_buffer
        close = False
    else:
        out = open(path_or_buffer, "w", newline="", encoding="utf-8")
        close = True
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([cell(v) for v in r])
    finally:
        if close:
            out.close()

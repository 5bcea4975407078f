"""JSON manifests: schema, exact number encoding and descriptor construction.

Rationals travel as ``"p/q"`` strings and infinity as ``"inf"`` so that
exact values survive a round trip.  Named entries refer to each other by
name; every reference is resolved before anything is evaluated.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import jsonschema

from .core import (
    INF,
    AlternatingWitness,
    DivergentWitness,
    FiniteSupport,
    Geometric,
    PartitionOfOne,
    PointSequence,
    is_inf,
    points,
)
from .errors import ScvxError
from .giry import FinMeasurableSpace, Measure, MeasurableFn
from .spaces import (
    MAX_WINS,
    MIN_WINS,
    SJ,
    AffineScaleShift,
    Constant,
    Disc,
    EvalSet,
    FinDist,
    InfUnitInterval,
    OrbitThreshold,
    Product,
    RInfSpace,
    SemiDirect,
    Space,
    Threshold,
    space_from_name,
)

SCHEMA_VERSION = "1"


class ManifestError(ScvxError):
    def __init__(self, message, path=()):
        self.path = "/".join(str(p) for p in path) or "/"
        super().__init__(f"{self.path}: {message}")


class ParseError(ManifestError):
    pass


class ValidationError(ManifestError):
    pass


_number = {
    "anyOf": [
        {"type": "number"},
        {"type": "string", "pattern": r"^(inf|-?\d+(/\d+)?)$"},
    ]
}
_name = {"type": "string", "minLength": 1}
_space_ref = {"oneOf": [_name, {"$ref": "#/$defs/space"}]}

SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "scvx manifest",
    "type": "object",
    "required": ["version"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": SCHEMA_VERSION},
        "measurable": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["carrier"],
                "additionalProperties": False,
                "properties": {
                    "carrier": {"type": "array", "items": {"type": ["string", "integer"]}, "minItems": 1},
                    "atoms": {"type": "array", "items": {"type": "array"}},
                },
            },
        },
        "spaces": {"type": "object", "additionalProperties": _space_ref},
        "measures": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["X", "weights"],
                "additionalProperties": False,
                "properties": {"X": _name, "weights": {"$ref": "#/$defs/pairs"}},
            },
        },
        "functions": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["X", "values"],
                "additionalProperties": False,
                "properties": {"X": _name, "values": {"$ref": "#/$defs/pairs"}},
            },
        },
        "maps": {"type": "object", "additionalProperties": {"$ref": "#/$defs/map"}},
        "mixtures": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["space", "alpha", "points"],
                "additionalProperties": False,
                "properties": {
                    "space": _space_ref,
                    "alpha": {"$ref": "#/$defs/alpha"},
                    "points": {"$ref": "#/$defs/sequence"},
                },
            },
        },
        "barycenters": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["space", "weights"],
                "additionalProperties": False,
                "properties": {"space": _space_ref, "weights": {"$ref": "#/$defs/pairs"}},
            },
        },
        "rules": {
            "type": "object",
            "additionalProperties": {
                "oneOf": [
                    {
                        "type": "object",
                        "required": ["type", "space"],
                        "additionalProperties": False,
                        "properties": {
                            "type": {"const": "barycenter"},
                            "space": _space_ref,
                            "carrier": {"type": "array"},
                        },
                    },
                    {
                        "type": "object",
                        "required": ["type", "X", "entries"],
                        "additionalProperties": False,
                        "properties": {
                            "type": {"const": "table"},
                            "X": _name,
                            "entries": {
                                "type": "array",
                                "items": {"type": "array", "prefixItems": [_name, {}], "minItems": 2, "maxItems": 2},
                            },
                        },
                    },
                ]
            },
        },
    },
    "$defs": {
        "number": _number,
        "pairs": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}},
        "space": {
            "type": "object",
            "required": ["type"],
            "properties": {
                "type": {"enum": ["rinf", "disc", "semidirect", "product", "infunit", "sj", "findist"]},
                "n": {"type": "integer", "minimum": 1},
                "j": {"type": "integer", "minimum": 1},
                "orbit_order": {"enum": [MAX_WINS, MIN_WINS]},
                "factors": {"type": "array", "minItems": 1, "items": _space_ref},
                "X": _name,
            },
            "additionalProperties": False,
        },
        "alpha": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["finite"],
                    "additionalProperties": False,
                    "properties": {"finite": {"type": "array", "items": _number, "minItems": 1}},
                },
                {
                    "type": "object",
                    "required": ["geometric"],
                    "additionalProperties": False,
                    "properties": {"geometric": _number},
                },
            ]
        },
        "sequence": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["values"],
                    "additionalProperties": False,
                    "properties": {"values": {"type": "array", "minItems": 1}, "tail": {}},
                },
                {
                    "type": "object",
                    "required": ["divergent"],
                    "additionalProperties": False,
                    "properties": {"divergent": _number},
                },
                {
                    "type": "object",
                    "required": ["alternating"],
                    "additionalProperties": False,
                    "properties": {"alternating": _number},
                },
            ]
        },
        "map": {
            "type": "object",
            "required": ["type"],
            "additionalProperties": False,
            "properties": {
                "type": {"enum": ["affine", "constant", "threshold", "orbit-threshold", "eval-set"]},
                "space": _space_ref,
                "scale": _number,
                "shift": _number,
                "reflect": {"type": "boolean"},
                "c": _number,
                "n": {"type": "integer", "minimum": 1},
                "t": {"type": "integer", "minimum": 0},
                "inner": {"$ref": "#/$defs/map"},
                "X": _name,
                "set": {"type": "array"},
            },
        },
    },
}


# -- numbers --------------------------------------------------------------------


def decode_number(v, path=()):
    if isinstance(v, bool):
        raise ValidationError(f"expected a number, got {v!r}", path)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        if v != v or v == -INF:
            raise ValidationError(f"{v!r} is not a value of (-inf, inf]", path)
        return v
    if isinstance(v, str):
        if v == "inf":
            return INF
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"{v!r} is not a rational 'p/q'", path) from None
    raise ValidationError(f"expected a number, got {v!r}", path)


def encode(v) -> Any:
    """JSON-ready form of any value the library produces."""
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        return "inf" if is_inf(v) else v
    if isinstance(v, str):
        return v
    if isinstance(v, (tuple, list)):
        return [encode(x) for x in v]
    if isinstance(v, Measure):
        return {"weights": [[encode(x), encode(w)] for x, w in v.weights]}
    if isinstance(v, FiniteSupport):
        return {"finite": {str(i): encode(w) for i, w in v.entries}}
    if isinstance(v, Geometric):
        return {"geometric": encode(v.ratio)}
    if isinstance(v, dict):
        return {str(k): encode(x) for k, x in v.items()}
    if isinstance(v, (frozenset, set)):
        return sorted((encode(x) for x in v), key=repr)
    return repr(v)


def dumps(obj) -> str:
    return json.dumps(encode(obj), sort_keys=True, separators=(",", ":"))


# -- construction ---------------------------------------------------------------


class Manifest:
    """A validated manifest with all names resolved."""

    def __init__(self, data: dict):
        try:
            jsonschema.validate(data, SCHEMA)
        except jsonschema.ValidationError as e:
            raise ValidationError(e.message, ("",) + tuple(e.absolute_path)) from None
        self.data = data
        self.measurable = {}
        for name, entry in data.get("measurable", {}).items():
            path = ("", "measurable", name)
            carrier = entry["carrier"]
            if len(set(carrier)) != len(carrier):
                raise ValidationError("carrier labels repeat", path)
            try:
                if "atoms" in entry:
                    X = FinMeasurableSpace(tuple(carrier), frozenset(frozenset(a) for a in entry["atoms"]))
                else:
                    X = FinMeasurableSpace.discrete(carrier)
            except (ScvxError, ValueError) as e:
                raise ValidationError(str(e), path) from None
            self.measurable[name] = X
        self.measures = {
            name: self._measure(entry["X"], entry["weights"], ("", "measures", name))
            for name, entry in data.get("measures", {}).items()
        }
        self.spaces = {}
        for name, entry in data.get("spaces", {}).items():
            self.spaces[name] = self.space(entry, ("", "spaces", name))
        self.functions = {
            name: self._function(entry, ("", "functions", name))
            for name, entry in data.get("functions", {}).items()
        }
        self.maps = {name: self.map(entry, ("", "maps", name)) for name, entry in data.get("maps", {}).items()}
        self.mixtures = {
            name: self._mixture(entry, ("", "mixtures", name)) for name, entry in data.get("mixtures", {}).items()
        }
        self.barycenters = {
            name: self._barycenter(entry, ("", "barycenters", name))
            for name, entry in data.get("barycenters", {}).items()
        }
        self.rules = {name: self._rule(entry, ("", "rules", name)) for name, entry in data.get("rules", {}).items()}

    @classmethod
    def load(cls, path) -> "Manifest":
        try:
            with open(path, encoding="utf-8") as f:
                data = json.load(f)
        except OSError as e:
            raise ParseError(str(e)) from None
        except json.JSONDecodeError as e:
            raise ParseError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
        return cls(data)

    def _X(self, name, path):
        if name not in self.measurable:
            raise ValidationError(f"unknown measurable space {name!r}", path)
        return self.measurable[name]

    def _measure(self, xname, pairs, path):
        X = self._X(xname, path + ("X",))
        weights = {}
        for k, (label, w) in enumerate(pairs):
            weights[label] = weights.get(label, 0) + decode_number(w, path + ("weights", k))
        try:
            return Measure(X, weights)
        except (ScvxError, ValueError) as e:
            raise ValidationError(str(e), path) from None

    def _function(self, entry, path):
        X = self._X(entry["X"], path + ("X",))
        table = {label: decode_number(v, path + ("values", k)) for k, (label, v) in enumerate(entry["values"])}
        missing = [x for x in X.carrier if x not in table]
        if missing:
            raise ValidationError(f"no value for {missing[0]!r}", path + ("values",))
        try:
            return MeasurableFn(X, table)
        except ScvxError as e:
            raise ValidationError(str(e), path) from None

    def space(self, ref, path) -> Space:
        if isinstance(ref, str):
            if ref in self.spaces:
                return self.spaces[ref]
            try:
                return space_from_name(ref)
            except ValueError:
                raise ValidationError(f"unknown space {ref!r}", path) from None
        kind = ref["type"]
        try:
            if kind == "rinf":
                return RInfSpace()
            if kind == "infunit":
                return InfUnitInterval()
            if kind == "disc":
                return Disc(ref["n"])
            if kind == "sj":
                return SJ(ref["j"])
            if kind == "semidirect":
                return SemiDirect(ref["n"], ref.get("orbit_order", MAX_WINS))
            if kind == "product":
                return Product(self.space(f, path + ("factors", k)) for k, f in enumerate(ref["factors"]))
            if kind == "findist":
                return FinDist(self._X(ref.get("X", ""), path + ("X",)))
        except KeyError as e:
            raise ValidationError(f"{kind} needs field {e.args[0]!r}", path) from None
        raise ValidationError(f"unknown space type {kind!r}", path)

    def point(self, space: Space, v, path):
        if isinstance(space, FinDist):
            if v not in self.measures:
                raise ValidationError(f"unknown measure {v!r}", path)
            P = self.measures[v]
            if P.space != space.X:
                raise ValidationError(f"measure {v!r} lives on another space", path)
            return P
        if isinstance(space, Disc):
            p = v
        elif isinstance(space, (RInfSpace, InfUnitInterval)):
            p = decode_number(v, path)
        elif isinstance(space, SemiDirect):
            if not (isinstance(v, list) and len(v) == 2):
                raise ValidationError("expected [r, orbit]", path)
            p = (decode_number(v[0], path + (0,)), v[1])
        elif isinstance(space, SJ):
            p = INF if v == "inf" else tuple(decode_number(x, path + (k,)) for k, x in enumerate(v))
        elif isinstance(space, Product):
            if not (isinstance(v, list) and len(v) == len(space.factors)):
                raise ValidationError(f"expected {len(space.factors)} coordinates", path)
            p = tuple(self.point(f, x, path + (k,)) for k, (f, x) in enumerate(zip(space.factors, v)))
        else:
            p = v
        if not space.contains(p):
            raise ValidationError(f"{v!r} is not a point of {space}", path)
        return p

    def alpha(self, entry, path) -> PartitionOfOne:
        try:
            if "finite" in entry:
                return FiniteSupport.of(*(decode_number(w, path + ("finite", k)) for k, w in enumerate(entry["finite"])))
            return Geometric(decode_number(entry["geometric"], path + ("geometric",)))
        except (ScvxError, ValueError) as e:
            if isinstance(e, ValidationError):
                raise
            raise ValidationError(str(e), path) from None

    def sequence(self, space, entry, path) -> PointSequence:
        if "divergent" in entry or "alternating" in entry:
            if not isinstance(space, RInfSpace):
                raise ValidationError("witness sequences live in rinf", path)
            if "divergent" in entry:
                return DivergentWitness(decode_number(entry["divergent"], path + ("divergent",)))
            return AlternatingWitness(decode_number(entry["alternating"], path + ("alternating",)))
        values = [self.point(space, v, path + ("values", k)) for k, v in enumerate(entry["values"])]
        tail = self.point(space, entry["tail"], path + ("tail",)) if "tail" in entry else None
        return points(*values, tail=tail)

    def _mixture(self, entry, path):
        space = self.space(entry["space"], path + ("space",))
        return space, self.alpha(entry["alpha"], path + ("alpha",)), self.sequence(space, entry["points"], path + ("points",))

    def _barycenter(self, entry, path):
        space = self.space(entry["space"], path + ("space",))
        weights = {}
        for k, (p, w) in enumerate(entry["weights"]):
            x = self.point(space, p, path + ("weights", k, 0))
            weights[x] = weights.get(x, 0) + decode_number(w, path + ("weights", k, 1))
        return space, weights

    def map(self, entry, path):
        kind = entry["type"]
        try:
            if kind == "affine":
                return AffineScaleShift(
                    decode_number(entry.get("scale", 1), path + ("scale",)),
                    decode_number(entry.get("shift", 0), path + ("shift",)),
                    entry.get("reflect", False),
                )
            if kind == "constant":
                return Constant(self.space(entry.get("space", "rinf"), path + ("space",)), decode_number(entry["c"], path + ("c",)))
            if kind == "threshold":
                return Threshold(entry["n"], entry["t"], decode_number(entry.get("c", 0), path + ("c",)))
            if kind == "orbit-threshold":
                space = self.space(entry["space"], path + ("space",))
                inner = self.map(entry["inner"], path + ("inner",)) if "inner" in entry else AffineScaleShift()
                return OrbitThreshold(space, entry["t"], inner)
            if kind == "eval-set":
                return EvalSet(self._X(entry["X"], path + ("X",)), frozenset(entry["set"]))
        except KeyError as e:
            raise ValidationError(f"{kind} needs field {e.args[0]!r}", path) from None
        except ValidationError:
            raise
        except (ScvxError, ValueError, TypeError) as e:
            raise ValidationError(str(e), path) from None
        raise ValidationError(f"unknown map type {kind!r}", path)

    def _rule(self, entry, path):
        from .algebra import BarycenterOf, Table

        if entry["type"] == "barycenter":
            space = self.space(entry["space"], path + ("space",))
            carrier = None
            if "carrier" in entry:
                carrier = [self.point(space, v, path + ("carrier", k)) for k, v in enumerate(entry["carrier"])]
            try:
                return BarycenterOf.on(space, carrier)
            except ScvxError as e:
                raise ValidationError(str(e), path) from None
        X = self._X(entry["X"], path + ("X",))
        table = {}
        for k, (mname, label) in enumerate(entry["entries"]):
            if mname not in self.measures or self.measures[mname].space != X:
                raise ValidationError(f"unknown measure {mname!r} on {entry['X']!r}", path + ("entries", k, 0))
            table[self.measures[mname]] = label
        try:
            return Table(X, table, name=path[-1])
        except ValueError as e:
            raise ValidationError(str(e), path) from None

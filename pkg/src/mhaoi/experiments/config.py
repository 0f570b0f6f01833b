"""JSON experiment configuration: schema, validation and normalisation.

A config names one or more scenarios (generated or explicit), one or more
policies, simulation settings and an output directory::

    {
      "name": "star-demo",
      "scenario": {"generator": "broadcast_star", "params": {"N": 5, "seed": 3}},
      "policies": [{"name": "max_weight"},
                   {"name": "age_debt", "alpha_from": "max_weight"}],
      "simulation": {"horizon": 100000, "replications": 10, "seed": 1},
      "output": "results/star"
    }

``scenario``/``scenarios`` and ``policy``/``policies`` are interchangeable
(single entry or list). Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from ..policies import available_policies
from .scenarios import SCENARIOS

_NUM = {"type": "number"}
_INT = {"type": "integer"}
_NODES = {"type": "array", "items": {"type": "integer", "minimum": 1}}

_COST = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["linear", "power", "exponential", "indicator", "table"]},
        "weight": _NUM, "exponent": _NUM, "scale": _NUM, "base": _NUM,
        "threshold": _INT, "values": {"type": "array", "items": _NUM},
        "cap": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_EDGE = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "u": {"type": "integer", "minimum": 1},
                "v": {"type": "integer", "minimum": 1},
                "gamma": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            },
            "required": ["u", "v"],
            "additionalProperties": False,
        },
        {
            "type": "array",
            "prefixItems": [{"type": "integer", "minimum": 1}, {"type": "integer", "minimum": 1},
                            {"type": "number", "exclusiveMinimum": 0, "maximum": 1}],
            "minItems": 2,
            "maxItems": 3,
        },
    ]
}

_TRANSMISSION = {
    "oneOf": [
        {"type": "object",
         "properties": {"from": _INT, "to": _INT, "flow": _INT},
         "required": ["from", "to", "flow"], "additionalProperties": False},
        {"type": "array", "items": _INT, "minItems": 3, "maxItems": 3},
    ]
}

_INTERFERENCE = {
    "oneOf": [
        {"enum": ["single_transmitter", "line_odd_even"]},
        {
            "type": "object",
            "properties": {
                "model": {"enum": ["single_transmitter", "line_odd_even", "explicit"]},
                "node_broadcast": {"type": "boolean"},
                "actions": {"type": "array", "items": {"type": "array", "items": _TRANSMISSION}},
            },
            "required": ["model"],
            "additionalProperties": False,
        },
    ]
}

_FLOW = {
    "type": "object",
    "properties": {
        "source": {"type": "integer", "minimum": 1},
        "destinations": {**_NODES, "minItems": 1},
        "commissioned": _NODES,
        "kind": {"enum": ["unicast", "multicast", "broadcast"]},
        "weights": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
        "costs": {"type": "object", "additionalProperties": _COST},
        "path": {"type": "array", "items": {"type": "array", "items": _INT, "minItems": 2, "maxItems": 2}},
    },
    "required": ["source", "destinations"],
    "additionalProperties": False,
}

_SCENARIO = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "id": {"type": "string"},
                "generator": {"enum": list(SCENARIOS)},
                "params": {
                    "type": "object",
                    "properties": {
                        "N": {"oneOf": [{"type": "integer", "minimum": 1},
                                        {"type": "array", "items": {"type": "integer", "minimum": 1}}]},
                        "seed": _INT,
                        "gamma": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                        "gammas": {"type": "array",
                                   "items": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}},
                        "gamma_range": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
                        "cap": {"type": "number", "exclusiveMinimum": 0},
                        "fixed_path": {"type": "boolean"},
                        "index": {"type": "integer", "minimum": 0},
                        "edges": {"type": "array", "items": {"type": "array", "items": _INT,
                                                             "minItems": 2, "maxItems": 2}},
                        "node_weights": {"type": "object",
                                         "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
                        "node_broadcast": {"type": "boolean"},
                    },
                    "required": ["N"],
                    "additionalProperties": False,
                },
            },
            "required": ["generator", "params"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "id": {"type": "string"},
                "topology": {
                    "type": "object",
                    "properties": {"nodes": {"type": "integer", "minimum": 1},
                                   "edges": {"type": "array", "items": _EDGE}},
                    "required": ["nodes", "edges"],
                    "additionalProperties": False,
                },
                "flows": {"type": "array", "items": _FLOW, "minItems": 1},
                "interference": _INTERFERENCE,
            },
            "required": ["topology", "flows"],
            "additionalProperties": False,
        },
    ]
}

_POLICY = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "label": {"type": "string"},
        "params": {"type": "object"},
        "alpha_from": {"type": "string"},
        "targets_file": {"type": "string"},
    },
    "required": ["name"],
    "additionalProperties": False,
}

_SIMULATION = {
    "type": "object",
    "properties": {
        "horizon": {"type": "integer", "minimum": 1},
        "burn_in": {"type": "integer", "minimum": 0},
        "replications": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "observable_channels": {"type": "boolean"},
        "record_trajectory": {"type": "boolean"},
    },
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "scenario": _SCENARIO,
        "scenarios": {"type": "array", "items": _SCENARIO, "minItems": 1},
        "policy": _POLICY,
        "policies": {"type": "array", "items": _POLICY, "minItems": 1},
        "simulation": _SIMULATION,
        "output": {"type": "string"},
        "baseline": {"type": "string"},
        "replication_seeds": {"type": "array", "items": {"type": "integer"}},
        "oracle": {
            "type": "object",
            "properties": {"a_max": {"type": "integer", "minimum": 2},
                           "tolerance": {"type": "number", "exclusiveMinimum": 0},
                           "budget": {"type": "integer", "minimum": 1},
                           "simulate_slots": {"type": "integer", "minimum": 1}},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
    "oneOf": [{"required": ["scenario"]}, {"required": ["scenarios"]}],
}


class ConfigError(ValueError):
    """Invalid configuration; ``path`` points into the document (e.g. ``scenario.params.N``)."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass
class ExperimentConfig:
    raw: dict
    scenarios: list
    policies: list
    simulation: dict = field(default_factory=dict)
    output: str = "results"
    name: str = "experiment"
    baseline: str | None = None
    oracle: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dict(self.raw)


def _format_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _deepest(error):
    """Most specific sub-error of a ``oneOf`` failure (the branch that got furthest)."""
    while error.context:
        error = max(error.context, key=lambda e: (len(e.absolute_path), -len(e.context or ())))
    return error


def parse_config(source) -> ExperimentConfig:
    """Validate a config given as a path, JSON text or dict.

    Raises :class:`ConfigError` with the path of the first violation.
    """
    if isinstance(source, dict):
        raw = source
    else:
        text = str(source)
        p = Path(text)
        try:
            if not text.lstrip().startswith("{"):
                text = p.read_text()
            raw = json.loads(text)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {p}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None

    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = _deepest(errors[0])
        raise ConfigError(err.message, _format_path(err.absolute_path))

    if "scenario" in raw:
        scenarios = [raw["scenario"]]
    else:
        scenarios = list(raw["scenarios"])
    if "policy" in raw and "policies" in raw:
        raise ConfigError("give either policy or policies, not both")
    policies = [raw["policy"]] if "policy" in raw else list(raw.get("policies", []))

    known = set(available_policies())
    labels = []
    for n, pol in enumerate(policies):
        key = "$.policy" if "policy" in raw else f"$.policies[{n}]"
        if pol["name"] not in known:
            raise ConfigError(f"unknown policy {pol['name']!r}; available: {', '.join(sorted(known))}",
                              f"{key}.name")
        labels.append(pol.get("label", pol["name"]))
    if len(set(labels)) != len(labels):
        raise ConfigError("policy labels must be unique (set 'label' to disambiguate)", "$.policies")
    for n, pol in enumerate(policies):
        src = pol.get("alpha_from")
        if src is not None and src not in labels[:n]:
            raise ConfigError(f"alpha_from {src!r} must name an earlier policy label", f"$.policies[{n}].alpha_from")

    baseline = raw.get("baseline")
    if baseline is not None and baseline not in labels:
        raise ConfigError(f"baseline {baseline!r} is not one of the policy labels", "$.baseline")
    return ExperimentConfig(
        raw=raw,
        scenarios=scenarios,
        policies=policies,
        simulation=dict(raw.get("simulation", {})),
        output=raw.get("output", "results"),
        name=raw.get("name", "experiment"),
        baseline=baseline,
        oracle=dict(raw.get("oracle", {})),
    )

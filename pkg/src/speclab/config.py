"""
Experiment configuration: JSON schema, parsing and model construction.

A config is a JSON object with the top-level keys ``model``, ``shift``,
``window``, ``time``, ``initial``, ``command-options`` and ``tolerances``;
only ``model`` is required.  Unknown keys are rejected at every level.
See the README for the full layout.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import jsonschema

from .lattice import CoinField, CoinSite, ShiftParams
from .models import AnisotropicSpec, KitagawaSpec, anisotropic_coin, kitagawa_coin

__all__ = ["ConfigError", "ExperimentConfig", "SCHEMA", "DEFAULT_TOLERANCES", "load_config", "NUMERIC_FIELDS"]


class ConfigError(ValueError):
    pass


_number = {"type": "number"}
_complex = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_coin = {
    "type": "object",
    "properties": {"a": _number, "b": _complex},
    "required": ["a", "b"],
    "additionalProperties": False,
}
_range = {
    "type": "object",
    "properties": {"start": _number, "stop": _number, "num": {"type": "integer", "minimum": 0}},
    "required": ["start", "stop", "num"],
    "additionalProperties": False,
}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "model": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "anisotropic"},
                        "epsilon": _number,
                        "interpolation": {"enum": ["step", "table"]},
                        "width": {"type": "integer", "minimum": 1},
                    },
                    "required": ["kind", "epsilon"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "kitagawa"},
                        "theta2": _number,
                        "theta_minus": _number,
                        "theta_plus": _number,
                        "table": {"type": "array", "items": _number, "minItems": 1},
                        "table_x0": {"type": "integer"},
                    },
                    "required": ["kind", "theta2", "theta_minus", "theta_plus"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "custom-table"},
                        "x0": {"type": "integer"},
                        "a": {"type": "array", "items": _number, "minItems": 1},
                        "b": {"type": "array", "items": _complex, "minItems": 1},
                        "limit_minus": _coin,
                        "limit_plus": _coin,
                    },
                    "required": ["kind", "x0", "a", "b"],
                    "additionalProperties": False,
                },
            ]
        },
        "shift": {
            "type": "object",
            "properties": {"p": _number, "q": _complex},
            "required": ["p"],
            "additionalProperties": False,
        },
        "window": {"type": "integer", "minimum": 1},
        "time": {"type": "integer", "minimum": 0},
        "initial": {
            "oneOf": [
                {"enum": ["birth:+", "birth:-"]},
                {
                    "type": "object",
                    "properties": {
                        "site": {"type": "integer"},
                        "spinor": {"type": "array", "items": _complex, "minItems": 2, "maxItems": 2},
                    },
                    "required": ["site", "spinor"],
                    "additionalProperties": False,
                },
            ]
        },
        "command-options": {
            "type": "object",
            "properties": {
                "simulate": {"type": "object", "additionalProperties": False, "properties": {}},
                "spectrum": {
                    "type": "object",
                    "properties": {"sites": {"type": "integer", "minimum": 1}},
                    "additionalProperties": False,
                },
                "birth": {
                    "type": "object",
                    "properties": {
                        "tail": {"type": "integer", "minimum": 0},
                        "tail_start": {"type": "integer", "minimum": 1},
                    },
                    "additionalProperties": False,
                },
                "sweep": {
                    "type": "object",
                    "properties": {
                        "grid": {
                            "type": "object",
                            "additionalProperties": {
                                "oneOf": [{"type": "array"}, _range],
                            },
                        }
                    },
                    "required": ["grid"],
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "tolerances": {
            "type": "object",
            "properties": {
                "classify_margin": _number,
                "tail_mass": _number,
                "residual": _number,
                "mapping": _number,
                "boundary_margin": _number,
            },
            "additionalProperties": False,
        },
    },
    "required": ["model"],
    "additionalProperties": False,
}

DEFAULT_TOLERANCES = {
    "classify_margin": 1e-9,
    "tail_mass": 1e-10,
    "residual": 1e-8,
    "mapping": 1e-9,
    "boundary_margin": 1e-6,
}

# model parameters a sweep may vary; "p" addresses the shift
NUMERIC_FIELDS = {
    "anisotropic": ("epsilon", "p"),
    "kitagawa": ("theta2", "theta_minus", "theta_plus"),
    "custom-table": ("p",),
}


def _as_complex(v: Union[float, list]) -> complex:
    if isinstance(v, list):
        return complex(v[0], v[1])
    return complex(v)


@dataclass
class ExperimentConfig:
    model: dict
    shift: Optional[dict] = None
    window: int = 200
    time: int = 0
    initial: Union[str, dict, None] = None
    command_options: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        try:
            jsonschema.validate(raw, SCHEMA)
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"invalid config at {path}: {exc.message}") from None
        raw = copy.deepcopy(raw)
        cfg = cls(
            model=raw["model"],
            shift=raw.get("shift"),
            window=raw.get("window", 200),
            time=raw.get("time", 0),
            initial=raw.get("initial"),
            command_options=raw.get("command-options", {}),
            tolerances=raw.get("tolerances", {}),
        )
        if cfg.model["kind"] == "kitagawa" and cfg.shift is not None:
            raise ConfigError("the kitagawa model fixes the shift through theta2; drop 'shift'")
        cfg.build()  # re-validate numeric constraints of the underlying types
        return cfg

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"model": copy.deepcopy(self.model), "window": self.window, "time": self.time}
        if self.shift is not None:
            out["shift"] = copy.deepcopy(self.shift)
        if self.initial is not None:
            out["initial"] = copy.deepcopy(self.initial)
        if self.command_options:
            out["command-options"] = copy.deepcopy(self.command_options)
        if self.tolerances:
            out["tolerances"] = copy.deepcopy(self.tolerances)
        return out

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))

    def options(self, command: str) -> dict:
        return self.command_options.get(command, {})

    def with_params(self, params: dict) -> "ExperimentConfig":
        """A copy with model fields (or the shift's ``p``) overridden."""
        model = dict(self.model)
        shift = None if self.shift is None else dict(self.shift)
        for key, val in params.items():
            if key == "p":
                shift = {"p": val}
            else:
                model[key] = val
        return ExperimentConfig(model, shift, self.window, self.time, self.initial, self.command_options, self.tolerances)

    def build(self) -> tuple[ShiftParams, CoinField]:
        """Shift and coin field described by the config."""
        m = self.model
        try:
            if m["kind"] == "kitagawa":
                table = tuple(m["table"]) if "table" in m else None
                spec = KitagawaSpec(m["theta2"], m["theta_minus"], m["theta_plus"], table, m.get("table_x0", 0))
                return kitagawa_coin(spec)
            shift = self._shift()
            if m["kind"] == "anisotropic":
                spec = AnisotropicSpec(m["epsilon"], m.get("interpolation", "step"), m.get("width", 20))
                return shift, anisotropic_coin(spec)
            if len(m["a"]) != len(m["b"]):
                raise ValueError("custom-table: 'a' and 'b' differ in length")
            lims = [
                None if key not in m else CoinSite(m[key]["a"], _as_complex(m[key]["b"]))
                for key in ("limit_minus", "limit_plus")
            ]
            coins = CoinField(m["x0"], m["a"], [_as_complex(v) for v in m["b"]], *lims)
            return shift, coins
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def _shift(self) -> ShiftParams:
        if self.shift is None:
            return ShiftParams(0.0, 1.0)
        p = float(self.shift["p"])
        if "q" in self.shift:
            return ShiftParams(p, _as_complex(self.shift["q"]))
        if abs(p) >= 1.0:
            raise ValueError("|p| must be below 1")
        return ShiftParams(p, math.sqrt(1.0 - p * p))


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return ExperimentConfig.from_dict(raw)

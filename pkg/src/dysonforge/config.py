"""Run configuration: schema-validated JSON in, fully built pipeline out."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
import json
import numpy as np
import jsonschema

from . import auxode, seeds as seeds_mod
from .forge import ForgePair, make_pair
from .jsonio import sha256_of
from .paths import ElementPath
from .profiles import PROFILES, Drive, DrivingProfile

__all__ = ["ConfigError", "RunConfig", "CONFIG_SCHEMA"]


class ConfigError(ValueError):
    pass


CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["profile", "grid", "pair"],
    "properties": {
        "profile": {
            "oneOf": [
                {"type": "string", "enum": ["a", "b", "c"]},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["a", "lam"],
                    "properties": {
                        "a": {"$ref": "#/$defs/drive"},
                        "lam": {"$ref": "#/$defs/drive"},
                    },
                },
            ]
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["t0", "t1", "samples"],
            "properties": {
                "t0": {"type": "number"},
                "t1": {"type": "number"},
                "samples": {"type": "integer", "minimum": 16},
            },
        },
        "pair": {
            "type": "object",
            "additionalProperties": False,
            "required": ["eta", "eta_tilde"],
            "properties": {
                "eta": {"type": "integer", "minimum": 1, "maximum": 6},
                "eta_tilde": {"type": "integer", "minimum": 1, "maximum": 6},
                "k": {"type": "number"},
                "x0": {"type": "number"},
                "eta1_preset": {"type": "string", "enum": ["lambda-integral"]},
                "sign_eta": {"type": "integer", "enum": [1, -1]},
                "sign_eta_tilde": {"type": "integer", "enum": [1, -1]},
            },
        },
        "constants": {
            "type": "array", "items": {"type": "number"},
            "minItems": 4, "maxItems": 4,
        },
        "gate_invariant": {"type": "string", "enum": ["inv1", "inv3"]},
        "align_phase": {"type": "boolean"},
        "rho_initial": {
            "type": "array", "items": {"type": "number"},
            "minItems": 2, "maxItems": 2,
        },
        "n_max": {"type": "integer", "minimum": 0, "maximum": 64},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tol_alg": {"type": "number", "exclusiveMinimum": 0},
                "tol_ode": {"type": "number", "exclusiveMinimum": 0},
                "tol_gate": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "fock": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 8},
                "n_guard": {"type": "integer", "minimum": 1},
                "t_max": {"type": "number"},
                "stride": {"type": "integer", "minimum": 1},
            },
        },
    },
    "$defs": {
        "drive": {
            "type": "object",
            "required": ["kind", "params"],
            "additionalProperties": False,
            "properties": {
                "kind": {"type": "string",
                         "enum": ["constant", "sinusoidal", "exponential"]},
                "params": {"type": "object"},
            },
        }
    },
}

_DEFAULTS = {
    "constants": [1.0, 1.0, 0.5, 0.0],
    "gate_invariant": "inv1",
    "align_phase": False,
    # the unit fixed point of the rho flow degenerates the quadratic
    # invariant family, so the default starts away from it
    "rho_initial": [2.0, 0.0],
    "n_max": 5,
    "tolerances": {"tol_alg": 1e-9, "tol_ode": 1e-8, "tol_gate": 1e-6},
    "fock": {"n": 24, "n_guard": 6, "t_max": 2.0, "stride": 8},
    "pair_defaults": {"k": 1.0, "x0": 0.1, "sign_eta": 1, "sign_eta_tilde": 1},
}


@dataclass
class RunConfig:
    raw: dict

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        try:
            jsonschema.validate(data, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"config rejected: {exc.message}") from exc
        cfg = cls(raw=json.loads(json.dumps(data)))
        cfg._apply_defaults()
        cfg._semantic_checks()
        return cfg

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def _apply_defaults(self):
        raw = self.raw
        for key in ("constants", "gate_invariant", "align_phase",
                    "rho_initial", "n_max"):
            raw.setdefault(key, _DEFAULTS[key])
        tol = dict(_DEFAULTS["tolerances"])
        tol.update(raw.get("tolerances", {}))
        raw["tolerances"] = tol
        fock = dict(_DEFAULTS["fock"])
        fock.update(raw.get("fock", {}))
        raw["fock"] = fock
        pair = dict(_DEFAULTS["pair_defaults"])
        pair.update(raw["pair"])
        raw["pair"] = pair

    def _semantic_checks(self):
        raw = self.raw
        g = raw["grid"]
        if not g["t1"] > g["t0"]:
            raise ConfigError("grid needs t1 > t0")
        pair = raw["pair"]
        if pair["k"] == 0:
            raise ConfigError("pair constant k must be nonzero")
        if 2 in (pair["eta"], pair["eta_tilde"]) and pair["k"] * pair["x0"] <= 0:
            raise ConfigError("seed 2 requires k * x0 > 0")
        if 1 in (pair["eta"], pair["eta_tilde"]):
            if raw["gate_invariant"] != "inv3":
                raise ConfigError("pairs involving seed 1 gate on the inv3 family")
            if "eta1_preset" not in pair:
                raise ConfigError("seed 1 in a batch run needs eta1_preset")
        fock = raw["fock"]
        if not (1 <= fock["n_guard"] <= fock["n"] // 4):
            raise ConfigError("fock guard must satisfy 1 <= n_guard <= n/4")
        if raw["rho_initial"][0] <= 0:
            raise ConfigError("rho initial value must be positive")

    # -- accessors ---------------------------------------------------------

    @property
    def hash(self) -> str:
        return sha256_of(self.raw)

    @property
    def tolerances(self) -> dict:
        return self.raw["tolerances"]

    def grid(self) -> np.ndarray:
        g = self.raw["grid"]
        return np.linspace(g["t0"], g["t1"], g["samples"])

    def profile(self) -> DrivingProfile:
        p = self.raw["profile"]
        if isinstance(p, str):
            return PROFILES[p]()
        return DrivingProfile(Drive(p["a"]["kind"], p["a"]["params"]),
                              Drive(p["lam"]["kind"], p["lam"]["params"]),
                              name="custom")

    # -- pipeline builders --------------------------------------------------

    def build_seed(self, index: int, sign: int = 1):
        profile = self.profile()
        grid = self.grid()
        pair = self.raw["pair"]
        spec = seeds_mod.SeedSpec(index, pair["k"], sign)
        if index == 1:
            return seeds_mod.build_seed(spec, profile, grid=grid,
                                        eta1_preset=pair.get("eta1_preset",
                                                             "lambda-integral"))
        x = auxode.constrained_x2(profile, pair["k"], pair["x0"], grid)
        return seeds_mod.build_seed(spec, profile, x_path=x)

    def aligned_phase(self) -> float:
        """Phase constant that pins the rotating invariant to the ray fixed
        by the adjoint action of the intertwiner of a shared-invariant pair.

        The ray obeys tan(phase) = sqrt(1 + k^2 (1 + x^2)) / x, which the
        phase flow preserves along the constrained auxiliary path.
        """
        pair = self.raw["pair"]
        k, x0 = pair["k"], pair["x0"]
        delta0 = np.sqrt(1.0 + k ** 2 * (1.0 + x0 ** 2))
        return float(np.arctan2(delta0, x0))

    def gate_invariant_for(self, seed) -> ElementPath:
        c = list(self.raw["constants"])
        if self.raw["gate_invariant"] == "inv1":
            if self.raw["align_phase"]:
                c[3] = self.aligned_phase()
            return seeds_mod.invariant_inv1(seed, tuple(c))
        rho0, rhodot0 = self.raw["rho_initial"]
        rp = auxode.solve_rho_ep(seed.f_plus, rho0, rhodot0)
        rm = auxode.solve_rho_ep(seed.f_minus, rho0, rhodot0)
        return seeds_mod.invariant_inv3(seed, rp, rm)

    def build_pair(self) -> ForgePair:
        pair = self.raw["pair"]
        eta = self.build_seed(pair["eta"], pair["sign_eta"])
        eta_tilde = self.build_seed(pair["eta_tilde"], pair["sign_eta_tilde"])
        return make_pair(eta, eta_tilde, self.profile())

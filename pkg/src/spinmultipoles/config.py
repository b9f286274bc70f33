"""Declarative simulation configs: a single JSON document per run.

Half-integer quantum numbers appear in configs only as doubled integers
("spin" is 2j, the m of a pure-state preset is 2m), so no fraction parsing
is ever needed.  Frequencies are angular (rad/s) and angles radians.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import jsonschema
import numpy as np

from .interactions import (
    EfgSpec,
    InteractionTensor,
    MagneticSpec,
    omega_from_efg,
    omega_from_magnetic,
)
from .multipoles import StateMultipoles
from .precession import RelaxationSpec
from .tensors import SpinSystem, basis_for, norm_constants
from .wigner import HalfInt

__all__ = ["ConfigError", "SimulationConfig", "validate_config", "CONFIG_SCHEMA"]


class ConfigError(ValueError):
    """A config document that parses but violates the schema or the physics."""


_NUMBER = {"type": "number"}
_RATE_ENTRY = {
    "type": "object",
    "properties": {
        "L": {"type": "integer", "minimum": 0},
        "M": {"type": "integer"},
        "rate": {"type": "number", "minimum": 0},
    },
    "required": ["L", "M", "rate"],
    "additionalProperties": False,
}
_MULTIPOLE_ENTRY = {
    "type": "object",
    "properties": {
        "L": {"type": "integer", "minimum": 0},
        "M": {"type": "integer"},
        "re": _NUMBER,
        "im": _NUMBER,
    },
    "required": ["L", "M"],
    "additionalProperties": False,
}

CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "spin": {"type": "integer", "minimum": 0, "description": "2j"},
        "magnetic": {
            "type": "object",
            "properties": {
                "gamma": _NUMBER,
                "B": {"type": "array", "items": _NUMBER, "minItems": 3, "maxItems": 3},
            },
            "required": ["gamma", "B"],
            "additionalProperties": False,
        },
        "quadrupole": {
            "type": "object",
            "properties": {
                "omega_q": _NUMBER,
                "efg": {
                    "type": "array",
                    "items": {"type": "array", "items": _NUMBER, "minItems": 3, "maxItems": 3},
                    "minItems": 3,
                    "maxItems": 3,
                },
                "eta": {"type": "number", "minimum": 0, "maximum": 1},
            },
            "required": ["omega_q"],
            "additionalProperties": False,
        },
        "initial_state": {
            "oneOf": [
                {"type": "string"},
                {
                    "type": "object",
                    "properties": {
                        "multipoles": {"type": "array", "items": _MULTIPOLE_ENTRY}
                    },
                    "required": ["multipoles"],
                    "additionalProperties": False,
                },
            ]
        },
        "relaxation": {
            "type": "object",
            "properties": {
                "rates": {"type": "array", "items": _RATE_ENTRY},
                "from_fluctuation_model": {
                    "type": "object",
                    "properties": {
                        "omega_f": {"type": "number", "minimum": 0},
                        "tau_c": {"type": "number", "exclusiveMinimum": 0},
                    },
                    "required": ["omega_f", "tau_c"],
                    "additionalProperties": False,
                },
            },
            "minProperties": 1,
            "maxProperties": 1,
            "additionalProperties": False,
        },
        "time_grid": {
            "type": "object",
            "properties": {
                "t_max": {"type": "number", "exclusiveMinimum": 0},
                "n_points": {"type": "integer", "minimum": 2},
            },
            "required": ["t_max", "n_points"],
            "additionalProperties": False,
        },
        "run_mode": {"enum": ["evolve", "compare_oracle", "rates", "stochastic"]},
        "mc": {
            "type": "object",
            "properties": {
                "n_traj": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
            },
            "required": ["n_traj", "seed"],
            "additionalProperties": False,
        },
        "angular": {
            "type": "object",
            "properties": {
                "n_theta": {"type": "integer", "minimum": 2},
                "r": {"type": "object", "additionalProperties": _NUMBER},
            },
            "additionalProperties": False,
        },
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "output": {
            "type": "object",
            "properties": {
                "directory": {"type": "string"},
                "formats": {
                    "type": "array",
                    "items": {"enum": ["csv", "json"]},
                },
            },
            "additionalProperties": False,
        },
    },
    "required": ["spin", "initial_state", "time_grid", "run_mode"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class SimulationConfig:
    """A fully validated simulation request with all defaults resolved."""

    twice_j: int
    magnetic: MagneticSpec | None
    quadrupole: EfgSpec | None
    initial: Any  # "maximally_mixed" | ("pure_m", 2m) | ("oriented_z", p) | ("multipoles", dict)
    relaxation_rates: dict[tuple[int, int], float] | None
    fluctuation: tuple[float, float] | None  # (omega_f, tau_c)
    t_max: float
    n_points: int
    run_mode: str
    n_traj: int | None
    seed: int | None
    angular_n_theta: int | None
    angular_r: dict[int, float] = field(default_factory=dict)
    tolerance: float = 1e-8
    out_directory: str | None = None
    out_formats: tuple[str, ...] = ("csv", "json")
    raw: dict = field(default_factory=dict)

    @property
    def spin(self) -> SpinSystem:
        return SpinSystem(HalfInt(self.twice_j))

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_points)

    def interaction_tensor(self) -> InteractionTensor:
        spin = self.spin
        tensor = InteractionTensor.empty(spin)
        if self.magnetic is not None:
            tensor = tensor + omega_from_magnetic(self.magnetic, spin)
        if self.quadrupole is not None:
            tensor = tensor + omega_from_efg(self.quadrupole, spin)
        return tensor

    def initial_multipoles(self) -> StateMultipoles:
        spin = self.spin
        basis = basis_for(spin)
        kind = self.initial[0] if isinstance(self.initial, tuple) else self.initial
        if kind == "maximally_mixed":
            return StateMultipoles.maximally_mixed(spin)
        if kind == "pure_m":
            tm = self.initial[1]
            rho = np.zeros((spin.dim, spin.dim), dtype=complex)
            rho[(tm + spin.j.twice) // 2, (tm + spin.j.twice) // 2] = 1.0
            from .multipoles import decompose

            return decompose(rho, basis)
        if kind == "oriented_z":
            p = self.initial[1]
            a0, a1, _ = norm_constants(spin)
            components = {(0, 0): complex(a0)}
            if spin.max_rank >= 1:
                components[(1, 0)] = complex(a1 * float(spin.j) * p)
            return StateMultipoles.from_components(spin, components)
        # explicit multipole list
        table = dict(self.initial[1])
        table.setdefault((0, 0), complex(1.0 / math.sqrt(spin.dim)))
        return StateMultipoles.from_components(spin, table)

    def relaxation_spec(self) -> RelaxationSpec | None:
        if self.relaxation_rates is None:
            return None
        return RelaxationSpec(self.relaxation_rates)


def _schema_error_path(err: jsonschema.ValidationError) -> str:
    path = ".".join(str(p) for p in err.absolute_path)
    return path or "<root>"


def validate_config(raw) -> SimulationConfig:
    """Parse and validate a config document (JSON text, bytes, or dict).

    Schema violations and physics violations both raise ConfigError with
    the offending field named; callers map that to exit code 2.
    """
    if isinstance(raw, (str, bytes)):
        try:
            document = json.loads(raw)
        except json.JSONDecodeError as err:
            raise ConfigError(f"config is not valid JSON: {err}") from err
    else:
        document = raw
    try:
        jsonschema.validate(document, CONFIG_SCHEMA)
    except jsonschema.ValidationError as err:
        raise ConfigError(
            f"config field '{_schema_error_path(err)}': {err.message}"
        ) from err

    twice_j = document["spin"]
    max_rank = twice_j

    magnetic = None
    if "magnetic" in document:
        mag = document["magnetic"]
        if twice_j < 1:
            raise ConfigError("magnetic: a magnetic dipole needs 2j >= 1 (L = 1 <= 2j)")
        magnetic = MagneticSpec(gamma=float(mag["gamma"]), B=tuple(mag["B"]))

    quadrupole = None
    if "quadrupole" in document:
        quad = document["quadrupole"]
        if twice_j < 2:
            raise ConfigError(
                f"quadrupole: rank L = 2 violates L <= 2j for spin 2j = {twice_j}; "
                "quadrupole coupling needs 2j >= 2"
            )
        if "efg" in quad and "eta" in quad:
            raise ConfigError("quadrupole: give either 'efg' or 'eta', not both")
        if "efg" in quad:
            phi = np.array(quad["efg"], dtype=float)
            if phi[2, 2] == 0.0:
                raise ConfigError("quadrupole.efg: phi_zz must be nonzero")
            quadrupole = EfgSpec(phi, float(quad["omega_q"]))
        else:
            quadrupole = EfgSpec.axial(float(quad["omega_q"]), float(quad.get("eta", 0.0)))

    initial = _parse_initial_state(document["initial_state"], twice_j)

    relaxation_rates = None
    fluctuation = None
    if "relaxation" in document:
        relax = document["relaxation"]
        if "rates" in relax:
            table: dict[tuple[int, int], float] = {}
            for entry in relax["rates"]:
                L, M, rate = entry["L"], entry["M"], float(entry["rate"])
                if L > max_rank:
                    raise ConfigError(
                        f"relaxation.rates: rank L = {L} violates L <= 2j = {max_rank}"
                    )
                if abs(M) > L:
                    raise ConfigError(f"relaxation.rates: |M| = {abs(M)} exceeds L = {L}")
                table[(L, M)] = rate
            try:
                RelaxationSpec(table)
            except ValueError as err:
                raise ConfigError(f"relaxation.rates: {err}") from err
            relaxation_rates = table
        else:
            fm = relax["from_fluctuation_model"]
            fluctuation = (float(fm["omega_f"]), float(fm["tau_c"]))

    grid = document["time_grid"]
    run_mode = document["run_mode"]

    n_traj = seed = None
    if run_mode == "stochastic":
        if "mc" not in document:
            raise ConfigError("mc: required for run_mode 'stochastic'")
        if fluctuation is None:
            raise ConfigError(
                "relaxation.from_fluctuation_model: required for run_mode 'stochastic'"
            )
    if run_mode == "rates" and fluctuation is None:
        raise ConfigError(
            "relaxation.from_fluctuation_model: required for run_mode 'rates'"
        )
    if "mc" in document:
        n_traj = int(document["mc"]["n_traj"])
        seed = int(document["mc"]["seed"])

    angular_n_theta = None
    angular_r: dict[int, float] = {}
    if "angular" in document:
        ang = document["angular"]
        angular_n_theta = int(ang.get("n_theta", 91))
        for key, value in ang.get("r", {}).items():
            try:
                angular_r[int(key)] = float(value)
            except ValueError as err:
                raise ConfigError(f"angular.r: key {key!r} is not an integer rank") from err

    output = document.get("output", {})

    return SimulationConfig(
        twice_j=twice_j,
        magnetic=magnetic,
        quadrupole=quadrupole,
        initial=initial,
        relaxation_rates=relaxation_rates,
        fluctuation=fluctuation,
        t_max=float(grid["t_max"]),
        n_points=int(grid["n_points"]),
        run_mode=run_mode,
        n_traj=n_traj,
        seed=seed,
        angular_n_theta=angular_n_theta,
        angular_r=angular_r,
        tolerance=float(document.get("tolerance", 1e-8)),
        out_directory=output.get("directory"),
        out_formats=tuple(output.get("formats", ("csv", "json"))),
        raw=document,
    )


def _parse_initial_state(value, twice_j: int):
    if isinstance(value, dict):
        table: dict[tuple[int, int], complex] = {}
        for entry in value["multipoles"]:
            L, M = entry["L"], entry["M"]
            if L > twice_j:
                raise ConfigError(
                    f"initial_state.multipoles: rank L = {L} violates L <= 2j = {twice_j}"
                )
            if abs(M) > L:
                raise ConfigError(
                    f"initial_state.multipoles: |M| = {abs(M)} exceeds L = {L}"
                )
            table[(L, M)] = complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
        return ("multipoles", table)
    if value == "maximally_mixed":
        return "maximally_mixed"
    if value.startswith("pure_m:"):
        try:
            tm = int(value.split(":", 1)[1])
        except ValueError as err:
            raise ConfigError(
                "initial_state: pure_m takes an integer 2m, e.g. 'pure_m:1'"
            ) from err
        if abs(tm) > twice_j or (twice_j - tm) % 2 != 0:
            raise ConfigError(
                f"initial_state: 2m = {tm} is not a valid projection for 2j = {twice_j}"
            )
        return ("pure_m", tm)
    if value.startswith("oriented_z:"):
        try:
            p = float(value.split(":", 1)[1])
        except ValueError as err:
            raise ConfigError("initial_state: oriented_z takes a number, e.g. 'oriented_z:0.5'") from err
        if twice_j < 1:
            raise ConfigError("initial_state: oriented_z needs 2j >= 1")
        return ("oriented_z", p)
    raise ConfigError(
        f"initial_state: unknown preset {value!r} (expected 'maximally_mixed', "
        "'pure_m:<2m>', 'oriented_z:<p>' or an explicit multipole list)"
    )

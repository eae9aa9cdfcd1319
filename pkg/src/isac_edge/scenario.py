"""JSON scenario files: schema, validation and conversion to linear units.

A scenario has four blocks::

    {
      "system":   {"num_antennas": 4, "max_power_dbm": 30, "noise_power_dbm": -90, ...},
      "geometry": {"server_distance_m": 250, "server_snr_db": 20, "targets": [...]},
      "tasks":    [{"eta_db": 20, "a": 2.5845, "b": 0.5317}, ...],
      "seed": 0
    }

Unknown keys are rejected. Fields ending in ``_db``/``_dbm`` are converted to
linear scale here and nowhere else; angles are given in degrees.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .channels import ChannelSet, SceneGeometry, build_channels, calibrate_reference_gain
from .errors import ScenarioError
from .model import SystemConfig, db_to_linear, dbm_to_watts

_POS = {"type": "number", "exclusiveMinimum": 0}
_NUM = {"type": "number"}


def _power(name: str) -> list[dict]:
    # exactly one of <name>_w or <name>_dbm
    return [{"required": [f"{name}_w"], "not": {"required": [f"{name}_dbm"]}},
            {"required": [f"{name}_dbm"], "not": {"required": [f"{name}_w"]}}]


SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["system", "geometry", "tasks"],
    "properties": {
        "system": {
            "type": "object",
            "additionalProperties": False,
            "required": ["num_antennas", "bandwidth_hz", "sample_volume_bits",
                         "total_time_s", "sensing_time_s"],
            "properties": {
                "num_antennas": {"type": "integer", "minimum": 1},
                "max_power_w": _POS, "max_power_dbm": _NUM,
                "noise_power_w": _POS, "noise_power_dbm": _NUM,
                "clutter_power_w": _POS, "clutter_power_dbm": _NUM,
                "bandwidth_hz": _POS,
                "sample_volume_bits": _POS,
                "total_time_s": _POS,
                "sensing_time_s": _POS,
            },
            "allOf": [{"oneOf": _power(n)} for n in ("max_power", "noise_power", "clutter_power")],
        },
        "geometry": {
            "type": "object",
            "additionalProperties": False,
            "required": ["targets"],
            "properties": {
                "antenna_spacing_m": _POS,
                "carrier_wavelength_m": _POS,
                "fading_exponent": _POS,
                "server_distance_m": _POS,
                "server_angle_deg": _NUM,
                "reference_gain": _POS,
                "server_snr_db": _NUM,
                "fading_std": {"type": "number", "minimum": 0},
                "targets": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["distance_m", "angle_deg"],
                        "properties": {
                            "distance_m": _POS,
                            "angle_deg": _NUM,
                            "echo_gain_scale": _POS,
                        },
                    },
                },
            },
            "not": {"required": ["reference_gain", "server_snr_db"]},
        },
        "tasks": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["a", "b"],
                "properties": {
                    "name": {"type": "string"},
                    "eta_db": _NUM,
                    "eta": {"type": "number", "minimum": 0},
                    "a": _POS,
                    "b": _POS,
                },
                "not": {"required": ["eta_db", "eta"]},
            },
        },
        "seed": {"type": "integer", "minimum": 0},
    },
}

DEFAULT_SERVER_SNR_DB = 20.0


@dataclass(frozen=True)
class Scenario:
    cfg: SystemConfig
    geometry: SceneGeometry
    seed: int = 0
    task_names: tuple[str, ...] = ()

    def channels(self) -> ChannelSet:
        return build_channels(self.geometry, self.cfg, self.seed)


def _watts(block: dict, name: str) -> float:
    if f"{name}_w" in block:
        return float(block[f"{name}_w"])
    return dbm_to_watts(float(block[f"{name}_dbm"]))


def scenario_from_dict(doc: Any) -> Scenario:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"invalid scenario at {where}: {exc.message}") from None

    sysb, geo, tasks = doc["system"], doc["geometry"], doc["tasks"]
    targets = geo["targets"]
    if len(targets) != len(tasks):
        raise ScenarioError(f"{len(targets)} targets but {len(tasks)} tasks")

    eta = []
    for t in tasks:
        if "eta_db" in t:
            eta.append(db_to_linear(float(t["eta_db"])))
        else:
            eta.append(float(t.get("eta", 0.0)))
    cfg = SystemConfig(
        num_antennas=int(sysb["num_antennas"]),
        max_power=_watts(sysb, "max_power"),
        noise_power=_watts(sysb, "noise_power"),
        clutter_power=_watts(sysb, "clutter_power"),
        bandwidth=float(sysb["bandwidth_hz"]),
        sample_volume=float(sysb["sample_volume_bits"]),
        total_time=float(sysb["total_time_s"]),
        sensing_time=float(sysb["sensing_time_s"]),
        eta=eta,
        error_a=[float(t["a"]) for t in tasks],
        error_b=[float(t["b"]) for t in tasks],
    )

    defaults = SceneGeometry()
    geometry = SceneGeometry(
        antenna_spacing=float(geo.get("antenna_spacing_m", defaults.antenna_spacing)),
        carrier_wavelength=float(geo.get("carrier_wavelength_m", defaults.carrier_wavelength)),
        fading_exponent=float(geo.get("fading_exponent", defaults.fading_exponent)),
        server_distance=float(geo.get("server_distance_m", defaults.server_distance)),
        server_angle=math.radians(float(geo.get("server_angle_deg", 0.0))),
        target_distances=tuple(float(t["distance_m"]) for t in targets),
        target_angles=tuple(math.radians(float(t["angle_deg"])) for t in targets),
        reference_gain=float(geo.get("reference_gain", 1.0)),
        echo_gain_scale=tuple(float(t.get("echo_gain_scale", 1.0)) for t in targets),
        fading_std=float(geo.get("fading_std", 0.0)),
    )
    if "reference_gain" not in geo:
        snr_db = float(geo.get("server_snr_db", DEFAULT_SERVER_SNR_DB))
        beta0 = calibrate_reference_gain(snr_db, geometry, cfg)
        geometry = replace(geometry, reference_gain=beta0)
    names = tuple(t.get("name", f"task{m + 1}") for m, t in enumerate(tasks))
    return Scenario(cfg, geometry, int(doc.get("seed", 0)), names)


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario file. Raises OSError or ScenarioError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: malformed JSON ({exc})") from None
    return scenario_from_dict(doc)


def table1_path() -> Path:
    """Path of the bundled reference scenario."""
    return Path(str(resources.files("isac_edge") / "data" / "table1.json"))


def table1() -> Scenario:
    return load_scenario(table1_path())

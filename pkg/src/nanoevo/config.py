"""Configuration document: section dataclasses, validation, YAML/manifest loading.

A config file is a nested key-value document with one section per module.
Every key is range-checked at load time and unknown sections/keys are
rejected by name. A run manifest (JSON echo of the resolved config plus
seed) is accepted anywhere a config file is, which is what makes manifest
reruns reproducible.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml


class ConfigError(ValueError):
    """Raised for unknown keys or out-of-range values; message names the key."""


def _check(cond: bool, key: str, msg: str) -> None:
    if not cond:
        raise ConfigError(f"config key '{key}': {msg}")


@dataclass
class WorldConfig:
    width: int = 50
    height: int = 50
    n_cc: int = 800
    n_hc: int = 400
    n_agents: int = 200
    memory_capacity: int = 4
    signature_length: int = 8
    placement: str = "clustered"      # clustered | random
    signature_init: str = "per_kind"  # per_kind | per_cell

    def validate(self) -> None:
        _check(self.width >= 8 and self.height >= 8, "world.width/height",
               "grid dimensions must be at least 8x8")
        _check(self.n_cc >= 0, "world.n_cc", "must be >= 0")
        _check(self.n_hc >= 0, "world.n_hc", "must be >= 0")
        _check(self.n_cc + self.n_hc <= self.width * self.height,
               "world.n_cc/n_hc", "cell counts exceed grid capacity")
        _check(self.n_agents >= 0, "world.n_agents", "must be >= 0")
        _check(self.memory_capacity >= 1, "world.memory_capacity", "must be >= 1")
        _check(self.signature_length >= 1, "world.signature_length", "must be >= 1")
        _check(self.placement in ("clustered", "random"), "world.placement",
               "must be 'clustered' or 'random'")
        _check(self.signature_init in ("per_kind", "per_cell"), "world.signature_init",
               "must be 'per_kind' or 'per_cell'")


@dataclass
class KineticsConfig:
    curiosity: float = 0.5
    speed_max: int = 3
    init_prob_max: float = 0.2   # founder genomes draw probabilities from [0, this]
    # direction in which a resistance modifier pushes each NA parameter
    resistance_directions: dict[str, str] = field(default_factory=lambda: {
        "p_a": "down", "p_d": "up", "p_i": "down", "p_k": "down"})

    def validate(self) -> None:
        _check(0.0 < self.curiosity <= 1.0, "kinetics.curiosity", "must be in (0, 1]")
        _check(self.speed_max >= 1, "kinetics.speed_max", "must be >= 1")
        _check(0.0 <= self.init_prob_max <= 1.0, "kinetics.init_prob_max",
               "must be in [0, 1]")
        _check(set(self.resistance_directions) == {"p_a", "p_d", "p_i", "p_k"},
               "kinetics.resistance_directions", "must map exactly p_a, p_d, p_i, p_k")
        for name, direction in self.resistance_directions.items():
            _check(direction in ("up", "down"), f"kinetics.resistance_directions.{name}",
                   "must be 'up' or 'down'")


@dataclass
class EvolutionConfig:
    round_period: int = 10
    replace_fraction: float = 0.2
    mutation_sigma: float = 0.05
    signature_flip_prob: float = 0.02
    division_prob: float = 0.001
    resistance_fraction: float = 0.10
    resistance_strength_min: float = 0.30
    resistance_strength_max: float = 0.80
    growth_during_learning: bool = True
    growth_during_simulation: bool = False
    signature_drift_per_step: bool = False
    fitness_window: str = "cumulative"  # cumulative | round

    def validate(self) -> None:
        _check(self.round_period >= 1, "evolution.round_period", "must be >= 1")
        _check(0.0 < self.replace_fraction <= 0.5, "evolution.replace_fraction",
               "must be in (0, 0.5]")
        _check(self.mutation_sigma >= 0.0, "evolution.mutation_sigma", "must be >= 0")
        for key in ("signature_flip_prob", "division_prob", "resistance_fraction"):
            _check(0.0 <= getattr(self, key) <= 1.0, f"evolution.{key}", "must be in [0, 1]")
        _check(0.0 < self.resistance_strength_min <= self.resistance_strength_max < 1.0,
               "evolution.resistance_strength_min/max",
               "must satisfy 0 < min <= max < 1")
        _check(self.fitness_window in ("cumulative", "round"), "evolution.fitness_window",
               "must be 'cumulative' or 'round'")


@dataclass
class Schedule:
    """Injection ramp and clearance decline for simulation mode."""
    total_dose: int = 2000
    ramp_steps: int = 14
    decline_steps: int = 72
    step_duration_s: float = 5000.0
    steps: int = 87                  # simulation-mode run length
    entry: str = "border"            # border | west_edge
    dose_sweep: list[int] = field(default_factory=list)

    def validate(self) -> None:
        _check(self.total_dose >= 0, "schedule.total_dose", "must be >= 0")
        _check(self.ramp_steps >= 1, "schedule.ramp_steps", "must be >= 1")
        _check(self.decline_steps >= 0, "schedule.decline_steps", "must be >= 0")
        _check(self.step_duration_s > 0, "schedule.step_duration_s", "must be > 0")
        _check(self.steps >= 0, "schedule.steps", "must be >= 0")
        _check(self.entry in ("border", "west_edge"), "schedule.entry",
               "must be 'border' or 'west_edge'")
        for dose in self.dose_sweep:
            _check(isinstance(dose, int) and not isinstance(dose, bool)
                   and dose >= 0,
                   "schedule.dose_sweep", "doses must be non-negative integers")


@dataclass
class UnitsConfig:
    diffusion_cm2_s: float = 1e-10
    cell_diameter_cm: float = 1e-3
    particles_per_na: float = 1e5
    msd_dimension_factor: float = 2.0
    ka_range_min: float = 1e4
    ka_range_max: float = 1e6

    def validate(self) -> None:
        for key in ("diffusion_cm2_s", "cell_diameter_cm", "particles_per_na",
                    "msd_dimension_factor", "ka_range_min", "ka_range_max"):
            _check(getattr(self, key) > 0, f"units.{key}", "must be > 0")
        _check(self.ka_range_min <= self.ka_range_max, "units.ka_range_min/max",
               "min must not exceed max")


@dataclass
class SsaConfig:
    n_compartments: int = 22
    receptors_per_cell: int = 10000
    bolus_particles: int = 100000
    boundary: str = "bolus"          # bolus | source
    source_level: int = 0
    kill_threshold: int = 1
    threshold_fraction: float = 0.03
    pa: float = 0.3
    pd: float = 0.5
    pi: float = 0.5
    t_end_s: float = 39600.0         # 11 h
    sample_dt_s: float = 1980.0
    k_hop_override_per_s: float | None = None  # replaces D/d^2 when set

    def validate(self) -> None:
        _check(self.n_compartments >= 1, "ssa.n_compartments", "must be >= 1")
        _check(self.receptors_per_cell >= 0, "ssa.receptors_per_cell", "must be >= 0")
        _check(self.bolus_particles >= 0, "ssa.bolus_particles", "must be >= 0")
        _check(self.boundary in ("bolus", "source"), "ssa.boundary",
               "must be 'bolus' or 'source'")
        _check(self.source_level >= 0, "ssa.source_level", "must be >= 0")
        _check(self.kill_threshold >= 1, "ssa.kill_threshold", "must be >= 1")
        _check(0.0 < self.threshold_fraction < 1.0, "ssa.threshold_fraction",
               "must be in (0, 1)")
        for key in ("pa", "pd", "pi"):
            _check(0.0 <= getattr(self, key) <= 1.0, f"ssa.{key}", "must be in [0, 1]")
        _check(self.t_end_s > 0, "ssa.t_end_s", "must be > 0")
        _check(0 < self.sample_dt_s <= self.t_end_s, "ssa.sample_dt_s",
               "must be in (0, t_end_s]")
        if self.k_hop_override_per_s is not None:
            _check(isinstance(self.k_hop_override_per_s, (int, float))
                   and not isinstance(self.k_hop_override_per_s, bool)
                   and self.k_hop_override_per_s >= 0,
                   "ssa.k_hop_override_per_s", "must be a number >= 0")


@dataclass
class RunConfig:
    steps: int = 2000                # learning-mode run length
    master_seed: int = 1234
    replicates: int = 20

    def validate(self) -> None:
        _check(self.steps >= 0, "run.steps", "must be >= 0")
        _check(self.replicates >= 1, "run.replicates", "must be >= 1")


@dataclass
class SimConfig:
    world: WorldConfig = field(default_factory=WorldConfig)
    kinetics: KineticsConfig = field(default_factory=KineticsConfig)
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    schedule: Schedule = field(default_factory=Schedule)
    units: UnitsConfig = field(default_factory=UnitsConfig)
    ssa: SsaConfig = field(default_factory=SsaConfig)
    run: RunConfig = field(default_factory=RunConfig)

    def validate(self) -> None:
        for section in fields(self):
            getattr(self, section.name).validate()

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


_SECTIONS = {f.name for f in fields(SimConfig)}


def _coerce(section: str, key: str, value: Any, want: type) -> Any:
    if want is float:
        # pyyaml reads bare scientific notation like 1e-10 as a string
        if isinstance(value, str):
            try:
                return float(value)
            except ValueError:
                raise ConfigError(f"config key '{section}.{key}': expected a number")
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        raise ConfigError(f"config key '{section}.{key}': expected a number")
    if want is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"config key '{section}.{key}': expected an integer")
        if isinstance(value, float):
            if value != int(value):
                raise ConfigError(f"config key '{section}.{key}': expected an integer")
            return int(value)
        return value
    if want is bool and not isinstance(value, bool):
        raise ConfigError(f"config key '{section}.{key}': expected a boolean")
    if want is str and not isinstance(value, str):
        raise ConfigError(f"config key '{section}.{key}': expected a string")
    return value


def resolve_config(doc: dict[str, Any] | None) -> SimConfig:
    """Merge a (possibly partial) document onto defaults, rejecting unknown keys."""
    doc = doc or {}
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping of sections")
    cfg = SimConfig()
    for section, payload in doc.items():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section '{section}'")
        if payload is None:
            continue
        if not isinstance(payload, dict):
            raise ConfigError(f"config section '{section}' must be a mapping")
        target = getattr(cfg, section)
        known = {f.name: f.type for f in fields(target)}
        for key, value in payload.items():
            if key not in known:
                raise ConfigError(f"unknown config key '{section}.{key}'")
            current = getattr(target, key)
            if isinstance(current, dict):
                if not isinstance(value, dict):
                    raise ConfigError(f"config key '{section}.{key}': expected a mapping")
                merged = dict(current)
                merged.update(value)
                setattr(target, key, merged)
            elif isinstance(current, list):
                if not isinstance(value, list):
                    raise ConfigError(f"config key '{section}.{key}': expected a list")
                setattr(target, key, list(value))
            else:
                setattr(target, key, _coerce(section, key, value, type(current)))
    cfg.validate()
    return cfg


def load_config(path: str | Path) -> tuple[SimConfig, int | None]:
    """Load a YAML config or a run manifest.

    Returns the resolved config and, when the file is a manifest, the seed it
    recorded (None for plain configs).
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text()
    try:
        doc = json.loads(text)  # manifests are JSON; JSON floats confuse YAML 1.1
    except json.JSONDecodeError:
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"could not parse config file {path}: {exc}") from exc
    if isinstance(doc, dict) and "config" in doc and "seed" in doc:
        # run_manifest.json: {"version": ..., "command": ..., "seed": N, "config": {...}}
        return resolve_config(doc["config"]), int(doc["seed"])
    return resolve_config(doc), None


def write_manifest(path: str | Path, command: str, cfg: SimConfig, seed: int,
                   version: str) -> None:
    payload = {"version": version, "command": command, "seed": int(seed),
               "config": cfg.to_dict()}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

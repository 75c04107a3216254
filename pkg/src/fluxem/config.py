"""Scenario configuration: JSON files, built-in presets and ``--set`` overrides.

A config file looks like::

    {
      "preset": "paper-fig2",
      "params": {"Omega": 32},
      "integrator": {"dt": 2e-5, "t_end": 0.5},
      "initial_state": [0, 1, 0],
      "observables": ["P0", "P1", "P2", "n_a", "n_b"],
      "outputs": {"csv": "run.csv"},
      "model": "full"
    }

``model`` is ``"full"`` (qubit + both modes) or ``"effective"`` (two-mode
beam splitter, qubit eliminated and held in its ground state).

Frequencies and rates are ordinary frequencies in MHz, times in µs. When a
preset is named its values are loaded first and every other key overrides
them field by field.
"""

from __future__ import annotations

import copy
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError, FluxEMError
from .model import SystemParams
from .solver import IntegratorConfig

OBSERVABLES = ("P0", "P1", "P2", "n_a", "n_b", "N")
MODELS = ("full", "effective")
DEFAULT_OBSERVABLES = ("P0", "P1", "P2", "n_a", "n_b")

FIG2_PRESET = {
    "description": (
        "Photon-to-phonon transfer: qubit splittings 1720/4280 MHz, electric mode 5680 MHz, "
        "mechanical mode 1400 MHz, drive 4280 MHz at 64 MHz, g1 = g2 = 40 MHz, "
        "kappa_a = 5 kHz, kappa_b = 0.1 MHz, Gamma1 = 10 kHz, Gamma2 = 0.1 MHz. "
        "Horizon 0.5 us, about twice the 0.25 us swap time."
    ),
    "params": {
        "omega10": 1720.0,
        "omega21": 4280.0,
        "omega_a": 5680.0,
        "omega_b": 1400.0,
        "omega_drive": 4280.0,
        "Omega": 64.0,
        "g1": 40.0,
        "g2": 40.0,
        "kappa_a": 0.005,
        "kappa_b": 0.1,
        "Gamma1": 0.01,
        "Gamma2": 0.1,
        "n_a": 2,
        "n_b": 2,
    },
    "integrator": {"dt": 2e-5, "t_end": 0.5, "sample_every": 50, "hermitize_every": 100},
    "initial_state": [0, 1, 0],
}

ALUMINIUM_LOW_FREQ = copy.deepcopy(FIG2_PRESET)
ALUMINIUM_LOW_FREQ["description"] = (
    "Low-frequency aluminium mechanical resonator: only the weaker qubit-phonon coupling "
    "is modelled (g2 = 4 MHz, tenfold smaller), giving an effective coupling of 0.1 MHz. "
    "The 0.1 GHz mechanical frequency and its extra voltage drive are not modelled; "
    "delta2 is held at 320 MHz, which is all the effective coupling depends on. "
    "Horizon 5 us covers the 2.5 us swap."
)
ALUMINIUM_LOW_FREQ["params"]["g2"] = 4.0
ALUMINIUM_LOW_FREQ["integrator"]["t_end"] = 5.0
ALUMINIUM_LOW_FREQ["integrator"]["sample_every"] = 500

PRESETS = {"paper-fig2": FIG2_PRESET, "aluminium-low-freq": ALUMINIUM_LOW_FREQ}


@dataclass(frozen=True)
class ScenarioConfig:
    params: SystemParams = field(default_factory=SystemParams)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    initial_state: tuple[int, int, int] = (0, 1, 0)
    observables: tuple[str, ...] = DEFAULT_OBSERVABLES
    outputs: dict = field(default_factory=dict)
    preset: str | None = None
    model: str = "full"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"model: expected one of {list(MODELS)}, got {self.model!r}")
        init = tuple(int(i) for i in self.initial_state)
        if len(init) != 3:
            raise ConfigError(f"initial_state: need (q, n_a, n_b), got {self.initial_state!r}")
        limits = (3, self.params.n_a, self.params.n_b)
        for name, i, lim in zip(("q", "n_a", "n_b"), init, limits):
            if not 0 <= i < lim:
                raise ConfigError(f"initial_state.{name}: {i} outside 0..{lim - 1}")
        if self.model == "effective" and init[0] != 0:
            raise ConfigError("initial_state.q: the effective model needs the qubit in level 0")
        object.__setattr__(self, "initial_state", init)
        obs = tuple(self.observables)
        unknown = [o for o in obs if o not in OBSERVABLES]
        if unknown:
            raise ConfigError(f"observables: unknown names {unknown}; known: {list(OBSERVABLES)}")
        object.__setattr__(self, "observables", obs)

    def to_dict(self) -> dict:
        d = {
            "params": dataclasses.asdict(self.params),
            "integrator": dataclasses.asdict(self.integrator),
            "initial_state": list(self.initial_state),
            "observables": list(self.observables),
            "outputs": dict(self.outputs),
            "model": self.model,
        }
        if self.preset is not None:
            d["preset"] = self.preset
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _build_section(cls, section: str, values: dict):
    if not isinstance(values, dict):
        raise ConfigError(f"{section}: expected an object, got {type(values).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(values) - names)
    if unknown:
        raise ConfigError(f"{section}: unknown fields {unknown}")
    try:
        return cls(**values)
    except (FluxEMError, ValueError, TypeError) as exc:
        raise ConfigError(f"{section}: {exc}") from exc


def from_dict(raw: dict) -> ScenarioConfig:
    """Expand any preset, then validate every section."""
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    raw = copy.deepcopy(raw)
    preset = raw.pop("preset", None)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"preset: unknown {preset!r}; known: {sorted(PRESETS)}")
        base = {k: v for k, v in PRESETS[preset].items() if k != "description"}
        raw = _merge(base, raw)
    raw.pop("description", None)
    allowed = {"params", "integrator", "initial_state", "observables", "outputs", "model"}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"config: unknown keys {unknown}")
    params = _build_section(SystemParams, "params", raw.get("params", {}))
    integrator = _build_section(IntegratorConfig, "integrator", raw.get("integrator", {}))
    try:
        return ScenarioConfig(
            params=params,
            integrator=integrator,
            initial_state=tuple(raw.get("initial_state", (0, 1, 0))),
            observables=tuple(raw.get("observables", DEFAULT_OBSERVABLES)),
            outputs=dict(raw.get("outputs", {})),
            preset=preset,
            model=raw.get("model", "full"),
        )
    except TypeError as exc:
        raise ConfigError(f"config: {exc}") from exc


def from_json(text: str) -> ScenarioConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from exc
    return from_dict(raw)


def load(path: str | Path) -> ScenarioConfig:
    return from_json(Path(path).read_text())


def parse_assignment(text: str) -> tuple[list[str], Any]:
    """Split ``params.Omega=32`` into (["params", "Omega"], 32)."""
    if "=" not in text:
        raise ConfigError(f"--set expects field=value, got {text!r}")
    key, value = text.split("=", 1)
    path = [k for k in key.strip().split(".") if k]
    if not path:
        raise ConfigError(f"--set: empty field name in {text!r}")
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        parsed = value
    return path, parsed


def apply_overrides(raw: dict, assignments: list[str]) -> dict:
    raw = copy.deepcopy(raw)
    for text in assignments:
        path, value = parse_assignment(text)
        node = raw
        for key in path[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--set: {'.'.join(path)} does not name a field")
        node[path[-1]] = value
    return raw


def resolve(
    path: str | Path | None = None,
    preset: str | None = None,
    assignments: list[str] | None = None,
) -> ScenarioConfig:
    """Config file, then ``--preset``, then ``--set`` overrides, then validation."""
    raw: dict = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    if preset is not None:
        raw["preset"] = preset
    if path is None and preset is None:
        raw["preset"] = "paper-fig2"
    return from_dict(apply_overrides(raw, assignments or []))

"""Scenario configuration: INI-style files, presets, validation, round-trip.

A configuration is flat key/value text with named sections:

    [scenario]
    name = fig4
    initial_states = 01

    [schedule]
    z1 = 2.5
    z2 = 1.5
    x1 = 1.0
    x2 = 7.3
    j = 1.3
    zz = 0.2
    t_ad = 5, 10, 20, 30

    [noise]
    enabled = false
    t1_us = 50, 50
    t2_us = 40, 40
    nth = 0.01, 0.01

    [simulation]
    dt_us = 0.002
    n_samples = 300
    shots = 0
    seed = 0

    [output]
    directory = out
    format = csv

Built-in scenario names prefill every field; a file only needs to state
what differs.  ``validate_config`` returns either a fully-defaulted
``ScenarioConfig`` or the complete list of violations.  In exact mode
(shots = 0) the seed is canonicalized to 0, keeping outputs manifestly
seed-independent.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, replace

from .dynamics import BASIS_LABELS, NoiseModel
from .schedule import ProtocolSchedule

__all__ = [
    "ConfigParse",
    "ScenarioConfig",
    "SCENARIO_NAMES",
    "SCENARIO_SUMMARIES",
    "validate_config",
    "load_config",
    "preset_text",
]


class ConfigParse(ValueError):
    """Raised by loaders when a configuration is unusable."""


SCENARIO_NAMES = ("fig1", "chevron", "fig3", "fig3a", "fig3b", "fig4", "table1", "custom")

SCENARIO_SUMMARIES = {
    "fig1": "single-qubit chirped sweep (z=3, x=2.7 MHz), both drive frames",
    "chevron": "calibration pipeline: chevron map, Rabi/dispersive/coupling fits",
    "fig3": "both two-qubit sweep variants: crossing (j=0) and avoided crossing (j=1.7)",
    "fig3a": "two-qubit sweep with coupling off (j=0): levels cross",
    "fig3b": "two-qubit sweep with j=1.7 MHz: avoided crossing, adiabatic passage",
    "fig4": "asymmetric sweep (j=1.3 MHz) over a t_ad sweep: diabatic-to-adiabatic crossover",
    "table1": "fig4 sweep with noise from |00> and |11> plus zero-time mitigation report",
    "custom": "user-supplied schedule parameters",
}

_KNOWN_KEYS = {
    "scenario": ("name", "initial_states"),
    "schedule": ("z1", "z2", "x1", "x2", "j", "zz", "t_ad"),
    "noise": ("enabled", "t1_us", "t2_us", "nth"),
    "simulation": ("dt_us", "n_samples", "shots", "seed"),
    "output": ("directory", "format"),
}

_FIG3 = dict(z1=2.5, z2=1.5, x1=2.0, x2=4.1, zz=0.2)
_FIG4 = dict(z1=2.5, z2=1.5, x1=1.0, x2=7.3, j=1.3, zz=0.2)

# Per-scenario prefills; anything not set here falls back to _BASE_DEFAULTS.
_PRESETS: dict[str, dict] = {
    "fig1": dict(z1=0.0, z2=3.0, x1=0.0, x2=2.7, j=0.0, zz=0.0, t_ad=(10.0,),
                 initial_states=("01",)),
    "chevron": dict(z1=0.0, z2=0.0, x1=0.0, x2=0.0, j=2.0, zz=0.0, t_ad=(8.0,),
                    n_samples=160, initial_states=()),
    "fig3": dict(**_FIG3, j=1.7, t_ad=(30.0,), initial_states=("01", "10", "11")),
    "fig3a": dict(**_FIG3, j=0.0, t_ad=(30.0,), initial_states=("01", "10", "11")),
    "fig3b": dict(**_FIG3, j=1.7, t_ad=(30.0,), initial_states=("01", "10", "11")),
    "fig4": dict(**_FIG4, t_ad=(5.0, 10.0, 20.0, 30.0), initial_states=("01",)),
    "table1": dict(**_FIG4, t_ad=(5.0, 10.0, 20.0, 30.0), noise_enabled=True,
                   initial_states=("00", "11")),
    "custom": dict(),
}

_BASE_DEFAULTS = dict(
    j=0.0,
    zz=0.0,
    noise_enabled=False,
    t1_us=(50.0, 50.0),
    t2_us=(40.0, 40.0),
    nth=(0.01, 0.01),
    dt_us=0.002,
    n_samples=300,
    shots=0,
    seed=0,
    initial_states=("01",),
    out_dir="out",
    format="csv",
)

# Fields a custom scenario must state explicitly (no physical default).
_REQUIRED_CUSTOM = ("z1", "z2", "x1", "x2", "t_ad")


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully-resolved scenario description (all defaults applied)."""

    name: str
    z1: float
    z2: float
    x1: float
    x2: float
    j: float
    zz: float
    t_ad: tuple[float, ...]
    noise_enabled: bool
    t1_us: tuple[float, float]
    t2_us: tuple[float, float]
    nth: tuple[float, float]
    dt_us: float
    n_samples: int
    shots: int
    seed: int
    initial_states: tuple[str, ...]
    out_dir: str
    format: str

    def schedule(self, t_ad: float | None = None) -> ProtocolSchedule:
        """ProtocolSchedule for one duration (default: the first listed)."""
        duration = self.t_ad[0] if t_ad is None else t_ad
        return ProtocolSchedule(z1=self.z1, z2=self.z2, x1=self.x1, x2=self.x2,
                                j_final=self.j, zz=self.zz, t_ad=duration)

    def noise_model(self) -> NoiseModel | None:
        """NoiseModel when noise is enabled, else None."""
        if not self.noise_enabled:
            return None
        return NoiseModel(t1=self.t1_us, t2=self.t2_us, n_th=self.nth)

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)

    def to_text(self) -> str:
        """Canonical INI text that re-parses to this exact config."""
        fmt = lambda v: repr(float(v))
        pair = lambda v: ", ".join(repr(float(x)) for x in v)
        lines = [
            "[scenario]",
            f"name = {self.name}",
            f"initial_states = {', '.join(self.initial_states)}",
            "",
            "[schedule]",
            f"z1 = {fmt(self.z1)}",
            f"z2 = {fmt(self.z2)}",
            f"x1 = {fmt(self.x1)}",
            f"x2 = {fmt(self.x2)}",
            f"j = {fmt(self.j)}",
            f"zz = {fmt(self.zz)}",
            f"t_ad = {pair(self.t_ad)}",
            "",
            "[noise]",
            f"enabled = {'true' if self.noise_enabled else 'false'}",
            f"t1_us = {pair(self.t1_us)}",
            f"t2_us = {pair(self.t2_us)}",
            f"nth = {pair(self.nth)}",
            "",
            "[simulation]",
            f"dt_us = {fmt(self.dt_us)}",
            f"n_samples = {self.n_samples}",
            f"shots = {self.shots}",
            f"seed = {self.seed}",
            "",
            "[output]",
            f"directory = {self.out_dir}",
            f"format = {self.format}",
        ]
        return "\n".join(lines) + "\n"


def _parse_float(raw: str, where: str, errors: list[str]) -> float | None:
    try:
        value = float(raw)
    except ValueError:
        errors.append(f"{where}: not a number: {raw!r}")
        return None
    if math.isnan(value):
        errors.append(f"{where}: NaN is not allowed")
        return None
    return value


def _parse_float_list(raw: str, where: str, errors: list[str]) -> tuple[float, ...] | None:
    items = [piece.strip() for piece in raw.split(",") if piece.strip()]
    if not items:
        errors.append(f"{where}: empty list")
        return None
    out = []
    for piece in items:
        value = _parse_float(piece, where, errors)
        if value is None:
            return None
        out.append(value)
    return tuple(out)


def _parse_pair(raw: str, where: str, errors: list[str]) -> tuple[float, float] | None:
    values = _parse_float_list(raw, where, errors)
    if values is None:
        return None
    if len(values) == 1:
        return (values[0], values[0])
    if len(values) == 2:
        return (values[0], values[1])
    errors.append(f"{where}: expected one or two values, got {len(values)}")
    return None


def _parse_int(raw: str, where: str, errors: list[str]) -> int | None:
    try:
        return int(raw)
    except ValueError:
        errors.append(f"{where}: not an integer: {raw!r}")
        return None


def _parse_bool(raw: str, where: str, errors: list[str]) -> bool | None:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    errors.append(f"{where}: not a boolean: {raw!r}")
    return None


def validate_config(text: str, override_name: str | None = None) -> tuple[ScenarioConfig | None, list[str]]:
    """Parse and validate configuration text.

    Returns ``(config, errors)``: a fully-defaulted config and an empty
    list on success, or ``None`` and the complete list of violations.
    ``override_name`` substitutes the scenario name before preset
    resolution (the CLI's --scenario flag).
    """
    errors: list[str] = []
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        return None, [f"parse error: {exc}"]

    raw: dict[str, dict[str, str]] = {}
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            errors.append(f"unknown section [{section}]")
            continue
        raw[section] = {}
        for key, value in parser.items(section):
            if key not in _KNOWN_KEYS[section]:
                errors.append(f"unknown key {section}.{key}")
            else:
                raw[section][key] = value

    name = override_name if override_name is not None else raw.get("scenario", {}).get("name")
    if name is None:
        errors.append("scenario.name: missing required field")
        return None, errors
    name = name.strip()
    if name not in SCENARIO_NAMES:
        errors.append(
            f"scenario.name: unknown scenario {name!r}; choose from {', '.join(SCENARIO_NAMES)}"
        )
        return None, errors

    merged: dict = dict(_BASE_DEFAULTS)
    merged.update(_PRESETS[name])
    merged["name"] = name

    if name == "custom":
        sched_raw = raw.get("schedule", {})
        for field_name in _REQUIRED_CUSTOM:
            if field_name not in sched_raw:
                errors.append(f"schedule.{field_name}: missing required field for a custom scenario")

    sched = raw.get("schedule", {})
    for key in ("z1", "z2", "x1", "x2", "j", "zz"):
        if key in sched:
            value = _parse_float(sched[key], f"schedule.{key}", errors)
            if value is not None:
                merged[key] = value
    if "t_ad" in sched:
        values = _parse_float_list(sched["t_ad"], "schedule.t_ad", errors)
        if values is not None:
            merged["t_ad"] = values

    noise = raw.get("noise", {})
    if "enabled" in noise:
        value = _parse_bool(noise["enabled"], "noise.enabled", errors)
        if value is not None:
            merged["noise_enabled"] = value
    for key, target in (("t1_us", "t1_us"), ("t2_us", "t2_us"), ("nth", "nth")):
        if key in noise:
            value = _parse_pair(noise[key], f"noise.{key}", errors)
            if value is not None:
                merged[target] = value

    sim = raw.get("simulation", {})
    if "dt_us" in sim:
        value = _parse_float(sim["dt_us"], "simulation.dt_us", errors)
        if value is not None:
            merged["dt_us"] = value
    for key in ("n_samples", "shots", "seed"):
        if key in sim:
            value = _parse_int(sim[key], f"simulation.{key}", errors)
            if value is not None:
                merged[key] = value

    scen = raw.get("scenario", {})
    if "initial_states" in scen:
        states = tuple(piece.strip() for piece in scen["initial_states"].split(",")
                       if piece.strip())
        merged["initial_states"] = states

    out = raw.get("output", {})
    if "directory" in out:
        merged["out_dir"] = out["directory"].strip()
    if "format" in out:
        merged["format"] = out["format"].strip().lower()

    if "t_ad" not in merged or not merged.get("t_ad"):
        errors.append("schedule.t_ad: missing required field")
        return None, errors

    # Semantic checks (collected, not short-circuited).
    for key in ("z1", "z2", "x1", "x2", "j", "zz"):
        value = merged.get(key)
        if value is None:
            continue
        if not math.isfinite(value):
            errors.append(f"schedule.{key}: must be finite, got {value}")
    for idx, t_ad in enumerate(merged["t_ad"]):
        if not math.isfinite(t_ad) or t_ad <= 0.0:
            errors.append(f"schedule.t_ad[{idx}]: must be positive and finite, got {t_ad}")
    if len(set(merged["t_ad"])) != len(merged["t_ad"]):
        errors.append("schedule.t_ad: durations must be distinct")

    dt = merged["dt_us"]
    if not math.isfinite(dt) or dt <= 0.0:
        errors.append(f"simulation.dt_us: must be positive, got {dt}")
    else:
        finite_tads = [t for t in merged["t_ad"] if math.isfinite(t) and t > 0]
        if finite_tads and dt > min(finite_tads) / 100.0:
            errors.append(
                f"simulation.dt_us: dt too large; need dt <= min(t_ad)/100 = "
                f"{min(finite_tads) / 100.0}"
            )
    if merged["n_samples"] < 1:
        errors.append(f"simulation.n_samples: must be >= 1, got {merged['n_samples']}")
    if merged["shots"] < 0:
        errors.append(f"simulation.shots: must be >= 0, got {merged['shots']}")

    for q in range(2):
        t1, t2 = merged["t1_us"][q], merged["t2_us"][q]
        if t1 <= 0 or t2 <= 0:
            errors.append(f"noise: qubit {q + 1} T1/T2 must be positive (use inf to disable)")
        elif math.isfinite(t2) and t2 > 2.0 * t1:
            errors.append(
                f"noise: qubit {q + 1} has T2 = {t2} > 2*T1 = {2 * t1} "
                f"(negative pure-dephasing rate)"
            )
        if merged["nth"][q] < 0:
            errors.append(f"noise.nth: qubit {q + 1} must be >= 0")

    for state in merged["initial_states"]:
        if state not in BASIS_LABELS:
            errors.append(
                f"scenario.initial_states: unknown state {state!r}; "
                f"choose from {', '.join(BASIS_LABELS)}"
            )
    if not merged["initial_states"] and name not in ("chevron",):
        errors.append("scenario.initial_states: at least one initial state required")

    if merged["format"] not in ("csv", "json"):
        errors.append(f"output.format: must be csv or json, got {merged['format']!r}")
    if not merged["out_dir"]:
        errors.append("output.directory: must be nonempty")

    if errors:
        return None, errors

    # Exact mode draws no random numbers; canonicalize the seed so equal
    # outputs come from equal configs.
    if merged["shots"] == 0:
        merged["seed"] = 0

    config = ScenarioConfig(
        name=merged["name"], z1=merged["z1"], z2=merged["z2"], x1=merged["x1"],
        x2=merged["x2"], j=merged["j"], zz=merged["zz"], t_ad=tuple(merged["t_ad"]),
        noise_enabled=merged["noise_enabled"], t1_us=tuple(merged["t1_us"]),
        t2_us=tuple(merged["t2_us"]), nth=tuple(merged["nth"]), dt_us=merged["dt_us"],
        n_samples=merged["n_samples"], shots=merged["shots"], seed=merged["seed"],
        initial_states=tuple(merged["initial_states"]), out_dir=merged["out_dir"],
        format=merged["format"],
    )
    return config, []


def load_config(path: str) -> ScenarioConfig:
    """Read and validate a config file; raise ConfigParse on any violation."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigParse(f"cannot read config {path}: {exc}") from exc
    config, errors = validate_config(text)
    if config is None:
        raise ConfigParse("; ".join(errors))
    return config


def preset_text(name: str) -> str:
    """Canonical config text for a built-in scenario."""
    if name not in SCENARIO_NAMES:
        raise ConfigParse(f"unknown scenario {name!r}")
    config, errors = validate_config(f"[scenario]\nname = {name}\n")
    if config is None:
        raise ConfigParse("; ".join(errors))
    return config.to_text()

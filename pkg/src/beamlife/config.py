"""Scenario configuration: schema, validation, JSON loading, presets.

Config files are JSON with the same nesting as the dataclasses below.
Unknown keys are rejected with the offending key path. An empty file
resolves to the defaults, which equal the ``pa-uniform`` preset.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace

__all__ = [
    "ConfigError",
    "DestinationsSpec",
    "EnergySpec",
    "StrategySpec",
    "DeathSpec",
    "ScenarioConfig",
    "load_config",
    "preset",
    "preset_names",
    "preset_description",
]

STRATEGY_KINDS = ("cb_epa", "cb_pa", "centralized_min_power", "centralized_max_gain")
NOMINAL_MODES = ("first_round", "target")
SNR_AVERAGE_MODES = ("linear", "db")
CONDITIONING_MODES = ("alive", "zero_fill")

# One-shot allocation: a reallocation period no practical run ever reaches.
NEVER_REALLOCATE = 10**9


class ConfigError(ValueError):
    """A configuration file or dictionary failed validation."""


@dataclass(frozen=True)
class DestinationsSpec:
    """Receiver geometry; one link per azimuth entry, all at the same range."""

    range_m: float = 1000.0
    azimuths_deg: tuple = (0.0,)


@dataclass(frozen=True)
class EnergySpec:
    kind: str = "uniform"        # uniform | gaussian
    e_max: float = 1.0           # battery capacity, joules
    mean: float = 0.5            # distribution mean, joules
    sigma: float = 0.15          # gaussian standard deviation, joules


@dataclass(frozen=True)
class StrategySpec:
    kind: str = "cb_pa"
    levels: int = 8              # weight quantization levels, 0 = continuous
    period: int = 1              # slots between weight recomputations


@dataclass(frozen=True)
class DeathSpec:
    max_dead_fraction: float = 0.9
    snr_drop_db: float = 3.0
    nominal: str = "first_round"  # reference for the SNR drop: first_round | target


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one simulation scenario.

    Exactly one of ``target_snr_db`` / ``target_rate_bits`` is set; the
    other is derived through the log2(1 + snr) rate relation.
    """

    n: int = 100
    disk_radius_wavelengths: float = 250.0
    wavelength_m: float = 0.125
    destinations: DestinationsSpec = field(default_factory=DestinationsSpec)
    target_snr_db: float = 11.76
    target_rate_bits: float = None
    noise_db: float = -100.0
    pl0_db: float = 40.0
    alpha: float = 2.0
    d0_m: float = 1.0
    shadowing_sigma2_db: float = 16.0
    amplitude_divisor: int = 20
    phase_error_deg_bound: float = 5.0
    energy: EnergySpec = field(default_factory=EnergySpec)
    strategy: StrategySpec = field(default_factory=StrategySpec)
    death: DeathSpec = field(default_factory=DeathSpec)
    runs: int = 200
    master_seed: int = 20231
    t_slot_s: float = 2.0e10
    p_max: float = 1.2e-11
    max_rounds: int = 1_000_000
    quantization_include_zero: bool = True
    channel_redraw_period: int = 0        # rounds between channel redraws, 0 = never
    snr_average: str = "linear"           # ensemble SNR averaging domain
    ensemble_conditioning: str = "alive"  # per-round averaging convention
    wasted_percent_of_realized: bool = False

    @property
    def links(self):
        return len(self.destinations.azimuths_deg)

    def target_snr_linear(self):
        if self.target_rate_bits is not None:
            return 2.0 ** self.target_rate_bits - 1.0
        return 10.0 ** (self.target_snr_db / 10.0)

    def resolved_target_snr_db(self):
        snr = self.target_snr_linear()
        return 10.0 * math.log10(snr) if snr > 0 else -math.inf

    def to_dict(self):
        return {
            "n": self.n,
            "disk_radius_wavelengths": self.disk_radius_wavelengths,
            "wavelength_m": self.wavelength_m,
            "destinations": {
                "range_m": self.destinations.range_m,
                "azimuths_deg": list(self.destinations.azimuths_deg),
            },
            "target_snr_db": self.target_snr_db,
            "target_rate_bits": self.target_rate_bits,
            "noise_db": self.noise_db,
            "pl0_db": self.pl0_db,
            "alpha": self.alpha,
            "d0_m": self.d0_m,
            "shadowing_sigma2_db": self.shadowing_sigma2_db,
            "amplitude_divisor": self.amplitude_divisor,
            "phase_error_deg_bound": self.phase_error_deg_bound,
            "energy": {
                "kind": self.energy.kind,
                "e_max": self.energy.e_max,
                "mean": self.energy.mean,
                "sigma": self.energy.sigma,
            },
            "strategy": {
                "kind": self.strategy.kind,
                "levels": self.strategy.levels,
                "period": self.strategy.period,
            },
            "death": {
                "max_dead_fraction": self.death.max_dead_fraction,
                "snr_drop_db": self.death.snr_drop_db,
                "nominal": self.death.nominal,
            },
            "runs": self.runs,
            "master_seed": self.master_seed,
            "t_slot_s": self.t_slot_s,
            "p_max": self.p_max,
            "max_rounds": self.max_rounds,
            "quantization_include_zero": self.quantization_include_zero,
            "channel_redraw_period": self.channel_redraw_period,
            "snr_average": self.snr_average,
            "ensemble_conditioning": self.ensemble_conditioning,
            "wasted_percent_of_realized": self.wasted_percent_of_realized,
        }


def _reject_unknown(data, known, path):
    for key in data:
        if key not in known:
            raise ConfigError(f"{path}{key}: unknown key")


def _section(cls, data, path, **overrides):
    known = {f.name for f in fields(cls)}
    _reject_unknown(data, known, path)
    kwargs = dict(data)
    if "azimuths_deg" in kwargs:
        if not isinstance(kwargs["azimuths_deg"], (list, tuple)) or not kwargs["azimuths_deg"]:
            raise ConfigError(f"{path}azimuths_deg: need a non-empty list of angles")
        kwargs["azimuths_deg"] = tuple(float(a) for a in kwargs["azimuths_deg"])
    kwargs.update(overrides)
    return cls(**kwargs)


def from_dict(data):
    """Build a ScenarioConfig from a (possibly partial) plain dictionary."""
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")
    top_known = {f.name for f in fields(ScenarioConfig)}
    _reject_unknown(data, top_known, "")
    kwargs = dict(data)
    for name, cls in (("destinations", DestinationsSpec), ("energy", EnergySpec),
                      ("strategy", StrategySpec), ("death", DeathSpec)):
        if name in kwargs:
            if not isinstance(kwargs[name], dict):
                raise ConfigError(f"{name}: must be an object")
            kwargs[name] = _section(cls, kwargs[name], f"{name}.")
    has_snr = kwargs.get("target_snr_db") is not None and "target_snr_db" in kwargs
    has_rate = kwargs.get("target_rate_bits") is not None and "target_rate_bits" in kwargs
    if has_snr and has_rate:
        raise ConfigError("target_snr_db/target_rate_bits: set exactly one, not both")
    if has_rate:
        kwargs["target_snr_db"] = None
    if has_snr:
        kwargs["target_rate_bits"] = None
    try:
        cfg = ScenarioConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    validate(cfg)
    return cfg


def _check(cond, path, message):
    if not cond:
        raise ConfigError(f"{path}: {message}")


def validate(cfg):
    """Raise ConfigError with a key path on the first violated constraint."""
    _check(cfg.n >= 1, "n", f"must be at least 1, got {cfg.n}")
    _check(cfg.disk_radius_wavelengths >= 0, "disk_radius_wavelengths", "must be non-negative")
    _check(cfg.wavelength_m > 0, "wavelength_m", "must be positive")
    _check(cfg.destinations.range_m > 0, "destinations.range_m", "must be positive")
    k = cfg.links
    _check(1 <= k <= cfg.n, "destinations.azimuths_deg", f"need between 1 and n={cfg.n} links, got {k}")
    if (cfg.target_snr_db is None) == (cfg.target_rate_bits is None):
        raise ConfigError("target_snr_db/target_rate_bits: exactly one must be set")
    if cfg.target_rate_bits is not None:
        _check(cfg.target_rate_bits >= 0, "target_rate_bits", "must be non-negative")
    _check(cfg.alpha > 0, "alpha", f"must be positive, got {cfg.alpha}")
    _check(cfg.d0_m > 0, "d0_m", "must be positive")
    _check(cfg.destinations.range_m >= cfg.d0_m, "destinations.range_m", "must be at least d0_m")
    _check(cfg.shadowing_sigma2_db >= 0, "shadowing_sigma2_db", "must be non-negative")
    _check(cfg.amplitude_divisor in (10, 20), "amplitude_divisor", "must be 10 or 20")
    _check(cfg.phase_error_deg_bound >= 0, "phase_error_deg_bound", "must be non-negative")
    _check(cfg.energy.kind in ("uniform", "gaussian"), "energy.kind", f"unknown kind {cfg.energy.kind!r}")
    _check(cfg.energy.e_max > 0, "energy.e_max", "must be positive")
    _check(0 < cfg.energy.mean <= cfg.energy.e_max, "energy.mean", "must lie in (0, e_max]")
    if cfg.energy.kind == "uniform":
        _check(
            math.isclose(cfg.energy.mean, cfg.energy.e_max / 2, rel_tol=1e-9),
            "energy.mean",
            "uniform draws span [0, e_max]; mean must be e_max/2",
        )
    _check(cfg.energy.sigma >= 0, "energy.sigma", "must be non-negative")
    _check(cfg.strategy.kind in STRATEGY_KINDS, "strategy.kind", f"unknown kind {cfg.strategy.kind!r}")
    levels = cfg.strategy.levels
    _check(levels >= 0 and (levels == 0 or levels & (levels - 1) == 0), "strategy.levels",
           f"must be 0 or a power of two, got {levels}")
    _check(cfg.strategy.period >= 1, "strategy.period", "must be at least 1")
    _check(0 < cfg.death.max_dead_fraction <= 1, "death.max_dead_fraction", "must lie in (0, 1]")
    _check(cfg.death.snr_drop_db > 0, "death.snr_drop_db", "must be positive")
    _check(cfg.death.nominal in NOMINAL_MODES, "death.nominal", f"must be one of {NOMINAL_MODES}")
    _check(cfg.runs >= 1, "runs", "must be at least 1")
    _check(cfg.t_slot_s > 0, "t_slot_s", "must be positive")
    _check(cfg.p_max > 0, "p_max", "must be positive")
    _check(cfg.max_rounds >= 1, "max_rounds", "must be at least 1")
    _check(cfg.channel_redraw_period >= 0, "channel_redraw_period", "must be non-negative")
    _check(cfg.snr_average in SNR_AVERAGE_MODES, "snr_average", f"must be one of {SNR_AVERAGE_MODES}")
    _check(cfg.ensemble_conditioning in CONDITIONING_MODES, "ensemble_conditioning",
           f"must be one of {CONDITIONING_MODES}")
    return cfg


def load_config(path):
    """Load and validate a scenario config (or a run manifest) from JSON."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if not text.strip():
        return from_dict({})
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if isinstance(data, dict) and "config" in data and "artifact_version" in data:
        data = data["config"]  # a run manifest round-trips as a config
    return from_dict(data)


_DEFAULT = ScenarioConfig()

_EPA = StrategySpec(kind="cb_epa", levels=0, period=NEVER_REALLOCATE)
_GAUSSIAN = EnergySpec(kind="gaussian", e_max=1.0, mean=0.5, sigma=0.15)

_PRESETS = {
    "pa-uniform": (
        "residual-proportional allocation, uniform initial energy (the defaults)",
        _DEFAULT,
    ),
    "epa-uniform": (
        "equal power allocation benchmark, uniform initial energy",
        replace(_DEFAULT, strategy=_EPA),
    ),
    "pa-gaussian": (
        "residual-proportional allocation, gaussian initial energy",
        replace(_DEFAULT, energy=_GAUSSIAN),
    ),
    "epa-gaussian": (
        "equal power allocation benchmark, gaussian initial energy",
        replace(_DEFAULT, energy=_GAUSSIAN, strategy=_EPA),
    ),
    "single-link": (
        "single link at 4 bits/s/Hz, gaussian energy",
        replace(_DEFAULT, energy=_GAUSSIAN, target_snr_db=None, target_rate_bits=4.0),
    ),
    "multi-link": (
        "two links at 2 bits/s/Hz each (opposite azimuths), gaussian energy",
        replace(
            _DEFAULT,
            energy=_GAUSSIAN,
            target_snr_db=None,
            target_rate_bits=2.0,
            destinations=DestinationsSpec(range_m=1000.0, azimuths_deg=(0.0, 180.0)),
        ),
    ),
    "rate-4bit": (
        "single link targeting 4 bits/s/Hz, uniform energy",
        replace(_DEFAULT, target_snr_db=None, target_rate_bits=4.0),
    ),
    "rate-3bit": (
        "single link targeting 3 bits/s/Hz, uniform energy",
        replace(_DEFAULT, target_snr_db=None, target_rate_bits=3.0),
    ),
    "quant-2": (
        "weight quantization with 2 levels, uniform energy",
        replace(_DEFAULT, strategy=StrategySpec(kind="cb_pa", levels=2, period=1)),
    ),
    "quant-4": (
        "weight quantization with 4 levels, uniform energy",
        replace(_DEFAULT, strategy=StrategySpec(kind="cb_pa", levels=4, period=1)),
    ),
    "quant-8": (
        "weight quantization with 8 levels, uniform energy",
        replace(_DEFAULT, strategy=StrategySpec(kind="cb_pa", levels=8, period=1)),
    ),
}


def preset(name):
    """Return the named preset ScenarioConfig."""
    try:
        return _PRESETS[name][1]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(_PRESETS)}") from None


def preset_names():
    return list(_PRESETS)


def preset_description(name):
    try:
        return _PRESETS[name][0]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}") from None

"""Experiment configuration: strict JSON parsing into typed objects."""
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .channels import AXES, RATE_KINDS, ChannelSpec, Constant, NoiseAngles
from .divisibility import DEFAULT_POINTS, DEFAULT_TOLERANCE, TimeGrid

EXPERIMENTS = (
    "divisibility-scan",
    "semigroup-check",
    "fidelity-p-alpha",
    "fidelity-vs-time",
    "robustness-campaign",
)
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FidelityOptions:
    p_points: int = 101
    alpha_points: int = 241
    gamma: float = 1.0
    alphas: Tuple[float, ...] = tuple(k * math.pi / 12 for k in range(7))
    t_points: int = 500
    t_max: float = 5.0
    axis: str = "x"


@dataclass(frozen=True)
class CampaignOptions:
    n_rates: int = 10
    n_draws: int = 50
    rate_range: Tuple[float, float] = (0.0, 5.0)
    mode: str = "single"
    axis: str = "x"
    check_semigroup: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    channel: ChannelSpec = field(default_factory=ChannelSpec)
    grid: Optional[TimeGrid] = None
    tolerance: float = DEFAULT_TOLERANCE
    seed: int = 0
    output_path: Optional[str] = None
    output_format: str = "csv"
    fidelity: FidelityOptions = field(default_factory=FidelityOptions)
    campaign: CampaignOptions = field(default_factory=CampaignOptions)

    def resolved_grid(self):
        return self.grid if self.grid is not None else TimeGrid.default_for(self.channel)


def _reject_unknown(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(extra)}")


def _number(value, where, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number")
    if not math.isfinite(value):
        raise ConfigError(f"{where} must be finite")
    if integer and int(value) != value:
        raise ConfigError(f"{where} must be an integer")
    return int(value) if integer else float(value)


def parse_rate(value, where="rate"):
    """A rate is either a bare number (constant) or ``{"kind": ..., <param>: ...}``."""
    if not isinstance(value, dict):
        try:
            return Constant(_number(value, where))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    kind = value.get("kind")
    if kind not in RATE_KINDS:
        raise ConfigError(f"{where}.kind must be one of {sorted(RATE_KINDS)}")
    cls = RATE_KINDS[kind]
    param = next(iter(cls.__dataclass_fields__))
    _reject_unknown(value, ("kind", param), where)
    if param not in value:
        raise ConfigError(f"{where} of kind {kind!r} needs {param!r}")
    try:
        return cls(_number(value[param], f"{where}.{param}"))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def rate_to_json(rate):
    kind = next(k for k, cls in RATE_KINDS.items() if isinstance(rate, cls))
    param = next(iter(rate.__dataclass_fields__))
    return {"kind": kind, param: getattr(rate, param)}


def parse_channel(obj):
    _reject_unknown(obj, ("rates", "angles", "single_channel_axis", "single_decay_factor"), "channel")
    rates = obj.get("rates", [0, 0, 0])
    if not isinstance(rates, list) or len(rates) != 3:
        raise ConfigError("channel.rates must be a list of three rates")
    rates = tuple(parse_rate(r, f"channel.rates[{i}]") for i, r in enumerate(rates))
    angles = obj.get("angles", list(NoiseAngles().as_tuple()))
    if not isinstance(angles, list) or len(angles) != 3:
        raise ConfigError("channel.angles must be a list of three numbers")
    angles = NoiseAngles(*(_number(a, f"channel.angles[{i}]") for i, a in enumerate(angles)))
    axis = obj.get("single_channel_axis")
    if axis is not None and axis not in AXES:
        raise ConfigError(f"channel.single_channel_axis must be one of {AXES} or null")
    factor = _number(obj.get("single_decay_factor", 1.0), "channel.single_decay_factor")
    try:
        return ChannelSpec(rates, angles, axis, factor)
    except ValueError as exc:
        raise ConfigError(f"channel: {exc}") from None


def parse_config(obj):
    """Build an :class:`ExperimentConfig` from a decoded JSON object."""
    _reject_unknown(
        obj,
        ("experiment", "channel", "grid", "tolerance", "seed", "output_path", "output_format",
         "fidelity", "campaign"),
        "config",
    )
    experiment = obj.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}")
    channel = parse_channel(obj.get("channel", {}))

    grid = None
    if "grid" in obj:
        g = obj["grid"]
        _reject_unknown(g, ("t_max", "points"), "grid")
        try:
            grid = TimeGrid(
                _number(g.get("t_max", TimeGrid.default_for(channel).t_max), "grid.t_max"),
                _number(g.get("points", DEFAULT_POINTS), "grid.points", integer=True),
            )
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from None

    tolerance = _number(obj.get("tolerance", DEFAULT_TOLERANCE), "tolerance")
    if tolerance <= 0:
        raise ConfigError("tolerance must be positive")
    seed = _number(obj.get("seed", 0), "seed", integer=True)
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    out_path = obj.get("output_path")
    if out_path is not None and not isinstance(out_path, str):
        raise ConfigError("output_path must be a string")
    fmt = obj.get("output_format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"output_format must be one of {FORMATS}")

    fid = FidelityOptions()
    if "fidelity" in obj:
        f = obj["fidelity"]
        _reject_unknown(f, FidelityOptions.__dataclass_fields__, "fidelity")
        kw = {}
        for key in ("p_points", "alpha_points", "t_points"):
            if key in f:
                kw[key] = _number(f[key], f"fidelity.{key}", integer=True)
        for key in ("gamma", "t_max"):
            if key in f:
                kw[key] = _number(f[key], f"fidelity.{key}")
        if "alphas" in f:
            if not isinstance(f["alphas"], list) or not f["alphas"]:
                raise ConfigError("fidelity.alphas must be a non-empty list")
            kw["alphas"] = tuple(_number(a, "fidelity.alphas[]") for a in f["alphas"])
        if "axis" in f:
            if f["axis"] not in AXES:
                raise ConfigError(f"fidelity.axis must be one of {AXES}")
            kw["axis"] = f["axis"]
        fid = FidelityOptions(**kw)

    camp = CampaignOptions()
    if "campaign" in obj:
        c = obj["campaign"]
        _reject_unknown(c, CampaignOptions.__dataclass_fields__, "campaign")
        kw = {}
        for key in ("n_rates", "n_draws"):
            if key in c:
                kw[key] = _number(c[key], f"campaign.{key}", integer=True)
                if kw[key] < 1:
                    raise ConfigError(f"campaign.{key} must be >= 1")
        if "rate_range" in c:
            rr = c["rate_range"]
            if not isinstance(rr, list) or len(rr) != 2:
                raise ConfigError("campaign.rate_range must be [low, high]")
            lo, hi = (_number(x, "campaign.rate_range[]") for x in rr)
            if not 0 <= lo < hi:
                raise ConfigError("campaign.rate_range needs 0 <= low < high")
            kw["rate_range"] = (lo, hi)
        if "mode" in c:
            if c["mode"] not in ("single", "multi"):
                raise ConfigError("campaign.mode must be 'single' or 'multi'")
            kw["mode"] = c["mode"]
        if "axis" in c:
            if c["axis"] not in AXES:
                raise ConfigError(f"campaign.axis must be one of {AXES}")
            kw["axis"] = c["axis"]
        if "check_semigroup" in c:
            if not isinstance(c["check_semigroup"], bool):
                raise ConfigError("campaign.check_semigroup must be a boolean")
            kw["check_semigroup"] = c["check_semigroup"]
        camp = CampaignOptions(**kw)

    return ExperimentConfig(experiment, channel, grid, tolerance, seed, out_path, fmt, fid, camp)


def load_config(path):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(obj)

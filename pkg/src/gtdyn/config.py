"""Run configuration: strict JSON schema with defaults.

Keys (all optional unless noted)::

    command      simulate | warren | converge | compare      (required)
    driver       poisson | bernoulli | lazy                  [poisson]
    rate, p, q   driver parameters                           [1, 0.5, 0.5]
    N            number of levels                            (required except compare)
    horizon      run length (integer for discrete drivers)   [10; warren: 1]
    times        evaluation times for converge               [[1.0]]
    n_values     time factors for converge                   [[25, 100, 400]]
    grid_step    Warren grid step                            [0.001]
    replicas     Monte Carlo replicas                        [1000]
    seed         unsigned 64-bit master seed                 [0]
    initial      "packed", "zero" or a list of levels        [packed; warren: zero]
    out          output path                                 [stdout]
    samples      path for a fixed-time sample dump
    driver_file  event-list CSV replacing the random driver
    stride       grid-time stride of the Warren CSV          [1]
    inputs       two sample dumps for compare
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from .driving import DRIVER_KINDS
from .errors import ConfigError

__all__ = ["RunConfig", "load_config", "config_from_dict", "COMMANDS"]

COMMANDS = ("simulate", "warren", "converge", "compare")


class ConfigParseError(ConfigError):
    pass


class ConfigValidationError(ConfigError):
    pass


@dataclass
class RunConfig:
    command: str
    driver: str = "poisson"
    rate: float = 1.0
    p: float = 0.5
    q: float = 0.5
    N: int | None = None
    horizon: float | None = None
    times: list = field(default_factory=lambda: [1.0])
    n_values: list = field(default_factory=lambda: [25, 100, 400])
    grid_step: float = 1e-3
    replicas: int = 1000
    seed: int = 0
    initial: object = None
    out: str | None = None
    samples: str | None = None
    driver_file: str | None = None
    stride: int = 1
    inputs: list | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def driver_params(self) -> dict:
        return {"poisson": {"rate": self.rate}, "bernoulli": {"p": self.p},
                "lazy": {"q": self.q}}[self.driver]


_KEYS = {f.name for f in fields(RunConfig)}


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


_TYPES = {
    "command": (str, "a string"),
    "driver": (str, "a string"),
    "rate": (_is_num, "a number"),
    "p": (_is_num, "a number"),
    "q": (_is_num, "a number"),
    "N": (_is_int, "an integer"),
    "horizon": (_is_num, "a number"),
    "times": (list, "a list"),
    "n_values": (list, "a list"),
    "grid_step": (_is_num, "a number"),
    "replicas": (_is_int, "an integer"),
    "seed": (_is_int, "an integer"),
    "out": (str, "a string"),
    "samples": (str, "a string"),
    "driver_file": (str, "a string"),
    "stride": (_is_int, "an integer"),
    "inputs": (list, "a list"),
}


def _type_ok(check, v):
    return check(v) if callable(check) and not isinstance(check, type) else isinstance(v, check)


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigParseError("config must be a JSON object", key_path="$")
    for key in raw:
        if key not in _KEYS:
            raise ConfigParseError(f"unknown key {key!r}", key_path=f"$.{key}")
    for key, value in raw.items():
        if value is None or key == "initial":
            continue
        check, desc = _TYPES[key]
        if not _type_ok(check, value):
            raise ConfigParseError(f"{key} must be {desc}", key_path=f"$.{key}")
    for key in ("times", "n_values", "inputs"):
        for k, v in enumerate(raw.get(key) or []):
            ok = _is_int(v) if key == "n_values" else (isinstance(v, str) if key == "inputs"
                                                       else _is_num(v))
            if not ok:
                raise ConfigParseError(f"bad element {v!r}", key_path=f"$.{key}[{k}]")
    if "command" not in raw:
        raise ConfigParseError("missing required key 'command'", key_path="$.command")
    cfg = RunConfig(**raw)
    _fill_defaults(cfg)
    _validate(cfg)
    return cfg


def load_config(source: str) -> RunConfig:
    """Parse and validate a JSON config, filling defaults."""
    try:
        raw = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"invalid JSON: {exc}", key_path="$") from None
    return config_from_dict(raw)


def _fill_defaults(cfg: RunConfig):
    if cfg.horizon is None:
        cfg.horizon = 1.0 if cfg.command == "warren" else 10.0
    if cfg.initial is None:
        cfg.initial = "zero" if cfg.command == "warren" else "packed"


def _bad(key, msg):
    raise ConfigValidationError(msg, key_path=f"$.{key}")


def _validate(cfg: RunConfig):
    if cfg.command not in COMMANDS:
        _bad("command", f"command must be one of {COMMANDS}, got {cfg.command!r}")
    if cfg.driver not in DRIVER_KINDS:
        _bad("driver", f"driver must be one of {DRIVER_KINDS}, got {cfg.driver!r}")
    if cfg.command != "compare":
        if cfg.N is None:
            _bad("N", "N is required")
        if cfg.N < 1:
            _bad("N", f"N must be >= 1, got {cfg.N}")
    if not cfg.rate > 0:
        _bad("rate", f"rate must be positive, got {cfg.rate}")
    if not 0 <= cfg.p <= 1:
        _bad("p", f"p must lie in [0, 1], got {cfg.p}")
    if not 0 <= cfg.q <= 0.5:
        _bad("q", f"q must lie in [0, 1/2], got {cfg.q}")
    if not cfg.horizon >= 0:
        _bad("horizon", f"horizon must be >= 0, got {cfg.horizon}")
    if cfg.driver in ("bernoulli", "lazy") and cfg.command == "simulate" \
            and cfg.driver_file is None and cfg.horizon != int(cfg.horizon):
        _bad("horizon", f"{cfg.driver} driver needs an integer horizon")
    if not cfg.grid_step > 0:
        _bad("grid_step", f"grid_step must be positive, got {cfg.grid_step}")
    if cfg.replicas < 1:
        _bad("replicas", f"replicas must be >= 1, got {cfg.replicas}")
    if not 0 <= cfg.seed < 1 << 64:
        _bad("seed", "seed must be an unsigned 64-bit integer")
    if cfg.stride < 1:
        _bad("stride", f"stride must be >= 1, got {cfg.stride}")
    if not cfg.times or any(t <= 0 for t in cfg.times):
        _bad("times", "times must be a nonempty list of positive numbers")
    if not cfg.n_values or any(n < 1 for n in cfg.n_values):
        _bad("n_values", "n_values must be a nonempty list of integers >= 1")
    if cfg.command == "compare" and (cfg.inputs is None or len(cfg.inputs) != 2):
        _bad("inputs", "compare needs exactly two input sample dumps")
    init = cfg.initial
    if not (init in ("packed", "zero") or (isinstance(init, list)
                                           and all(isinstance(l, list) for l in init))):
        _bad("initial", "initial must be 'packed', 'zero' or a list of levels")

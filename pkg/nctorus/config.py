"""
Run configuration: defaults, then an optional INI file, then command line flags.

Config file example:

    [algebra]
    theta12 = 0.7071067811865476
    n = 2

    [powers_rieffel]
    alpha = 0.25
    eps = 0.125
    trunc = 64
    samples = 1024

    [gauge]
    k = 1.0

    [tolerances]
    winding = 0.001

    [run]
    seed = 0
"""

import configparser
import dataclasses
import logging
import math
import os
import typing as t

from nctorus.algebra import DeformationMatrix
from nctorus.errors import ConfigError, NcTorusError
from nctorus.powers_rieffel import PRConfig


logger = logging.getLogger(__name__)

THREADS_ENV = "NCTORUS_THREADS"

TOLERANCES = {
    "trace": 1e-12,
    "chern": 1e-4,
    "winding": 1e-3,
    "winding_power": 5e-3,
    "gauge": 1e-10,
    "residue": 1e-2,
    "projection": 1e-3,
    "unitary": 2e-3,
}

# section -> key -> type
SCHEMA = {
    "algebra": {"theta12": float, "theta13": float, "theta23": float, "n": int},
    "powers_rieffel": {"alpha": float, "eps": float, "trunc": int, "samples": int},
    "gauge": {"k": float, "trials": int, "radius": int},
    "tolerances": {name: float for name in TOLERANCES},
    "run": {"seed": int, "max_power": int, "truncations": str, "t_grid": str},
}

DEFAULTS = {
    "theta12": 0.0,
    "theta13": 0.0,
    "theta23": 0.0,
    "n": 1,
    "alpha": 0.25,
    "eps": 0.125,
    "trunc": 64,
    "samples": 1024,
    "k": 1.0,
    "trials": 8,
    "radius": 2,
    "seed": 0,
    "max_power": 2,
    "truncations": "16 32 64 128",
    "t_grid": "0.01 0.005 0.002 0.001",
    **{f"tol_{name}": value for name, value in TOLERANCES.items()},
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    theta: DeformationMatrix = DeformationMatrix()
    n: int = 1
    pr: PRConfig = PRConfig()
    k: float = 1.0
    tolerances: t.Mapping[str, float] = dataclasses.field(default_factory=lambda: dict(TOLERANCES))
    seed: int = 0
    trials: int = 8
    radius: int = 2
    max_power: int = 2
    truncations: t.Tuple[int, ...] = (16, 32, 64, 128)
    t_grid: t.Tuple[float, ...] = (0.01, 0.005, 0.002, 0.001)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigError(f"n must be positive, got {self.n}")
        if not math.isfinite(self.k):
            raise ConfigError(f"k must be finite, got {self.k}")
        if self.seed < 0:
            raise ConfigError(f"seed must be unsigned, got {self.seed}")
        if self.trials < 1 or self.radius < 0 or self.max_power < 1:
            raise ConfigError("trials and max_power must be positive, radius non-negative")
        unknown = set(self.tolerances) - set(TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerances: {', '.join(sorted(unknown))}")
        for name, value in self.tolerances.items():
            if not value > 0:
                raise ConfigError(f"tolerance {name} must be positive, got {value}")

    def tol(self, name: str) -> float:
        return self.tolerances[name]


def read_file(path: str) -> t.Dict[str, t.Any]:
    """Flat {setting: value} from an INI file; tolerances become tol_<name>."""
    parser = configparser.ConfigParser()
    try:
        with open(path) as f:
            parser.read_file(f)
    except configparser.Error as e:
        raise ConfigError(f"{path}: {e}") from e

    settings = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key, raw in parser[section].items():
            if key not in SCHEMA[section]:
                raise ConfigError(f"{path}: unknown key '{key}' in [{section}]")
            try:
                value = SCHEMA[section][key](raw)
            except ValueError as e:
                raise ConfigError(f"{path}: [{section}] {key}: {e}") from e
            settings[f"tol_{key}" if section == "tolerances" else key] = value
    return settings


def _numbers(text: str, kind: t.Callable) -> t.Tuple:
    try:
        return tuple(kind(x) for x in text.replace(",", " ").split())
    except ValueError as e:
        raise ConfigError(f"bad number list '{text}': {e}") from e


def build(path: t.Optional[str] = None, overrides: t.Optional[t.Mapping[str, t.Any]] = None) -> RunConfig:
    """Defaults < file < overrides (None values in overrides are ignored)."""
    settings = dict(DEFAULTS)
    if path:
        settings.update(read_file(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            if key not in DEFAULTS:
                raise ConfigError(f"unknown setting '{key}'")
            settings[key] = value

    try:
        cfg = RunConfig(
            theta=DeformationMatrix(settings["theta12"], settings["theta13"], settings["theta23"]),
            n=settings["n"],
            pr=PRConfig(settings["alpha"], settings["eps"], settings["trunc"], settings["samples"]),
            k=settings["k"],
            tolerances={name: settings[f"tol_{name}"] for name in TOLERANCES},
            seed=settings["seed"],
            trials=settings["trials"],
            radius=settings["radius"],
            max_power=settings["max_power"],
            truncations=_numbers(settings["truncations"], int),
            t_grid=_numbers(settings["t_grid"], float),
        )
    except NcTorusError as e:
        raise ConfigError(str(e)) from e

    logger.debug("run config: %s", cfg)
    return cfg


def worker_count() -> int:
    """Pool size, capped by NCTORUS_THREADS."""
    count = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return count
    try:
        cap = int(raw)
    except ValueError as e:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got '{raw}'") from e
    if cap < 1:
        raise ConfigError(f"{THREADS_ENV} must be positive, got {cap}")
    return min(cap, count)

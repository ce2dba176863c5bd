"""Run configuration shared by the CLI and the simulation campaigns."""

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .analytic import ChannelParams
from .exceptions import InvalidParameter
from .schemes import SDMA_RULES, Scheme
from .simulate import SimWindow

DEFAULT_SEED = 20140601


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


@dataclass
class GridSpec:
    min: float
    max: float
    points: int
    scale: str = "linear"

    def values(self):
        if self.points < 1:
            raise InvalidParameter("grid needs at least one point")
        if self.points == 1:
            return np.array([float(self.min)])
        if self.scale == "log":
            if self.min <= 0:
                raise InvalidParameter("log grid needs a positive minimum")
            return np.geomspace(self.min, self.max, self.points)
        if self.scale != "linear":
            raise InvalidParameter(f"unknown grid scale {self.scale!r}")
        return np.linspace(self.min, self.max, self.points)


@dataclass
class SystemConfig:
    ratio: float = 10.0
    alpha: float = 4.0
    theta0_db: float = 0.0
    n: int = 5
    m_max: int = 1
    scheme: str = "scheme1"
    sdma_rule: str = "min"
    k_max: int = None
    full_buffer: bool = False
    radius: float = 20.0
    guard_fraction: float = 0.5
    mc_samples: int = 10_000
    base_seed: int = DEFAULT_SEED
    n_max: int = 200
    sir_grid_db: GridSpec = field(default_factory=lambda: GridSpec(-10.0, 20.0, 31))
    rate_grid_spec: GridSpec = field(default_factory=lambda: GridSpec(0.0, 0.5, 51))
    r0_grid: GridSpec = field(default_factory=lambda: GridSpec(0.1, 2.0, 20))

    def __post_init__(self):
        for name in ("sir_grid_db", "rate_grid_spec", "r0_grid"):
            value = getattr(self, name)
            if isinstance(value, dict):
                setattr(self, name, GridSpec(**value))

    def validate(self):
        for name in ("ratio", "radius"):
            if not getattr(self, name) > 0:
                raise InvalidParameter(f"{name} must be positive")
        if not self.alpha > 2:
            raise InvalidParameter("alpha must exceed 2")
        for name in ("n", "m_max", "mc_samples", "n_max"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise InvalidParameter(f"{name} must be a positive integer")
        if self.k_max is not None and (not isinstance(self.k_max, int) or self.k_max < 1):
            raise InvalidParameter("k_max must be a positive integer or null")
        Scheme.parse(self.scheme)
        if self.sdma_rule not in SDMA_RULES:
            raise InvalidParameter(f"sdma_rule must be one of {SDMA_RULES}")
        self.window
        for grid in (self.sir_grid_db, self.rate_grid_spec, self.r0_grid):
            values = grid.values()
            if np.any(np.diff(values) <= 0) and values.size > 1:
                raise InvalidParameter("grids must be strictly increasing")
        if np.any(self.rate_grid_spec.values() < 0):
            raise InvalidParameter("rate grid must be non-negative")
        if np.any(self.r0_grid.values() <= 0):
            raise InvalidParameter("target rates must be positive")
        return self

    @property
    def theta0(self):
        return float(db_to_linear(self.theta0_db))

    @property
    def params(self):
        return ChannelParams(self.alpha, self.theta0)

    @property
    def window(self):
        return SimWindow(self.radius, self.guard_fraction)

    def sir_grid_linear(self):
        return db_to_linear(self.sir_grid_db.values())

    def rate_grid(self):
        return self.rate_grid_spec.values()

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidParameter(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def digest(self):
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

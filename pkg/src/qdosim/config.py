"""TOML run configuration with strict schemas and documented defaults.

The d-grid is open at its lower edge: d_k = d_min + (d_max − d_min)·k/count,
k = 1..count, so d_min = 0 is a valid spec (the collision point itself is
never sampled).
"""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError
from .fock import FockConfig, QuadratureGrid
from .vqe import VqeConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["ModelSection", "VqeSection", "FockSection", "AnalysisSection",
           "OutputSection", "RunConfig", "load_config", "parse_config"]


@dataclass
class ModelSection:
    thetas: list = field(default_factory=lambda: [0.58])
    d_min: float = 0.0
    d_max: float = 3.5
    d_count: int = 40
    omega1: float = 1.0
    omega2: float = 1.0
    m1: float = 1.0
    m2: float = 1.0
    q1: float = 1.0
    q2: float = 1.0
    softening: float = 0.0


@dataclass
class VqeSection:
    n_layers: int = 8
    max_steps: int = 5000
    learning_rate: float = 0.01
    optimizer: str = "adaptive-moment"
    fd_step: float = 1e-3
    norm_penalty: float = 10.0
    conv_tol: float = 1e-6
    conv_window: int = 50


@dataclass
class FockSection:
    dim_per_mode: int = 5


@dataclass
class AnalysisSection:
    bandwidth: float = 0.12
    morse: bool = True
    cat_fit: bool = True
    quad_order: int = 80


@dataclass
class OutputSection:
    directory: str = "qdo-out"
    formats: list = field(default_factory=lambda: ["csv", "json"])
    save_states: bool = False


@dataclass
class RunConfig:
    seed: int = 1
    engine: str = "oracle"
    model: ModelSection = field(default_factory=ModelSection)
    vqe: VqeSection = field(default_factory=VqeSection)
    fock: FockSection = field(default_factory=FockSection)
    analysis: AnalysisSection = field(default_factory=AnalysisSection)
    output: OutputSection = field(default_factory=OutputSection)

    def d_grid(self) -> np.ndarray:
        m = self.model
        k = np.arange(1, m.d_count + 1, dtype=float)
        return m.d_min + (m.d_max - m.d_min) * k / m.d_count

    def vqe_config(self) -> VqeConfig:
        v = self.vqe
        return VqeConfig(
            seed=self.seed,
            n_layers=v.n_layers,
            max_steps=v.max_steps,
            learning_rate=v.learning_rate,
            optimizer=v.optimizer,
            fd_step=v.fd_step,
            norm_penalty=v.norm_penalty,
            conv_tol=v.conv_tol,
            conv_window=v.conv_window,
            grid=QuadratureGrid(),
            fock=FockConfig(dim_per_mode=self.fock.dim_per_mode),
        )

    def snapshot(self) -> dict:
        return asdict(self)


_SECTIONS = {
    "model": ModelSection,
    "vqe": VqeSection,
    "fock": FockSection,
    "analysis": AnalysisSection,
    "output": OutputSection,
}
_TOP_SCALARS = ("seed", "engine")


def _build_section(cls, data: dict, name: str):
    if name == "model" and "theta" in data:
        data = dict(data)
        theta = data.pop("theta")
        data["thetas"] = [theta] if not isinstance(theta, list) else theta
    known = {f.name for f in cls.__dataclass_fields__.values()}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")
    return cls(**data)


def parse_config(data: dict) -> RunConfig:
    """Validate a parsed TOML document; unknown keys anywhere are errors."""
    unknown = set(data) - set(_SECTIONS) - set(_TOP_SCALARS)
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    kwargs = {}
    for key in _TOP_SCALARS:
        if key in data:
            kwargs[key] = data[key]
    for name, cls in _SECTIONS.items():
        section = data.get(name, {})
        if not isinstance(section, dict):
            raise ConfigError(f"[{name}] must be a table")
        if name == "model" and "theta" in section and "thetas" in section:
            raise ConfigError("[model] cannot set both 'theta' and 'thetas'")
        try:
            kwargs[name] = _build_section(cls, section, name)
        except TypeError as exc:
            raise ConfigError(f"bad [{name}] section: {exc}") from None
    cfg = RunConfig(**kwargs)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    m = cfg.model
    if cfg.engine not in ("vqe", "oracle"):
        raise ConfigError("engine must be 'vqe' or 'oracle'")
    if not all(0.0 <= t <= math.pi / 2 for t in m.thetas):
        raise ConfigError("every theta must lie in [0, pi/2]")
    if not (m.d_min >= 0 and m.d_max > m.d_min and m.d_count >= 1):
        raise ConfigError("d-grid requires 0 <= d_min < d_max and d_count >= 1")
    if cfg.fock.dim_per_mode < 2:
        raise ConfigError("fock.dim_per_mode must be at least 2")
    if cfg.analysis.quad_order < 2 * cfg.fock.dim_per_mode:
        raise ConfigError("analysis.quad_order must be at least 2*dim_per_mode")


def load_config(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from None
    return parse_config(data)

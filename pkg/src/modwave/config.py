"""Plain key = value experiment configuration with strict validation.

Unknown keys are hard errors, every diagnostic carries its line number,
and constraint violations state the violated mathematical constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .profile import FINAL_DATA_KINDS, SolverParams
from .spectral import SpectralGrid

__all__ = ["ExperimentConfig", "ConfigError", "parse_config", "load_config"]


class ConfigError(ValueError):
    """Raised on malformed or inconsistent configuration text."""


_INT_KEYS = {"lam", "num_points", "time_grid_points", "seed", "max_iter"}
_FLOAT_KEYS = {
    "delta", "alpha", "eps0", "T", "t_max", "box_length", "bandwidth",
    "fit_t_min", "fit_t_max", "tol",
}
_STR_KEYS = {"data_kind"}
_LIST_KEYS = {"eps0_values", "T_values"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _LIST_KEYS

_DEFAULTS = {
    "lam": 1,
    "delta": 0.2,
    "alpha": 0.1,
    "eps0": 0.05,
    "T": 10.0,
    "t_max": 1000.0,
    "num_points": 4096,
    "box_length": 200.0,
    "time_grid_points": 129,
    "data_kind": "gaussian",
    "seed": 0,
    "bandwidth": 1.0,
    "fit_t_min": None,
    "fit_t_max": None,
    "tol": 1e-9,
    "max_iter": 15,
    "eps0_values": (0.05, 0.025),
    "T_values": (10.0, 20.0),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully validated run configuration."""

    params: SolverParams
    data_kind: str = "gaussian"
    seed: int = 0
    bandwidth: float = 1.0
    fit_window: tuple = (10.0, 1000.0)
    tol: float = 1e-9
    max_iter: int = 15
    eps0_values: tuple = (0.05, 0.025)
    T_values: tuple = (10.0, 20.0)
    output_dir: Path = field(default_factory=lambda: Path("."))

    def __post_init__(self):
        lo, hi = self.fit_window
        if not (self.params.T <= lo < hi <= self.params.t_max):
            raise ConfigError(
                f"fit window [{lo}, {hi}] must lie inside [T, t_max] = "
                f"[{self.params.T}, {self.params.t_max}]"
            )
        if self.data_kind not in FINAL_DATA_KINDS:
            raise ConfigError(
                f"data_kind must be one of {FINAL_DATA_KINDS}, got {self.data_kind!r}"
            )
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.tol <= 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")


def _parse_scalar(key: str, raw: str, line_no: int):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _LIST_KEYS:
            vals = tuple(float(p) for p in raw.split(",") if p.strip())
            if not vals:
                raise ValueError("empty list")
            return vals
        return raw
    except ValueError as exc:
        raise ConfigError(f"line {line_no}: cannot parse {key} = {raw!r}: {exc}") from None


def parse_config(text: str, output_dir=None) -> ExperimentConfig:
    """Parse key = value lines ('#' starts a comment) into a validated config.

    An empty file yields all defaults.  Unknown keys, duplicate keys, and
    unparsable values are errors that carry the offending line number.
    """
    values = dict(_DEFAULTS)
    seen = set()
    for line_no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {body!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        seen.add(key)
        values[key] = _parse_scalar(key, raw, line_no)

    try:
        grid = SpectralGrid(values["num_points"], values["box_length"])
        params = SolverParams(
            lam=values["lam"],
            delta=values["delta"],
            alpha=values["alpha"],
            eps0=values["eps0"],
            T=values["T"],
            t_max=values["t_max"],
            grid=grid,
            time_grid_points=values["time_grid_points"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    fit_lo = values["fit_t_min"] if values["fit_t_min"] is not None else params.T
    fit_hi = values["fit_t_max"] if values["fit_t_max"] is not None else params.t_max
    return ExperimentConfig(
        params=params,
        data_kind=values["data_kind"],
        seed=values["seed"],
        bandwidth=values["bandwidth"],
        fit_window=(fit_lo, fit_hi),
        tol=values["tol"],
        max_iter=values["max_iter"],
        eps0_values=values["eps0_values"],
        T_values=values["T_values"],
        output_dir=Path(output_dir) if output_dir is not None else Path("."),
    )


def load_config(path, output_dir=None) -> ExperimentConfig:
    return parse_config(Path(path).read_text(), output_dir=output_dir)

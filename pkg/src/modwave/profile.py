"""Final data, the explicit long-time profile, and the approximate solution.

The profile v(t, xi) = W(xi) * exp(-i*lam*|W(xi)|^2 * log(t)/(2*pi))
carries the logarithmic phase correction; the approximate solution is its
free evolution.  Final data W are generated from three reproducible families
and rescaled so that ||W||_inf + ||W||_H2 matches the requested size.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .spectral import (
    FrequencyField,
    PhysicalField,
    SpectralGrid,
    free_propagate,
    inverse_transform,
    norms,
)

__all__ = [
    "SolverParams",
    "FinalData",
    "make_final_data",
    "asymptotic_profile",
    "profile_time_derivative",
    "approximate_solution",
    "write_final_data_csv",
    "read_final_data_csv",
]

FINAL_DATA_KINDS = ("gaussian", "bump", "random_bandlimited")


@dataclass(frozen=True)
class SolverParams:
    """Model and truncation parameters for one construction run."""

    lam: int = 1
    delta: float = 0.2
    alpha: float = 0.1
    eps0: float = 0.05
    T: float = 10.0
    t_max: float = 1000.0
    grid: SpectralGrid = SpectralGrid(4096, 200.0)
    time_grid_points: int = 129

    def __post_init__(self):
        if self.lam not in (1, -1):
            raise ValueError(f"lam must be +1 or -1, got {self.lam}")
        if not (0.0 < self.alpha < self.delta < 0.25):
            raise ValueError(
                f"parameters must satisfy 0 < alpha < delta < 1/4, "
                f"got alpha={self.alpha}, delta={self.delta}"
            )
        if self.eps0 < 0:
            raise ValueError(f"eps0 must be nonnegative, got {self.eps0}")
        if self.T < 2.0:
            raise ValueError(f"T must be at least 2, got {self.T}")
        if self.t_max < 10.0 * self.T:
            raise ValueError(f"t_max must be at least 10*T, got t_max={self.t_max}, T={self.T}")
        if self.time_grid_points < 3:
            raise ValueError(f"time_grid_points must be at least 3, got {self.time_grid_points}")


@dataclass(frozen=True)
class FinalData:
    """Prescribed scattering datum W with its measured size."""

    W: FrequencyField
    eps0_actual: float


def _band_radius(kind: str, bandwidth: float) -> float:
    # Effective support radius: where the unit shape has decayed below ~1e-14.
    if kind == "gaussian":
        return bandwidth * np.sqrt(np.log(1e14))
    return 2.0 * bandwidth  # bump families are compactly supported


def _unit_shape(kind: str, xi: np.ndarray, bandwidth: float, seed: int) -> np.ndarray:
    if kind == "gaussian":
        return np.exp(-((xi / bandwidth) ** 2)) + 0.0j
    radius = 2.0 * bandwidth
    u = xi / radius
    inside = np.abs(u) < 1.0
    envelope = np.zeros_like(xi)
    envelope[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    if kind == "bump":
        return envelope + 0.0j
    if kind == "random_bandlimited":
        rng = np.random.default_rng(seed)
        vals = np.zeros_like(xi, dtype=np.complex128)
        for m in range(1, 7):
            a, b, c, d = rng.standard_normal(4)
            vals += (a + 1j * b) * np.cos(np.pi * m * u) + (c + 1j * d) * np.sin(np.pi * m * u)
        return envelope * vals
    raise ValueError(f"unknown final-data kind {kind!r}")


def _size_measure(W: FrequencyField) -> float:
    b = norms(W)
    return b.linf + b.h2


def make_final_data(
    kind: str, params: SolverParams, seed: int = 0, bandwidth: float = 1.0
) -> FinalData:
    """Build final data of the requested family, scaled to size params.eps0.

    The size is ||W||_inf + ||W||_H2; scaling is linear so one rescale is
    exact and the construction is idempotent under re-measurement.  The
    same seed always yields bit-identical data.
    """
    if kind not in FINAL_DATA_KINDS:
        raise ValueError(f"unknown final-data kind {kind!r}, expected one of {FINAL_DATA_KINDS}")
    grid = params.grid
    if _band_radius(kind, bandwidth) > 0.8 * grid.xi_max:
        raise ValueError(
            f"final-data band (radius ~{_band_radius(kind, bandwidth):.3g}) does not fit "
            f"inside 80% of the xi-grid (xi_max={grid.xi_max:.3g})"
        )
    if params.eps0 == 0.0:
        W = FrequencyField(grid, np.zeros(grid.num_points, dtype=np.complex128))
        return FinalData(W=W, eps0_actual=0.0)
    unit = FrequencyField(grid, _unit_shape(kind, grid.frequencies, bandwidth, seed))
    scale = params.eps0 / _size_measure(unit)
    W = FrequencyField(grid, scale * unit.values)
    return FinalData(W=W, eps0_actual=_size_measure(W))


def asymptotic_profile(W: FinalData, t: float, lam: int) -> FrequencyField:
    """v(t, xi) = W(xi) * exp(-i*lam*|W(xi)|^2 * log(t)/(2*pi)).

    |v| = |W| for all t.  The 1/(2*pi) in the logarithmic phase matches
    the resonant constant of the cubic term under the transform
    normalization in use, so that i*dv/dt exactly cancels the resonant
    part of the pulled-back nonlinearity.
    """
    if t <= 0:
        raise ValueError(f"profile time must be positive, got {t}")
    w = W.W.values
    phase = np.exp(-1j * lam * np.abs(w) ** 2 * np.log(t) / (2.0 * np.pi))
    return FrequencyField(W.W.grid, w * phase)


def profile_time_derivative(v: FrequencyField, t: float, lam: int) -> FrequencyField:
    """Exact time derivative of the profile: -(i*lam/(2*pi*t)) |v|^2 v."""
    if t <= 0:
        raise ValueError(f"profile time must be positive, got {t}")
    coeff = -1j * lam / (2.0 * np.pi * t)
    return FrequencyField(v.grid, coeff * np.abs(v.values) ** 2 * v.values)


def approximate_solution(W: FinalData, t: float, params: SolverParams) -> PhysicalField:
    """Free evolution of the profile: the x-space carrier of the long-range phase."""
    v = asymptotic_profile(W, t, params.lam)
    return inverse_transform(free_propagate(v, t))


def write_final_data_csv(fd: FinalData, path) -> None:
    """Serialize (xi, Re W, Im W) rows for reproducibility."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["xi", "re_w", "im_w"])
        for xi, w in zip(fd.W.grid.frequencies, fd.W.values):
            writer.writerow([repr(float(xi)), repr(float(w.real)), repr(float(w.imag))])


def read_final_data_csv(path, grid: SpectralGrid) -> FinalData:
    """Load final data previously written by write_final_data_csv."""
    path = Path(path)
    rows = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        rows = [(float(r[0]), float(r[1]), float(r[2])) for r in reader]
    if len(rows) != grid.num_points:
        raise ValueError(f"csv has {len(rows)} rows, grid expects {grid.num_points}")
    vals = np.array([re + 1j * im for _, re, im in rows])
    W = FrequencyField(grid, vals)
    return FinalData(W=W, eps0_actual=_size_measure(W))

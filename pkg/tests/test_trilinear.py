"""Trilinear split, the independent quadrature oracle, and forcing identity."""

import numpy as np
import pytest

from modwave import (
    FrequencyField,
    SolverParams,
    SpectralGrid,
    cubic_difference,
    forcing,
    forcing_identity_residual,
    make_final_data,
    oracle_calibration,
    pulled_back_cubic,
    remainder_oracle,
    trilinear_split,
)
from modwave.spectral import PhysicalField, forward_transform, norms
from modwave.trilinear import ORACLE_MAX_POINTS

COARSE_GRID = SpectralGrid(64, 60.0)
COARSE_PARAMS = SolverParams(grid=COARSE_GRID)


def sample_field(grid, seed=0, width=1.0):
    rng = np.random.default_rng(seed)
    xi = grid.frequencies
    amp = rng.uniform(0.3, 0.6)
    return FrequencyField(grid, amp * np.exp(-((xi / width) ** 2)) * (1.0 + 0.3j * xi))


def test_split_reassembles_exactly():
    f = sample_field(COARSE_GRID, seed=1)
    s = 5.0
    split = trilinear_split(f, s)
    full = pulled_back_cubic(f, s)
    recon = split.leading.values + split.remainder.values
    assert np.max(np.abs(recon - full.values)) <= 1e-15 * np.max(np.abs(full.values))


def test_leading_term_closed_form():
    f = sample_field(COARSE_GRID, seed=2)
    s = 7.0
    split = trilinear_split(f, s)
    exact = (1j / (2.0 * np.pi * s)) * np.abs(f.values) ** 2 * f.values
    assert np.array_equal(split.leading.values, exact)


def test_remainder_smaller_than_leading_at_late_time():
    f = sample_field(COARSE_GRID, seed=3, width=0.4)
    s = 40.0
    split = trilinear_split(f, s)
    assert norms(split.remainder).l2 < 0.5 * norms(split.leading).l2


def test_oracle_calibration_is_inverse_two_pi():
    cal = oracle_calibration()
    assert abs(2.0 * np.pi * cal - 1.0) <= 1e-6


def test_oracle_matches_fft_remainder():
    f = sample_field(COARSE_GRID, seed=4, width=0.25)
    for s in (5.0, 20.0):
        fft_rem = trilinear_split(f, s).remainder
        orc = remainder_oracle(f, s)
        scale = np.max(np.abs(fft_rem.values))
        assert np.max(np.abs(orc.values - fft_rem.values)) <= 1e-3 * scale


def test_oracle_vanishes_at_huge_time():
    # the kernel e^{-i eta sigma / s} - 1 goes to 0 pointwise as s -> inf
    f = sample_field(COARSE_GRID, seed=5, width=0.25)
    ref = np.max(np.abs(remainder_oracle(f, 5.0).values))
    far = np.max(np.abs(remainder_oracle(f, 1e6).values))
    assert far <= 1e-4 * ref


def test_oracle_refuses_large_grid():
    big = SpectralGrid(2 * ORACLE_MAX_POINTS, 60.0)
    f = sample_field(big)
    with pytest.raises(ValueError, match="oracle"):
        remainder_oracle(f, 5.0)


def test_oracle_zero_input():
    f = FrequencyField(COARSE_GRID, np.zeros(COARSE_GRID.num_points, complex))
    out = remainder_oracle(f, 5.0)
    assert not np.any(out.values)


def test_forcing_identity_fft_route():
    fd = make_final_data("gaussian", COARSE_PARAMS, bandwidth=0.2)
    for t in (3.0, 12.0, 45.0):
        assert forcing_identity_residual(fd, t, COARSE_PARAMS, route="fft") <= 1e-10


def test_forcing_identity_oracle_route():
    fd = make_final_data("gaussian", COARSE_PARAMS, bandwidth=0.2)
    assert forcing_identity_residual(fd, 5.0, COARSE_PARAMS, route="oracle") <= 1e-3


def test_forcing_identity_both_signs():
    for lam in (1, -1):
        params = SolverParams(lam=lam, grid=COARSE_GRID)
        fd = make_final_data("gaussian", params, bandwidth=0.2)
        assert forcing_identity_residual(fd, 8.0, params, route="fft") <= 1e-10


def test_forcing_cubic_homogeneity():
    # the forcing is exactly cubic in the data size
    params = SolverParams(grid=COARSE_GRID)
    half = SolverParams(eps0=params.eps0 / 2.0, grid=COARSE_GRID)
    t = 10.0
    f_full = forcing(make_final_data("gaussian", params, bandwidth=0.2), t, params)
    f_half = forcing(make_final_data("gaussian", half, bandwidth=0.2), t, half)
    r_full = np.max(np.abs(f_full.values))
    r_half = np.max(np.abs(f_half.values))
    # |W| enters the log phase too, so homogeneity is only approximate; the
    # cubic power dominates at these sizes
    assert r_full / r_half == pytest.approx(8.0, rel=0.05)


def test_invalid_route():
    fd = make_final_data("gaussian", COARSE_PARAMS, bandwidth=0.2)
    with pytest.raises(ValueError, match="route"):
        forcing_identity_residual(fd, 5.0, COARSE_PARAMS, route="exact")


def test_cubic_difference_matches_direct():
    rng = np.random.default_rng(11)
    n = COARSE_GRID.num_points
    a = PhysicalField(COARSE_GRID, rng.standard_normal(n) + 1j * rng.standard_normal(n))
    b = PhysicalField(COARSE_GRID, 0.1 * (rng.standard_normal(n) + 1j * rng.standard_normal(n)))
    diff = cubic_difference(a, b)
    ab = a.values + b.values
    direct = np.abs(ab) ** 2 * ab - np.abs(a.values) ** 2 * a.values
    assert np.max(np.abs(diff.values - direct)) <= 1e-12 * np.max(np.abs(direct))


def test_cubic_difference_no_cancellation():
    # with |b| ~ 1e-12 |a| the expansion keeps full relative accuracy
    x = COARSE_GRID.x
    a = PhysicalField(COARSE_GRID, np.exp(-(x**2)) + 0.0j)
    b = PhysicalField(COARSE_GRID, 1e-12 * np.exp(-(x**2)) * (1.0 + 1j))
    diff = cubic_difference(a, b)
    # leading term is 2|a|^2 b + a^2 conj(b)
    lead = 2.0 * np.abs(a.values) ** 2 * b.values + a.values**2 * np.conj(b.values)
    assert np.max(np.abs(diff.values - lead)) <= 1e-10 * np.max(np.abs(lead))

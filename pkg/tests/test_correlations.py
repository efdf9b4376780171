"""Delayed and two-time correlation functions."""

import math
import warnings as _warnings

import numpy as np
import pytest

from upblab.correlations import (
    CorrelationGrid,
    equal_time_g2_minimum,
    g2_pulse_integrated,
    g2_tau_steady,
    two_time_g2,
)
from upblab.dynamics import build_liouvillian, g2_zero, steady_state
from upblab.fock import build_basis
from upblab.params import BathParams, Pulse, SystemParams


def test_coherent_drive_gives_flat_g2_of_tau():
    basis = build_basis(10, mode2_max=0)
    params = SystemParams(delta1=0.3, f1=0.2)
    tau = np.linspace(0.0, 4.0, 9)
    g2 = g2_tau_steady(params, BathParams(), basis, 1, tau)
    assert np.all(np.abs(g2 - 1.0) < 1e-8)


def test_thermal_mode_shows_chaotic_bunching_decay():
    basis = build_basis(14, mode2_max=0)
    params = SystemParams()
    tau = np.linspace(0.0, 3.0, 13)
    g2 = g2_tau_steady(params, BathParams(n_th=0.25), basis, 1, tau)
    want = 1.0 + np.exp(-params.kappa1 * tau)
    assert np.max(np.abs(g2 - want)) < 5e-7


def test_g2_tau_at_zero_delay_matches_equal_time_value():
    basis = build_basis(8)
    params = SystemParams(delta1=0.28, delta2=0.28, u1=0.04, u2=0.04,
                          f1=0.05, j_hop=math.pi)
    liouv = build_liouvillian(params, BathParams(), basis)
    rho = steady_state(liouv)
    tau = np.array([0.0, 0.1])
    g2 = g2_tau_steady(params, BathParams(), basis, 1, tau)
    assert abs(g2[0] - g2_zero(rho, 1)) < 1e-8


def test_g2_tau_rejects_bad_grids():
    basis = build_basis(4, mode2_max=0)
    params = SystemParams(f1=0.1)
    with pytest.raises(ValueError):
        g2_tau_steady(params, BathParams(), basis, 1, [-0.1, 0.5])
    with pytest.raises(ValueError):
        g2_tau_steady(params, BathParams(), basis, 1, [0.0, 0.5, 0.5])
    with pytest.raises(ValueError):
        g2_tau_steady(SystemParams(), BathParams(), basis, 1, [0.0, 0.5])


def test_pulsed_coherent_state_integrates_to_one():
    basis = build_basis(5, mode2_max=0)
    params = SystemParams(delta1=0.2)
    pulse = Pulse(f_peak=0.08, sigma_t=1.0, t0=3.0)
    grid = two_time_g2(params, BathParams(), basis, {1: pulse}, grid=40)
    val = g2_pulse_integrated(grid)
    assert abs(val - 1.0) < 1e-6
    gated = g2_pulse_integrated(grid, gate=(2.0, 5.0))
    assert abs(gated - 1.0) < 1e-6
    # map normalization agrees where occupation is appreciable (the
    # integrator's absolute tolerance dominates when n(t)^2 is tiny)
    mask = grid.n_of_t > 5e-2 * grid.n_of_t.max()
    g2map = grid.g2_map()
    assert np.max(np.abs(g2map[np.ix_(mask, mask)] - 1.0)) < 5e-6


def test_two_time_grid_is_symmetric_and_positive():
    basis = build_basis(4)
    params = SystemParams(delta1=0.28, delta2=0.28, u1=0.04, u2=0.04,
                          j_hop=math.pi)
    pulse = Pulse(f_peak=0.1, sigma_t=1.0, t0=3.0)
    grid = two_time_g2(params, BathParams(), basis, {1: pulse}, grid=24)
    assert np.allclose(grid.G2, grid.G2.T, atol=1e-12)
    assert grid.G2.min() > -1e-10
    assert grid.n_of_t.max() > 1e-4


def test_gate_edges_snap_to_nearest_grid_nodes():
    t = np.linspace(0.0, 8.0, 17)  # spacing 0.5
    n = np.exp(-0.5 * (t - 4.0) ** 2)
    G2 = np.outer(n, n)
    grid = CorrelationGrid(t1_grid=t, t2_grid=t, G2=G2, n_of_t=n, mode=1)
    # edges at 1.9 and 6.3 snap to nodes 2.0 and 6.5
    val = g2_pulse_integrated(grid, gate=(1.9, 6.3))
    i0, i1 = 4, 13
    num = np.trapezoid(np.trapezoid(G2[i0:i1 + 1, i0:i1 + 1],
                                    t[i0:i1 + 1], axis=1), t[i0:i1 + 1])
    den = np.trapezoid(n[i0:i1 + 1], t[i0:i1 + 1]) ** 2
    assert abs(val - num / den) < 1e-12


def test_gate_validation_errors():
    t = np.linspace(0.0, 8.0, 17)
    n = np.ones_like(t)
    grid = CorrelationGrid(t1_grid=t, t2_grid=t, G2=np.outer(n, n),
                           n_of_t=n, mode=1)
    with pytest.raises(ValueError):
        g2_pulse_integrated(grid, gate=(5.0, 5.0))
    with pytest.raises(ValueError):
        g2_pulse_integrated(grid, gate=(6.0, 2.0))
    with pytest.raises(ValueError):
        # both edges inside one cell: no captured interval
        g2_pulse_integrated(grid, gate=(3.01, 3.24))


def test_coarse_grid_records_density_warning():
    basis = build_basis(3, mode2_max=0)
    params = SystemParams()
    pulse = Pulse(f_peak=0.05, sigma_t=1.0, t0=3.0)
    grid = two_time_g2(params, BathParams(), basis, {1: pulse}, grid=8)
    assert any("density" in w for w in grid.warnings)
    fine = two_time_g2(params, BathParams(), basis, {1: pulse}, grid=400)
    assert fine.warnings == ()


def test_two_time_input_validation():
    basis = build_basis(3)
    params = SystemParams()
    pulse = Pulse(f_peak=0.05, sigma_t=1.0, t0=3.0)
    with pytest.raises(ValueError):
        two_time_g2(params, BathParams(), basis, {})
    with pytest.raises(ValueError):
        two_time_g2(params, BathParams(), basis, {1: pulse}, grid=3)
    with pytest.raises(ValueError):
        two_time_g2(params, BathParams(), basis, {1: pulse},
                    grid=([0.0, 1.0, 2.0, 4.0], [0.0, 1.0, 2.0, 5.0]))
    with pytest.raises(ValueError):
        two_time_g2(params, BathParams(), basis, {1: pulse},
                    grid=([0.0, 1.0, 0.5, 2.0], [0.0, 1.0, 0.5, 2.0]))


def test_equal_time_minimum_ignores_empty_edges():
    t = np.linspace(0.0, 10.0, 21)
    n = np.exp(-0.5 * (t - 5.0) ** 2) + 1e-12
    # diagonal g2 shaped to dip at t = 6 within the occupied window; the
    # noisy tail at t = 10 would win without the occupancy floor
    g2_diag = 1.0 + (t - 6.0) ** 2
    g2_diag[-1] = 1e-6
    G2 = np.zeros((21, 21))
    np.fill_diagonal(G2, g2_diag * n ** 2)
    grid = CorrelationGrid(t1_grid=t, t2_grid=t, G2=G2, n_of_t=n, mode=1)
    assert equal_time_g2_minimum(grid) == pytest.approx(6.0)

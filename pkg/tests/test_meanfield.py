"""Classical amplitudes and the displaced fluctuation frame."""

import math

import numpy as np
import pytest

from upblab.dynamics import (
    build_liouvillian,
    g2_zero,
    occupancy,
    steady_state,
)
from upblab.fock import build_basis, expectation, mode_annihilation
from upblab.meanfield import (
    build_fluctuation_liouvillian,
    displaced_g2,
    displaced_occupancy,
    fluctuation_gaussian_moments,
    mean_field_evolve,
    mean_field_fixed_points,
)
from upblab.optimal import delta_u_opt
from upblab.params import BathParams, SystemParams
from upblab.weakdrive import observables, solve_manifolds


def test_linear_fixed_point_solves_the_coupled_pair():
    params = SystemParams(delta1=0.2, delta2=-0.3, f1=0.15, f2=0.1j,
                          j_hop=0.6, kappa1=1.0, kappa2=0.7)
    fps = mean_field_fixed_points(params)
    assert len(fps) == 1 and fps[0].converged
    mat = np.array([[params.dtilde1, params.j_hop],
                    [params.j_hop, params.dtilde2]])
    want = np.linalg.solve(mat, -np.array([params.f1, params.f2]))
    assert abs(fps[0].alpha[0] - want[0]) < 1e-12
    assert abs(fps[0].alpha[1] - want[1]) < 1e-12


def test_weak_drive_occupancy_matches_classical_amplitude():
    params = SystemParams(delta1=0.28, delta2=0.28, u1=0.04, u2=0.04,
                          f1=1e-3, j_hop=math.pi)
    fp = mean_field_fixed_points(params)[0]
    obs = observables(solve_manifolds(params, order=3))
    assert abs(abs(fp.alpha[0]) ** 2 - obs.n1) / obs.n1 < 1e-6
    assert abs(abs(fp.alpha[1]) ** 2 - obs.n2) / obs.n2 < 1e-6


def test_mean_field_evolve_relaxes_onto_fixed_point():
    params = SystemParams(delta1=0.3, u1=0.05, f1=0.2, j_hop=0.8)
    fp = mean_field_fixed_points(params)[0]
    traj = mean_field_evolve(params, [0.0, 0.0], np.linspace(0.0, 40.0, 9))
    assert abs(traj[-1][0] - fp.alpha[0]) < 1e-8
    assert abs(traj[-1][1] - fp.alpha[1]) < 1e-8
    with pytest.raises(ValueError):
        mean_field_evolve(params, [0.0], [0.0, 1.0])


def test_bistable_kerr_mode_exposes_both_stable_branches():
    # single red-detuned Kerr mode inside its hysteresis window; the cubic
    # n ((delta + U n)^2 + kappa^2/4) = F^2 has three positive roots
    params = SystemParams(delta1=-2.0, u1=0.25, f1=1.8)
    n_roots = np.roots([0.0625, -1.0, 4.25, -1.8 ** 2])
    seeds = [(-1.8 / (params.dtilde1 + 0.25 * n), 0.0) for n in n_roots.real]
    fps = mean_field_fixed_points(params, extra_seeds=seeds)
    converged = [f for f in fps if f.converged]
    assert len(converged) >= 2
    for f in converged:
        n = abs(f.alpha[0]) ** 2
        resid = n * ((-2.0 + 0.25 * n) ** 2 + 0.25) - 1.8 ** 2
        assert abs(resid) < 1e-8


def test_displaced_occupancy_tracks_full_solution_at_tenth_photon():
    params = SystemParams(delta1=0.3, u1=1e-2, f1=0.18)
    basis = build_basis(14, mode2_max=0)
    rho_full = steady_state(build_liouvillian(params, BathParams(), basis))
    n_full = occupancy(rho_full, 1)
    assert abs(n_full - 0.0949752) < 1e-4
    fp = mean_field_fixed_points(params)[0]
    fl = build_fluctuation_liouvillian(params, BathParams(), fp.alpha, basis)
    rho_f = steady_state(fl)
    n_disp = displaced_occupancy(rho_f, fp.alpha, 1)
    assert abs(n_disp - n_full) / n_full < 2.5e-3
    g2_full = g2_zero(rho_full, 1)
    g2_disp = displaced_g2(rho_f, fp.alpha, 1)
    assert abs(g2_disp - g2_full) / g2_full < 1e-3


def test_displaced_g2_tracks_full_solution_at_dimer_optimum():
    opt = delta_u_opt(math.pi)
    params = SystemParams(delta1=opt.delta[0], delta2=opt.delta[0],
                          u1=opt.u[0], u2=opt.u[0], f1=0.35, j_hop=math.pi)
    basis = build_basis(12)
    rho_full = steady_state(build_liouvillian(params, BathParams(), basis))
    fp = mean_field_fixed_points(params)[0]
    fl = build_fluctuation_liouvillian(params, BathParams(), fp.alpha, basis)
    rho_f = steady_state(fl)
    for mode in (1, 2):
        n_full = occupancy(rho_full, mode)
        n_disp = displaced_occupancy(rho_f, fp.alpha, mode)
        assert abs(n_disp - n_full) / n_full < 5e-3
    g2_full = g2_zero(rho_full, 1)
    g2_disp = displaced_g2(rho_f, fp.alpha, 1)
    assert abs(g2_disp / g2_full - 1.0) < 0.05


def test_fluctuation_moments_compose_with_the_classical_amplitude():
    params = SystemParams(delta1=0.3, u1=1e-2, f1=0.18)
    basis = build_basis(14, mode2_max=0)
    fp = mean_field_fixed_points(params)[0]
    fl = build_fluctuation_liouvillian(params, BathParams(), fp.alpha, basis)
    rho_f = steady_state(fl)
    a_mean, a_sq, n_mean = fluctuation_gaussian_moments(rho_f, fp.alpha, 1)
    assert n_mean == pytest.approx(displaced_occupancy(rho_f, fp.alpha, 1),
                                   rel=1e-12)
    a = mode_annihilation(basis, 1).matrix
    da = expectation(rho_f, a)
    assert abs(a_mean - (fp.alpha[0] + da)) < 1e-12
    # against the laboratory-frame full solve
    rho_full = steady_state(build_liouvillian(params, BathParams(), basis))
    assert abs(a_mean - expectation(rho_full, a)) < 1e-3
    assert abs(a_sq - expectation(rho_full, a @ a)) < 1e-3


def test_fluctuation_frame_rejects_structured_baths():
    basis = build_basis(4)
    params = SystemParams(f1=0.1)
    for bath in (BathParams(cascade_efficiency=0.5),
                 BathParams(squeeze_xi=0.1)):
        with pytest.raises(ValueError):
            build_fluctuation_liouvillian(params, bath, (0.1, 0.0), basis)


def test_linearized_frame_coincides_with_full_when_u_vanishes():
    basis = build_basis(5)
    params = SystemParams(delta1=0.2, f1=0.1, j_hop=0.4)
    alpha = (0.3 - 0.1j, 0.05j)
    full = build_fluctuation_liouvillian(params, BathParams(), alpha, basis)
    lin = build_fluctuation_liouvillian(params, BathParams(), alpha, basis,
                                        linearized=True)
    assert abs(full.matrix - lin.matrix).max() < 1e-14


def test_coherent_state_has_vacuum_fluctuations():
    basis = build_basis(6)
    params = SystemParams(delta1=0.2, delta2=-0.1, f1=0.2, f2=0.1, j_hop=0.5)
    fp = mean_field_fixed_points(params)[0]
    fl = build_fluctuation_liouvillian(params, BathParams(), fp.alpha, basis)
    rho_f = steady_state(fl)
    assert rho_f.matrix[0, 0].real > 1.0 - 1e-10
    assert abs(displaced_g2(rho_f, fp.alpha, 1) - 1.0) < 1e-8

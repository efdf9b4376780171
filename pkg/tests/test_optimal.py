"""Closed-form optimal conditions and the numeric validation helpers."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from upblab.optimal import (
    coherent_c20_roots,
    delta_u_opt,
    drive_for_occupancy,
    effective_kerr,
    f1_opt_cascaded,
    f1_opt_coherent,
    jc_opt,
    minimize_g2,
)
from upblab.params import JCParams, SystemParams
from upblab.weakdrive import jc_solve, observables, solve_manifolds


def test_optimal_pair_at_pi_hopping():
    opt = delta_u_opt(math.pi)
    assert abs(opt.delta[0] - 0.2759495143) < 1e-9
    assert abs(opt.u[0] - 0.0390571382) < 1e-9
    assert opt.delta[1] == -opt.delta[0]
    assert abs(opt.u[1] + opt.u[0]) < 1e-15
    assert abs(opt.asymptote - 2.0 / (3.0 * math.sqrt(3.0) * math.pi ** 2)) \
        < 1e-15


def test_weak_nonlinearity_approaches_asymptote():
    for j in (10.0, 20.0, 50.0):
        opt = delta_u_opt(j)
        assert abs(opt.u[0] - opt.asymptote) / opt.asymptote < 2e-2


def test_optimum_requires_strong_hopping():
    with pytest.raises(ValueError):
        delta_u_opt(0.5)
    with pytest.raises(ValueError):
        delta_u_opt(-1.0)
    with pytest.raises(ValueError):
        delta_u_opt(2.0, kappa=0.0)


def test_nonlinearity_inversion_pins_the_operating_point():
    jstar = brentq(lambda j: delta_u_opt(j).u[0] - 1e-2, 3.0, 20.0)
    assert abs(jstar - 6.204341) < 1e-5
    assert abs(delta_u_opt(jstar).delta[0] - 0.285361) < 1e-5


def test_numeric_minimizer_recovers_the_closed_form():
    opt = delta_u_opt(math.pi)

    def dimer_g2(x):
        d, u = x
        p = SystemParams(delta1=d, delta2=d, u1=u, u2=u, f1=1e-3,
                         j_hop=math.pi)
        obs = observables(solve_manifolds(p))
        return obs.g2_1 if obs.g2_1 is not None else 1e6

    res = minimize_g2(dimer_g2, [(0.1, 0.5), (0.01, 0.09)],
                      grid_points=24, tol=1e-10)
    assert abs(res.x[0] - opt.delta[0]) < 2e-3
    assert abs(res.x[1] - opt.u[0]) < 2e-3
    assert res.value < 1e-10
    assert len(res.evaluations) >= 24 * 24


def test_minimizer_rejects_empty_boxes():
    with pytest.raises(ValueError):
        minimize_g2(lambda x: 0.0, [(1.0, 1.0)])


def test_cascaded_drive_annihilates_the_target_amplitude():
    rng = np.random.default_rng(7)
    for _ in range(20):
        d1, d2 = rng.uniform(-1, 1, 2)
        u1, u2 = rng.uniform(0.01, 0.5, 2)
        k1, k2 = rng.uniform(0.5, 2.0, 2)
        f2 = rng.uniform(0.5e-3, 2e-3)
        chi = math.sqrt(k1 * k2)
        base = SystemParams(delta1=d1, delta2=d2, u1=u1, u2=u2, f2=f2,
                            kappa1=k1, kappa2=k2)
        for f1 in f1_opt_cascaded(base, chi):
            amps = solve_manifolds(base.replace(f1=f1), cascade=chi)
            scale = max(abs(f1), f2) ** 2
            assert abs(amps.amplitude(0, 2)) < 1e-8 * scale


def test_coherent_drive_annihilates_the_target_amplitude():
    rng = np.random.default_rng(13)
    for _ in range(20):
        d1, d2 = rng.uniform(-1, 1, 2)
        u1, u2 = rng.uniform(0.01, 0.5, 2)
        k1, k2 = rng.uniform(0.5, 2.0, 2)
        j = rng.uniform(0.5, 4.0)
        f2 = rng.uniform(0.5e-3, 2e-3)
        base = SystemParams(delta1=d1, delta2=d2, u1=u1, u2=u2, f2=f2,
                            j_hop=j, kappa1=k1, kappa2=k2)
        for f1 in f1_opt_coherent(base):
            amps = solve_manifolds(base.replace(f1=f1))
            scale = max(abs(f1), f2) ** 2
            assert abs(amps.amplitude(0, 2)) < 1e-8 * scale


def test_coherent_condition_requires_hopping_and_drive():
    with pytest.raises(ValueError):
        f1_opt_coherent(SystemParams(f2=1e-3))
    with pytest.raises(ValueError):
        f1_opt_coherent(SystemParams(j_hop=1.0))
    with pytest.raises(ValueError):
        f1_opt_cascaded(SystemParams(f2=1e-3), chi=0.0)
    with pytest.raises(ValueError):
        f1_opt_cascaded(SystemParams(), chi=1.0)


def test_numeric_roots_annihilate_the_mode1_amplitude():
    base = SystemParams(delta1=0.3, delta2=-0.1, u1=0.05, u2=0.08, f2=1e-3,
                        j_hop=1.7, kappa1=1.0, kappa2=0.8)
    roots = coherent_c20_roots(base)
    for f1 in roots:
        amps = solve_manifolds(base.replace(f1=f1))
        assert abs(amps.amplitude(2, 0)) < 1e-8 * max(abs(f1), 1e-3) ** 2
    # the roots are homogeneous of degree one in the fixed drive
    doubled = coherent_c20_roots(base.replace(f2=2e-3))
    key = lambda z: (z.real, z.imag)
    for a, b in zip(sorted((z / 2 for z in doubled), key=key),
                    sorted(roots, key=key)):
        assert abs(a - b) < 1e-12


def test_jc_optimum_resonant_coupling_and_branches():
    jc = JCParams(delta2=0.0, g=1.0, f1=1e-3)
    opt = jc_opt(jc)
    assert opt.delta1 == pytest.approx(0.0)
    assert abs(opt.g[0] - 1.0 / math.sqrt(2.0)) < 1e-14
    assert opt.g[1] == -opt.g[0]
    jc2 = JCParams(delta2=0.4, g=0.9, f1=1e-3, kappa1=0.8, kappa2=1.3)
    assert jc_opt(jc2).delta1 == pytest.approx(
        -0.4 * (0.8 + 2 * 1.3) / (2 * 1.3))


def test_jc_conditions_annihilate_the_cavity_pair_amplitude():
    rng = np.random.default_rng(3)
    for _ in range(10):
        d1, d2 = rng.uniform(-1, 1, 2)
        g = rng.uniform(0.3, 1.5)
        k1, k2 = rng.uniform(0.5, 2.0, 2)
        f1 = rng.uniform(0.5e-3, 2e-3)
        jc = JCParams(delta1=d1, delta2=d2, g=g, f1=f1, kappa1=k1, kappa2=k2)
        for f2 in jc_opt(jc).f2:
            amps = jc_solve(JCParams(delta1=d1, delta2=d2, g=g, f1=f1,
                                     f2=f2, kappa1=k1, kappa2=k2))
            scale = max(abs(f1), abs(f2)) ** 2
            assert abs(amps.amplitude(2, 0)) < 1e-8 * scale
    # coupling/detuning condition with the emitter undriven
    for d2 in (0.0, 0.4, -0.7):
        jc = JCParams(delta2=d2, g=1.0, f1=1e-3, kappa1=1.0, kappa2=1.3)
        opt = jc_opt(jc)
        for g in opt.g:
            amps = jc_solve(JCParams(delta1=opt.delta1, delta2=d2, g=g,
                                     f1=1e-3, kappa1=1.0, kappa2=1.3))
            assert abs(amps.amplitude(2, 0)) < 1e-8 * 1e-6


def test_effective_kerr_conversions():
    assert effective_kerr(0.5, delta_ce=2.0) == pytest.approx(0.5 ** 4 / 8.0)
    assert effective_kerr(0.5, omega_m=10.0) == pytest.approx(0.025)
    with pytest.raises(ValueError):
        effective_kerr(0.5)
    with pytest.raises(ValueError):
        effective_kerr(0.5, delta_ce=1.0, omega_m=1.0)
    with pytest.raises(ValueError):
        effective_kerr(0.5, delta_ce=0.0)


def test_drive_scaling_reaches_the_requested_occupancy():
    params = SystemParams(delta1=0.28, delta2=0.28, u1=0.04, u2=0.04,
                          f1=1e-3, j_hop=math.pi)

    def occ(p):
        return observables(solve_manifolds(p, order=3)).n1

    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        scaled, achieved = drive_for_occupancy(params, 1e-4, occ)
    assert abs(achieved - 1e-4) <= 1e-3 * 1e-4
    assert abs(scaled.f2) == 0.0
    with pytest.raises(ValueError):
        drive_for_occupancy(params, -1.0, occ)
    with pytest.raises(ValueError):
        drive_for_occupancy(SystemParams(), 1e-4, occ)

"""Weak-drive hierarchy: closed forms, scaling, symmetry, observables."""

import numpy as np
import pytest

from upblab.params import SystemParams, JCParams
from upblab.weakdrive import (solve_manifolds, closed_form_single_drive,
                              observables, conventional_kerr_g2, jc_solve,
                              WeakDriveAmplitudes)


def _sym(rng):
    d = rng.uniform(-1, 1)
    u = rng.uniform(1e-3, 0.5)
    return SystemParams(delta1=d, delta2=d, u1=u, u2=u,
                        f1=1e-3 * (rng.uniform(0.5, 1)
                                   + 1j * rng.uniform(-0.5, 0.5)),
                        f2=0.0, j_hop=rng.uniform(0.5, 8),
                        kappa1=1.0, kappa2=1.0)


def test_closed_forms_match_manifold_solver():
    rng = np.random.default_rng(7)
    for _ in range(20):
        p = _sym(rng)
        ref = closed_form_single_drive(p)
        num = solve_manifolds(p, order=2)
        for (n, m) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]:
            a, b = ref.c[n, m], num.c[n, m]
            assert abs(a - b) <= 1e-12 * max(abs(a), abs(b), 1e-30)


def test_closed_forms_reject_asymmetric():
    p = SystemParams(delta1=0.1, delta2=0.2, u1=0.05, u2=0.05,
                     f1=1e-3, j_hop=3.0)
    with pytest.raises(ValueError):
        closed_form_single_drive(p)


def test_amplitude_scaling_with_drive():
    # c_nm is homogeneous of total degree n+m in the drives: rescaling
    # both amplitudes by s multiplies c_nm by s^(n+m) exactly, and with a
    # single drive c_nm is a monomial of degree n+m in it
    rng = np.random.default_rng(11)
    for _ in range(10):
        p = SystemParams(delta1=rng.uniform(-1, 1), delta2=rng.uniform(-1, 1),
                         u1=rng.uniform(0, 0.3), u2=rng.uniform(0, 0.3),
                         f1=1e-4 * rng.uniform(0.5, 1),
                         f2=1e-4 * (rng.uniform(0.2, 1) * 1j),
                         j_hop=rng.uniform(0, 5))
        base = solve_manifolds(p, order=3)
        scaled = solve_manifolds(p.replace(f1=2 * p.f1, f2=2 * p.f2), order=3)
        single = solve_manifolds(p.replace(f2=0.0), order=3)
        single2 = solve_manifolds(p.replace(f1=3 * p.f1, f2=0.0), order=3)
        for n in range(4):
            for m in range(4 - n):
                if n + m == 0:
                    continue
                a = base.c[n, m] * 2 ** (n + m)
                b = scaled.c[n, m]
                assert abs(a - b) <= 1e-12 * max(abs(a), abs(b), 1e-300)
                a = single.c[n, m] * 3 ** (n + m)
                b = single2.c[n, m]
                assert abs(a - b) <= 1e-12 * max(abs(a), abs(b), 1e-300)


def test_mode_exchange_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(10):
        p = SystemParams(delta1=rng.uniform(-1, 1), delta2=rng.uniform(-1, 1),
                         u1=rng.uniform(0, 0.3), u2=rng.uniform(0, 0.3),
                         f1=1e-4 * (rng.uniform(0.5, 1) + 0.3j),
                         f2=1e-4 * rng.uniform(0.2, 1),
                         j_hop=rng.uniform(0.1, 5),
                         kappa1=rng.uniform(0.5, 2), kappa2=rng.uniform(0.5, 2))
        swapped = SystemParams(delta1=p.delta2, delta2=p.delta1,
                               u1=p.u2, u2=p.u1, f1=p.f2, f2=p.f1,
                               j_hop=p.j_hop, kappa1=p.kappa2,
                               kappa2=p.kappa1)
        ca = solve_manifolds(p, order=3).c
        cb = solve_manifolds(swapped, order=3).c
        assert np.allclose(ca, cb.T, rtol=1e-12, atol=1e-300)


def test_recurrence_residual_high_order():
    # the returned amplitudes must satisfy the stationary hierarchy exactly
    p = SystemParams(delta1=0.3, delta2=-0.2, u1=0.04, u2=0.07,
                     f1=1e-3 + 5e-4j, f2=2e-4, j_hop=2.5)
    amps = solve_manifolds(p, order=6)
    c = amps.c
    dt1, dt2 = p.dtilde1, p.dtilde2
    for n in range(7):
        for m in range(7 - n):
            if n + m == 0 or n + m > 6:
                continue
            res = (n * dt1 + m * dt2 + n * (n - 1) * p.u1
                   + m * (m - 1) * p.u2) * c[n, m]
            if n >= 1:
                res += p.f1 * np.sqrt(n) * c[n - 1, m]
            if m >= 1:
                res += p.f2 * np.sqrt(m) * c[n, m - 1]
            if n >= 1 and m + 1 <= 6:
                res += p.j_hop * np.sqrt(n * (m + 1)) * c[n - 1, m + 1]
            if m >= 1 and n + 1 <= 6:
                res += p.j_hop * np.sqrt(m * (n + 1)) * c[n + 1, m - 1]
            assert abs(res) < 1e-14 * max(1.0, abs(c[n, m]))


def test_single_kerr_limit():
    # J = 0 decouples the modes; the driven mode follows the single-mode
    # ladder c_1 = -F/Dt, c_2 = F^2 / (sqrt2 Dt (Dt + U))
    p = SystemParams(delta1=0.2, u1=0.05, f1=1e-3, j_hop=0.0)
    amps = solve_manifolds(p, order=2)
    dt = p.dtilde1
    assert abs(amps.c[1, 0] - (-p.f1 / dt)) < 1e-15
    c2 = p.f1 ** 2 / (np.sqrt(2) * dt * (dt + p.u1))
    assert abs(amps.c[2, 0] - c2) < 1e-15
    assert abs(amps.c[0, 1]) == 0.0
    assert abs(amps.c[1, 1]) == 0.0


def test_cascade_is_unidirectional():
    # chi > 0 populates mode 2 from mode 1 but never back-acts
    p = SystemParams(delta1=0.1, delta2=-0.4, u1=0.02, u2=0.3,
                     f1=1e-3, f2=0.0, j_hop=0.0)
    chi = 0.7
    amps = solve_manifolds(p, order=3, cascade=chi)
    ref = solve_manifolds(p.replace(u2=0.01, delta2=0.25), order=3,
                          cascade=chi)
    # mode-1 amplitudes identical under any mode-2 parameter change
    for n in range(1, 4):
        assert abs(amps.c[n, 0] - ref.c[n, 0]) < 1e-16
    # forward coupling works: c01 = i chi c10 / Dtilde2
    expected = 1j * chi * amps.c[1, 0] / p.dtilde2
    assert abs(amps.c[0, 1] - expected) < 1e-15


def test_observables_moments_and_shortcuts():
    p = SystemParams(delta1=0.29, delta2=0.29, u1=0.04, u2=0.04,
                     f1=1e-4, j_hop=3.0)
    amps = solve_manifolds(p, order=2)
    obs = observables(amps)
    n1_exact = (abs(amps.c[1, 0]) ** 2 + abs(amps.c[1, 1]) ** 2
                + 2 * abs(amps.c[2, 0]) ** 2)
    assert abs(obs.n1 - n1_exact) < 1e-25
    assert obs.g2_1 is not None and obs.g2_1 > 0
    # at O(F^2) the shortcut and the full sum agree to O(n1)
    assert abs(obs.g2_1 - obs.g2_1_leading) < 1e-4 * obs.g2_1_leading + 1e-12


def test_observables_single_amplitude():
    c = np.zeros((3, 3), dtype=complex)
    c[0, 0] = 1.0
    c[1, 0] = 0.01
    amps = WeakDriveAmplitudes(c=c, order=2)
    obs = observables(amps)
    assert abs(obs.n1 - 1e-4) < 1e-18
    assert obs.g2_1 == 0.0
    assert obs.n2 == 0.0
    assert obs.g2_2 is None


def test_observables_empty_state_errors():
    c = np.zeros((3, 3), dtype=complex)
    c[0, 0] = 1.0
    with pytest.raises(ValueError):
        observables(WeakDriveAmplitudes(c=c, order=2))


def test_strong_drive_warning():
    p = SystemParams(f1=0.5, j_hop=1.0)
    with pytest.warns(UserWarning):
        solve_manifolds(p, order=2)


def test_order_bounds():
    p = SystemParams(f1=1e-3)
    with pytest.raises(ValueError):
        solve_manifolds(p, order=0)
    with pytest.raises(ValueError):
        solve_manifolds(p, order=7)


def test_conventional_kerr_formula_weak_u_limit():
    # the sequential-transition estimate and the exact weak-drive result
    # |Dt|^2/|Dt+U|^2 both tend to 1 as U -> 0; the mismatch is O(U) off
    # resonance and O(U^2) at delta = 0
    kappa = 1.0
    for delta in (0.0, 0.3, -0.7):
        dt = delta - 0.5j * kappa
        for u in (1e-4, 1e-3):
            exact = abs(dt) ** 2 / abs(dt + u) ** 2
            approx = conventional_kerr_g2(delta, u, kappa)
            bound = 60 * u ** 2 if delta == 0.0 else 10 * u
            assert abs(approx - exact) < bound + 1e-12
    # and visibly deviates once U ~ kappa (documenting the heuristic)
    exact = abs(-0.5j) ** 2 / abs(-0.5j + 1.0) ** 2
    assert abs(conventional_kerr_g2(0.0, 1.0, 1.0) - exact) > 0.05


def test_jc_solve_cap_and_hierarchy():
    jc = JCParams(delta1=0.2, delta2=-0.1, g=0.3, f1=1e-3, f2=2e-4)
    amps = jc_solve(jc, order=3)
    assert amps.mode2_max == 1
    # no doubly-excited emitter amplitude exists
    assert amps.c[0, 2] == 0.0 and amps.c[1, 2] == 0.0
    # first manifold solves the 2x2 system with the effective emitter energy
    eps = jc.epstilde
    dt1 = jc.dtilde1
    det = dt1 * eps - jc.g ** 2
    c10 = (-jc.f1 * eps + jc.g * jc.f2) / det
    c01 = (-jc.f2 * dt1 + jc.g * jc.f1) / det
    assert abs(amps.c[1, 0] - c10) < 1e-15
    assert abs(amps.c[0, 1] - c01) < 1e-15

"""Output-field mixing: moments, optimal conditions, delayed correlations."""

import cmath
import math

import numpy as np
import pytest

from upblab.dynamics import build_liouvillian, steady_state
from upblab.fock import build_basis
from upblab.iomix import (
    MixingSpec,
    drive_from_stokes,
    gamma1_opt,
    output_g2_tau,
    output_moments,
    output_pair_amplitude,
    symmetric_io_opt,
)
from upblab.params import BathParams, SystemParams
from upblab.weakdrive import solve_manifolds


def test_stokes_parameterizations():
    mix = MixingSpec.from_stokes(2.0, math.pi / 2, 0.3)
    assert abs(mix.gamma1 - 2.0 * math.cos(math.pi / 4)) < 1e-15
    assert abs(mix.gamma2 - 2.0 * math.sin(math.pi / 4)
               * cmath.exp(0.3j)) < 1e-15
    f1, f2 = drive_from_stokes(0.1, math.pi / 2, 0.0)
    assert abs(f1 - f2) < 1e-15
    assert abs(f1 - 0.1 / math.sqrt(2.0)) < 1e-15
    # poles of the sphere give single-port drives
    f1, f2 = drive_from_stokes(0.1, 0.0, 0.7)
    assert f1 == pytest.approx(0.1) and abs(f2) < 1e-17
    with pytest.raises(ValueError):
        MixingSpec.from_stokes(-1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        drive_from_stokes(-0.1, 0.0, 0.0)


def test_optimal_mixing_annihilates_the_pair_amplitude():
    rng = np.random.default_rng(17)
    for _ in range(20):
        d = rng.uniform(-1, 1)
        u = rng.uniform(0.01, 0.5)
        kap = rng.uniform(0.5, 2.0)
        f1, f2 = rng.uniform(0.5e-3, 2e-3, 2)
        base = SystemParams(delta1=d, delta2=d, u1=u, u2=u, f1=f1, f2=f2,
                            kappa1=kap, kappa2=kap)
        amps = solve_manifolds(base)
        gamma2 = 1.0 + 0.5j
        for g1 in gamma1_opt(base, gamma2):
            a2 = output_pair_amplitude(amps, MixingSpec(g1, gamma2))
            scale = max(abs(g1), abs(gamma2)) ** 2 * max(f1, f2) ** 2
            assert abs(a2) < 1e-8 * scale


def test_mixing_condition_requires_symmetric_decoupled_pair():
    with pytest.raises(ValueError):
        gamma1_opt(SystemParams(u1=0.1, u2=0.1, f1=1e-3, f2=1e-3,
                                j_hop=0.5), 1.0)
    with pytest.raises(ValueError):
        gamma1_opt(SystemParams(u1=0.1, u2=0.2, f1=1e-3, f2=1e-3), 1.0)
    with pytest.raises(ValueError):
        gamma1_opt(SystemParams(f1=1e-3, f2=1e-3), 1.0)
    with pytest.raises(ValueError):
        gamma1_opt(SystemParams(u1=0.1, u2=0.1, f2=1e-3), 1.0)


def test_symmetric_conditions_share_one_quadratic():
    base = SystemParams(delta1=0.3, delta2=0.3, u1=0.1, u2=0.1,
                        f1=1e-3, f2=1e-3)
    cond = symmetric_io_opt(base)
    assert cond.gamma_ratio == cond.drive_ratio
    amps = solve_manifolds(base)
    for ratio in cond.gamma_ratio:
        a2 = output_pair_amplitude(amps, MixingSpec(ratio, 1.0))
        assert abs(a2) < 1e-8 * abs(ratio) ** 2 * 1e-6
    for ratio in cond.drive_ratio:
        off = base.replace(f1=ratio * base.f2)
        a2 = output_pair_amplitude(solve_manifolds(off), MixingSpec(1.0, 1.0))
        assert abs(a2) < 1e-8 * max(abs(off.f1), abs(off.f2)) ** 2
    # equal drives with equal mixing can never cancel the pair amplitude
    a2_sym = output_pair_amplitude(amps, MixingSpec(1.0, 1.0))
    assert abs(a2_sym) > 1e-7 * 1e-6


def test_output_moments_match_full_density_matrix():
    base = SystemParams(delta1=0.3, delta2=0.3, u1=0.1, u2=0.1,
                        f1=1e-3, f2=1e-3)
    mix = MixingSpec(0.8, 0.6 * cmath.exp(0.4j))
    mom = output_moments(solve_manifolds(base, order=3), mix)
    basis = build_basis(10)
    rho = steady_state(build_liouvillian(base, BathParams(), basis))
    mom_full = output_moments(rho, mix)
    assert abs(mom_full.n_out - mom.n_out) / mom_full.n_out < 1e-3
    assert abs(mom_full.g2_out - mom.g2_out) / mom_full.g2_out < 1e-3
    # the printed shortcuts exist only on the amplitude route
    assert mom_full.n_out_printed is None
    assert mom.n_out_printed is not None and mom.n_out_printed > 0.0
    assert mom.g2_out_printed is not None and mom.g2_out_printed > 0.0


def test_mixed_output_of_a_linear_system_stays_coherent():
    basis = build_basis(10)
    lin = SystemParams(delta1=0.2, delta2=-0.1, f1=0.05, f2=0.03j, j_hop=0.7)
    rho = steady_state(build_liouvillian(lin, BathParams(), basis))
    mom = output_moments(rho, MixingSpec(0.5, 0.5))
    assert abs(mom.g2_out - 1.0) < 1e-6


def test_output_moment_guards():
    base = SystemParams(delta1=0.3, delta2=0.3, u1=0.1, u2=0.1,
                        f1=1e-3, f2=1e-3)
    amps = solve_manifolds(base)
    with pytest.raises(TypeError):
        output_moments(0.5, MixingSpec(1.0, 1.0))
    with pytest.raises(ValueError):
        output_moments(amps, MixingSpec(0.0, 0.0))
    with pytest.raises(ValueError):
        output_pair_amplitude(solve_manifolds(base, order=1),
                              MixingSpec(1.0, 1.0))


def test_output_correlations_flat_for_coherent_and_dips_at_optimum():
    basis = build_basis(10)
    tau = np.linspace(0.0, 3.0, 7)
    lin = SystemParams(delta1=0.2, delta2=-0.1, f1=0.05, f2=0.03j, j_hop=0.7)
    flat = output_g2_tau(lin, BathParams(), basis, MixingSpec(0.5, 0.5), tau)
    assert np.all(np.abs(flat - 1.0) < 1e-6)
    base = SystemParams(delta1=0.3, delta2=0.3, u1=0.1, u2=0.1,
                        f1=1e-3, f2=1e-3)
    ratio = symmetric_io_opt(base).gamma_ratio[0]
    dip = output_g2_tau(base, BathParams(), basis,
                        MixingSpec(complex(ratio), 1.0), tau)
    assert abs(dip[0]) < 1e-2
    assert dip[-1] > 0.5

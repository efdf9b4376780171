"""Input-output mixing of the two cavity fields.

The detected field is b = gamma1*a1 + gamma2*a2 (the vacuum input noise adds
nothing to normally ordered moments at zero thermal occupation).  Ground
truth for all output statistics is operator algebra on b evaluated on the
simulated state; the printed weak-drive shortcut expressions are evaluated
alongside for comparison, as their gamma-power placement does not follow
from the amplitude expansion.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .fock import DensityMatrix, mode_annihilation
from .params import BathParams, SystemParams
from .weakdrive import WeakDriveAmplitudes

__all__ = [
    "MixingSpec",
    "OutputMoments",
    "drive_from_stokes",
    "output_pair_amplitude",
    "output_moments",
    "gamma1_opt",
    "symmetric_io_opt",
    "output_g2_tau",
]


@dataclass(frozen=True)
class MixingSpec:
    """Complex mixing coefficients of the two output ports."""

    gamma1: complex
    gamma2: complex

    @classmethod
    def from_stokes(cls, gamma0, theta_out, phi_out):
        """Stokes parameterization: gamma0 >= 0, polar and azimuthal angles."""
        if gamma0 < 0.0:
            raise ValueError("gamma0 must be >= 0")
        return cls(
            gamma1=gamma0 * math.cos(theta_out / 2.0),
            gamma2=gamma0 * math.sin(theta_out / 2.0) * cmath.exp(1j * phi_out),
        )


def drive_from_stokes(f0, theta_in, phi_in):
    """Drive pair (F1, F2) from the Stokes angles of the input field."""
    if f0 < 0.0:
        raise ValueError("f0 must be >= 0")
    return (
        f0 * math.cos(theta_in / 2.0),
        f0 * math.sin(theta_in / 2.0) * cmath.exp(1j * phi_in),
    )


@dataclass(frozen=True)
class OutputMoments:
    """Output occupancy and statistics; printed shortcuts when available."""

    n_out: float
    g2_out: Optional[float]
    n_out_printed: Optional[float] = None
    g2_out_printed: Optional[float] = None


def output_pair_amplitude(amps: WeakDriveAmplitudes, mix: MixingSpec) -> complex:
    """Two-photon amplitude of the mixed output at leading order.

    A2 = gamma1^2 c20 + sqrt(2) gamma1 gamma2 c11 + gamma2^2 c02; the optimal
    mixing conditions are exactly its roots.
    """
    if amps.order < 2:
        raise ValueError("amplitudes up to total excitation 2 are required")
    g1, g2 = mix.gamma1, mix.gamma2
    return (
        g1**2 * amps.amplitude(2, 0)
        + math.sqrt(2.0) * g1 * g2 * amps.amplitude(1, 1)
        + g2**2 * amps.amplitude(0, 2)
    )


def _moments_from_state(rho: DensityMatrix, mix: MixingSpec):
    a1 = mode_annihilation(rho.basis, 1).matrix
    a2 = mode_annihilation(rho.basis, 2).matrix
    b = mix.gamma1 * a1 + mix.gamma2 * a2
    bd = b.conj().T
    n_out = float(np.trace(bd @ b @ rho.matrix).real)
    if n_out <= 0.0:
        raise ValueError("zero output occupancy")
    num = float(np.trace(bd @ bd @ b @ b @ rho.matrix).real)
    return n_out, num / n_out**2


def _moments_from_amplitudes(amps: WeakDriveAmplitudes, mix: MixingSpec):
    if amps.order < 2:
        raise ValueError("amplitudes up to total excitation 2 are required")
    dim = amps.order + 1
    c = np.array(amps.c, dtype=complex)
    n_idx, m_idx = np.indices((dim, dim))
    c[n_idx + m_idx > amps.order] = 0.0
    psi = c.ravel()
    norm = np.linalg.norm(psi)
    psi = psi / norm
    a = np.diag(np.sqrt(np.arange(1, dim)), k=1)
    eye = np.eye(dim)
    a1 = np.kron(a, eye)
    a2 = np.kron(eye, a)
    b = mix.gamma1 * a1 + mix.gamma2 * a2
    bd = b.conj().T
    n_out = float((psi.conj() @ (bd @ b @ psi)).real)
    if n_out <= 0.0:
        raise ValueError("zero output occupancy")
    g2 = float((psi.conj() @ (bd @ bd @ b @ b @ psi)).real) / n_out**2

    # printed weak-drive shortcuts, gamma powers as published
    g1s, g2s = mix.gamma1, mix.gamma2
    c10, c01 = amps.amplitude(1, 0), amps.amplitude(0, 1)
    c20, c11, c02 = (
        amps.amplitude(2, 0),
        amps.amplitude(1, 1),
        amps.amplitude(0, 2),
    )
    n_printed = abs(g1s**2 * c10 + g2s**2 * c01) ** 2
    if n_printed > 0.0:
        root2 = math.sqrt(2.0)
        num_printed = (
            abs(g1s**2 * c20 + g1s * g2s * root2 * c11) ** 2
            + abs(g2s**2 * c02 + g1s * g2s * root2 * c11) ** 2
            + abs(g1s**2 * c20 + g2s**2 * c02) ** 2
        )
        g2_printed = num_printed / n_printed**2
    else:
        g2_printed = None
    return n_out, g2, n_printed, g2_printed


def output_moments(state: Union[DensityMatrix, WeakDriveAmplitudes],
                   mix: MixingSpec) -> OutputMoments:
    """Occupancy and equal-time statistics of the mixed output field.

    Parameters
    ----------
    state : DensityMatrix or WeakDriveAmplitudes
        Full quantum state, or weak-drive amplitudes (in which case the
        printed shortcut expressions are evaluated alongside).
    mix : MixingSpec

    Returns
    -------
    OutputMoments
    """
    if isinstance(state, DensityMatrix):
        n_out, g2 = _moments_from_state(state, mix)
        return OutputMoments(n_out=n_out, g2_out=g2)
    if isinstance(state, WeakDriveAmplitudes):
        n_out, g2, n_p, g2_p = _moments_from_amplitudes(state, mix)
        return OutputMoments(
            n_out=n_out, g2_out=g2, n_out_printed=n_p, g2_out_printed=g2_p
        )
    raise TypeError("state must be a DensityMatrix or WeakDriveAmplitudes")


def _symmetric_quadratic_roots(params: SystemParams):
    # roots x of dtilde x^2 + 2 (dtilde+U) x + dtilde = 0, the ratio equation
    # shared by the mixing and drive conditions of the symmetric decoupled pair
    dt = params.dtilde1
    u = params.u1
    root = np.sqrt(u * (2.0 * dt + u) + 0j)
    return ((root - (dt + u)) / dt, (-root - (dt + u)) / dt)


def _require_symmetric_decoupled(params: SystemParams):
    if params.j_hop != 0.0:
        raise ValueError(
            "the closed-form mixing conditions assume decoupled cavities (J=0)"
        )
    if not (
        params.delta1 == params.delta2
        and params.u1 == params.u2
        and params.kappa1 == params.kappa2
    ):
        raise ValueError("identical cavities required (equal delta, U, kappa)")
    if params.u1 == 0.0:
        raise ValueError("a Kerr nonlinearity is required (U != 0)")


def gamma1_opt(params: SystemParams, gamma2, f1=None, f2=None):
    """Mixing coefficient cancelling the two-photon output amplitude.

    For identical decoupled cavities driven by (F1, F2), returns both
    branches of the optimal gamma1 given gamma2.

    Parameters
    ----------
    params : SystemParams
        Symmetric decoupled pair; drives read from params unless overridden.
    gamma2 : complex
        Fixed mixing coefficient of port 2.
    f1, f2 : complex, optional
        Drive overrides.

    Returns
    -------
    tuple of complex
    """
    _require_symmetric_decoupled(params)
    f1 = params.f1 if f1 is None else f1
    f2 = params.f2 if f2 is None else f2
    if f1 == 0 or f2 == 0:
        raise ValueError("both drives must be nonzero")
    roots = _symmetric_quadratic_roots(params)
    return tuple(gamma2 * (f2 / f1) * x for x in roots)


@dataclass(frozen=True)
class SymmetricIOCondition:
    """Optimal ratios for the symmetric decoupled pair.

    ``gamma_ratio``: gamma1/gamma2 branches for equal drives (F1 = F2);
    ``drive_ratio``: F1/F2 branches for equal outputs (gamma1 = gamma2).
    """

    gamma_ratio: tuple
    drive_ratio: tuple


def symmetric_io_opt(params: SystemParams) -> SymmetricIOCondition:
    """Both symmetric optimal conditions of the decoupled identical pair.

    The two-photon output amplitude is symmetric under exchanging the roles
    of the drive and mixing ratios, so both conditions share one quadratic.
    There is no fully symmetric solution: imposing F1=F2 and gamma1=gamma2
    simultaneously leaves the amplitude proportional to 2*dtilde + ... != 0.
    """
    _require_symmetric_decoupled(params)
    roots = _symmetric_quadratic_roots(params)
    return SymmetricIOCondition(gamma_ratio=roots, drive_ratio=roots)


def output_g2_tau(params: SystemParams, bath: BathParams, basis, mix: MixingSpec,
                  tau_grid: Sequence[float]) -> np.ndarray:
    """Delayed second-order correlation of the mixed output field.

    Quantum-regression evaluation on the collapse operator
    b = gamma1 a1 + gamma2 a2 from the steady state.
    """
    from .correlations import _g2_tau_from_state
    from .dynamics import build_liouvillian, steady_state

    liouv = build_liouvillian(params, bath, basis)
    rho_ss = steady_state(liouv)
    a1 = mode_annihilation(basis, 1).matrix
    a2 = mode_annihilation(basis, 2).matrix
    b = mix.gamma1 * a1 + mix.gamma2 * a2
    return _g2_tau_from_state(liouv, rho_ss, b, tau_grid)

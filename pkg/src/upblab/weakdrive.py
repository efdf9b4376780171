"""Weak-drive photon amplitudes by manifold-by-manifold elimination.

At drive amplitudes far below the losses the steady state is dominated by
the lowest Fock components and the amplitude c_nm of |n, m> is O(F^{n+m}).
Dropping the sub-leading feedback terms (the F^* couplings to higher
manifolds), the stationary amplitudes obey a block-triangular linear system
that can be solved one total-excitation manifold at a time:

    0 = Dtilde_nm c_nm + F1 sqrt(n) c_{n-1,m} + F2 sqrt(m) c_{n,m-1}
        + J sqrt(n(m+1)) c_{n-1,m+1} + (J - i chi) sqrt(m(n+1)) c_{n+1,m-1}

with Dtilde_nm = n Dtilde_1 + m Dtilde_2 + n(n-1) U1 + m(m-1) U2,
Dtilde_j = delta_j - i kappa_j / 2, c_00 = 1, and chi an optional
unidirectional (cascaded) coupling feeding mode 1 into mode 2 only, which
is why it enters a single off-diagonal.
"""

import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .params import SystemParams, JCParams

STRONG_DRIVE_WARN = 0.1  # |F| / kappa above which the expansion degrades


@dataclass(frozen=True, eq=False)
class WeakDriveAmplitudes:
    """Stationary amplitudes c[n, m] up to total excitation `order`.

    Entries with n + m > order (or m beyond an optional mode-2 cap) are
    zero and meaningless.  c[0, 0] = 1 by normalization of the expansion.
    """

    c: np.ndarray
    order: int
    mode2_max: Optional[int] = None

    def amplitude(self, n: int, m: int) -> complex:
        return complex(self.c[n, m])


@dataclass(frozen=True)
class WeakDriveObservables:
    n1: float
    n2: float
    g2_1: Optional[float]
    g2_2: Optional[float]
    g2_1_leading: Optional[float]
    g2_2_leading: Optional[float]


def _manifold_states(k: int, mode2_max: Optional[int]):
    return [(n, k - n) for n in range(k, -1, -1)
            if mode2_max is None or (k - n) <= mode2_max]


def solve_manifolds(params: SystemParams, order: int = 2,
                    cascade: float = 0.0,
                    mode2_max: Optional[int] = None) -> WeakDriveAmplitudes:
    """Solve the truncated amplitude hierarchy up to a given total order.

    Parameters
    ----------
    params : SystemParams
        Detunings, interactions, drives, hopping, losses.
    order : int
        Highest total excitation retained (2 for g2 work, up to 6 supported).
    cascade : float
        Unidirectional coupling chi; leaves mode 1 blind to mode 2.
    mode2_max : int, optional
        Cap on the mode-2 excitation (1 realizes a two-level emitter).

    Returns
    -------
    WeakDriveAmplitudes
    """
    if not 1 <= order <= 6:
        raise ValueError("order must lie in 1..6")
    fmax = max(abs(params.f1), abs(params.f2))
    kmin = min(params.kappa1, params.kappa2)
    if fmax > STRONG_DRIVE_WARN * kmin:
        warnings.warn("drive amplitude exceeds 0.1 kappa; the weak-drive "
                      "expansion is no longer controlled", stacklevel=2)
    dt1, dt2 = params.dtilde1, params.dtilde2
    c = np.zeros((order + 1, order + 1), dtype=complex)
    c[0, 0] = 1.0
    for k in range(1, order + 1):
        states = _manifold_states(k, mode2_max)
        nk = len(states)
        a = np.zeros((nk, nk), dtype=complex)
        b = np.zeros(nk, dtype=complex)
        pos = {s: i for i, s in enumerate(states)}
        for i, (n, m) in enumerate(states):
            a[i, i] = (n * dt1 + m * dt2
                       + n * (n - 1) * params.u1 + m * (m - 1) * params.u2)
            if (n - 1, m + 1) in pos:
                a[i, pos[(n - 1, m + 1)]] = params.j_hop * np.sqrt(n * (m + 1))
            if (n + 1, m - 1) in pos:
                a[i, pos[(n + 1, m - 1)]] = ((params.j_hop - 1j * cascade)
                                             * np.sqrt(m * (n + 1)))
            if n >= 1:
                b[i] -= params.f1 * np.sqrt(n) * c[n - 1, m]
            if m >= 1:
                b[i] -= params.f2 * np.sqrt(m) * c[n, m - 1]
        try:
            sol = np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"singular manifold block at total excitation "
                             f"{k}; with positive losses this indicates "
                             f"degenerate parameters") from exc
        for (n, m), i in pos.items():
            c[n, m] = sol[i]
    return WeakDriveAmplitudes(c=c, order=order, mode2_max=mode2_max)


def closed_form_single_drive(params: SystemParams) -> WeakDriveAmplitudes:
    """Second-order amplitudes for the symmetric dimer driven on mode 1.

    Requires delta1 = delta2, u1 = u2, kappa1 = kappa2, f2 = 0.  These are
    the explicit rational forms of the manifold solution; they exist only
    away from the linear resonance J^2 = Dtilde^2.
    """
    if (params.delta1 != params.delta2 or params.u1 != params.u2
            or params.kappa1 != params.kappa2 or params.f2 != 0):
        raise ValueError("closed forms require a symmetric dimer driven on "
                         "mode 1 only")
    dt = params.dtilde1
    u = params.u1
    j = params.j_hop
    f1 = params.f1
    lin = j * j - dt * dt
    if abs(lin) < 1e-12 * max(abs(j * j), abs(dt * dt), 1e-300):
        raise ValueError("linear resonance J^2 = Dtilde^2: closed forms "
                         "diverge")
    c = np.zeros((3, 3), dtype=complex)
    c[0, 0] = 1.0
    c[1, 0] = f1 * dt / lin
    c[0, 1] = -f1 * j / lin
    den = 2 * np.sqrt(2) * (u + dt) * (dt * dt - j * j) * (dt * (u + dt) - j * j)
    if abs(den) == 0:
        raise ValueError("two-photon resonance: closed forms diverge")
    c[2, 0] = f1 ** 2 * (j * j * u + 2 * dt * dt * (u + dt)) / den
    c[0, 2] = f1 ** 2 * j * j * (u + 2 * dt) / den
    c[1, 1] = (f1 ** 2 * j * (u + 2 * dt)
               / (2 * lin * (dt * (u + dt) - j * j)))
    return WeakDriveAmplitudes(c=c, order=2)


def observables(amps: WeakDriveAmplitudes) -> WeakDriveObservables:
    """Occupancies and equal-time g2 from the amplitudes.

    n_j = sum n |c_nm|^2 and g2_j = sum n(n-1)|c_nm|^2 / n_j^2 (mode-2
    analogues with m).  The leading-order shortcuts n1 ~ |c10|^2 and
    g2_1 ~ 2|c20|^2/|c10|^4 are reported alongside.  A mode with exactly
    zero occupancy has undefined g2 (None); if both modes are unoccupied
    the state carries no signal at all and this raises.
    """
    order = amps.order
    n1 = n2 = 0.0
    num1 = num2 = 0.0
    for n in range(order + 1):
        for m in range(order + 1 - n):
            w = abs(amps.c[n, m]) ** 2
            n1 += n * w
            n2 += m * w
            num1 += n * (n - 1) * w
            num2 += m * (m - 1) * w
    if n1 == 0.0 and n2 == 0.0:
        raise ValueError("both occupancies vanish: g2 undefined")
    g2_1 = num1 / n1 ** 2 if n1 > 0 else None
    g2_2 = num2 / n2 ** 2 if n2 > 0 else None
    c10 = amps.c[1, 0] if order >= 1 else 0.0
    c01 = amps.c[0, 1] if order >= 1 else 0.0
    g2_1_lead = None
    g2_2_lead = None
    if order >= 2:
        if abs(c10) > 0:
            g2_1_lead = 2 * abs(amps.c[2, 0]) ** 2 / abs(c10) ** 4
        if abs(c01) > 0:
            g2_2_lead = 2 * abs(amps.c[0, 2]) ** 2 / abs(c01) ** 4
    return WeakDriveObservables(n1=n1, n2=n2, g2_1=g2_1, g2_2=g2_2,
                                g2_1_leading=g2_1_lead,
                                g2_2_leading=g2_2_lead)


def conventional_kerr_g2(delta: float, u: float, kappa: float) -> float:
    """Sequential-transition estimate of g2(0) for a single Kerr mode,
    |Dtilde|^4 / |Dtilde (2U + Dtilde)|^2.

    This is the textbook comparison curve built from the detuning of the
    1 -> 2 transition; the exact weak-drive result is
    |Dtilde|^2/|Dtilde + U|^2 and the two agree only for U << |Dtilde|.
    """
    dt = delta - 0.5j * kappa
    return float(abs(dt) ** 4 / abs(dt * (2 * u + dt)) ** 2)


def jc_solve(jc: JCParams, order: int = 2) -> WeakDriveAmplitudes:
    """Weak-drive amplitudes for the cavity + two-level-emitter model.

    Reuses the bosonic hierarchy with the second mode capped at a single
    excitation and no Kerr terms; the emitter enters through its effective
    complex energy delta2/2 - i kappa2/2.
    """
    return solve_manifolds(jc.as_system_params(), order=order, mode2_max=1)

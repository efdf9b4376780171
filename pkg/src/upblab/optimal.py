"""Closed-form optimal antibunching conditions and numeric validation helpers.

Each condition pins one parameter so that a targeted two-photon amplitude of
the weak-driving expansion vanishes.  Both algebraic branches are always
returned; substituting either into the weak-drive solver must annihilate the
target amplitude.  A deterministic grid-plus-compass minimizer is provided as
an independent numerical oracle for the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .params import JCParams, SystemParams
from .weakdrive import solve_manifolds

__all__ = [
    "DimerOptimum",
    "JCOptimum",
    "MinimizeResult",
    "delta_u_opt",
    "j_for_u_opt",
    "f1_opt_cascaded",
    "f1_opt_coherent",
    "coherent_c20_roots",
    "jc_opt",
    "effective_kerr",
    "minimize_g2",
    "drive_for_occupancy",
]


@dataclass(frozen=True)
class DimerOptimum:
    """Optimal (detuning, nonlinearity) pair for the symmetric dimer.

    Attributes
    ----------
    delta : tuple of float
        Both signs of the optimal common detuning.
    u : tuple of float
        Matching Kerr strengths, one per detuning branch (odd in delta).
    asymptote : float
        Large-hopping limit of ``u[0]``, equal to 2*kappa^2/(3*sqrt(3)*J^2).
    """

    delta: tuple
    u: tuple
    asymptote: float


@dataclass(frozen=True)
class JCOptimum:
    """Optimal parameters suppressing the two-photon cavity amplitude."""

    delta1: float
    g: tuple
    f2: tuple


@dataclass(frozen=True)
class MinimizeResult:
    x: tuple
    value: float
    evaluations: tuple


def delta_u_opt(j_hop, kappa=1.0):
    """Optimal common detuning and Kerr strength of the driven dimer.

    Parameters
    ----------
    j_hop : float
        Inter-mode hopping J > 0.
    kappa : float
        Common loss rate kappa > 0.

    Returns
    -------
    DimerOptimum
        Both detuning branches, matching nonlinearities, and the weak-U
        asymptote of the positive branch.
    """
    if j_hop <= 0.0 or kappa <= 0.0:
        raise ValueError("j_hop and kappa must be positive")
    if 2.0 * j_hop**2 <= kappa**2:
        raise ValueError(
            "no real optimum for 2*J^2 <= kappa^2: the optimal detuning "
            "vanishes only in the singular case 2*J^2 = kappa^2 where the "
            "required nonlinearity diverges"
        )
    j2 = j_hop**2
    k2 = kappa**2
    inner = math.sqrt(9.0 * j2**2 + 8.0 * k2 * j2)
    d_plus = 0.5 * math.sqrt(inner - k2 - 3.0 * j2)
    u_of = lambda d: d * (4.0 * d**2 + 5.0 * k2) / (2.0 * (2.0 * j2 - k2))
    asym = 2.0 * k2 / (3.0 * math.sqrt(3.0) * j2)
    return DimerOptimum(
        delta=(d_plus, -d_plus),
        u=(u_of(d_plus), u_of(-d_plus)),
        asymptote=asym,
    )


def j_for_u_opt(u, kappa=1.0, j_max=1e4):
    """Hopping whose positive-branch optimum requires the given Kerr strength.

    Inverts the map J -> U_opt(J), which decreases monotonically from the
    pole at 2*J^2 = kappa^2 towards zero, so any U > 0 has exactly one
    preimage.  Returns the pair (j_hop, delta_opt) realizing U as the
    positive-branch optimal nonlinearity.

    Parameters
    ----------
    u : float
        Target Kerr strength U > 0.
    kappa : float
        Common loss rate kappa > 0.

    Returns
    -------
    tuple of float
        (j_hop, delta_opt) with delta_u_opt(j_hop, kappa).u[0] == u.
    """
    if u <= 0.0 or kappa <= 0.0:
        raise ValueError("u and kappa must be positive")
    j_lo = kappa / math.sqrt(2.0) * (1.0 + 1e-9)
    if delta_u_opt(j_lo, kappa).u[0] < u:
        raise ValueError("u too large: above the value at the hopping pole")
    j_hi = max(10.0 * kappa, 2.0 * kappa / math.sqrt(u / kappa))
    while delta_u_opt(j_hi, kappa).u[0] > u:
        j_hi *= 2.0
        if j_hi > j_max * kappa:
            raise ValueError("u too small: hopping bound exceeded")
    j_hop = brentq(lambda j: delta_u_opt(j, kappa).u[0] - u, j_lo, j_hi,
                   xtol=1e-14, rtol=1e-15)
    return float(j_hop), float(delta_u_opt(j_hop, kappa).delta[0])


def f1_opt_cascaded(params, chi):
    """Drive on the target mode that cancels its two-photon amplitude.

    The source mode (1) feeds the target mode (2) through a unidirectional
    channel of strength ``chi``; the returned pair of complex drive values
    for port 1 annihilates the target-mode amplitude c02 at leading order.

    Parameters
    ----------
    params : SystemParams
        Mode parameters; ``params.f2`` is the (real, positive) target drive.
    chi : float
        Cascade coupling, chi > 0.

    Returns
    -------
    tuple of complex
        Both branches of the optimal source drive.
    """
    if chi <= 0.0:
        raise ValueError("chi must be positive")
    f2 = params.f2
    if f2 == 0:
        raise ValueError("target drive f2 must be nonzero")
    dt = params.dtilde1 + params.dtilde2
    ut1 = params.dtilde1 + params.u1
    if dt + params.u1 == 0:
        raise ValueError("degenerate condition: dtilde1 + dtilde2 + u1 = 0")
    root = np.sqrt(params.u1 * ut1 * dt * params.dtilde2 + 0j)
    pref = 1j * f2 / ((dt + params.u1) * chi)
    return (pref * (dt * ut1 + root), pref * (dt * ut1 - root))


def f1_opt_coherent(params):
    """Mode-1 drive cancelling the mode-2 two-photon amplitude (J-coupled).

    Returns both branches of the optimal complex drive on port 1, given the
    hopping J and the drive on port 2.  Requires J != 0; for decoupled
    cavities the two-photon suppression is instead arranged at the detection
    stage by mixing the two output fields.
    """
    j = params.j_hop
    if j == 0.0:
        raise ValueError(
            "J = 0 leaves the modes uncoupled: no drive on port 1 can cancel "
            "the mode-2 amplitude; mix the output fields instead"
        )
    f2 = params.f2
    if f2 == 0:
        raise ValueError("drive f2 must be nonzero")
    dt = params.dtilde1 + params.dtilde2
    ut1 = params.dtilde1 + params.u1
    denom = j**2 * (dt + params.u1)
    if denom == 0:
        raise ValueError("degenerate condition: dtilde1 + dtilde2 + u1 = 0")
    root = np.sqrt(
        f2**2 * j**2 * params.u1 * (params.dtilde2 * dt * ut1 - j**2 * (dt + params.u1))
        + 0j
    )
    lead = f2 * dt * ut1 * j
    return ((lead + root) / denom, (lead - root) / denom)


def coherent_c20_roots(params, order=2):
    """Numeric drive-1 roots of the mode-1 two-photon amplitude c20.

    c20 is a homogeneous quadratic form in (F1, F2); three weak-drive solves
    fix its coefficients and the two roots follow.  Serves as the numerical
    counterpart of the closed-form conditions, which target c02.
    """
    f2 = params.f2
    if f2 == 0:
        raise ValueError("drive f2 must be nonzero")

    def c20_at(x):
        amps = solve_manifolds(params.replace(f1=x * f2), order=order)
        return amps.amplitude(2, 0) / f2**2

    f_p1 = c20_at(1.0)
    f_m1 = c20_at(-1.0)
    f_p2 = c20_at(2.0)
    b = 0.5 * (f_p1 - f_m1)
    a = (f_p2 - f_p1 - b) / 3.0
    c = f_p1 - a - b
    roots = np.roots([a, b, c])
    return (complex(roots[0]) * f2, complex(roots[1]) * f2)


def jc_opt(jc):
    """Optimal cavity detuning, coupling, and emitter drive for the JC model.

    The detuning/coupling pair suppresses the two-photon cavity amplitude
    with the emitter undriven; the emitter-drive pair achieves the same at
    arbitrary fixed coupling.
    """
    if jc.kappa2 <= 0.0:
        raise ValueError("kappa2 must be positive")
    if jc.g == 0.0:
        raise ValueError("g must be nonzero for the emitter-drive condition")
    delta1 = -jc.delta2 * (jc.kappa1 + 2.0 * jc.kappa2) / (2.0 * jc.kappa2)
    g_mag = math.sqrt((jc.delta2**2 + jc.kappa2**2) * (jc.kappa1 + jc.kappa2)) / (
        2.0 * math.sqrt(jc.kappa2)
    )
    dt1 = jc.dtilde1
    eps = jc.epstilde
    root = np.sqrt(dt1 * (dt1 + eps) - jc.g**2 + 0j)
    f2 = (jc.f1 * (dt1 + eps + root) / jc.g, jc.f1 * (dt1 + eps - root) / jc.g)
    return JCOptimum(delta1=delta1, g=(g_mag, -g_mag), f2=f2)


def effective_kerr(g, delta_ce=None, omega_m=None):
    """Effective Kerr strength of a dispersive emitter or a mechanical mode.

    Exactly one of ``delta_ce`` (cavity-emitter detuning, dispersive regime,
    U_eff = g^4/delta_ce^3) or ``omega_m`` (mechanical frequency,
    U_eff = g^2/omega_m) must be given.
    """
    if (delta_ce is None) == (omega_m is None):
        raise ValueError("give exactly one of delta_ce or omega_m")
    if delta_ce is not None:
        if delta_ce == 0.0:
            raise ValueError("delta_ce must be nonzero")
        return g**4 / delta_ce**3
    if omega_m <= 0.0:
        raise ValueError("omega_m must be positive")
    return g**2 / omega_m


def minimize_g2(objective, bounds, grid_points=64, tol=1e-4, max_iter=200):
    """Deterministic box-bounded minimizer: coarse grid scan plus compass search.

    Parameters
    ----------
    objective : callable
        Maps a parameter tuple (length = len(bounds)) to a real value.
    bounds : sequence of (low, high)
        Search box, one pair per parameter.
    grid_points : int
        Points per axis in the initial scan.
    tol : float
        Relative objective improvement below which the search stops.

    Returns
    -------
    MinimizeResult
        Best point, its value, and the full evaluation log.
    """
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    for lo, hi in bounds:
        if not lo < hi:
            raise ValueError("each bound must satisfy low < high")
    axes = [np.linspace(lo, hi, grid_points) for lo, hi in bounds]
    log = []

    def evaluate(x):
        val = float(objective(tuple(x)))
        log.append((tuple(x), val))
        return val

    best_x = None
    best_val = math.inf
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = np.stack([m.ravel() for m in mesh], axis=-1)
    for point in flat:
        val = evaluate(point)
        if val < best_val:
            best_val = val
            best_x = np.array(point, dtype=float)

    steps = np.array([(hi - lo) / (grid_points - 1) for lo, hi in bounds])
    for _ in range(max_iter):
        improved = False
        for axis in range(len(bounds)):
            for sign in (+1.0, -1.0):
                trial = best_x.copy()
                trial[axis] = np.clip(
                    trial[axis] + sign * steps[axis],
                    bounds[axis][0],
                    bounds[axis][1],
                )
                if trial[axis] == best_x[axis]:
                    continue
                val = evaluate(trial)
                if val < best_val:
                    rel_gain = (best_val - val) / max(abs(best_val), 1e-300)
                    best_val = val
                    best_x = trial
                    improved = True
                    if rel_gain < tol and np.all(steps < 1e-12):
                        improved = False
        if not improved:
            if np.all(steps <= tol * np.array([hi - lo for lo, hi in bounds])):
                break
            steps = steps / 2.0
    return MinimizeResult(x=tuple(best_x), value=best_val, evaluations=tuple(log))


def drive_for_occupancy(params, target_n1, occupancy_fn, rtol=1e-3, max_iter=40):
    """Scale both drives so the mode-1 occupancy hits a target value.

    Both drive amplitudes are scaled by a common real factor, preserving
    their ratio and relative phase.  The solve is a secant iteration on the
    logarithm of the scale, seeded by the quadratic weak-drive scaling.

    Parameters
    ----------
    params : SystemParams
        Starting parameters; at least one drive must be nonzero.
    target_n1 : float
        Requested mode-1 occupancy (> 0).
    occupancy_fn : callable
        Maps SystemParams to the mode-1 occupancy (weak-drive or full solve).
    rtol : float
        Relative occupancy tolerance.

    Returns
    -------
    (SystemParams, float)
        Parameters with scaled drives, and the achieved occupancy.
    """
    if target_n1 <= 0.0:
        raise ValueError("target_n1 must be positive")
    if params.f1 == 0 and params.f2 == 0:
        raise ValueError("at least one drive must be nonzero")

    def at_scale(s):
        scaled = params.replace(f1=params.f1 * s, f2=params.f2 * s)
        return scaled, occupancy_fn(scaled)

    s_prev = 1.0
    scaled, n_prev = at_scale(s_prev)
    if abs(n_prev - target_n1) <= rtol * target_n1:
        return scaled, n_prev
    s_cur = s_prev * math.sqrt(target_n1 / n_prev)
    for _ in range(max_iter):
        scaled, n_cur = at_scale(s_cur)
        if abs(n_cur - target_n1) <= rtol * target_n1:
            return scaled, n_cur
        # secant step on log(n) vs log(s); quadratic scaling gives slope 2
        log_slope = (math.log(n_cur) - math.log(n_prev)) / (
            math.log(s_cur) - math.log(s_prev)
        )
        if log_slope <= 0.0:
            log_slope = 2.0
        s_next = s_cur * (target_n1 / n_cur) ** (1.0 / log_slope)
        s_prev, n_prev = s_cur, n_cur
        s_cur = s_next
    raise RuntimeError(
        f"occupancy solve did not converge: target {target_n1:.3e}, "
        f"reached {n_cur:.3e}"
    )

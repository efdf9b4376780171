"""Two-time intensity correlations: CW g2(tau), pulsed two-time maps, and
time-integrated pulse statistics.

Everything rests on the quantum regression recipe: propagate the collapsed
operator a rho a^dag under the same generator as rho and read out the
photon number.  For the pulsed maps

    G2(t1, t2) = < a^dag(t1) a^dag(t2) a(t2) a(t1) >,

the grid is completed symmetrically (G2(t2, t1) = G2(t1, t2)) and the
normalized pulse-integrated correlation is

    g2_pulse = Iint G2(t1, t2) dt1 dt2 / [Iint n(t1) n(t2) dt1 dt2],

optionally restricted to a square time gate whose edges snap to the grid.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from .fock import (FockBasis, DensityMatrix, mode_annihilation,
                   number_operator, vacuum_state)
from .params import SystemParams, BathParams, Pulse
from .dynamics import (Liouvillian, build_liouvillian, steady_state,
                       occupancy, EVOLVE_RTOL, EVOLVE_ATOL)

# Fewer grid points than this per 1/kappa of pulse support makes the
# trapezoid pulse integrals coarse; a warning is recorded on the grid.
# Reduced production grids routinely run below this, so the warning is
# metadata rather than an error.
GRID_DENSITY_WARN = 32.0


@dataclass(eq=False)
class CorrelationGrid:
    """Two-time correlation data on a rectangular grid.

    g2 normalization is deferred: `G2[i, j]` holds the unnormalized
    correlator at (t1_i, t2_j) and `n_of_t` the instantaneous occupation,
    so both g2(t1,t2) maps and pulse-integrated values can be formed.
    """

    t1_grid: np.ndarray
    t2_grid: np.ndarray
    G2: np.ndarray
    n_of_t: np.ndarray
    mode: int
    warnings: Tuple[str, ...] = ()

    def g2_map(self, floor: float = 1e-18) -> np.ndarray:
        denom = np.outer(self.n_of_t, self.n_of_t)
        return self.G2 / np.maximum(denom, floor)


def _propagate_vec(liouv: Liouvillian, y0: np.ndarray, t0: float,
                   t_eval: np.ndarray) -> np.ndarray:
    """Integrate an arbitrary (not trace-one) vectorized operator."""
    if len(t_eval) == 1 and t_eval[0] == t0:
        return y0.reshape(-1, 1).copy()

    def rhs(t, y):
        return liouv.apply(y, t)

    sol = solve_ivp(rhs, (t0, float(t_eval[-1])), y0, t_eval=t_eval,
                    rtol=EVOLVE_RTOL, atol=EVOLVE_ATOL, method="DOP853")
    if not sol.success:
        raise RuntimeError("two-time propagation failed: " + sol.message)
    return sol.y


def g2_tau_steady(params: SystemParams, bath: BathParams, basis: FockBasis,
                  mode: int, tau_grid: Sequence[float]) -> np.ndarray:
    """Steady-state g2(tau) of one mode under CW driving."""
    liouv = build_liouvillian(params, bath, basis)
    rho_ss = steady_state(liouv)
    a = mode_annihilation(basis, mode).matrix
    return _g2_tau_from_state(liouv, rho_ss, a, tau_grid)


def _g2_tau_from_state(liouv: Liouvillian, rho_ss: DensityMatrix,
                       op: np.ndarray,
                       tau_grid: Sequence[float]) -> np.ndarray:
    """Regression evaluation of <b^dag(0) b^dag(tau) b(tau) b(0)> / n^2
    for an arbitrary collapse operator b."""
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.ndim != 1 or len(tau_grid) == 0 or tau_grid[0] < 0:
        raise ValueError("tau_grid must be non-negative and 1-d")
    if np.any(np.diff(tau_grid) <= 0):
        raise ValueError("tau_grid must be strictly increasing")
    nmat = op.conj().T @ op
    n = np.trace(nmat @ rho_ss.matrix).real
    if n <= 1e-15:
        raise ValueError("zero occupancy: g2(tau) undefined")
    # propagate the collapsed state at unit trace so the absolute ODE
    # tolerance costs the same number of digits at any drive strength
    collapsed = (op @ rho_ss.matrix @ op.conj().T) / n
    if tau_grid[0] == 0.0:
        ts, drop = tau_grid, 0
    else:
        ts, drop = np.concatenate([[0.0], tau_grid]), 1
    y = _propagate_vec(liouv, collapsed.reshape(-1).astype(complex),
                       0.0, ts)[:, drop:]
    d = rho_ss.matrix.shape[0]
    out = np.empty(len(tau_grid))
    for k in range(y.shape[1]):
        sig = y[:, k].reshape(d, d)
        out[k] = np.trace(nmat @ sig).real / n
    return out


def two_time_g2(params: SystemParams, bath: BathParams, basis: FockBasis,
                pulses: Dict[int, Pulse],
                grid: Union[int, Tuple[Sequence[float], Sequence[float]]] = 96,
                mode: int = 1,
                collapse_op: Optional[np.ndarray] = None) -> CorrelationGrid:
    """Unnormalized two-time photon correlations under pulsed driving.

    The system starts from vacuum; drives act only through the Gaussian
    pulses.  `grid` is either a point count n (square n x n grid on
    [0, max(t0 + 6 sigma_t)]) or an explicit (t1_grid, t2_grid) pair.
    `collapse_op` replaces the mode annihilator for generalized (e.g.
    mixed-output) correlations.
    """
    if not pulses:
        raise ValueError("at least one pulse is required")
    from .dynamics import build_pulsed_liouvillian  # local to avoid cycle
    liouv = build_pulsed_liouvillian(params, bath, basis, pulses)
    t_end = max(p.t0 + 6.0 * p.sigma_t for p in pulses.values())
    if isinstance(grid, int):
        if grid < 4:
            raise ValueError("grid must have at least 4 points")
        t1 = np.linspace(0.0, t_end, grid)
        t2 = t1.copy()
    else:
        t1 = np.asarray(grid[0], dtype=float)
        t2 = np.asarray(grid[1], dtype=float)
    for g in (t1, t2):
        if g.ndim != 1 or len(g) < 2 or g[0] < 0 or np.any(np.diff(g) <= 0):
            raise ValueError("time grids must be non-negative, strictly "
                             "increasing, with at least two points")
    if len(t1) != len(t2) or not np.allclose(t1, t2, atol=1e-12):
        raise ValueError("t1 and t2 grids must coincide (the correlator is "
                         "completed by symmetry)")
    warns = []
    span = max(t1[-1] - t1[0], 1e-300)
    density = (len(t1) - 1) / span
    if density < GRID_DENSITY_WARN:
        warns.append(f"grid too coarse: {density:.1f} points per unit time "
                     f"over the pulse support, below {GRID_DENSITY_WARN:g}; "
                     f"pulse integrals are approximate")
    op = collapse_op if collapse_op is not None \
        else mode_annihilation(basis, mode).matrix
    nmat = op.conj().T @ op
    d = basis.size
    rho0 = vacuum_state(basis)
    if t1[0] == 0.0:
        base_ts, drop = t1, 0
    else:
        base_ts, drop = np.concatenate([[0.0], t1]), 1
    base = _propagate_vec(liouv, rho0.matrix.reshape(-1).astype(complex),
                          0.0, base_ts)[:, drop:]
    n_of_t = np.empty(len(t1))
    G2 = np.zeros((len(t1), len(t2)))
    for i, t1i in enumerate(t1):
        rho_t1 = base[:, i].reshape(d, d)
        n_t1 = np.trace(nmat @ rho_t1).real
        n_of_t[i] = n_t1
        if n_t1 <= 1e-300:
            continue  # nothing emitted yet: the correlator row is zero
        # unit-trace propagation keeps the ODE tolerance scale-invariant
        collapsed = (op @ rho_t1 @ op.conj().T).reshape(-1) / n_t1
        eval_ts = t2[i:].copy()
        eval_ts[0] = t1i
        seg = _propagate_vec(liouv, collapsed.astype(complex),
                             float(t1i), eval_ts)
        for k in range(seg.shape[1]):
            sig = seg[:, k].reshape(d, d)
            G2[i, i + k] = n_t1 * np.trace(nmat @ sig).real
    # symmetric completion for t2 < t1
    idx_low = np.tril_indices(len(t1), k=-1)
    G2[idx_low] = G2.T[idx_low]
    return CorrelationGrid(t1_grid=t1, t2_grid=t2, G2=G2, n_of_t=n_of_t,
                           mode=mode, warnings=tuple(warns))


def g2_pulse_integrated(grid: CorrelationGrid,
                        gate: Optional[Tuple[float, float]] = None) -> float:
    """Time-integrated pulse correlation, optionally over a square gate.

    Gate edges snap to the nearest grid nodes; a gate capturing no grid
    nodes is an error.
    """
    t1, t2 = grid.t1_grid, grid.t2_grid
    if gate is None:
        i0, i1 = 0, len(t1) - 1
        j0, j1 = 0, len(t2) - 1
    else:
        ta, tb = gate
        if tb <= ta:
            raise ValueError("gate must have positive duration")
        i0 = int(np.argmin(np.abs(t1 - ta)))
        i1 = int(np.argmin(np.abs(t1 - tb)))
        j0 = int(np.argmin(np.abs(t2 - ta)))
        j1 = int(np.argmin(np.abs(t2 - tb)))
        if i1 <= i0 or j1 <= j0:
            raise ValueError("gate captures no grid interval")
    tt1 = t1[i0:i1 + 1]
    tt2 = t2[j0:j1 + 1]
    num = np.trapezoid(np.trapezoid(grid.G2[i0:i1 + 1, j0:j1 + 1], tt2,
                                    axis=1), tt1)
    n1 = np.trapezoid(grid.n_of_t[i0:i1 + 1], tt1)
    n2 = np.trapezoid(grid.n_of_t[j0:j1 + 1], tt2)
    den = n1 * n2
    if den <= 0:
        raise ValueError("no emission inside the gate")
    return float(num / den)


def equal_time_g2_minimum(grid: CorrelationGrid,
                          occupancy_floor_frac: float = 1e-3) -> float:
    """Time at which the equal-time g2(t, t) is smallest, ignoring early and
    late times where the occupation is negligible."""
    n = grid.n_of_t
    mask = n > occupancy_floor_frac * n.max()
    g2_tt = np.full(len(n), np.inf)
    diag = np.diag(grid.G2)
    g2_tt[mask] = diag[mask] / n[mask] ** 2
    return float(grid.t1_grid[int(np.argmin(g2_tt))])

"""Mean-field trajectories, fixed points, and the displaced-frame
fluctuation generator.

The classical amplitudes follow

    i dalpha_j/dt = [Dtilde_j + U_j |alpha_j|^2] alpha_j
                    + J alpha_{3-j} + F_j,

and quantum fluctuations around a fixed point evolve under the displaced
Hamiltonian

    Hf = sum_j [ Delta_j n_j + U_j (alpha_j*^2 a_j^2 + alpha_j^2 a_j^dag^2) ]
         + sum_j U_j [ a_j^dag a_j^dag a_j a_j + 2 alpha_j* a_j^dag a_j a_j
                       + 2 alpha_j a_j^dag a_j^dag a_j ]
         + J (a_1^dag a_2 + a_2^dag a_1)

with the same dissipators and no coherent drive.  The `linearized` variant
keeps only the quadratic (squeezing) part, which is the Gaussian model the
squeezing analytics describe.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .fock import FockBasis, DensityMatrix, mode_annihilation
from .params import SystemParams, BathParams
from .dynamics import (Liouvillian, _commutator_superop, _dissipator,
                       EVOLVE_RTOL, EVOLVE_ATOL)


def _rhs(params: SystemParams, alpha: np.ndarray) -> np.ndarray:
    a1, a2 = alpha
    d1 = -1j * ((params.dtilde1 + params.u1 * abs(a1) ** 2) * a1
                + params.j_hop * a2 + params.f1)
    d2 = -1j * ((params.dtilde2 + params.u2 * abs(a2) ** 2) * a2
                + params.j_hop * a1 + params.f2)
    return np.array([d1, d2])


def mean_field_evolve(params: SystemParams, alpha0: Sequence[complex],
                      t_grid: Sequence[float]) -> np.ndarray:
    """Integrate the classical equations; returns shape (len(t_grid), 2)."""
    t_grid = np.asarray(t_grid, dtype=float)
    y0 = np.asarray(alpha0, dtype=complex)
    if y0.shape != (2,):
        raise ValueError("alpha0 must hold two complex amplitudes")
    sol = solve_ivp(lambda t, y: _rhs(params, y), (float(t_grid[0]),
                    float(t_grid[-1])), y0, t_eval=t_grid,
                    rtol=EVOLVE_RTOL, atol=EVOLVE_ATOL, method="DOP853")
    if not sol.success:
        raise RuntimeError("mean-field integration failed: " + sol.message)
    return sol.y.T


@dataclass(frozen=True)
class FixedPoint:
    alpha: Tuple[complex, complex]
    converged: bool
    residual: float


def _newton(params: SystemParams, guess: np.ndarray,
            max_iter: int = 80) -> Optional[FixedPoint]:
    """Damped Newton on the 4 real components of (alpha1, alpha2)."""

    def f_real(x):
        al = np.array([x[0] + 1j * x[1], x[2] + 1j * x[3]])
        r = _rhs(params, al)
        return np.array([r[0].real, r[0].imag, r[1].real, r[1].imag])

    x = np.array([guess[0].real, guess[0].imag,
                  guess[1].real, guess[1].imag], dtype=float)
    for _ in range(max_iter):
        fx = f_real(x)
        if np.linalg.norm(fx) < 1e-12 * max(1.0, np.linalg.norm(x)):
            break
        eps = 1e-7 * max(1.0, np.linalg.norm(x))
        jac = np.empty((4, 4))
        for k in range(4):
            dx = np.zeros(4)
            dx[k] = eps
            jac[:, k] = (f_real(x + dx) - fx) / eps
        try:
            step = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        base = np.linalg.norm(fx)
        while lam > 1e-6:
            if np.linalg.norm(f_real(x + lam * step)) < base:
                break
            lam *= 0.5
        x = x + lam * step
    res = np.linalg.norm(f_real(x))
    al = (complex(x[0], x[1]), complex(x[2], x[3]))
    return FixedPoint(alpha=al, converged=res < 1e-10 * max(1.0,
                      abs(al[0]) + abs(al[1])), residual=float(res))


def mean_field_fixed_points(params: SystemParams,
                            extra_seeds: Sequence[Sequence[complex]] = ())\
        -> List[FixedPoint]:
    """All distinct fixed points found from a standard set of seeds.

    In a bistable region several branches are returned; callers must not
    assume the first entry is the physical one.  Non-converged Newton runs
    are kept, flagged, so that bistability is never silently hidden.
    """
    seeds = [np.zeros(2, dtype=complex)]
    # linear (U = 0) solution as a seed
    m = np.array([[params.dtilde1, params.j_hop],
                  [params.j_hop, params.dtilde2]], dtype=complex)
    try:
        lin = np.linalg.solve(m, -np.array([params.f1, params.f2],
                                           dtype=complex))
        seeds.append(lin)
        for s in (0.3, 3.0):
            seeds.append(lin * s)
    except np.linalg.LinAlgError:
        pass
    # long-time integration end point
    try:
        traj = mean_field_evolve(params, seeds[-1] if len(seeds) > 1
                                 else [0, 0], np.linspace(0, 60, 7))
        seeds.append(traj[-1])
    except RuntimeError:
        pass
    seeds.extend(np.asarray(s, dtype=complex) for s in extra_seeds)
    found: List[FixedPoint] = []
    for s in seeds:
        fp = _newton(params, s)
        if fp is None:
            continue
        if fp.converged:
            dup = any(f.converged
                      and abs(f.alpha[0] - fp.alpha[0])
                      + abs(f.alpha[1] - fp.alpha[1]) < 1e-8
                      * max(1.0, abs(f.alpha[0]) + abs(f.alpha[1]))
                      for f in found)
            if not dup:
                found.append(fp)
        else:
            found.append(fp)
    if not any(f.converged for f in found):
        raise ValueError("no mean-field fixed point converged; returned "
                         f"residuals: {[f.residual for f in found]}")
    return found


def build_fluctuation_liouvillian(params: SystemParams, bath: BathParams,
                                  alpha: Sequence[complex],
                                  basis: FockBasis,
                                  linearized: bool = False) -> Liouvillian:
    """Generator for fluctuations around classical amplitudes alpha.

    With linearized=True only the quadratic squeezing terms survive (the
    Gaussian model); otherwise the cubic and quartic interaction terms are
    kept and the description remains faithful while <da> << alpha.
    """
    if bath.cascade_efficiency > 0 or bath.squeeze_xi != 0:
        raise ValueError("fluctuation frame supports plain loss, thermal "
                         "occupation, and dephasing baths only")
    a1 = mode_annihilation(basis, 1).matrix
    a2 = mode_annihilation(basis, 2).matrix
    al1, al2 = complex(alpha[0]), complex(alpha[1])
    h = np.zeros_like(a1)
    for a, al, delta, u in ((a1, al1, params.delta1, params.u1),
                            (a2, al2, params.delta2, params.u2)):
        ad = a.conj().T
        h = h + delta * (ad @ a)
        h = h + u * (np.conj(al) ** 2 * (a @ a) + al ** 2 * (ad @ ad))
        if not linearized:
            h = h + u * (ad @ ad @ a @ a
                         + 2 * np.conj(al) * (ad @ a @ a)
                         + 2 * al * (ad @ ad @ a))
    h = h + params.j_hop * (a1.conj().T @ a2 + a2.conj().T @ a1)
    liouv = _commutator_superop(h)
    nth = bath.n_th
    liouv = liouv + _dissipator(a1, (nth + 1) * params.kappa1)
    liouv = liouv + _dissipator(a2, (nth + 1) * params.kappa2)
    if nth > 0:
        liouv = liouv + _dissipator(a1.conj().T, nth * params.kappa1)
        liouv = liouv + _dissipator(a2.conj().T, nth * params.kappa2)
    if bath.dephasing > 0:
        liouv = liouv + _dissipator(a1.conj().T @ a1, 0.5 * bath.dephasing)
        liouv = liouv + _dissipator(a2.conj().T @ a2, 0.5 * bath.dephasing)
    return Liouvillian(matrix=liouv.tocsr(), basis=basis)


def displaced_mode_matrix(basis: FockBasis, mode: int,
                          alpha: Sequence[complex]) -> np.ndarray:
    """Lab-frame annihilator da + alpha in the fluctuation space."""
    a = mode_annihilation(basis, mode).matrix
    al = complex(alpha[mode - 1])
    return a + al * np.eye(basis.size)


def displaced_occupancy(rho_f: DensityMatrix, alpha: Sequence[complex],
                        mode: int) -> float:
    b = displaced_mode_matrix(rho_f.basis, mode, alpha)
    return float(np.trace(b.conj().T @ b @ rho_f.matrix).real)


def displaced_g2(rho_f: DensityMatrix, alpha: Sequence[complex],
                 mode: int) -> float:
    b = displaced_mode_matrix(rho_f.basis, mode, alpha)
    bd = b.conj().T
    n = np.trace(bd @ b @ rho_f.matrix).real
    if n <= 0:
        raise ValueError("zero occupancy: g2 undefined")
    num = np.trace(bd @ bd @ b @ b @ rho_f.matrix).real
    return float(num / n ** 2)


def fluctuation_gaussian_moments(rho_f: DensityMatrix, alpha: Sequence[complex],
                                 mode: int) -> Tuple[complex, complex, float]:
    """Lab-frame field moments (<a>, <a^2>, <n>) of the displaced state.

    Composes the classical amplitude with the fluctuation moments, giving
    the inputs for Gaussian-state statistics (squeeze extraction, moment-form
    g2).  Unlike the fourth-moment trace in ``displaced_g2``, these second
    moments stay well conditioned at arbitrarily small occupancy.
    """
    a = mode_annihilation(rho_f.basis, mode).matrix
    al = complex(alpha[mode - 1])
    rho = rho_f.matrix
    da = np.trace(a @ rho)
    da2 = np.trace(a @ a @ rho)
    dn = np.trace(a.conj().T @ a @ rho).real
    a_mean = al + da
    a_sq = al ** 2 + 2.0 * al * da + da2
    n_mean = abs(al) ** 2 + 2.0 * (np.conj(al) * da).real + dn
    return complex(a_mean), complex(a_sq), float(n_mean)

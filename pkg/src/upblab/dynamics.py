"""Hamiltonians, Liouvillians, steady states, and time evolution.

The master equation is kept in the intensity-decay convention

    i drho/dt = [H, rho] - i sum_j (kappa_j/2) D[a_j] rho,
    D[a] rho = {a^dag a, rho} - 2 a rho a^dag,

so photon numbers decay at rate kappa_j.  Superoperators act on row-major
vectorized density matrices, vec(A rho B) = (A kron B^T) vec(rho), and are
stored sparse: the state space stays small (a few hundred) but the
superoperator dimension grows with its square.

Environment extensions (thermal occupation, pure dephasing, unidirectional
cascade, squeezed reservoir) are all expressed in the same doubled-rate
dissipator convention; see build_liouvillian.
"""

import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .fock import (FockBasis, ModeOperator, DensityMatrix, build_basis,
                   mode_annihilation, number_operator, expectation)
from .params import SystemParams, BathParams, Pulse

RESIDUAL_TOL = 1e-10
ILL_CONDITIONED = 1e12
EVOLVE_RTOL = 1e-9
EVOLVE_ATOL = 1e-12


def build_hamiltonian(params: SystemParams, basis: FockBasis) -> ModeOperator:
    """Two-mode Kerr Hamiltonian with coherent drives and hopping."""
    a1 = mode_annihilation(basis, 1).matrix
    a2 = mode_annihilation(basis, 2).matrix
    a1d, a2d = a1.conj().T, a2.conj().T
    h = (params.delta1 * (a1d @ a1) + params.delta2 * (a2d @ a2)
         + params.u1 * (a1d @ a1d @ a1 @ a1)
         + params.u2 * (a2d @ a2d @ a2 @ a2)
         + np.conj(params.f1) * a1 + params.f1 * a1d
         + np.conj(params.f2) * a2 + params.f2 * a2d
         + params.j_hop * (a1d @ a2 + a2d @ a1))
    return ModeOperator(h, basis)


def build_nonhermitian(params: SystemParams, basis: FockBasis,
                       bath: Optional[BathParams] = None) -> ModeOperator:
    """Effective Hamiltonian H - i sum_j (kappa_j/2) a_j^dag a_j.

    With a cascaded coupling the unidirectional jump adds -i chi a_2^dag a_1:
    this sign (rather than +i chi) is what the full cascaded dissipator
    produces and is required for trace preservation.
    """
    h = build_hamiltonian(params, basis).matrix.copy()
    a1 = mode_annihilation(basis, 1).matrix
    a2 = mode_annihilation(basis, 2).matrix
    h = h - 0.5j * params.kappa1 * (a1.conj().T @ a1)
    h = h - 0.5j * params.kappa2 * (a2.conj().T @ a2)
    if bath is not None and bath.cascade_efficiency > 0:
        chi = bath.chi(params)
        h = h - 1j * chi * (a2.conj().T @ a1)
    return ModeOperator(h, basis)


@dataclass(eq=False)
class Liouvillian:
    """Sparse generator of the master equation, plus optional drive terms.

    matrix : static part, acting on vec(rho).
    drive_terms : sequence of (pulse, superoperator) pairs; the generator at
        time t is matrix + sum_p envelope_p(t) * superop_p.
    """

    matrix: sp.csr_matrix
    basis: FockBasis
    drive_terms: Tuple[Tuple[Pulse, sp.csr_matrix], ...] = ()

    @property
    def time_dependent(self) -> bool:
        return len(self.drive_terms) > 0

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def at_time(self, t: float) -> sp.csr_matrix:
        m = self.matrix
        for pulse, term in self.drive_terms:
            m = m + pulse.envelope(t) * term
        return m

    def apply(self, vec_rho: np.ndarray, t: float = 0.0) -> np.ndarray:
        out = self.matrix.dot(vec_rho)
        for pulse, term in self.drive_terms:
            out = out + pulse.envelope(t) * term.dot(vec_rho)
        return out


def _left(op: np.ndarray) -> sp.csr_matrix:
    d = op.shape[0]
    return sp.kron(sp.csr_matrix(op), sp.identity(d, format="csr"),
                   format="csr")


def _right(op: np.ndarray) -> sp.csr_matrix:
    d = op.shape[0]
    return sp.kron(sp.identity(d, format="csr"), sp.csr_matrix(op.T),
                   format="csr")


def _sandwich(left_op: np.ndarray, right_op: np.ndarray) -> sp.csr_matrix:
    """Superoperator of rho -> left_op rho right_op."""
    return sp.kron(sp.csr_matrix(left_op), sp.csr_matrix(right_op.T),
                   format="csr")


def _commutator_superop(h: np.ndarray) -> sp.csr_matrix:
    return -1j * (_left(h) - _right(h))


def _dissipator(c: np.ndarray, rate: float) -> sp.csr_matrix:
    """-(rate/2) * ({c^dag c, rho} - 2 c rho c^dag) as a superoperator."""
    cdc = c.conj().T @ c
    return (-0.5 * rate) * (_left(cdc) + _right(cdc)) \
        + rate * _sandwich(c, c.conj().T)


def _drive_superop(basis: FockBasis, port: int) -> sp.csr_matrix:
    """Commutator superoperator of the unit-amplitude drive a^dag + a."""
    a = mode_annihilation(basis, port).matrix
    return _commutator_superop(a + a.conj().T)


def build_liouvillian(params: SystemParams, bath: BathParams,
                      basis: FockBasis) -> Liouvillian:
    """Assemble the full static generator.

    Included terms:
      - coherent part -i[H, rho] with all drives, detunings, Kerr, hopping;
      - losses (n_th + 1) kappa_j/2 D[a_j] + n_th kappa_j/2 D[a_j^dag];
      - pure dephasing eta/4 D[a_j^dag a_j] on both modes;
      - cascaded coupling chi ( a1 rho a2^dag + a2 rho a1^dag
                                - a2^dag a1 rho - rho a1^dag a2 );
      - squeezed reservoir on mode 1, either the first-order two-photon
        form (kappa/2) xi* ({a^2, rho} - 2 a rho a) + h.c.-like partner, or
        the standard squeezed-bath dissipator when
        bath.squeeze_standard_form is set.
    """
    a1 = mode_annihilation(basis, 1).matrix
    a2 = mode_annihilation(basis, 2).matrix
    h = build_hamiltonian(params, basis).matrix
    liouv = _commutator_superop(h)
    nth = bath.n_th
    liouv = liouv + _dissipator(a1, (nth + 1) * params.kappa1)
    liouv = liouv + _dissipator(a2, (nth + 1) * params.kappa2)
    if nth > 0:
        liouv = liouv + _dissipator(a1.conj().T, nth * params.kappa1)
        liouv = liouv + _dissipator(a2.conj().T, nth * params.kappa2)
    if bath.dephasing > 0:
        n1 = a1.conj().T @ a1
        n2 = a2.conj().T @ a2
        liouv = liouv + _dissipator(n1, 0.5 * bath.dephasing)
        liouv = liouv + _dissipator(n2, 0.5 * bath.dephasing)
    if bath.cascade_efficiency > 0:
        chi = bath.chi(params)
        liouv = liouv + chi * (_sandwich(a1, a2.conj().T)
                               + _sandwich(a2, a1.conj().T)
                               - _left(a2.conj().T @ a1)
                               - _right(a1.conj().T @ a2))
    xi = bath.squeeze_xi
    if xi != 0:
        if bath.squeeze_standard_form:
            r = abs(xi)
            theta = float(np.angle(xi))
            nsq = np.sinh(r) ** 2
            # with these correlated terms the steady anomalous moment is
            # <a^2> = -M; the squeezed vacuum S(xi)|0> has <a^2> =
            # -e^{i theta} sinh r cosh r, hence the + sign here
            msq = np.exp(1j * theta) * np.sinh(r) * np.cosh(r)
            k1 = params.kappa1
            liouv = liouv + _dissipator(a1, nsq * k1)  # on top of (nth+1)k1
            liouv = liouv + _dissipator(a1.conj().T, nsq * k1)
            # correlated two-photon terms: rho -> M a^dag rho a^dag + h.c.
            # with anticommutator completion keeping the trace fixed
            ad = a1.conj().T
            term = (_sandwich(ad, ad) - 0.5 * (_left(ad @ ad)
                                               + _right(ad @ ad)))
            liouv = liouv + k1 * (msq * term)
            term_c = (_sandwich(a1, a1) - 0.5 * (_left(a1 @ a1)
                                                 + _right(a1 @ a1)))
            liouv = liouv + k1 * (np.conj(msq) * term_c)
        else:
            # first-order two-photon reservoir: note the bare (undaggered)
            # sandwich a rho a
            a1sq = a1 @ a1
            ad1sq = a1sq.conj().T
            k1 = params.kappa1
            liouv = liouv + 0.5 * k1 * np.conj(xi) * (
                _left(a1sq) + _right(a1sq) - 2 * _sandwich(a1, a1))
            liouv = liouv + 0.5 * k1 * xi * (
                _left(ad1sq) + _right(ad1sq)
                - 2 * _sandwich(a1.conj().T, a1.conj().T))
    return Liouvillian(matrix=liouv.tocsr(), basis=basis)


def build_pulsed_liouvillian(params: SystemParams, bath: BathParams,
                             basis: FockBasis,
                             pulses: Dict[int, Pulse]) -> Liouvillian:
    """Static generator with the CW drives removed from the given ports and
    replaced by Gaussian-envelope drive superoperators."""
    static = params
    for port in pulses:
        if port not in (1, 2):
            raise ValueError("pulse port must be 1 or 2")
        static = static.replace(**{f"f{port}": 0.0})
    base = build_liouvillian(static, bath, basis)
    terms = []
    for port, pulse in sorted(pulses.items()):
        a = mode_annihilation(basis, port).matrix
        h_dr = pulse.f_peak * a.conj().T + np.conj(pulse.f_peak) * a
        terms.append((pulse, _commutator_superop(h_dr).tocsr()))
    return Liouvillian(matrix=base.matrix, basis=basis,
                       drive_terms=tuple(terms))


def _trace_indices(d: int) -> np.ndarray:
    return np.arange(d) * d + np.arange(d)


def _vec_to_dm(x: np.ndarray, basis: FockBasis) -> DensityMatrix:
    d = basis.size
    rho = x.reshape(d, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    return DensityMatrix(rho, basis)


def steady_state(liouv: Liouvillian, check: bool = True) -> DensityMatrix:
    """Null vector of the generator with unit trace.

    Solves the trace-constrained sparse system by LU with iterative
    refinement.  If the factorization looks dangerously ill-conditioned the
    null space is probed for degeneracy (an error) and, failing that, the
    state is obtained by long-time integration.
    """
    if liouv.time_dependent:
        raise ValueError("steady state of a time-dependent generator is "
                         "undefined; evolve instead")
    lmat = liouv.matrix.tocsr()
    dim = lmat.shape[0]
    d = liouv.basis.size
    scale = spla.norm(lmat, np.inf)
    if scale == 0:
        raise ValueError("zero generator")
    tr_idx = _trace_indices(d)
    m = lmat.tolil(copy=True)
    m[0, :] = 0.0
    for k in tr_idx:
        m[0, k] = scale
    m = m.tocsc()
    b = np.zeros(dim, dtype=complex)
    b[0] = scale
    try:
        lu = spla.splu(m)
    except RuntimeError as exc:
        raise ValueError("steady-state system is exactly singular; the "
                         "null space is degenerate") from exc
    x = lu.solve(b)
    for _ in range(3):
        resid = b - m.dot(x)
        if np.linalg.norm(resid) <= 1e-14 * np.linalg.norm(b):
            break
        x = x + lu.solve(resid)
    rel = np.linalg.norm(lmat.dot(x)) / (scale * np.linalg.norm(x))
    if check and rel > RESIDUAL_TOL:
        cond = _condition_estimate(m, lu)
        if cond > ILL_CONDITIONED:
            _probe_degeneracy(lmat, x, scale)
            x = _long_time_fallback(liouv, scale)
            rel = np.linalg.norm(lmat.dot(x)) / (scale * np.linalg.norm(x))
        if rel > RESIDUAL_TOL:
            raise ValueError(f"steady-state residual {rel:.2e} exceeds "
                             f"{RESIDUAL_TOL:.0e}")
    return _vec_to_dm(x, liouv.basis)


def _condition_estimate(m: sp.csc_matrix, lu) -> float:
    inv_op = spla.LinearOperator(m.shape, matvec=lu.solve,
                                 rmatvec=lambda v: lu.solve(v, trans="H"),
                                 dtype=complex)
    try:
        inv_norm = spla.onenormest(inv_op)
        return float(spla.norm(m, 1) * inv_norm)
    except Exception:
        return np.inf


def _probe_degeneracy(lmat: sp.csr_matrix, x0: np.ndarray,
                      scale: float) -> None:
    """Deflated inverse iteration for a second null vector; raises if the
    stationary space has dimension > 1."""
    dim = lmat.shape[0]
    sigma = 1e-9 * scale
    try:
        lu = spla.splu((lmat - sigma * sp.identity(dim, format="csc",
                                                   dtype=complex)).tocsc())
    except RuntimeError:
        raise ValueError("stationary space is degenerate (singular shifted "
                         "factorization)")
    xhat = x0 / np.linalg.norm(x0)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v -= xhat * (xhat.conj() @ v)
    v /= np.linalg.norm(v)
    for _ in range(50):
        v = lu.solve(v)
        v -= xhat * (xhat.conj() @ v)
        nv = np.linalg.norm(v)
        if nv == 0:
            return
        v /= nv
        rel = np.linalg.norm(lmat.dot(v)) / scale
        if rel < 1e-8:
            raise ValueError("stationary space is degenerate (dimension "
                             "> 1); steady state is not unique")


def _long_time_fallback(liouv: Liouvillian, scale: float) -> np.ndarray:
    d = liouv.basis.size
    rho0 = np.eye(d, dtype=complex) / d
    y = rho0.reshape(-1)
    mat = liouv.matrix
    t_end = 200.0
    sol = solve_ivp(lambda t, v: mat.dot(v), (0.0, t_end), y,
                    rtol=EVOLVE_RTOL, atol=EVOLVE_ATOL, dense_output=False)
    if not sol.success:
        raise ValueError("long-time fallback integration failed: "
                         + sol.message)
    return sol.y[:, -1]


def evolve(rho0: DensityMatrix, liouv: Liouvillian,
           t_grid: Sequence[float],
           drive: Optional[Dict[int, Pulse]] = None,
           validate: bool = True) -> List[DensityMatrix]:
    """Integrate the master equation, returning snapshots at t_grid.

    `drive` attaches Gaussian pulses to ports on top of the static
    generator (ignored ports keep whatever CW drive the generator already
    contains).  Snapshots are validated unless validate=False.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1:
        raise ValueError("t_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    terms = list(liouv.drive_terms)
    if drive:
        for port, pulse in sorted(drive.items()):
            a = mode_annihilation(liouv.basis, port).matrix
            h_dr = pulse.f_peak * a.conj().T + np.conj(pulse.f_peak) * a
            terms.append((pulse, _commutator_superop(h_dr).tocsr()))
    mat = liouv.matrix

    if terms:
        def rhs(t, y):
            out = mat.dot(y)
            for pulse, term in terms:
                out = out + pulse.envelope(t) * term.dot(y)
            return out
    else:
        def rhs(t, y):
            return mat.dot(y)

    y0 = rho0.matrix.reshape(-1).astype(complex)
    out: List[DensityMatrix] = []
    if len(t_grid) == 1:
        dm = DensityMatrix(rho0.matrix.copy(), liouv.basis)
        if validate:
            dm.validate()
        return [dm]
    sol = solve_ivp(rhs, (float(t_grid[0]), float(t_grid[-1])), y0,
                    t_eval=t_grid, rtol=EVOLVE_RTOL, atol=EVOLVE_ATOL,
                    method="DOP853")
    if not sol.success:
        raise RuntimeError("time integration failed: " + sol.message)
    for k in range(sol.y.shape[1]):
        dm = _vec_to_dm(sol.y[:, k], liouv.basis)
        if validate:
            dm.validate()
        out.append(dm)
    return out


def occupancy(rho: DensityMatrix, mode: int) -> float:
    n_op = number_operator(rho.basis, mode)
    return float(expectation(rho, n_op).real)


def g2_zero(rho: DensityMatrix, mode: int) -> float:
    """Equal-time g2 of one mode on a given state."""
    a = mode_annihilation(rho.basis, mode).matrix
    ad = a.conj().T
    n = np.trace(ad @ a @ rho.matrix).real
    if n <= 0:
        raise ValueError("zero occupancy: g2 undefined")
    num = np.trace(ad @ ad @ a @ a @ rho.matrix).real
    return float(num / n ** 2)


def top_manifold_population(rho: DensityMatrix) -> float:
    pops = np.real(np.diag(rho.matrix))
    return float(sum(p for p, (n, m) in zip(pops, rho.basis.states)
                     if n + m == rho.basis.cutoff))

"""Truncated two-mode Fock space: basis, mode operators, state diagnostics.

States |n, m> are kept with total excitation n + m <= cutoff, ordered
deterministically (ascending total, then descending n within a manifold) so
that every downstream matrix and serialized artifact is reproducible bit for
bit.  An optional cap on the second mode turns it into a few-level system
(cap 1 realizes a two-level emitter, since a_2 restricted to {0,1} acts as
the lowering operator).
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8
EIGENVALUE_FLOOR = -1e-8


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Ordered basis of the truncated two-mode space."""

    cutoff: int
    states: Tuple[Tuple[int, int], ...]
    index: Dict[Tuple[int, int], int]
    mode2_max: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.states)


def build_basis(n_max: int, mode2_max: Optional[int] = None) -> FockBasis:
    """Enumerate |n, m> with n + m <= n_max (and optionally m <= mode2_max).

    Ordering: ascending total excitation, then descending n within each
    manifold, so |0,0>, |1,0>, |0,1>, |2,0>, |1,1>, |0,2>, ...
    """
    if n_max < 0:
        raise ValueError("cutoff must be non-negative")
    if n_max > 24:
        raise ValueError("cutoff above 24 is not supported (superoperator "
                         "dimension grows as the fourth power)")
    states = []
    for total in range(n_max + 1):
        for n in range(total, -1, -1):
            m = total - n
            if mode2_max is not None and m > mode2_max:
                continue
            states.append((n, m))
    index = {s: k for k, s in enumerate(states)}
    return FockBasis(cutoff=n_max, states=tuple(states), index=index,
                     mode2_max=mode2_max)


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """Dense operator on a FockBasis."""

    matrix: np.ndarray
    basis: FockBasis

    def dag(self) -> "ModeOperator":
        return ModeOperator(self.matrix.conj().T, self.basis)

    def __matmul__(self, other):
        if isinstance(other, ModeOperator):
            return ModeOperator(self.matrix @ other.matrix, self.basis)
        return self.matrix @ other


def mode_annihilation(basis: FockBasis, mode: int) -> ModeOperator:
    """Annihilation operator for mode 1 or 2 on the truncated space."""
    if mode not in (1, 2):
        raise ValueError("mode must be 1 or 2")
    d = basis.size
    a = np.zeros((d, d), dtype=complex)
    for k, (n, m) in enumerate(basis.states):
        if mode == 1 and n > 0:
            a[basis.index[(n - 1, m)], k] = np.sqrt(n)
        elif mode == 2 and m > 0:
            a[basis.index[(n, m - 1)], k] = np.sqrt(m)
    return ModeOperator(a, basis)


def number_operator(basis: FockBasis, mode: int) -> ModeOperator:
    a = mode_annihilation(basis, mode)
    return ModeOperator(a.matrix.conj().T @ a.matrix, basis)


@dataclass(eq=False)
class DensityMatrix:
    """Density operator on a FockBasis with basic sanity checks."""

    matrix: np.ndarray
    basis: FockBasis

    def validate(self, eig_floor: float = EIGENVALUE_FLOOR) -> None:
        """Raise ValueError on broken Hermiticity, trace, or positivity."""
        rho = self.matrix
        scale = np.linalg.norm(rho)
        if scale == 0:
            raise ValueError("density matrix is zero")
        herm = np.linalg.norm(rho - rho.conj().T) / scale
        if herm > HERMITICITY_TOL:
            raise ValueError(f"density matrix not Hermitian (relative "
                             f"deviation {herm:.2e})")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace deviates from one by {tr - 1.0:.2e}")
        evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if evals.min() < eig_floor:
            raise ValueError(f"negative eigenvalue {evals.min():.2e} below "
                             f"floor {eig_floor:.1e}")

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def vacuum_state(basis: FockBasis) -> DensityMatrix:
    rho = np.zeros((basis.size, basis.size), dtype=complex)
    rho[0, 0] = 1.0
    return DensityMatrix(rho, basis)


def expectation(rho: Union[DensityMatrix, np.ndarray],
                op: Union[ModeOperator, np.ndarray]) -> complex:
    """Tr(op rho)."""
    r = rho.matrix if isinstance(rho, DensityMatrix) else rho
    o = op.matrix if isinstance(op, ModeOperator) else op
    return complex(np.trace(o @ r))


def photon_distribution(rho: DensityMatrix, mode: int) -> np.ndarray:
    """Marginal photon-number distribution P(n) of one mode."""
    if mode not in (1, 2):
        raise ValueError("mode must be 1 or 2")
    pops = np.real(np.diag(rho.matrix))
    n_max = rho.basis.cutoff
    p = np.zeros(n_max + 1)
    for k, (n, m) in enumerate(rho.basis.states):
        p[n if mode == 1 else m] += pops[k]
    return p


def purity(rho: DensityMatrix) -> float:
    return rho.purity()

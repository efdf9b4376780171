"""Shared state-construction helpers used by several test modules."""

import math

import numpy as np

from upblab.fock import FockBasis, DensityMatrix


def two_mode_coherent(basis: FockBasis, alpha1: complex,
                      alpha2: complex) -> DensityMatrix:
    """Truncated two-mode coherent state |alpha1, alpha2> as a density
    matrix, renormalized on the triangular basis."""
    psi = np.zeros(basis.size, dtype=complex)
    for k, (n, m) in enumerate(basis.states):
        an = alpha1 ** n / math.sqrt(math.factorial(n))
        am = alpha2 ** m / math.sqrt(math.factorial(m))
        psi[k] = an * am
    psi /= np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()), basis)


def thermal_mode1(basis: FockBasis, nbar: float) -> DensityMatrix:
    """Thermal state with mean occupation nbar in mode 1, vacuum in mode 2,
    renormalized on the truncated space."""
    rho = np.zeros((basis.size, basis.size), dtype=complex)
    q = nbar / (nbar + 1.0)
    for k, (n, m) in enumerate(basis.states):
        if m == 0:
            rho[k, k] = (1.0 - q) * q ** n
    rho /= np.trace(rho).real
    return DensityMatrix(rho, basis)


def fock_state(basis: FockBasis, n: int, m: int) -> DensityMatrix:
    rho = np.zeros((basis.size, basis.size), dtype=complex)
    rho[basis.index[(n, m)], basis.index[(n, m)]] = 1.0
    return DensityMatrix(rho, basis)

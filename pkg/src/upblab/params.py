"""Parameter containers shared across the package.

All rates (detunings, interaction strengths, drive amplitudes, losses) are
expressed in units of a reference decay rate kappa_ref, times in units of
1/kappa_ref.  Drive amplitudes may be complex; losses must be strictly
positive so that every Liouvillian has a unique steady state.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    """Two coupled driven-dissipative Kerr modes.

    H = sum_j [delta_j a_j^dag a_j + u_j a_j^dag^2 a_j^2
               + f_j^* a_j + f_j a_j^dag] + j_hop (a_1^dag a_2 + a_2^dag a_1)

    with intensity losses kappa_j (photon number decays at rate kappa_j).
    """

    delta1: float = 0.0
    delta2: float = 0.0
    u1: float = 0.0
    u2: float = 0.0
    f1: complex = 0.0
    f2: complex = 0.0
    j_hop: float = 0.0
    kappa1: float = 1.0
    kappa2: float = 1.0

    def __post_init__(self):
        if self.kappa1 <= 0 or self.kappa2 <= 0:
            raise ValueError("losses kappa1, kappa2 must be strictly positive")

    @property
    def dtilde1(self) -> complex:
        """Complex detuning delta1 - i*kappa1/2."""
        return self.delta1 - 0.5j * self.kappa1

    @property
    def dtilde2(self) -> complex:
        return self.delta2 - 0.5j * self.kappa2

    def replace(self, **kw) -> "SystemParams":
        d = {k: getattr(self, k) for k in (
            "delta1", "delta2", "u1", "u2", "f1", "f2",
            "j_hop", "kappa1", "kappa2")}
        d.update(kw)
        return SystemParams(**d)


@dataclass(frozen=True)
class BathParams:
    """Environment beyond plain zero-temperature loss.

    n_th : thermal occupation of both reservoirs.
    dephasing : pure dephasing rate eta (enters as eta/4 with the
        doubled-rate dissipator convention used throughout).
    cascade_efficiency : eta_c in [0, 1]; a unidirectional coupling
        chi = sqrt(eta_c * kappa1 * kappa2) feeding mode 1's output into
        mode 2.  Always derived from the efficiency, never set directly.
    squeeze_xi : reservoir squeezing parameter xi = r e^{i theta} for the
        single-mode squeezed-vacuum reservoir acting on mode 1.
    squeeze_standard_form : if True, use the standard squeezed-bath
        dissipator (N = sinh^2 r with the correlated M terms) instead of
        the first-order two-photon form; the F=0, Delta=0 steady state is
        then the exact squeezed vacuum.
    """

    n_th: float = 0.0
    dephasing: float = 0.0
    cascade_efficiency: float = 0.0
    squeeze_xi: complex = 0.0
    squeeze_standard_form: bool = False

    def __post_init__(self):
        if self.n_th < 0:
            raise ValueError("thermal occupation n_th must be >= 0")
        if self.dephasing < 0:
            raise ValueError("dephasing rate must be >= 0")
        if not 0.0 <= self.cascade_efficiency <= 1.0:
            raise ValueError("cascade_efficiency must lie in [0, 1]")
        if self.cascade_efficiency > 0 and self.squeeze_xi != 0:
            raise ValueError(
                "cascaded coupling and a squeezed reservoir on the same "
                "port are mutually exclusive")

    def chi(self, params: SystemParams) -> float:
        """Cascade coupling chi = sqrt(eta_c kappa1 kappa2)."""
        return float(np.sqrt(
            self.cascade_efficiency * params.kappa1 * params.kappa2))


@dataclass(frozen=True)
class Pulse:
    """Gaussian drive envelope F(t) = f_peak * exp(-(t-t0)^2 / (2 sigma_t^2))."""

    f_peak: complex
    sigma_t: float
    t0: float

    def __post_init__(self):
        if self.sigma_t <= 0:
            raise ValueError("pulse width sigma_t must be positive")

    def envelope(self, t):
        return np.exp(-((t - self.t0) ** 2) / (2.0 * self.sigma_t ** 2))


@dataclass(frozen=True)
class JCParams:
    """Single cavity mode coupled to a two-level emitter.

    H = delta1 a^dag a + (delta2/2) sp sm + g (a^dag sm + sp a)
        + f1 a^dag + f1^* a + f2 sp + f2^* sm
    """

    delta1: float = 0.0
    delta2: float = 0.0
    g: float = 0.0
    f1: complex = 0.0
    f2: complex = 0.0
    kappa1: float = 1.0
    kappa2: float = 1.0

    def __post_init__(self):
        if self.kappa1 <= 0 or self.kappa2 <= 0:
            raise ValueError("losses kappa1, kappa2 must be strictly positive")

    @property
    def dtilde1(self) -> complex:
        return self.delta1 - 0.5j * self.kappa1

    @property
    def epstilde(self) -> complex:
        """Effective complex emitter energy delta2/2 - i*kappa2/2."""
        return 0.5 * self.delta2 - 0.5j * self.kappa2

    def as_system_params(self) -> SystemParams:
        """Bosonic-pair parameters realizing this model once mode 2 is
        capped at a single excitation (a_2 restricted to {0,1} is sm)."""
        return SystemParams(
            delta1=self.delta1, delta2=0.5 * self.delta2,
            u1=0.0, u2=0.0, f1=self.f1, f2=self.f2,
            j_hop=self.g, kappa1=self.kappa1, kappa2=self.kappa2)

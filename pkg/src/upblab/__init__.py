"""Numerical laboratory for unconventional photon blockade in coupled
driven-dissipative Kerr modes and the Jaynes-Cummings variant."""

from .params import SystemParams, BathParams, Pulse, JCParams
from .fock import (FockBasis, ModeOperator, DensityMatrix, build_basis,
                   mode_annihilation, number_operator, expectation,
                   photon_distribution, purity, vacuum_state)
from .weakdrive import (WeakDriveAmplitudes, WeakDriveObservables,
                        solve_manifolds, closed_form_single_drive,
                        observables, conventional_kerr_g2, jc_solve)
from .dynamics import (Liouvillian, build_hamiltonian, build_nonhermitian,
                       build_liouvillian, build_pulsed_liouvillian,
                       steady_state, evolve, occupancy, g2_zero,
                       top_manifold_population)
from .correlations import (CorrelationGrid, g2_tau_steady, two_time_g2,
                           g2_pulse_integrated, equal_time_g2_minimum)
from .meanfield import (FixedPoint, mean_field_evolve,
                        mean_field_fixed_points,
                        build_fluctuation_liouvillian, displaced_occupancy,
                        displaced_g2, fluctuation_gaussian_moments)
from .optimal import (DimerOptimum, JCOptimum, MinimizeResult, delta_u_opt,
                      f1_opt_cascaded, f1_opt_coherent, coherent_c20_roots,
                      jc_opt, effective_kerr, minimize_g2,
                      drive_for_occupancy)
from .squeezing import (SqueezeParams, SqueezeEstimate, pn_distribution,
                        p2, alpha_opt, g2_gaussian, optimal_r,
                        extract_squeeze, g2_from_moments, lambda_eff,
                        squeeze_from_lambda, n_eff_from_purity,
                        displaced_squeezed_state, g2_pure_optimal,
                        g2_thermal_optimal)
from .iomix import (MixingSpec, OutputMoments, drive_from_stokes,
                    output_pair_amplitude, output_moments, gamma1_opt,
                    symmetric_io_opt, output_g2_tau)

__version__ = "0.1.0"

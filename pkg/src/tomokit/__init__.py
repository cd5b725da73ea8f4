"""Tomographic probability representation of quantum states.

States are positive marginal distributions w(X, mu, nu) of the rotated
and scaled quadrature X = mu*q + nu*p, one distribution per reference
frame.  The package maps them to and from wavefunctions, density
kernels, Wigner functions and classical phase densities, evolves them
under quadratic Hamiltonians via exact frame pullbacks, and provides the
spin analog with full density-matrix reconstruction.
"""

from .config import NumericConfig, load_config
from .core import (AnalyticTomogram, DensityKernel, Grid1D, OpticalTomogram,
                   PhaseDensity, SpinState, SpinTomogram, SymplecticFrame,
                   Tomogram, WaveFunction, WignerGrid, angle_grid, m_values,
                   sample_tomogram, validate)
from .errors import ToolkitError
from .evolution import (LinearInvariants, QuadraticHamiltonian,
                        TomographicPropagator, classical_quantum_agreement,
                        compose_propagators, constant_hamiltonian,
                        free_motion, free_particle_hamiltonian,
                        harmonic_oscillator_hamiltonian, linear_invariants,
                        liouville_evolve, oscillator,
                        oscillator_energy_estimate,
                        oscillator_evolution_residual, propagate_tomogram,
                        quadratic_propagator, stationarity_residual)
from .library import (CoherentLabel, FockLabel, classical_point_tomogram,
                      coherent_tomogram, fock_tomogram,
                      fock_tomogram_fourier, fock_wavefunction,
                      white_noise_tomogram_pairing)
from .spin import (EulerAngles, ThreeJ, d_orthogonality_check,
                   gauss_legendre_beta, random_spin_state,
                   reconstruct_spin_state, spin_tomogram, three_j,
                   wigner_D, wigner_D_matrix, wigner_d_matrix,
                   wigner_small_d)
from .stats import (entropy, moment, orthogonality_matrix,
                    transition_probability, uncertainty_product,
                    wigner_overlap)
from .transforms import (classical_tomogram, density_from_tomogram,
                         phase_density_from_tomogram, tomogram_from_density,
                         tomogram_from_wavefunction, tomogram_from_wigner,
                         wigner_from_density, wigner_from_tomogram)

__version__ = "0.1.0"

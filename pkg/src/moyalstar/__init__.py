"""Moyal star product, Wigner functions and star exponentials for time-dependent oscillators."""

from .ermakov import (ErmakovSolution, TDModel, classical_trajectory, solve_linear_modes, solve_rho,
                      tau_of_t)
from .errors import (BoundaryDecayError, BranchError, CoverageError, GridMismatchError, GuardError,
                     MoyalError, PoleError, ResourceError, SolverError, StencilError)
from .invariant import (InvariantSpec, auto_grid, invariant_eval, laguerre, wigner_n, xi_pi_of_xp,
                        xp_of_xi_pi)
from .models import ModelPreset, build_model, hamiltonian_symbol, tdf_frequency_specs
from .oracle import (OperatorMatrix, PositionGrid, star_via_operators, weyl_quantize,
                     wigner_transform)
from .star import moyal_bracket, poisson_bracket_poly, star_grid, star_mixed, star_poly
from .starexp import (evolve_wigner, evolve_wigner_star, fourier_dirichlet_sum, harmonic_symbol,
                      phase_function, star_exp_closed, star_exp_via_propagator)
from .symbols import (GridSymbol, PhaseGrid, PhysContext, PolySymbol, read_symbol, sample_poly,
                      symbol_norms, write_symbol)

__version__ = "0.1.0"

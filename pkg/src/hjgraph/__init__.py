"""Hamilton-Jacobi solvers and weak-KAM diagnostics on weighted graphs.

The package discretizes compact geodesic spaces as finite weighted graphs,
solves u_t + H(x, |Du|) = 0 with a monotone upwind scheme, computes the
critical level, Aubry-like set and Mane potential, and measures the
large-time convergence of u + c t to the asymptotic profile.
"""

from . import _kernels
from .asymptotics import (ConvergenceReport, convergence_report,
                          phi_infinity, phi_minus, rescale_check)
from .errors import (CoercivityError, ConfigError, HJGraphError,
                     InfeasibleLevelError, InvariantViolationError,
                     NumericalBlowupError, ResourceLimitError)
from .evolution import EvolutionTrace, cfl_dt, hopf_lax_oracle, solve, step
from .graph import (MetricGraph, NodeFunction, build_circle, build_interval,
                    build_sierpinski, discrete_slopes, distance_matrix,
                    load_edge_list, max_slope, save_edge_list, shortest_dist,
                    shortest_dists, slope_fields)
from .hamiltonian import (AffineHamiltonian, AssumptionReport, Hamiltonian,
                          PowerHamiltonian, TabulatedHamiltonian,
                          check_assumptions, coercivity_slope_bound,
                          hamiltonian_from_dict, load_hamiltonian, sigma_c,
                          sigma_field)
from .weakkam import (ComparisonResult, CriticalData, aubry_set,
                      comparison_check, critical_value, edge_costs,
                      mane_potential, stationary_residual,
                      stationary_solution)

__version__ = "0.1.0"

backend_name = _kernels.backend_name

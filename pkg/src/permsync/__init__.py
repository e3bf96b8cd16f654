"""Robust permutation synchronization.

Recover absolute permutations at graph nodes from noisy and adversarially
corrupted relative permutations on edges.  Provides the corruption-level
initialisation via graph-connection-weight matrix powers, an iteratively
reweighted synchronization loop, classical baselines (spectral, projected
power, IRLS), synthetic corruption models, error metrics, and empirical
verification suites.
"""

from .blocks import (AffinityMatrix, BlockMeasurement, BlockTable, EdgeTable,
                     GcwOperator, WeightedGraph, block_inner, build_gcw,
                     squared_gcw_ratio)
from .errors import (FileFormatError, GenerationError, PermSyncError, SolverError)
from .models import (ModelConfig, ProblemInstance, SeededRng, derive_seed,
                     generate_er_graph, generate_instance, generate_lac,
                     generate_lbc, generate_superspreader, generate_uniform,
                     sample_haar_permutation, well_posedness_filter)
from .perms import Permutation, compose, correlation_affinity, project_to_permutation
from .problem_io import read_problem, read_solution, write_problem, write_solution
from .solvers import (Schedule, SolverReport, cemp_init, irgcl_init_solve,
                      irgcl_solve, irls_cauchy_solve, irls_l1_solve, ppm_solve,
                      spectral_solve, wls_power_step, wls_spectral_step)
from .analysis import (ErrorReport, cemp_message_passing_oracle, cycle_stats,
                       ground_truth_affinity, relative_error, theorem_bound,
                       verify_ppm_failure, verify_prop31, verify_theorem52)

__version__ = "0.1.0"

__all__ = [
    "AffinityMatrix", "BlockMeasurement", "BlockTable", "EdgeTable",
    "ErrorReport", "FileFormatError", "GcwOperator", "GenerationError",
    "ModelConfig", "PermSyncError", "Permutation", "ProblemInstance",
    "Schedule", "SeededRng", "SolverError", "SolverReport", "WeightedGraph",
    "block_inner", "build_gcw", "cemp_init", "cemp_message_passing_oracle",
    "compose", "correlation_affinity", "cycle_stats", "derive_seed",
    "generate_er_graph", "generate_instance", "generate_lac", "generate_lbc",
    "generate_superspreader", "generate_uniform", "ground_truth_affinity",
    "irgcl_init_solve", "irgcl_solve", "irls_cauchy_solve", "irls_l1_solve",
    "ppm_solve", "project_to_permutation", "read_problem", "read_solution",
    "relative_error", "sample_haar_permutation", "spectral_solve",
    "squared_gcw_ratio", "theorem_bound", "verify_ppm_failure",
    "verify_prop31", "verify_theorem52", "well_posedness_filter",
    "wls_power_step", "wls_spectral_step", "write_problem", "write_solution",
]

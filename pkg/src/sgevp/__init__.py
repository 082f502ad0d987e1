"""Sparse generalized eigenvalue solver via working-set decomposition.

Minimizes x'Ax / x'Cx subject to a hard sparsity budget ||x||_0 <= s,
with application builders for sparse PCA, FDA, and CCA, two reference
baselines, and a small CLI harness (``sgevp``).
"""

from .baselines import BaselineConfig, hard_threshold, truncated_power_method, truncated_rayleigh_flow
from .decomposition import (
    DecompositionConfig,
    ProblemInstance,
    SolveTrace,
    block_k_measure,
    refine_block_k,
    certify_block2_stationary,
    initial_point,
    objective,
    solve,
)
from .errors import SgevpError
from .fractional1d import OneDimCoefficients, OneDimSolution, solve_1d
from .problems import Dataset, build_cca, build_fda, build_pca, gen_randn, load_csv, load_libsvm
from .qfp import QfpSubproblem, solve_bisection, solve_coordinate_descent
from .subproblem import BlockSubproblem, build_block_subproblem, solve_exact
from .working_set import select_hybrid, select_random, select_swapping, swap_descent

__version__ = "0.1.0"

__all__ = [
    "BaselineConfig",
    "BlockSubproblem",
    "Dataset",
    "DecompositionConfig",
    "OneDimCoefficients",
    "OneDimSolution",
    "ProblemInstance",
    "QfpSubproblem",
    "SgevpError",
    "SolveTrace",
    "block_k_measure",
    "refine_block_k",
    "build_block_subproblem",
    "build_cca",
    "build_fda",
    "build_pca",
    "certify_block2_stationary",
    "gen_randn",
    "hard_threshold",
    "initial_point",
    "load_csv",
    "load_libsvm",
    "objective",
    "select_hybrid",
    "select_random",
    "select_swapping",
    "solve",
    "solve_1d",
    "solve_bisection",
    "solve_coordinate_descent",
    "solve_exact",
    "swap_descent",
    "truncated_power_method",
    "truncated_rayleigh_flow",
]

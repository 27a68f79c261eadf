"""Non-backtracking random walks on regular graphs: exact laws, sampling, and Brun's sieve."""

__version__ = "0.1.0"

from .graph import (
    GraphGenSpec,
    RegularGraph,
    build_from_edge_list,
    far_vertex_set,
    girth,
    named_graph,
    pairwise_distance,
    random_regular,
)
from .spectral import (
    MixingReport,
    SpectrumSummary,
    fine_mixing_time_tau,
    mixing_rate_rho,
    nbrw_k_step_vertex_distribution,
    psi,
    rho_upper_bound,
    second_eigenvalue,
    short_return_mass_M,
)
from .walk import VisitCounts, WalkConfig, nbrw_sample, run_trials, srw_sample
from .sieve import (
    BrunRegime,
    FactorialMomentTable,
    PoissonParams,
    SieveBounds,
    bonferroni_bounds,
    bonferroni_lambda,
    brun_error,
    brun_hypothesis_check,
    factorial_moments_exact,
    factorial_moments_mc,
    joint_poisson_pmf,
    poisson_pmf,
)
from .stats import (
    ComparisonReport,
    VisitHistogram,
    balls_and_bins,
    compare_to_poisson,
    expected_fraction,
    max_visit_prediction,
    threshold_F,
    visit_histogram,
)

"""Two-state persuasion through a garbling mediator.

Computes the posterior pairs a sender can induce through a fixed garbling,
best responses and pure-strategy equilibria for sender and mediator, and
informativeness/welfare comparisons against the unmediated benchmark.
"""

from .errors import (
    BarycenterMismatch,
    ColumnSumMismatch,
    DegeneratePrior,
    DimensionMismatch,
    EmptyDomain,
    NegativeEntry,
    NotSigmaPlausible,
    PersuasionError,
    PriorOutsideSupport,
    ScenarioError,
    SingularGarbling,
    TooFewRealizations,
    ZeroProbabilitySignal,
)
from .info import (
    TOL,
    BeliefDistribution,
    BlackwellOrder,
    BlackwellResult,
    GarblingRank,
    MpsResult,
    StochasticMatrix,
    bayes_plausible_weights,
    blackwell_compare,
    compose,
    garbling_rank,
    induced_tau,
    is_mps,
    posterior_after_signal,
    validate_stochastic,
)
from .payoffs import (
    ActionGame,
    Concavification,
    PiecewiseUtility,
    concavify,
    eval_utility,
    expected_utility,
    induce_belief_utilities,
)
from .feasible import (
    BeliefCloud,
    BoundaryCurve,
    FeasibleSet,
    boundary_curves,
    brute_force_pairs,
    companion_intervals,
    membership,
    member_pairs,
    nesting_report,
    ordered_member,
    posterior_pair,
    reconstruct_experiment,
    sample_feasible_general,
    symmetry_report,
    wing_polygons,
)
from .solver import (
    BenchmarkSolution,
    BestResponse,
    ComparisonReport,
    Deviation,
    EquilibriumCertificate,
    GameSpec,
    bp_solve,
    check_equilibrium,
    compare_outcomes,
    mediator_best_response,
    search_equilibria,
    sender_best_response,
)
from .scenarios import Scenario, fixture_path, load_fixture, load_scenario

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

"""Guaranteed-coverage confidence bounds on the mean of bounded random variables.

The package computes upper and lower confidence bounds for the mean of a
distribution whose support is contained in a known interval (possibly
unbounded on one side). Alongside classical baselines (Hoeffding,
Maurer-Pontil, Student-t, Anderson, Clopper-Pearson) it provides a
Monte-Carlo bound: the (1-alpha) quantile of the maximized induced mean over
a sublevel set of an ordering functional, which is never looser than
Anderson's bound and is often substantially tighter.
"""
from meanbound.core import (
    Envelope,
    Sample,
    SupportInterval,
    UniformDraw,
    induced_mean,
    precedes,
    quantile_index,
)
from meanbound.envelopes import (
    BetaNEstimate,
    anderson_envelope,
    beta_n_cache_dir,
    cached_beta_n,
    dkw_envelope,
    estimate_beta_n,
)
from meanbound.classical import (
    BoundResult,
    anderson_ucb,
    clopper_pearson_ucb,
    hoeffding_ucb,
    lower_bound_via_negation,
    maurer_pontil_ucb,
    student_t_ucb,
)
from meanbound.ordering import (
    AndersonT,
    L2T,
    MaximizerSolution,
    MeanT,
    eval_T,
    maximize_induced_mean,
    sup_first_order_statistic,
)
from meanbound.newbound import (
    BoundRequest,
    BoundTable,
    SafePlan,
    bound_table,
    check_superset_monotonicity,
    new_bound,
    safe_plan,
)
from meanbound.simharness import (
    ExperimentRow,
    ExperimentSpec,
    HistogramRow,
    load_spec,
    lognormal_skew_demo,
    parse_spec_text,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "Sample",
    "SupportInterval",
    "Envelope",
    "UniformDraw",
    "induced_mean",
    "precedes",
    "quantile_index",
    "BetaNEstimate",
    "estimate_beta_n",
    "cached_beta_n",
    "beta_n_cache_dir",
    "anderson_envelope",
    "dkw_envelope",
    "BoundResult",
    "hoeffding_ucb",
    "maurer_pontil_ucb",
    "student_t_ucb",
    "anderson_ucb",
    "clopper_pearson_ucb",
    "lower_bound_via_negation",
    "AndersonT",
    "L2T",
    "MeanT",
    "MaximizerSolution",
    "eval_T",
    "maximize_induced_mean",
    "sup_first_order_statistic",
    "BoundRequest",
    "SafePlan",
    "BoundTable",
    "new_bound",
    "safe_plan",
    "bound_table",
    "check_superset_monotonicity",
    "ExperimentSpec",
    "ExperimentRow",
    "HistogramRow",
    "run_experiment",
    "lognormal_skew_demo",
    "load_spec",
    "parse_spec_text",
    "__version__",
]

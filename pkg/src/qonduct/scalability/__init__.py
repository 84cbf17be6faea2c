from .assess import (
    Assessment,
    EmptyDatabaseSlice,
    analyze_qubo,
    assess,
    classify,
    disadvantage_check,
    load_recommended_config,
    recommend,
    write_outputs,
)
from .database import (
    ScalingDatabase,
    SweepPlan,
    build_database,
    desk_plan,
    plan_from_dict,
    merge_databases,
)
from .fits import (
    DegenerateFit,
    HYPOTHESES,
    HypothesisFit,
    KappaFit,
    NeverSucceeds,
    NoCrossing,
    ThresholdPoint,
    epsilon_star_at,
    estimate_shots,
    fit_calls,
    fit_kappa,
    fit_scaling,
    fit_threshold,
    kappa_at,
)
from .measure import (
    SuccessSample,
    finite_sampling_coefficient,
    kappa_of_state,
    make_instance,
    measure_success,
    measure_success_rate,
)

__all__ = [
    "Assessment",
    "DegenerateFit",
    "EmptyDatabaseSlice",
    "HYPOTHESES",
    "HypothesisFit",
    "KappaFit",
    "NeverSucceeds",
    "NoCrossing",
    "ScalingDatabase",
    "SuccessSample",
    "SweepPlan",
    "ThresholdPoint",
    "analyze_qubo",
    "assess",
    "build_database",
    "classify",
    "desk_plan",
    "plan_from_dict",
    "disadvantage_check",
    "epsilon_star_at",
    "estimate_shots",
    "finite_sampling_coefficient",
    "fit_calls",
    "fit_kappa",
    "fit_scaling",
    "fit_threshold",
    "kappa_at",
    "kappa_of_state",
    "load_recommended_config",
    "make_instance",
    "measure_success",
    "measure_success_rate",
    "merge_databases",
    "recommend",
    "write_outputs",
]

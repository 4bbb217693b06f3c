"""Teleological inference on binary causal models.

Build a causal graph with explicit conditional probability tables, tag one
variable as an agent's action, and the toolkit will classify the action's
effects, plan interference experiments that discriminate between candidate
intentions, run them on simulated or observational data, and identify which
effects the agent was acting for.
"""

from .agent import (
    DEFAULT_P_ACT,
    DEFAULT_P_BASE,
    DEFAULT_THETA,
    AgentPolicy,
    Servability,
    TeleologicalModel,
    agent_action_rate,
    bind_agent,
    servable,
)
from .effects import (
    EffectClass,
    EffectClassification,
    classify_effects,
    classify_variable,
    confounding_causes,
    justifying_paths,
)
from .engine import (
    ENUMERATION_CAP,
    NATURAL_LABEL,
    Dataset,
    JointTable,
    Regime,
    RegimeKind,
    joint_enumerate,
    mutilate,
    query,
    sample,
    sample_observational,
)
from .errors import (
    EnumerationLimitError,
    HypothesisError,
    InvalidGraphError,
    PolicyError,
    RegimeError,
    SpecError,
    TeleoError,
    UnknownVariableError,
    ZeroProbabilityError,
)
from .graph import CausalGraph, Tagging, Variable
from .inference import (
    ArmCounts,
    HypothesisScore,
    Identification,
    OracleOutcome,
    arms_from_dataset,
    arms_from_results,
    enumerate_hypotheses,
    hypothesis_label,
    identify,
    oracle_identify,
    predicted_rates,
    score_arms,
    score_hypotheses,
    sensitivity,
)
from .lab import (
    Battery,
    ExperimentResult,
    ExperimentRun,
    InterferenceExperiment,
    base_rate_violation_budget,
    pattern_check,
    plan,
    run_battery,
    run_randomized,
    two_proportion_test,
)
from .observational import (
    ObservationalResult,
    StratifiedComparison,
    StratumResult,
    observational_battery,
    stratified_action_comparison,
)
from .report import Report, emit_report, parse_machine_report
from .specfmt import (
    GraphSpecDocument,
    parse_graph,
    parse_graph_spec,
    serialize_graph_spec,
)

__version__ = "0.1.0"

__all__ = [
    "AgentPolicy",
    "ArmCounts",
    "Battery",
    "CausalGraph",
    "Dataset",
    "DEFAULT_P_ACT",
    "DEFAULT_P_BASE",
    "DEFAULT_THETA",
    "EffectClass",
    "EffectClassification",
    "ENUMERATION_CAP",
    "EnumerationLimitError",
    "ExperimentResult",
    "ExperimentRun",
    "GraphSpecDocument",
    "HypothesisError",
    "HypothesisScore",
    "Identification",
    "InterferenceExperiment",
    "InvalidGraphError",
    "JointTable",
    "NATURAL_LABEL",
    "ObservationalResult",
    "OracleOutcome",
    "PolicyError",
    "Regime",
    "RegimeError",
    "RegimeKind",
    "Report",
    "Servability",
    "SpecError",
    "StratifiedComparison",
    "StratumResult",
    "Tagging",
    "TeleoError",
    "TeleologicalModel",
    "UnknownVariableError",
    "Variable",
    "ZeroProbabilityError",
    "agent_action_rate",
    "arms_from_dataset",
    "arms_from_results",
    "base_rate_violation_budget",
    "bind_agent",
    "classify_effects",
    "classify_variable",
    "confounding_causes",
    "emit_report",
    "enumerate_hypotheses",
    "hypothesis_label",
    "identify",
    "joint_enumerate",
    "justifying_paths",
    "mutilate",
    "observational_battery",
    "oracle_identify",
    "parse_graph",
    "parse_graph_spec",
    "parse_machine_report",
    "pattern_check",
    "plan",
    "predicted_rates",
    "query",
    "run_battery",
    "run_randomized",
    "sample",
    "sample_observational",
    "score_arms",
    "score_hypotheses",
    "sensitivity",
    "serialize_graph_spec",
    "servable",
    "stratified_action_comparison",
    "two_proportion_test",
]

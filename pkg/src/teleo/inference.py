"""Turn experiment outcomes into a verdict about what the agent intends.

Each candidate intention set predicts an action rate under every regime the
experiments visited: the rate an agent with those intentions would show,
given the behavioral parameters (act when the intended effects are still
attainable, fall back to the base rate when they are not).  Summing binomial
log-probabilities of the observed per-arm act counts under those predicted
rates gives each hypothesis a score; hypotheses more than a separation
threshold below the best are refuted, and several hypotheses within the
threshold of each other are indistinguishable.

With natural-regime data alone every servable hypothesis predicts the same
rate, so all score identically and the data cannot decide between them.
Interference experiments are what break the tie.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from scipy import stats

from .agent import AgentPolicy, bind_agent
from .effects import classify_effects
from .engine import Dataset, Regime
from .errors import HypothesisError, RegimeError
from .graph import CausalGraph
from .lab import DEFAULT_ALPHA, ExperimentResult, plan, run_battery

SEPARATION_NATS = 6.0
MISFIT_NATS_PER_ARM = 6.0
HYPOTHESIS_CAP = 10_000

VERDICT_CONSISTENT = "consistent"
VERDICT_REFUTED = "refuted"
VERDICT_INDISTINGUISHABLE = "indistinguishable"

IDENT_UNIQUE = "unique"
IDENT_CANDIDATES = "candidates"
IDENT_INDETERMINATE = "indeterminate"

Hypothesis = frozenset  # of (variable, target) pairs


def hypothesis_label(hypothesis: Iterable[tuple[str, int]]) -> str:
    inner = ", ".join(f"{name}={value}" for name, value in sorted(hypothesis))
    return "{" + inner + "}"


@dataclass(frozen=True)
class HypothesisScore:
    hypothesis: Hypothesis
    log_likelihood: float
    verdict: str

    @property
    def label(self) -> str:
        return hypothesis_label(self.hypothesis)


class ArmCounts(NamedTuple):
    """Aggregated act counts for one arm of data under one regime."""

    regime: Regime
    n: int
    acts: int


def arms_from_results(results: Sequence[ExperimentResult]) -> list[ArmCounts]:
    """Each experiment contributes its natural control arm and its clamped
    treated arm."""
    arms = []
    for result in results:
        if result.experiment is None:
            raise RegimeError("experiment result carries no regime metadata")
        arms.append(ArmCounts(Regime.natural(), result.control_n, result.control_acts))
        arms.append(
            ArmCounts(result.experiment.regime(), result.treated_n, result.treated_acts)
        )
    return arms


def arms_from_dataset(dataset: Dataset, action: str) -> list[ArmCounts]:
    """One arm per regime label present in the dataset, in sorted label
    order.  Labels are parsed back into regimes; clamps are treated as
    interference."""
    acts = dataset.column(action)
    arms = []
    for label in sorted(set(dataset.regime_labels)):
        mask = [lab == label for lab in dataset.regime_labels]
        n = sum(mask)
        k = int(acts[mask].sum())
        arms.append(ArmCounts(Regime.from_label(label), n, k))
    return arms


def enumerate_hypotheses(
    graph: CausalGraph,
    action: str,
    max_size: int = 1,
    cap: int = HYPOTHESIS_CAP,
) -> list[Hypothesis]:
    """All non-empty subsets of the action's strict descendants (target
    value 1), smallest first, declaration order inside each size."""
    if max_size < 1:
        raise HypothesisError("max_size must be at least 1")
    desc = graph.descendants(action)
    ordered = [name for name in graph.names if name in desc]
    top = min(max_size, len(ordered))
    total = sum(math.comb(len(ordered), k) for k in range(1, top + 1))
    if total > cap:
        raise HypothesisError(
            f"{total} hypotheses over {len(ordered)} effects exceeds the cap of {cap}"
        )
    out = []
    for size in range(1, top + 1):
        for combo in itertools.combinations(ordered, size):
            out.append(frozenset((name, 1) for name in combo))
    return out


def _scoring_policy(policy_params, hypothesis: Hypothesis) -> AgentPolicy:
    if isinstance(policy_params, AgentPolicy):
        return policy_params.with_intentions(hypothesis)
    params = dict(policy_params)
    return AgentPolicy.make(intentions=hypothesis, **params)


def predicted_rates(
    graph: CausalGraph,
    action: str,
    policy_params,
    hypothesis: Hypothesis,
    regimes: Iterable[Regime],
) -> list[float]:
    """Exact action rate a ``hypothesis``-driven agent would show under each
    regime, by enumeration of the bound graph."""
    policy = _scoring_policy(policy_params, hypothesis)
    model = bind_agent(graph, action, policy)
    return [model.action_rate(regime) for regime in regimes]


def score_arms(
    arms: Sequence[ArmCounts],
    graph: CausalGraph,
    action: str,
    policy_params,
    hypotheses: Sequence[Hypothesis] | None = None,
    separation: float = SEPARATION_NATS,
    misfit_per_arm: float = MISFIT_NATS_PER_ARM,
) -> list[HypothesisScore]:
    """Score intention hypotheses against per-arm act counts.

    Log-likelihood per hypothesis is the sum over arms of the binomial
    log-probability of the observed count at the hypothesis's predicted
    rate.  Verdicts: hypotheses more than ``separation`` nats below the best
    are refuted; a lone hypothesis within the window is consistent; two or
    more within it are indistinguishable.  If even the best hypothesis falls
    more than ``misfit_per_arm`` nats per arm short of the saturated fit
    (each arm at its own empirical rate), no hypothesis explains the data
    and all are refuted.
    """
    if hypotheses is None:
        hypotheses = enumerate_hypotheses(graph, action, max_size=1)
    hypotheses = list(hypotheses)
    if not hypotheses:
        raise HypothesisError("no hypotheses to score")
    arms = [arm for arm in arms if arm.n > 0]

    if not arms:
        return [
            HypothesisScore(h, 0.0, VERDICT_INDISTINGUISHABLE)
            if len(hypotheses) > 1
            else HypothesisScore(h, 0.0, VERDICT_CONSISTENT)
            for h in hypotheses
        ]

    regimes = [arm.regime for arm in arms]
    lls = []
    for hypothesis in hypotheses:
        rates = predicted_rates(graph, action, policy_params, hypothesis, regimes)
        ll = 0.0
        for arm, rate in zip(arms, rates):
            ll += float(stats.binom.logpmf(arm.acts, arm.n, rate))
        lls.append(ll)

    saturated = 0.0
    for arm in arms:
        saturated += float(stats.binom.logpmf(arm.acts, arm.n, arm.acts / arm.n))
    budget = misfit_per_arm * len(arms)

    best = max(lls)
    if best < saturated - budget:
        verdicts = [VERDICT_REFUTED] * len(hypotheses)
    else:
        within = [ll >= best - separation for ll in lls]
        n_within = sum(within)
        verdicts = []
        for ok in within:
            if not ok:
                verdicts.append(VERDICT_REFUTED)
            elif n_within == 1:
                verdicts.append(VERDICT_CONSISTENT)
            else:
                verdicts.append(VERDICT_INDISTINGUISHABLE)
    return [
        HypothesisScore(h, ll, verdict)
        for h, ll, verdict in zip(hypotheses, lls, verdicts)
    ]


def score_hypotheses(
    results: Sequence[ExperimentResult],
    graph: CausalGraph,
    action: str,
    policy_params,
    hypotheses: Sequence[Hypothesis] | None = None,
    separation: float = SEPARATION_NATS,
    misfit_per_arm: float = MISFIT_NATS_PER_ARM,
) -> list[HypothesisScore]:
    """Score hypotheses against a randomized experiment battery's counts."""
    return score_arms(
        arms_from_results(results),
        graph,
        action,
        policy_params,
        hypotheses=hypotheses,
        separation=separation,
        misfit_per_arm=misfit_per_arm,
    )


@dataclass(frozen=True)
class Identification:
    """The aggregate verdict: a unique intention set, a candidate set the
    data cannot split, or nothing fits at all."""

    verdict: str  # unique | candidates | indeterminate
    top: Hypothesis | None
    candidates: tuple[Hypothesis, ...]
    scores: tuple[HypothesisScore, ...]


def identify(scores: Sequence[HypothesisScore]) -> Identification:
    """Reduce scores to an identification.  Deterministic in the scores."""
    scores = tuple(scores)
    if not scores:
        raise HypothesisError("cannot identify from an empty score list")
    surviving = [s for s in scores if s.verdict != VERDICT_REFUTED]
    if not surviving:
        return Identification(IDENT_INDETERMINATE, None, (), scores)
    top = max(surviving, key=lambda s: s.log_likelihood)
    if len(surviving) == 1:
        return Identification(IDENT_UNIQUE, top.hypothesis, (top.hypothesis,), scores)
    return Identification(
        IDENT_CANDIDATES,
        top.hypothesis,
        tuple(s.hypothesis for s in surviving),
        scores,
    )


class OracleOutcome(NamedTuple):
    truth: Hypothesis
    identification: Identification
    agreement: bool


def oracle_identify(
    graph: CausalGraph,
    action: str,
    true_policy: AgentPolicy,
    levers: Mapping[str, tuple[str, int]],
    n_per_arm: int,
    seed: int,
    alpha: float = DEFAULT_ALPHA,
    max_size: int | None = None,
) -> OracleOutcome:
    """Ground-truth harness: bind the true policy, plan and run the full
    battery for its first intended effect, score every hypothesis up to the
    truth's size, and report whether identification recovers the truth."""
    truth = frozenset(true_policy.intention_set)
    model = bind_agent(graph, action, true_policy)
    intended = {name for name, _ in truth}
    hypothesized = next(name for name in graph.names if name in intended)
    classification = classify_effects(graph, action, hypothesized)
    battery = plan(graph, classification, levers)
    runs = run_battery(model, battery, n_per_arm, seed, alpha=alpha)
    results = [run.result for run in runs]
    size = max_size if max_size is not None else len(truth)
    hypotheses = enumerate_hypotheses(graph, action, max_size=size)
    scores = score_hypotheses(results, graph, action, true_policy, hypotheses=hypotheses)
    ident = identify(scores)
    agreement = ident.verdict == IDENT_UNIQUE and ident.top == truth
    return OracleOutcome(truth, ident, agreement)


def sensitivity(
    results: Sequence[ExperimentResult],
    graph: CausalGraph,
    action: str,
    base_policy: AgentPolicy,
    p_act_grid: Sequence[float],
    p_base_grid: Sequence[float],
    hypotheses: Sequence[Hypothesis] | None = None,
) -> list[tuple[dict, Identification]]:
    """Re-score over a grid of behavioral parameters.

    The scoring model assumes the agent's (p_act, p_base) are known; this
    shows how the identification verdict moves when they are not.  Returns
    one (params, identification) pair per grid point, in grid order.
    """
    out = []
    for p_act in p_act_grid:
        for p_base in p_base_grid:
            policy = AgentPolicy.make(
                intentions=base_policy.intention_set,
                p_act=p_act,
                p_base=p_base,
                theta=base_policy.theta,
                cause_modifiers=base_policy.cause_modifiers,
            )
            scores = score_hypotheses(
                results, graph, action, policy, hypotheses=hypotheses
            )
            out.append(({"p_act": p_act, "p_base": p_base}, identify(scores)))
    return out

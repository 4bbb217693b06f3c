"""Plan and run interference experiments as randomized two-group trials.

Planning turns an effect classification plus a lever table into a battery:
one experiment per parallel effect, one per further effect, exactly one for
the hypothesized effect itself (clamped through a lever parent so upstream
mediators keep varying), and none for mediators, which cannot be clamped
without also clamping the hypothesized effect.

Running an experiment samples a control arm under the natural regime and a
treated arm under the lever's interference regime, counts how often the
agent acts in each, and asks a pooled two-proportion z-test whether the
action rate changed.  Each experiment also carries the observation pattern
its hypothesis predicts present (or absent) in the treated arm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .agent import TeleologicalModel
from .effects import EffectClassification
from .engine import Dataset, Regime, sample
from .errors import RegimeError, UnknownVariableError
from .graph import CausalGraph

DEFAULT_ALPHA = 0.05
MIN_ARM_ACTS = 5  # below this in both arms the normal approximation is junk
DEFAULT_MIN_SUPPORT = 1
DEFAULT_MAX_VIOLATIONS = 0

RATIONALE_PARALLEL = "parallel"
RATIONALE_FURTHER = "further"
RATIONALE_HYPOTHESIZED = "hypothesized-itself"

MODE_MUST_OBSERVE = "must-observe"
MODE_MUST_NOT_OBSERVE = "must-not-observe"


@dataclass(frozen=True)
class InterferenceExperiment:
    """One planned interference: clamp ``lever`` to neutralize ``target``.

    ``expected_pattern`` is the treated-arm observation pattern the
    intention hypothesis predicts: present for parallel/further experiments
    (the agent keeps acting, the target stays off), absent for the
    hypothesized-itself experiment (the agent should stop acting).
    """

    target: str
    lever: tuple[str, int]
    rationale: str
    expected_pattern: Mapping[str, int]
    pattern_mode: str

    def regime(self) -> Regime:
        return Regime.interference({self.lever[0]: self.lever[1]})

    @property
    def label(self) -> str:
        return self.regime().label()


@dataclass(frozen=True)
class Battery:
    """A planned battery plus everything that could not be planned."""

    experiments: tuple[InterferenceExperiment, ...]
    unleverable: tuple[tuple[str, str], ...] = ()  # (effect, class) without a lever
    skipped: tuple[tuple[str, str], ...] = ()  # (lever target, reason) ignored

    def labels(self) -> tuple[str, ...]:
        return tuple(e.label for e in self.experiments)


@dataclass(frozen=True)
class ExperimentResult:
    """Counts and test outcome of one randomized interference trial."""

    experiment: InterferenceExperiment
    control_n: int
    control_acts: int
    treated_n: int
    treated_acts: int
    z_statistic: float
    p_value: float
    verdict: str  # no-change | change | underpowered
    seed: int


@dataclass(frozen=True)
class ExperimentRun:
    """An experiment's result together with its treated-arm data and the
    pattern check evaluated on that data."""

    result: ExperimentResult
    treated_data: Dataset
    pattern_count: int
    pattern_passed: bool


def plan(
    graph: CausalGraph,
    classification: EffectClassification,
    levers: Mapping[str, tuple[str, int]],
) -> Battery:
    """Build the experiment battery for a classification.

    Effects without a lever entry are reported unleverable rather than
    failing the whole plan; lever entries for mediators or non-effects are
    skipped (and reported), never run.
    """
    for target, (lever_var, value) in levers.items():
        if target not in graph.names:
            raise UnknownVariableError(f"lever target {target!r} is not a declared variable")
        if lever_var not in graph.names:
            raise UnknownVariableError(f"lever variable {lever_var!r} is not a declared variable")
        if value not in (0, 1):
            raise RegimeError(f"lever value for {target!r} must be 0 or 1, got {value!r}")

    mediators = classification.mediating
    hypothesized = classification.hypothesized
    target_value = 1  # hypotheses default to "effect obtains"

    experiments = []
    unleverable = []
    skipped = []

    def pattern_for(target: str, lever: tuple[str, int], rationale: str) -> dict[str, int]:
        pat = {classification.action: 1}
        for m in sorted(mediators):
            pat[m] = 1
        if rationale == RATIONALE_HYPOTHESIZED:
            pat[hypothesized] = 1 - target_value
        else:
            pat[hypothesized] = target_value
            pat[target] = 0
        pat[lever[0]] = lever[1]
        return pat

    for rationale, targets in (
        (RATIONALE_PARALLEL, sorted(classification.parallel)),
        (RATIONALE_FURTHER, sorted(classification.further)),
        (RATIONALE_HYPOTHESIZED, [hypothesized]),
    ):
        for target in targets:
            if target not in levers:
                unleverable.append((target, rationale))
                continue
            lever = levers[target]
            if lever[0] in mediators or lever[0] == classification.action:
                skipped.append((target, f"lever {lever[0]!r} would clamp a mediator or the action"))
                continue
            mode = MODE_MUST_NOT_OBSERVE if rationale == RATIONALE_HYPOTHESIZED else MODE_MUST_OBSERVE
            experiments.append(
                InterferenceExperiment(
                    target=target,
                    lever=lever,
                    rationale=rationale,
                    expected_pattern=pattern_for(target, lever, rationale),
                    pattern_mode=mode,
                )
            )

    for target in sorted(set(levers) - classification.all_effects()):
        skipped.append((target, "not an effect of the action"))
    for target in sorted(set(levers) & mediators):
        skipped.append((target, "mediating effects cannot be clamped"))

    return Battery(
        experiments=tuple(experiments),
        unleverable=tuple(unleverable),
        skipped=tuple(skipped),
    )


def two_proportion_test(k1: int, n1: int, k2: int, n2: int) -> tuple[float, float]:
    """Pooled two-proportion z-test, two-sided.

    Returns (z, p) with z = (k1/n1 - k2/n2) / pooled standard error.  A
    degenerate pooled variance (all zeros or all ones across both arms)
    forces equal proportions, so that case is (0.0, 1.0).
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("arm sizes must be >= 1")
    if not (0 <= k1 <= n1 and 0 <= k2 <= n2):
        raise ValueError("act counts must lie within arm sizes")
    p1 = k1 / n1
    p2 = k2 / n2
    pooled = (k1 + k2) / (n1 + n2)
    variance = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)
    if variance == 0.0:
        return 0.0, 1.0
    z = (p1 - p2) / math.sqrt(variance)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return z, p


def _run_with_data(
    model: TeleologicalModel,
    experiment: InterferenceExperiment,
    n_per_arm: int,
    seed: int,
    alpha: float,
) -> tuple[ExperimentResult, Dataset, Dataset]:
    if n_per_arm < 1:
        raise ValueError("n_per_arm must be >= 1")
    regime = experiment.regime()
    if model.action in regime.clamps:
        raise RegimeError(f"lever clamps the action {model.action!r}")
    control_seq, treated_seq = np.random.SeedSequence(seed).spawn(2)
    control = sample(model.bound_graph(Regime.natural()), n_per_arm, control_seq)
    treated = sample(
        model.bound_graph(regime), n_per_arm, treated_seq, regime_label=experiment.label
    )
    k1 = int(control.column(model.action).sum())
    k2 = int(treated.column(model.action).sum())
    z, p = two_proportion_test(k1, n_per_arm, k2, n_per_arm)
    if k1 < MIN_ARM_ACTS and k2 < MIN_ARM_ACTS:
        verdict = "underpowered"
    elif p < alpha:
        verdict = "change"
    else:
        verdict = "no-change"
    result = ExperimentResult(
        experiment=experiment,
        control_n=n_per_arm,
        control_acts=k1,
        treated_n=n_per_arm,
        treated_acts=k2,
        z_statistic=z,
        p_value=p,
        verdict=verdict,
        seed=seed,
    )
    return result, control, treated


def run_randomized(
    model: TeleologicalModel,
    experiment: InterferenceExperiment,
    n_per_arm: int,
    seed: int,
    alpha: float = DEFAULT_ALPHA,
) -> ExperimentResult:
    """Sample both arms and test for an action-rate change.

    Control is the natural regime, treated the lever's interference regime;
    arm seeds are spawned deterministically from ``seed``, so identical
    inputs give identical results.  Verdict is "underpowered" when both
    arms' act counts fall below the normal-approximation floor, otherwise
    "change" iff p < alpha.
    """
    result, _, _ = _run_with_data(model, experiment, n_per_arm, seed, alpha)
    return result


def pattern_check(
    dataset: Dataset,
    pattern: Mapping[str, int],
    mode: str,
    min_support: int = DEFAULT_MIN_SUPPORT,
    max_violations: int = DEFAULT_MAX_VIOLATIONS,
) -> tuple[int, bool]:
    """Count rows matching every pattern entry and judge them.

    must-observe passes iff count >= min_support; must-not-observe passes
    iff count <= max_violations.
    """
    if mode not in (MODE_MUST_OBSERVE, MODE_MUST_NOT_OBSERVE):
        raise ValueError(f"unknown mode {mode!r}")
    mask = np.ones(dataset.n_rows, dtype=bool)
    for name, value in pattern.items():
        mask &= dataset.column(name) == value
    count = int(mask.sum())
    if mode == MODE_MUST_OBSERVE:
        return count, count >= min_support
    return count, count <= max_violations


def base_rate_violation_budget(p_base: float, n: int) -> int:
    """How many treated-arm rows the agent's base rate can legitimately
    produce: the 3-sigma binomial upper bound on n draws at p_base.

    The hypothesized-itself check expects the action pattern to vanish only
    down to the base rate, not to literally zero, so batteries use this as
    the must-not-observe violation budget whenever p_base > 0.
    """
    return int(math.ceil(n * p_base + 3.0 * math.sqrt(n * p_base * (1.0 - p_base))))


def run_battery(
    model: TeleologicalModel,
    battery: Battery,
    n_per_arm: int,
    seed: int,
    alpha: float = DEFAULT_ALPHA,
    min_support: int = DEFAULT_MIN_SUPPORT,
) -> list[ExperimentRun]:
    """Run every experiment in a battery with per-experiment spawned seeds
    and evaluate each expected pattern on its treated arm."""
    runs = []
    seeds = np.random.SeedSequence(seed).spawn(max(1, len(battery.experiments)))
    for experiment, seq in zip(battery.experiments, seeds):
        exp_seed = int(seq.generate_state(1)[0])
        result, _, treated = _run_with_data(model, experiment, n_per_arm, exp_seed, alpha)
        budget = DEFAULT_MAX_VIOLATIONS
        if experiment.pattern_mode == MODE_MUST_NOT_OBSERVE:
            budget = base_rate_violation_budget(model.policy.p_base, n_per_arm)
        count, passed = pattern_check(
            treated,
            experiment.expected_pattern,
            experiment.pattern_mode,
            min_support=min_support,
            max_violations=budget,
        )
        runs.append(
            ExperimentRun(
                result=result,
                treated_data=treated,
                pattern_count=count,
                pattern_passed=passed,
            )
        )
    return runs

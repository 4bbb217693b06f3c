"""Partition an action's effects into the three confounding-effect classes.

Relative to one hypothesized intended effect, every other strict descendant
of the action falls into exactly one class:

* mediating - interior to some directed path from the action to the
  hypothesized effect.  Mediators can never be clamped directly, because
  clamping one also clamps the hypothesized effect downstream of it.
* further - strictly downstream of the hypothesized effect; the "too
  short" hypotheses live here.
* parallel - on other branches from the action; the "wrong branch"
  hypotheses.

Mediating status dominates: a mediator that also starts a side branch stays
mediating, and its off-path descendants land in parallel unless they are
downstream of the hypothesized effect (then they are further).

Separately, :func:`confounding_causes` lists the common ancestors of the
action and an effect - the adjustment set observational analyses stratify
on.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import HypothesisError
from .graph import CausalGraph


class EffectClass(str, enum.Enum):
    MEDIATING = "mediating"
    FURTHER = "further"
    PARALLEL = "parallel"
    HYPOTHESIZED = "hypothesized"
    NOT_AN_EFFECT = "not an effect"


@dataclass(frozen=True)
class EffectClassification:
    """The partition of the action's strict descendants relative to one
    hypothesized intended effect.  The three sets plus {hypothesized} cover
    the descendants exactly, pairwise disjoint."""

    action: str
    hypothesized: str
    mediating: frozenset[str]
    further: frozenset[str]
    parallel: frozenset[str]

    def all_effects(self) -> frozenset[str]:
        return self.mediating | self.further | self.parallel | {self.hypothesized}


def classify_effects(graph: CausalGraph, action: str, hypothesized: str) -> EffectClassification:
    """Classify every strict descendant of ``action`` relative to
    ``hypothesized``.

    A variable is mediating iff the hypothesized effect is reachable from it
    (and it is reachable from the action); further iff it is reachable from
    the hypothesized effect; parallel otherwise.
    """
    graph.require_valid()
    effects = graph.descendants(action, strict=True)
    if hypothesized not in effects:
        raise HypothesisError(
            f"{hypothesized!r} is not a strict descendant of action {action!r}"
        )
    mediating = set()
    further = graph.descendants(hypothesized, strict=True)
    for v in effects:
        if v == hypothesized:
            continue
        if hypothesized in graph.descendants(v, strict=True):
            mediating.add(v)
    parallel = effects - mediating - further - {hypothesized}
    return EffectClassification(
        action=action,
        hypothesized=hypothesized,
        mediating=frozenset(mediating),
        further=frozenset(further),
        parallel=frozenset(parallel),
    )


def classify_variable(classification: EffectClassification, name: str) -> EffectClass:
    """Constant-time class lookup; anything outside the partition (the
    action itself, ancestors, unrelated variables) is "not an effect"."""
    if name == classification.hypothesized:
        return EffectClass.HYPOTHESIZED
    if name in classification.mediating:
        return EffectClass.MEDIATING
    if name in classification.further:
        return EffectClass.FURTHER
    if name in classification.parallel:
        return EffectClass.PARALLEL
    return EffectClass.NOT_AN_EFFECT


def confounding_causes(graph: CausalGraph, action: str, effect: str) -> set[str]:
    """Common ancestors of ``action`` and ``effect``, excluding both.

    This is deliberately common-ancestry, not full back-door admissibility:
    it is exactly the set of variables an observational comparison of the
    action across regimes must stratify on.
    """
    a = graph.ancestors(action, strict=True)
    b = graph.ancestors(effect, strict=True)
    return (a & b) - {action, effect}


def justifying_paths(
    graph: CausalGraph, classification: EffectClassification, name: str
) -> list[list[str]]:
    """Paths that witness a variable's class, for report output.

    mediating: the action-to-hypothesized paths through it; further: paths
    from the hypothesized effect to it; parallel: action-to-it paths;
    hypothesized: the action-to-hypothesized paths themselves.
    """
    cls = classify_variable(classification, name)
    action = classification.action
    hyp = classification.hypothesized
    if cls is EffectClass.MEDIATING:
        return [p for p in graph.directed_paths(action, hyp) if name in p[1:-1]]
    if cls is EffectClass.FURTHER:
        return graph.directed_paths(hyp, name)
    if cls is EffectClass.PARALLEL:
        return graph.directed_paths(action, name)
    if cls is EffectClass.HYPOTHESIZED:
        return graph.directed_paths(action, hyp)
    return []

"""Classify the effects that confound a teleological hypothesis.

Suppose we observe someone practicing and hypothesize they intend to be
fit.  Every other effect of practicing co-occurs with fitness and so also
explains the observation.  Relative to the action -> hypothesis path each
one is mediating (on the path), further (downstream of the hypothesis), or
parallel (on a different branch), and the class dictates how it can be
tested: parallel and further effects can be clamped away, mediators cannot
be touched without destroying the hypothesis itself.
"""

from teleo import classify_effects, justifying_paths, plan
from teleo.models import SPORT_LEVERS, sport_lab_graph

graph = sport_lab_graph()
cls = classify_effects(graph, "practice", "be_fit")

print("action:      ", cls.action)
print("hypothesized:", cls.hypothesized)
print("mediating:   ", sorted(cls.mediating))
print("further:     ", sorted(cls.further))
print("parallel:    ", sorted(cls.parallel))

# Each confounding effect justifies the action through its own path.
for effect in sorted(cls.all_effects() - {cls.hypothesized}):
    for path in justifying_paths(graph, cls, effect):
        print("path for", effect, ":", " -> ".join(path))

# Planning turns the classification plus a lever table into a battery:
# one clamp per parallel/further effect, one for the hypothesis itself,
# none for mediators.
battery = plan(graph, cls, SPORT_LEVERS)
for e in battery.experiments:
    print(
        f"experiment: clamp {e.lever[0]}={e.lever[1]} "
        f"to neutralize {e.target} ({e.rationale}, {e.pattern_mode})"
    )
for target, reason in battery.skipped:
    print("skipped:", target, "-", reason)
for effect, rationale in battery.unleverable:
    print("unleverable:", effect, f"({rationale})")

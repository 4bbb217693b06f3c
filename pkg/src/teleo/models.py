"""Ready-made binary causal models used throughout the docs and tests.

All of them are small enough for exact enumeration: a bowling lane, a stove
heating water, education and salary with family status as common cause, and
several variants of the sport-practice model, whose effect chain
(practice -> lose_weight -> be_fit -> live_longer, plus practice ->
win_medals) is the package's running example.

The "lab" variants add one lever variable per controllable effect: enroll
feeds win_medals, smoke suppresses live_longer, protein_diet gates be_fit.
Clamping a lever neutralizes its effect without touching any mediator, which
is what interference experiments need.
"""

from __future__ import annotations

from .agent import DEFAULT_P_ACT, DEFAULT_P_BASE, DEFAULT_THETA, AgentPolicy
from .graph import CausalGraph, Tagging, Variable
from .specfmt import GraphSpecDocument

AND = {(0, 0): 0.0, (0, 1): 0.0, (1, 0): 0.0, (1, 1): 1.0}
COPY = {(0,): 0.0, (1,): 1.0}


def ball_pins() -> CausalGraph:
    """Two nodes: a thrown ball deterministically knocks the pins down."""
    return CausalGraph.make(
        [
            Variable.make("ball", (), 0.5),
            Variable.make("pins", ("ball",), COPY),
        ]
    )


def stove_water() -> CausalGraph:
    """A hot stove deterministically brings the water to a boil."""
    return CausalGraph.make(
        [
            Variable.make("stove", (), 0.5),
            Variable.make("water", ("stove",), COPY),
        ]
    )


def education_salary() -> CausalGraph:
    """Education raises salary, but family status drives both."""
    return CausalGraph.make(
        [
            Variable.make("family_status", (), 0.4),
            Variable.make("education", ("family_status",), {(0,): 0.2, (1,): 0.8}),
            Variable.make(
                "salary",
                ("family_status", "education"),
                {(0, 0): 0.1, (0, 1): 0.5, (1, 0): 0.4, (1, 1): 0.9},
            ),
        ]
    )


def sport_chain(p_practice: float = 0.8) -> CausalGraph:
    """The five-node sport model with fully deterministic mechanisms:
    practice -> lose_weight -> be_fit -> live_longer, practice -> win_medals."""
    return CausalGraph.make(
        [
            Variable.make("practice", (), p_practice),
            Variable.make("lose_weight", ("practice",), COPY),
            Variable.make("be_fit", ("lose_weight",), COPY),
            Variable.make("live_longer", ("be_fit",), COPY),
            Variable.make("win_medals", ("practice",), COPY),
        ]
    )


def sport_lab_graph(
    enroll_rate: float = 0.7,
    smoke_rate: float = 0.3,
    diet_rate: float = 0.9,
    p_practice: float = 0.8,
) -> CausalGraph:
    """The sport model extended with one lever per controllable effect.

    win_medals = practice AND enroll; be_fit = lose_weight AND protein_diet;
    live_longer = be_fit AND NOT smoke.  The lever marginals are free
    configuration; the defaults keep every singleton intention servable
    under the natural regime.
    """
    return CausalGraph.make(
        [
            Variable.make("enroll", (), enroll_rate),
            Variable.make("smoke", (), smoke_rate),
            Variable.make("protein_diet", (), diet_rate),
            Variable.make("practice", (), p_practice),
            Variable.make("lose_weight", ("practice",), COPY),
            Variable.make("be_fit", ("lose_weight", "protein_diet"), AND),
            Variable.make(
                "live_longer",
                ("be_fit", "smoke"),
                {(0, 0): 0.0, (0, 1): 0.0, (1, 0): 1.0, (1, 1): 0.0},
            ),
            Variable.make("win_medals", ("practice", "enroll"), AND),
        ]
    )


SPORT_LEVERS = {
    "win_medals": ("enroll", 0),
    "live_longer": ("smoke", 1),
    "be_fit": ("protein_diet", 0),
}


def sport_lab(
    intentions: tuple[tuple[str, int], ...] = (("be_fit", 1),),
    p_act: float = DEFAULT_P_ACT,
    p_base: float = DEFAULT_P_BASE,
    theta: float = DEFAULT_THETA,
) -> GraphSpecDocument:
    """The full sport document: lab graph, tagging, policy, and levers."""
    graph = sport_lab_graph()
    return GraphSpecDocument(
        graph=graph,
        tagging=Tagging.make("practice", intentions),
        policy=AgentPolicy.make(intentions, p_act=p_act, p_base=p_base, theta=theta),
        levers=dict(SPORT_LEVERS),
    )


def sport_lab_confounded(
    intentions: tuple[tuple[str, int], ...] = (("be_fit", 1),),
    age_rate: float = 0.5,
    old_factor: float = 0.5,
    p_act: float = DEFAULT_P_ACT,
    p_base: float = DEFAULT_P_BASE,
    theta: float = DEFAULT_THETA,
) -> GraphSpecDocument:
    """The lab model with age as a confounding cause of practice and medals.

    Age feeds both the action (via a cause modifier that halves the act
    rate for older people by default) and win_medals (older athletes win
    less often), so unadjusted observational comparisons across regimes
    that select on age are biased.
    """
    graph = CausalGraph.make(
        [
            Variable.make("age", (), age_rate),
            Variable.make("enroll", (), 0.7),
            Variable.make("smoke", (), 0.3),
            Variable.make("protein_diet", (), 0.9),
            Variable.make("practice", ("age",), {(0,): 0.8, (1,): 0.4}),
            Variable.make("lose_weight", ("practice",), COPY),
            Variable.make("be_fit", ("lose_weight", "protein_diet"), AND),
            Variable.make(
                "live_longer",
                ("be_fit", "smoke"),
                {(0, 0): 0.0, (0, 1): 0.0, (1, 0): 1.0, (1, 1): 0.0},
            ),
            Variable.make(
                "win_medals",
                ("practice", "enroll", "age"),
                {
                    (0, 0, 0): 0.0,
                    (0, 0, 1): 0.0,
                    (0, 1, 0): 0.0,
                    (0, 1, 1): 0.0,
                    (1, 0, 0): 0.0,
                    (1, 0, 1): 0.0,
                    (1, 1, 0): 0.9,
                    (1, 1, 1): 0.4,
                },
            ),
        ]
    )
    policy = AgentPolicy.make(
        intentions,
        p_act=p_act,
        p_base=p_base,
        theta=theta,
        cause_modifiers={("age", 1): old_factor},
    )
    return GraphSpecDocument(
        graph=graph,
        tagging=Tagging.make("practice", intentions),
        policy=policy,
        levers=dict(SPORT_LEVERS),
    )

import pytest
from hypothesis import given, settings, strategies as st

from teleo import (
    AgentPolicy,
    HypothesisError,
    PolicyError,
    Regime,
    RegimeError,
    agent_action_rate,
    bind_agent,
    joint_enumerate,
    servable,
)
from teleo.models import sport_lab_graph, stove_water


@pytest.fixture(scope="module")
def lab():
    return sport_lab_graph()


class TestPolicyValidation:
    def test_defaults(self):
        p = AgentPolicy.make([("water", 1)])
        assert (p.p_act, p.p_base, p.theta) == (0.8, 0.05, 0.1)

    def test_empty_intentions_rejected(self):
        with pytest.raises(PolicyError):
            AgentPolicy.make([])

    def test_p_base_must_be_below_p_act(self):
        with pytest.raises(PolicyError):
            AgentPolicy.make([("x", 1)], p_act=0.3, p_base=0.5)

    def test_probabilities_in_range(self):
        with pytest.raises(PolicyError):
            AgentPolicy.make([("x", 1)], p_act=1.2)

    def test_negative_theta_rejected(self):
        with pytest.raises(PolicyError):
            AgentPolicy.make([("x", 1)], theta=-0.1)

    def test_modifier_value_binary(self):
        with pytest.raises(PolicyError):
            AgentPolicy.make([("x", 1)], cause_modifiers={("age", 2): 0.5})

    def test_modifier_factor_nonnegative(self):
        with pytest.raises(PolicyError):
            AgentPolicy.make([("x", 1)], cause_modifiers={("age", 1): -1.0})

    def test_with_intentions_keeps_parameters(self):
        p = AgentPolicy.make([("a", 1)], p_act=0.6)
        q = p.with_intentions([("b", 1)])
        assert q.p_act == 0.6
        assert q.intention_set == frozenset({("b", 1)})


class TestServability:
    def test_stove_margin(self):
        report = servable(stove_water(), "stove", [("water", 1)], theta=0.1)
        assert report.servable
        assert report.margin_of("water") == pytest.approx(1.0)

    def test_margin_is_do_difference(self, lab):
        # P(win|do(practice=1)) - P(win|do(practice=0)) = 0.7 - 0.0
        report = servable(lab, "practice", [("win_medals", 1)], theta=0.1)
        assert report.margin_of("win_medals") == pytest.approx(0.7)

    def test_not_servable_under_neutralizing_regime(self, lab):
        regime = Regime.interference({"enroll": 0})
        report = servable(lab, "practice", [("win_medals", 1)], theta=0.1, regime=regime)
        assert not report.servable
        assert report.margin_of("win_medals") == pytest.approx(0.0)

    def test_target_zero_margin(self, lab):
        # intending live_longer=0 is served by NOT practicing, margin <= 0
        report = servable(lab, "practice", [("live_longer", 0)], theta=0.1)
        assert not report.servable

    def test_intent_must_be_descendant(self, lab):
        with pytest.raises(HypothesisError):
            servable(lab, "practice", [("smoke", 1)], theta=0.1)

    def test_regime_may_not_clamp_action(self, lab):
        with pytest.raises(RegimeError):
            servable(lab, "practice", [("be_fit", 1)], theta=0.1, regime=Regime.do("practice", 1))

    def test_conjunction_needs_every_intent(self, lab):
        regime = Regime.interference({"enroll": 0})
        both = servable(lab, "practice", [("be_fit", 1), ("win_medals", 1)], theta=0.1, regime=regime)
        assert not both.servable
        alone = servable(lab, "practice", [("be_fit", 1)], theta=0.1, regime=regime)
        assert alone.servable


class TestBoundModel:
    def test_action_rate_is_p_act_when_servable(self, lab):
        model = bind_agent(lab, "practice", AgentPolicy.make([("be_fit", 1)]))
        assert agent_action_rate(model, Regime.natural()) == pytest.approx(0.8)

    def test_action_rate_collapses_when_not_servable(self, lab):
        model = bind_agent(lab, "practice", AgentPolicy.make([("be_fit", 1)]))
        regime = Regime.interference({"protein_diet": 0})
        assert agent_action_rate(model, regime) == pytest.approx(0.05)

    def test_servability_depends_on_regime_not_parent_values(self, lab):
        # smoke=1 blocks live_longer downstream of be_fit but leaves be_fit intact
        model = bind_agent(lab, "practice", AgentPolicy.make([("be_fit", 1)]))
        assert agent_action_rate(model, Regime.interference({"smoke": 1})) == pytest.approx(0.8)

    def test_action_must_be_declared(self, lab):
        with pytest.raises(Exception):
            bind_agent(lab, "ghost", AgentPolicy.make([("be_fit", 1)]))

    def test_intents_checked_at_binding(self, lab):
        with pytest.raises(HypothesisError):
            bind_agent(lab, "practice", AgentPolicy.make([("enroll", 1)]))

    def test_modifier_parent_must_be_action_parent(self, lab):
        policy = AgentPolicy.make([("be_fit", 1)], cause_modifiers={("age", 1): 0.5})
        with pytest.raises(PolicyError):
            bind_agent(lab, "practice", policy)

    def test_bound_graph_keeps_other_mechanisms(self, lab):
        model = bind_agent(lab, "practice", AgentPolicy.make([("be_fit", 1)]))
        g = model.bound_graph(Regime.natural())
        assert g.variable("be_fit").cpt == lab.variable("be_fit").cpt

    def test_downstream_marginal_reflects_agent(self, lab):
        model = bind_agent(lab, "practice", AgentPolicy.make([("be_fit", 1)]))
        table = joint_enumerate(model.bound_graph(Regime.natural()))
        # be_fit = practice AND protein_diet in distribution: 0.8 * 0.9
        assert table.marginal("be_fit") == pytest.approx(0.72)


class TestCauseModifiers:
    def make_aged(self):
        from teleo.models import sport_lab_confounded

        return sport_lab_confounded()

    def test_rates_split_by_age(self):
        doc = self.make_aged()
        model = doc.bind()
        g = model.bound_graph(Regime.natural())
        table = joint_enumerate(g)
        young = table.prob_of({"practice": 1, "age": 0}) / table.prob_of({"age": 0})
        old = table.prob_of({"practice": 1, "age": 1}) / table.prob_of({"age": 1})
        assert young == pytest.approx(0.8)
        assert old == pytest.approx(0.4)

    def test_base_rate_unmodified(self):
        doc = self.make_aged()
        model = doc.bind()
        regime = Regime.interference({"protein_diet": 0})
        table = joint_enumerate(model.bound_graph(regime))
        young = table.prob_of({"practice": 1, "age": 0}) / table.prob_of({"age": 0})
        old = table.prob_of({"practice": 1, "age": 1}) / table.prob_of({"age": 1})
        assert young == pytest.approx(0.05)
        assert old == pytest.approx(0.05)

    def test_factor_clamped_to_one(self):
        from teleo import CausalGraph, Variable

        g = CausalGraph.make(
            [
                Variable.make("boost", (), 0.5),
                Variable.make("act", ("boost",), {0: 0.5, 1: 0.5}),
                Variable.make("goal", ("act",), {0: 0.0, 1: 1.0}),
            ]
        )
        policy = AgentPolicy.make([("goal", 1)], p_act=0.8, cause_modifiers={("boost", 1): 2.0})
        model = bind_agent(g, "act", policy)
        table = joint_enumerate(model.bound_graph(Regime.natural()))
        boosted = table.prob_of({"act": 1, "boost": 1}) / table.prob_of({"boost": 1})
        assert boosted == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(
    theta_low=st.floats(0.0, 0.5),
    theta_high=st.floats(0.5, 1.0),
)
def test_servable_antitone_in_theta(theta_low, theta_high):
    g = sport_lab_graph()
    hi = servable(g, "practice", [("win_medals", 1)], theta=theta_high)
    lo = servable(g, "practice", [("win_medals", 1)], theta=theta_low)
    if hi.servable:
        assert lo.servable

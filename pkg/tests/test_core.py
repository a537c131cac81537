from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cstn.core import (
    FALSE,
    TRUE,
    UNDETERMINED,
    Cstn,
    CstnError,
    Label,
    LabeledConstraint,
    PartialScenario,
    Scenario,
    Schedule,
    WD1Violation,
    all_scenarios,
    label_holds,
    project,
    schedule_satisfies,
    validate_wd1,
)
from cstn.qbf import Q3SatFormula
from cstn.reduction import reduce
from cstn.stn import Stn


def net_of(tasks, cons=(), labels=None, obs=None, w=1, W=None):
    obs = obs or {}
    return Cstn(frozenset(tasks), frozenset(obs), tuple(cons), labels or {}, obs, w=w, W=W)


class TestLabels:
    def test_total_scenario(self):
        s = Scenario({"p": 1, "q": 0})
        assert label_holds(s, Label.of("p", "!q")) == TRUE
        assert label_holds(s, Label.of("q")) == FALSE

    def test_lambda_always_true(self):
        assert label_holds(Scenario({"p": 0}), Label()) == TRUE
        assert label_holds(PartialScenario(), Label()) == TRUE

    def test_partial_undetermined(self):
        assert label_holds(PartialScenario({"p": 1}), Label.of("p", "q")) == UNDETERMINED
        assert label_holds(PartialScenario({"p": 0}), Label.of("p", "q")) == FALSE

    def test_canonical_order(self):
        assert Label.of("q", "!p") == Label.of("!p", "q")
        assert str(Label.of("q", "!p")) == "!p,q"

    def test_complementary_rejected(self):
        with pytest.raises(CstnError):
            Label.of("p", "!p")
        with pytest.raises(CstnError):
            Label.of("p") & Label.of("!p")

    @given(
        lits=st.dictionaries(st.sampled_from("pqrs"), st.booleans()),
        assign=st.dictionaries(st.sampled_from("pqrs"), st.integers(0, 1)),
    )
    def test_monotone_on_completions(self, lits, assign):
        label = Label(tuple(lits.items()))
        h = PartialScenario(assign)
        verdict = label_holds(h, label)
        if verdict != UNDETERMINED:
            for s in h.completions("pqrs"):
                assert label_holds(s, label) == verdict


class TestCstn:
    def test_obs_map_must_cover_props(self):
        with pytest.raises(CstnError):
            Cstn(frozenset({"A"}), frozenset({"p"}), (), {}, {})

    def test_obs_map_injective(self):
        with pytest.raises(CstnError):
            net_of({"A"}, obs={"p": "A", "q": "A"})

    def test_wd1_violation_rejected(self):
        bad = LabeledConstraint("X", "Y", 0, Label())
        with pytest.raises(WD1Violation) as info:
            net_of({"X", "Y", "O"}, [bad], labels={"X": Label.of("p")}, obs={"p": "O"})
        assert info.value.offending == [bad]

    def test_wd1_ok_when_labels_implied(self):
        c = LabeledConstraint("X", "Y", 0, Label.of("p", "q"))
        net = net_of({"X", "Y", "O", "Q"}, [c], labels={"X": Label.of("p")}, obs={"p": "O", "q": "Q"})
        assert validate_wd1(net) == []

    def test_bound_exceeds_W(self):
        with pytest.raises(CstnError):
            net_of({"A", "B"}, [LabeledConstraint("A", "B", 3)], W=2)

    def test_default_W(self):
        assert net_of({"A"}).W == 1
        assert net_of({"A", "B"}, [LabeledConstraint("A", "B", -3)]).W == 3

    def test_reduction_satisfies_wd1(self):
        inst = reduce(Q3SatFormula(2, ((1, -2, 3), (-4, 4, 1))))
        assert validate_wd1(inst.cstn) == []


class TestProject:
    def test_lambda_tasks_all_present(self):
        net = net_of({"A", "B", "O"}, obs={"p": "O"})
        for s in net.scenarios():
            assert project(net, s).tasks == net.tasks

    def test_reduction_projection_keeps_every_task(self):
        inst = reduce(Q3SatFormula(1, ((1, 2, 2),)))
        for s in inst.cstn.scenarios():
            assert project(inst.cstn, s).tasks == inst.cstn.tasks

    def test_falsified_constraint_dropped(self):
        c = LabeledConstraint("A", "B", 0, Label.of("p"))
        net = net_of({"A", "B", "O"}, [c], obs={"p": "O"})
        assert project(net, Scenario({"p": 0})).constraints == ()
        assert project(net, Scenario({"p": 1})).constraints == (("A", "B", 0),)

    def test_endpoints_inside_projection(self):
        c = LabeledConstraint("A", "B", 1, Label.of("p"))
        net = net_of({"A", "B", "O"}, [c], labels={"A": Label.of("p"), "B": Label.of("p")}, obs={"p": "O"})
        for s in net.scenarios():
            stn = project(net, s)
            for x, y, _ in stn.constraints:
                assert {x, y} <= stn.tasks

    def test_requires_total_scenario(self):
        net = net_of({"O"}, obs={"p": "O"})
        with pytest.raises(CstnError):
            project(net, Scenario({}))

    def test_deterministic(self):
        inst = reduce(Q3SatFormula(1, ((1, 2, -2),)))
        s = inst.cstn.scenarios()[5]
        assert project(inst.cstn, s) == project(inst.cstn, s)


class TestScheduleSatisfies:
    def test_equal_times_meet_zero(self):
        stn = Stn({"A", "B"}, [("A", "B", 0)])
        assert schedule_satisfies(Schedule({"A": 3, "B": 3}), stn) is None

    def test_violation_reported(self):
        stn = Stn({"A", "B"}, [("A", "B", 1)])
        assert schedule_satisfies(Schedule({"A": 1, "B": 3}), stn) == ("A", "B", 1)

    def test_missing_task(self):
        stn = Stn({"A", "B"}, [("A", "B", 1)])
        with pytest.raises(CstnError):
            schedule_satisfies(Schedule({"A": 1}), stn)

    def test_exact_rational_units(self):
        # 3 steps of 1/3 is exactly one unit
        stn = Stn({"A", "B"}, [("A", "B", 1)], Fraction(1))
        assert schedule_satisfies(Schedule({"A": 0, "B": 3}, Fraction(1, 3)), stn) is None
        assert schedule_satisfies(Schedule({"A": 0, "B": 4}, Fraction(1, 3)), stn) is not None


def test_all_scenarios_canonical_order():
    scen = all_scenarios(["q", "p"])
    assert [tuple(s.items_sorted()) for s in scen] == [
        (("p", 0), ("q", 0)),
        (("p", 0), ("q", 1)),
        (("p", 1), ("q", 0)),
        (("p", 1), ("q", 1)),
    ]


@given(st.dictionaries(st.sampled_from("pqr"), st.integers(0, 1), min_size=3), st.sampled_from("pqr"),
       st.integers(0, 1))
def test_flip_involution(assign, p, v):
    s = Scenario(assign)
    s2 = s.set(p, v)
    if v == s[p]:
        assert s2 == s
    else:
        assert s2.set(p, 1 - v) == s

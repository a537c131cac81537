import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from cstn.core import schedule_satisfies
from cstn.stn import Stn, all_pairs_closure, stn_consistent, stn_solve


def brute_consistent(stn, span=8):
    """Search integer schedules in a window; exact for integer bounds with small |k|."""
    tasks = sorted(stn.tasks)
    for times in itertools.product(range(span), repeat=len(tasks)):
        d = dict(zip(tasks, times))
        if all(d[y] - d[x] <= k for x, y, k in stn.constraints):
            return True
    return False


def test_empty():
    assert stn_consistent(Stn(set(), []))
    sol = stn_solve(Stn({"A"}, []))
    assert sol is not None and set(sol.times) == {"A"}


def test_two_cycle_negative():
    stn = Stn({"A", "B"}, [("B", "A", -1), ("A", "B", -1)])
    assert not stn_consistent(stn)
    assert stn_solve(stn) is None


def test_chain_with_zero_cycle():
    # X2 >= X1 + 1, X3 >= X2 + 1, X3 - X1 <= 2
    stn = Stn({"X1", "X2", "X3"}, [("X2", "X1", -1), ("X3", "X2", -1), ("X1", "X3", 2)])
    assert brute_consistent(stn)
    assert stn_consistent(stn)
    sol = stn_solve(stn)
    assert schedule_satisfies(sol, stn) is None
    assert sol["X3"] - sol["X1"] == 2


def test_closure_agrees():
    stn = Stn({"X1", "X2", "X3"}, [("X2", "X1", -1), ("X3", "X2", -1), ("X1", "X3", 2)])
    d = all_pairs_closure(stn)
    assert d["X1", "X3"] == 2 and d["X3", "X1"] == -2
    assert all_pairs_closure(Stn({"A", "B"}, [("B", "A", -1), ("A", "B", -1)])) is None


stns = st.lists(
    st.tuples(st.sampled_from("ABCD"), st.sampled_from("ABCD"), st.integers(-2, 2)).filter(lambda c: c[0] != c[1]),
    max_size=6,
).map(lambda cons: Stn(set("ABCD"), cons))


@settings(max_examples=150, deadline=None)
@given(stns)
def test_against_brute_force(stn):
    # |k| <= 2 on 4 nodes: any consistent system has a solution of span <= 6
    assert stn_consistent(stn) == brute_consistent(stn)


@settings(max_examples=150, deadline=None)
@given(stns)
def test_solve_iff_consistent(stn):
    sol = stn_solve(stn)
    assert (sol is not None) == stn_consistent(stn)
    if sol is not None:
        assert schedule_satisfies(sol, stn) is None
    assert (all_pairs_closure(stn) is not None) == stn_consistent(stn)


@settings(max_examples=100, deadline=None)
@given(stns, st.integers(1, 5))
def test_scaling_invariance(stn, factor):
    scaled = Stn(stn.tasks, [(x, y, k * factor) for x, y, k in stn.constraints])
    assert stn_consistent(scaled) == stn_consistent(stn)

"""Acceptance criteria 1-9.

Each test records one PASS/FAIL line; conftest prints them in the terminal
summary.  Running this file directly prints them as well.
"""

import itertools
import random
import time
from fractions import Fraction
from functools import lru_cache

from cstn.core import Cstn, Label, LabeledConstraint, validate_wd1
from cstn.qbf import (
    Q3SatFormula,
    all_existential_tables,
    qbf_eval,
    qbf_extract_existential,
    qbf_extract_universal,
)
from cstn.reduction import adversary, reduce, witness_strategy
from cstn.solver import NotControllable, SearchStats, dc_bounded, dc_extract, discretize
from cstn.strategy import check_single_flip, tree_to_table, verify_dynamic, verify_viable

from gadgets import activation_violations, early_choice_violations
from oracles import micro_grid, oracle_dc, random_micro

RESULTS = {}

N2_RANDOM = 120
MICRO_COUNT = 220
MICRO_POINTS = (8, 10, 12)


def report(no, ok, detail):
    line = f"criterion {no}: {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS[no] = line
    print(line)
    assert ok, line


# -- pools -------------------------------------------------------------------


@lru_cache(maxsize=None)
def formula_pool():
    """Every n=1 formula with m <= 3 (clauses as literal multisets), plus random n=2."""
    lits = (1, -1, 2, -2)
    clauses = list(itertools.combinations_with_replacement(lits, 3))
    pool = []
    for m in range(4):
        for combo in itertools.combinations_with_replacement(clauses, m):
            pool.append(Q3SatFormula(1, combo))
    rng = random.Random(2024)
    for _ in range(N2_RANDOM):
        m = rng.randint(1, 8)
        lit = lambda: rng.choice((1, -1)) * rng.randint(1, 4)
        pool.append(Q3SatFormula(2, tuple((lit(), lit(), lit()) for _ in range(m))))
    return pool


@lru_cache(maxsize=None)
def witness_table(n, f):
    # the witness only depends on n and f, not on the clauses
    phi = Q3SatFormula(n, ())
    return tree_to_table(reduce(phi).cstn, witness_strategy(phi, f))


def hand_micro():
    """Networks whose projections are all consistent, controllable or not depending on timing."""
    obs = {"p": "O"}
    tasks = frozenset({"A", "O"})
    yield Cstn(tasks, frozenset(obs), (
        LabeledConstraint("A", "O", -1, Label.of("p")),
        LabeledConstraint("O", "A", -1, Label.of("!p")),
    ), {}, obs)
    yield Cstn(tasks, frozenset(obs), (
        LabeledConstraint("A", "O", -1),
        LabeledConstraint("O", "A", 1, Label.of("p")),
        LabeledConstraint("A", "O", -2, Label.of("!p")),
    ), {}, obs, W=2)


@lru_cache(maxsize=None)
def micro_pool():
    rng = random.Random(77)
    out = [(net, discretize(net), micro_grid(discretize(net), 12)) for net in hand_micro()]
    for _ in range(MICRO_COUNT):
        net = random_micro(rng, max_cons=5)
        params = discretize(net)
        out.append((net, params, micro_grid(params, rng.choice(MICRO_POINTS))))
    return out


@lru_cache(maxsize=None)
def micro_results():
    rows = []
    for net, params, grid in micro_pool():
        on, off = SearchStats(), SearchStats()
        got = dc_bounded(net, grid, params, stats=on)
        got_off = dc_bounded(net, grid, params, prune=False, stats=off)
        want = oracle_dc(net, grid, params.mu) is not None
        rows.append((net, params, grid, got, got_off, want, on.max_depth, off.max_depth))
    return rows


@lru_cache(maxsize=None)
def extracted_tables():
    out, bad = [], []
    for net, params, grid, got, *_ in micro_results():
        if not got:
            continue
        try:
            sigma = tree_to_table(net, dc_extract(net, grid, params))
        except NotControllable:
            bad.append(net)
            continue
        if verify_viable(net, sigma) is None and verify_dynamic(net, sigma) is None:
            out.append((net, sigma))
        else:
            bad.append(net)
    return out, bad


# -- criteria ----------------------------------------------------------------


def test_criterion_1_reduction_structure():
    rng = random.Random(1)
    failures, worst, count = [], 0.0, 0
    for n in range(1, 6):
        for _ in range(20):
            lit = lambda: rng.choice((1, -1)) * rng.randint(1, 2 * n)
            phi = Q3SatFormula(n, tuple((lit(), lit(), lit()) for _ in range(rng.randint(0, 10))))
            t0 = time.perf_counter()
            net = reduce(phi).cstn
            worst = max(worst, time.perf_counter() - t0)
            count += 1
            live = sum(1 for j in range(phi.m) if not phi.is_tautology(j))
            ok = (
                len(net.tasks) == 7 * n + 2
                and len(net.props) == 4 * n
                and len(net.constraints) == 7 * n + 1 + live
                and all(lab == Label() for lab in net.task_labels.values())
                and validate_wd1(net) == []
                and net.w == 1 and net.W == n + 4
                and all(abs(k.bound_k) <= n + 4 for k in net.constraints)
            )
            if not ok:
                failures.append(phi)
    report(1, not failures and worst < 1.0, f"{count} formulas, {len(failures)} mismatches, slowest {worst:.4f}s")


def test_criterion_2_true_formulas_controllable():
    checked, failures = 0, []
    for phi in formula_pool():
        if not qbf_eval(phi):
            continue
        f = qbf_extract_existential(phi)
        net = reduce(phi).cstn
        sigma = witness_table(phi.n, f)
        checked += 1
        if verify_viable(net, sigma) is not None or verify_dynamic(net, sigma) is not None:
            failures.append(phi)
        elif early_choice_violations(phi, sigma) or activation_violations(phi, f, sigma):
            failures.append(phi)
    n1 = sum(1 for phi in formula_pool() if phi.n == 1)
    report(2, not failures and checked > 0,
           f"{checked} true formulas ({n1} n=1 exhaustive, {N2_RANDOM} n=2 random in pool), {len(failures)} failures")


def test_criterion_3_false_formulas_defeated():
    checked, failures = 0, []
    for phi in formula_pool():
        if qbf_eval(phi):
            continue
        g = qbf_extract_universal(phi)
        net = reduce(phi).cstn
        for f in all_existential_tables(phi.n):
            checked += 1
            if adversary(phi, g, witness_table(phi.n, f), net) is None:
                failures.append((phi, f))
    report(3, not failures and checked > 0, f"{checked} (formula, table) pairs, {len(failures)} survived")


def test_criterion_4_solver_matches_oracle():
    rows = micro_results()
    mism = [r for r in rows if r[3] != r[5]]
    dcn = sum(1 for r in rows if r[5])
    report(4, not mism and len(rows) >= 200,
           f"{len(rows)} micro instances ({dcn} controllable), {len(mism)} disagreements")


def test_criterion_5_extraction_roundtrip():
    good, bad = extracted_tables()
    report(5, not bad, f"{len(good)} extracted strategies viable and dynamic, {len(bad)} failures")


def test_criterion_6_discretization_constants():
    combos = []
    for P, T, w, W in [
        (0, 1, 1, 1), (0, 3, 1, 2), (1, 1, 1, 1), (1, 2, 1, 1), (1, 3, 2, 5),
        (2, 2, Fraction(1, 2), 3), (2, 4, 1, 1), (3, 3, Fraction(3, 7), 2), (0, 5, 10, 4), (1, 5, 1, 9),
        (2, 5, Fraction(5, 3), 1), (3, 4, 1, 6), (2, 3, 7, 7), (1, 4, Fraction(1, 9), 3), (3, 5, 2, 2),
        (0, 2, Fraction(2, 3), 8), (2, 6, 1, 3), (3, 6, 4, 1), (1, 6, Fraction(7, 2), 5),
    ]:
        tasks = [f"T{i}" for i in range(T)]
        props = [f"p{i}" for i in range(P)]
        net = Cstn(frozenset(tasks), frozenset(props), (), {}, dict(zip(props, tasks)), w=w, W=W)
        combos.append((net, P, T, Fraction(w), W))
    red = reduce(Q3SatFormula(1, ((1, 1, 1),))).cstn
    combos.append((red, 4, 9, Fraction(1), 5))
    bad = []
    for net, P, T, w, W in combos:
        K = (1 << P) * T
        want = (K, w / K, 2 * K * K * W)
        p = discretize(net)
        if (p.K, p.mu, p.M) != want:
            bad.append((P, T, w, W))
    p = discretize(red)
    ok = not bad and len(combos) >= 20 and (p.K, p.M, p.mu) == (144, 207360, Fraction(1, 144))
    report(6, ok, f"{len(combos)} combinations, {len(bad)} mismatches, reduction n=1 K={p.K} M={p.M}")


def test_criterion_7_depth_and_pruning():
    rows = micro_results()
    deep = [r for r in rows if max(r[6], r[7]) > len(r[0].tasks)]
    diff = [r for r in rows if r[3] != r[4]]
    report(7, not deep and not diff,
           f"{len(rows)} instances, {len(deep)} deeper than |T|, {len(diff)} pruning disagreements")


def test_criterion_8_single_flip():
    strategies = []
    seen = set()
    for phi in formula_pool():
        if qbf_eval(phi):
            f = qbf_extract_existential(phi)
            if (phi.n, f) not in seen:
                seen.add((phi.n, f))
                strategies.append((reduce(phi).cstn, witness_table(phi.n, f)))
    strategies += extracted_tables()[0]
    calls, bad = 0, []
    for net, sigma in strategies:
        for s in net.scenarios():
            for p in sorted(net.props):
                for v in (0, 1):
                    calls += 1
                    if check_single_flip(net, sigma, s, p, v) is not None:
                        bad.append((net, s, p, v))
    report(8, not bad, f"{len(strategies)} dynamic strategies, {calls} flips, {len(bad)} violations")


def test_criterion_9_coarse_grid():
    phi = Q3SatFormula(1, ((1, 1, 1),))
    net = reduce(phi).cstn
    params = discretize(net)
    inf = (phi.n + 4) * (phi.n + 2)
    grid = [params.K * j for j in range(1, inf + 1)]
    stats = SearchStats()
    ok = dc_bounded(net, grid, params, stats=stats)
    report(9, ok, f"grid of {len(grid)} points up to {grid[-1]}, {stats.nodes} nodes, depth {stats.max_depth}")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass

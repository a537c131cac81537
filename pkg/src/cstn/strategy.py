"""Execution strategies and their definitional checks.

Two representations are used.  A :class:`TableStrategy` lists one schedule per
scenario and is what the verifiers consume.  A :class:`TreeStrategy` is a
decision tree of actions branching on observation outcomes; it is what the
solver and the reduction produce, and it converts one way into a table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Union

from .core import CstnError, PartialScenario, Schedule, Scenario, project, schedule_satisfies


class StrategyError(CstnError):
    pass


# -- representations ---------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    pass


LEAF = Leaf()


@dataclass(frozen=True)
class Node:
    k: int
    tasks: frozenset
    # outcome over the propositions observed by ``tasks`` -> subtree
    children: Mapping[PartialScenario, Union["Node", Leaf]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "tasks", frozenset(self.tasks))
        object.__setattr__(self, "children", dict(self.children))

    __hash__ = None


@dataclass(frozen=True)
class TreeStrategy:
    root: Union[Node, Leaf]
    unit: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "unit", Fraction(self.unit))

    __hash__ = None

    def nodes(self):
        stack = [self.root]
        while stack:
            n = stack.pop()
            if isinstance(n, Node):
                yield n
                stack.extend(n.children.values())


@dataclass
class TableStrategy:
    rows: dict  # Scenario -> {task: grid index}
    unit: Fraction = Fraction(1)

    def __post_init__(self):
        self.rows = {Scenario(s): dict(r) for s, r in self.rows.items()}
        self.unit = Fraction(self.unit)

    def schedule(self, s) -> Schedule:
        return Schedule(self.rows[s], self.unit)

    def time(self, s, task) -> Optional[int]:
        return self.rows[s].get(task)


def observed_outcomes(props) -> list:
    """Every assignment of ``props`` in canonical order."""
    return list(PartialScenario().completions(props))


def check_tree(net, tree: TreeStrategy) -> None:
    """Raise :class:`StrategyError` unless the tree is structurally valid for ``net``."""
    observer = net.observer_of()

    def walk(node, last_k, used):
        if isinstance(node, Leaf):
            return
        if not node.tasks:
            raise StrategyError("action with no tasks")
        if not node.tasks <= net.tasks:
            raise StrategyError(f"unknown tasks {sorted(node.tasks - net.tasks)}")
        if node.k <= last_k:
            raise StrategyError(f"grid index {node.k} does not increase past {last_k}")
        if node.tasks & used:
            raise StrategyError(f"tasks {sorted(node.tasks & used)} executed twice")
        pnext = sorted(observer[t] for t in node.tasks if t in observer)
        want = set(observed_outcomes(pnext))
        if set(node.children) != want:
            raise StrategyError(f"children of node at {node.k} do not cover outcomes of {pnext}")
        for child in node.children.values():
            walk(child, node.k, used | node.tasks)

    walk(tree.root, float("-inf"), frozenset())


def tree_to_table(net, tree: TreeStrategy) -> TableStrategy:
    check_tree(net, tree)
    observer = net.observer_of()
    rows = {}
    for s in net.scenarios():
        row = {}
        node = tree.root
        while isinstance(node, Node):
            for t in node.tasks:
                row[t] = node.k
            pnext = [observer[t] for t in node.tasks if t in observer]
            node = node.children[PartialScenario({p: s[p] for p in pnext})]
        want = net.active_tasks(s)
        if set(row) != want:
            missing = sorted(want - set(row))
            extra = sorted(set(row) - want)
            raise StrategyError(f"tree incomplete under {s}: missing {missing}, not allowed {extra}")
        rows[s] = row
    return TableStrategy(rows, tree.unit)


def _check_total(net, sigma: TableStrategy):
    for s in net.scenarios():
        if s not in sigma.rows:
            raise StrategyError(f"no schedule for scenario {s}")
        if set(sigma.rows[s]) != net.active_tasks(s):
            raise StrategyError(f"schedule domain under {s} differs from the projected tasks")


# -- verification ------------------------------------------------------------


def verify_viable(net, sigma: TableStrategy):
    """``None`` if viable, else ``(scenario, (X, Y, k))`` for the first failure."""
    _check_total(net, sigma)
    for s in net.scenarios():
        bad = schedule_satisfies(sigma.schedule(s), project(net, s))
        if bad is not None:
            return s, bad
    return None


def history(net, sigma: TableStrategy, t, s) -> PartialScenario:
    """Propositions observed strictly before ``t`` in scenario ``s``."""
    row = sigma.rows[s]
    return PartialScenario(
        {p: s[p] for p, task in net.obs_map.items() if task in row and row[task] < t}
    )


def verify_dynamic(net, sigma: TableStrategy):
    """``None`` if dynamic, else ``(s, s2, X, t)`` with equal histories at ``t`` but X moved."""
    _check_total(net, sigma)
    scen = net.scenarios()
    obs_events = []
    for s in scen:
        row = sigma.rows[s]
        obs_events.append(
            [(row[task], p, s[p]) for p, task in sorted(net.obs_map.items()) if task in row]
        )

    groups = {}  # t -> (key per scenario, key -> [scenario index])

    def grouping(t):
        if t not in groups:
            keys = [frozenset((p, v) for tt, p, v in ev if tt < t) for ev in obs_events]
            by = {}
            for i, k in enumerate(keys):
                by.setdefault(k, []).append(i)
            groups[t] = (keys, by)
        return groups[t]

    checked = {}
    for i, s in enumerate(scen):
        row = sigma.rows[s]
        for X in sorted(row):
            t = row[X]
            keys, by = grouping(t)
            ck = (t, keys[i], X)
            if ck not in checked:
                checked[ck] = all(sigma.rows[scen[j]].get(X) == t for j in by[keys[i]])
            if not checked[ck]:
                for j in by[keys[i]]:
                    if sigma.rows[scen[j]].get(X) != t:
                        return s, scen[j], X, t
    return None


def check_single_flip(net, sigma: TableStrategy, s, p, v):
    """Check the single-flip consequences of dynamicity for ``s`` and ``s[v/p]``.

    Returns ``None`` or ``(property, t, task)``, ``property`` one of
    ``"history"``, ``"le"``, ``"eq"``, ``"observation"``.
    """
    s = Scenario(s)
    s2 = Scenario(s.set(p, v))
    r1, r2 = sigma.rows[s], sigma.rows[s2]
    obs_task = net.obs_map[p]
    limit = r1.get(obs_task)
    times = set(r1.values()) | set(r2.values())
    # Everything is piecewise constant between these points.
    cands = {u for u in times} | {u + 1 for u in times}
    if times:
        cands.add(min(times) - 1)
    if limit is not None:
        cands = {t for t in cands if t <= limit} | {limit}
    tasks = sorted(net.tasks)
    for t in sorted(cands):
        if history(net, sigma, t, s) != history(net, sigma, t, s2):
            return ("history", t, None)
        for X in tasks:
            a, b = r1.get(X), r2.get(X)
            if (a is not None and a <= t) != (b is not None and b <= t):
                return ("le", t, X)
            if (a == t) != (b == t):
                return ("eq", t, X)
    if r1.get(obs_task) != r2.get(obs_task):
        return ("observation", limit, obs_task)
    return None


def flip(s, p, v) -> Scenario:
    return Scenario(Scenario(s).set(p, v))


def table_to_tree(net, sigma: TableStrategy) -> TreeStrategy:
    """Rebuild the decision tree of a dynamic table by reading off next actions."""
    observer = net.observer_of()

    def build(scens, done, h):
        pending = [(s, {X: k for X, k in sigma.rows[s].items() if X not in done}) for s in scens]
        pending = [(s, r) for s, r in pending if r]
        if not pending:
            if any(sigma.rows[s].keys() != done for s in scens):
                raise StrategyError("strategy has no well-defined end")
            return LEAF
        if len(pending) != len(scens):
            raise StrategyError(f"some scenarios stop early under history {h}")
        k = min(min(r.values()) for _, r in pending)
        nxt = {X for X, kk in pending[0][1].items() if kk == k}
        for s, r in pending:
            if {X for X, kk in r.items() if kk == k} != nxt:
                raise StrategyError(f"no well-defined next action at {k} under history {h}")
        pnext = sorted(observer[t] for t in nxt if t in observer)
        children = {}
        for o in observed_outcomes(pnext):
            sub = [s for s in scens if all(s[q] == o[q] for q in pnext)]
            children[o] = build(sub, done | nxt, h.union(o))
        return Node(k, frozenset(nxt), children)

    _check_total(net, sigma)
    return TreeStrategy(build(net.scenarios(), frozenset(), PartialScenario()), sigma.unit)


def relabel_table(sigma: TableStrategy, task_map: Mapping, prop_map: Mapping) -> TableStrategy:
    rows = {}
    for s, r in sigma.rows.items():
        s2 = Scenario({prop_map[p]: v for p, v in s.items()})
        rows[s2] = {task_map[X]: k for X, k in r.items()}
    return TableStrategy(rows, sigma.unit)

"""Q3SAT -> CSTN hardness construction, its witness strategy and its adversary.

For a formula with ``n`` quantifier pairs the network has one gadget per
pair.  Gadget ``i`` holds tasks ``A{i} B{i} C{i}_0 C{i}_1 D{i} X{i} Y{i}``
and propositions ``x{i} y{i} c{i}_0 c{i}_1``; ``A{n+1}`` and ``B{n+1}``
close the chain and carry one clause constraint per non-tautological clause.
All task labels are empty, the unit is 1 and every bound is at most n+4.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import Cstn, Label, LabeledConstraint, Scenario, project, schedule_satisfies
from .qbf import ExistentialStrategy, Q3SatFormula, UniversalStrategy, var_name
from .strategy import LEAF, Node, TableStrategy, TreeStrategy, observed_outcomes


def A(i): return f"A{i}"
def B(i): return f"B{i}"
def C(i, h): return f"C{i}_{h}"
def D(i): return f"D{i}"
def X(i): return f"X{i}"
def Y(i): return f"Y{i}"
def x(i): return f"x{i}"
def y(i): return f"y{i}"
def c(i, h): return f"c{i}_{h}"


@dataclass(frozen=True)
class Gadget:
    gadget: Optional[int]  # None for the closing clause constraints
    role: str  # activation, D-early, D-late, X-delay, Y-delay, chain, propagate-0, propagate-1, clause
    clause: Optional[int] = None

    def __str__(self):
        where = "closing" if self.gadget is None else f"gadget {self.gadget}"
        tail = f" {self.clause + 1}" if self.clause is not None else ""
        return f"{where} {self.role}{tail}"


@dataclass(frozen=True)
class ReductionInstance:
    formula: Q3SatFormula
    cstn: Cstn
    annotations: tuple  # Gadget per constraint, aligned with cstn.constraints
    dropped_clauses: tuple  # indices of tautological clauses without a constraint

    __hash__ = None

    @property
    def n(self):
        return self.formula.n

    @property
    def infinity(self) -> int:
        n = self.formula.n
        return (n + 4) * (n + 2)

    def task_names(self) -> list:
        return reduce_task_names(self.formula.n)

    def graph(self) -> dict:
        """Node/edge lists for drawing; edge ``N -> M`` with weight d means ``M <= N + d``."""
        edges = []
        for con, tag in zip(self.cstn.constraints, self.annotations):
            edges.append({
                "from": con.source,
                "to": con.target,
                "weight": con.bound_k,
                "label": "" if con.label.is_empty() else str(con.label),
                "gadget": tag.gadget,
                "role": tag.role,
                "clause": None if tag.clause is None else tag.clause + 1,
            })
        observer = self.cstn.observer_of()
        nodes = [{"id": t, "observes": observer.get(t)} for t in sorted(self.cstn.tasks)]
        return {"nodes": nodes, "edges": edges}


def _literal(lit: int):
    # proposition name and polarity of the literal's negation
    return var_name(lit), lit < 0


def reduce(phi: Q3SatFormula) -> ReductionInstance:
    n = phi.n
    tasks = set()
    props = set()
    obs = {}
    for i in range(1, n + 1):
        tasks |= {A(i), B(i), C(i, 0), C(i, 1), D(i), X(i), Y(i)}
        props |= {x(i), y(i), c(i, 0), c(i, 1)}
        obs.update({x(i): X(i), y(i): Y(i), c(i, 0): C(i, 0), c(i, 1): C(i, 1)})
    tasks |= {A(n + 1), B(n + 1)}

    cons, tags = [], []

    def le(src, dst, k, label, tag):  # dst - src <= k
        cons.append(LabeledConstraint(src, dst, k, label))
        tags.append(tag)

    le(A(1), B(1), 0, Label(), Gadget(1, "activation"))
    for i in range(1, n + 1):
        both = Label(((c(i, 0), True), (c(i, 1), True)))
        neither = Label(((c(i, 0), False), (c(i, 1), False)))
        le(B(i), D(i), 1, both, Gadget(i, "D-early"))
        le(D(i), A(i), -(n + 2), neither, Gadget(i, "D-late"))
        le(X(i), A(i), -(n + 2), Label(), Gadget(i, "X-delay"))
        le(Y(i), X(i), -1, Label(), Gadget(i, "Y-delay"))
        le(A(i + 1), Y(i), -1, Label(), Gadget(i, "chain"))
        le(C(i, 0), B(i + 1), n + 4, Label(((x(i), False),)), Gadget(i, "propagate-0"))
        le(C(i, 1), B(i + 1), n + 4, Label(((x(i), True),)), Gadget(i, "propagate-1"))
    dropped = []
    for j, clause in enumerate(phi.clauses):
        if phi.is_tautology(j):
            dropped.append(j)
            continue
        # repeated literals collapse; the label negates every literal
        lits = {_literal(l) for l in clause}
        le(B(n + 1), A(n + 1), -(n + 1), Label(tuple(lits)), Gadget(None, "clause", j))

    net = Cstn(tasks, props, tuple(cons), {}, obs, w=1, W=n + 4)
    return ReductionInstance(phi, net, tuple(tags), tuple(dropped))


# -- witness strategy for true formulas --------------------------------------


def witness_strategy(phi: Q3SatFormula, f: ExistentialStrategy) -> TreeStrategy:
    """Decision tree that nominates ``x_i = f_i(y_1..y_{i-1})`` gadget by gadget.

    Times are integers (unit 1).  Along the branch where nature keeps copying
    the nominated values, gadget ``i`` runs A, B and the nominated C at
    ``(n+4)i``, D one step later if the nominated C came out true, then X and
    Y at ``(n+4)i+n+2`` and ``+n+3``.  Once nature deviates, later B, C and D
    tasks are pushed to ``inf = (n+4)(n+2)``, where everything left runs.
    """
    n = phi.n
    if f.n != n:
        raise ValueError(f"strategy has {f.n} levels, formula has {n}")
    step = n + 4
    inf = step * (n + 2)
    all_tasks = set(reduce_task_names(n))

    def node(k, tasks, observed, rest):
        """``rest(o)`` builds the subtree for observation outcome ``o``."""
        obs_props = sorted(observed)
        return Node(k, frozenset(tasks), {o: rest(o) for o in observed_outcomes(obs_props)})

    def finish(done):
        left = all_tasks - done
        observed = [p for p, t in obs_of(n).items() if t in left]
        return node(inf, left, observed, lambda o: LEAF)

    def gadget(i, ys, done, deviated):
        """Subtree starting at time (n+4)i with gadget i's tasks."""
        base = step * i
        if i == n + 1:
            now = {A(i)} if deviated else {A(i), B(i)}
            return node(base, now, [], lambda o: finish(done | now))
        if deviated:
            now = {A(i)}
            return node(base, now, [], lambda o: x_step(i, ys, done | now, True, None))
        h = f.choose(i, ys)
        now = {A(i), B(i), C(i, h)}

        def after_c(o):
            d = done | now
            if o[c(i, h)] == 1:
                return node(base + 1, {D(i)}, [], lambda _: x_step(i, ys, d | {D(i)}, False, h))
            return x_step(i, ys, d, False, h)

        return node(base, now, [c(i, h)], after_c)

    def x_step(i, ys, done, deviated, h):
        t = step * i + n + 2

        def after_x(o):
            dev = deviated or o[x(i)] != h
            return node(t + 1, {Y(i)}, [y(i)],
                        lambda oy: gadget(i + 1, ys + [oy[y(i)]], done | {X(i), Y(i)}, dev))

        return node(t, {X(i)}, [x(i)], after_x)

    return TreeStrategy(gadget(1, [], frozenset(), False), 1)


def reduce_task_names(n):
    names = []
    for i in range(1, n + 1):
        names += [A(i), B(i), C(i, 0), C(i, 1), D(i), X(i), Y(i)]
    return names + [A(n + 1), B(n + 1)]


def obs_of(n):
    out = {}
    for i in range(1, n + 1):
        out.update({x(i): X(i), y(i): Y(i), c(i, 0): C(i, 0), c(i, 1): C(i, 1)})
    return out


def deviation_index(phi, f, s) -> int:
    """First gadget where nature did not copy the nomination, or n+1."""
    ys = []
    for i in range(1, phi.n + 1):
        if s[x(i)] != f.choose(i, ys):
            return i
        ys.append(s[y(i)])
    return phi.n + 1


# -- nature's counter-play for false formulas --------------------------------


def adversary(phi: Q3SatFormula, g: UniversalStrategy, sigma: TableStrategy, net: Cstn = None):
    """Walk nature through the gadgets against ``sigma`` following ``g``.

    At gadget ``I+1`` nature sets ``x`` to 0 when ``C_0`` runs before
    ``B + 1`` and to 1 otherwise, then answers ``y`` with ``g``.  Returns
    ``(scenario, (X, Y, k))`` for a constraint broken in the final scenario,
    or ``None`` if that scenario's schedule is feasible.
    """
    n = phi.n
    if net is None:
        net = reduce(phi).cstn
    unit = sigma.unit
    s = Scenario({p: 0 for p in net.props})
    xs = []
    for I in range(n):
        row = sigma.rows[s]
        # C_0 < B + 1 in real time
        h = 0 if row[C(I + 1, 0)] * unit < row[B(I + 1)] * unit + net.w else 1
        xs.append(h)
        s = Scenario(s.set(x(I + 1), h).set(y(I + 1), g.choose(I + 1, xs)))
    bad = schedule_satisfies(sigma.schedule(s), project(net, s))
    if bad is None:
        return None
    return s, bad


def scenario_values(phi: Q3SatFormula, s) -> list:
    """Prefix-order values of x1, y1, ... read off a CSTN scenario."""
    out = []
    for i in range(1, phi.n + 1):
        out += [s[x(i)], s[y(i)]]
    return out

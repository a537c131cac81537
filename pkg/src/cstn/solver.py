"""Dynamic-controllability decision for discrete CSTNs.

The search mirrors the characterisation of controllability from a
configuration: a terminal configuration is controllable iff its schedule is
feasible in every remaining scenario; otherwise some next action (a later
grid index plus a nonempty set of unexecuted tasks) must lead to controllable
configurations for every outcome of the observations it makes.  The
recursion keeps only the current path, so memory stays linear in the number
of tasks; every level schedules at least one task, which bounds the depth.

Internally tasks and propositions are bit positions in sorted-name order.
"""

from __future__ import annotations

import time
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Mapping, Optional, Sequence

from .core import CstnError, PartialScenario
from .strategy import LEAF, Node, TreeStrategy

TERMINAL_DC = "terminal-dc"
NOT_TERMINAL = "not-terminal"
TERMINAL_NOT_DC = "terminal-not-dc"


class NotControllable(Exception):
    pass


@dataclass(frozen=True)
class DiscretizationParams:
    w: Fraction
    W: int
    K: int
    mu: Fraction
    M: int


def discretize(net) -> DiscretizationParams:
    K = 2 ** len(net.props) * len(net.tasks)
    if K == 0:
        # no tasks: nothing is ever scheduled, any positive step will do
        return DiscretizationParams(net.w, net.W, 0, net.w, 0)
    return DiscretizationParams(net.w, net.W, K, net.w / K, 2 * K * K * net.W)


@dataclass(frozen=True)
class Configuration:
    """``k_now`` is 0 before anything runs; ``psi`` maps tasks to grid indices."""

    k_now: int = 0
    psi: Mapping[str, int] = field(default_factory=dict)
    h: PartialScenario = field(default_factory=PartialScenario)

    def __post_init__(self):
        object.__setattr__(self, "psi", dict(self.psi))
        object.__setattr__(self, "h", PartialScenario(self.h))

    __hash__ = None


@dataclass(frozen=True)
class NextAction:
    k_next: int
    tasks_next: frozenset


def next_configuration(net, c: Configuration, action: NextAction, o: Mapping) -> Configuration:
    if action.k_next <= c.k_now:
        raise CstnError("next action must be strictly later")
    if not action.tasks_next or action.tasks_next & set(c.psi):
        raise CstnError("next action must run a nonempty set of unscheduled tasks")
    psi = dict(c.psi)
    psi.update({t: action.k_next for t in action.tasks_next})
    return Configuration(action.k_next, psi, c.h.union(o))


@dataclass
class SearchStats:
    nodes: int = 0
    max_depth: int = 0
    elapsed: float = 0.0


class _Network:
    """Bitmask view of a CSTN for a given grid step."""

    def __init__(self, net, unit: Fraction):
        self.net = net
        self.tasks = net.sorted_tasks()
        self.props = net.sorted_props()
        self.tidx = {t: i for i, t in enumerate(self.tasks)}
        self.pidx = {p: i for i, p in enumerate(self.props)}
        self.T = len(self.tasks)
        self.P = len(self.props)
        self.full = (1 << self.T) - 1
        self.lab = [self._mask(net.task_labels[t]) for t in self.tasks]
        self.obs = [-1] * self.T
        for p, t in net.obs_map.items():
            self.obs[self.tidx[t]] = self.pidx[p]
        scale = net.w / unit
        self.cons = []
        for c in net.constraints:
            pos, neg = self._mask(c.label)
            self.cons.append((self.tidx[c.source], self.tidx[c.target], floor(c.bound_k * scale), pos, neg))

    def _mask(self, label):
        pos = neg = 0
        for p, v in label.literals:
            if v:
                pos |= 1 << self.pidx[p]
            else:
                neg |= 1 << self.pidx[p]
        return pos, neg

    @staticmethod
    def holds(pos, neg, val):
        return not (pos & ~val) and not (neg & val)

    @staticmethod
    def status(pos, neg, hdom, hval):
        if (pos & hdom & ~hval) or (neg & hdom & hval):
            return -1
        if (pos | neg) & ~hdom:
            return 0
        return 1

    def completions(self, hdom, hval):
        free = [1 << i for i in range(self.P) if not hdom >> i & 1]
        # sorted-prop order with the first prop most significant
        nfree = len(free)
        for code in range(1 << nfree):
            val = hval
            for j in range(nfree):
                if code >> (nfree - 1 - j) & 1:
                    val |= free[j]
            yield val

    def active(self, val):
        m = 0
        for i, (pos, neg) in enumerate(self.lab):
            if self.holds(pos, neg, val):
                m |= 1 << i
        return m

    def feasible(self, sched, val):
        for x, y, b, pos, neg in self.cons:
            if self.holds(pos, neg, val) and sched[y] - sched[x] > b:
                return False
        return True


class Search:
    """One decision run over a fixed grid of admissible indices."""

    def __init__(self, net, grid: Sequence[int], unit: Fraction, prune=True, cache_size=None):
        self.g = _Network(net, unit)
        self.grid = grid
        self.prune = prune
        self.cache_size = cache_size
        self.cache = {} if cache_size else None
        self.stats = SearchStats()
        self.unit = Fraction(unit)

    # -- terminal test ---------------------------------------------------

    def terminal_status(self, sched, dom, hdom, hval):
        g = self.g
        for val in g.completions(hdom, hval):
            if g.active(val) != dom:
                return NOT_TERMINAL
            if not g.feasible(sched, val):
                return TERMINAL_NOT_DC
        return TERMINAL_DC

    # -- sound pruning ---------------------------------------------------

    def doomed(self, k_now, sched, dom, hdom, hval):
        g = self.g
        status = g.status
        for i in range(g.T):
            if dom >> i & 1:
                pos, neg = g.lab[i]
                if status(pos, neg, hdom, hval) != 1:
                    return True
        for x, y, b, pos, neg in g.cons:
            if dom >> x & 1 and dom >> y & 1 and sched[y] - sched[x] > b:
                if status(pos, neg, hdom, hval) >= 0:
                    return True
        lo_i = bisect_right(self.grid, k_now)
        for val in g.completions(hdom, hval):
            if not self._completable(sched, dom, val, lo_i):
                return True
        return False

    def _completable(self, sched, dom, val, lo_i):
        """Relaxed check: can ``sched`` extend to a feasible schedule for this scenario?"""
        g = self.g
        act = g.active(val)
        todo = act & ~dom
        if not todo:
            return g.feasible(sched, val)
        if lo_i >= len(self.grid):
            return False
        lo, hi = self.grid[lo_i], self.grid[-1]
        Z = g.T
        edges = []
        for i in range(g.T):
            if act >> i & 1:
                if dom >> i & 1:
                    edges.append((Z, i, sched[i]))
                    edges.append((i, Z, -sched[i]))
                else:
                    edges.append((Z, i, hi))
                    edges.append((i, Z, -lo))
        for x, y, b, pos, neg in g.cons:
            if g.holds(pos, neg, val):
                edges.append((x, y, b))
        dist = [0] * (g.T + 1)
        # |active| + 1 nodes; still relaxing after that many rounds means a negative cycle
        for _ in range(bin(act).count("1") + 2):
            changed = False
            for u, v, wt in edges:
                if dist[u] + wt < dist[v]:
                    dist[v] = dist[u] + wt
                    changed = True
            if not changed:
                return True
        return False

    # -- recursion -------------------------------------------------------

    def run(self, k_now, sched, dom, hdom, hval, depth=0):
        """Return a subtree (``Leaf``/``Node``) witnessing controllability, or ``None``."""
        st = self.stats
        st.nodes += 1
        if depth > st.max_depth:
            st.max_depth = depth
        g = self.g
        status = self.terminal_status(sched, dom, hdom, hval)
        if status == TERMINAL_DC:
            return LEAF
        if self.prune and self.doomed(k_now, sched, dom, hdom, hval):
            return None
        key = None
        if self.cache is not None:
            key = (k_now, tuple(sched), hdom, hval)
            if key in self.cache:
                return self.cache[key]

        result = self._expand(k_now, sched, dom, hdom, hval, depth)
        if key is not None and len(self.cache) < self.cache_size:
            self.cache[key] = result
        return result

    def _expand(self, k_now, sched, dom, hdom, hval, depth):
        g = self.g
        cand = []
        for i in range(g.T):
            if dom >> i & 1:
                continue
            if self.prune:
                pos, neg = g.lab[i]
                if g.status(pos, neg, hdom, hval) != 1:
                    continue
            cand.append(i)
        if not cand:
            return None
        start = bisect_right(self.grid, k_now)
        nc = len(cand)
        for gi in range(start, len(self.grid)):
            k = self.grid[gi]
            for code in range(1, 1 << nc):
                sub = 0
                for j in range(nc):
                    if code >> j & 1:
                        sub |= 1 << cand[j]
                child = self._try_action(k, sub, sched, dom, hdom, hval, depth)
                if child is not None:
                    return child
        return None

    def _try_action(self, k, sub, sched, dom, hdom, hval, depth):
        g = self.g
        sched2 = list(sched)
        pnext = []
        for i in range(g.T):
            if sub >> i & 1:
                sched2[i] = k
                if g.obs[i] >= 0:
                    pnext.append(g.obs[i])
        pnext.sort()
        dom2 = dom | sub
        pmask = 0
        for p in pnext:
            pmask |= 1 << p
        children = {}
        np_ = len(pnext)
        for code in range(1 << np_):
            oval = 0
            for j in range(np_):
                if code >> (np_ - 1 - j) & 1:
                    oval |= 1 << pnext[j]
            sub_tree = self.run(k, sched2, dom2, hdom | pmask, hval | oval, depth + 1)
            if sub_tree is None:
                return None
            o = PartialScenario({g.props[p]: (oval >> p) & 1 for p in pnext})
            children[o] = sub_tree
        tasks = frozenset(g.tasks[i] for i in range(g.T) if sub >> i & 1)
        return Node(k, tasks, children)

    # -- entry points ----------------------------------------------------

    def encode(self, c: Configuration):
        g = self.g
        sched = [0] * g.T
        dom = 0
        for t, k in c.psi.items():
            i = g.tidx[t]
            sched[i] = k
            dom |= 1 << i
        hdom = hval = 0
        for p, v in c.h.items():
            hdom |= 1 << g.pidx[p]
            if v:
                hval |= 1 << g.pidx[p]
        return c.k_now, sched, dom, hdom, hval

    def solve(self, c: Configuration):
        t0 = time.perf_counter()
        try:
            return self.run(*self.encode(c))
        finally:
            self.stats.elapsed += time.perf_counter() - t0


def _check_configuration(net, c: Configuration, top: Optional[int]):
    for t, k in c.psi.items():
        if t not in net.tasks:
            raise CstnError(f"configuration schedules unknown task {t!r}")
        if k < 1 or k > c.k_now or (top is not None and k > top):
            raise CstnError(f"index {k} of {t!r} outside 1..{c.k_now}")
    seen = {p for p, t in net.obs_map.items() if t in c.psi}
    if set(c.h) != seen:
        raise CstnError("configuration history does not match the executed observation tasks")


def _check_grid(grid, top):
    grid = list(grid)
    for a, b in zip(grid, grid[1:]):
        if b <= a:
            raise ValueError("grid must be strictly increasing")
    if grid and (grid[0] < 1 or (top is not None and grid[-1] > top)):
        raise ValueError(f"grid must lie within 1..{top}")
    return grid


def is_terminal_and_dc(net, c: Configuration, params: Optional[DiscretizationParams] = None) -> str:
    params = params or discretize(net)
    s = Search(net, [], params.mu)
    return s.terminal_status(*s.encode(c)[1:])


def dc_from(net, c: Configuration, params: Optional[DiscretizationParams] = None, *,
            prune=True, cache_size=None, stats: Optional[SearchStats] = None) -> bool:
    params = params or discretize(net)
    _check_configuration(net, c, params.M)
    s = Search(net, range(1, params.M + 1), params.mu, prune, cache_size)
    ok = s.solve(c) is not None
    _merge(stats, s.stats)
    return ok


def dc(net, **kw) -> bool:
    return dc_from(net, Configuration(), **kw)


def dc_bounded(net, grid: Sequence[int], params: Optional[DiscretizationParams] = None, *,
               c: Optional[Configuration] = None, prune=True, cache_size=None,
               stats: Optional[SearchStats] = None) -> bool:
    """Search with next-action indices restricted to ``grid``.

    ``True`` is a sound certificate.  ``False`` only means no strategy lives on
    this grid, unless the grid is all of ``1..M``.
    """
    params = params or discretize(net)
    grid = _check_grid(grid, params.M)
    c = c or Configuration()
    _check_configuration(net, c, params.M)
    s = Search(net, grid, params.mu, prune, cache_size)
    ok = s.solve(c) is not None
    _merge(stats, s.stats)
    return ok


def dc_extract(net, grid: Optional[Sequence[int]] = None,
               params: Optional[DiscretizationParams] = None, *, prune=True,
               cache_size=None, stats: Optional[SearchStats] = None) -> TreeStrategy:
    """The strategy found by the search (first success in enumeration order)."""
    params = params or discretize(net)
    grid = range(1, params.M + 1) if grid is None else _check_grid(grid, params.M)
    s = Search(net, grid, params.mu, prune, cache_size)
    tree = s.solve(Configuration())
    _merge(stats, s.stats)
    if tree is None:
        raise NotControllable("network is not dynamically controllable on this grid")
    return TreeStrategy(tree, params.mu)


def _merge(into: Optional[SearchStats], src: SearchStats):
    if into is not None:
        into.nodes += src.nodes
        into.max_depth = max(into.max_depth, src.max_depth)
        into.elapsed += src.elapsed

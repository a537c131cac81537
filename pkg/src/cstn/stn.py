"""Plain simple temporal networks: consistency and witness schedules.

Edge convention used throughout the package: a constraint ``Y - X <= d`` is
the edge ``X -> Y`` with weight ``d``.  Shortest-path distances from a
virtual source that reaches every task with weight 0 are a feasible schedule
whenever the graph has no negative cycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import CstnError, Schedule


@dataclass(frozen=True)
class Stn:
    tasks: frozenset
    constraints: tuple  # (X, Y, k): Y - X <= k * unit
    unit: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "tasks", frozenset(self.tasks))
        object.__setattr__(self, "constraints", tuple(tuple(c) for c in self.constraints))
        object.__setattr__(self, "unit", Fraction(self.unit))
        for x, y, _ in self.constraints:
            if x not in self.tasks or y not in self.tasks:
                raise CstnError(f"constraint {y} - {x} has an endpoint outside the task set")


def shortest_from_virtual_source(nodes, edges) -> Optional[dict]:
    """Bellman-Ford from a source joined to every node by a 0-weight edge.

    ``edges`` is an iterable of ``(u, v, weight)``.  Returns the distance map,
    or ``None`` if a negative cycle is reachable.
    """
    dist = {v: 0 for v in nodes}
    edges = list(edges)
    for _ in range(len(dist)):
        changed = False
        for u, v, wt in edges:
            nd = dist[u] + wt
            if nd < dist[v]:
                dist[v] = nd
                changed = True
        if not changed:
            return dist
    # still relaxing after |V| rounds (|V|+1 nodes counting the source)
    for u, v, wt in edges:
        if dist[u] + wt < dist[v]:
            return None
    return dist


def stn_consistent(stn: Stn) -> bool:
    return shortest_from_virtual_source(stn.tasks, stn.constraints) is not None


def stn_solve(stn: Stn) -> Optional[Schedule]:
    """A feasible schedule in units of ``stn.unit``, or ``None`` if inconsistent."""
    dist = shortest_from_virtual_source(stn.tasks, stn.constraints)
    if dist is None:
        return None
    return Schedule(dist, stn.unit)


def all_pairs_closure(stn: Stn) -> Optional[dict]:
    """Floyd-Warshall distance matrix ``d[(X, Y)]``; ``None`` on a negative cycle."""
    inf = float("inf")
    nodes = sorted(stn.tasks)
    d = {(a, b): (0 if a == b else inf) for a in nodes for b in nodes}
    for x, y, k in stn.constraints:
        d[x, y] = min(d[x, y], k)
    for m in nodes:
        for a in nodes:
            dam = d[a, m]
            if dam == inf:
                continue
            for b in nodes:
                if dam + d[m, b] < d[a, b]:
                    d[a, b] = dam + d[m, b]
    if any(d[a, a] < 0 for a in nodes):
        return None
    return d

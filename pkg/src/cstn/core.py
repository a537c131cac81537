"""Labels, scenarios, schedules and conditional simple temporal networks.

Times are always integer grid indices paired with an exact rational unit;
a constraint bound is an integer multiple of the network unit ``w``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Union


class CstnError(ValueError):
    """Raised when a network or one of its parts is malformed."""


class WD1Violation(CstnError):
    def __init__(self, offending):
        self.offending = list(offending)
        lines = ", ".join(str(c) for c in self.offending)
        super().__init__(f"WD1 violated by: {lines}")


# -- labels ------------------------------------------------------------------

TRUE, FALSE, UNDETERMINED = "true", "false", "undetermined"


@dataclass(frozen=True)
class Label:
    """Conjunction of literals over distinct propositions.

    ``literals`` is a sorted tuple of ``(prop, polarity)`` pairs; the empty
    label (lambda) always holds.
    """

    literals: tuple = ()

    def __post_init__(self):
        lits = tuple(sorted((str(p), bool(v)) for p, v in self.literals))
        props = [p for p, _ in lits]
        if len(set(props)) != len(props):
            raise CstnError(f"label repeats or negates a proposition: {lits}")
        object.__setattr__(self, "literals", lits)

    @classmethod
    def parse(cls, text: str) -> "Label":
        """Parse ``p,!q`` style text; an empty string gives lambda."""
        lits = []
        for tok in text.split(","):
            tok = tok.strip()
            if not tok:
                continue
            if tok.startswith("!") or tok.startswith("¬"):
                lits.append((tok[1:].strip(), False))
            else:
                lits.append((tok, True))
        return cls(tuple(lits))

    @classmethod
    def of(cls, *lits: str) -> "Label":
        return cls.parse(",".join(lits))

    def props(self) -> frozenset:
        return frozenset(p for p, _ in self.literals)

    def as_dict(self) -> dict:
        return dict(self.literals)

    def is_empty(self) -> bool:
        return not self.literals

    def implies(self, other: "Label") -> bool:
        # Conjunctions of literals: self => other iff other's literals are a subset.
        return set(other.literals) <= set(self.literals)

    def __and__(self, other: "Label") -> "Label":
        merged = dict(self.literals)
        for p, v in other.literals:
            if merged.get(p, v) != v:
                raise CstnError(f"contradictory conjunction {self} & {other}")
            merged[p] = v
        return Label(tuple(merged.items()))

    def __str__(self):
        if not self.literals:
            return "λ"
        return ",".join(p if v else "!" + p for p, v in self.literals)


LAMBDA = Label()


# -- scenarios ---------------------------------------------------------------


class PartialScenario(Mapping):
    """Immutable, hashable partial assignment of propositions to 0/1."""

    __slots__ = ("_items", "_dict")

    def __init__(self, assignment: Union[Mapping, Iterable, None] = None):
        d = dict(assignment or {})
        for p, v in d.items():
            if v not in (0, 1):
                raise CstnError(f"proposition {p!r} assigned {v!r}, expected 0 or 1")
        self._dict = {str(p): int(v) for p, v in d.items()}
        self._items = tuple(sorted(self._dict.items()))

    def __getitem__(self, p):
        return self._dict[p]

    def __iter__(self):
        return (p for p, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return hash(self._items)

    def __eq__(self, other):
        if isinstance(other, PartialScenario):
            return self._items == other._items
        if isinstance(other, Mapping):
            return dict(self._items) == dict(other)
        return NotImplemented

    def __repr__(self):
        body = ",".join(f"{p}={v}" for p, v in self._items)
        return f"{type(self).__name__}({body})"

    def domain(self) -> frozenset:
        return frozenset(self._dict)

    def items_sorted(self) -> tuple:
        return self._items

    def set(self, p: str, v: int):
        """Return a copy with ``p`` set to ``v`` (the ``s[v/p]`` operation)."""
        d = dict(self._dict)
        d[p] = int(v)
        return type(self)(d)

    def union(self, other: Mapping) -> "PartialScenario":
        d = dict(self._dict)
        for p, v in other.items():
            if d.get(p, v) != v:
                raise CstnError(f"conflicting values for {p!r}")
            d[p] = v
        return PartialScenario(d)

    def restrict(self, props: Iterable[str]) -> "PartialScenario":
        keep = set(props)
        return PartialScenario({p: v for p, v in self._items if p in keep})

    def completions(self, props: Iterable[str]) -> Iterator["Scenario"]:
        """All total scenarios over ``props`` extending this assignment."""
        free = sorted(set(props) - set(self._dict))
        for bits in itertools.product((0, 1), repeat=len(free)):
            d = dict(self._dict)
            d.update(zip(free, bits))
            yield Scenario(d)


class Scenario(PartialScenario):
    """A total assignment; totality is checked against a network where used."""

    __slots__ = ()


def all_scenarios(props: Iterable[str]) -> list:
    """Every scenario over ``props`` in canonical order (sorted props, binary count)."""
    return list(PartialScenario().completions(props))


def label_holds(s: Mapping, label: Label) -> str:
    """Three-valued evaluation of ``label`` under a (partial) scenario."""
    undetermined = False
    for p, v in label.literals:
        if p not in s:
            undetermined = True
        elif bool(s[p]) != v:
            return FALSE
    return UNDETERMINED if undetermined else TRUE


# -- constraints and networks ------------------------------------------------


@dataclass(frozen=True)
class LabeledConstraint:
    """``Y - X <= bound_k * w`` required whenever ``label`` holds."""

    source: str  # X
    target: str  # Y
    bound_k: int
    label: Label = LAMBDA

    def __post_init__(self):
        if not isinstance(self.bound_k, int) or isinstance(self.bound_k, bool):
            raise CstnError(f"bound must be an integer multiple of the unit, got {self.bound_k!r}")

    def __str__(self):
        lab = "" if self.label.is_empty() else f" [{self.label}]"
        return f"{self.target} - {self.source} <= {self.bound_k}{lab}"


@dataclass(frozen=True)
class Schedule:
    """Task -> grid index, with ``unit`` the length of one grid step."""

    times: Mapping[str, int]
    unit: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "times", dict(self.times))
        object.__setattr__(self, "unit", Fraction(self.unit))

    def __getitem__(self, task):
        return self.times[task]

    def __contains__(self, task):
        return task in self.times

    def domain(self) -> frozenset:
        return frozenset(self.times)

    def time(self, task) -> Fraction:
        return self.times[task] * self.unit

    def __hash__(self):
        return hash((tuple(sorted(self.times.items())), self.unit))


@dataclass(frozen=True, eq=True)
class Cstn:
    tasks: frozenset
    props: frozenset
    constraints: tuple
    task_labels: Mapping[str, Label] = field(default_factory=dict)
    obs_map: Mapping[str, str] = field(default_factory=dict)  # prop -> task
    w: Fraction = Fraction(1)
    W: Optional[int] = None

    def __post_init__(self):
        tasks = frozenset(self.tasks)
        props = frozenset(self.props)
        constraints = tuple(self.constraints)
        labels = {t: self.task_labels.get(t, LAMBDA) for t in tasks}
        extra = set(self.task_labels) - tasks
        if extra:
            raise CstnError(f"labels given for unknown tasks: {sorted(extra)}")
        obs = dict(self.obs_map)
        if set(obs) != set(props):
            raise CstnError("every proposition needs exactly one observation task")
        if len(set(obs.values())) != len(obs):
            raise CstnError("observation map is not injective")
        for p, t in obs.items():
            if t not in tasks:
                raise CstnError(f"observation task {t!r} of {p!r} is not a task")
        for t, lab in labels.items():
            if not lab.props() <= props:
                raise CstnError(f"label of {t!r} uses unknown propositions")
        for c in constraints:
            if c.source not in tasks or c.target not in tasks:
                raise CstnError(f"constraint {c} references an unknown task")
            if not c.label.props() <= props:
                raise CstnError(f"constraint {c} uses unknown propositions")
        w = Fraction(self.w)
        if w <= 0:
            raise CstnError("unit w must be positive")
        W = self.W
        max_k = max((abs(c.bound_k) for c in constraints), default=0)
        if W is None:
            W = max(1, max_k)
        elif max_k > W:
            raise CstnError(f"bound {max_k} exceeds W={W}")
        object.__setattr__(self, "tasks", tasks)
        object.__setattr__(self, "props", props)
        object.__setattr__(self, "constraints", constraints)
        object.__setattr__(self, "task_labels", labels)
        object.__setattr__(self, "obs_map", obs)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "W", int(W))
        bad = wd1_violations(self)
        if bad:
            raise WD1Violation(bad)

    __hash__ = None

    @property
    def obs_tasks(self) -> frozenset:
        return frozenset(self.obs_map.values())

    def observer_of(self) -> dict:
        """Inverse observation map, task -> prop."""
        return {t: p for p, t in self.obs_map.items()}

    def sorted_tasks(self) -> list:
        return sorted(self.tasks)

    def sorted_props(self) -> list:
        return sorted(self.props)

    def scenarios(self) -> list:
        return all_scenarios(self.props)

    def active_tasks(self, s: Mapping) -> frozenset:
        return frozenset(t for t in self.tasks if label_holds(s, self.task_labels[t]) == TRUE)


def wd1_violations(net: Cstn) -> list:
    labels = net.task_labels
    bad = []
    for c in net.constraints:
        lx = labels.get(c.source, LAMBDA)
        ly = labels.get(c.target, LAMBDA)
        if not (c.label.implies(lx) and c.label.implies(ly)):
            bad.append(c)
    return bad


def validate_wd1(net: Cstn) -> list:
    """Constraints whose label fails to imply both endpoint labels; empty when ok."""
    return wd1_violations(net)


def project(net: Cstn, s: Mapping):
    """The STN that remains under scenario ``s``."""
    from .stn import Stn

    missing = net.props - set(s)
    if missing:
        raise CstnError(f"scenario does not assign {sorted(missing)}")
    tasks = net.active_tasks(s)
    cons = tuple(
        (c.source, c.target, c.bound_k)
        for c in net.constraints
        if label_holds(s, c.label) == TRUE
    )
    return Stn(tasks, cons, net.w)


def schedule_satisfies(psi: Schedule, stn) -> Optional[tuple]:
    """``None`` when ``psi`` meets every constraint of ``stn``, else the first violated one."""
    for x, y, k in stn.constraints:
        if x not in psi.times or y not in psi.times:
            raise CstnError(f"schedule does not assign {x if x not in psi.times else y!r}")
        if (psi.times[y] - psi.times[x]) * psi.unit > k * stn.unit:
            return (x, y, k)
    return None

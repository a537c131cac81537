"""Quantified 3-SAT with the strict prefix  exists x1 forall y1 ... exists xn forall yn.

Variables are numbered as in the text format: ``2i-1`` is ``x_i`` and ``2i``
is ``y_i``.  A literal is a signed variable number.  Everything here is plain
game-tree search, which is exponential in ``n`` and meant for small formulas.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

MAX_PAIRS = 12


class QbfError(ValueError):
    pass


class CapacityError(QbfError):
    pass


def var_name(v: int) -> str:
    i = (abs(v) + 1) // 2
    return f"x{i}" if abs(v) % 2 else f"y{i}"


@dataclass(frozen=True)
class Q3SatFormula:
    n: int
    clauses: tuple  # tuple of 3-tuples of signed ints

    def __post_init__(self):
        if self.n < 0:
            raise QbfError("n must be non-negative")
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for c in clauses:
            if len(c) != 3:
                raise QbfError(f"clause {c} does not have exactly 3 literals")
            for lit in c:
                if lit == 0 or abs(lit) > 2 * self.n:
                    raise QbfError(f"literal {lit} references an undeclared variable")
        object.__setattr__(self, "clauses", clauses)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @classmethod
    def parse(cls, text: str) -> "Q3SatFormula":
        """Read ``q3sat n m`` followed by ``m`` lines of three signed integers."""
        lines = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                lines.append(line)
        if not lines:
            raise QbfError("empty input")
        head = lines[0].split()
        if len(head) != 3 or head[0] != "q3sat":
            raise QbfError(f"bad header {lines[0]!r}, expected 'q3sat n m'")
        try:
            n, m = int(head[1]), int(head[2])
        except ValueError:
            raise QbfError(f"bad header {lines[0]!r}") from None
        body = lines[1:]
        if len(body) != m:
            raise QbfError(f"header announces {m} clauses, found {len(body)}")
        clauses = []
        for line in body:
            toks = line.split()
            if toks and toks[-1] == "0":  # tolerate DIMACS terminators
                toks = toks[:-1]
            try:
                lits = [int(t) for t in toks]
            except ValueError:
                raise QbfError(f"malformed clause line {line!r}") from None
            if len(lits) != 3:
                raise QbfError(f"malformed clause line {line!r}")
            clauses.append(tuple(lits))
        return cls(n, tuple(clauses))

    def dump(self) -> str:
        out = [f"q3sat {self.n} {self.m}"]
        out += [" ".join(str(l) for l in c) for c in self.clauses]
        return "\n".join(out) + "\n"

    def satisfied(self, values: Sequence[int]) -> bool:
        """Evaluate the matrix; ``values[v-1]`` is the value of variable ``v``."""
        for c in self.clauses:
            if not any((values[abs(l) - 1] == 1) == (l > 0) for l in c):
                return False
        return True

    def falsified_clause(self, values: Sequence[int]) -> Optional[int]:
        for j, c in enumerate(self.clauses):
            if not any((values[abs(l) - 1] == 1) == (l > 0) for l in c):
                return j
        return None

    def is_tautology(self, j: int) -> bool:
        c = self.clauses[j]
        return any(-l in c for l in c)


def _check_capacity(phi: Q3SatFormula):
    if phi.n > MAX_PAIRS:
        raise CapacityError(f"n={phi.n} exceeds the supported bound {MAX_PAIRS}")


def _wins(phi, values) -> bool:
    # values: assignment so far in prefix order x1,y1,x2,...
    d = len(values)
    if d == 2 * phi.n:
        return phi.satisfied(values)
    branches = (_wins(phi, values + [b]) for b in (0, 1))
    return any(branches) if d % 2 == 0 else all(branches)


def qbf_eval(phi: Q3SatFormula) -> bool:
    _check_capacity(phi)
    return _wins(phi, [])


def _bits_index(bits) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | b
    return idx


@dataclass(frozen=True)
class ExistentialStrategy:
    """``tables[i-1][idx]`` is ``x_i`` given ``y_1..y_{i-1}`` read as a binary number, y_1 first."""

    tables: tuple

    def __post_init__(self):
        tables = tuple(tuple(int(b) for b in t) for t in self.tables)
        for i, t in enumerate(tables, start=1):
            if len(t) != 2 ** (i - 1):
                raise QbfError(f"level {i} table needs {2 ** (i - 1)} entries, got {len(t)}")
        object.__setattr__(self, "tables", tables)

    @property
    def n(self):
        return len(self.tables)

    def choose(self, i: int, ys: Sequence[int]) -> int:
        return self.tables[i - 1][_bits_index(ys[: i - 1])]


@dataclass(frozen=True)
class UniversalStrategy:
    """``tables[i-1][idx]`` is ``y_i`` given ``x_1..x_i`` read as a binary number, x_1 first."""

    tables: tuple

    def __post_init__(self):
        tables = tuple(tuple(int(b) for b in t) for t in self.tables)
        for i, t in enumerate(tables, start=1):
            if len(t) != 2**i:
                raise QbfError(f"level {i} table needs {2**i} entries, got {len(t)}")
        object.__setattr__(self, "tables", tables)

    @property
    def n(self):
        return len(self.tables)

    def choose(self, i: int, xs: Sequence[int]) -> int:
        return self.tables[i - 1][_bits_index(xs[:i])]


def all_existential_tables(n: int):
    """Every existential strategy for ``n`` levels (product of all table fillings)."""
    sizes = [2 ** (i - 1) for i in range(1, n + 1)]
    per_level = [list(itertools.product((0, 1), repeat=k)) for k in sizes]
    for combo in itertools.product(*per_level):
        yield ExistentialStrategy(combo)


def all_universal_tables(n: int):
    sizes = [2**i for i in range(1, n + 1)]
    per_level = [list(itertools.product((0, 1), repeat=k)) for k in sizes]
    for combo in itertools.product(*per_level):
        yield UniversalStrategy(combo)


def qbf_extract_existential(phi: Q3SatFormula) -> Optional[ExistentialStrategy]:
    _check_capacity(phi)
    n = phi.n
    tables = [[0] * 2 ** (i - 1) for i in range(1, n + 1)]

    def fill(values, ys):
        # values is a winning prefix ending just before x_i
        i = len(ys) + 1
        if i > n:
            return
        x = 0 if _wins(phi, values + [0]) else 1
        tables[i - 1][_bits_index(ys)] = x
        for y in (0, 1):
            fill(values + [x, y], ys + [y])

    if not _wins(phi, []):
        return None
    fill([], [])
    return ExistentialStrategy(tuple(tuple(t) for t in tables))


def qbf_extract_universal(phi: Q3SatFormula) -> Optional[UniversalStrategy]:
    _check_capacity(phi)
    n = phi.n
    tables = [[0] * 2**i for i in range(1, n + 1)]

    def fill(values, xs):
        i = len(xs) + 1
        if i > n:
            return
        for x in (0, 1):
            here = values + [x]
            y = 0 if not _wins(phi, here + [0]) else 1
            tables[i - 1][_bits_index(xs + [x])] = y
            fill(here + [y], xs + [x])

    if _wins(phi, []):
        return None
    fill([], [])
    return UniversalStrategy(tuple(tuple(t) for t in tables))


def play(phi: Q3SatFormula, f: ExistentialStrategy, g: UniversalStrategy) -> list:
    """The full assignment (prefix order) produced when ``f`` meets ``g``."""
    xs, ys, values = [], [], []
    for i in range(1, phi.n + 1):
        x = f.choose(i, ys)
        xs.append(x)
        y = g.choose(i, xs)
        ys.append(y)
        values += [x, y]
    return values


def existential_wins_all(phi: Q3SatFormula, f: ExistentialStrategy) -> bool:
    """Replay ``f`` against every sequence of universal replies."""
    for ys in itertools.product((0, 1), repeat=phi.n):
        values = []
        for i in range(1, phi.n + 1):
            values += [f.choose(i, ys), ys[i - 1]]
        if not phi.satisfied(values):
            return False
    return True


def universal_wins_all(phi: Q3SatFormula, g: UniversalStrategy) -> bool:
    """Replay ``g`` against every sequence of existential moves."""
    for xs in itertools.product((0, 1), repeat=phi.n):
        values = []
        for i in range(1, phi.n + 1):
            values += [xs[i - 1], g.choose(i, xs)]
        if phi.satisfied(values):
            return False
    return True

"""Text formats for networks, strategies and solver verdicts.

Network (line oriented, ``#`` starts a comment)::

    unit 1/4
    bound 2
    task A
    task B label p,!q
    observes p O
    constraint B - A <= -1 label p

Tree strategy: ``unit`` line, then nested ``at <k> exec <tasks>`` records.  A
record that observes nothing is followed directly by its child; otherwise by
one ``on <p>=<v>[,<q>=<v>] { ... }`` block per outcome.  Leaves are
``terminal``.

Table strategy: ``unit`` line, then ``row <p>=<v>,... : <task>=<k> ...``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .core import Cstn, CstnError, Label, LabeledConstraint, PartialScenario, Scenario
from .strategy import LEAF, Leaf, Node, TableStrategy, TreeStrategy, observed_outcomes


class ParseError(CstnError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


NAME = r"[A-Za-z_][A-Za-z0-9_.]*"
_name_re = re.compile(NAME + r"\Z")
_cons_re = re.compile(
    rf"constraint\s+({NAME})\s*-\s*({NAME})\s*<=\s*([+-]?\d+)(?:\s+label\s+(\S+))?\s*\Z"
)


def _content_lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _rational(tok, no):
    try:
        v = Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {tok!r}", no) from None
    if v <= 0:
        raise ParseError("unit must be positive", no)
    return v


def _name(tok, no):
    if not _name_re.match(tok):
        raise ParseError(f"bad identifier {tok!r}", no)
    return tok


def _label(tok, no):
    try:
        return Label.parse(tok)
    except CstnError as e:
        raise ParseError(str(e), no) from None


def parse_network(text: str) -> Cstn:
    w = Fraction(1)
    W = None
    tasks, labels, obs, cons = [], {}, {}, []
    for no, line in _content_lines(text):
        toks = line.split()
        kw = toks[0]
        if kw == "unit" and len(toks) == 2:
            w = _rational(toks[1], no)
        elif kw == "bound" and len(toks) == 2:
            try:
                W = int(toks[1])
            except ValueError:
                raise ParseError(f"bad bound {toks[1]!r}", no) from None
        elif kw == "task" and len(toks) in (2, 4):
            t = _name(toks[1], no)
            if t in labels:
                raise ParseError(f"task {t!r} declared twice", no)
            if len(toks) == 4:
                if toks[2] != "label":
                    raise ParseError(f"expected 'label', got {toks[2]!r}", no)
                labels[t] = _label(toks[3], no)
            else:
                labels[t] = Label()
            tasks.append(t)
        elif kw == "observes" and len(toks) == 3:
            p, t = _name(toks[1], no), _name(toks[2], no)
            if p in obs:
                raise ParseError(f"proposition {p!r} observed twice", no)
            obs[p] = t
        elif kw == "constraint":
            m = _cons_re.match(line)
            if not m:
                raise ParseError(f"malformed constraint {line!r}", no)
            y, x, k, lab = m.groups()
            cons.append(LabeledConstraint(x, y, int(k), _label(lab, no) if lab else Label()))
        else:
            raise ParseError(f"unrecognised line {line!r}", no)
    return Cstn(frozenset(tasks), frozenset(obs), tuple(cons), labels, obs, w=w, W=W)


def dump_network(net: Cstn, annotations=None) -> str:
    out = [f"unit {net.w}", f"bound {net.W}"]
    for t in net.sorted_tasks():
        lab = net.task_labels[t]
        out.append(f"task {t}" if lab.is_empty() else f"task {t} label {lab}")
    for p in net.sorted_props():
        out.append(f"observes {p} {net.obs_map[p]}")
    for i, c in enumerate(net.constraints):
        if annotations is not None:
            out.append(f"# {annotations[i]}")
        line = f"constraint {c.target} - {c.source} <= {c.bound_k}"
        if not c.label.is_empty():
            line += f" label {c.label}"
        out.append(line)
    return "\n".join(out) + "\n"


# -- strategies --------------------------------------------------------------


def _assign_text(o) -> str:
    return ",".join(f"{p}={v}" for p, v in sorted(o.items()))


def _parse_assign(tok, no) -> PartialScenario:
    d = {}
    for part in tok.split(","):
        if not part:
            continue
        if "=" not in part:
            raise ParseError(f"bad assignment {part!r}", no)
        p, v = part.split("=", 1)
        if v not in ("0", "1"):
            raise ParseError(f"value of {p!r} must be 0 or 1", no)
        d[_name(p, no)] = int(v)
    return PartialScenario(d)


def dump_tree(tree: TreeStrategy, observer: dict) -> str:
    out = [f"unit {tree.unit}"]

    def emit(node, depth):
        pad = "  " * depth
        if isinstance(node, Leaf):
            out.append(pad + "terminal")
            return
        out.append(f"{pad}at {node.k} exec {','.join(sorted(node.tasks))}")
        pnext = sorted(observer[t] for t in node.tasks if t in observer)
        if not pnext:
            emit(node.children[PartialScenario()], depth)
            return
        for o in observed_outcomes(pnext):
            out.append(f"{pad}on {_assign_text(o)} {{")
            emit(node.children[o], depth + 1)
            out.append(pad + "}")

    emit(tree.root, 0)
    return "\n".join(out) + "\n"


def _tokens(text):
    for no, line in _content_lines(text):
        for tok in line.replace("{", " { ").replace("}", " } ").split():
            yield no, tok


def parse_tree(text: str) -> TreeStrategy:
    toks = list(_tokens(text))
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    def take(expect=None):
        nonlocal pos
        if pos >= len(toks):
            raise ParseError("unexpected end of strategy")
        no, tok = toks[pos]
        if expect is not None and tok != expect:
            raise ParseError(f"expected {expect!r}, got {tok!r}", no)
        pos += 1
        return no, tok

    take("unit")
    no, u = take()
    unit = _rational(u, no)

    def block():
        no, tok = take()
        if tok == "terminal":
            return LEAF
        if tok != "at":
            raise ParseError(f"expected 'at' or 'terminal', got {tok!r}", no)
        no, k = take()
        try:
            k = int(k)
        except ValueError:
            raise ParseError(f"bad grid index {k!r}", no) from None
        take("exec")
        no, names = take()
        tasks = frozenset(_name(t, no) for t in names.split(",") if t)
        if peek()[1] != "on":
            return Node(k, tasks, {PartialScenario(): block()})
        children = {}
        while peek()[1] == "on":
            take("on")
            no, assign = take()
            o = _parse_assign(assign, no)
            take("{")
            children[o] = block()
            take("}")
        return Node(k, tasks, children)

    root = block()
    if pos != len(toks):
        raise ParseError(f"trailing input {toks[pos][1]!r}", toks[pos][0])
    return TreeStrategy(root, unit)


def dump_table(sigma: TableStrategy) -> str:
    out = [f"unit {sigma.unit}"]
    for s in sorted(sigma.rows, key=lambda s: s.items_sorted()):
        row = sigma.rows[s]
        cells = " ".join(f"{t}={row[t]}" for t in sorted(row))
        out.append(f"row {_assign_text(s)} : {cells}".rstrip())
    return "\n".join(out) + "\n"


def parse_table(text: str) -> TableStrategy:
    unit = None
    rows = {}
    for no, line in _content_lines(text):
        if line.startswith("unit"):
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("bad unit line", no)
            unit = _rational(parts[1], no)
            continue
        if not line.startswith("row") or ":" not in line:
            raise ParseError(f"unrecognised line {line!r}", no)
        head, cells = line[3:].split(":", 1)
        s = Scenario(_parse_assign(head.strip(), no))
        if s in rows:
            raise ParseError(f"duplicate row for {s}", no)
        row = {}
        for cell in cells.split():
            if "=" not in cell:
                raise ParseError(f"bad cell {cell!r}", no)
            t, k = cell.split("=", 1)
            try:
                row[_name(t, no)] = int(k)
            except ValueError:
                raise ParseError(f"bad grid index {k!r}", no) from None
        rows[s] = row
    if unit is None:
        raise ParseError("missing unit line")
    return TableStrategy(rows, unit)


def parse_strategy(text: str):
    """Tree or table, decided by the first record after the unit line."""
    for _, line in _content_lines(text):
        if line.startswith("unit"):
            continue
        if line.startswith("row"):
            return parse_table(text)
        break
    return parse_tree(text)


def dump_verdict(controllable, params, stats, strategy_text=None) -> str:
    out = [
        f"controllable: {'true' if controllable else 'false'}",
        f"w: {params.w}",
        f"W: {params.W}",
        f"K: {params.K}",
        f"mu: {params.mu}",
        f"M: {params.M}",
        f"nodes: {stats.nodes}",
        f"max_depth: {stats.max_depth}",
        f"elapsed: {stats.elapsed:.6f}",
    ]
    if strategy_text is not None:
        out.append("strategy:")
        out.append(strategy_text.rstrip("\n"))
    return "\n".join(out) + "\n"


def parse_verdict(text: str) -> dict:
    """Key/value header of a verdict, plus the raw strategy block if present."""
    out = {}
    lines = text.splitlines()
    for i, line in enumerate(lines):
        if line == "strategy:":
            out["strategy"] = "\n".join(lines[i + 1:]) + "\n"
            break
        key, _, val = line.partition(":")
        out[key.strip()] = val.strip()
    return out

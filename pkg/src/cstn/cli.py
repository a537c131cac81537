"""``cstn`` command line.

Exit codes: 0 controllable / verified / formula true, 1 the opposite,
2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import formats
from .core import CstnError
from .qbf import Q3SatFormula, QbfError, qbf_eval, qbf_extract_existential, qbf_extract_universal
from .reduction import reduce, witness_strategy
from .solver import NotControllable, SearchStats, dc_bounded, dc_extract, dc, discretize
from .strategy import StrategyError, TableStrategy, tree_to_table, verify_dynamic, verify_viable

OK, NO, BAD = 0, 1, 2


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def parse_grid(text: str) -> list:
    """Comma list of indices; ``a:b`` or ``a:b:step`` spans are inclusive."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = [int(b) for b in part.split(":")]
            if len(bits) not in (2, 3):
                raise ValueError(f"bad span {part!r}")
            step = bits[2] if len(bits) == 3 else 1
            out.extend(range(bits[0], bits[1] + 1, step))
        else:
            out.append(int(part))
    return out


def cmd_check(args) -> int:
    net = formats.parse_network(_read(args.network))
    params = discretize(net)
    grid = parse_grid(args.grid) if args.grid is not None else None
    stats = SearchStats()
    kw = dict(prune=not args.no_prune, cache_size=args.cache, stats=stats)
    text = None
    if args.extract:
        try:
            tree = dc_extract(net, grid, params, **kw)
            ok = True
            text = formats.dump_tree(tree, net.observer_of())
        except NotControllable:
            ok = False
    elif grid is not None:
        ok = dc_bounded(net, grid, params, **kw)
    else:
        ok = dc(net, params=params, **kw)
    sys.stdout.write(formats.dump_verdict(ok, params, stats, text))
    return OK if ok else NO


def cmd_reduce(args) -> int:
    phi = Q3SatFormula.parse(_read(args.formula))
    inst = reduce(phi)
    _write(args.output, formats.dump_network(inst.cstn, inst.annotations))
    if args.graph:
        _write(args.graph, json.dumps(inst.graph(), indent=2) + "\n")
    return OK


def cmd_witness(args) -> int:
    phi = Q3SatFormula.parse(_read(args.formula))
    f = qbf_extract_existential(phi)
    if f is None:
        print("formula is false: no existential winning strategy", file=sys.stderr)
        return NO
    inst = reduce(phi)
    tree = witness_strategy(phi, f)
    text = formats.dump_table(tree_to_table(inst.cstn, tree)) if args.table else formats.dump_tree(
        tree, inst.cstn.observer_of())
    _write(args.output, text)
    return OK


def _fmt_constraint(c):
    x, y, k = c
    return f"{y} - {x} <= {k}"


def cmd_verify(args) -> int:
    net = formats.parse_network(_read(args.network))
    strat = formats.parse_strategy(_read(args.strategy))
    sigma = strat if isinstance(strat, TableStrategy) else tree_to_table(net, strat)
    viable = verify_viable(net, sigma)
    dynamic = verify_dynamic(net, sigma)
    if viable is None:
        print("viable: ok")
    else:
        s, c = viable
        print(f"viable: fail scenario {formats._assign_text(s)} constraint {_fmt_constraint(c)}")
    if dynamic is None:
        print("dynamic: ok")
    else:
        s, s2, X, t = dynamic
        print(f"dynamic: fail task {X} at {t} scenario {formats._assign_text(s)} "
              f"vs {formats._assign_text(s2)}")
    return OK if viable is None and dynamic is None else NO


def _table_text(tables):
    return ";".join("".join(str(b) for b in t) for t in tables)


def cmd_qbf(args) -> int:
    phi = Q3SatFormula.parse(_read(args.formula))
    value = qbf_eval(phi)
    print(f"value: {'true' if value else 'false'}")
    if args.extract_existential:
        f = qbf_extract_existential(phi)
        print(f"existential: {_table_text(f.tables) if f else 'none'}")
    if args.extract_universal:
        g = qbf_extract_universal(phi)
        print(f"universal: {_table_text(g.tables) if g else 'none'}")
    return OK if value else NO


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cstn", description="Conditional simple temporal network toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide dynamic controllability")
    p.add_argument("network")
    p.add_argument("--extract", action="store_true", help="print the strategy found")
    p.add_argument("--no-prune", action="store_true", help="disable sound pruning")
    p.add_argument("--grid", help="restrict next-action indices, e.g. 144:2160:144")
    p.add_argument("--cache", type=int, default=None, metavar="N",
                   help="memoise up to N configurations")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", help="build the network for a q3sat formula")
    p.add_argument("formula")
    p.add_argument("-o", "--output")
    p.add_argument("--graph", help="write the gadget graph as JSON")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("witness", help="strategy for the reduced network of a true formula")
    p.add_argument("formula")
    p.add_argument("-o", "--output")
    p.add_argument("--table", action="store_true", help="emit a table instead of a tree")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("verify", help="check a strategy is viable and dynamic")
    p.add_argument("network")
    p.add_argument("strategy")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("qbf", help="evaluate a q3sat formula")
    p.add_argument("formula")
    p.add_argument("--extract-existential", action="store_true")
    p.add_argument("--extract-universal", action="store_true")
    p.set_defaults(func=cmd_qbf)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CstnError, QbfError, StrategyError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD


if __name__ == "__main__":
    sys.exit(main())

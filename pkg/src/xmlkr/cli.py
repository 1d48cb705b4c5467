"""``xmlkr`` command line: validate, query, export and stats.

Exit codes: 0 success, 1 semantic error, 2 input/IO error. Data goes to
stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import graph
from .codec import Flat, Nested, load, serialize
from .errors import XmlkrError
from .model import AKO, ISA, KnowledgeBase, validate
from .query import run_query

EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_INPUT = 2


@dataclass
class CliConfig:
    strict: bool = False
    mode: str = "flat"
    root: Optional[str] = None
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.mode not in ("flat", "nested"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "nested" and not self.root:
            raise ValueError("nested mode requires a root object")


def _err(message: str) -> None:
    print(f"xmlkr: {message}", file=sys.stderr)


def _load(path: str):
    """Returns the parsed KB, or None after reporting the failure."""
    try:
        kb, _ = load(path)
    except OSError as exc:
        _err(f"{path}: {exc.strerror or exc}")
        return None
    except XmlkrError as exc:
        if exc.has_position:
            _err(f"{path}:{exc.line}:{exc.column}: {exc.message}")
        else:
            _err(f"{path}: {exc.message}")
        return None
    return kb


def cmd_validate(path: str, strict: bool = False) -> int:
    kb = _load(path)
    if kb is None:
        return EXIT_INPUT
    report = validate(kb, strict=strict)
    for finding in report:
        print(finding.render())
    return EXIT_OK if report.ok else EXIT_SEMANTIC


def cmd_query(path: str, query_text: str) -> int:
    kb = _load(path)
    if kb is None:
        return EXIT_INPUT
    try:
        result = run_query(kb, query_text)
    except XmlkrError as exc:
        where = f":{exc.line}:{exc.column}" if exc.has_position else ""
        _err(f"query{where}: {exc.message}")
        return EXIT_SEMANTIC
    sys.stdout.write(result.render())
    return EXIT_OK


def cmd_export(path: str, mode: str = "flat", root: Optional[str] = None,
               out: Optional[str] = None) -> int:
    kb = _load(path)
    if kb is None:
        return EXIT_INPUT
    try:
        text = serialize(kb, Nested(root) if mode == "nested" else Flat())
    except XmlkrError as exc:
        _err(str(exc))
        return EXIT_SEMANTIC
    if out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        _err(f"{out}: {exc.strerror or exc}")
        return EXIT_INPUT
    return EXIT_OK


def stats(kb: KnowledgeBase) -> dict:
    """Counts reported by ``xmlkr stats``.

    ``cycles`` counts cyclic strongly connected components of the relation
    graph (a self-loop is a cycle of length one) and ``max_depth`` is the
    longest simple path in edges.
    """
    edges = list(kb.edges())
    adjacency = kb.adjacency()
    return {
        "objects": kb.object_count,
        "stubs": kb.stub_count,
        "attrs": sum(a.size() for node in kb for a in node.attributes),
        "isa": sum(1 for e in edges if e.kind == ISA),
        "ako": sum(1 for e in edges if e.kind == AKO),
        "named": sum(1 for e in edges if not e.kind.inherits),
        "cycles": len(graph.cyclic_components(adjacency)),
        "max_depth": graph.longest_simple_path(adjacency),
    }


def cmd_stats(path: str) -> int:
    kb = _load(path)
    if kb is None:
        return EXIT_INPUT
    print(" ".join(f"{k}={v}" for k, v in stats(kb).items()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xmlkr", description="XMLKR knowledge base tool")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="report stubs, self-loops and cycles")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true", help="treat undefined objects as errors")

    p = sub.add_parser("query", help="run a query against a document")
    p.add_argument("file")
    p.add_argument("--q", required=True, metavar="QUERY")

    p = sub.add_parser("export", help="re-serialise in canonical flat or nested form")
    p.add_argument("file")
    p.add_argument("--mode", required=True, choices=("flat", "nested"))
    p.add_argument("--root")
    p.add_argument("--out")

    p = sub.add_parser("stats", help="print object, attribute, edge and cycle counts")
    p.add_argument("file")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args.file, args.strict)
    if args.command == "query":
        return cmd_query(args.file, args.q)
    if args.command == "export":
        try:
            config = CliConfig(mode=args.mode, root=args.root, output_path=args.out)
        except ValueError as exc:
            parser.error(str(exc))
        return cmd_export(args.file, config.mode, config.root, config.output_path)
    return cmd_stats(args.file)


def run() -> None:
    sys.exit(main())

"""Command-line entry point.

Exit status: 0 when the command found nothing to report, 1 when validation
or alignment findings are present, 2 for usage and I/O errors.
"""

from __future__ import annotations

import argparse
import sys

from . import report
from .align import align_models, merge_aliases, support_check
from .cbr import adapt, compare, new_case, test_solution
from .dsl import parse_with_diagnostics, print_case, print_workspace, Workspace
from .errors import CaseError, ModelError, ParseError, RefinementError, RocError, UnknownIdError
from .netsim import DEFAULT_BOUND, reachable, soundness_lite
from .process import flatten, refine
from .repository import Repository

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


class _Exit(Exception):
    def __init__(self, code, message=""):
        super().__init__(message)
        self.code = code


def _out(text: str) -> None:
    sys.stdout.write(text)


def _err(text: str) -> None:
    sys.stderr.write(text.rstrip("\n") + "\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as e:
        raise _Exit(EXIT_USAGE, f"{path}: error: cannot read file: {e}") from None


def _load(path: str) -> Workspace:
    ws, diags = parse_with_diagnostics(_read(path))
    if ws is None:
        for d in diags:
            _err(d.format(path))
        raise _Exit(EXIT_FINDINGS)
    return ws


def _aliases(ws, args):
    maps = []
    for path in args.aliases or ():
        maps.extend(_load(path).aliases.values())
    for key in args.alias_map or ():
        maps.append(ws.alias_map(key))
    return merge_aliases(maps) if maps else None


# ---------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    status = EXIT_OK
    for path in args.files:
        try:
            text = _read(path)
        except _Exit as e:
            _err(str(e))
            status = EXIT_USAGE
            continue
        ws, diags = parse_with_diagnostics(text)
        for d in diags:
            _out(d.format(path) + "\n")
        if ws is None:
            status = max(status, EXIT_FINDINGS)
        elif not diags:
            _out(f"{path}: ok\n")
    return status


def cmd_fragments(args) -> int:
    m = _load(args.file).net(args.model)
    _out(report.render(report.FRAGMENT_COLUMNS, report.fragment_rows(m), args.format))
    return EXIT_OK


def cmd_align(args) -> int:
    ws = _load(args.file)
    asis, ref = ws.net(args.asis), ws.net(args.reference)
    catalog = ws.catalog(args.catalog) if args.catalog else None
    rep = align_models(asis, ref, catalog, _aliases(ws, args))
    if args.format == "tsv":
        _out(report.tsv(report.ALIGN_COLUMNS, report.alignment_rows(rep)))
    else:
        _out(report.alignment_text(rep))
    findings = rep.findings
    if args.goals:
        support = support_check(ws.nets, ws.goal_graph(args.goals), rep, asis.id, ref.id)
        if args.format != "tsv":
            _out("unsupported goals: " + (", ".join(support.unsupported) or "none") + "\n")
        for gid in support.unrealized:
            _err(f"warning: goal {gid!r} has no realization link")
        findings = findings or bool(support.unsupported)
    return EXIT_FINDINGS if findings else EXIT_OK


def _marking(m, labels, default):
    if not labels:
        if default is None:
            raise _Exit(EXIT_USAGE, f"model {m.id!r} has no default place; give labels explicitly")
        return frozenset([default.id])
    try:
        return frozenset(m.place_by_label(label).id for label in labels)
    except UnknownIdError as e:
        raise _Exit(EXIT_USAGE, f"error: {e}") from None


def cmd_simulate(args) -> int:
    m = _load(args.file).net(args.model)
    src = _marking(m, args.from_, m.start)
    dst = _marking(m, args.to, m.exit)
    result = reachable(m, src, dst, args.bound)
    if result.verdict == "reachable":
        _out(f"reachable in {len(result.path)} step(s)\n")
        rows = [(k, tid, m.transition(tid).strategy.raw) for k, tid in enumerate(result.path, 1)]
        if rows:
            _out(report.text_table(("step", "transition", "strategy"), rows))
        return EXIT_OK
    if result.verdict == "truncated":
        _out(f"truncated after {result.explored} marking(s)\n")
    else:
        _out(f"unreachable ({result.explored} marking(s) explored)\n")
    return EXIT_FINDINGS


def cmd_soundness(args) -> int:
    m = _load(args.file).net(args.model)
    rep = soundness_lite(m, args.bound)
    _out(f"exit reachable: {'yes' if rep.exit_reachable else 'no'}\n")
    _out("dead transitions: " + (", ".join(sorted(rep.dead_transitions)) or "none") + "\n")
    if rep.unsafe_transitions:
        _out("unsafe transitions: " + ", ".join(sorted(rep.unsafe_transitions)) + "\n")
    _out(f"explored markings: {rep.explored_markings}{' (truncated)' if rep.truncated else ''}\n")
    ok = rep.exit_reachable and not rep.dead_transitions and not rep.truncated
    return EXIT_OK if ok else EXIT_FINDINGS


def cmd_refine(args) -> int:
    m = _load(args.file).net(args.model)
    tree = refine(m, args.parent, args.child)
    if args.flatten:
        flat = flatten(m, tree)
        _out(print_workspace(Workspace(nets={flat.id: flat})))
    else:
        rows = [(c.id, c.source_text, c.target_text, c.strategy.raw) for c in tree.children]
        _out(report.render(("id", "source", "target", "strategy"), rows, args.format))
    return EXIT_OK


def cmd_export_dot(args) -> int:
    ws = _load(args.file)
    if args.id in ws.nets:
        _out(report.model_to_dot(ws.nets[args.id]))
    elif args.id in ws.goals:
        _out(report.goals_to_dot(ws.goals[args.id]))
    else:
        raise _Exit(EXIT_USAGE, f"error: no net or goal graph {args.id!r} in {args.file}")
    return EXIT_OK


def _repo(args) -> Repository:
    try:
        return Repository.from_env(args.repo)
    except CaseError as e:
        raise _Exit(EXIT_USAGE, f"error: {e}") from None
    except ParseError as e:
        for d in e.diagnostics:
            _err(d.format(str(args.repo)))
        raise _Exit(EXIT_FINDINGS) from None


def _query(ws, args):
    if args.case:
        return ws.case(args.case)
    if not args.asis:
        raise _Exit(EXIT_USAGE, "error: give --case ID or --asis MODEL")
    return new_case(ws, args.id or f"{args.asis}_case", args.asis, args.tobe,
                    catalog=args.catalog, goals=args.goals,
                    enterprise_type=args.enterprise_type or "",
                    targeted_process=args.targeted_process or "",
                    project_type=args.project_type or "", notes=args.notes or "")


def cmd_case(args) -> int:
    ws = _load(args.file)
    query = _query(ws, args)
    action = args.action
    if action == "new":
        _out("\n".join(print_case(query)) + "\n")
        return EXIT_OK
    repo = _repo(args)
    if action == "retain":
        try:
            repo.retain(query)
        except CaseError as e:
            _err(f"error: {e}")
            return EXIT_FINDINGS
        _out(f"retained {query.id} in {repo.path}\n")
        return EXIT_OK
    if action == "retrieve":
        ranked = repo.retrieve(query, args.top)
        rows = [(k, c.id) + report.score_cells(s) for k, (c, s) in enumerate(ranked, 1)]
        _out(report.render(("rank", "case", "total", "fragments", "goals", "components"),
                           rows, args.format))
        if ranked and args.format != "tsv":
            best = compare(query, ranked[0][0], repo.weights)
            _out(f"\nclosest: {ranked[0][0].id}\n")
            _out(f"  shared As-Is fragments: {len(best.shared_fragments)}\n")
            _out(f"  only in query: {len(best.only_in_query)}\n")
            _out(f"  only in case: {len(best.only_in_case)}\n")
        return EXIT_OK
    solved = repo.get(args.solved)
    aliases = _aliases(ws, args)
    adaptation = adapt(solved, query, aliases)
    if action == "adapt":
        rows = [(f.id, f.source_text, f.target_text, f.strategy.raw) for f in adaptation.proposal]
        _out(report.render(("id", "source", "target", "strategy"), rows, args.format))
        if adaptation.non_transferable and args.format != "tsv":
            _out("non-transferable: " + ", ".join(f.id for f in adaptation.non_transferable) + "\n")
        return EXIT_OK
    catalog = ws.catalog(args.catalog) if args.catalog else None
    rep = test_solution(adaptation.proposal, query, catalog, aliases)
    if args.format == "tsv":
        _out(report.tsv(report.ALIGN_COLUMNS, report.alignment_rows(rep)))
    else:
        _out(report.alignment_text(rep))
    return EXIT_OK if rep.coverage == 1.0 and not rep.uncovered else EXIT_FINDINGS


# ---------------------------------------------------------------- wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roc", description="Goal, process and ERP alignment toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p, choices=("text", "tsv")):
        p.add_argument("--format", choices=choices, default="text")

    def alias_opts(p):
        p.add_argument("--aliases", action="append", metavar="FILE",
                       help="file with alias blocks (repeatable)")
        p.add_argument("--alias-map", action="append", metavar="ID",
                       help="alias map declared in the workspace (repeatable)")

    p = sub.add_parser("validate", help="parse files and run all validators")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("fragments", help="list the fragments of a model")
    p.add_argument("file")
    p.add_argument("model")
    fmt(p)
    p.set_defaults(func=cmd_fragments)

    p = sub.add_parser("align", help="align an As-Is model with a reference model")
    p.add_argument("file")
    p.add_argument("asis")
    p.add_argument("reference")
    p.add_argument("--catalog", metavar="ID")
    p.add_argument("--goals", metavar="ID", help="also run the goal support check")
    alias_opts(p)
    fmt(p)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("simulate", help="search for a firing sequence between markings")
    p.add_argument("file")
    p.add_argument("model")
    p.add_argument("--from", dest="from_", action="append", metavar="LABEL",
                   help="place label in the initial marking (repeatable; default: start place)")
    p.add_argument("--to", action="append", metavar="LABEL",
                   help="place label in the target marking (repeatable; default: exit place)")
    p.add_argument("--bound", type=_positive, default=DEFAULT_BOUND)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("soundness", help="exit reachability and dead transitions")
    p.add_argument("file")
    p.add_argument("model")
    p.add_argument("--bound", type=_positive, default=DEFAULT_BOUND)
    p.set_defaults(func=cmd_soundness)

    p = sub.add_parser("refine", help="refine a fragment into alternative child strategies")
    p.add_argument("file")
    p.add_argument("model")
    p.add_argument("parent", help="fragment id, e.g. PF1")
    p.add_argument("--child", action="append", required=True, metavar="STRATEGY")
    p.add_argument("--flatten", action="store_true", help="print the flattened net instead")
    fmt(p)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("export-dot", help="DOT rendering of a net or goal graph")
    p.add_argument("file")
    p.add_argument("id")
    p.add_argument("--format", choices=("dot",), default="dot")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("case", help="case-based reuse: new, retrieve, retain, adapt, test")
    p.add_argument("action", choices=("new", "retrieve", "retain", "adapt", "test"))
    p.add_argument("file", help="workspace holding the query case or its models")
    p.add_argument("--case", metavar="ID", help="use a case block from FILE as the query")
    p.add_argument("--id", help="id for a case built from models")
    p.add_argument("--asis", metavar="MODEL")
    p.add_argument("--tobe", metavar="MODEL")
    p.add_argument("--catalog", metavar="ID")
    p.add_argument("--goals", metavar="ID")
    p.add_argument("--enterprise-type")
    p.add_argument("--targeted-process")
    p.add_argument("--project-type")
    p.add_argument("--notes")
    p.add_argument("--solved", metavar="ID", help="stored case to reuse (adapt, test)")
    p.add_argument("--repo", metavar="PATH", help="repository file (overrides ROC_REPO)")
    p.add_argument("--top", type=_positive, default=5)
    alias_opts(p)
    fmt(p)
    p.set_defaults(func=cmd_case)
    return parser


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "case" and args.action in ("adapt", "test") and not args.solved:
        parser.error("case adapt/test need --solved ID")
    try:
        return args.func(args)
    except _Exit as e:
        if str(e):
            _err(str(e))
        return e.code
    except UnknownIdError as e:
        _err(f"error: {e}")
        return EXIT_USAGE
    except (ModelError, RefinementError, CaseError) as e:
        _err(f"error: {e}")
        for v in getattr(e, "violations", ()):
            _err(f"  {v}")
        return EXIT_FINDINGS
    except RocError as e:
        _err(f"error: {e}")
        return EXIT_FINDINGS


if __name__ == "__main__":
    sys.exit(main())

"""Line-oriented ``.roc`` text format for workspaces.

Blocks open with a header line and collect the member lines that follow::

    net electro_asis level=strategy
      place p0 "start" start
      place p1 "support material"
      trans t_pf1 "manual strategy" p0 -> p1

    goals electro_goals
      stakeholder s_mgmt "managers" role="determine objectives"
      node n_info need "need for information" horizon=strategic
      edge n_info derives g_payroll

    catalog sap_pp
      component "Demand management" module="PP" provides="demand management strategy"

    aliases electro
      alias "stock" = "stock product"

    case geneva_om
      targeted_process "order management"
      asis PF1 "customer inquiry" -> "order generation" "not forecasting strategy"

Indentation is cosmetic. ``#`` starts a comment outside strings. The
printer emits one canonical form: categories in a fixed order, entries
sorted by id, two-space indentation, LF line endings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .align import AliasMap, Component, ComponentCatalog
from .cbr import Case
from .common import natural_key, normalize_label
from .errors import ModelError, ParseError, UnknownIdError
from .goals import EDGE_KINDS, Edge, GoalGraph, GoalNode, Stakeholder, split_target, validate_goals
from .process import EXIT, START, Fragment, Place, ProcessModel, Transition, extract_fragments, \
    normalize_strategy, validate_model

CASE_TEXT_FIELDS = ("enterprise_type", "targeted_process", "project_type")


@dataclass
class Workspace:
    nets: dict = field(default_factory=dict)
    goals: dict = field(default_factory=dict)
    catalogs: dict = field(default_factory=dict)
    aliases: dict = field(default_factory=dict)
    cases: dict = field(default_factory=dict)

    def _get(self, table, kind, key):
        try:
            return table[key]
        except KeyError:
            raise UnknownIdError(kind, key) from None

    def net(self, key) -> ProcessModel:
        return self._get(self.nets, "process model", key)

    def goal_graph(self, key) -> GoalGraph:
        return self._get(self.goals, "goal graph", key)

    def catalog(self, key) -> ComponentCatalog:
        return self._get(self.catalogs, "catalog", key)

    def alias_map(self, key) -> AliasMap:
        return self._get(self.aliases, "alias map", key)

    def case(self, key) -> Case:
        return self._get(self.cases, "case", key)

    def is_empty(self) -> bool:
        return not (self.nets or self.goals or self.catalogs or self.aliases or self.cases)


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str
    line: int
    column: int
    message: str

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.column}: {self.severity}: {self.message}"

    def __str__(self):
        return self.format()


# ---------------------------------------------------------------- lexing

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<arrow>->)
  | (?P<punct>[=,])
  | (?P<comment>\#.*)
  | (?P<word>(?:[^\s"=,\#-]|-(?!>))+)
  | (?P<bad>.)
""", re.VERBOSE)

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}
_ID = re.compile(r"^[\w.:]+$")


class _Syntax(Exception):
    def __init__(self, col, msg):
        super().__init__(msg)
        self.col = col


@dataclass
class _Tok:
    kind: str
    value: str
    col: int


def _unescape(body: str, col: int) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                raise _Syntax(col + i + 1, f"unknown escape \\{nxt}")
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _tokenize(line: str) -> list[_Tok]:
    toks = []
    for m in _TOKEN.finditer(line):
        kind = m.lastgroup
        col = m.start() + 1
        if kind in ("ws", "comment"):
            continue
        if kind == "bad":
            if m.group() == '"':
                raise _Syntax(col, "unterminated string")
            raise _Syntax(col, f"unexpected character {m.group()!r}")
        value = m.group()
        if kind == "str":
            value = _unescape(value[1:-1], col)
        toks.append(_Tok(kind, value, col))
    return toks


def quote(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    return f'"{out}"'


class _Line:
    """Cursor over the tokens of one statement."""

    def __init__(self, toks, end_col):
        self.toks = toks
        self.i = 0
        self.end_col = end_col

    @property
    def col(self):
        return self.toks[self.i].col if self.i < len(self.toks) else self.end_col

    def peek(self, kind=None, value=None):
        if self.i >= len(self.toks):
            return None
        t = self.toks[self.i]
        if kind and t.kind != kind or value is not None and t.value != value:
            return None
        return t

    def take(self, kind, what):
        t = self.peek(kind)
        if t is None:
            raise _Syntax(self.col, f"expected {what}")
        self.i += 1
        return t

    def ident(self, what="identifier"):
        t = self.take("word", what)
        if not _ID.match(t.value):
            raise _Syntax(t.col, f"bad {what} {t.value!r}")
        return t.value

    def string(self, what):
        return self.take("str", f"quoted {what}").value

    def idlist(self, what):
        ids = [self.ident(what)]
        while self.peek("punct", ","):
            self.i += 1
            ids.append(self.ident(what))
        return ids

    def options(self, allowed):
        """``key=value[, value...]`` pairs up to the end of the line."""
        opts = {}
        while self.i < len(self.toks):
            key = self.take("word", "option name")
            if key.value not in allowed:
                raise _Syntax(key.col, f"unknown option {key.value!r}")
            self.expect_eq()
            values = [self._value()]
            while self.peek("punct", ","):
                self.i += 1
                values.append(self._value())
            if key.value in opts:
                raise _Syntax(key.col, f"option {key.value!r} given twice")
            opts[key.value] = values
        return opts

    def expect_eq(self):
        if not self.peek("punct", "="):
            raise _Syntax(self.col, "expected '='")
        self.i += 1

    def _value(self):
        t = self.peek()
        if t is None or t.kind not in ("str", "word"):
            raise _Syntax(self.col, "expected option value")
        self.i += 1
        return t.value

    def done(self):
        if self.i < len(self.toks):
            raise _Syntax(self.col, f"unexpected {self.toks[self.i].value!r}")


# ---------------------------------------------------------------- parsing

@dataclass
class _Block:
    kind: str
    id: str
    line: int
    col: int
    opts: dict
    members: list = field(default_factory=list)  # (keyword, ident, payload, line, col)


HEADERS = ("net", "goals", "catalog", "aliases", "case")
MEMBERS = {
    "net": ("place", "trans"),
    "goals": ("node", "stakeholder", "edge"),
    "catalog": ("component",),
    "aliases": ("alias",),
    "case": CASE_TEXT_FIELDS + ("goal", "asis", "tobe", "map", "notes"),
}


def _statement(kw, cur: _Line):
    """Parse the rest of a statement after its keyword."""
    if kw == "net":
        ident = cur.ident("net id")
        opts = cur.options({"level"})
        return ident, {"level": opts.get("level", ["strategy"])[-1]}
    if kw in ("goals", "catalog", "aliases", "case"):
        ident = cur.ident(f"{kw} id")
        cur.done()
        return ident, {}
    if kw == "place":
        pid = cur.ident("place id")
        label = cur.string("place label")
        kind = "intermediate"
        flag = cur.peek("word")
        if flag is not None:
            if flag.value not in (START, EXIT):
                raise _Syntax(flag.col, f"expected 'start' or 'exit', got {flag.value!r}")
            kind = flag.value
            cur.i += 1
        cur.done()
        return pid, {"label": label, "kind": kind}
    if kw == "trans":
        tid = cur.ident("transition id")
        strategy = cur.string("strategy")
        ins = cur.idlist("input place id")
        cur.take("arrow", "'->'")
        outs = cur.idlist("output place id")
        opts = cur.options({"fragment"})
        return tid, {"strategy": strategy, "inputs": ins, "outputs": outs,
                     "fragments": opts.get("fragment", [])}
    if kw == "node":
        nid = cur.ident("node id")
        kind = cur.take("word", "node kind").value
        label = cur.string("node label")
        opts = cur.options({"horizon"})
        return nid, {"kind": kind, "label": label, "horizon": opts.get("horizon", [""])[-1]}
    if kw == "stakeholder":
        sid = cur.ident("stakeholder id")
        name = cur.string("stakeholder name")
        opts = cur.options({"role"})
        return sid, {"name": name, "role": opts.get("role", [""])[-1]}
    if kw == "edge":
        src = cur.ident("edge source")
        kind = cur.take("word", "edge kind")
        if kind.value not in EDGE_KINDS:
            raise _Syntax(kind.col, f"unknown edge kind {kind.value!r}")
        dst = cur.ident("edge target")
        cur.done()
        return f"{src}->{dst}", {"src": src, "kind": kind.value, "dst": dst}
    if kw == "component":
        name = cur.string("component name")
        opts = cur.options({"module", "provides"})
        return name, {"module": opts.get("module", [""])[-1], "provides": opts.get("provides", [])}
    if kw == "alias":
        a = cur.string("label")
        cur.expect_eq()
        b = cur.string("label")
        cur.done()
        return a, {"a": a, "b": b}
    if kw in CASE_TEXT_FIELDS or kw in ("goal", "notes"):
        text = cur.string(kw.replace("_", " "))
        cur.done()
        return kw, {"text": text}
    if kw in ("asis", "tobe"):
        fid = cur.ident("fragment id")
        src = cur.string("source state")
        cur.take("arrow", "'->'")
        dst = cur.string("target state")
        strategy = cur.string("strategy")
        cur.done()
        return fid, {"source": src, "target": dst, "strategy": strategy}
    if kw == "map":
        fid = cur.ident("fragment id")
        comp = cur.string("component name")
        cur.done()
        return fid, {"component": comp}
    raise AssertionError(kw)


def _lex(text: str, diags: list) -> list[_Block]:
    blocks: list[_Block] = []
    for lineno, line in enumerate(text.split("\n"), 1):
        try:
            toks = _tokenize(line)
        except _Syntax as e:
            diags.append(ParseDiagnostic("error", lineno, e.col, str(e)))
            continue
        if not toks:
            continue
        head = toks[0]
        cur = _Line(toks[1:], len(line.rstrip()) + 1)
        kw = head.value
        if head.kind != "word" or (kw not in HEADERS and not any(kw in m for m in MEMBERS.values())):
            diags.append(ParseDiagnostic("error", lineno, head.col, f"unknown statement {head.value!r}"))
            continue
        try:
            ident, payload = _statement(kw, cur)
        except _Syntax as e:
            diags.append(ParseDiagnostic("error", lineno, e.col, str(e)))
            continue
        if kw in HEADERS:
            blocks.append(_Block(kw, ident, lineno, head.col, payload))
            continue
        if not blocks or kw not in MEMBERS[blocks[-1].kind]:
            where = f"a '{blocks[-1].kind}' block" if blocks else "any block"
            diags.append(ParseDiagnostic("error", lineno, head.col,
                                         f"'{kw}' is not allowed in {where}"))
            continue
        blocks[-1].members.append((kw, ident, payload, lineno, head.col))
    return blocks


def parse_with_diagnostics(text: str):
    """Return ``(workspace or None, diagnostics)``; the workspace is None when any error occurred."""
    diags: list[ParseDiagnostic] = []
    if text.startswith("\ufeff"):
        text = text[1:]
    blocks = _lex(text, diags)
    ws = Workspace()
    tables = {"net": ws.nets, "goals": ws.goals, "catalog": ws.catalogs,
              "aliases": ws.aliases, "case": ws.cases}
    positions = {}
    for b in blocks:
        table = tables[b.kind]
        if b.id in table:
            diags.append(ParseDiagnostic("error", b.line, b.col, f"duplicate {b.kind} id {b.id!r}"))
            continue
        builder = _BUILDERS[b.kind]
        table[b.id], positions[(b.kind, b.id)] = builder(b, diags)

    for b in blocks:
        obj = tables[b.kind].get(b.id)
        pos = positions.get((b.kind, b.id))
        if obj is None or pos is None:
            continue
        _check(b, obj, pos, ws, diags)

    diags.sort(key=lambda d: (d.line, d.column))
    if any(d.severity == "error" for d in diags):
        return None, diags
    return ws, diags


def parse(text: str) -> Workspace:
    ws, diags = parse_with_diagnostics(text)
    if ws is None:
        raise ParseError(diags)
    return ws


def _build_net(b: _Block, diags):
    places, transitions, pos = [], [], {}
    for kw, ident, p, line, col in b.members:
        pos.setdefault(ident, (line, col))
        if kw == "place":
            places.append(Place(ident, p["label"], p["kind"]))
        else:
            try:
                strategy = normalize_strategy(p["strategy"], ident)
            except ModelError as e:
                diags.append(ParseDiagnostic("error", line, col, str(e)))
                continue
            transitions.append(Transition(ident, strategy, frozenset(p["inputs"]),
                                          frozenset(p["outputs"]), tuple(p["fragments"])))
    return ProcessModel(b.id, tuple(places), tuple(transitions), b.opts["level"]), pos


def _build_goals(b: _Block, diags):
    nodes, holders, edges, pos = [], [], [], {}
    for kw, ident, p, line, col in b.members:
        if kw == "edge":
            e = Edge(p["src"], p["kind"], p["dst"])
            if e in edges:
                diags.append(ParseDiagnostic("warning", line, col, f"duplicate edge {ident} ignored"))
                continue
            edges.append(e)
            pos[("edge", e)] = (line, col)
        elif kw == "node":
            nodes.append(GoalNode(ident, p["label"], p["kind"], p["horizon"]))
        else:
            holders.append(Stakeholder(ident, p["name"], p["role"]))
        pos.setdefault(ident, (line, col))
    return GoalGraph(b.id, tuple(nodes), tuple(holders), tuple(edges)), pos


def _build_catalog(b: _Block, diags):
    comps, pos = [], {}
    for _, name, p, line, col in b.members:
        pos.setdefault(name, (line, col))
        comps.append(Component(name, p["module"], tuple(p["provides"])))
    return ComponentCatalog(b.id, tuple(comps)), pos


def _build_aliases(b: _Block, diags):
    pairs = tuple((p["a"], p["b"]) for _, _, p, _, _ in b.members)
    return AliasMap(b.id, pairs), {}


def _build_case(b: _Block, diags):
    text = {k: "" for k in CASE_TEXT_FIELDS + ("notes",)}
    goals, asis, tobe, cmap, pos = set(), [], [], [], {}
    for kw, ident, p, line, col in b.members:
        if kw in text:
            if text[kw]:
                diags.append(ParseDiagnostic("error", line, col, f"'{kw}' given twice in case {b.id!r}"))
            text[kw] = p["text"]
        elif kw == "goal":
            goals.add(normalize_label(p["text"]))
        elif kw in ("asis", "tobe"):
            try:
                frag = Fragment.make(ident, p["source"], p["target"], p["strategy"])
            except ModelError as e:
                diags.append(ParseDiagnostic("error", line, col, str(e)))
                continue
            (asis if kw == "asis" else tobe).append(frag)
            pos.setdefault((kw, ident), (line, col))
        else:
            cmap.append((ident, p["component"]))
            pos.setdefault(("map", ident, p["component"]), (line, col))
    case = Case(b.id, text["enterprise_type"], text["targeted_process"], text["project_type"],
                frozenset(goals), tuple(asis), tuple(tobe), tuple(cmap), text["notes"])
    return case, pos


_BUILDERS = {
    "net": _build_net,
    "goals": _build_goals,
    "catalog": _build_catalog,
    "aliases": _build_aliases,
    "case": _build_case,
}


def _check(b: _Block, obj, pos, ws: Workspace, diags):
    def at(key):
        return pos.get(key, (b.line, b.col))

    def err(key, msg):
        line, col = at(key)
        diags.append(ParseDiagnostic("error", line, col, msg))

    if b.kind == "net":
        for v in validate_model(obj):
            err(v.element, f"{v.code}: {v.message}")
    elif b.kind == "goals":
        edge_pos = {}
        for e in obj.edges:
            edge_pos.setdefault(f"{e.src}->{e.dst}", ("edge", e))
        for v in validate_goals(obj):
            key = edge_pos.get(v.element, v.element)
            err(key, f"{v.code}: {v.message}")
        for e in obj.edges:
            if e.kind != "realized_by":
                continue
            model_id, frag = split_target(e.dst)
            if model_id not in ws.nets:
                err(("edge", e), f"dangling reference: no net {model_id!r}")
            elif frag is not None:
                try:
                    ids = {f.id for f in extract_fragments(ws.nets[model_id])}
                except ModelError:
                    continue
                if frag not in ids:
                    err(("edge", e), f"dangling reference: net {model_id!r} has no fragment {frag}")
    elif b.kind == "catalog":
        for v in obj.validate():
            err(v.element, f"{v.code}: {v.message}")
    elif b.kind == "case":
        for kind, frags in (("asis", obj.asis_fragments), ("tobe", obj.tobe_fragments)):
            seen = set()
            for f in frags:
                if f.id in seen:
                    err((kind, f.id), f"duplicate {kind} fragment id {f.id}")
                seen.add(f.id)
        tobe_ids = {f.id for f in obj.tobe_fragments}
        seen_map = set()
        for fid, comp in obj.component_map:
            if fid not in tobe_ids:
                err(("map", fid, comp), f"dangling reference: case {obj.id!r} has no To-Be fragment {fid}")
            if (fid, comp) in seen_map:
                err(("map", fid, comp), f"duplicate mapping {fid} -> {comp!r}")
            seen_map.add((fid, comp))


# ---------------------------------------------------------------- printing

def print_workspace(ws: Workspace) -> str:
    blocks = []
    for key in sorted(ws.nets):
        blocks.append(_print_net(ws.nets[key]))
    for key in sorted(ws.goals):
        blocks.append(_print_goals(ws.goals[key]))
    for key in sorted(ws.catalogs):
        blocks.append(_print_catalog(ws.catalogs[key]))
    for key in sorted(ws.aliases):
        a = ws.aliases[key]
        blocks.append([f"aliases {a.id}"] + [f"  alias {quote(x)} = {quote(y)}" for x, y in a.pairs])
    for key in sorted(ws.cases):
        blocks.append(print_case(ws.cases[key]))
    return "\n".join("\n".join(lines) + "\n" for lines in blocks)


def _print_net(m: ProcessModel) -> list[str]:
    lines = [f"net {m.id} level={m.level}"]
    for p in m.places:
        flag = f" {p.kind}" if p.kind in (START, EXIT) else ""
        lines.append(f"  place {p.id} {quote(p.label)}{flag}")
    for t in m.transitions:
        ins = ",".join(sorted(t.inputs, key=natural_key))
        outs = ",".join(sorted(t.outputs, key=natural_key))
        tail = f" fragment={','.join(t.fragment_ids)}" if t.fragment_ids else ""
        lines.append(f"  trans {t.id} {quote(t.strategy.raw)} {ins} -> {outs}{tail}")
    return lines


def _print_goals(g: GoalGraph) -> list[str]:
    lines = [f"goals {g.id}"]
    for s in g.stakeholders:
        role = f" role={quote(s.role)}" if s.role else ""
        lines.append(f"  stakeholder {s.id} {quote(s.name)}{role}")
    for n in g.nodes:
        lines.append(f"  node {n.id} {n.kind} {quote(n.label)} horizon={n.horizon}")
    for e in g.edges:
        lines.append(f"  edge {e.src} {e.kind} {e.dst}")
    return lines


def _print_catalog(c: ComponentCatalog) -> list[str]:
    lines = [f"catalog {c.id}"]
    for comp in c.components:
        provides = ", ".join(quote(s) for s in comp.provides)
        lines.append(f"  component {quote(comp.name)} module={quote(comp.module)} provides={provides}")
    return lines


def print_case(c: Case) -> list[str]:
    lines = [f"case {c.id}"]
    for name in CASE_TEXT_FIELDS:
        value = getattr(c, name)
        if value:
            lines.append(f"  {name} {quote(value)}")
    for g in sorted(c.goal_labels):
        lines.append(f"  goal {quote(g)}")
    for kind, frags in (("asis", c.asis_fragments), ("tobe", c.tobe_fragments)):
        for f in frags:
            lines.append(f"  {kind} {f.id} {quote(f.source_text or f.source)} -> "
                         f"{quote(f.target_text or f.target)} {quote(f.strategy.raw)}")
    for fid, comp in c.component_map:
        lines.append(f"  map {fid} {quote(comp)}")
    if c.notes:
        lines.append(f"  notes {quote(c.notes)}")
    return lines


def load(path) -> Workspace:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())

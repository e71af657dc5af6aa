"""Text, TSV and DOT renderings of models, goal graphs and alignment reports."""

from __future__ import annotations

from .align import AlignmentReport
from .cbr import SimilarityScore
from .goals import GoalGraph
from .process import ProcessModel, extract_fragments

ALIGN_COLUMNS = ("id", "source", "target", "asis_strategy", "ref_strategy", "gap", "components")
FRAGMENT_COLUMNS = ("id", "source", "target", "strategy", "polarity")


def text_table(headers, rows) -> str:
    rows = [[str(c) for c in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def tsv(headers, rows) -> str:
    def cell(value):
        value = " ".join(str(value).split())
        return value or "-"

    lines = ["\t".join(headers)] + ["\t".join(cell(c) for c in r) for r in rows]
    return "\n".join(lines) + "\n"


def render(headers, rows, fmt) -> str:
    return tsv(headers, rows) if fmt == "tsv" else text_table(headers, rows)


def fragment_rows(m: ProcessModel):
    return [(f.id, f.source_text, f.target_text, f.strategy.raw, f.strategy.polarity)
            for f in extract_fragments(m)]


def alignment_rows(report: AlignmentReport):
    """One row per pair, then unmatched reference rows, then unmatched As-Is rows."""
    rows = []
    for p in report.pairs:
        comps = "; ".join(report.components_for(p.reference.id))
        rows.append((p.reference.id, p.asis.source_text, p.asis.target_text,
                     p.asis.strategy.raw, p.reference.strategy.raw, p.gap, comps))
    for r in report.unmatched_reference:
        comps = "; ".join(report.components_for(r.id))
        rows.append((r.id, r.source_text, r.target_text, "", r.strategy.raw, "Unpaired", comps))
    for a in report.unmatched_asis:
        rows.append((a.id, a.source_text, a.target_text, a.strategy.raw, "", "Unmatched", ""))
    return rows


def alignment_text(report: AlignmentReport) -> str:
    out = [text_table(("asis", "ref", "source", "target", "asis_strategy", "ref_strategy", "gap"),
                      [(p.asis.id, p.reference.id + ("*" if p.alternative else ""),
                        p.asis.source_text, p.asis.target_text,
                        p.asis.strategy.raw, p.reference.strategy.raw, p.gap)
                       for p in report.pairs])]
    if any(p.alternative for p in report.pairs):
        out.append("* alternative reference fragments for the same As-Is fragment\n")
    out.append("\nunmatched As-Is: " + (", ".join(f.id for f in report.unmatched_asis) or "none") + "\n")
    out.append("unmatched reference: "
               + (", ".join(f.id for f in report.unmatched_reference) or "none") + "\n")
    if report.component_map or report.uncovered:
        out.append("\n" + text_table(("fragment", "component"), report.component_map))
        out.append("uncovered: " + (", ".join(report.uncovered) or "none") + "\n")
    out.append(f"\ncoverage: {report.coverage:.3f}\n")
    return "".join(out)


def score_cells(s: SimilarityScore):
    return (f"{s.total:.4f}", f"{s.fragment_sim:.4f}", f"{s.goal_sim:.4f}", f"{s.component_sim:.4f}")


# ---------------------------------------------------------------- DOT

def dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _digraph(name, nodes, edges) -> str:
    lines = [f"digraph {dot_quote(name)} {{"]
    for key in sorted(nodes):
        attrs = ", ".join(f"{k}={dot_quote(v)}" for k, v in nodes[key])
        lines.append(f"  {dot_quote(key)} [{attrs}];")
    for src, dst, label in sorted(edges):
        extra = f" [label={dot_quote(label)}]" if label else ""
        lines.append(f"  {dot_quote(src)} -> {dot_quote(dst)}{extra};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def model_to_dot(m: ProcessModel) -> str:
    nodes = {}
    edges = set()
    for p in m.places:
        attrs = [("shape", "doublecircle" if p.kind == "exit" else "circle"), ("label", p.label)]
        if p.kind == "start":
            attrs.append(("style", "bold"))
        nodes[f"p:{p.id}"] = attrs
    for t in m.transitions:
        nodes[f"t:{t.id}"] = [("shape", "box"), ("label", t.strategy.raw)]
        for i in t.inputs:
            edges.add((f"p:{i}", f"t:{t.id}", ""))
        for o in t.outputs:
            edges.add((f"t:{t.id}", f"p:{o}", ""))
    return _digraph(m.id, nodes, edges)


GOAL_SHAPES = {
    "need": "ellipse",
    "strategic_goal": "box",
    "operational_goal": "parallelogram",
    "change_goal": "hexagon",
    "objective": "diamond",
    "requirement": "note",
}


def goals_to_dot(g: GoalGraph) -> str:
    nodes = {}
    edges = set()
    for n in g.nodes:
        nodes[f"n:{n.id}"] = [("shape", GOAL_SHAPES.get(n.kind, "ellipse")), ("label", n.label)]
    for s in g.stakeholders:
        nodes[f"s:{s.id}"] = [("shape", "house"), ("label", s.name)]
    holders = {s.id for s in g.stakeholders}
    for e in g.edges:
        src = f"s:{e.src}" if e.src in holders else f"n:{e.src}"
        if e.kind == "realized_by":
            dst = f"r:{e.dst}"
            nodes[dst] = [("shape", "plaintext"), ("label", e.dst)]
        else:
            dst = f"n:{e.dst}"
        edges.add((src, dst, e.kind))
    return _digraph(g.id, nodes, edges)

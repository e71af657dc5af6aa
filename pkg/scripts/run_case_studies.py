"""Walk both case studies end to end and print every table.

    python scripts/run_case_studies.py
"""

from roc import fixtures
from roc.align import align_models, support_check
from roc.goals import trace
from roc.netsim import soundness_lite
from roc.process import extract_fragments, flatten_all, refine
from roc.report import ALIGN_COLUMNS, alignment_rows, alignment_text, text_table

SOP_REFINEMENT = {
    "PF1": ["product planning", "sales planning", "performance management"],
    "PF2": ["Master production scheduling", "capacity planning strategy", "material requirements planning"],
    "PF3": ["consolidation strategy", "feedback to demand and supply"],
    "PF4": ["performance review", "financial review", "approval/action items"],
}


def heading(text):
    print(f"\n== {text} " + "=" * max(0, 70 - len(text)))


def fragments(ws, model):
    heading(f"fragments of {model}")
    for f in extract_fragments(ws.net(model)):
        print(" ", f)


def electro():
    ws = fixtures.load("electro_tech")
    fragments(ws, "electro_asis")
    fragments(ws, "electro_tobe")
    heading("electro_asis vs electro_tobe (alias stock = stock product)")
    rep = align_models(ws.net("electro_asis"), ws.net("electro_tobe"), ws.catalog("sap_pp"),
                       ws.alias_map("electro"))
    print(alignment_text(rep))
    g = ws.goal_graph("electro_goals")
    heading("need paths behind 'automate payroll'")
    payroll = next(n.id for n in g.nodes if n.label == "automate payroll")
    for path in trace(g, payroll):
        print("  " + " -> ".join(g.node(x).label for x in path))


def geneva():
    ws = fixtures.load("geneva")
    for asis, ref, cat in (("geneva_om_asis", "geneva_om_sap", "geneva_om"),
                           ("geneva_sop_asis", "geneva_sop_sap", "apo")):
        heading(f"{asis} vs {ref}")
        rep = align_models(ws.net(asis), ws.net(ref), ws.catalog(cat))
        print(text_table(ALIGN_COLUMNS, alignment_rows(rep)), end="")
        print(f"coverage {rep.coverage:.3f}")
        res = support_check(ws.nets, ws.goal_graph("geneva_goals"), rep, asis, ref)
        print("unsupported goals:", ", ".join(res.unsupported) or "none")

    heading("geneva_sop_sap refined")
    m = ws.net("geneva_sop_sap")
    flat = flatten_all(m, [refine(m, pf, kids) for pf, kids in SOP_REFINEMENT.items()])
    for f in extract_fragments(flat):
        print(" ", f)

    heading("soundness")
    for ws_name in ("electro_tech", "geneva"):
        for mid, model in sorted(fixtures.load(ws_name).nets.items()):
            rep = soundness_lite(model)
            print(f"  {mid:18} exit reachable={rep.exit_reachable} dead={sorted(rep.dead_transitions)} "
                  f"markings={rep.explored_markings}")


if __name__ == "__main__":
    electro()
    geneva()

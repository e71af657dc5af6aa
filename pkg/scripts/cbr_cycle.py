"""One pass of the reuse cycle against a scratch copy of the bundled repository.

Builds a query from an As-Is model, retrieves the closest stored case,
compares, adapts its To-Be fragments, tests the proposal and retains the
solved query.

    python scripts/cbr_cycle.py [ASIS_MODEL] [CATALOG]
"""

import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from roc import fixtures
from roc.cbr import adapt, compare, new_case, test_solution
from roc.report import alignment_text, score_cells
from roc.repository import Repository


def main(asis="geneva_sop_asis", catalog="apo"):
    ws = fixtures.load("geneva")
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "cases.roc"
        path.write_text(fixtures.text("cases"), encoding="utf-8")
        repo = Repository(path)

        query = new_case(ws, "query", asis, goals="geneva_goals")
        print(f"query {query.id}: {len(query.asis_fragments)} As-Is fragments, "
              f"{len(query.goal_labels)} goal labels")

        ranked = repo.retrieve(query, k=len(repo))
        for case, score in ranked:
            print(f"  {case.id:14}", *score_cells(score))
        best = ranked[0][0]
        diff = compare(query, best)
        print(f"closest {best.id}: {len(diff.shared_fragments)} shared triplets, "
              f"goals in common {diff.shared_goals}")

        plan = adapt(best, query)
        print(f"adapted {len(plan.proposal)} fragment(s); not transferable: "
              f"{[f.id for f in plan.non_transferable] or 'none'}")
        report = test_solution(plan.proposal, query, ws.catalog(catalog))
        print(alignment_text(report))

        if report.coverage == 1.0 and not report.uncovered:
            solved = new_case(ws, "query_solved", asis, None, catalog=catalog, goals="geneva_goals")
            solved = replace(solved, tobe_fragments=tuple(plan.proposal),
                             component_map=tuple(report.component_map))
            repo.retain(solved)
            print(f"retained {solved.id}; repository now holds {len(Repository(path))} cases")


if __name__ == "__main__":
    main(*sys.argv[1:])

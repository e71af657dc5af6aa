"""Rebuild the bundled case repository (fixtures/cases.roc) from the study workspaces.

    python scripts/build_case_repo.py [OUT]
"""

import sys
from pathlib import Path

from roc import fixtures
from roc.cbr import new_case
from roc.dsl import Workspace, print_workspace

HEADER = "# Solved implementation cases built from the electro_tech and geneva fixtures.\n\n"


def build() -> Workspace:
    geneva = fixtures.load("geneva")
    electro = fixtures.load("electro_tech")
    cases = [
        new_case(geneva, "geneva_om", "geneva_om_asis", "geneva_om_sap",
                 catalog="geneva_om", goals="geneva_goals",
                 enterprise_type="multinational generic drug manufacturer",
                 targeted_process="order management",
                 project_type="SAP R/3 demand side implementation",
                 notes="PP demand management and MPS/MRP, MM inventory management, finance and control"),
        new_case(geneva, "geneva_sop", "geneva_sop_asis", "geneva_sop_sap",
                 catalog="apo", goals="geneva_goals",
                 enterprise_type="multinational generic drug manufacturer",
                 targeted_process="sales and operations planning",
                 project_type="SAP R/3 supply and demand integration",
                 notes="SOP combined with APO components"),
        new_case(electro, "electro_tech", "electro_asis", "electro_tobe",
                 catalog="sap_pp", goals="electro_goals",
                 enterprise_type="manufacturer of electrical components",
                 targeted_process="production planning",
                 project_type="SAP PP make-to-stock",
                 notes="Sales and Operations, MPS, MRP, QM and Product Costing"),
    ]
    return Workspace(cases={c.id: c for c in cases})


def main(argv):
    out = Path(argv[1]) if len(argv) > 1 else Path(str(fixtures.path("cases")))
    out.write_text(HEADER + print_workspace(build()), encoding="utf-8", newline="\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main(sys.argv)

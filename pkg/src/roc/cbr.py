"""Case-based reasoning over stored implementation cases.

The cycle is: create a case for the new problem, retrieve similar solved
cases, compare, reuse (adapt) a solved case's To-Be fragments, test the
proposal by aligning it against the problem, and retain the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .align import AlignmentReport, resolver_for, align, map_components
from .common import jaccard, normalize_label
from .errors import CaseError, UnknownIdError
from .goals import split_target
from .process import Fragment, extract_fragments


@dataclass(frozen=True)
class Case:
    id: str
    enterprise_type: str = ""
    targeted_process: str = ""
    project_type: str = ""
    goal_labels: frozenset = frozenset()
    asis_fragments: tuple = ()
    tobe_fragments: tuple = ()
    component_map: tuple = ()  # (fragment id, component name)
    notes: str = ""

    @property
    def solved(self) -> bool:
        return bool(self.tobe_fragments)

    @property
    def components(self) -> frozenset:
        return frozenset(name for _, name in self.component_map)


@dataclass(frozen=True)
class SimilarityWeights:
    fragment: float = 0.5
    goal: float = 0.3
    component: float = 0.2

    def __post_init__(self):
        parts = (self.fragment, self.goal, self.component)
        if min(parts) < 0 or abs(sum(parts) - 1.0) > 1e-9:
            raise ValueError(f"weights must be non-negative and sum to 1, got {parts}")


DEFAULT_WEIGHTS = SimilarityWeights()


@dataclass(frozen=True)
class SimilarityScore:
    total: float
    fragment_sim: float
    goal_sim: float
    component_sim: float


def new_case(workspace, case_id: str, asis: str, tobe: str | None = None, *,
             catalog: str | None = None, goals: str | None = None,
             enterprise_type: str = "", targeted_process: str = "",
             project_type: str = "", notes: str = "") -> Case:
    """Assemble a case from models in ``workspace`` (step A of the cycle).

    Goal labels are taken from the nodes of ``goals`` that have a
    realization link into either model. Without a To-Be model the case is
    a query: a problem without a solution.
    """
    asis_frags = tuple(extract_fragments(workspace.net(asis)))
    tobe_frags = tuple(extract_fragments(workspace.net(tobe))) if tobe else ()
    cmap = ()
    if catalog is not None:
        cat = workspace.catalog(catalog)
        cmap = tuple(map_components(tobe_frags, cat)[0])
    labels = set()
    if goals is not None:
        graph = workspace.goal_graph(goals)
        models = {asis, tobe} - {None}
        for node_id, targets in graph.realizations.items():
            if any(split_target(t)[0] in models for t in targets):
                labels.add(normalize_label(graph.node(node_id).label))
    return Case(case_id, enterprise_type, targeted_process, project_type,
                frozenset(labels), asis_frags, tobe_frags, cmap, notes)


def similarity(a: Case, b: Case, weights: SimilarityWeights = DEFAULT_WEIGHTS) -> SimilarityScore:
    fs = jaccard((f.triplet for f in a.asis_fragments), (f.triplet for f in b.asis_fragments))
    gs = jaccard(a.goal_labels, b.goal_labels)
    cs = jaccard(a.components, b.components)
    total = math.fsum((weights.fragment * fs, weights.goal * gs, weights.component * cs))
    return SimilarityScore(min(1.0, total), fs, gs, cs)


def retrieve(cases: Iterable[Case], query: Case, k: int = 5,
             weights: SimilarityWeights = DEFAULT_WEIGHTS) -> list[tuple[Case, SimilarityScore]]:
    """Top ``k`` cases by total similarity; ties go to the smaller case id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scored = [(c, similarity(query, c, weights)) for c in cases]
    scored.sort(key=lambda cs: (-cs[1].total, cs[0].id))
    return scored[:k]


@dataclass
class Comparison:
    score: SimilarityScore
    shared_fragments: list = field(default_factory=list)
    only_in_query: list = field(default_factory=list)
    only_in_case: list = field(default_factory=list)
    shared_goals: list = field(default_factory=list)
    only_query_goals: list = field(default_factory=list)
    only_case_goals: list = field(default_factory=list)


def compare(query: Case, retrieved: Case, weights: SimilarityWeights = DEFAULT_WEIGHTS) -> Comparison:
    """Per-part similarity plus the As-Is triplets and goals each side lacks."""
    q = {f.triplet for f in query.asis_fragments}
    r = {f.triplet for f in retrieved.asis_fragments}
    return Comparison(
        similarity(query, retrieved, weights),
        sorted(q & r), sorted(q - r), sorted(r - q),
        sorted(query.goal_labels & retrieved.goal_labels),
        sorted(query.goal_labels - retrieved.goal_labels),
        sorted(retrieved.goal_labels - query.goal_labels),
    )


@dataclass
class Adaptation:
    proposal: list = field(default_factory=list)
    non_transferable: list = field(default_factory=list)


def adapt(solved: Case, query: Case, aliases=None) -> Adaptation:
    """Copy the solved case's To-Be fragments whose endpoints occur in the query's As-Is."""
    if not solved.solved:
        raise CaseError(f"case {solved.id!r} has no To-Be fragments to reuse")
    resolve = resolver_for(aliases)
    wanted = {(resolve(f.source), resolve(f.target)) for f in query.asis_fragments}
    out = Adaptation()
    for f in solved.tobe_fragments:
        if (resolve(f.source), resolve(f.target)) in wanted:
            out.proposal.append(f)
        else:
            out.non_transferable.append(f)
    return out


def test_solution(proposal: Sequence[Fragment], query: Case, catalog=None, aliases=None) -> AlignmentReport:
    report = align(query.asis_fragments, proposal, aliases)
    report.component_map, report.uncovered = map_components(proposal, catalog)
    return report


test_solution.__test__ = False  # not a pytest test


def case_by_id(cases, case_id: str) -> Case:
    for c in cases:
        if c.id == case_id:
            return c
    raise UnknownIdError("case", case_id)

"""Pair As-Is fragments with reference fragments and classify the strategy gaps.

Fragments pair on their (source, target) endpoints after alias resolution.
Strategies are what differ between the two sides, and the difference is
classified. Reference fragments are then mapped to the catalog components
that provide their strategy.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .common import Violation, normalize_label
from .goals import GoalGraph, check_target, split_target
from .process import MANUAL, NEGATED, Fragment, ProcessModel, Strategy, as_strategy, extract_fragments

NO_GAP = "NoGap"
NEGATED_CAPABILITY = "NegatedCapability"
MANUAL_TO_AUTOMATED = "ManualToAutomated"
STRATEGY_MISMATCH = "StrategyMismatch"
GAP_CLASSES = (NO_GAP, NEGATED_CAPABILITY, MANUAL_TO_AUTOMATED, STRATEGY_MISMATCH)


@dataclass(frozen=True)
class Component:
    name: str
    module: str
    provides: tuple  # strategy labels as written

    @property
    def strategies(self) -> frozenset:
        return frozenset(as_strategy(s).canonical for s in self.provides)


@dataclass(frozen=True)
class ComponentCatalog:
    id: str
    components: tuple = ()

    def validate(self):
        out = []
        seen = set()
        for c in self.components:
            if c.name in seen:
                out.append(Violation("DuplicateComponent", c.name,
                                     f"component {c.name!r} listed twice in {self.id!r}"))
            seen.add(c.name)
            if not c.provides:
                out.append(Violation("EmptyProvides", c.name,
                                     f"component {c.name!r} provides no strategy"))
        return out


@dataclass(frozen=True)
class AliasMap:
    """Declared equalities between state labels, e.g. ``stock = stock product``."""

    id: str
    pairs: tuple = ()

    def resolver(self):
        return make_resolver(self.pairs)


def make_resolver(pairs: Iterable[tuple[str, str]]):
    """Return a function mapping a label to the smallest normalized label of its alias class."""
    parent: dict[str, str] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(normalize_label(a)), find(normalize_label(b))
        if ra != rb:
            lo, hi = sorted((ra, rb))
            parent[hi] = lo

    def resolve(label):
        key = normalize_label(label)
        return find(key) if key in parent else key

    return resolve


def merge_aliases(maps: Iterable[AliasMap]):
    return make_resolver([p for m in maps for p in m.pairs])


@dataclass(frozen=True)
class AlignmentPair:
    asis: Fragment
    reference: Fragment
    gap: str
    # the As-Is fragment has more than one reference candidate (branching To-Be net)
    alternative: bool = False


@dataclass
class AlignmentReport:
    pairs: list = field(default_factory=list)
    unmatched_asis: list = field(default_factory=list)
    unmatched_reference: list = field(default_factory=list)
    coverage: float = 0.0
    component_map: list = field(default_factory=list)
    uncovered: list = field(default_factory=list)

    @property
    def findings(self) -> bool:
        return bool(self.unmatched_asis or self.uncovered
                    or any(p.gap != NO_GAP for p in self.pairs))

    def components_for(self, ref_id: str) -> list[str]:
        return [name for fid, name in self.component_map if fid == ref_id]


def classify_gap(asis: Strategy, reference: Strategy) -> str:
    asis, reference = as_strategy(asis), as_strategy(reference)
    if asis.label == reference.label and asis.polarity == reference.polarity:
        return NO_GAP
    if asis.polarity == NEGATED:
        return NEGATED_CAPABILITY
    if asis.polarity == MANUAL:
        return MANUAL_TO_AUTOMATED
    return STRATEGY_MISMATCH


def align(asis: Sequence[Fragment], reference: Sequence[Fragment], aliases=None) -> AlignmentReport:
    """Endpoint-match two fragment lists.

    ``aliases`` is an :class:`AliasMap`, a list of label pairs, or a
    resolver function. Pairs come out in As-Is list order; candidates for
    one As-Is fragment are ordered by strategy label, then reference order.
    A candidate with the very same strategy is paired alone.
    """
    resolve = resolver_for(aliases)

    def key(f):
        return (resolve(f.source), resolve(f.target))

    candidates = defaultdict(list)
    for i, r in enumerate(reference):
        candidates[key(r)].append((r.strategy.canonical, i, r))

    report = AlignmentReport()
    used = set()
    for a in asis:
        cands = sorted(candidates.get(key(a), []), key=lambda c: (c[0], c[1]))
        if not cands:
            report.unmatched_asis.append(a)
            continue
        # an exact strategy match settles the pairing; otherwise every candidate is an alternative
        exact = [c for c in cands if classify_gap(a.strategy, c[2].strategy) == NO_GAP]
        cands = exact or cands
        for _, i, r in cands:
            used.add(i)
            report.pairs.append(AlignmentPair(a, r, classify_gap(a.strategy, r.strategy),
                                              alternative=len(cands) > 1))
    report.unmatched_reference = [r for i, r in enumerate(reference) if i not in used]
    matched = len(asis) - len(report.unmatched_asis)
    report.coverage = matched / len(asis) if asis else 1.0
    return report


def resolver_for(aliases):
    if aliases is None:
        return normalize_label
    if callable(aliases):
        return aliases
    if isinstance(aliases, AliasMap):
        return aliases.resolver()
    return make_resolver(aliases)


def map_components(reference: Sequence[Fragment], catalog: ComponentCatalog | None):
    """Return ``(component_map, uncovered)`` for the reference fragments.

    ``component_map`` lists ``(fragment id, component name)`` with the
    providers of one fragment sorted by name; ``uncovered`` lists the ids
    of fragments no component provides.
    """
    comps = sorted(catalog.components if catalog else (), key=lambda c: c.name)
    mapping, uncovered = [], []
    for f in reference:
        names = [c.name for c in comps if f.strategy.canonical in c.strategies]
        if not names:
            uncovered.append(f.id)
        mapping.extend((f.id, n) for n in names)
    return mapping, uncovered


def align_models(asis: ProcessModel, reference: ProcessModel, catalog=None, aliases=None):
    report = align(extract_fragments(asis), extract_fragments(reference), aliases)
    if catalog is not None:
        report.component_map, report.uncovered = map_components(extract_fragments(reference), catalog)
    return report


@dataclass
class SupportResult:
    unsupported: list = field(default_factory=list)
    unrealized: list = field(default_factory=list)  # warnings: goals with no realization link


def support_check(models, graph: GoalGraph, report: AlignmentReport,
                  asis_model: str, reference_model: str) -> SupportResult:
    """Flag goals whose realizing fragments keep a gap that no component closes.

    ``models`` maps model ids to process models; the two aligned models may be
    given by id or as models. Realization links to models
    other than the two aligned ones are outside this alignment and ignored.
    """
    asis_model = getattr(asis_model, "id", asis_model)
    reference_model = getattr(reference_model, "id", reference_model)
    result = SupportResult()
    covered = {fid for fid, _ in report.component_map}
    pairs_by_ref = defaultdict(list)
    pairs_by_asis = defaultdict(list)
    for p in report.pairs:
        pairs_by_ref[p.reference.id].append(p)
        pairs_by_asis[p.asis.id].append(p)
    realizations = graph.realizations

    for node in graph.nodes:
        if node.kind == "need":
            continue
        targets = realizations.get(node.id, ())
        if not targets:
            result.unrealized.append(node.id)
            continue
        flagged = False
        for target in targets:
            check_target(target, models)
            model_id, frag = split_target(target)
            if model_id not in (asis_model, reference_model):
                continue
            fids = [frag] if frag else [f.id for f in extract_fragments(models[model_id])]
            for fid in fids:
                if model_id == reference_model:
                    bad = any(p.gap != NO_GAP for p in pairs_by_ref[fid]) and fid not in covered
                else:
                    bad = not any(p.gap == NO_GAP or p.reference.id in covered
                                  for p in pairs_by_asis[fid])
                flagged = flagged or bad
        if flagged:
            result.unsupported.append(node.id)
    return result


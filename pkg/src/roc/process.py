"""Strategy-labelled Petri nets and the fragments extracted from them.

A fragment is the triplet ``<source state, target state, strategy>`` that
describes one transition of a net. Fragments are the unit that alignment,
refinement and case storage operate on.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .common import Violation, collapse, normalize_label
from .errors import ModelError, RefinementError, UnknownIdError

POSITIVE = "positive"
NEGATED = "negated"
MANUAL = "manual"

START = "start"
INTERMEDIATE = "intermediate"
EXIT = "exit"
PLACE_KINDS = (START, INTERMEDIATE, EXIT)

LEVELS = ("intentional", "strategy", "operational")


@dataclass(frozen=True)
class Strategy:
    raw: str
    label: str
    polarity: str = POSITIVE

    @property
    def canonical(self) -> str:
        """Normalized text that keeps the negation, e.g. ``not forecasting strategy``."""
        return f"not {self.label}" if self.polarity == NEGATED else self.label

    def __str__(self):
        return self.raw


def normalize_strategy(raw: str, element: str = "?") -> Strategy:
    text = collapse(raw)
    if not text:
        raise ModelError(
            f"empty strategy label on {element}",
            [Violation("EmptyStrategy", element, "strategy label is empty")],
        )
    label = text.lower()
    if label.startswith("not "):
        return Strategy(raw, label[4:].strip(), NEGATED)
    if "manual" in label.split():
        return Strategy(raw, label, MANUAL)
    return Strategy(raw, label, POSITIVE)


def as_strategy(value, element: str = "?") -> Strategy:
    return value if isinstance(value, Strategy) else normalize_strategy(value, element)


@dataclass(frozen=True)
class Place:
    id: str
    label: str
    kind: str = INTERMEDIATE

    @property
    def key(self) -> str:
        return normalize_label(self.label)


@dataclass(frozen=True)
class Transition:
    id: str
    strategy: Strategy
    inputs: frozenset
    outputs: frozenset
    # explicit fragment ids, one per (input, output) pair; empty means positional
    fragment_ids: tuple = ()

    @classmethod
    def make(cls, id, strategy, inputs, outputs, fragment_ids=()):
        return cls(id, as_strategy(strategy, id), frozenset(inputs), frozenset(outputs),
                   tuple(fragment_ids))


@dataclass(frozen=True)
class ProcessModel:
    id: str
    places: tuple = ()
    transitions: tuple = ()
    level: str = "strategy"

    def place(self, pid: str) -> Place:
        for p in self.places:
            if p.id == pid:
                return p
        raise UnknownIdError("place", pid)

    def transition(self, tid: str) -> Transition:
        for t in self.transitions:
            if t.id == tid:
                return t
        raise UnknownIdError("transition", tid)

    def place_by_label(self, label: str) -> Place:
        key = normalize_label(label)
        for p in self.places:
            if p.key == key:
                return p
        raise UnknownIdError("place label", label)

    def _only(self, kind):
        found = [p for p in self.places if p.kind == kind]
        return found[0] if len(found) == 1 else None

    @property
    def start(self) -> Place | None:
        return self._only(START)

    @property
    def exit(self) -> Place | None:
        return self._only(EXIT)


@dataclass(frozen=True)
class Fragment:
    id: str
    source: str
    target: str
    strategy: Strategy
    source_text: str = ""
    target_text: str = ""

    @classmethod
    def make(cls, id, source, target, strategy):
        """Build from display labels; ``source``/``target`` get normalized."""
        return cls(id, normalize_label(source), normalize_label(target),
                   as_strategy(strategy, id), collapse(source), collapse(target))

    @property
    def endpoints(self):
        return (self.source, self.target)

    @property
    def triplet(self):
        return (self.source, self.target, self.strategy.canonical)

    def __str__(self):
        return (f"{self.id} <({self.source_text or self.source}), "
                f"({self.target_text or self.target}), {self.strategy.raw}>")


@dataclass(frozen=True)
class RefinementTree:
    model: str
    parent: str
    children: tuple = field(default_factory=tuple)


def validate_model(m: ProcessModel) -> list[Violation]:
    out: list[Violation] = []
    if not m.places and not m.transitions:
        return out

    place_ids = set()
    labels: dict[str, str] = {}
    for p in m.places:
        if p.id in place_ids:
            out.append(Violation("DuplicatePlaceId", p.id, f"place id {p.id!r} declared twice"))
        place_ids.add(p.id)
        if p.kind not in PLACE_KINDS:
            out.append(Violation("BadPlaceKind", p.id, f"unknown place kind {p.kind!r}"))
        if not p.key:
            out.append(Violation("EmptyLabel", p.id, "place label is empty"))
        elif p.key in labels:
            out.append(Violation("DuplicateLabel", p.id,
                                 f"label {p.label!r} already used by place {labels[p.key]!r}"))
        else:
            labels[p.key] = p.id

    for kind, name in ((START, "Start"), (EXIT, "Exit")):
        found = [p for p in m.places if p.kind == kind]
        if not found:
            out.append(Violation(f"Missing{name}", m.id, f"model has no {kind} place"))
        for extra in found[1:]:
            out.append(Violation(f"Duplicate{name}", extra.id,
                                 f"second {kind} place (first is {found[0].id!r})"))

    if m.level not in LEVELS:
        out.append(Violation("BadLevel", m.id, f"unknown level {m.level!r}"))

    trans_ids = set()
    refs_ok = True
    for t in m.transitions:
        if t.id in trans_ids:
            out.append(Violation("DuplicateTransitionId", t.id,
                                 f"transition id {t.id!r} declared twice"))
        trans_ids.add(t.id)
        if not t.strategy.label:
            out.append(Violation("EmptyStrategy", t.id, "strategy label is empty"))
        if not t.inputs:
            out.append(Violation("EmptyInputs", t.id, "transition has no input places"))
        if not t.outputs:
            out.append(Violation("EmptyOutputs", t.id, "transition has no output places"))
        for pid in sorted(t.inputs | t.outputs):
            if pid not in place_ids:
                refs_ok = False
                out.append(Violation("UnknownPlace", t.id, f"references undeclared place {pid!r}"))
        if t.fragment_ids and len(t.fragment_ids) != len(t.inputs) * len(t.outputs):
            out.append(Violation("BadFragmentIds", t.id,
                                 f"{len(t.fragment_ids)} fragment ids for "
                                 f"{len(t.inputs) * len(t.outputs)} input/output pairs"))
            refs_ok = False

    if refs_ok and not any(v.code == "DuplicatePlaceId" for v in out):
        seen_ids: dict[str, str] = {}
        seen_triplets: dict[tuple, str] = {}
        for fid, t, src, dst in _pairs(m):
            if fid in seen_ids:
                out.append(Violation("DuplicateFragmentId", t.id,
                                     f"fragment id {fid} already used by {seen_ids[fid]!r}"))
            seen_ids.setdefault(fid, t.id)
            key = (src.key, dst.key, t.strategy.canonical)
            if key in seen_triplets:
                out.append(Violation("DuplicateFragment", t.id,
                                     f"same source, target and strategy as {seen_triplets[key]}"))
            seen_triplets.setdefault(key, fid)

    start, exit_ = m.start, m.exit
    if refs_ok and start is not None and exit_ is not None:
        succ = defaultdict(set)
        pred = defaultdict(set)
        for t in m.transitions:
            for a in t.inputs:
                for b in t.outputs:
                    succ[a].add(b)
                    pred[b].add(a)
        fwd = _closure(start.id, succ)
        back = _closure(exit_.id, pred)
        for p in m.places:
            if p.id not in fwd:
                out.append(Violation("UnreachablePlace", p.id,
                                     f"place {p.label!r} is not reachable from the start place"))
            elif p.id not in back:
                out.append(Violation("DeadEndPlace", p.id,
                                     f"no path from place {p.label!r} to the exit place"))
    return out


def _closure(root, edges):
    seen = {root}
    stack = [root]
    while stack:
        for nxt in edges[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def _pairs(m: ProcessModel):
    """Yield ``(fragment id, transition, input place, output place)`` in fragment order."""
    by_id = {p.id: p for p in m.places}
    n = 0
    for t in m.transitions:
        ins = sorted((by_id[i] for i in t.inputs), key=lambda p: (p.key, p.id))
        outs = sorted((by_id[o] for o in t.outputs), key=lambda p: (p.key, p.id))
        k = 0
        for src in ins:
            for dst in outs:
                n += 1
                fid = t.fragment_ids[k] if t.fragment_ids else f"PF{n}"
                k += 1
                yield fid, t, src, dst


def extract_fragments(m: ProcessModel) -> list[Fragment]:
    problems = validate_model(m)
    if problems:
        raise ModelError(f"model {m.id!r} is invalid", problems)
    return [
        Fragment(fid, src.key, dst.key, t.strategy, collapse(src.label), collapse(dst.label))
        for fid, t, src, dst in _pairs(m)
    ]


def fragment_transitions(m: ProcessModel) -> dict[str, Transition]:
    """Map each fragment id to the transition it was extracted from."""
    extract_fragments(m)
    return {fid: t for fid, t, _, _ in _pairs(m)}


def refine(m: ProcessModel, parent: str, children: Sequence) -> RefinementTree:
    owners = fragment_transitions(m)
    if parent not in owners:
        raise UnknownIdError("fragment", parent)
    if not children:
        raise RefinementError(f"refinement of {parent} needs at least one child strategy")
    t = owners[parent]
    if len(t.inputs) != 1 or len(t.outputs) != 1:
        raise RefinementError(
            f"{parent} comes from multi-input/output transition {t.id!r}; only 1x1 transitions refine")
    strategies = [as_strategy(c, f"{parent}.{k}") for k, c in enumerate(children, 1)]
    labels = [s.canonical for s in strategies]
    dupes = sorted({x for x in labels if labels.count(x) > 1})
    if dupes:
        raise RefinementError(f"duplicate child strategies for {parent}: {', '.join(dupes)}")
    pf = next(f for f in extract_fragments(m) if f.id == parent)
    kids = tuple(
        replace(pf, id=f"{parent}.{k}", strategy=s) for k, s in enumerate(strategies, 1)
    )
    return RefinementTree(m.id, parent, kids)


def flatten(m: ProcessModel, tree: RefinementTree) -> ProcessModel:
    return flatten_all(m, [tree])


def flatten_all(m: ProcessModel, trees: Iterable[RefinementTree]) -> ProcessModel:
    """Replace each refined parent transition by one alternative transition per child.

    Every transition of the result carries explicit fragment ids, so the
    unrefined fragments keep the ids they had in ``m``.
    """
    frags = {f.id: f for f in extract_fragments(m)}
    by_parent: dict[str, RefinementTree] = {}
    for tree in trees:
        if tree.model != m.id:
            raise RefinementError(f"refinement of {tree.parent} belongs to model {tree.model!r}, not {m.id!r}")
        if tree.parent not in frags:
            raise RefinementError(f"dangling refinement: {m.id!r} has no fragment {tree.parent}")
        if tree.parent in by_parent:
            raise RefinementError(f"fragment {tree.parent} is refined twice")
        parent = frags[tree.parent]
        for c in tree.children:
            if c.endpoints != parent.endpoints:
                raise RefinementError(f"child {c.id} does not share the endpoints of {parent.id}")
        by_parent[tree.parent] = tree

    ids = {t.id for t in m.transitions}
    pairs_by_t: dict[str, list[str]] = defaultdict(list)
    for fid, t, _, _ in _pairs(m):
        pairs_by_t[t.id].append(fid)

    new_transitions = []
    for t in m.transitions:
        fids = pairs_by_t[t.id]
        if len(fids) == 1 and fids[0] in by_parent:
            for k, child in enumerate(by_parent[fids[0]].children, 1):
                tid = f"{t.id}.{k}"
                if tid in ids:
                    raise RefinementError(f"transition id {tid!r} already exists in {m.id!r}")
                new_transitions.append(Transition(tid, child.strategy, t.inputs, t.outputs, (child.id,)))
        else:
            new_transitions.append(replace(t, fragment_ids=tuple(fids)))
    return replace(m, transitions=tuple(new_transitions))

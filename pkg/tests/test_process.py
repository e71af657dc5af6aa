import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

import gen
from roc import fixtures
from roc.errors import ModelError, RefinementError, UnknownIdError
from roc.process import (MANUAL, NEGATED, POSITIVE, Place, ProcessModel, Transition,
                         extract_fragments, flatten, flatten_all, normalize_strategy, refine,
                         validate_model)


@pytest.fixture(scope="module")
def electro():
    return fixtures.load("electro_tech")


@pytest.fixture(scope="module")
def geneva():
    return fixtures.load("geneva")


def t(tid, strategy, ins, outs, fids=()):
    return Transition.make(tid, strategy, ins, outs, fids)


def line(*labels, strategies=None):
    """Start-to-exit chain over ``labels``."""
    n = len(labels)
    places = tuple(Place(f"p{i}", lab, "start" if i == 0 else "exit" if i == n - 1 else "intermediate")
                   for i, lab in enumerate(labels))
    strategies = strategies or [f"s{i}" for i in range(1, n)]
    trans = tuple(t(f"t{i}", s, [f"p{i - 1}"], [f"p{i}"]) for i, s in enumerate(strategies, 1))
    return ProcessModel("chain", places, trans)


@pytest.mark.parametrize("raw, label, polarity", [
    ("Not demand management strategy", "demand management strategy", NEGATED),
    ("  not   real time  ", "real time", NEGATED),
    ("manual order processing strategy", "manual order processing strategy", MANUAL),
    ("FIFO", "fifo", POSITIVE),
    ("nothing strategy", "nothing strategy", POSITIVE),
    ("semi-manually", "semi-manually", POSITIVE),
])
def test_normalize_strategy(raw, label, polarity):
    s = normalize_strategy(raw)
    assert (s.label, s.polarity, s.raw) == (label, polarity, raw)


def test_canonical_keeps_negation():
    assert normalize_strategy("Not  Forecasting strategy").canonical == "not forecasting strategy"
    assert normalize_strategy("Forecasting strategy").canonical == "forecasting strategy"


@pytest.mark.parametrize("raw", ["", "   ", "\t\n"])
def test_empty_strategy_rejected(raw):
    with pytest.raises(ModelError) as err:
        normalize_strategy(raw, "t9")
    assert err.value.violations[0].code == "EmptyStrategy"


def test_empty_model_is_valid():
    assert validate_model(ProcessModel("empty")) == []
    assert extract_fragments(ProcessModel("empty")) == []


def codes(m):
    return sorted({v.code for v in validate_model(m)})


def test_validation_catches_structural_problems():
    m = line("a", "b", "c")
    places = m.places + (Place("p9", "A", "start"),)
    # no single start place, so reachability is not judged
    assert codes(ProcessModel("x", places, m.transitions)) == ["DuplicateLabel", "DuplicateStart"]
    orphan = ProcessModel("x", m.places + (Place("p3", "d"),), m.transitions)
    assert codes(orphan) == ["UnreachablePlace"]
    dead_end = ProcessModel("x", m.places + (Place("p3", "d"),),
                            m.transitions + (t("t9", "x", ["p1"], ["p3"]),))
    assert codes(dead_end) == ["DeadEndPlace"]
    assert codes(ProcessModel("x", m.places[1:], m.transitions[1:])) == ["MissingStart"]
    assert codes(ProcessModel("x", m.places, m.transitions, "tactical")) == ["BadLevel"]


def test_validation_reference_errors():
    m = line("a", "b")
    bad = ProcessModel("x", m.places, (t("t1", "s", ["p0"], ["nowhere"]), t("t1", "u", ["p0"], ["p1"])))
    assert {"DuplicateTransitionId", "UnknownPlace"} <= set(codes(bad))
    dup = ProcessModel("x", m.places, (t("t1", "FIFO", ["p0"], ["p1"]), t("t2", "fifo", ["p0"], ["p1"])))
    assert codes(dup) == ["DuplicateFragment"]
    ids = ProcessModel("x", m.places, (t("t1", "s", ["p0"], ["p1"], ("A", "B")),))
    assert codes(ids) == ["BadFragmentIds"]


def test_invalid_model_refuses_extraction():
    m = line("a", "b")
    with pytest.raises(ModelError):
        extract_fragments(ProcessModel("x", m.places + (Place("p5", "zz", "exit"),), m.transitions))


ELECTRO_ASIS = [
    "PF1 <(start), (support material), manual strategy>",
    "PF2 <(support material), (work with material), Not demand management strategy>",
    "PF3 <(work with material), (Stock), Not real time production planning strategy>",
    "PF4 <(Stock), (exit), manual order processing strategy>",
]

ELECTRO_TOBE = [
    ("pf1", "start", "support material", "planning strategy"),
    ("pf2", "support material", "work with material", "backward strategy"),
    ("pf3", "support material", "work with material", "forward strategy"),
    ("pf4", "work with material", "stock product", "lifo"),
    ("pf5", "work with material", "stock product", "fifo"),
    ("pf6", "stock product", "stock product", "reservation strategy"),
    ("pf7", "stock product", "stock product", "quality inspection strategy"),
    ("pf8", "stock product", "exit", "financial control strategy"),
]


def test_electro_fragments(electro):
    assert [str(f) for f in extract_fragments(electro.net("electro_asis"))] == ELECTRO_ASIS
    got = [(f.id.lower(), f.source, f.target, f.strategy.canonical)
           for f in extract_fragments(electro.net("electro_tobe"))]
    assert got == ELECTRO_TOBE


def test_fragment_order_follows_place_labels():
    places = (Place("a", "start", "start"), Place("z", "Alpha"), Place("b", "beta"), Place("e", "exit", "exit"))
    m = ProcessModel("fan", places, (t("t1", "split", ["a"], ["b", "z"]),
                                    t("t2", "join", ["b", "z"], ["e"])))
    assert [f.triplet for f in extract_fragments(m)] == [
        ("start", "alpha", "split"), ("start", "beta", "split"),
        ("alpha", "exit", "join"), ("beta", "exit", "join")]
    assert [f.id for f in extract_fragments(m)] == ["PF1", "PF2", "PF3", "PF4"]


def test_labels_normalize_parentheses():
    m = line("(order entry)", "((requirements))", "(a) and (b)")
    assert [f.endpoints for f in extract_fragments(m)] == [
        ("order entry", "requirements"), ("requirements", "(a) and (b)")]


SOP_REFINEMENTS = {
    "PF1": ["product planning", "sales planning", "performance management"],
    "PF2": ["Master production scheduling", "capacity planning strategy", "material requirements planning"],
    "PF3": ["consolidation strategy", "feedback to demand and supply"],
    "PF4": ["performance review", "financial review", "approval/action items"],
}


def test_sop_refinements(geneva):
    m = geneva.net("geneva_sop_sap")
    trees = [refine(m, pf, kids) for pf, kids in SOP_REFINEMENTS.items()]
    for tree in trees:
        parent = next(f for f in extract_fragments(m) if f.id == tree.parent)
        assert [c.id for c in tree.children] == [f"{tree.parent}.{k}" for k in range(1, len(tree.children) + 1)]
        assert all(c.endpoints == parent.endpoints for c in tree.children)
    flat = flatten_all(m, trees)
    got = {(f.id, f.source, f.target, f.strategy.canonical) for f in extract_fragments(flat)}
    assert ("PF3.2", "requirements plan", "proposed plan", "feedback to demand and supply") in got
    assert ("PF4.3", "proposed plan", "final plan", "approval/action items") in got
    assert len(got) == 11


def test_mrp_refinement(geneva):
    # order generation -> goods issue refined into planning alternatives
    m = geneva.net("geneva_om_sap")
    tree = refine(m, "PF2", ["deterministic planning strategy", "consumption based strategy"])
    flat = flatten(m, tree)
    pf21 = refine(flat, "PF2.1", ["gross planning strategy", "net planning strategy",
                                  "individual customer order planning strategy"])
    deeper = flatten(flat, pf21)
    ids = [f.id for f in extract_fragments(deeper)]
    assert ids == ["PF1", "PF2.1.1", "PF2.1.2", "PF2.1.3", "PF2.2", "PF3", "PF4"]


def multiset_after(m, parent, children):
    base = [f for f in extract_fragments(m) if f.id != parent]
    pf = next(f for f in extract_fragments(m) if f.id == parent)
    kids = [(pf.source, pf.target, normalize_strategy(c).canonical) for c in children]
    return Counter([f.triplet for f in base] + kids)


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(1, 4))
def test_flatten_replaces_parent(rng, nkids):
    m = gen.chain_model(rng, max_places=8)
    pf = rng.choice(extract_fragments(m))
    kids = [f"child {k} of {pf.id}" for k in range(nkids)]
    flat = flatten(m, refine(m, pf.id, kids))
    assert validate_model(flat) == []
    assert Counter(f.triplet for f in extract_fragments(flat)) == multiset_after(m, pf.id, kids)


def test_identity_refinement_keeps_fragments(geneva):
    m = geneva.net("geneva_om_sap")
    pf = extract_fragments(m)[1]
    flat = flatten(m, refine(m, pf.id, [pf.strategy.raw]))
    assert [f.triplet for f in extract_fragments(flat)] == [f.triplet for f in extract_fragments(m)]


def test_refine_errors(geneva):
    m = geneva.net("geneva_om_sap")
    with pytest.raises(UnknownIdError):
        refine(m, "PF9", ["x"])
    with pytest.raises(RefinementError):
        refine(m, "PF1", [])
    with pytest.raises(RefinementError):
        refine(m, "PF1", ["x", " X "])
    with pytest.raises(ModelError):
        refine(m, "PF1", ["x", ""])
    tree = refine(m, "PF1", ["a", "b"])
    with pytest.raises(RefinementError):
        flatten_all(m, [tree, tree])
    with pytest.raises(RefinementError):
        flatten(geneva.net("geneva_sop_sap"), tree)


def test_multi_io_transitions_do_not_refine():
    places = (Place("a", "start", "start"), Place("b", "b"), Place("c", "c"), Place("e", "exit", "exit"))
    m = ProcessModel("fan", places, (t("t1", "split", ["a"], ["b", "c"]),
                                    t("t2", "join", ["b", "c"], ["e"])))
    with pytest.raises(RefinementError):
        refine(m, "PF1", ["x"])


def test_random_chains_seeded():
    rng = random.Random(7)
    for _ in range(50):
        m = gen.chain_model(rng)
        assert validate_model(m) == []

import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

import gen
import oracles
from roc import fixtures
from roc.errors import NotEnabledError, SafetyViolation, UnknownIdError
from roc.netsim import TRUNCATED, UNREACHABLE, enabled, fire, reachable, replay, soundness_lite
from roc.process import Place, ProcessModel, Transition


def t(tid, ins, outs):
    return Transition.make(tid, tid, ins, outs)


@pytest.fixture(scope="module")
def fork():
    places = tuple(Place(p, p, k) for p, k in
                   (("i", "start"), ("a", "intermediate"), ("b", "intermediate"), ("o", "exit")))
    return ProcessModel("fork", places, (t("t1", ["i"], ["a", "b"]), t("t2", ["a", "b"], ["o"]),
                                         t("t3", ["a"], ["a"])))


def test_enabled_and_fire(fork):
    assert enabled(fork, {"i"}) == {"t1"}
    mk = fire(fork, {"i"}, "t1")
    assert mk == {"a", "b"}
    assert enabled(fork, mk) == {"t2", "t3"}
    assert fire(fork, mk, "t3") == mk
    assert fire(fork, mk, "t2") == {"o"}
    with pytest.raises(NotEnabledError):
        fire(fork, {"i"}, "t2")
    with pytest.raises(UnknownIdError):
        fire(fork, {"i"}, "t9")
    with pytest.raises(ValueError):
        enabled(fork, {"zz"})


def test_unsafe_firing_raises():
    places = tuple(Place(p, p) for p in "abc")
    m = ProcessModel("u", places, (t("t1", ["a"], ["b"]),))
    with pytest.raises(SafetyViolation):
        fire(m, {"a", "b"}, "t1")
    assert reachable(m, {"a", "b"}, {"b"}).verdict == UNREACHABLE


def test_reachable_witness(fork):
    r = reachable(fork, {"i"}, {"o"})
    assert r.reachable and r.path == ("t1", "t2")
    assert replay(fork, {"i"}, r.path) == {"o"}
    same = reachable(fork, {"i"}, {"i"})
    assert same.reachable and same.path == ()


def test_bound_truncates(fork):
    r = reachable(fork, {"i"}, {"o"}, bound=1)
    assert r.verdict == TRUNCATED and r.explored == 1
    assert reachable(fork, {"i"}, {"o"}, bound=3).reachable
    with pytest.raises(ValueError):
        reachable(fork, {"i"}, {"o"}, bound=0)


def test_natural_id_order_decides_witness():
    places = tuple(Place(p, p) for p in "ab")
    m = ProcessModel("n", places, (t("t10", ["a"], ["b"]), t("t2", ["a"], ["b"])))
    assert reachable(m, {"a"}, {"b"}).path == ("t2",)


@pytest.mark.parametrize("ws, net", [
    ("electro_tech", "electro_asis"), ("electro_tech", "electro_tobe"),
    ("geneva", "geneva_om_asis"), ("geneva", "geneva_om_sap"),
    ("geneva", "geneva_sop_asis"), ("geneva", "geneva_sop_sap"),
])
def test_fixture_nets_are_sound(ws, net):
    rep = soundness_lite(fixtures.load(ws).net(net))
    assert rep.exit_reachable and not rep.dead_transitions and not rep.truncated
    assert not rep.unsafe_transitions


def test_removed_arc_breaks_soundness():
    m = fixtures.load("geneva").net("geneva_om_sap")
    cut = replace(m, transitions=tuple(tr for tr in m.transitions if tr.id != "t3"))
    rep = soundness_lite(cut)
    assert not rep.exit_reachable
    assert rep.dead_transitions == {"t4"}


def test_soundness_truncated():
    for bound in (1, 3):
        rep = soundness_lite(fixtures.load("geneva").net("geneva_om_sap"), bound=bound)
        assert rep.truncated and not rep.exit_reachable
        assert rep.explored_markings == bound


def test_firing_sequences_oracle_agrees_on_small_net(fork):
    seqs = oracles.firing_sequences(fork, {"i"}, 2)
    assert [p for p, _ in seqs] == [("t1", "t2"), ("t1", "t3")]


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_reachable_matches_oracle(rng):
    m = gen.random_net(rng, max_places=6, max_transitions=6)
    start = gen.random_marking(rng, m)
    reach = sorted(oracles.reachable_markings(m, start), key=sorted)
    goal = rng.choice(reach) if rng.random() < 0.6 else gen.random_marking(rng, m)
    r = reachable(m, start, goal)
    expected = oracles.shortest_witness(m, start, goal)
    assert r.reachable == (expected is not None)
    if expected is not None:
        assert r.path == expected
        assert replay(m, start, r.path) == goal


def test_seeded_oracle_sweep():
    rng = random.Random(11)
    for _ in range(100):
        m = gen.random_net(rng)
        start = gen.random_marking(rng, m)
        for goal in oracles.reachable_markings(m, start):
            r = reachable(m, start, goal)
            assert r.reachable and replay(m, start, r.path) == goal


@pytest.fixture(scope="module")
def electro():
    return fixtures.load("electro_tech")


def test_electro_token_game(electro):
    asis, tobe = electro.net("electro_asis"), electro.net("electro_tobe")
    start = asis.start.id
    assert enabled(asis, {start}) == {"t_pf1"}
    assert enabled(asis, set()) == frozenset()
    material = tobe.place_by_label("support material").id
    assert enabled(tobe, {material}) == {"t_backward", "t_forward"}
    assert fire(asis, {start}, "t_pf1") == {asis.place_by_label("support material").id}
    stock = tobe.place_by_label("stock product").id
    assert fire(tobe, {stock}, "t_reservation") == {stock}
    r = reachable(asis, {start}, {asis.exit.id})
    assert r.path == ("t_pf1", "t_pf2", "t_pf3", "t_pf4")


def test_electro_witness_is_id_ordered(electro):
    tobe = electro.net("electro_tobe")
    start, stock = {tobe.start.id}, {tobe.place_by_label("stock product").id}
    hits = [p for n in range(1, 7) for p, mk in oracles.firing_sequences(tobe, start, n) if mk == stock]
    shortest = min(len(p) for p in hits)
    assert sorted(p for p in hits if len(p) == shortest) == [
        ("t_planning", "t_backward", "t_fifo"), ("t_planning", "t_backward", "t_lifo"),
        ("t_planning", "t_forward", "t_fifo"), ("t_planning", "t_forward", "t_lifo")]
    assert reachable(tobe, start, stock).path == ("t_planning", "t_backward", "t_fifo")

import random

import pytest
from hypothesis import given, settings, strategies as st

import gen
from roc import fixtures
from roc.dsl import Workspace, parse, parse_with_diagnostics, print_workspace, quote
from roc.errors import ParseError, UnknownIdError


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_fixtures_parse_cleanly(name):
    ws, diags = parse_with_diagnostics(fixtures.text(name))
    assert diags == []
    assert parse(print_workspace(ws)) == ws


def test_empty_file():
    ws = parse("")
    assert ws.is_empty() and ws == Workspace()
    assert print_workspace(ws) == ""
    assert parse("# only a comment\n\n   \n").is_empty()


def test_undeclared_place_reported_at_its_line():
    text = ("net n level=strategy\n"
            "  place a \"start\" start\n"
            "  place b \"exit\" exit\n"
            "  trans t1 \"s\" a -> zz\n")
    ws, diags = parse_with_diagnostics(text)
    assert ws is None
    assert [(d.severity, d.line) for d in diags] == [("error", 4)]
    assert "UnknownPlace" in diags[0].message
    assert diags[0].format("x.roc").startswith("x.roc:4:")
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.diagnostics == diags


@pytest.mark.parametrize("text, line, col, needle", [
    ('net n\n  place a "x\n', 2, 11, "unterminated string"),
    ('net n\n  place a "x" middle\n', 2, 15, "expected 'start' or 'exit'"),
    ('  place a "x"\n', 1, 3, "not allowed"),
    ('frob x\n', 1, 1, "unknown"),
    ('net n\n  place a "bad \\q"\n', 2, 16, "unknown escape"),
    ('goals g\n  edge a loves b\n', 2, 10, "unknown edge kind"),
])
def test_syntax_errors_are_positioned(text, line, col, needle):
    _, diags = parse_with_diagnostics(text)
    assert diags, text
    d = diags[0]
    assert (d.line, d.column) == (line, col)
    assert needle in d.message


def test_dangling_realization_rejected():
    text = "goals g\n  node a need \"a\" horizon=strategic\n  edge a realized_by nowhere:PF1\n"
    _, diags = parse_with_diagnostics(text)
    assert [d.line for d in diags] == [3] and "dangling" in diags[0].message


def test_case_map_must_name_tobe_fragment():
    text = 'case c\n  tobe PF1 "a" -> "b" "s"\n  map PF2 "X"\n'
    _, diags = parse_with_diagnostics(text)
    assert [d.line for d in diags] == [3]


def test_quote_escapes():
    assert quote('a "b" \\ c\nd\te') == '"a \\"b\\" \\\\ c\\nd\\te"'
    name = quote('x "y" #z')
    ws = parse(f'catalog c\n  component {name} module="PP" provides="p, q"\n')
    assert ws.catalog("c").components[0].name == 'x "y" #z'
    assert ws.catalog("c").components[0].provides == ("p, q",)


def test_lookup_errors():
    ws = fixtures.load("geneva")
    with pytest.raises(UnknownIdError):
        ws.net("nope")
    with pytest.raises(UnknownIdError):
        ws.case("nope")


def test_printing_is_canonical():
    ws = fixtures.load("electro_tech")
    once = print_workspace(ws)
    assert print_workspace(parse(once)) == once
    assert "\r" not in once and once.endswith("\n")


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_round_trip_property(rng):
    ws = gen.workspace(rng)
    text = print_workspace(ws)
    back, diags = parse_with_diagnostics(text)
    assert diags == []
    assert back == ws
    assert print_workspace(back) == text


def test_round_trip_seeded():
    rng = random.Random(3)
    for _ in range(100):
        ws = gen.workspace(rng)
        assert parse(print_workspace(ws)) == ws


def test_electro_workspace_shape():
    ws = fixtures.load("electro_tech")
    assert sorted(ws.nets) == ["electro_asis", "electro_tobe"] and list(ws.goals) == ["electro_goals"]


def test_empty_model_prints_minimally():
    from roc.process import ProcessModel
    ws = Workspace(nets={"m": ProcessModel("m")})
    assert print_workspace(ws) == "net m level=strategy\n"
    assert parse(print_workspace(ws)) == ws

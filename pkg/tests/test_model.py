import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import rand_model
from oracles import language
from polcheck import obsexpr as ox
from polcheck.automata import lang_equal
from polcheck.errors import ModelError, UnknownSymbol, UnknownWorld
from polcheck.logic import parse_obs
from polcheck.model import (ExpectationModel, config_key, dumps_model, from_dict, survives, to_dict,
                            update, update_letter, validate)


def test_fixtures_validate(traffic, message, drone):
    for m in (traffic, message, drone):
        assert validate(m) == []


def test_traffic_update_keeps_only_france(traffic):
    m2 = update(traffic, "g a r g a".split())
    assert m2.worlds == ("s",)
    assert lang_equal(m2.exp("s"), (parse_obs("r*.(g*.a.r*)*"), traffic.alphabet))
    assert config_key(m2) != config_key(traffic)


def test_survival_in_traffic(traffic):
    assert not survives(traffic, "t", "g a r g".split())
    for n in range(7):
        assert survives(traffic, "s", ["g"] * n) and survives(traffic, "t", ["g"] * n)


def test_message_update_drops_t(message):
    assert update(message, ["m"]).worlds == ("s", "u", "v")
    assert update(message, []) is message


def test_update_errors(traffic):
    with pytest.raises(UnknownSymbol):
        update(traffic, ["x"])
    with pytest.raises(UnknownWorld):
        survives(traffic, "nowhere", [])


def test_relations_are_closed():
    m = ExpectationModel.build(["a"], ["i"], [], ["s", "t", "u"], {}, {w: "a" for w in "stu"},
                               {"i": [("s", "t")]})
    assert m.relation_pairs("i") == {("s", "s"), ("t", "t"), ("s", "t"), ("t", "s"), ("u", "u")}
    assert validate(m) == []


def test_empty_expectation_is_reported():
    m = ExpectationModel.build(["a"], ["i"], [], ["s"], {}, {"s": "empty"})
    assert any("empty expectation" in p for p in validate(m))


def test_bad_documents():
    with pytest.raises(ModelError):
        from_dict({"alphabet": ["a"], "worlds": [{"name": "s"}]})
    m = from_dict({"alphabet": ["a"], "agents": ["i"], "props": [],
                   "worlds": [{"name": "s", "props": ["q"], "exp": "a"}],
                   "relations": {"i": [["s", "zz"]], "k": []}})
    problems = validate(m)
    assert any("'q'" in p for p in problems)
    assert any("zz" in p for p in problems)
    assert any("unknown agent" in p for p in problems)


def test_export_round_trip(traffic):
    m2 = update(traffic, ["g", "a"])
    again = from_dict(to_dict(m2))
    assert again.worlds == m2.worlds
    for w in m2.worlds:
        assert lang_equal(again.exp(w), m2.exp(w))
    assert '"alphabet"' in dumps_model(m2)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.sampled_from("abc"), max_size=3),
       st.lists(st.sampled_from("abc"), max_size=3))
def test_update_composes(seed, w1, w2):
    m = rand_model(random.Random(seed))
    w1 = [a for a in w1 if a in m.alphabet]
    w2 = [a for a in w2 if a in m.alphabet]
    direct = update(m, w1 + w2)
    stepped = update(update(m, w1), w2)
    assert direct == stepped
    assert config_key(direct) == config_key(stepped)
    folded = m
    for a in w1 + w2:
        folded = update_letter(folded, a)
    assert folded == direct
    assert set(direct.worlds) <= set(m.worlds)
    for ag in m.agents:
        assert direct.relation_pairs(ag) <= m.relation_pairs(ag)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.sampled_from("abc"), max_size=3))
def test_survival_means_prefix(seed, w):
    m = rand_model(random.Random(seed))
    w = tuple(a for a in w if a in m.alphabet)
    for s in m.worlds:
        lang = language(m.exprs[s], len(w) + 8)
        if any(v[:len(w)] == w for v in lang):
            assert survives(m, s, w)
        elif ox.max_word_length(m.exprs[s]) <= len(w) + 8:
            assert not survives(m, s, w)


def test_zero_world_model_is_legal(traffic):
    m = update(traffic, ["r"])
    assert m.worlds == ()

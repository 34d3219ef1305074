import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import rand_expr, rand_formula, rand_model
from polcheck import obsexpr as ox
from polcheck.engines import (Dia, diamond_fusion_check, eval_brute, eval_brute_bounds, mc_full,
                              mc_sfe, mc_word, recheck_witness, worlds_satisfying)
from polcheck.errors import FragmentMismatch, Inconclusive, UnknownAgent, UnknownProp, UnknownWorld
from polcheck.logic import TOP, Box, K, Not, Prop, parse_formula, parse_obs

F = parse_formula


def words_of_length(alphabet, n):
    return itertools.product(list(alphabet), repeat=n)


def test_brute_examples(traffic, message):
    assert eval_brute(message, "s", F("<m>(K_R d & ~K_A d)"))
    assert eval_brute(traffic, "s", F("<g a r> ~(K_T f | K_T ~f)"))
    assert eval_brute(traffic, "t", TOP)


def test_brute_starred_modalities_give_bounds(traffic):
    f = F("[g*] ~(K_T f | K_T ~f)")
    assert eval_brute_bounds(traffic, "s", f, bound=3) == (False, True)
    with pytest.raises(Inconclusive):
        eval_brute(traffic, "s", f, bound=3)
    assert eval_brute(traffic, "s", F("<(g.a.r.g)*> K_T f"), bound=4)


def test_full_examples(traffic, drone):
    assert mc_full(traffic, "s", F("[g*] ~(K_T f | K_T ~f)")).truth
    v = mc_full(traffic, "s", F("<(g.a.r.g)*> K_T f"))
    assert v.truth and v.witness == ("g", "a", "r", "g")
    assert not mc_full(drone, "s", F("<right.right.right> K_a water")).truth


def test_shortest_witness_matches_enumeration(traffic):
    f = F("<(g.a.r.g)*> K_T f")
    shortest = None
    for n in range(9):
        for w in words_of_length(traffic.alphabet, n):
            if recheck_witness(traffic, "s", f, w):
                shortest = w
                break
        if shortest:
            break
    assert mc_full(traffic, "s", f).witness == shortest


def test_word_examples(traffic, message):
    assert mc_word(traffic, "s", F("<g a r> ~(K_T f | K_T ~f)")).truth
    assert mc_word(message, "s", F("<m>(K_R d & ~K_A d)")).truth
    assert not mc_word(message, "u", F("<m> K_A d")).truth
    assert not eval_brute(message, "u", F("<m> K_A d"))
    with pytest.raises(FragmentMismatch):
        mc_word(traffic, "s", F("<g*> true"))


def test_sfe_examples(traffic):
    assert mc_sfe(traffic, "s", F("<g+a> true")).truth
    assert mc_sfe(traffic, "s", F("~[g+a] false")).truth
    with pytest.raises(FragmentMismatch):
        mc_sfe(traffic, "s", F("[g] f"))
    with pytest.raises(FragmentMismatch):
        mc_sfe(traffic, "s", F("<g*> f"))


def test_validation_errors(traffic):
    with pytest.raises(UnknownWorld):
        mc_full(traffic, "x", TOP)
    with pytest.raises(UnknownAgent):
        mc_full(traffic, "s", F("K_Z f"))
    with pytest.raises(UnknownProp):
        eval_brute(traffic, "s", F("nope"))


def test_fusion_examples(traffic, message):
    assert diamond_fusion_check(traffic, "s", parse_obs("g"), parse_obs("a.r"), TOP)
    assert diamond_fusion_check(message, "s", parse_obs("m"), ox.EPS, K("R", Prop("d")))
    assert eval_brute(message, "s", F("<m> K_R d"))


def test_worlds_labelling(message):
    assert worlds_satisfying(message, F("d")) == ["s", "u"]
    assert worlds_satisfying(message, F("K_R d")) == []
    assert worlds_satisfying(message, F("true")) == ["s", "t", "u", "v"]
    assert worlds_satisfying(message, F("<m> K_R d"), engine="full") == ["s"]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000))
def test_diamond_fusion_random(seed):
    rng = random.Random(seed)
    m = rand_model(rng)
    s = rng.choice(m.worlds)
    a = list(m.alphabet)
    diamond_fusion_check(m, s, rand_expr(rng, a, 3), rand_expr(rng, a, 3), rand_formula(rng, m, 2))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000))
def test_box_diamond_duality(seed):
    rng = random.Random(seed)
    m = rand_model(rng)
    s = rng.choice(m.worlds)
    pi = rand_expr(rng, list(m.alphabet), 4)
    phi = rand_formula(rng, m, 2)
    assert mc_full(m, s, Box(pi, phi)).truth == (not mc_full(m, s, Dia(pi, Not(phi))).truth)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000))
def test_labelling_agrees_with_pointwise(seed):
    rng = random.Random(seed)
    m = rand_model(rng)
    for frag, engine in (("word", "word"), ("sfe", "sfe"), ("full", "full")):
        f = rand_formula(rng, m, 3, frag)
        pointwise = [s for s in m.worlds if mc_full(m, s, f).truth]
        assert worlds_satisfying(m, f, engine=engine) == pointwise

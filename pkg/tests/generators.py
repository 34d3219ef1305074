"""Seeded random models, formulas and instances for cross-checking."""

from polcheck import obsexpr as ox
from polcheck.automata import Dfa
from polcheck.logic import (BOT, TOP, And, Box, Dia, Imp, K, KHat, Not, Or, Prop)
from polcheck.model import ExpectationModel
from polcheck.obsexpr import Alphabet, Letter

LETTERS = ["a", "b", "c"]
PROPS = ["p", "q"]


def rand_expr(rng, alphabet, size, star=True):
    """Random expression with about ``size`` operators and letters."""
    if size <= 1:
        r = rng.random()
        if r < 0.08:
            return ox.EPS
        return Letter(rng.choice(alphabet))
    kinds = ["concat", "union"] + (["star"] if star else [])
    kind = rng.choice(kinds)
    if kind == "star":
        return ox.Star(rand_expr(rng, alphabet, size - 1, star))
    k = rng.randint(1, size - 2) if size > 2 else 1
    left = rand_expr(rng, alphabet, k, star)
    right = rand_expr(rng, alphabet, max(1, size - 1 - k), star)
    return ox.Concat(left, right) if kind == "concat" else ox.Union(left, right)


def rand_model(rng, max_worlds=5, max_agents=2, max_letters=3, max_exp=8):
    alphabet = LETTERS[:rng.randint(1, max_letters)]
    agents = ["i", "j"][:rng.randint(1, max_agents)]
    worlds = [f"w{n}" for n in range(rng.randint(1, max_worlds))]
    exp, val = {}, {}
    for w in worlds:
        while True:
            e = rand_expr(rng, alphabet, rng.randint(1, max_exp))
            if ox.size(e) <= max_exp and not ox.is_empty_lang(e):
                break
        exp[w] = e
        val[w] = [p for p in PROPS if rng.random() < 0.5]
    relations = {}
    for ag in agents:
        relations[ag] = [(rng.choice(worlds), rng.choice(worlds)) for _ in range(rng.randint(0, len(worlds)))]
    return ExpectationModel.build(alphabet, agents, PROPS, worlds, val, exp, relations)


def rand_word_expr(rng, alphabet):
    return ox.word_expr([rng.choice(alphabet) for _ in range(rng.randint(0, 3))])


def rand_formula(rng, m, depth, fragment="full"):
    """Random formula of the given fragment: full, word, star_free, sfe or epistemic."""
    alphabet = list(m.alphabet)
    agents = list(m.agents)
    if depth <= 0 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.1:
            return TOP if rng.random() < 0.5 else BOT
        p = Prop(rng.choice(PROPS))
        if fragment in ("sfe",) and rng.random() < 0.4:
            return Not(p)
        return p

    def sub():
        return rand_formula(rng, m, depth - 1, fragment)

    def modal_expr():
        if fragment == "word":
            return rand_word_expr(rng, alphabet)
        return rand_expr(rng, alphabet, rng.randint(1, 4), star=fragment == "full")

    if fragment == "sfe":
        choice = rng.choice(["and", "or", "k", "kh", "dia", "dia"])
    elif fragment == "epistemic":
        choice = rng.choice(["and", "or", "not", "k", "kh"])
    else:
        choice = rng.choice(["not", "and", "or", "imp", "k", "kh", "box", "dia"])
    if choice == "not":
        return Not(sub())
    if choice == "and":
        return And(sub(), sub())
    if choice == "or":
        return Or(sub(), sub())
    if choice == "imp":
        return Imp(sub(), sub())
    if choice == "k":
        return K(rng.choice(agents), sub())
    if choice == "kh":
        return KHat(rng.choice(agents), sub())
    if choice == "box":
        return Box(modal_expr(), sub())
    return Dia(modal_expr(), sub())


def rand_sat_query(rng, m, depth):
    """``<pi1>...<pin> phi`` with star-free modalities and an epistemic continuation."""
    f = rand_formula(rng, m, depth, "epistemic")
    for _ in range(rng.randint(1, 2)):
        f = Dia(rand_expr(rng, list(m.alphabet), rng.randint(1, 4), star=False), f)
    return f


def rand_cnf(rng, n_vars, n_clauses, width=3):
    return [tuple(rng.choice([1, -1]) * rng.randint(1, n_vars) for _ in range(rng.randint(1, width)))
            for _ in range(n_clauses)]


def rand_dfa(rng, alphabet, max_states):
    n = rng.randint(1, max_states)
    delta = tuple(tuple(rng.randrange(n) for _ in alphabet) for _ in range(n))
    accepting = frozenset(q for q in range(n) if rng.random() < 0.4)
    return Dfa(n, alphabet, delta, 0, accepting)


def rand_alphabet(rng):
    return Alphabet(["x", "y", "z"][:rng.randint(1, 2)])

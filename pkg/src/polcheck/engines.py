"""Model checking engines.

* :func:`eval_brute` - literal truth definition over bounded word enumeration,
  on expression residues only (no automata); the testing oracle.
* :func:`mc_full` - exact checker for the whole language: breadth-first search
  over (modality state-set, model configuration) pairs with a visited set.
* :func:`mc_word` - bottom-up world labelling for the Word fragment.
* :func:`mc_sfe` - exhaustive letter-by-letter search for the
  Star-Free-Existential fragment.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from . import obsexpr as ox
from .automata import Nfa, accepts, thompson
from .errors import FragmentMismatch, Inconclusive, UnknownProp
from .logic import (And, Bot, Box, Dia, Formula, Imp, K, KHat, Not, Or, Prop, Top,
                    classify, modalities, subformulas, to_nnf)
from .model import ExpectationModel, survives, update, update_letter


@dataclass
class Verdict:
    truth: bool
    witness: Optional[tuple] = None
    engine: str = ""
    stats: dict = field(default_factory=dict)

    def __bool__(self):
        return self.truth


def check_formula(m: ExpectationModel, f: Formula):
    """Raise if ``f`` mentions agents, propositions or actions unknown to ``m``."""
    for g in subformulas(f):
        if isinstance(g, (K, KHat)):
            m.check_agent(g.agent)
        elif isinstance(g, Prop) and g.name not in m.props:
            raise UnknownProp(g.name)
        elif isinstance(g, (Box, Dia)):
            m.alphabet.check(sorted(ox.symbols_of(g.expr)))


# -- brute force reference semantics ------------------------------------------

class _Brute:
    """Three-valued evaluation: ``(lo, hi)`` brackets the truth value.

    A state is a tuple over the model's universe holding each world's residual
    expectation expression, or ``None`` once the world is gone.
    """

    def __init__(self, m: ExpectationModel, bound: int):
        self.m = m
        self.bound = bound
        self.memo: dict = {}
        self.index = {w: i for i, w in enumerate(m.universe)}

    def initial_state(self):
        return tuple(self.m.residual_expr(w) if self.m.is_alive(w) else None
                     for w in self.m.universe)

    def step(self, state, a):
        out = []
        for e in state:
            if e is not None:
                e = ox.residue_letter(e, a)
                if ox.is_empty_lang(e):
                    e = None
            out.append(e)
        return tuple(out)

    def cell(self, state, agent, s):
        for c in self.m.partitions[agent]:
            if s in c:
                return [t for t in self.m.universe if t in c and state[self.index[t]] is not None]
        return [s]

    def eval(self, state, s, f):
        key = (state, s, f)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._eval(state, s, f)
            self.memo[key] = hit
        return hit

    def _eval(self, state, s, f):
        if isinstance(f, Top):
            return True, True
        if isinstance(f, Bot):
            return False, False
        if isinstance(f, Prop):
            v = f.name in self.m.val[s]
            return v, v
        if isinstance(f, Not):
            lo, hi = self.eval(state, s, f.sub)
            return not hi, not lo
        if isinstance(f, (And, Or, Imp)):
            l_lo, l_hi = self.eval(state, s, f.left)
            r_lo, r_hi = self.eval(state, s, f.right)
            if isinstance(f, And):
                return l_lo and r_lo, l_hi and r_hi
            if isinstance(f, Or):
                return l_lo or r_lo, l_hi or r_hi
            return (not l_hi) or r_lo, (not l_lo) or r_hi
        if isinstance(f, (K, KHat)):
            vals = [self.eval(state, t, f.sub) for t in self.cell(state, f.agent, s)]
            if isinstance(f, K):
                return all(v[0] for v in vals), all(v[1] for v in vals)
            return any(v[0] for v in vals), any(v[1] for v in vals)
        return self._modal(state, s, f)

    def _modal(self, state, s, f):
        i = self.index[s]
        results = []
        truncated = False
        stack = [(0, f.expr, state)]
        while stack:
            depth, pi, st = stack.pop()
            if ox.nullable(pi):
                results.append(self.eval(st, s, f.sub))
            for a in self.m.alphabet:
                pi2 = ox.residue_letter(pi, a)
                if ox.is_empty_lang(pi2):
                    continue
                st2 = self.step(st, a)
                if st2[i] is None:
                    continue
                if depth == self.bound:
                    truncated = True
                    continue
                stack.append((depth + 1, pi2, st2))
        if isinstance(f, Dia):
            return any(r[0] for r in results), any(r[1] for r in results) or truncated
        return all(r[0] for r in results) and not truncated, all(r[1] for r in results)


def default_bound(f: Formula) -> int:
    return max([ox.size(e) for e in modalities(f)] + [0])


def eval_brute_bounds(m: ExpectationModel, s: str, f: Formula, bound: int | None = None) -> tuple:
    """``(lower, upper)`` truth bounds from enumerating words up to ``bound`` per modality."""
    m.check_world(s)
    check_formula(m, f)
    b = _Brute(m, default_bound(f) if bound is None else bound)
    return b.eval(b.initial_state(), s, f)


def eval_brute(m: ExpectationModel, s: str, f: Formula, bound: int | None = None) -> bool:
    """Truth by bounded enumeration; raises :class:`Inconclusive` when the bounds disagree.

    Star-free formulas are always settled with the default bound.
    """
    lo, hi = eval_brute_bounds(m, s, f, bound)
    if lo != hi:
        raise Inconclusive(f"bounded enumeration cannot settle {f} at {s}")
    return lo


# -- full language ------------------------------------------------------------

class FullChecker:
    """Exact checker for the full language; one instance per query (memo tables are per query)."""

    def __init__(self):
        self.memo: dict = {}
        self.nfas: dict = {}
        self.stats = {"configs_explored": 0, "max_frontier": 0, "depth": 0,
                      "searches": 0, "max_visited": 0, "bound_exceeded": 0}

    def nfa(self, m, expr) -> Nfa:
        n = self.nfas.get(expr)
        if n is None:
            n = thompson(expr, m.alphabet)
            self.nfas[expr] = n
        return n

    def search_bound_log2(self, m, pi_nfa) -> int:
        return pi_nfa.n_states + sum(m.bases[w].n_states for w in m.universe)

    def candidates(self, m, s, expr):
        """Yield ``(word, model)`` for words in L(expr) that ``s`` survives, one per
        reachable configuration, in breadth-first (shortlex) order."""
        pi = self.nfa(m, expr)
        self.stats["searches"] += 1
        start = pi.initial_closure()
        if pi.productive.isdisjoint(start) or not m.is_alive(s):
            return
        visited = {(start & pi.productive, m.config_key())}
        queue = deque([(start, m, ())])
        limit = self.search_bound_log2(m, pi)
        try:
            while queue:
                self.stats["max_frontier"] = max(self.stats["max_frontier"], len(queue))
                P, model, word = queue.popleft()
                self.stats["configs_explored"] += 1
                self.stats["depth"] = max(self.stats["depth"], len(word))
                if not pi.accepting.isdisjoint(P):
                    yield word, model
                for a in m.alphabet:
                    P2 = pi.move(P, a)
                    live = P2 & pi.productive
                    if not live:
                        continue
                    m2 = update_letter(model, a)
                    if not m2.is_alive(s):
                        continue
                    key = (live, m2.config_key())
                    if key in visited:
                        continue
                    visited.add(key)
                    queue.append((P2, m2, word + (a,)))
        finally:
            self.stats["max_visited"] = max(self.stats["max_visited"], len(visited))
            if math.log2(len(visited)) > limit:
                self.stats["bound_exceeded"] += 1

    def holds(self, m: ExpectationModel, s: str, f: Formula) -> bool:
        key = (m.config_key(), s, id(f))
        hit = self.memo.get(key)
        if hit is None:
            hit = self._holds(m, s, f)
            self.memo[key] = hit
        return hit

    def _holds(self, m, s, f):
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, Prop):
            return f.name in m.val[s]
        if isinstance(f, Not):
            return not self.holds(m, s, f.sub)
        if isinstance(f, And):
            return self.holds(m, s, f.left) and self.holds(m, s, f.right)
        if isinstance(f, Or):
            return self.holds(m, s, f.left) or self.holds(m, s, f.right)
        if isinstance(f, Imp):
            return (not self.holds(m, s, f.left)) or self.holds(m, s, f.right)
        if isinstance(f, K):
            return all(self.holds(m, t, f.sub) for t in m.cell(f.agent, s))
        if isinstance(f, KHat):
            return any(self.holds(m, t, f.sub) for t in m.cell(f.agent, s))
        if isinstance(f, Dia):
            return self.diamond_witness(m, s, f) is not None
        for _, m2 in self.candidates(m, s, f.expr):
            if not self.holds(m2, s, f.sub):
                return False
        return True

    def diamond_witness(self, m, s, f: Dia):
        for word, m2 in self.candidates(m, s, f.expr):
            if self.holds(m2, s, f.sub):
                return word
        return None


def mc_full(m: ExpectationModel, s: str, f: Formula, witness: bool = True) -> Verdict:
    m.check_world(s)
    check_formula(m, f)
    checker = FullChecker()
    w = None
    if isinstance(f, Dia) and witness:
        w = checker.diamond_witness(m, s, f)
        truth = w is not None
    else:
        truth = checker.holds(m, s, f)
    return Verdict(truth, w, "full", checker.stats)


# -- Word fragment ------------------------------------------------------------

class WordLabeller:
    """Set of worlds satisfying a Word-fragment formula, computed bottom-up."""

    def __init__(self):
        self.memo: dict = {}
        self.stats = {"configs_explored": 0}

    def labels(self, m: ExpectationModel, f: Formula) -> frozenset:
        key = (m.config_key(), id(f))
        hit = self.memo.get(key)
        if hit is None:
            hit = self._labels(m, f)
            self.memo[key] = hit
        return hit

    def _labels(self, m, f):
        S = frozenset(m.worlds)
        if isinstance(f, Top):
            return S
        if isinstance(f, Bot):
            return frozenset()
        if isinstance(f, Prop):
            return frozenset(s for s in S if f.name in m.val[s])
        if isinstance(f, Not):
            return S - self.labels(m, f.sub)
        if isinstance(f, And):
            return self.labels(m, f.left) & self.labels(m, f.right)
        if isinstance(f, Or):
            return self.labels(m, f.left) | self.labels(m, f.right)
        if isinstance(f, Imp):
            return (S - self.labels(m, f.left)) | self.labels(m, f.right)
        if isinstance(f, KHat):
            inner = self.labels(m, f.sub)
            return frozenset(s for s in S if not inner.isdisjoint(m.cell(f.agent, s)))
        if isinstance(f, K):
            inner = self.labels(m, f.sub)
            return frozenset(s for s in S if inner.issuperset(m.cell(f.agent, s)))
        m2 = update(m, ox.word_of(f.expr))
        self.stats["configs_explored"] += 1
        inner = self.labels(m2, f.sub) & frozenset(m2.worlds)
        if isinstance(f, Dia):
            return inner
        return (S - frozenset(m2.worlds)) | inner


def mc_word(m: ExpectationModel, s: str, f: Formula) -> Verdict:
    if not classify(f).word:
        bad = next(g for g in subformulas(f) if isinstance(g, (Box, Dia)) and not ox.is_word(g.expr))
        raise FragmentMismatch("formula is not in the Word fragment", bad)
    m.check_world(s)
    check_formula(m, f)
    lab = WordLabeller()
    truth = s in lab.labels(m, f)
    w = ox.word_of(f.expr) if truth and isinstance(f, Dia) else None
    return Verdict(truth, w, "word", lab.stats)


def worlds_word(m: ExpectationModel, f: Formula) -> frozenset:
    if not classify(f).word:
        raise FragmentMismatch("formula is not in the Word fragment")
    check_formula(m, f)
    return WordLabeller().labels(m, f)


# -- Star-Free-Existential fragment -------------------------------------------

class SfeLabeller:
    """World labelling for NNF Star-Free-Existential formulas.

    A diamond is handled by trying every letter sequence of length at most
    ``size(pi)``, pruning once the residue of ``pi`` is empty or every alive
    world is already labelled.
    """

    def __init__(self):
        self.memo: dict = {}
        self.stats = {"configs_explored": 0}

    def labels(self, m: ExpectationModel, f: Formula) -> frozenset:
        key = (m.config_key(), id(f))
        hit = self.memo.get(key)
        if hit is None:
            hit = self._labels(m, f)
            self.memo[key] = hit
        return hit

    def _labels(self, m, f):
        S = frozenset(m.worlds)
        if isinstance(f, Top):
            return S
        if isinstance(f, Bot):
            return frozenset()
        if isinstance(f, Prop):
            return frozenset(s for s in S if f.name in m.val[s])
        if isinstance(f, Not):
            return S - self.labels(m, f.sub)
        if isinstance(f, And):
            return self.labels(m, f.left) & self.labels(m, f.right)
        if isinstance(f, Or):
            return self.labels(m, f.left) | self.labels(m, f.right)
        if isinstance(f, KHat):
            inner = self.labels(m, f.sub)
            return frozenset(s for s in S if not inner.isdisjoint(m.cell(f.agent, s)))
        if isinstance(f, K):
            inner = self.labels(m, f.sub)
            return frozenset(s for s in S if inner.issuperset(m.cell(f.agent, s)))
        return self._diamond(m, f)

    def _diamond(self, m, f: Dia) -> frozenset:
        result: set = set()
        limit = ox.size(f.expr)
        seen = set()
        stack = [(f.expr, m, 0)]
        while stack:
            pi, model, depth = stack.pop()
            self.stats["configs_explored"] += 1
            alive = frozenset(model.worlds)
            if ox.nullable(pi):
                result |= self.labels(model, f.sub) & alive
            if depth == limit:
                continue
            for a in m.alphabet:
                pi2 = ox.residue_letter(pi, a)
                if ox.is_empty_lang(pi2):
                    continue
                m2 = update_letter(model, a)
                if set(m2.worlds) <= result:
                    continue
                key = (pi2, m2.config_key())
                if key in seen:
                    continue
                seen.add(key)
                stack.append((pi2, m2, depth + 1))
        return frozenset(result)

    def witness(self, m, s, f: Dia):
        """Shortlex-least word realising the diamond at ``s``, or None."""
        limit = ox.size(f.expr)
        frontier = [((), f.expr, m)]
        for depth in range(limit + 1):
            nxt = []
            for word, pi, model in frontier:
                if ox.nullable(pi) and s in self.labels(model, f.sub):
                    return word
                if depth == limit:
                    continue
                for a in m.alphabet:
                    pi2 = ox.residue_letter(pi, a)
                    if ox.is_empty_lang(pi2):
                        continue
                    m2 = update_letter(model, a)
                    if m2.is_alive(s):
                        nxt.append((word + (a,), pi2, m2))
            frontier = nxt
        return None


def _sfe_form(f: Formula) -> Formula:
    g = to_nnf(f)
    frag = classify(g)
    if not frag.star_free_existential:
        bad = next((h for h in subformulas(g)
                    if isinstance(h, Box) or (isinstance(h, Dia) and not ox.is_star_free(h.expr))), g)
        raise FragmentMismatch("formula is not Star-Free-Existential", bad)
    return g


def mc_sfe(m: ExpectationModel, s: str, f: Formula, witness: bool = True) -> Verdict:
    g = _sfe_form(f)
    m.check_world(s)
    check_formula(m, g)
    lab = SfeLabeller()
    if isinstance(g, Dia) and witness:
        w = lab.witness(m, s, g)
        return Verdict(w is not None, w, "sfe", lab.stats)
    return Verdict(s in lab.labels(m, g), None, "sfe", lab.stats)


def worlds_sfe(m: ExpectationModel, f: Formula) -> frozenset:
    g = _sfe_form(f)
    check_formula(m, g)
    return SfeLabeller().labels(m, g)


# -- cross checks -------------------------------------------------------------

def diamond_fusion_check(m, s, pi1, pi2, psi) -> bool:
    """``<pi1><pi2>psi`` and ``<pi1.pi2>psi`` must agree; returns the shared value."""
    nested = mc_full(m, s, Dia(pi1, Dia(pi2, psi))).truth
    fused = mc_full(m, s, Dia(ox.Concat(pi1, pi2), psi)).truth
    if nested != fused:
        raise AssertionError(f"diamond fusion failed at {s}: nested={nested}, fused={fused}")
    return fused


def fuse_diamonds(f: Formula) -> Dia:
    """``<pi1><pi2>...psi`` as ``<pi1.pi2...>psi``; a formula without one becomes ``<eps>f``."""
    pi, g = ox.EPS, f
    while isinstance(g, Dia):
        pi, g = ox.concat(pi, g.expr), g.sub
    return Dia(pi, g)


def recheck_witness(m: ExpectationModel, s: str, f: Formula, word, fused: bool = False) -> bool:
    """A witness must be in L(pi), be survivable from ``s``, and make the continuation true.

    With ``fused`` the word is checked against the fused leading diamonds, as
    produced by the SAT path.
    """
    word = tuple(word)
    if fused:
        f = fuse_diamonds(to_nnf(f))
    elif not isinstance(f, Dia):
        f = to_nnf(f)
        if not isinstance(f, Dia):
            return False
    if not accepts(thompson(f.expr, m.alphabet), word):
        return False
    if not survives(m, s, word):
        return False
    return mc_full(update(m, word), s, f.sub, witness=False).truth


def auto_engine(f: Formula, prefer_sat: bool = False) -> str:
    frag = classify(f)
    if frag.word:
        return "word"
    if classify(to_nnf(f)).star_free_existential:
        return "sat" if prefer_sat else "sfe"
    return "full"


def check(m: ExpectationModel, s: str, f: Formula, engine: str = "auto", bound: int | None = None,
          prefer_sat: bool = False) -> Verdict:
    if engine == "auto":
        engine = auto_engine(f, prefer_sat)
    if engine == "full":
        return mc_full(m, s, f)
    if engine == "word":
        return mc_word(m, s, f)
    if engine == "sfe":
        return mc_sfe(m, s, f)
    if engine == "sat":
        from .satenc import check_via_sat
        return check_via_sat(m, s, f)
    if engine == "brute":
        return Verdict(eval_brute(m, s, f, bound), None, "brute")
    raise ValueError(f"unknown engine {engine!r}")


def worlds_satisfying(m: ExpectationModel, f: Formula, engine: str = "auto") -> list:
    if engine == "auto":
        engine = auto_engine(f)
    if engine == "word":
        S = worlds_word(m, f)
    elif engine == "sfe":
        S = worlds_sfe(m, f)
    else:
        check_formula(m, f)
        checker = FullChecker()
        S = {s for s in m.worlds if checker.holds(m, s, f)}
    return [w for w in m.worlds if w in S]

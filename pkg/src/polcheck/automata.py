"""Finite automata for observation expressions.

Residual languages are represented the cheap way: an immutable base NFA plus
the epsilon-closed set of states reached so far. Deterministic automata are
only built when a canonical form is needed (language equality, SAT encoding).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import obsexpr as ox
from .errors import UnknownSymbol
from .obsexpr import Alphabet, ObsExpr

EPSILON = None  # label of epsilon moves in Nfa.transitions


@dataclass(frozen=True, eq=False)
class Nfa:
    """Epsilon-NFA over integer states ``0..n_states-1``.

    ``transitions`` maps ``(state, symbol_or_None)`` to a frozenset of targets.
    """

    n_states: int
    alphabet: Alphabet
    transitions: dict
    initial: frozenset
    accepting: frozenset
    productive: frozenset = field(init=False)

    def __post_init__(self):
        for (q, a), targets in self.transitions.items():
            if not 0 <= q < self.n_states or any(not 0 <= t < self.n_states for t in targets):
                raise ValueError(f"transition {(q, a)} references an undeclared state")
            if a is not EPSILON and a not in self.alphabet:
                raise UnknownSymbol(a, self.alphabet.symbols)
        object.__setattr__(self, "productive", self._backward_reach(self.accepting))
        object.__setattr__(self, "_closure_cache", {})
        object.__setattr__(self, "_step_cache", {})

    def _backward_reach(self, targets):
        preds: dict = {}
        for (q, _), ts in self.transitions.items():
            for t in ts:
                preds.setdefault(t, set()).add(q)
        seen = set(targets)
        todo = list(targets)
        while todo:
            t = todo.pop()
            for q in preds.get(t, ()):
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        return frozenset(seen)

    @property
    def states(self) -> range:
        return range(self.n_states)

    def closure(self, states: Iterable[int]) -> frozenset:
        states = frozenset(states)
        cached = self._closure_cache.get(states)
        if cached is not None:
            return cached
        seen = set(states)
        todo = list(states)
        while todo:
            q = todo.pop()
            for t in self.transitions.get((q, EPSILON), ()):
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        result = frozenset(seen)
        self._closure_cache[states] = result
        return result

    def move(self, states: frozenset, a: str) -> frozenset:
        """Epsilon-closed successor set of an epsilon-closed set."""
        key = (states, a)
        cached = self._step_cache.get(key)
        if cached is not None:
            return cached
        targets = set()
        for q in states:
            targets.update(self.transitions.get((q, a), ()))
        result = self.closure(targets)
        self._step_cache[key] = result
        return result

    def initial_closure(self) -> frozenset:
        return self.closure(self.initial)

    def dump(self) -> str:
        """Line-oriented text form: header, transitions, initial and accepting sets."""
        lines = [f"states {self.n_states}"]
        for (q, a), ts in sorted(self.transitions.items(), key=lambda kv: (kv[0][0], kv[0][1] or "")):
            for t in sorted(ts):
                lines.append(f"{q} {'eps' if a is EPSILON else a} {t}")
        lines.append("initial " + " ".join(map(str, sorted(self.initial))))
        lines.append("accepting " + " ".join(map(str, sorted(self.accepting))))
        return "\n".join(lines) + "\n"


def thompson(e: ObsExpr, alphabet: Alphabet) -> Nfa:
    """Thompson-style epsilon-NFA, built by wiring each node between two given states.

    Only concatenation (one middle state) and star (two loop states) allocate
    states, so the automaton has at most ``2 * (size(e) + 1)`` states.
    """
    trans: dict = {}
    counter = [0]

    def new():
        counter[0] += 1
        return counter[0] - 1

    def edge(q, a, t):
        trans.setdefault((q, a), set()).add(t)

    def wire(node, start, end):
        if isinstance(node, ox.Empty):
            return
        if isinstance(node, ox.Eps):
            edge(start, EPSILON, end)
        elif isinstance(node, ox.Letter):
            if node.symbol not in alphabet:
                raise UnknownSymbol(node.symbol, alphabet.symbols)
            edge(start, node.symbol, end)
        elif isinstance(node, ox.Concat):
            mid = new()
            wire(node.left, start, mid)
            wire(node.right, mid, end)
        elif isinstance(node, ox.Union):
            wire(node.left, start, end)
            wire(node.right, start, end)
        else:
            head, tail = new(), new()
            edge(start, EPSILON, head)
            wire(node.inner, head, tail)
            edge(tail, EPSILON, head)
            edge(head, EPSILON, end)

    start, end = new(), new()
    wire(e, start, end)
    frozen = {k: frozenset(v) for k, v in trans.items()}
    return Nfa(counter[0], alphabet, frozen, frozenset({start}), frozenset({end}))


def accepts(n: Nfa, word: Sequence[str]) -> bool:
    current = n.initial_closure()
    for a in word:
        if a not in n.alphabet:
            raise UnknownSymbol(a, n.alphabet.symbols)
        current = n.move(current, a)
        if not current:
            return False
    return bool(current & n.accepting)


@dataclass(frozen=True)
class ResidualLang:
    """The language ``{v | base accepts v starting from current}``."""

    base: Nfa
    current: frozenset

    @classmethod
    def fresh(cls, base: Nfa) -> "ResidualLang":
        return cls(base, base.initial_closure())

    def step(self, a: str) -> "ResidualLang":
        if a not in self.base.alphabet:
            raise UnknownSymbol(a, self.base.alphabet.symbols)
        return ResidualLang(self.base, self.base.move(self.current, a))

    def step_word(self, word: Sequence[str]) -> "ResidualLang":
        r = self
        for a in word:
            r = r.step(a)
        return r

    def is_empty(self) -> bool:
        return self.base.productive.isdisjoint(self.current)

    def accepts_eps(self) -> bool:
        return not self.base.accepting.isdisjoint(self.current)

    def live_states(self) -> frozenset:
        """States that still matter: equal live sets mean equal languages."""
        return self.current & self.base.productive


def step(r: ResidualLang, a: str) -> ResidualLang:
    return r.step(a)


def is_empty(r: ResidualLang) -> bool:
    return r.is_empty()


def accepts_eps(r: ResidualLang) -> bool:
    return r.accepts_eps()


# -- deterministic automata ---------------------------------------------------

@dataclass(frozen=True)
class Dfa:
    """Total DFA over states ``0..n_states-1``; ``delta[q][i]`` follows ``alphabet.symbols[i]``."""

    n_states: int
    alphabet: Alphabet
    delta: tuple
    initial: int
    accepting: frozenset

    def __post_init__(self):
        if len(self.delta) != self.n_states:
            raise ValueError("transition table must have one row per state")
        for row in self.delta:
            if len(row) != len(self.alphabet) or any(not 0 <= t < self.n_states for t in row):
                raise ValueError("transition function must be total over declared states")

    def next(self, q: int, a: str) -> int:
        return self.delta[q][self.alphabet.index(a)]

    def run(self, word: Sequence[str]) -> int:
        q = self.initial
        for a in word:
            q = self.next(q, a)
        return q

    def accepts(self, word: Sequence[str]) -> bool:
        return self.run(word) in self.accepting

    def dump(self) -> str:
        lines = [f"states {self.n_states}"]
        for q, row in enumerate(self.delta):
            for a, t in zip(self.alphabet, row):
                lines.append(f"{q} {a} {t}")
        lines.append(f"initial {self.initial}")
        lines.append("accepting " + " ".join(map(str, sorted(self.accepting))))
        return "\n".join(lines) + "\n"


def determinize(n: Nfa, start: frozenset | None = None, accepting: frozenset | None = None) -> Dfa:
    """Subset construction from ``start`` (default: the initial closure).

    ``accepting`` overrides the NFA's accepting set, e.g. with ``n.productive``
    to obtain the prefix language.
    """
    start = n.initial_closure() if start is None else n.closure(start)
    final = n.accepting if accepting is None else accepting
    index = {start: 0}
    order = [start]
    rows = []
    i = 0
    while i < len(order):
        S = order[i]
        row = []
        for a in n.alphabet:
            T = n.move(S, a)
            if T not in index:
                index[T] = len(order)
                order.append(T)
            row.append(index[T])
        rows.append(tuple(row))
        i += 1
    acc = frozenset(j for j, S in enumerate(order) if not final.isdisjoint(S))
    return Dfa(len(order), n.alphabet, tuple(rows), 0, acc)


def minimize(d: Dfa) -> Dfa:
    """Minimal total DFA, states renumbered in BFS order from the initial state.

    Two DFAs for the same language minimize to equal values.
    """
    # restrict to reachable states
    reach = [d.initial]
    seen = {d.initial}
    for q in reach:
        for t in d.delta[q]:
            if t not in seen:
                seen.add(t)
                reach.append(t)
    # Moore partition refinement
    block = {q: int(q in d.accepting) for q in reach}
    n_blocks = len(set(block.values()))
    while True:
        sig = {q: (block[q],) + tuple(block[t] for t in d.delta[q]) for q in reach}
        ids: dict = {}
        new_block = {q: ids.setdefault(sig[q], len(ids)) for q in reach}
        if len(ids) == n_blocks:
            break
        block, n_blocks = new_block, len(ids)
    # canonical BFS numbering of blocks
    rep = {}
    for q in reach:
        rep.setdefault(block[q], q)
    number = {block[d.initial]: 0}
    queue = deque([block[d.initial]])
    rows = {}
    while queue:
        b = queue.popleft()
        row = []
        for t in d.delta[rep[b]]:
            tb = block[t]
            if tb not in number:
                number[tb] = len(number)
                queue.append(tb)
            row.append(number[tb])
        rows[number[b]] = tuple(row)
    acc = frozenset(number[block[q]] for q in reach if q in d.accepting)
    return Dfa(len(number), d.alphabet, tuple(rows[i] for i in range(len(number))), 0, acc)


def canonical(x) -> Dfa:
    """Canonical minimal DFA of a ResidualLang, Nfa, Dfa or (expression, alphabet) pair."""
    if isinstance(x, Dfa):
        return minimize(x)
    if isinstance(x, ResidualLang):
        return minimize(determinize(x.base, x.current))
    if isinstance(x, Nfa):
        return minimize(determinize(x))
    e, alphabet = x
    return minimize(determinize(thompson(e, alphabet)))


def lang_equal(a, b) -> bool:
    da, db = canonical(a), canonical(b)
    if da.alphabet != db.alphabet:
        raise ValueError("language comparison needs a shared alphabet")
    return da == db


def dfa_is_empty(d: Dfa) -> bool:
    return not minimize(d).accepting


def dfa_to_expr(d: Dfa) -> ObsExpr:
    """Expression for L(d) by state elimination."""
    n = d.n_states
    start, final = n, n + 1
    # R[i][j]: expression labelling the edge i -> j
    R: dict = {}

    def add(i, j, e):
        R[(i, j)] = ox.union(R.get((i, j), ox.EMPTY), e)

    for q, row in enumerate(d.delta):
        for a, t in zip(d.alphabet, row):
            add(q, t, ox.Letter(a))
    add(start, d.initial, ox.EPS)
    for q in d.accepting:
        add(q, final, ox.EPS)
    nodes = set(range(n))
    for k in range(n):
        nodes.discard(k)
        loop = ox.star(R.pop((k, k), ox.EMPTY))
        ins = [(i, e) for (i, j), e in R.items() if j == k]
        outs = [(j, e) for (i, j), e in R.items() if i == k]
        for i, _ in ins:
            del R[(i, k)]
        for j, _ in outs:
            del R[(k, j)]
        for i, ei in ins:
            for j, ej in outs:
                add(i, j, ox.concat(ox.concat(ei, loop), ej))
    return R.get((start, final), ox.EMPTY)

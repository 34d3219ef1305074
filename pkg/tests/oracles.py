"""Reference implementations used only by the tests.

None of these touch the package's residues, automata or solver, so they can
serve as independent ground truth.
"""

import itertools
from collections import deque

from polcheck import obsexpr as ox


def language(e, max_len):
    """All words of L(e) up to ``max_len``, straight from the set semantics."""
    if isinstance(e, ox.Empty):
        return set()
    if isinstance(e, ox.Eps):
        return {()}
    if isinstance(e, ox.Letter):
        return {(e.symbol,)} if max_len >= 1 else set()
    if isinstance(e, ox.Union):
        return language(e.left, max_len) | language(e.right, max_len)
    if isinstance(e, ox.Concat):
        left = language(e.left, max_len)
        right = language(e.right, max_len)
        return {u + v for u in left for v in right if len(u) + len(v) <= max_len}
    inner = language(e.inner, max_len) - {()}
    result = {()}
    frontier = {()}
    while frontier:
        frontier = {u + v for u in frontier for v in inner if len(u) + len(v) <= max_len} - result
        result |= frontier
    return result


def words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def sat_truth_table(clauses, n_vars):
    """A satisfying assignment as a dict, or None."""
    for bits in itertools.product([False, True], repeat=n_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return {i + 1: b for i, b in enumerate(bits)}
    return None


def qbf_value(prefix, matrix, assignment=None):
    assignment = dict(assignment or {})
    if not prefix:
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in matrix)
    (q, v), rest = prefix[0], prefix[1:]
    branches = (qbf_value(rest, matrix, {**assignment, v: b}) for b in (False, True))
    return any(branches) if q == "E" else all(branches)


def intersection_nonempty(dfas):
    """BFS over the product automaton."""
    alphabet = dfas[0].alphabet.symbols
    start = tuple(d.initial for d in dfas)
    seen = {start}
    queue = deque([start])
    while queue:
        states = queue.popleft()
        if all(q in d.accepting for q, d in zip(states, dfas)):
            return True
        for i in range(len(alphabet)):
            nxt = tuple(d.delta[q][i] for q, d in zip(states, dfas))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False

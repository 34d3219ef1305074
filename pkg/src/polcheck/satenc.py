"""SAT encoding of Star-Free-Existential diamond queries, plus a small DPLL solver.

A query ``<pi> phi`` with ``phi`` epistemic (booleans, K, Kh) and ``pi``
star-free is true iff for some length ``k`` the CNF built by :func:`encode`
is satisfiable. The letters of the guessed word are read back from a model
of the CNF by :func:`decode_plan`.
"""

from __future__ import annotations

import os
import subprocess
import tempfile
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from . import obsexpr as ox
from .automata import determinize, minimize, thompson
from .errors import FragmentMismatch, KTooLarge
from .logic import (And, Bot, Box, Dia, Formula, Imp, K, Not, Or, Prop, Top, subformulas,
                    to_nnf)
from .model import ExpectationModel


# -- variable tags ------------------------------------------------------------

class Letter(NamedTuple):
    t: int
    a: str


class Truth(NamedTuple):
    world: str
    formula: int  # index of the subformula in post-order


class AutState(NamedTuple):
    automaton: str  # "pi" or the world whose prefix automaton it is
    t: int
    q: int


class Surv(NamedTuple):
    world: str


class Aux(NamedTuple):
    n: int


@dataclass(frozen=True)
class CnfInstance:
    var_count: int
    clauses: tuple
    varmap: dict = field(compare=False)
    k: int = 0

    def name_of(self, var: int):
        for tag, v in self.varmap.items():
            if v == var:
                return tag
        return None


@dataclass
class SatResult:
    sat: bool
    assignment: Optional[dict] = None  # var -> bool, total on 1..var_count when sat

    def __bool__(self):
        return self.sat


class _Builder:
    def __init__(self):
        self.varmap: dict = {}
        self.clauses: list = []
        self.n_aux = 0

    def var(self, tag) -> int:
        v = self.varmap.get(tag)
        if v is None:
            v = len(self.varmap) + 1
            self.varmap[tag] = v
        return v

    def aux(self) -> int:
        self.n_aux += 1
        return self.var(Aux(self.n_aux))

    def add(self, *lits):
        self.clauses.append(tuple(lits))

    def exactly_one(self, vs):
        self.add(*vs)
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                self.add(-vs[i], -vs[j])

    def iff_or(self, x, lits):
        """x <-> OR(lits)."""
        self.add(-x, *lits)
        for l in lits:
            self.add(x, -l)

    def iff_and(self, x, lits):
        """x <-> AND(lits)."""
        for l in lits:
            self.add(-x, l)
        self.add(x, *[-l for l in lits])


# -- query shape --------------------------------------------------------------

def _epistemic(f: Formula) -> bool:
    return not any(isinstance(g, (Box, Dia)) for g in subformulas(f))


def split_query(f: Formula) -> tuple:
    """``(pi, phi)`` with nested leading diamonds fused; ``eps`` when there is none."""
    g = to_nnf(f)
    pi = ox.EPS
    while isinstance(g, Dia):
        pi = ox.concat(pi, g.expr)
        g = g.sub
    if not ox.is_star_free(pi):
        raise FragmentMismatch("the observation expression contains a star", pi)
    if not _epistemic(g):
        bad = next(h for h in subformulas(g) if isinstance(h, (Box, Dia)))
        raise FragmentMismatch("the query must have the shape <pi> phi with phi modality-free", bad)
    return pi, g


def _prefix_dfa(m: ExpectationModel, v: str):
    base = m.bases[v]
    return minimize(determinize(base, m.exp(v).current, accepting=base.productive))


def encode(m: ExpectationModel, s: str, pi: ox.ObsExpr, phi: Formula, k: int) -> CnfInstance:
    m.check_world(s)
    if not ox.is_star_free(pi):
        raise FragmentMismatch("the observation expression contains a star", pi)
    if not _epistemic(phi):
        raise FragmentMismatch("the continuation formula must be modality-free", phi)
    from .engines import check_formula
    check_formula(m, Dia(pi, phi))
    maxlen = ox.max_word_length(pi)
    if k < 0 or k > maxlen:
        raise KTooLarge(k, maxlen)

    b = _Builder()
    alphabet = list(m.alphabet)
    letters = {t: [b.var(Letter(t, a)) for a in alphabet] for t in range(1, k + 1)}
    for t in range(1, k + 1):
        b.exactly_one(letters[t])

    def unroll(name, dfa):
        states = range(dfa.n_states)
        for t in range(k + 1):
            b.exactly_one([b.var(AutState(name, t, q)) for q in states])
        b.add(b.var(AutState(name, 0, dfa.initial)))
        for t in range(k):
            for q in states:
                for i, a in enumerate(alphabet):
                    b.add(-b.var(AutState(name, t, q)), -letters[t + 1][i],
                          b.var(AutState(name, t + 1, dfa.delta[q][i])))
        return [b.var(AutState(name, k, q)) for q in sorted(dfa.accepting)]

    pi_dfa = minimize(determinize(thompson(pi, m.alphabet)))
    b.add(*unroll("pi", pi_dfa))

    surv = {}
    for v in m.worlds:
        finals = unroll(v, _prefix_dfa(m, v))
        surv[v] = b.var(Surv(v))
        b.iff_or(surv[v], finals)
    b.add(surv[s])

    index = {}
    for i, g in enumerate(subformulas(phi)):
        index.setdefault(id(g), i)
    done = set()

    def truth(u, g) -> int:
        x = b.var(Truth(u, index[id(g)]))
        if (u, id(g)) in done:
            return x
        done.add((u, id(g)))
        if isinstance(g, Top):
            b.add(x)
        elif isinstance(g, Bot):
            b.add(-x)
        elif isinstance(g, Prop):
            b.add(x if g.name in m.val[u] else -x)
        elif isinstance(g, Not):
            y = truth(u, g.sub)
            b.add(-x, -y)
            b.add(x, y)
        elif isinstance(g, And):
            b.iff_and(x, [truth(u, g.left), truth(u, g.right)])
        elif isinstance(g, Or):
            b.iff_or(x, [truth(u, g.left), truth(u, g.right)])
        elif isinstance(g, Imp):
            b.iff_or(x, [-truth(u, g.left), truth(u, g.right)])
        elif isinstance(g, K):
            # K: no surviving v in the cell refutes the argument
            hs = []
            for v in m.cell(g.agent, u):
                h = b.aux()
                b.iff_and(h, [surv[v], -truth(v, g.sub)])
                hs.append(h)
            b.iff_or(-x, hs)
        else:
            hs = []
            for v in m.cell(g.agent, u):
                h = b.aux()
                b.iff_and(h, [surv[v], truth(v, g.sub)])
                hs.append(h)
            b.iff_or(x, hs)
        return x

    b.add(truth(s, phi))
    return CnfInstance(len(b.varmap), tuple(b.clauses), b.varmap, k)


# -- solving ------------------------------------------------------------------

def solve(c: CnfInstance) -> SatResult:
    """DPLL with two watched literals and chronological backtracking.

    Branches on the smallest unassigned variable, trying true first.
    """
    n = c.var_count
    val: list = [None] * (n + 1)
    trail: list = []
    watches: dict = {}
    units = []
    clauses = []
    for cl in c.clauses:
        lits = list(dict.fromkeys(cl))
        if any(-l in lits for l in lits):
            continue
        if not lits:
            return SatResult(False)
        if len(lits) == 1:
            units.append(lits[0])
            continue
        clauses.append(lits)
        watches.setdefault(lits[0], []).append(lits)
        watches.setdefault(lits[1], []).append(lits)

    def value(l):
        v = val[abs(l)]
        return None if v is None else (v if l > 0 else not v)

    def assign(l):
        val[abs(l)] = l > 0
        trail.append(l)

    for l in units:
        cur = value(l)
        if cur is False:
            return SatResult(False)
        if cur is None:
            assign(l)

    qhead = 0

    def propagate() -> bool:
        """Returns False on conflict."""
        nonlocal qhead
        while qhead < len(trail):
            false_lit = -trail[qhead]
            qhead += 1
            ws = watches.get(false_lit)
            if not ws:
                continue
            keep = []
            i = 0
            while i < len(ws):
                cl = ws[i]
                i += 1
                if cl[0] == false_lit:
                    cl[0], cl[1] = cl[1], cl[0]
                if value(cl[0]) is True:
                    keep.append(cl)
                    continue
                for j in range(2, len(cl)):
                    if value(cl[j]) is not False:
                        cl[1], cl[j] = cl[j], cl[1]
                        watches.setdefault(cl[1], []).append(cl)
                        break
                else:
                    keep.append(cl)
                    if value(cl[0]) is None:
                        assign(cl[0])
                    else:
                        keep.extend(ws[i:])
                        watches[false_lit] = keep
                        return False
            watches[false_lit] = keep
        return True

    decisions: list = []  # (trail position, literal, flipped)
    next_var = 1

    def undo(pos):
        nonlocal qhead, next_var
        for l in trail[pos:]:
            val[abs(l)] = None
            next_var = min(next_var, abs(l))
        del trail[pos:]
        qhead = pos

    while True:
        if not propagate():
            while decisions and decisions[-1][2]:
                pos, _, _ = decisions.pop()
                undo(pos)
            if not decisions:
                return SatResult(False)
            pos, lit, _ = decisions.pop()
            undo(pos)
            decisions.append((pos, -lit, True))
            assign(-lit)
            continue
        while next_var <= n and val[next_var] is not None:
            next_var += 1
        if next_var > n:
            return SatResult(True, {v: bool(val[v]) for v in range(1, n + 1)})
        decisions.append((len(trail), next_var, False))
        assign(next_var)


def emit_dimacs(c: CnfInstance) -> str:
    lines = [f"p cnf {c.var_count} {len(c.clauses)}"]
    lines += [" ".join(map(str, cl)) + " 0" for cl in c.clauses]
    return "\n".join(lines) + "\n"


def parse_solver_output(text: str, var_count: int) -> SatResult:
    """Read ``SAT``/``UNSAT`` (optionally with an ``s`` prefix) and ``v`` lines."""
    status = None
    values: dict = {}
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "s":
            parts = parts[1:]
        if parts and parts[0] in ("SAT", "SATISFIABLE"):
            status = True
        elif parts and parts[0] in ("UNSAT", "UNSATISFIABLE"):
            status = False
        elif parts and parts[0] == "v":
            for tok in parts[1:]:
                l = int(tok)
                if l:
                    values[abs(l)] = l > 0
    if status is None:
        raise RuntimeError("external solver reported neither SAT nor UNSAT")
    if not status:
        return SatResult(False)
    return SatResult(True, {v: values.get(v, False) for v in range(1, var_count + 1)})


def solve_external(c: CnfInstance, solver_path: str) -> SatResult:
    fd, path = tempfile.mkstemp(suffix=".cnf")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(emit_dimacs(c))
        proc = subprocess.run([solver_path, path], capture_output=True, text=True, check=False)
        return parse_solver_output(proc.stdout, c.var_count)
    finally:
        os.unlink(path)


def decode_plan(assignment: dict, varmap: dict) -> tuple:
    """The guessed word: the true letter variable at each position."""
    chosen = {}
    for tag, v in varmap.items():
        if isinstance(tag, Letter) and assignment.get(v):
            chosen[tag.t] = tag.a
    return tuple(chosen[t] for t in sorted(chosen))


def check_via_sat(m: ExpectationModel, s: str, f: Formula, solver_path: str | None = None):
    """Try every word length ``k`` up to the longest word of ``pi``; the first SAT gives the plan."""
    from .engines import Verdict

    pi, phi = split_query(f)
    stats = {"encodings": 0, "vars": 0, "clauses": 0}
    maxlen = ox.max_word_length(pi)
    for k in range(0, int(maxlen) + 1):
        c = encode(m, s, pi, phi, k)
        stats["encodings"] += 1
        stats["vars"] = max(stats["vars"], c.var_count)
        stats["clauses"] = max(stats["clauses"], len(c.clauses))
        res = solve_external(c, solver_path) if solver_path else solve(c)
        if res.sat:
            stats["k"] = k
            return Verdict(True, decode_plan(res.assignment, c.varmap), "sat", stats)
    return Verdict(False, None, "sat", stats)


def encodings(m: ExpectationModel, s: str, f: Formula) -> list:
    """One CNF per word length, as written by the ``encode`` subcommand."""
    pi, phi = split_query(f)
    return [encode(m, s, pi, phi, k) for k in range(0, int(ox.max_word_length(pi)) + 1)]

"""Turn 3-SAT, QBF and DFA intersection instances into model checking queries.

Each generator returns ``(model, point, formula)`` such that the source
instance is a yes-instance iff the formula holds at the point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from . import obsexpr as ox
from .automata import Dfa, dfa_is_empty, dfa_to_expr
from .logic import Box, Dia, Formula, KHat, Prop, conj
from .model import ExpectationModel
from .obsexpr import Alphabet, Letter


@dataclass(frozen=True)
class QbfInstance:
    prefix: tuple   # ("E" | "A", variable) pairs, outermost first
    matrix: tuple   # clauses as tuples of nonzero ints

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple((q, int(v)) for q, v in self.prefix))
        object.__setattr__(self, "matrix", tuple(tuple(c) for c in self.matrix))
        names = [v for _, v in self.prefix]
        if len(set(names)) != len(names):
            raise ValueError("a variable is quantified twice")
        if any(q not in ("E", "A") for q, _ in self.prefix):
            raise ValueError("quantifiers must be 'E' or 'A'")
        free = {abs(l) for c in self.matrix for l in c} - set(names)
        if free:
            raise ValueError(f"unquantified variables {sorted(free)}")


@dataclass(frozen=True)
class DfaFamily:
    dfas: tuple

    def __post_init__(self):
        object.__setattr__(self, "dfas", tuple(self.dfas))
        if not self.dfas:
            raise ValueError("a DFA family needs at least one automaton")
        if any(d.alphabet != self.dfas[0].alphabet for d in self.dfas):
            raise ValueError("all automata must share one alphabet")

    @property
    def alphabet(self) -> Alphabet:
        return self.dfas[0].alphabet


def _tr(lit: int) -> str:
    return f"a{abs(lit)}" if lit > 0 else f"a{abs(lit)}'"


def _clause_model(clauses, variables, extra_world=False):
    alphabet = Alphabet([s for v in variables for s in (_tr(v), _tr(-v))])
    worlds, exp, val = [], {}, {}
    for j, clause in enumerate(clauses, 1):
        if not clause:
            raise ValueError(f"clause {j} is empty")
        w = f"c{j}"
        worlds.append(w)
        val[w] = [f"p{j}"]
        summands = []
        for lit in dict.fromkeys(clause):
            others = ox.star(ox.union_of(Letter(a) for a in alphabet
                                         if a not in (_tr(lit), _tr(-lit))))
            summands.append(ox.concat(ox.concat(others, Letter(_tr(lit))), others))
        exp[w] = ox.union_of(summands)
    if extra_world:
        worlds.append("g")
        val["g"] = []
        exp["g"] = ox.star(ox.union_of(Letter(a) for a in alphabet))
    relations = {"1": [(worlds[0], w) for w in worlds[1:]]}
    props = [f"p{j}" for j in range(1, len(clauses) + 1)]
    return ExpectationModel.build(alphabet, ["1"], props, worlds, val, exp, relations)


def _choice(v: int):
    return ox.union(Letter(_tr(v)), Letter(_tr(-v)))


def _goal(n_clauses: int) -> Formula:
    return conj(*[KHat("1", Prop(f"p{j}")) for j in range(1, n_clauses + 1)])


def from_3sat(clauses: Sequence[Sequence[int]], n_vars: int | None = None) -> tuple:
    """Clause worlds ``c1..cm`` over letters ``a_i`` / ``a_i'``; the diamonds pick an assignment."""
    clauses = [tuple(c) for c in clauses]
    if not clauses:
        raise ValueError("need at least one clause")
    n = max([abs(l) for c in clauses for l in c] + [n_vars or 0])
    variables = list(range(1, n + 1))
    m = _clause_model(clauses, variables)
    f = _goal(len(clauses))
    for v in reversed(variables):
        f = Dia(_choice(v), f)
    return m, "c1", f


def from_qbf(q: QbfInstance) -> tuple:
    """As :func:`from_3sat`, with a box per universal variable.

    The point is an extra world ``g`` expecting every word, so it survives
    every assignment; otherwise a box could hold vacuously once the point is
    eliminated.
    """
    if not q.matrix:
        raise ValueError("need at least one clause")
    variables = [v for _, v in q.prefix]
    m = _clause_model(q.matrix, variables, extra_world=True)
    f = _goal(len(q.matrix))
    for quant, v in reversed(q.prefix):
        f = (Dia if quant == "E" else Box)(_choice(v), f)
    return m, "g", f


def _fresh(name: str, taken) -> str:
    while name in taken:
        name += "_"
    return name


def from_dfa_intersection(fam: DfaFamily) -> tuple:
    """Chain model ``w0 ~1 w0' ~2 w1 ~1 w1' ... ~2 wn``; ``p`` holds only at ``wn``.

    Every expectation ends with an extra ``end`` letter so that surviving
    ``u.end`` means ``u`` is accepted, not merely a prefix of an accepted word.
    An automaton with an empty language gets a single letter that the
    modality never produces.
    """
    sigma = list(fam.alphabet)
    end = _fresh("end", sigma)
    stuck = _fresh("stuck", sigma + [end])
    alphabet = Alphabet(sigma + [end, stuck])
    n = len(fam.dfas)
    universal = ox.concat(ox.star(ox.union_of(Letter(a) for a in sigma)), Letter(end))
    langs = [universal]
    for d in fam.dfas:
        if dfa_is_empty(d):
            langs.append(Letter(stuck))
        else:
            langs.append(ox.concat(dfa_to_expr(d), Letter(end)))
    worlds, exp = [], {}
    for i in range(n + 1):
        worlds.append(f"w{i}")
        exp[f"w{i}"] = langs[i]
        if i < n:
            worlds.append(f"w{i}'")
            exp[f"w{i}'"] = langs[i]
    relations = {
        "1": [(f"w{i}", f"w{i}'") for i in range(n)],
        "2": [(f"w{i}'", f"w{i + 1}") for i in range(n)],
    }
    val = {f"w{n}": ["p"]}
    m = ExpectationModel.build(alphabet, ["1", "2"], ["p"], worlds, val, exp, relations)
    f: Formula = Prop("p")
    for _ in range(n + 1):
        f = KHat("1", KHat("2", f))
    return m, "w0", Dia(universal, f)


# -- instance readers ---------------------------------------------------------

def _dimacs_lines(text: str):
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("c") and not line.startswith("%"):
            yield line


def read_dimacs(text: str) -> tuple:
    """``(n_vars, clauses)`` from DIMACS CNF text."""
    n_vars = 0
    clauses, current = [], []
    for line in _dimacs_lines(text):
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            n_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    return n_vars, clauses


def read_qdimacs(text: str) -> QbfInstance:
    """QDIMACS; variables missing from the prefix become outermost existentials."""
    prefix, body = [], []
    for line in _dimacs_lines(text):
        head = line.split()[0]
        if head in ("e", "a"):
            q = "E" if head == "e" else "A"
            prefix.extend((q, int(t)) for t in line.split()[1:] if t != "0")
        elif head != "p":
            body.append(line)
    _, clauses = read_dimacs("\n".join(body))
    bound = {v for _, v in prefix}
    used = sorted({abs(l) for c in clauses for l in c} - bound)
    return QbfInstance(tuple(("E", v) for v in used) + tuple(prefix), tuple(clauses))


def read_dfa_family(doc) -> DfaFamily:
    """``{"alphabet": [...], "dfas": [{"states", "initial", "accepting", "delta"}]}``."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    alphabet = Alphabet(doc["alphabet"])
    dfas = []
    for d in doc["dfas"]:
        dfas.append(Dfa(d["states"], alphabet, tuple(tuple(r) for r in d["delta"]),
                        d.get("initial", 0), frozenset(d["accepting"])))
    return DfaFamily(tuple(dfas))

"""Epistemic expectation models and update by observation.

A model keeps its original world list (the *universe*) forever. Updating only
shrinks the set of alive worlds and advances the state-set of each world's
expectation automaton, so every model reachable by updates shares the base
automata of the model it came from.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping, Sequence

from . import obsexpr as ox
from .automata import Nfa, ResidualLang, thompson
from .errors import ModelError, UnknownAgent, UnknownWorld
from .obsexpr import Alphabet, ObsExpr


def _closure_partition(worlds: Sequence[str], pairs: Iterable) -> tuple:
    """Equivalence classes of the reflexive-symmetric-transitive closure (union-find)."""
    parent = {w: w for w in worlds}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    classes: dict = {}
    for w in worlds:
        classes.setdefault(find(w), []).append(w)
    return tuple(frozenset(c) for c in classes.values())


class ExpectationModel:
    """Immutable epistemic expectation model.

    Build one with :meth:`build` or :func:`load_model`; derive updated models
    with :func:`update`.
    """

    __slots__ = ("alphabet", "agents", "props", "universe", "val", "partitions",
                 "exprs", "bases", "_current", "_alive", "observed", "issues",
                 "_class_of", "_cls_index", "_key")

    def __init__(self, alphabet, agents, props, universe, val, partitions, exprs,
                 bases, current, alive, observed=(), issues=(), class_of=None):
        self.alphabet: Alphabet = alphabet
        self.agents: tuple = agents
        self.props: frozenset = props
        self.universe: tuple = universe
        self.val: Mapping[str, frozenset] = val
        self.partitions: Mapping[str, tuple] = partitions
        self.exprs: Mapping[str, ObsExpr] = exprs
        self.bases: Mapping[str, Nfa] = bases
        self._current: Mapping[str, frozenset] = current
        self._alive: frozenset = alive
        self.observed: tuple = observed
        self.issues: tuple = issues
        # agent -> world -> its class in universe order; shared by all updated models
        self._class_of = {
            agent: {w: tuple(v for v in universe if v in c) for c in part for w in c}
            for agent, part in partitions.items()
        } if class_of is None else class_of
        self._cls_index = None
        self._key = None

    @classmethod
    def build(cls, alphabet, agents, props, worlds, val, exp, relations=None) -> "ExpectationModel":
        """Assemble a model from plain data.

        ``exp`` maps worlds to expressions (or regex text); ``relations`` maps
        agents to arbitrary pairs, closed to equivalences here. Problems that
        do not prevent construction are kept in ``issues`` for :func:`validate`.
        """
        from .logic import parse_obs

        alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
        agents = tuple(agents)
        universe = tuple(worlds)
        if len(set(universe)) != len(universe):
            raise ModelError("duplicate world names")
        if len(set(agents)) != len(agents):
            raise ModelError("duplicate agent names")
        issues = []
        relations = relations or {}
        for agent in relations:
            if agent not in agents:
                issues.append(f"relation given for unknown agent {agent!r}")
        partitions = {}
        for agent in agents:
            pairs = []
            for pair in relations.get(agent, ()):
                a, b = pair
                bad = [x for x in (a, b) if x not in universe]
                if bad:
                    issues.append(f"agent {agent}: relation pair {a!r}~{b!r} names unknown world {bad[0]!r}")
                    continue
                pairs.append((a, b))
            partitions[agent] = _closure_partition(universe, pairs)
        exprs = {}
        for w in universe:
            if w not in exp:
                raise ModelError(f"world {w!r} has no expectation")
            e = exp[w]
            exprs[w] = parse_obs(e) if isinstance(e, str) else e
        bases = {}
        for w in universe:
            bases[w] = thompson(exprs[w], alphabet)
        current = {w: bases[w].initial_closure() for w in universe}
        for w in val:
            if w not in universe:
                issues.append(f"valuation given for unknown world {w!r}")
        valuation = {w: frozenset(val.get(w, ())) for w in universe}
        return cls(alphabet, agents, frozenset(props), universe, valuation, partitions,
                   exprs, bases, current, frozenset(universe), (), tuple(issues))

    # -- views ------------------------------------------------------------------

    @property
    def worlds(self) -> tuple:
        """Alive worlds in original order."""
        return tuple(w for w in self.universe if w in self._alive)

    def is_alive(self, w: str) -> bool:
        return w in self._alive

    def check_world(self, w: str):
        if w not in self._alive:
            raise UnknownWorld(w)

    def check_agent(self, agent: str):
        if agent not in self.partitions:
            raise UnknownAgent(agent)

    def exp(self, w: str) -> ResidualLang:
        self.check_world(w)
        return ResidualLang(self.bases[w], self._current[w])

    def residual_expr(self, w: str) -> ObsExpr:
        """Expression-level residue of the original expectation by everything observed."""
        return ox.residue_word(self.exprs[w], self.observed)

    def cell(self, agent: str, w: str) -> tuple:
        """Alive worlds indistinguishable from ``w`` for ``agent`` (including ``w``)."""
        self.check_agent(agent)
        if self._cls_index is None:
            self._cls_index = {}
        key = (agent, w)
        hit = self._cls_index.get(key)
        if hit is None:
            cls = self._class_of[agent].get(w)
            if cls is None:
                raise UnknownWorld(w)
            hit = tuple(v for v in cls if v in self._alive)
            self._cls_index[key] = hit
        return hit

    def relation_pairs(self, agent: str) -> set:
        out = set()
        for c in self.partitions[agent]:
            alive = [v for v in c if v in self._alive]
            out.update((a, b) for a in alive for b in alive)
        return out

    # -- identity ---------------------------------------------------------------

    def config_key(self) -> tuple:
        if self._key is None:
            key = []
            for w in self.universe:
                if w in self._alive:
                    key.append((True, self._current[w] & self.bases[w].productive))
                else:
                    key.append((False, frozenset()))
            self._key = tuple(key)
        return self._key

    def _signature(self):
        return (self.alphabet, self.agents, self.props, self.universe, self.worlds,
                tuple(sorted(self.val.items())),
                tuple((a, frozenset(p)) for a, p in sorted(self.partitions.items())),
                tuple(id(self.bases[w]) for w in self.universe),
                tuple(self._current[w] for w in self.worlds))

    def __eq__(self, other):
        if not isinstance(other, ExpectationModel):
            return NotImplemented
        return self._signature() == other._signature()

    def __hash__(self):
        return hash(self.config_key())

    def __repr__(self):
        return f"ExpectationModel(worlds={list(self.worlds)}, observed={''.join(self.observed) or 'eps'})"

    # -- derivation -------------------------------------------------------------

    def _derive(self, current, alive, observed):
        m = ExpectationModel(self.alphabet, self.agents, self.props, self.universe, self.val,
                             self.partitions, self.exprs, self.bases, current, alive,
                             observed, self.issues, self._class_of)
        return m


def update_letter(m: ExpectationModel, a: str) -> ExpectationModel:
    m.alphabet.check((a,))
    current = dict(m._current)
    alive = set()
    for w in m.worlds:
        base = m.bases[w]
        nxt = base.move(m._current[w], a)
        current[w] = nxt
        if not base.productive.isdisjoint(nxt):
            alive.add(w)
    return m._derive(current, frozenset(alive), m.observed + (a,))


def update(m: ExpectationModel, word: Sequence[str]) -> ExpectationModel:
    """The model after publicly observing ``word``; may have no worlds left."""
    word = m.alphabet.check(word)
    if not word:
        # keep worlds whose expectation is nonempty (all of them for a valid model)
        alive = frozenset(w for w in m.worlds if not m.exp(w).is_empty())
        if alive == m._alive:
            return m
        return m._derive(dict(m._current), alive, m.observed)
    for a in word:
        m = update_letter(m, a)
    return m


def survives(m: ExpectationModel, w: str, word: Sequence[str]) -> bool:
    m.check_world(w)
    return w in update(m, word).worlds


def config_key(m: ExpectationModel) -> tuple:
    return m.config_key()


def validate(m: ExpectationModel) -> list:
    """Every invariant breach as a message; an empty list means the model is valid."""
    problems = list(m.issues)
    for w in m.universe:
        for p in sorted(m.val[w] - m.props):
            problems.append(f"world {w}: proposition {p!r} is not declared")
        for a in sorted(ox.symbols_of(m.exprs[w]) - set(m.alphabet)):
            problems.append(f"world {w}: action {a!r} is not in the alphabet")
        if w in m._alive and m.exp(w).is_empty():
            problems.append(f"world {w}: empty expectation")
    for agent, part in m.partitions.items():
        seen = set()
        for c in part:
            if seen & c:
                problems.append(f"agent {agent}: overlapping classes")
            seen |= c
        if seen != set(m.universe):
            problems.append(f"agent {agent}: relation is not total on worlds")
    return problems


# -- JSON ---------------------------------------------------------------------

def from_dict(doc: Mapping) -> ExpectationModel:
    try:
        worlds = doc["worlds"]
        names = [w["name"] for w in worlds]
        return ExpectationModel.build(
            alphabet=doc["alphabet"],
            agents=doc.get("agents", []),
            props=doc.get("props", []),
            worlds=names,
            val={w["name"]: w.get("props", []) for w in worlds},
            exp={w["name"]: w["exp"] for w in worlds},
            relations=doc.get("relations", {}),
        )
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed model document: {exc}") from exc
    except ValueError as exc:
        raise ModelError(str(exc)) from exc


def load_model(path) -> ExpectationModel:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: invalid JSON: {exc}") from exc
    return from_dict(doc)


def to_dict(m: ExpectationModel) -> dict:
    """JSON-ready document; an updated model is exported with residual expectations."""
    worlds = m.worlds
    relations = {}
    for agent in m.agents:
        pairs = []
        for c in m.partitions[agent]:
            members = [w for w in worlds if w in c]
            pairs.extend([members[0], other] for other in members[1:])
        relations[agent] = pairs
    return {
        "alphabet": list(m.alphabet),
        "agents": list(m.agents),
        "props": sorted(m.props),
        "worlds": [
            {"name": w, "props": sorted(m.val[w]), "exp": ox.to_text(m.residual_expr(w))}
            for w in worlds
        ],
        "relations": relations,
    }


def dumps_model(m: ExpectationModel) -> str:
    return json.dumps(to_dict(m), indent=2) + "\n"

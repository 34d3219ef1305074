"""POL formulas: syntax tree, parser, printer, negation normal form, fragments.

Formula grammar (loosest binding first)::

    imp    := or ('->' imp)?
    or     := and ('|' and)*
    and    := unary ('&' unary)*
    unary  := '~' unary | 'K_'agent unary | 'Kh_'agent unary
            | '[' regex ']' unary | '<' regex '>' unary | atom
    atom   := 'true' | 'false' | ident | '(' imp ')'

Regex grammar::

    union   := concat ('+' concat)*
    concat  := postfix ('.'? postfix)*
    postfix := atom ('*' | '^+' | '^' digits)*
    atom    := ident | 'eps' | 'empty' | '(' union ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from . import obsexpr as ox
from .errors import ParseError
from .obsexpr import ObsExpr


class Formula:
    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class K(Formula):
    agent: str
    sub: Formula


@dataclass(frozen=True)
class KHat(Formula):
    agent: str
    sub: Formula


@dataclass(frozen=True)
class Box(Formula):
    expr: ObsExpr
    sub: Formula


@dataclass(frozen=True)
class Dia(Formula):
    expr: ObsExpr
    sub: Formula


TOP = Top()
BOT = Bot()

BINARY = (And, Or, Imp)
UNARY_MODAL = (K, KHat, Box, Dia)


def conj(*fs: Formula) -> Formula:
    if not fs:
        return TOP
    result = fs[0]
    for f in fs[1:]:
        result = And(result, f)
    return result


def disj(*fs: Formula) -> Formula:
    if not fs:
        return BOT
    result = fs[0]
    for f in fs[1:]:
        result = Or(result, f)
    return result


def _children(f: Formula) -> tuple:
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, (Not, K, KHat, Box, Dia)):
        return (f.sub,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Post-order traversal (children before parents); a shared node is visited once."""
    seen = set()
    stack = [(f, False)]
    while stack:
        g, expanded = stack.pop()
        if expanded:
            yield g
            continue
        if id(g) in seen:
            continue
        seen.add(id(g))
        stack.append((g, True))
        for c in reversed(_children(g)):
            stack.append((c, False))


def modalities(f: Formula) -> list:
    return [g.expr for g in subformulas(f) if isinstance(g, (Box, Dia))]


# -- tokenizer ----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<kh>Kh_(?P<kh_agent>[A-Za-z0-9_]+))
  | (?P<k>K_(?P<k_agent>[A-Za-z0-9_]+))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)
  | (?P<num>[0-9]+)
  | (?P<op>->|[()\[\]<>~&|+.*^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'kh' 'k' 'ident' 'num' 'op' 'eof'
    text: str
    pos: int
    value: str = ""


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.group("ws"):
            pass
        elif m.group("kh"):
            tokens.append(Token("kh", m.group(0), pos, m.group("kh_agent")))
        elif m.group("k"):
            tokens.append(Token("k", m.group(0), pos, m.group("k_agent")))
        elif m.group("ident"):
            tokens.append(Token("ident", m.group(0), pos))
        elif m.group("num"):
            tokens.append(Token("num", m.group(0), pos))
        else:
            tokens.append(Token("op", m.group(0), pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def is_op(self, *ops) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def expect_op(self, op: str):
        if not self.is_op(op):
            self.fail({repr(op)})
        return self.advance()

    def fail(self, expected):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"unexpected {found}", t.pos, expected)

    def expect_eof(self, expected):
        if self.tok.kind != "eof":
            self.fail(expected)

    # formulas
    def imp(self) -> Formula:
        left = self.disj()
        if self.is_op("->"):
            self.advance()
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.is_op("|"):
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.is_op("&"):
            self.advance()
            f = And(f, self.unary())
        return f

    _FORMULA_START = {"'~'", "'('", "'['", "'<'", "K_agent", "Kh_agent", "identifier", "'true'", "'false'"}

    def unary(self) -> Formula:
        t = self.tok
        if t.kind == "k":
            self.advance()
            return K(t.value, self.unary())
        if t.kind == "kh":
            self.advance()
            return KHat(t.value, self.unary())
        if self.is_op("~"):
            self.advance()
            return Not(self.unary())
        if self.is_op("["):
            self.advance()
            e = self.regex()
            self.expect_op("]")
            return Box(e, self.unary())
        if self.is_op("<"):
            self.advance()
            e = self.regex()
            self.expect_op(">")
            return Dia(e, self.unary())
        if self.is_op("("):
            self.advance()
            f = self.imp()
            self.expect_op(")")
            return f
        if t.kind == "ident":
            self.advance()
            if t.text == "true":
                return TOP
            if t.text == "false":
                return BOT
            return Prop(t.text)
        self.fail(self._FORMULA_START)

    # regexes
    _REGEX_START = {"identifier", "'eps'", "'empty'", "'('"}

    def regex(self) -> ObsExpr:
        e = self.rconcat()
        while self.is_op("+"):
            self.advance()
            e = ox.Union(e, self.rconcat())
        return e

    def _starts_atom(self) -> bool:
        return self.tok.kind == "ident" or self.is_op("(")

    def rconcat(self) -> ObsExpr:
        e = self.rpostfix()
        while self.is_op(".") or self._starts_atom():
            if self.is_op("."):
                self.advance()
            e = ox.Concat(e, self.rpostfix())
        return e

    def rpostfix(self) -> ObsExpr:
        e = self.ratom()
        while True:
            if self.is_op("*"):
                self.advance()
                e = ox.Star(e)
            elif self.is_op("^"):
                self.advance()
                if self.is_op("+"):
                    self.advance()
                    e = ox.Concat(e, ox.Star(e))
                elif self.tok.kind == "num":
                    e = _power(e, int(self.advance().text))
                else:
                    self.fail({"'+'", "exponent"})
            else:
                return e

    def ratom(self) -> ObsExpr:
        t = self.tok
        if t.kind == "ident":
            self.advance()
            if t.text == "eps":
                return ox.EPS
            if t.text == "empty":
                return ox.EMPTY
            if t.text in ox.RESERVED:
                raise ParseError(f"reserved word {t.text!r} cannot be an action", t.pos)
            return ox.Letter(t.text)
        if self.is_op("("):
            self.advance()
            e = self.regex()
            self.expect_op(")")
            return e
        self.fail(self._REGEX_START)


def _power(e: ObsExpr, k: int) -> ObsExpr:
    if k == 0:
        return ox.EPS
    result = e
    for _ in range(k - 1):
        result = ox.Concat(result, e)
    return result


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.imp()
    p.expect_eof({"'&'", "'|'", "'->'", "end of input"})
    return f


def parse_obs(text: str) -> ObsExpr:
    p = _Parser(text)
    e = p.regex()
    p.expect_eof({"'+'", "'.'", "'*'", "'^'", "end of input"})
    return e


# -- printing -----------------------------------------------------------------

_PREC = {Imp: 0, Or: 1, And: 2}


def _fprec(f):
    return _PREC.get(type(f), 3)


def to_text(f: Formula) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Not):
        return "~" + _operand(f.sub)
    if isinstance(f, K):
        return f"K_{f.agent} " + _operand(f.sub)
    if isinstance(f, KHat):
        return f"Kh_{f.agent} " + _operand(f.sub)
    if isinstance(f, Box):
        return f"[{ox.to_text(f.expr)}] " + _operand(f.sub)
    if isinstance(f, Dia):
        return f"<{ox.to_text(f.expr)}> " + _operand(f.sub)
    op = {And: " & ", Or: " | ", Imp: " -> "}[type(f)]
    p = _fprec(f)
    left, right = to_text(f.left), to_text(f.right)
    if isinstance(f, Imp):
        # right-associative
        if _fprec(f.left) <= p:
            left = f"({left})"
        if _fprec(f.right) < p:
            right = f"({right})"
    else:
        if _fprec(f.left) < p:
            left = f"({left})"
        if _fprec(f.right) <= p:
            right = f"({right})"
    return left + op + right


def _operand(f: Formula) -> str:
    s = to_text(f)
    return f"({s})" if isinstance(f, BINARY) else s


# -- negation normal form -----------------------------------------------------

def to_nnf(f: Formula) -> Formula:
    if isinstance(f, (Top, Bot, Prop)):
        return f
    if isinstance(f, And):
        return And(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Or):
        return Or(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Imp):
        return Or(_neg(f.left), to_nnf(f.right))
    if isinstance(f, (K, KHat)):
        return type(f)(f.agent, to_nnf(f.sub))
    if isinstance(f, (Box, Dia)):
        return type(f)(f.expr, to_nnf(f.sub))
    return _neg(f.sub)


def _neg(f: Formula) -> Formula:
    """NNF of the negation of ``f``."""
    if isinstance(f, Top):
        return BOT
    if isinstance(f, Bot):
        return TOP
    if isinstance(f, Prop):
        return Not(f)
    if isinstance(f, Not):
        return to_nnf(f.sub)
    if isinstance(f, And):
        return Or(_neg(f.left), _neg(f.right))
    if isinstance(f, Or):
        return And(_neg(f.left), _neg(f.right))
    if isinstance(f, Imp):
        return And(to_nnf(f.left), _neg(f.right))
    if isinstance(f, K):
        return KHat(f.agent, _neg(f.sub))
    if isinstance(f, KHat):
        return K(f.agent, _neg(f.sub))
    if isinstance(f, Box):
        return Dia(f.expr, _neg(f.sub))
    return Box(f.expr, _neg(f.sub))


def is_nnf(f: Formula) -> bool:
    for g in subformulas(f):
        if isinstance(g, Imp) or (isinstance(g, Not) and not isinstance(g.sub, Prop)):
            return False
    return True


# -- fragments ----------------------------------------------------------------

@dataclass(frozen=True)
class Fragment:
    word: bool
    star_free: bool
    existential: bool
    star_free_existential: bool
    full: bool = True
    existential_after_nnf: bool = False

    def names(self) -> list:
        out = [n for n in ("word", "star_free", "existential", "star_free_existential") if getattr(self, n)]
        return out or ["full"]


def _is_existential(f: Formula) -> bool:
    # NNF and no universal observation modality
    return is_nnf(f) and not any(isinstance(g, Box) for g in subformulas(f))


def classify(f: Formula) -> Fragment:
    exprs = modalities(f)
    word = all(ox.is_word(e) for e in exprs)
    star_free = all(ox.is_star_free(e) for e in exprs)
    existential = _is_existential(f)
    return Fragment(
        word=word,
        star_free=star_free,
        existential=existential,
        star_free_existential=existential and star_free,
        existential_after_nnf=_is_existential(to_nnf(f)),
    )

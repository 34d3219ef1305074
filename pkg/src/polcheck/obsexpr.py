"""Observation expressions: regular expressions over a finite action alphabet.

Nodes are immutable and hashable. The constructors ``concat``, ``union`` and
``star`` apply a few language-preserving rewrites (identity and absorbing
elements, idempotent union, nested stars) so that repeated residues stay
small. Residues are only ever compared by language, never syntactically.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union as _U

from .errors import UnknownSymbol

SYMBOL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*'*\Z")
RESERVED = frozenset({"eps", "empty", "true", "false"})

Word = tuple


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple

    def __init__(self, symbols: Iterable[str]):
        symbols = tuple(symbols)
        if not symbols:
            raise ValueError("alphabet must be nonempty")
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"duplicate symbols in alphabet {symbols}")
        for a in symbols:
            if not isinstance(a, str) or not SYMBOL_RE.match(a) or a in RESERVED:
                raise ValueError(f"invalid action symbol {a!r}")
        object.__setattr__(self, "symbols", symbols)

    def __contains__(self, a):
        return a in self.symbols

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def index(self, a):
        return self.symbols.index(a)

    def check(self, word: Sequence[str]) -> tuple:
        word = tuple(word)
        for a in word:
            if a not in self.symbols:
                raise UnknownSymbol(a, self.symbols)
        return word


class ObsExpr:
    """Base class of the expression nodes."""

    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Empty(ObsExpr):
    pass


@dataclass(frozen=True)
class Eps(ObsExpr):
    pass


@dataclass(frozen=True)
class Letter(ObsExpr):
    symbol: str


@dataclass(frozen=True)
class Concat(ObsExpr):
    left: ObsExpr
    right: ObsExpr


@dataclass(frozen=True)
class Union(ObsExpr):
    left: ObsExpr
    right: ObsExpr


@dataclass(frozen=True)
class Star(ObsExpr):
    inner: ObsExpr


EMPTY = Empty()
EPS = Eps()


# -- simplifying constructors -------------------------------------------------

def concat(left: ObsExpr, right: ObsExpr) -> ObsExpr:
    if isinstance(left, Empty) or isinstance(right, Empty):
        return EMPTY
    if isinstance(left, Eps):
        return right
    if isinstance(right, Eps):
        return left
    return Concat(left, right)


def _union_operands(e, out):
    if isinstance(e, Union):
        _union_operands(e.left, out)
        _union_operands(e.right, out)
    elif not isinstance(e, Empty):
        out.add(e)


def union(left: ObsExpr, right: ObsExpr) -> ObsExpr:
    if isinstance(left, Empty):
        return right
    if isinstance(right, Empty):
        return left
    if left == right:
        return left
    ops: set = set()
    _union_operands(left, ops)
    _union_operands(right, ops)
    # a nullable operand makes an explicit eps redundant
    if EPS in ops and any(o != EPS and nullable(o) for o in ops):
        ops.discard(EPS)
    ordered = sorted(ops, key=to_text)
    result = ordered[-1]
    for o in reversed(ordered[:-1]):
        result = Union(o, result)
    return result


def star(inner: ObsExpr) -> ObsExpr:
    if isinstance(inner, (Empty, Eps)):
        return EPS
    if isinstance(inner, Star):
        return inner
    return Star(inner)


def word_expr(word: Sequence[str]) -> ObsExpr:
    """The expression whose language is exactly ``{word}``."""
    result: ObsExpr = EPS
    for a in word:
        result = concat(result, Letter(a))
    return result


def union_of(exprs: Iterable[ObsExpr]) -> ObsExpr:
    result: ObsExpr = EMPTY
    for e in exprs:
        result = union(result, e)
    return result


# -- measures and predicates --------------------------------------------------

@lru_cache(maxsize=None)
def size(e: ObsExpr) -> int:
    if isinstance(e, (Eps, Empty)):
        return 0
    if isinstance(e, Letter):
        return 1
    if isinstance(e, (Concat, Union)):
        return size(e.left) + size(e.right) + 1
    return size(e.inner) + 1


@lru_cache(maxsize=None)
def nullable(e: ObsExpr) -> bool:
    if isinstance(e, (Eps, Star)):
        return True
    if isinstance(e, (Letter, Empty)):
        return False
    if isinstance(e, Union):
        return nullable(e.left) or nullable(e.right)
    return nullable(e.left) and nullable(e.right)


@lru_cache(maxsize=None)
def is_empty_lang(e: ObsExpr) -> bool:
    if isinstance(e, Empty):
        return True
    if isinstance(e, (Eps, Letter, Star)):
        return False
    if isinstance(e, Union):
        return is_empty_lang(e.left) and is_empty_lang(e.right)
    return is_empty_lang(e.left) or is_empty_lang(e.right)


def is_star_free(e: ObsExpr) -> bool:
    if isinstance(e, Star):
        return False
    if isinstance(e, (Concat, Union)):
        return is_star_free(e.left) and is_star_free(e.right)
    return True


def is_word(e: ObsExpr) -> bool:
    if isinstance(e, (Letter, Eps)):
        return True
    if isinstance(e, Concat):
        return is_word(e.left) and is_word(e.right)
    return False


def word_of(e: ObsExpr) -> tuple:
    """The single word denoted by a word-shaped expression."""
    if isinstance(e, Eps):
        return ()
    if isinstance(e, Letter):
        return (e.symbol,)
    if isinstance(e, Concat):
        return word_of(e.left) + word_of(e.right)
    raise ValueError(f"{to_text(e)} is not a word")


def max_word_length(e: ObsExpr) -> _U[int, float]:
    """Length of the longest word in L(e): -1 if L(e) is empty, ``math.inf`` if unbounded."""
    if isinstance(e, Empty):
        return -1
    if isinstance(e, Eps):
        return 0
    if isinstance(e, Letter):
        return 1
    if isinstance(e, Union):
        return max(max_word_length(e.left), max_word_length(e.right))
    if isinstance(e, Concat):
        l, r = max_word_length(e.left), max_word_length(e.right)
        return -1 if l < 0 or r < 0 else l + r
    return 0 if max_word_length(e.inner) <= 0 else math.inf


def symbols_of(e: ObsExpr) -> set:
    if isinstance(e, Letter):
        return {e.symbol}
    if isinstance(e, (Concat, Union)):
        return symbols_of(e.left) | symbols_of(e.right)
    if isinstance(e, Star):
        return symbols_of(e.inner)
    return set()


# -- residues -----------------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def _residue(e: ObsExpr, a: str) -> ObsExpr:
    if isinstance(e, (Eps, Empty)):
        return EMPTY
    if isinstance(e, Letter):
        return EPS if e.symbol == a else EMPTY
    if isinstance(e, Union):
        return union(_residue(e.left, a), _residue(e.right, a))
    if isinstance(e, Concat):
        head = concat(_residue(e.left, a), e.right)
        if nullable(e.left):
            return union(head, _residue(e.right, a))
        return head
    return concat(_residue(e.inner, a), e)


def residue_letter(e: ObsExpr, a: str, alphabet: Alphabet | None = None) -> ObsExpr:
    """Expression for ``{v | a v in L(e)}``."""
    if alphabet is not None and a not in alphabet:
        raise UnknownSymbol(a, alphabet.symbols)
    return _residue(e, a)


def residue_word(e: ObsExpr, word: Sequence[str], alphabet: Alphabet | None = None) -> ObsExpr:
    if alphabet is not None:
        alphabet.check(word)
    for a in word:
        e = _residue(e, a)
    return e


# -- printing -----------------------------------------------------------------

_PREC = {Union: 0, Concat: 1}


def _prec(e):
    return _PREC.get(type(e), 2)


@lru_cache(maxsize=1 << 16)
def to_text(e: ObsExpr) -> str:
    """Render in the textual grammar accepted by ``polcheck.logic.parse_obs``."""
    if isinstance(e, Empty):
        return "empty"
    if isinstance(e, Eps):
        return "eps"
    if isinstance(e, Letter):
        return e.symbol
    if isinstance(e, Star):
        inner = to_text(e.inner)
        return f"({inner})*" if _prec(e.inner) < 2 or isinstance(e.inner, Star) else f"{inner}*"
    op = " + " if isinstance(e, Union) else "."
    p = _prec(e)
    left = to_text(e.left)
    right = to_text(e.right)
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left}{op}{right}"

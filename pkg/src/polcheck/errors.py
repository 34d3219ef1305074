"""Exception types shared across the checker."""


class PolError(Exception):
    """Base class for every error raised by polcheck."""


class UnknownSymbol(PolError):
    def __init__(self, symbol, alphabet=None):
        self.symbol = symbol
        msg = f"unknown action symbol {symbol!r}"
        if alphabet is not None:
            msg += f" (alphabet: {', '.join(alphabet)})"
        super().__init__(msg)


class UnknownWorld(PolError):
    def __init__(self, world):
        self.world = world
        super().__init__(f"unknown world {world!r}")


class UnknownAgent(PolError):
    def __init__(self, agent):
        self.agent = agent
        super().__init__(f"unknown agent {agent!r}")


class UnknownProp(PolError):
    def __init__(self, prop):
        self.prop = prop
        super().__init__(f"unknown proposition {prop!r}")


class FragmentMismatch(PolError):
    """The formula lies outside the fragment an engine or encoder accepts."""

    def __init__(self, message, node=None):
        self.node = node
        if node is not None:
            message = f"{message}: offending node {node}"
        super().__init__(message)


class KTooLarge(PolError):
    def __init__(self, k, maxlen):
        self.k = k
        self.maxlen = maxlen
        super().__init__(f"word length {k} exceeds the longest word ({maxlen}) of the modality")


class ParseError(PolError):
    """Syntax error with the offending offset and what would have been accepted there."""

    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = frozenset(expected)
        text = f"{message} at position {position}"
        if self.expected:
            text += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(text)


class ModelError(PolError):
    """A model document could not be turned into a model at all."""


class Inconclusive(PolError):
    """Bounded enumeration could not settle a starred modality."""

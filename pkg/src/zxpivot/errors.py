"""Exception types shared across the engine."""


class ZXError(Exception):
    """Base class for all engine errors."""


class MalformedDiagramError(ZXError):
    """A diagram violates its structural invariants."""


class ArityMismatchError(ZXError):
    """Composition or comparison of maps with incompatible arities."""


class StaleSiteError(ZXError):
    """A match site refers to a diagram that has since been rewritten."""


class RuleNotInTheoryError(ZXError):
    """The requested rule is not available at the active theory level."""


class PatternError(ZXError):
    """A rewrite was requested at a site that does not match its pattern."""


class ZeroStateError(ZXError):
    """A normal-form computation encountered a semantically zero state."""


class CheckFailedError(ZXError):
    """A checked-mode semantic verification failed (engine bug or unsound step)."""

"""Exception hierarchy shared by every mcrank module."""

from __future__ import annotations


class MCRankError(Exception):
    """Base class for all errors raised by this package."""


# condition parsing
class UnrecognizedTemplate(MCRankError):
    pass


class MalformedSlot(MCRankError):
    pass


# rank engine
class MissingAttribute(MCRankError):
    pass


class UnknownItem(MCRankError):
    pass


class TypeMismatch(MCRankError):
    pass


class MissingReference(MCRankError):
    pass


class TooManyItems(MCRankError):
    pass


# benchmark generation
class PoolExhausted(MCRankError):
    pass


class UnsatisfiableSlot(MCRankError):
    pass


# backends and output parsing
class LevelMismatch(MCRankError):
    pass


class NotAPermutation(MCRankError):
    pass


class EmptyOutput(MCRankError):
    pass


class BackendError(MCRankError):
    """A model call failed; the run that issued it is marked invalid."""


class AuthError(BackendError):
    pass


class RateLimited(BackendError):
    pass


class TransportError(BackendError):
    pass


class PromptUnparseable(BackendError):
    pass


# scoring
class GoldMismatch(MCRankError):
    pass

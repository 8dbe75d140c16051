"""Exception hierarchy.

Every error raised on bad user input derives from ``WalklabError`` (itself a
``ValueError``) so the CLI can map it to a stable exit code.
"""


class WalklabError(ValueError):
    """Base class for all input and hypothesis errors."""


class GroupError(WalklabError):
    """Invalid group data: not a group table, bad coordinates, size cap."""


class ConnectionSetError(WalklabError):
    """Connection set contains the identity or is not inverse-closed."""


class PartitionError(WalklabError):
    """A connection-set piece is empty, overlaps, or is not a subgroup minus id."""


class HypothesisError(WalklabError):
    """A precondition of a scheduler or checker does not hold."""


class ConfigError(WalklabError):
    """Malformed experiment configuration; the message starts with its location."""

"""Exception types shared across the package."""


class DexArbError(Exception):
    """Base class for all package errors."""


class ParseError(DexArbError):
    """An input file could not be parsed."""


class SnapshotParseError(ParseError):
    """A snapshot record could not be parsed or violates a field invariant."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class DuplicatePoolError(DexArbError):
    """The same pool_id appeared twice for one date."""


class RejectedPoolError(DexArbError):
    """Pools unusable for graph construction (e.g. a zero reserve)."""

    def __init__(self, pool_ids: list[str], message: str):
        super().__init__(f"{message}: {', '.join(pool_ids)}")
        self.pool_ids = pool_ids


class UnknownTokenError(DexArbError):
    """A token id or address is not part of the graph."""


class MissingPriceError(DexArbError):
    """No USD price available for a token on the requested date."""


class ConfigurationError(DexArbError):
    """An operation was invoked with an invalid or incomplete setup."""


class CorruptPathError(DexArbError):
    """A stored path disagrees with the graph it claims to traverse."""

"""Exception hierarchy shared across the package."""


class TicketGraphError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TicketGraphError):
    """Input data violates a structural contract (bad ticket, bad template)."""


class NotFoundError(TicketGraphError):
    """A referenced ticket or section does not exist."""


class ConfigurationError(TicketGraphError):
    """Mismatched or malformed configuration (dimensions, fingerprints, files)."""


class UnparseableQueryError(TicketGraphError):
    """No entity and no intent could be extracted from a query."""


class PlanError(TicketGraphError):
    """A graph query plan could not be produced or executed."""


class AdapterError(TicketGraphError):
    """A text-generation adapter call failed (timeout, transport, bad output)."""


class SnapshotError(TicketGraphError):
    """A persisted snapshot is missing, incomplete, or corrupt."""

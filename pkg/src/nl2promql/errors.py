"""Exception types shared across the package."""

from __future__ import annotations


class CatalogError(Exception):
    """Raised when catalog content violates the catalog schema or its invariants."""


class ConfigError(Exception):
    """Raised when a shipped or user-supplied config file is malformed."""


class NoMetricFoundError(Exception):
    """Raised when selection has an empty candidate set for a question."""


class RepairError(Exception):
    """Raised when a query cannot be repaired into well-formed PromQL.

    The offending input is preserved on ``original`` so callers can log or
    surface it unchanged.
    """

    def __init__(self, message: str, original: str):
        super().__init__(message)
        self.original = original


class ClientError(Exception):
    """Base class for Prometheus client failures."""


class TransportError(ClientError):
    """Network-level failure: connect, timeout, DNS."""


class ApiError(ClientError):
    """The Prometheus API answered with a non-success payload or status."""


class QueryError(ApiError):
    """The API rejected the query itself; carries Prometheus's message verbatim."""


class FixtureError(ClientError):
    """No recorded fixture matches the request shape."""

"""Exception types shared across the package."""

from __future__ import annotations


class ConfigurationError(ValueError):
    """A configuration value is outside its legal domain."""


class StructurallyInfeasibleError(RuntimeError):
    """Power constraints conflict even at a zero rate target.

    Raised when the sensitivity floor or the decode-order chain of a channel
    cannot be met inside the transmit-power box, so no rate target is
    achievable at all. Carries enough context to point at the offending
    channel and nodes.
    """

    def __init__(self, message: str, channel: int | None = None,
                 nodes: tuple[int, ...] = ()):
        super().__init__(message)
        self.channel = channel
        self.nodes = tuple(nodes)

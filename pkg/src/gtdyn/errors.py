"""Exception hierarchy shared by all gtdyn modules.

Every error carries the name of the module that raised it plus optional
time/slot context, so the CLI can surface where a failure originated.
"""
from __future__ import annotations


class GTDynError(Exception):
    """Base class; ``module``, ``time`` and ``slot`` are optional context."""

    module = "gtdyn"

    def __init__(self, message, *, module=None, time=None, slot=None):
        super().__init__(message)
        self.message = message
        if module is not None:
            self.module = module
        self.time = time
        self.slot = slot

    def __str__(self):
        parts = [f"[{self.module}] {self.message}"]
        if self.time is not None:
            parts.append(f"time={self.time!r}")
        if self.slot is not None:
            parts.append(f"slot={tuple(self.slot)}")
        return " ".join(parts)


class StructuralError(GTDynError):
    """Malformed container: missing entries, mismatched grids or horizons."""


class DomainError(GTDynError, ValueError):
    """A parameter lies outside the domain of the operation."""


class RegularityError(GTDynError):
    """A driving path violates the unit-increment regularity condition."""


class FormatError(GTDynError):
    """A text source does not follow its file format."""


class ContractError(GTDynError):
    """An input state breaks a precondition (e.g. a non-interlacing state)."""


class ConfigError(GTDynError):
    """Invalid run configuration; ``key_path`` names the offending key."""

    module = "cli_io"

    def __init__(self, message, *, key_path=None, **kw):
        super().__init__(message, **kw)
        self.key_path = key_path

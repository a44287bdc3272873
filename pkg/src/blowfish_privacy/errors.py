"""Shared exception types."""


class BlowfishError(Exception):
    """Base class for all library errors."""


class InputError(BlowfishError, ValueError):
    """Invalid parameters, labels, shapes, or semantic constraint violations."""


class SchemaError(InputError):
    """A document or file does not match its expected structure."""


class CapExceededError(BlowfishError):
    """A configured resource cap (databases, group elements, vertices) would be exceeded."""


class UnsupportedLiftError(InputError):
    """Automorphism lifting requires an unconstrained permissible-database set."""

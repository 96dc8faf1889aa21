"""Exception types shared across the package."""

from __future__ import annotations


class AdfdError(Exception):
    """Base class for all errors raised by this package.

    Every error carries a machine-readable ``code`` so callers (and the CLI)
    can branch on the failure kind without parsing messages.
    """

    code = "ERROR"

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class SpecificationError(AdfdError):
    """A content-specification document is malformed or inconsistent."""


class DiagramError(AdfdError):
    """A model document is structurally broken (ids, endpoints, nesting)."""


class LookupFault(AdfdError):
    """An accessor was asked about an unknown component or type."""


class DocumentError(AdfdError):
    """A file could not be read or does not match its JSON schema."""


class CatalogError(AdfdError):
    """A rule catalog is malformed (duplicate ids, out-of-range scores)."""


class ModelNotConforming(AdfdError):
    """Analysis refused because the diagram violates the specification."""

    def __init__(self, violations):
        super().__init__(
            "MODEL_NOT_CONFORMING",
            f"{len(violations)} conformance violation(s)",
        )
        self.violations = list(violations)

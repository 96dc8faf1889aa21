"""Diagram-against-specification conformance checking.

Every failed condition becomes a :class:`Violation`; nothing is raised.  An
empty error list means the diagram may be analysed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import (
    ASSET,
    BOUNDARY,
    CONNECTOR,
    ELEMENT,
    ContentSpecification,
    Diagram,
)

ERROR = "error"
WARNING = "warning"

# code -> the conformance condition it reports on
CONDITIONS = {
    "EMPTY_DIAGRAM": "|N| > 0",
    "CONNECTOR_NEEDS_TWO_ELEMENTS": "|R| > 0 -> |N| >= 2",
    "ASSET_NEEDS_HOLDER_UNIVERSE": "|Y| > 0 -> (|N| >= 1 or |Y| >= 1)",
    "UNKNOWN_TYPE": "type(c) in the category's type set",
    "KEY_NOT_ALLOWED": "mu(c, k) defined -> k in eta(type(c))",
    "VALUE_NOT_IN_DOMAIN": "mu(c, k) defined -> mu(c, k) in gamma(k)",
    "UNHELD_ASSET": "asset is held by some element or connector (advisory)",
}


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str
    condition: str = ""
    severity: str = ERROR
    key: str = ""
    offset: Optional[int] = None

    def sort_key(self):
        return (self.subject, self.key, self.code, self.message)

    def to_json(self) -> dict:
        data = {"code": self.code, "subject": self.subject, "message": self.message}
        if self.condition:
            data["condition"] = self.condition
        if self.offset is not None:
            data["offset"] = self.offset
        return data

    def __str__(self) -> str:
        tag = "warning" if self.severity == WARNING else "error"
        return f"{tag} {self.code} [{self.subject}]: {self.message}"


def _violation(code: str, subject: str, message: str, key: str = "", severity: str = ERROR) -> Violation:
    return Violation(code, subject, message, CONDITIONS[code], severity, key)


def validate_cardinality(diagram: Diagram) -> list:
    found = []
    n_elements = len(diagram.elements)
    if n_elements == 0:
        found.append(_violation("EMPTY_DIAGRAM", "<diagram>", "the diagram contains no element"))
    if diagram.connectors and n_elements < 2:
        found.append(
            _violation(
                "CONNECTOR_NEEDS_TWO_ELEMENTS",
                "<diagram>",
                f"{len(diagram.connectors)} connector(s) but only {n_elements} element(s)",
            )
        )
    # taken literally this condition can never fail once an asset exists
    if diagram.assets and not (n_elements >= 1 or len(diagram.assets) >= 1):
        found.append(_violation("ASSET_NEEDS_HOLDER_UNIVERSE", "<diagram>", "asset without holders"))
    return sorted(found, key=Violation.sort_key)


def _check_component(diagram: Diagram, spec: ContentSpecification, category: str, cid: str, out: list):
    type_name = diagram.type_of[category][cid]
    known = type_name in spec.types[category]
    if not known:
        out.append(
            _violation("UNKNOWN_TYPE", cid, f"{category} type {type_name!r} is not in the specification")
        )
    props = diagram.properties.get(cid, {})
    if category == BOUNDARY:
        allowed = frozenset()
    else:
        allowed = spec.key_assignment[category].get(type_name, frozenset())
    for key in sorted(props):
        value = props[key]
        # key admissibility is undecidable for an unknown type; reported once as UNKNOWN_TYPE
        if (known or category == BOUNDARY) and key not in allowed:
            out.append(
                _violation(
                    "KEY_NOT_ALLOWED",
                    cid,
                    f"key {key!r} is not allowed for {category} type {type_name!r}",
                    key=key,
                )
            )
        domain = spec.value_domain.get(key)
        if domain is None or value not in domain:
            out.append(
                _violation(
                    "VALUE_NOT_IN_DOMAIN",
                    cid,
                    f"value {value!r} is not an allowed value of key {key!r}",
                    key=key,
                )
            )


def validate_diagram(diagram: Diagram, spec: ContentSpecification, warnings: bool = False) -> list:
    """All conformance violations of ``diagram`` against ``spec``.

    The result is empty exactly when the diagram conforms.  With
    ``warnings=True`` advisory findings (``UNHELD_ASSET``) are appended
    after the errors; they never affect conformance.
    """
    found = list(validate_cardinality(diagram))
    for category in (ELEMENT, ASSET, BOUNDARY, CONNECTOR):
        for cid in diagram.ids(category):
            _check_component(diagram, spec, category, cid, found)
    found.sort(key=Violation.sort_key)
    if warnings:
        held = {asset for _, asset in diagram.asset_links}
        for y in sorted(diagram.assets):
            if y not in held:
                found.append(
                    _violation("UNHELD_ASSET", y, "asset is not held by any element or connector",
                               severity=WARNING)
                )
    return found


def conforms(diagram: Diagram, spec: ContentSpecification) -> bool:
    return not validate_diagram(diagram, spec)

"""Immutable content-specification and diagram representations.

A :class:`ContentSpecification` is the stencil universe: the admissible type
names per component category, their two-level hierarchy, the property keys
each type may carry and the values each key may take.  A :class:`Diagram` is
one concrete system model built from those stencils.

Both are constructed from plain JSON-shaped documents (see ``schemas/``) and
never change afterwards, so they can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

from .errors import DiagramError, LookupFault, SpecificationError
from .schemas import validate_document

ELEMENT = "element"
ASSET = "asset"
BOUNDARY = "boundary"
CONNECTOR = "connector"
FLOW = "flow"

CATEGORIES = (ELEMENT, ASSET, BOUNDARY, CONNECTOR)
# categories that may carry properties
PROPERTY_CATEGORIES = (ELEMENT, ASSET, CONNECTOR)
KIND_ORDER = {ELEMENT: 0, ASSET: 1, BOUNDARY: 2, CONNECTOR: 3, FLOW: 4}

_SECTION = {
    ELEMENT: "element_types",
    ASSET: "asset_types",
    BOUNDARY: "boundary_types",
    CONNECTOR: "connector_types",
}


class _Undefined:
    """Result of a partial-function lookup that has no value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNDEFINED"

    def __bool__(self) -> bool:
        return False


UNDEFINED = _Undefined()


def _freeze(mapping: Mapping) -> Mapping:
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True)
class ContentSpecification:
    types: Mapping[str, frozenset]
    property_keys: frozenset
    property_values: frozenset
    # category -> top-type -> sub-types; sub-types are absent (undefined)
    hierarchy: Mapping[str, Mapping[str, frozenset]]
    # category -> sub-type -> top-type
    parent_type: Mapping[str, Mapping[str, str]]
    # category -> type -> keys, sub-types already inherit their top-type keys
    key_assignment: Mapping[str, Mapping[str, frozenset]]
    value_domain: Mapping[str, frozenset]

    @property
    def element_types(self) -> frozenset:
        return self.types[ELEMENT]

    @property
    def asset_types(self) -> frozenset:
        return self.types[ASSET]

    @property
    def boundary_types(self) -> frozenset:
        return self.types[BOUNDARY]

    @property
    def connector_types(self) -> frozenset:
        return self.types[CONNECTOR]

    def has_type(self, category: str, name: str) -> bool:
        return name in self.types[category]


@dataclass(frozen=True, order=True)
class ComponentRef:
    """Uniform handle for anything that can appear in a match set.

    ``key`` is the component id, or the full id sequence for a flow.
    """

    rank: int = field(init=False, repr=False)
    kind: str
    key: Union[str, tuple]

    def __post_init__(self):
        object.__setattr__(self, "rank", KIND_ORDER[self.kind])

    @classmethod
    def flow(cls, sequence: Iterable[str]) -> "ComponentRef":
        return cls(FLOW, tuple(sequence))

    def to_json(self) -> dict:
        if self.kind == FLOW:
            return {"kind": FLOW, "sequence": list(self.key)}
        return {"kind": self.kind, "id": self.key}

    @classmethod
    def from_json(cls, data: Mapping) -> "ComponentRef":
        if data["kind"] == FLOW:
            return cls.flow(data["sequence"])
        return cls(data["kind"], data["id"])

    def __str__(self) -> str:
        if self.kind == FLOW:
            return "(" + ",".join(self.key) + ")"
        return self.key


@dataclass(frozen=True, eq=False)
class Diagram:
    spec: Optional[ContentSpecification]
    elements: tuple
    assets: tuple
    boundaries: tuple
    connectors: tuple
    source: Mapping[str, str]
    target: Mapping[str, str]
    type_of: Mapping[str, Mapping[str, str]]
    properties: Mapping[str, Mapping[str, str]]
    element_parent: Mapping[str, str]
    boundary_parent: Mapping[str, str]
    asset_links: frozenset
    # transitive closures as (container, inner) pairs
    delta: frozenset
    kappa: frozenset
    kind_of: Mapping[str, str]
    # derived indexes
    outgoing: Mapping[str, tuple] = field(repr=False)
    incoming: Mapping[str, tuple] = field(repr=False)
    holders: Mapping[str, frozenset] = field(repr=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Diagram):
            return NotImplemented
        return structural_key(self) == structural_key(other)

    def __hash__(self):
        return hash(structural_key(self))

    def ids(self, category: str) -> tuple:
        return {
            ELEMENT: self.elements,
            ASSET: self.assets,
            BOUNDARY: self.boundaries,
            CONNECTOR: self.connectors,
        }[category]


def structural_key(diagram: Diagram) -> tuple:
    return (
        frozenset(diagram.elements),
        frozenset(diagram.assets),
        frozenset(diagram.boundaries),
        frozenset(diagram.connectors),
        frozenset(diagram.source.items()),
        frozenset(diagram.target.items()),
        frozenset((c, frozenset(m.items())) for c, m in diagram.type_of.items()),
        frozenset((i, frozenset(m.items())) for i, m in diagram.properties.items() if m),
        frozenset(diagram.element_parent.items()),
        frozenset(diagram.boundary_parent.items()),
        diagram.asset_links,
    )


# ---------------------------------------------------------------------------
# specification


def load_specification(document: Mapping) -> ContentSpecification:
    """Build a :class:`ContentSpecification` from a parsed spec document.

    All consistency problems are collected; if there are any a single
    :class:`SpecificationError` is raised whose ``problems`` attribute lists
    every ``(code, message)`` pair found.
    """
    validate_document(document, "specification")
    problems: list = []

    gamma = {k: frozenset(v) for k, v in document["properties"].items()}
    keys = frozenset(gamma)
    if "values" in document:
        values = frozenset(document["values"])
        for key in sorted(gamma):
            for v in sorted(gamma[key] - values):
                problems.append(
                    ("UNKNOWN_VALUE_IN_GAMMA", f"value {v!r} of key {key!r} is not a declared value")
                )
    else:
        values = frozenset().union(*gamma.values()) if gamma else frozenset()

    types: dict = {}
    hierarchy: dict = {}
    parent_type: dict = {}
    declared_keys: dict = {}
    for category in CATEGORIES:
        entries = document[_SECTION[category]]
        names: set = set()
        parents: dict = {}
        own: dict = {}
        for entry in entries:
            name = entry["name"]
            if name in names:
                problems.append(("DUPLICATE_TYPE", f"{category} type {name!r} declared twice"))
                continue
            names.add(name)
            if "parent" in entry:
                parents[name] = entry["parent"]
            entry_keys = entry.get("keys", [])
            if category == BOUNDARY and entry_keys:
                problems.append(
                    ("KEYS_ON_BOUNDARY_TYPE", f"boundary type {name!r} cannot carry property keys")
                )
                entry_keys = []
            for k in entry_keys:
                if k not in keys:
                    problems.append(
                        ("UNKNOWN_KEY_IN_ETA", f"{category} type {name!r} uses undeclared key {k!r}")
                    )
            own[name] = frozenset(k for k in entry_keys if k in keys)

        tops: dict = {}
        for sub, top in sorted(parents.items()):
            if top not in names:
                problems.append(
                    ("UNKNOWN_PARENT", f"{category} type {sub!r} has undeclared parent {top!r}")
                )
            elif top in parents:
                problems.append(
                    (
                        "SUBTYPE_WITH_CHILDREN",
                        f"{category} type {top!r} is a sub-type of {parents[top]!r} "
                        f"and cannot have sub-type {sub!r}",
                    )
                )
            elif top == sub:
                problems.append(("SUBTYPE_WITH_CHILDREN", f"{category} type {sub!r} is its own parent"))
        for name in names:
            if name not in parents:
                tops[name] = set()
        for sub, top in parents.items():
            if top in tops and top != sub:
                tops[top].add(sub)

        types[category] = frozenset(names)
        hierarchy[category] = _freeze({t: frozenset(s) for t, s in tops.items()})
        parent_type[category] = _freeze({s: t for s, t in parents.items() if t in tops})
        if category != BOUNDARY:
            effective = {}
            for name in names:
                inherited = own.get(parents.get(name), frozenset()) if name in parents else frozenset()
                effective[name] = own[name] | inherited
            declared_keys[category] = _freeze(effective)
        else:
            declared_keys[category] = _freeze({name: frozenset() for name in names})

    if problems:
        err = SpecificationError(problems[0][0], "; ".join(m for _, m in problems))
        err.problems = problems
        raise err

    return ContentSpecification(
        types=_freeze(types),
        property_keys=keys,
        property_values=values,
        hierarchy=_freeze(hierarchy),
        parent_type=_freeze(parent_type),
        key_assignment=_freeze(declared_keys),
        value_domain=_freeze(gamma),
    )


def _require_type(spec: ContentSpecification, category: str, type_name: str) -> None:
    if category not in _SECTION:
        raise LookupFault("UNKNOWN_CATEGORY", repr(category))
    if type_name not in spec.types[category]:
        raise LookupFault("UNKNOWN_TYPE", f"{type_name!r} is not a declared {category} type")


def effective_subtypes(spec: ContentSpecification, category: str, type_name: str) -> frozenset:
    """Sub-types of ``type_name``; empty for sub-types and childless top-types."""
    _require_type(spec, category, type_name)
    return spec.hierarchy[category].get(type_name, frozenset())


def effective_keys(spec: ContentSpecification, category: str, type_name: str) -> frozenset:
    """Property keys a component of ``type_name`` may carry, including inherited ones."""
    if category not in PROPERTY_CATEGORIES:
        _require_type(spec, category, type_name)
        return frozenset()
    _require_type(spec, category, type_name)
    return spec.key_assignment[category][type_name]


def specification_to_document(spec: ContentSpecification) -> dict:
    doc: dict = {}
    for category in CATEGORIES:
        entries = []
        parents = spec.parent_type[category]
        for name in sorted(spec.types[category]):
            entry: dict = {"name": name}
            if name in parents:
                entry["parent"] = parents[name]
            if category != BOUNDARY:
                own = spec.key_assignment[category][name]
                if name in parents:
                    own = own - spec.key_assignment[category][parents[name]]
                if own:
                    entry["keys"] = sorted(own)
            entries.append(entry)
        doc[_SECTION[category]] = entries
    doc["properties"] = {k: sorted(v) for k, v in sorted(spec.value_domain.items())}
    doc["values"] = sorted(spec.property_values)
    return doc


# ---------------------------------------------------------------------------
# diagram


def _as_list(value) -> list:
    if value is None:
        return []
    if isinstance(value, str):
        return [value]
    return list(value)


def _closure(parent: Mapping[str, str], kind: str) -> set:
    """(ancestor, node) pairs over a parent forest; raises on cycles."""
    pairs = set()
    for node in parent:
        seen = {node}
        cur = parent.get(node)
        while cur is not None:
            if cur in seen:
                raise DiagramError(
                    "CYCLIC_CONTAINMENT", f"{kind} containment of {node!r} loops back through {cur!r}"
                )
            seen.add(cur)
            pairs.add((cur, node))
            cur = parent.get(cur)
    return pairs


def load_diagram(document: Mapping, spec: Optional[ContentSpecification] = None) -> Diagram:
    """Build a :class:`Diagram` from a parsed model document.

    Only structural integrity is enforced here.  Whether the types, keys and
    values agree with ``spec`` is the job of
    :func:`adfd.conformance.validate_diagram`.
    """
    validate_document(document, "model")
    kind_of: dict = {}
    type_of: dict = {c: {} for c in CATEGORIES}
    properties: dict = {}

    sections = (
        (ELEMENT, document.get("elements", [])),
        (BOUNDARY, document.get("boundaries", [])),
        (CONNECTOR, document.get("connectors", [])),
        (ASSET, document.get("assets", [])),
    )
    order: dict = {c: [] for c in CATEGORIES}
    for category, entries in sections:
        for entry in entries:
            cid = entry["id"]
            if cid in kind_of:
                raise DiagramError("DUPLICATE_ID", f"identifier {cid!r} is used more than once")
            kind_of[cid] = category
            order[category].append(cid)
            type_of[category][cid] = entry["type"]
            properties[cid] = _freeze(entry.get("properties", {}))

    source: dict = {}
    target: dict = {}
    for entry in document.get("connectors", []):
        for end, table in (("source", source), ("target", target)):
            ref = entry[end]
            if kind_of.get(ref) != ELEMENT:
                raise DiagramError(
                    "DANGLING_ENDPOINT", f"connector {entry['id']!r} {end} {ref!r} is not an element"
                )
            table[entry["id"]] = ref

    element_parent: dict = {}
    boundary_parent: dict = {}
    for category, entries in sections[:2]:
        for entry in entries:
            cid = entry["id"]
            for ref in _as_list(entry.get("parent")):
                ref_kind = kind_of.get(ref)
                if ref_kind == ELEMENT and category == ELEMENT:
                    table = element_parent
                elif ref_kind == BOUNDARY:
                    table = boundary_parent
                else:
                    raise DiagramError(
                        "DANGLING_REFERENCE", f"{category} {cid!r} has invalid parent {ref!r}"
                    )
                if cid in table:
                    raise DiagramError(
                        "MULTIPLE_PARENTS",
                        f"{category} {cid!r} lists parents {table[cid]!r} and {ref!r}",
                    )
                if ref == cid:
                    raise DiagramError("CYCLIC_CONTAINMENT", f"{cid!r} contains itself")
                table[cid] = ref

    delta = _closure(element_parent, "element")
    boundary_only = {k: v for k, v in boundary_parent.items() if kind_of[k] == BOUNDARY}
    kappa = _closure(boundary_only, "boundary")
    for node, direct in boundary_parent.items():
        if kind_of[node] == ELEMENT:
            kappa.add((direct, node))
            kappa.update((anc, node) for anc in _ancestors(boundary_only, direct))

    links = set()
    for entry in document.get("assets", []):
        for holder in _as_list(entry.get("held_by")):
            if kind_of.get(holder) not in (ELEMENT, CONNECTOR):
                raise DiagramError(
                    "DANGLING_REFERENCE",
                    f"asset {entry['id']!r} is held by {holder!r}, which is not an element or connector",
                )
            links.add((holder, entry["id"]))

    return _assemble(
        spec, order, source, target, type_of, properties, element_parent, boundary_parent,
        frozenset(links), frozenset(delta), frozenset(kappa), kind_of,
    )


def _ancestors(parent: Mapping[str, str], node: str):
    cur = parent.get(node)
    while cur is not None:
        yield cur
        cur = parent.get(cur)


def _assemble(spec, order, source, target, type_of, properties, element_parent,
              boundary_parent, links, delta, kappa, kind_of) -> Diagram:
    outgoing: dict = {n: [] for n in order[ELEMENT]}
    incoming: dict = {n: [] for n in order[ELEMENT]}
    for r in order[CONNECTOR]:
        outgoing[source[r]].append(r)
        incoming[target[r]].append(r)
    holders: dict = {}
    for holder, asset in links:
        holders.setdefault(holder, set()).add(asset)
    return Diagram(
        spec=spec,
        elements=tuple(order[ELEMENT]),
        assets=tuple(order[ASSET]),
        boundaries=tuple(order[BOUNDARY]),
        connectors=tuple(order[CONNECTOR]),
        source=_freeze(source),
        target=_freeze(target),
        type_of=_freeze({c: _freeze(m) for c, m in type_of.items()}),
        properties=_freeze(properties),
        element_parent=_freeze(element_parent),
        boundary_parent=_freeze(boundary_parent),
        asset_links=links,
        delta=delta,
        kappa=kappa,
        kind_of=_freeze(kind_of),
        outgoing=_freeze({n: tuple(sorted(rs)) for n, rs in outgoing.items()}),
        incoming=_freeze({n: tuple(sorted(rs)) for n, rs in incoming.items()}),
        holders=_freeze({h: frozenset(a) for h, a in holders.items()}),
    )


def diagram_to_document(diagram: Diagram) -> dict:
    """Inverse of :func:`load_diagram` (up to section ordering)."""

    def props(cid):
        p = diagram.properties.get(cid, {})
        return {"properties": dict(sorted(p.items()))} if p else {}

    def parents(cid):
        refs = [p for p in (diagram.element_parent.get(cid), diagram.boundary_parent.get(cid)) if p]
        if not refs:
            return {}
        return {"parent": refs[0] if len(refs) == 1 else refs}

    held: dict = {}
    for holder, asset in sorted(diagram.asset_links):
        held.setdefault(asset, []).append(holder)

    doc = {
        "elements": [
            {"id": n, "type": diagram.type_of[ELEMENT][n], **parents(n), **props(n)}
            for n in diagram.elements
        ],
        "boundaries": [
            {"id": a, "type": diagram.type_of[BOUNDARY][a], **parents(a), **props(a)}
            for a in diagram.boundaries
        ],
        "connectors": [
            {
                "id": r,
                "type": diagram.type_of[CONNECTOR][r],
                "source": diagram.source[r],
                "target": diagram.target[r],
                **props(r),
            }
            for r in diagram.connectors
        ],
        "assets": [
            {
                "id": y,
                "type": diagram.type_of[ASSET][y],
                **props(y),
                **({"held_by": held[y]} if y in held else {}),
            }
            for y in diagram.assets
        ],
    }
    return doc


# ---------------------------------------------------------------------------
# accessors


def _require_component(diagram: Diagram, component_id: str, allowed: Iterable[str]) -> str:
    kind = diagram.kind_of.get(component_id)
    if kind not in allowed:
        raise LookupFault("UNKNOWN_COMPONENT", f"{component_id!r} is not a valid {'/'.join(allowed)} id")
    return kind


def property_value(diagram: Diagram, component_id: str, key: str):
    """The value assigned to ``key`` on the component, or :data:`UNDEFINED`."""
    _require_component(diagram, component_id, PROPERTY_CATEGORIES)
    return diagram.properties[component_id].get(key, UNDEFINED)


def contains(diagram: Diagram, relation: str, container_id: str, inner_id: str) -> bool:
    """Membership in the transitive closure of element (``delta``) or boundary (``kappa``) nesting."""
    if relation == "delta":
        _require_component(diagram, container_id, (ELEMENT,))
        _require_component(diagram, inner_id, (ELEMENT,))
        return (container_id, inner_id) in diagram.delta
    if relation == "kappa":
        _require_component(diagram, container_id, (BOUNDARY,))
        _require_component(diagram, inner_id, (BOUNDARY, ELEMENT))
        return (container_id, inner_id) in diagram.kappa
    raise ValueError(f"unknown relation {relation!r}")


def holds_asset(diagram: Diagram, holder_id: str, asset_id: str) -> bool:
    _require_component(diagram, holder_id, (ELEMENT, CONNECTOR))
    _require_component(diagram, asset_id, (ASSET,))
    return (holder_id, asset_id) in diagram.asset_links

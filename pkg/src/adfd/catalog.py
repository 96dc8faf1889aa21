"""Rule catalogs and end-to-end threat analysis."""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Mapping, Optional, Sequence

from . import __version__
from .conformance import Violation, validate_diagram
from .dsl import ParseError, parse_query
from .engine import Evaluator, MatchTuple
from .errors import CatalogError, ModelNotConforming
from .flows import ELEMENT_UNIQUE, MODES, FlowGraph
from .model import ContentSpecification, Diagram, diagram_to_document, specification_to_document
from .rulecheck import check_query
from .schemas import validate_document

MATCHED = "matched"
NOT_MATCHED = "not-matched"
RULE_INVALID = "rule-invalid"


@dataclass(frozen=True)
class Rule:
    id: str
    title: str
    pattern_text: str
    impact: int
    likelihood: int
    description: str = ""
    threat_type: str = ""

    @property
    def risk(self) -> int:
        # plain product; a convention, not a calibrated risk model
        return self.impact * self.likelihood

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "description": self.description,
            "threat_type": self.threat_type,
            "impact": self.impact,
            "likelihood": self.likelihood,
            "pattern": self.pattern_text,
        }


def load_catalog(document: Mapping) -> List[Rule]:
    """Build rules from a catalog document.  Patterns are not parsed here."""
    validate_document(document, "catalog")
    rules: List[Rule] = []
    seen = set()
    for entry in document["rules"]:
        rid = entry["id"]
        if rid in seen:
            raise CatalogError("DUPLICATE_RULE_ID", f"rule id {rid!r} appears more than once")
        seen.add(rid)
        for score in ("impact", "likelihood"):
            if not 1 <= entry[score] <= 5:
                raise CatalogError("RANGE_ERROR", f"rule {rid!r}: {score} {entry[score]} is outside 1..5")
        rules.append(
            Rule(
                id=rid,
                title=entry["title"],
                pattern_text=entry["pattern"],
                impact=entry["impact"],
                likelihood=entry["likelihood"],
                description=entry.get("description", ""),
                threat_type=entry.get("threat_type", ""),
            )
        )
    return rules


def catalog_to_document(rules: Sequence[Rule]) -> dict:
    return {"rules": [r.to_json() for r in rules]}


@dataclass(frozen=True)
class RuleResult:
    rule: Rule
    status: str
    violations: tuple = ()
    matches: tuple = ()  # MatchTuple, canonical order

    def to_json(self) -> dict:
        return {
            "id": self.rule.id,
            "title": self.rule.title,
            "threat_type": self.rule.threat_type,
            "impact": self.rule.impact,
            "likelihood": self.rule.likelihood,
            "risk": self.rule.risk,
            "status": self.status,
            "violations": [v.to_json() for v in self.violations],
            "matches": [[r.to_json() for r in sorted(m.affected)] for m in self.matches],
        }


@dataclass(frozen=True)
class ThreatReport:
    flow_uniqueness: str
    results: tuple
    spec_digest: str = ""
    model_digest: str = ""
    catalog_digest: str = ""
    tool_version: str = field(default=__version__)

    def result(self, rule_id: str) -> RuleResult:
        for r in self.results:
            if r.rule.id == rule_id:
                return r
        raise KeyError(rule_id)

    @property
    def matched(self) -> List[RuleResult]:
        return [r for r in self.results if r.status == MATCHED]

    def to_json(self) -> dict:
        return {
            "metadata": {
                "tool_version": self.tool_version,
                "flow_uniqueness": self.flow_uniqueness,
                "spec_digest": self.spec_digest,
                "model_digest": self.model_digest,
                "catalog_digest": self.catalog_digest,
            },
            "rules": [r.to_json() for r in self.results],
        }


def dump_json(document) -> str:
    """Canonical serialization used for reports and digests."""
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def digest(document) -> str:
    return "sha256:" + hashlib.sha256(dump_json(document).encode("utf-8")).hexdigest()


def parse_violation(err: ParseError) -> Violation:
    return Violation(err.code, "<pattern>", str(err), offset=err.offset)


def check_rule(rule: Rule, spec: ContentSpecification):
    """Parse and statically check one rule: ``(tree or None, violations)``."""
    try:
        tree = parse_query(rule.pattern_text)
    except ParseError as err:
        return None, [parse_violation(err)]
    return tree, check_query(tree, spec)


def _run_rule(rule: Rule, diagram: Diagram, spec: ContentSpecification, mode: str, graph: FlowGraph) -> RuleResult:
    tree, problems = check_rule(rule, spec)
    if problems:
        return RuleResult(rule, RULE_INVALID, tuple(problems))
    matches: List[MatchTuple] = Evaluator(diagram, mode, graph).query(tree)
    return RuleResult(rule, MATCHED if matches else NOT_MATCHED, (), tuple(matches))


def analyze(diagram: Diagram, spec: ContentSpecification, catalog: Sequence[Rule],
            mode: str = ELEMENT_UNIQUE, workers: int = 1, digests: Optional[Mapping[str, str]] = None) -> ThreatReport:
    """Check and evaluate every rule of ``catalog`` on ``diagram``.

    Raises :class:`ModelNotConforming` when the diagram violates ``spec``.
    Invalid rules are reported, not raised.  The report does not depend on
    ``workers``: rules are evaluated independently and assembled in id order.
    """
    if mode not in MODES:
        raise ValueError(f"unknown flow uniqueness mode {mode!r}")
    problems = validate_diagram(diagram, spec)
    if problems:
        raise ModelNotConforming(problems)
    if diagram.spec is not spec:
        diagram = _rebind(diagram, spec)
    graph = FlowGraph(diagram)
    rules = sorted(catalog, key=lambda r: r.id)
    if workers > 1 and len(rules) > 1:
        # compile the flow kernel before fanning out
        if diagram.elements:
            graph.flows(diagram.elements[0], diagram.elements[0], mode)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: _run_rule(r, diagram, spec, mode, graph), rules))
    else:
        results = [_run_rule(r, diagram, spec, mode, graph) for r in rules]
    if digests is None:
        digests = {
            "spec": digest(specification_to_document(spec)),
            "model": digest(diagram_to_document(diagram)),
            "catalog": digest(catalog_to_document(rules)),
        }
    return ThreatReport(
        flow_uniqueness=mode,
        results=tuple(results),
        spec_digest=digests.get("spec", ""),
        model_digest=digests.get("model", ""),
        catalog_digest=digests.get("catalog", ""),
    )


def _rebind(diagram: Diagram, spec: ContentSpecification) -> Diagram:
    return replace(diagram, spec=spec)


def report_to_text(report: ThreatReport) -> str:
    lines = [f"flow uniqueness: {report.flow_uniqueness}"]
    for r in report.results:
        lines.append(
            f"{r.rule.id} [{r.status}] {r.rule.title} "
            f"(impact {r.rule.impact}, likelihood {r.rule.likelihood}, risk {r.rule.risk}): "
            f"{len(r.matches)} match(es)"
        )
        for v in r.violations:
            lines.append(f"  {v}")
        for m in r.matches:
            lines.append("  " + ", ".join(str(ref) for ref in sorted(m.affected)))
    matched = len(report.matched)
    lines.append(f"{matched} of {len(report.results)} rule(s) matched")
    return "\n".join(lines) + "\n"

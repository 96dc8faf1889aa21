"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py`` for the bare report.
"""

from __future__ import annotations

import copy
import io
import random
import subprocess
import sys
import time
from collections import Counter
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from adfd.cli import main as cli_main  # noqa: E402
from adfd.conformance import validate_diagram  # noqa: E402
from adfd.dsl import ast, parse_query, pretty_print  # noqa: E402
from adfd.engine import evaluate_query  # noqa: E402
from adfd.errors import DiagramError  # noqa: E402
from adfd.flows import CONNECTOR_UNIQUE, ELEMENT_UNIQUE, enumerate_flows  # noqa: E402
from adfd.model import load_diagram, load_specification  # noqa: E402
from adfd.rulecheck import check_query  # noqa: E402

from generators import (  # noqa: E402
    DATA,
    FILTER_KINDS,
    RuleGenerator,
    expected_production_tags,
    filter_kind,
    load_fixture_documents,
    production_tags,
    random_conforming_diagram,
    random_digraph_document,
)
from oracles import (  # noqa: E402
    ReferenceEvaluator,
    brute_force_edge_walks,
    brute_force_simple_paths,
    engine_as_reference,
)

LINES: list = []


def record(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
    LINES.append(line)
    print(line)


def fixture():
    spec_doc, model_doc = load_fixture_documents()
    spec = load_specification(spec_doc)
    return spec, load_diagram(model_doc, spec), model_doc


def matched_ids(text, diagram, mode=ELEMENT_UNIQUE):
    return {m.focus.key for m in evaluate_query(parse_query(text), diagram, mode)}


# ---------------------------------------------------------------------------


def criterion_1():
    timings = []
    codes = []
    for args in (
        ["validate-spec", "--spec", str(DATA / "spec.json")],
        ["validate-model", "--spec", str(DATA / "spec.json"), "--model", str(DATA / "model.json")],
    ):
        start = time.perf_counter()
        proc = subprocess.run([sys.executable, "-m", "adfd.cli", *args], capture_output=True)
        timings.append(time.perf_counter() - start)
        codes.append(proc.returncode)
    ok = codes == [0, 0] and max(timings) < 1.0
    return ok, f"fixture validates (exit codes {codes}, slowest {max(timings):.2f}s < 1s)"


def criterion_2():
    _, d, _ = fixture()
    no = matched_ids('Asset { "Encrypted" = "No" }', d)
    yes = matched_ids('Asset { "Encrypted" = "Yes" }', d)
    return no == {"y1"} and yes == {"y2"}, f"Encrypted=No -> {sorted(no)}, Encrypted=Yes -> {sorted(yes)}"


def criterion_3():
    _, d, _ = fixture()
    soft = matched_ids('Element : "Software"', d)
    ext = matched_ids('Element : "External Interactor"', d)
    return soft == {"n2"} and ext == {"n1", "n3"}, f"Software -> {sorted(soft)}, External Interactor -> {sorted(ext)}"


def criterion_4():
    _, d, _ = fixture()
    server = evaluate_query(parse_query('Flow { Source Element : "Server" & Target Element : "Database" }'), d)
    phone = evaluate_query(parse_query('Flow { Source Element : "Mobile Phone" & Target Element : "Database" }'), d)
    flows = [m.focus.key for m in server]
    ok = flows == [("n4", "r2", "n5", "r3", "n6")] and phone == []
    return ok, f"Server->Database flows {flows}, Mobile Phone->Database flows {len(phone)}"


def criterion_5():
    spec, _, _ = fixture()
    rng = random.Random(20240501)
    start = time.perf_counter()
    mismatches = nonempty = 0
    for _ in range(500):
        d = load_diagram(random_digraph_document(rng, max_nodes=8, max_edges=14), spec)
        a, b = rng.choice(d.elements), rng.choice(d.elements)
        eu = [f.sequence for f in enumerate_flows(d, a, b, ELEMENT_UNIQUE)]
        cu = [f.sequence for f in enumerate_flows(d, a, b, CONNECTOR_UNIQUE)]
        mismatches += eu != brute_force_simple_paths(d, a, b)
        mismatches += cu != brute_force_edge_walks(d, a, b)
        nonempty += bool(cu)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 60 and nonempty >= 100
    return ok, f"500 digraphs, {mismatches} mismatches, {nonempty} with flows, {elapsed:.1f}s < 60s"


def criterion_6():
    spec, _, _ = fixture()
    rng = random.Random(7)
    gen = RuleGenerator(rng, spec, depth=3)
    forced = FILTER_KINDS + ("type",)
    counts: Counter = Counter()
    start = time.perf_counter()
    mismatches = invalid = nonempty = 0
    for i in range(300):
        d = random_conforming_diagram(rng, spec, max_elements=6)
        tree = gen.query(force_kind=forced[i % len(forced)])
        invalid += bool(check_query(tree, spec))
        for node in ast.walk(tree):
            kind = filter_kind(node)
            if kind:
                counts[kind] += 1
            elif isinstance(node, ast.TypeFilter):
                counts["type"] += 1
        mode = ELEMENT_UNIQUE if i % 2 == 0 else CONNECTOR_UNIQUE
        got = evaluate_query(tree, d, mode)
        nonempty += bool(got)
        mismatches += engine_as_reference(got) != ReferenceEvaluator(d, mode).query(tree)
    elapsed = time.perf_counter() - start
    least = min(counts[k] for k in forced)
    ok = mismatches == 0 and invalid == 0 and least >= 20 and elapsed < 120
    return ok, (f"300 rule/model pairs, {mismatches} mismatches, least-covered filter kind {least} >= 20, "
                f"{nonempty} non-empty, {elapsed:.1f}s < 120s")


NEGATABLE = (
    ("Has/Has no Connector", "element"),
    ("Has/Has no Flow", "element"),
    ("Contains/Contains no", "element"),
    ("Contains/Contains no", "boundary"),
    ("Contained by/Not Contained by", "element"),
    ("Contained by/Not Contained by", "boundary"),
    ("Includes/Includes no", "flow"),
)


def _filter_pair(name, host, gen):
    inner = gen.depth - 1
    if name == "Has/Has no Connector":
        tf, ctx = gen.type_filter("connector")
        sub = gen.filters("connector", inner, ctx) if gen.rng.random() < 0.4 else None
        direction = gen.rng.choice((ast.SOURCE, ast.TARGET))
        end = gen.pattern(("element",), inner)
        return (ast.ConnectorFilter(False, direction, end, tf, sub), ast.ConnectorFilter(True, direction, end, tf, sub))
    if name == "Has/Has no Flow":
        direction = gen.rng.choice((ast.SOURCE, ast.TARGET))
        end = gen.pattern(("element",), inner)
        return ast.FlowFilter(False, direction, end), ast.FlowFilter(True, direction, end)
    if name == "Includes/Includes no":
        pat = gen.pattern(("element", "connector"), inner)
        return ast.IncludesFilter(ast.SOME, pat), ast.IncludesFilter(ast.NO, pat)
    node = ast.ElementRelationFilter if host == "element" else ast.BoundaryRelationFilter
    if name == "Contains/Contains no":
        kinds = ("element",) if host == "element" else ("element", "boundary")
        pat = gen.pattern(kinds, inner)
        return node(ast.CONTAINS, pat), node(ast.CONTAINS_NO, pat)
    kinds = ("element", "boundary") if host == "element" else ("boundary",)
    pat = gen.pattern(kinds, inner)
    return node(ast.CONTAINED_BY, pat), node(ast.NOT_CONTAINED_BY, pat)


def _host(host, filt):
    if host == "flow":
        return ast.FlowPattern(ast.ElementPattern(), ast.ElementPattern(), filt)
    return {"element": ast.ElementPattern, "boundary": ast.BoundaryPattern}[host](None, filt)


def criterion_7():
    spec, _, _ = fixture()
    rng = random.Random(4242)
    gen = RuleGenerator(rng, spec, depth=2)
    violations = checks = split = 0
    for _ in range(100):
        d = random_conforming_diagram(rng, spec)
        for mode in (ELEMENT_UNIQUE, CONNECTOR_UNIQUE):
            universes = {
                "element": set(d.elements),
                "boundary": set(d.boundaries),
                "flow": {m.focus.key for m in evaluate_query(_host("flow", None), d, mode)},
            }
            for name, host in NEGATABLE:
                pos, neg = _filter_pair(name, host, gen)
                p = {m.focus.key for m in evaluate_query(_host(host, pos), d, mode)}
                n = {m.focus.key for m in evaluate_query(_host(host, neg), d, mode)}
                checks += 1
                split += bool(p) and bool(n)
                violations += (p & n) or (p | n) != universes[host]
    ok = violations == 0 and split > 0
    return ok, f"100 diagrams x 2 modes x {len(NEGATABLE)} filter pairs, {violations} violations ({split} non-trivial)"


def criterion_8():
    rng = random.Random(8)
    gen = RuleGenerator(rng)
    failures = 0
    tags = set()
    for _ in range(1000):
        tree = gen.query()
        tags |= production_tags(tree)
        try:
            failures += parse_query(pretty_print(tree)) != tree
        except Exception:
            failures += 1
    missing = expected_production_tags() - tags
    ok = failures == 0 and not missing
    return ok, f"1000 ASTs, {failures} round-trip failures, {len(missing)} grammar productions never exercised"


def _mutate(kind, doc, spec, rng):
    """Apply one seeded defect; returns the expected violation code and component id."""
    categories = {"element": "elements", "asset": "assets", "boundary": "boundaries", "connector": "connectors"}
    if kind == "dangling endpoint":
        r = rng.choice(doc["connectors"])
        r[rng.choice(("source", "target"))] = rng.choice(["ghost", "n99", "a1", "y1"])
        return "DANGLING_ENDPOINT", None
    category = rng.choice(sorted(categories))
    entry = rng.choice(doc[categories[category]])
    props = entry.setdefault("properties", {})
    if kind == "unknown type":
        entry["type"] = rng.choice(["Toaster", "Satellite", "Router", "Mainframe"]) + str(rng.randint(0, 9))
        return "UNKNOWN_TYPE", entry["id"]
    allowed = spec.key_assignment[category][entry["type"]] if category != "boundary" else frozenset()
    if kind == "illegal key":
        outside = sorted(spec.property_keys - allowed) + ["Colour"]
        key = rng.choice(outside)
        domain = sorted(spec.value_domain.get(key, ())) or ["Red"]
        props[key] = rng.choice(domain)
        return "KEY_NOT_ALLOWED", entry["id"]
    if not allowed:
        # no legal key to abuse here; move to an element that has one
        entry = rng.choice([e for e in doc["elements"] if spec.key_assignment["element"][e["type"]]])
        props = entry.setdefault("properties", {})
        allowed = spec.key_assignment["element"][entry["type"]]
    key = rng.choice(sorted(allowed))
    others = sorted(set(spec.property_values) - spec.value_domain[key]) + ["Perhaps", "42"]
    props[key] = rng.choice(others)
    return "VALUE_NOT_IN_DOMAIN", entry["id"]


def criterion_9():
    spec, _, model_doc = fixture()
    rng = random.Random(99)
    kinds = ("illegal key", "illegal value", "unknown type", "dangling endpoint")
    false_passes = 0
    per_kind: Counter = Counter()
    for i in range(200):
        kind = kinds[i % len(kinds)]
        doc = copy.deepcopy(model_doc)
        code, subject = _mutate(kind, doc, spec, rng)
        try:
            d = load_diagram(doc, spec)
        except DiagramError as err:
            caught = err.code == code
        else:
            caught = any(v.code == code and v.subject == subject for v in validate_diagram(d, spec))
        false_passes += not caught
        per_kind[kind] += caught
    detail = ", ".join(f"{k} {per_kind[k]}/50" for k in kinds)
    return false_passes == 0, f"200 seeded defects, {false_passes} missed ({detail})"


def criterion_10(tmp_dir: Path):
    outputs = []
    codes = []
    for run, jobs in enumerate((1, 4, 1, 4, 2)):
        out = tmp_dir / f"report{run}.json"
        argv = ["analyze", "--spec", str(DATA / "spec.json"), "--model", str(DATA / "model.json"),
                "--rules", str(DATA / "rules.json"), "--format", "structured", "--out", str(out),
                "--jobs", str(jobs)]
        with redirect_stdout(io.StringIO()), redirect_stderr(io.StringIO()):
            codes.append(cli_main(argv))
        outputs.append(out.read_bytes())
    identical = len(set(outputs)) == 1
    ok = identical and codes == [0] * 5
    return ok, f"5 structured reports (jobs 1,4,1,4,2) byte-identical: {identical}"


# ---------------------------------------------------------------------------


def _check(number, fn, *args):
    try:
        ok, detail = fn(*args)
    except Exception as err:  # a crash still counts as one FAIL line
        ok, detail = False, f"raised {type(err).__name__}: {err}"
    record(number, ok, detail)
    assert ok, detail


def test_criterion_01_fixture_validates():
    _check(1, criterion_1)


def test_criterion_02_worked_threat():
    _check(2, criterion_2)


def test_criterion_03_subtypes():
    _check(3, criterion_3)


def test_criterion_04_flow_fixture():
    _check(4, criterion_4)


@pytest.mark.slow
def test_criterion_05_flows_oracle():
    _check(5, criterion_5)


@pytest.mark.slow
def test_criterion_06_evaluator_oracle():
    _check(6, criterion_6)


def test_criterion_07_negation_complement():
    _check(7, criterion_7)


def test_criterion_08_round_trip():
    _check(8, criterion_8)


def test_criterion_09_conformance_seeding():
    _check(9, criterion_9)


def test_criterion_10_determinism(tmp_path):
    _check(10, criterion_10, tmp_path)


if __name__ == "__main__":
    import tempfile

    failed = 0
    with tempfile.TemporaryDirectory() as tmp:
        for number, fn in enumerate((criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
                                     criterion_7, criterion_8, criterion_9), start=1):
            ok, detail = fn()
            record(number, ok, detail)
            failed += not ok
        ok, detail = criterion_10(Path(tmp))
        record(10, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)

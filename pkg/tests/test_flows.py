import random

import pytest

from adfd.errors import LookupFault
from adfd.flows import (
    CONNECTOR_UNIQUE,
    ELEMENT_UNIQUE,
    Flow,
    FlowGraph,
    enumerate_flows,
    flow_connectors,
    flow_elements,
    numba_available,
    p_source,
    p_target,
)
from adfd.model import load_diagram

from generators import random_digraph_document
from oracles import brute_force_edge_walks, brute_force_simple_paths


def seqs(flows):
    return [f.sequence for f in flows]


def test_flow_accessors():
    p = Flow(("n4", "r2", "n5", "r3", "n6"))
    assert p_source(p) == "n4" and p_target(p) == "n6"
    assert flow_elements(p) == {"n4", "n5", "n6"}
    assert flow_connectors(p) == {"r2", "r3"}
    q = Flow(("n6", "r4", "n5", "r5", "n3"))
    assert p_source(q) == "n6" and p_target(q) == "n3"
    single = Flow(("n2", "r1", "n3"))
    assert flow_elements(single) == {"n2", "n3"} and flow_connectors(single) == {"r1"}
    assert not flow_elements(p) & flow_connectors(p)


@pytest.mark.parametrize("bad", [("n1",), ("n1", "r1"), ()])
def test_flow_needs_a_connector(bad):
    with pytest.raises(ValueError):
        Flow(bad)


@pytest.mark.parametrize(
    "src, tgt, expected",
    [
        ("n4", "n6", [("n4", "r2", "n5", "r3", "n6")]),
        ("n6", "n3", [("n6", "r4", "n5", "r5", "n3")]),
        ("n2", "n6", []),
        ("n1", "n6", []),
        ("n2", "n2", []),
    ],
)
def test_fixture_flows(diagram, src, tgt, expected):
    assert seqs(enumerate_flows(diagram, src, tgt)) == expected


def test_connector_unique_admits_cycles(diagram):
    assert seqs(enumerate_flows(diagram, "n2", "n2", CONNECTOR_UNIQUE)) == [("n2", "r1", "n3", "r6", "n2")]
    assert seqs(enumerate_flows(diagram, "n5", "n5", CONNECTOR_UNIQUE)) == [("n5", "r3", "n6", "r4", "n5")]


def test_single_node_self(spec):
    d = load_diagram({"elements": [{"id": "a", "type": "Server"}]}, spec)
    assert enumerate_flows(d, "a", "a") == []
    assert enumerate_flows(d, "a", "a", CONNECTOR_UNIQUE) == []


def test_unknown_component(diagram):
    with pytest.raises(LookupFault) as err:
        enumerate_flows(diagram, "n1", "nope")
    assert err.value.code == "UNKNOWN_COMPONENT"
    with pytest.raises(LookupFault):
        enumerate_flows(diagram, "r1", "n2")


def test_unknown_mode(diagram):
    with pytest.raises(ValueError):
        enumerate_flows(diagram, "n1", "n2", "paths")


def test_parallel_connectors_give_distinct_flows(spec):
    doc = {
        "elements": [{"id": x, "type": "Server"} for x in "abc"],
        "connectors": [
            {"id": "r1", "type": "Wired", "source": "a", "target": "b"},
            {"id": "r2", "type": "Wired", "source": "a", "target": "b"},
            {"id": "r3", "type": "Wired", "source": "b", "target": "c"},
        ],
    }
    d = load_diagram(doc, spec)
    assert seqs(enumerate_flows(d, "a", "c")) == [("a", "r1", "b", "r3", "c"), ("a", "r2", "b", "r3", "c")]


def test_stops_at_target_in_connector_mode(spec):
    # a -> b -> a -> b would reuse no connector but passes the target twice
    doc = {
        "elements": [{"id": "a", "type": "Server"}, {"id": "b", "type": "Server"}],
        "connectors": [
            {"id": "r1", "type": "Wired", "source": "a", "target": "b"},
            {"id": "r2", "type": "Wired", "source": "b", "target": "a"},
            {"id": "r3", "type": "Wired", "source": "a", "target": "b"},
        ],
    }
    d = load_diagram(doc, spec)
    assert seqs(enumerate_flows(d, "a", "b", CONNECTOR_UNIQUE)) == [("a", "r1", "b"), ("a", "r3", "b")]


@pytest.mark.parametrize("use_numba", [False, True])
def test_backends_agree_with_oracles(spec, use_numba):
    if use_numba and not numba_available():
        pytest.skip("numba disabled")
    rng = random.Random(21)
    for _ in range(60):
        d = load_diagram(random_digraph_document(rng), spec)
        graph = FlowGraph(d)
        a, b = rng.choice(d.elements), rng.choice(d.elements)
        eu = seqs(graph.flows(a, b, ELEMENT_UNIQUE, use_numba))
        cu = seqs(graph.flows(a, b, CONNECTOR_UNIQUE, use_numba))
        assert eu == brute_force_simple_paths(d, a, b)
        assert cu == brute_force_edge_walks(d, a, b)
        assert set(eu) <= set(cu)
        for seq in cu:
            assert seq[0] == a and seq[-1] == b
            for i in range(1, len(seq), 2):
                assert d.source[seq[i]] == seq[i - 1] and d.target[seq[i]] == seq[i + 1]


def test_long_chain_does_not_recurse(spec):
    n = 12000
    doc = {
        "elements": [{"id": f"e{i:05d}", "type": "Server"} for i in range(n)],
        "connectors": [
            {"id": f"c{i:05d}", "type": "Wired", "source": f"e{i:05d}", "target": f"e{i + 1:05d}"}
            for i in range(n - 1)
        ],
    }
    d = load_diagram(doc, spec)
    for use_numba in (False, True) if numba_available() else (False,):
        found = FlowGraph(d).flows("e00000", f"e{n - 1:05d}", ELEMENT_UNIQUE, use_numba)
        assert len(found) == 1 and len(found[0]) == 2 * n - 1


def test_environment_flag_selects_pure_backend():
    import subprocess
    import sys

    code = "from adfd.flows import numba_available; print(numba_available())"
    env = dict(__import__("os").environ, ADFD_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "False"


def test_benchmark_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_flows.py"
    spec = importlib.util.spec_from_file_location("bench_flows", path)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    bench.main(["--shape", "layered", "--size", "2", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "16 flows" in out

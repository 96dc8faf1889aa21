"""Compare the numba and pure-Python flow kernels.

Two graph shapes are available.  ``layered`` yields many flows, so the cost
of building Flow objects shows up in the end-to-end numbers.  ``complete``
is a complete digraph whose target has no incoming connector: the search
visits every simple path and reports none, which isolates the kernel.  It
runs in element-unique mode only; connector-distinct walks on a complete
digraph grow far too fast to enumerate.

    python benchmarks/bench_flows.py --shape complete --size 9
    python benchmarks/bench_flows.py --shape layered --size 6
"""

import argparse
import json
import statistics
import time
from importlib import resources

from adfd.flows import CONNECTOR_UNIQUE, ELEMENT_UNIQUE, FlowGraph, numba_available
from adfd.flows._kernels import walk_paths
from adfd.model import load_diagram, load_specification


def _doc(nodes):
    return {"elements": [{"id": n, "type": "Server"} for n in nodes], "connectors": []}


def _link(doc, a, b):
    doc["connectors"].append({"id": f"c{len(doc['connectors']):06d}", "type": "Wired", "source": a, "target": b})


def layered_document(layers: int, width: int = 4) -> dict:
    """``src`` -> fully connected layers -> ``dst``."""
    rows = [[f"l{i}_{j}" for j in range(width)] for i in range(layers)]
    doc = _doc(["src", "dst"] + [n for row in rows for n in row])
    for n in rows[0]:
        _link(doc, "src", n)
    for upper, lower in zip(rows, rows[1:]):
        for a in upper:
            for b in lower:
                _link(doc, a, b)
    for n in rows[-1]:
        _link(doc, n, "dst")
    return doc


def complete_document(size: int) -> dict:
    """Complete digraph on ``size`` nodes plus an unreachable ``dst``."""
    nodes = [f"k{i}" for i in range(size)]
    doc = _doc(["src", "dst"] + nodes)
    for n in nodes:
        _link(doc, "src", n)
        for m in nodes:
            if m != n:
                _link(doc, n, m)
    _link(doc, "dst", "src")
    return doc


def timed(fn, repeat):
    samples = []
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples), result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--shape", choices=("complete", "layered"), default="complete")
    parser.add_argument("--size", type=int, default=8, help="nodes (complete) or layers (layered)")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    spec_text = resources.files("adfd.data").joinpath("mobile_phone/spec.json").read_text()
    spec = load_specification(json.loads(spec_text))
    build = complete_document if args.shape == "complete" else layered_document
    diagram = load_diagram(build(args.size), spec)
    g = FlowGraph(diagram)
    s, t = g.nodes.index("src"), g.nodes.index("dst")
    print(f"{args.shape}: {len(diagram.elements)} elements, {len(diagram.connectors)} connectors", flush=True)

    backends = [("pure", False)]
    if numba_available():
        walk_paths(g.indptr, g.edge_ids, g.edge_tgt, len(g.nodes), len(g.edges), s, s, True, True)
        backends.append(("numba", True))
    else:
        print("numba unavailable or disabled; timing the pure kernel only")

    modes = (ELEMENT_UNIQUE,) if args.shape == "complete" else (ELEMENT_UNIQUE, CONNECTOR_UNIQUE)
    for mode in modes:
        base_k = base_e = None
        for name, flag in backends:
            k_sec, (_, offsets) = timed(lambda: walk_paths(
                g.indptr, g.edge_ids, g.edge_tgt, len(g.nodes), len(g.edges), s, t, mode == ELEMENT_UNIQUE, flag,
            ), args.repeat)
            e_sec, _ = timed(lambda: g.flows("src", "dst", mode, flag), args.repeat)
            base_k, base_e = base_k or k_sec, base_e or e_sec
            print(f"{mode:>10} {name:>5}: {len(offsets) - 1:>8} flows | kernel {k_sec * 1e3:9.1f} ms "
                  f"(x{base_k / k_sec:6.1f}) | end-to-end {e_sec * 1e3:9.1f} ms (x{base_e / e_sec:6.1f})")


if __name__ == "__main__":
    main()

"""Benchmark: compiled contraction kernel vs the numpy fallback.

The workload is the engine's real hot path: full interpretations of
representative diagrams (graph states, random real stabilizer circuits,
doubled diagrams), executed once per backend over identical inputs.

Usage: python benchmarks/bench_contract.py [--repeat N]
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

import zxpivot._contract as contract
from zxpivot._contract import contract_network
from zxpivot.diagram import Diagram
from zxpivot.gen import random_real_stabilizer_state
from zxpivot.graphstate import SimpleGraph, graph_state_diagram
from zxpivot.semantics import _tensorize, flatten


def build_corpus() -> list[tuple[str, Diagram]]:
    rng = random.Random(12)
    corpus: list[tuple[str, Diagram]] = []
    for n in (4, 5, 6):
        labels = [chr(ord("a") + i) for i in range(n)]
        edges = [
            (labels[i], labels[j])
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < 0.6
        ]
        corpus.append((f"graph state n={n}", graph_state_diagram(SimpleGraph(labels, edges))))
    for q, depth in ((3, 12), (4, 18), (5, 24)):
        corpus.append(
            (f"circuit q={q} d={depth}", random_real_stabilizer_state(q, depth, rng=rng))
        )
    corpus.append(("doubled circuit", flatten(random_real_stabilizer_state(3, 10, rng=rng))))
    return corpus


def bench(repeat: int) -> None:
    corpus = build_corpus()
    networks = [(label, _tensorize(d, False)) for label, d in corpus]
    backends = contract.available_backends()
    print(f"active backend at import: {contract.BACKEND}")
    print(f"{'diagram':24} " + " ".join(f"{name:>12}" for name in backends) + "   speedup")
    totals = {name: 0.0 for name in backends}
    for label, (tensors, open_legs) in networks:
        times = {}
        results = {}
        for name, impl in backends.items():
            t0 = time.perf_counter()
            for _ in range(repeat):
                results[name] = contract_network(tensors, open_legs, impl=impl)
            times[name] = (time.perf_counter() - t0) / repeat
            totals[name] += times[name]
        ref = next(iter(results.values()))
        for name, res in results.items():
            assert np.allclose(res, ref), f"backend {name} disagrees on {label}"
        row = f"{label:24} " + " ".join(f"{times[n]*1e3:10.3f}ms" for n in backends)
        if "compiled" in times and "python" in times:
            row += f"   {times['python'] / times['compiled']:6.2f}x"
        print(row)
    print(f"{'total':24} " + " ".join(f"{totals[n]*1e3:10.3f}ms" for n in backends))
    if "compiled" in totals and "python" in totals:
        print(f"overall speedup: {totals['python'] / totals['compiled']:.2f}x")
    if len(backends) == 1:
        print("compiled kernel not built; only the fallback was timed "
              "(build it or unset ZXPIVOT_NO_EXT)")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=200)
    bench(ap.parse_args().repeat)

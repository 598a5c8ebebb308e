#!/usr/bin/env python3
"""Timing comparison of the Pauli pair-product kernel backends.

``dacqc._kernels_cy`` (compiled) and ``dacqc._kernels_py`` (numpy
fallback) expose the same ``pair_products`` contract; ``dacqc.pauli``
picks one at import time (DACQC_PURE_PYTHON=1 forces the fallback).
This script times both on the workloads that dominate real runs: the
nested-commutator chains of the two lattice models, plus a synthetic
size ladder. Outputs agree up to term ordering; the script cross-checks
that before trusting any timing.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats N] [--depth K] [--csv PATH]
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from dacqc import pauli
from dacqc import _kernels_py
from dacqc.models import build_model
from dacqc.pauli import PauliSum, nested_commutators_upto

try:
    from dacqc import _kernels_cy
except ImportError:
    _kernels_cy = None


def _best_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def _as_sum(n_qubits, raw):
    # canonicalization reduces and sorts, so equal operators compare equal
    xs, zs, cs = raw
    return PauliSum(n_qubits, xs, zs, cs)


def _check_agreement(n_qubits, raw_cy, raw_py, label):
    a = _as_sum(n_qubits, raw_cy)
    b = _as_sum(n_qubits, raw_py)
    if not a.approx_eq(b, tol=1e-12):
        raise SystemExit(f"backend mismatch on workload {label!r}")


def _kernel_workloads(depth):
    """Pairs of operators fed to pair_products, taken from real chains."""
    workloads = []
    for kind, kwargs in (("ising", {"seed": 7}), ("xxz", {"delta": 0.5})):
        model = build_model(kind, 3, **kwargs)
        lam = 0.37
        h = (1.0 - lam) * model.h0 + lam * model.h1
        dh = model.h1 - model.h0
        chain = nested_commutators_upto(h, dh, depth)
        for k in (1, depth - 1, depth):
            workloads.append((f"{kind} [H, C{k - 1}]", model.n_qubits, h, chain[k - 1], True))
        workloads.append((f"{kind} H*C{depth}", model.n_qubits, h, chain[depth], False))
    return workloads


def _synthetic_workloads(sizes, n_qubits=9, seed=11):
    rng = np.random.default_rng(seed)
    out = []
    for n in sizes:
        xs = rng.integers(0, 1 << n_qubits, size=n, dtype=np.uint64)
        zs = rng.integers(0, 1 << n_qubits, size=n, dtype=np.uint64)
        cs = rng.standard_normal(n) + 0.0j
        a = PauliSum(n_qubits, xs, zs, cs)
        out.append((f"random {n}x{n}", n_qubits, a, a, True))
    return out


def _bench_kernel_calls(workloads, repeats):
    rows = []
    for label, n_qubits, a, b, anti_only in workloads:
        args = (
            a.x_masks, a.z_masks, a.coefficients,
            b.x_masks, b.z_masks, b.coefficients,
            anti_only,
        )
        _check_agreement(n_qubits, _kernels_cy.pair_products(*args), _kernels_py.pair_products(*args), label)
        t_cy = _best_time(lambda: _kernels_cy.pair_products(*args), repeats)
        t_py = _best_time(lambda: _kernels_py.pair_products(*args), repeats)
        rows.append({
            "workload": label,
            "pairs": a.num_terms * b.num_terms,
            "mode": "commutator" if anti_only else "product",
            "cython_s": t_cy,
            "python_s": t_py,
            "speedup": t_py / t_cy,
        })
    return rows


def _bench_end_to_end(depth, repeats):
    """Full chain build with dacqc.pauli temporarily pinned to each backend."""
    rows = []
    for kind, kwargs in (("ising", {"seed": 7}), ("xxz", {"delta": 0.5})):
        model = build_model(kind, 3, **kwargs)
        h = 0.63 * model.h0 + 0.37 * model.h1
        dh = model.h1 - model.h0
        times = {}
        saved = pauli._kernels
        try:
            for name, mod in (("cython", _kernels_cy), ("python", _kernels_py)):
                pauli._kernels = mod
                times[name] = _best_time(lambda: nested_commutators_upto(h, dh, depth), repeats)
        finally:
            pauli._kernels = saved
        rows.append({
            "workload": f"{kind} chain to C{depth}",
            "pairs": 0,
            "mode": "end-to-end",
            "cython_s": times["cython"],
            "python_s": times["python"],
            "speedup": times["python"] / times["cython"],
        })
    return rows


def _print_table(rows):
    header = f"{'workload':<24} {'mode':<11} {'pairs':>10} {'cython':>10} {'python':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for r in rows:
        pairs = f"{r['pairs']:,}" if r["pairs"] else "-"
        print(
            f"{r['workload']:<24} {r['mode']:<11} {pairs:>10}"
            f" {r['cython_s'] * 1e3:>8.2f}ms {r['python_s'] * 1e3:>8.2f}ms"
            f" {r['speedup']:>7.1f}x"
        )


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats, best is kept")
    parser.add_argument("--depth", type=int, default=5, help="nested-commutator chain depth")
    parser.add_argument("--sizes", type=str, default="200,1000,4000", help="synthetic term counts")
    parser.add_argument("--csv", type=str, default=None, help="also write rows to this CSV path")
    args = parser.parse_args(argv)

    if _kernels_cy is None:
        print("compiled backend unavailable; nothing to compare", file=sys.stderr)
        return 1
    print(f"active backend in dacqc.pauli: {pauli.KERNEL_BACKEND}")

    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows = _bench_kernel_calls(_kernel_workloads(args.depth), args.repeats)
    rows += _bench_kernel_calls(_synthetic_workloads(sizes), args.repeats)
    rows += _bench_end_to_end(args.depth, args.repeats)
    _print_table(rows)

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

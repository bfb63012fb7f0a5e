#!/usr/bin/env python3
"""Recompute x.aggregate.csv from the raw x.csv and compare."""

import argparse
import csv
import math
import statistics
import sys
from collections import defaultdict

METRICS = ["return", "success", "eps_omega", "eps_uct", "regret"]


def recompute(rows):
    groups = defaultdict(lambda: defaultdict(list))
    order = []
    for row in rows:
        key = (row["variant"], int(row["budget"]))
        if key not in groups:
            order.append(key)
        for m in METRICS:
            groups[key][m].append(float(row[m]))
    out = {}
    for key in order:
        for m in METRICS:
            xs = groups[key][m]
            if not all(math.isfinite(x) for x in xs):
                continue
            sd = statistics.stdev(xs) if len(xs) > 1 else 0.0
            out[(key[0], key[1], m)] = (len(xs), statistics.fmean(xs), 2.0 * sd, sd / math.sqrt(len(xs)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", help="raw results CSV")
    ap.add_argument("--aggregate", help="aggregate CSV (default: derived from csv)")
    ap.add_argument("--tol", type=float, default=1e-9)
    args = ap.parse_args()
    agg_path = args.aggregate or (args.csv[:-4] if args.csv.endswith(".csv") else args.csv) + ".aggregate.csv"

    with open(args.csv, newline="") as f:
        expected = recompute(list(csv.DictReader(f)))
    with open(agg_path, newline="") as f:
        reported = {(r["variant"], int(r["budget"]), r["metric"]): r for r in csv.DictReader(f)}

    bad = 0
    if set(expected) != set(reported):
        print(f"group mismatch: expected {len(expected)}, reported {len(reported)}")
        bad += 1
    for key, (n, mean, two_std, se) in expected.items():
        r = reported.get(key)
        if r is None:
            continue
        got = (int(r["runs"]), float(r["mean"]), float(r["two_std"]), float(r["std_err"]))
        want = (n, mean, two_std, se)
        for name, g, w in zip(("runs", "mean", "two_std", "std_err"), got, want):
            if abs(g - w) > args.tol * max(1.0, abs(w)):
                print(f"{key} {name}: reported {g!r}, recomputed {w!r}")
                bad += 1
    print(f"{len(expected)} groups checked, {bad} mismatches")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())

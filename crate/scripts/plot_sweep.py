#!/usr/bin/env python3
"""Plot P_timely with 95% intervals from a sweep's aggregated.csv."""

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    series = defaultdict(list)
    key = None
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            key = row["sweep"]
            series[row["method"]].append(
                (float(row["value"]), float(row["P_timely_mean"]), float(row["P_timely_ci95"]))
            )
    return key, series


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("aggregated")
    ap.add_argument("-o", "--output", default="p_timely.png")
    args = ap.parse_args()

    key, series = load(args.aggregated)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for method, points in sorted(series.items()):
        points.sort()
        xs, ys, ci = zip(*points)
        ax.errorbar(xs, ys, yerr=ci, marker="o", capsize=3, label=method.upper())
    ax.set_xlabel(key)
    ax.set_ylabel("P_timely")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()

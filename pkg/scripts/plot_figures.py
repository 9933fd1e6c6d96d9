#!/usr/bin/env python3
"""Render PNG figures from experiment CSVs (developer tooling, not part of the library).

    python scripts/plot_figures.py results/            # plots every CSV it recognizes
"""

import argparse
import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_csv(path):
    with open(path) as f:
        rows = [r for r in csv.reader(l for l in f if not l.startswith("#"))]
    header, body = rows[0], rows[1:]
    return [dict(zip(header, row)) for row in body]


def groupby(rows, keys):
    groups = defaultdict(list)
    for r in rows:
        groups[tuple(r[k] for k in keys)].append(r)
    return groups


def plot_fig1a(path, out):
    rows = read_csv(path)
    fig, ax = plt.subplots()
    for (q, dtx, _), grp in sorted(groupby(rows, ["Q", "D_tx", "D_rx"]).items()):
        ax.plot([float(r["P_FA"]) for r in grp], [float(r["P_D"]) for r in grp],
                label=f"Q={q}, D={float(dtx):g}")
    ax.plot([0, 1], [0, 1], "k:", lw=0.8)
    ax.set_xlabel("probability of false alarm")
    ax.set_ylabel("probability of detection")
    ax.legend()
    fig.savefig(out, dpi=150, bbox_inches="tight")


def plot_fig1b(path, out):
    rows = read_csv(path)
    fig, ax = plt.subplots()
    for (dtx, _), grp in sorted(groupby(rows, ["D_tx", "D_rx"]).items()):
        x = [float(r["sigma2_o"]) for r in grp]
        ax.plot(x, [float(r["Pe_analytic"]) for r in grp], label=f"analytic, D={float(dtx):g}")
        ax.plot(x, [float(r["Pe_mc"]) for r in grp], "o", ms=3, label=f"MC, D={float(dtx):g}")
    ax.set_xlabel("MSI variance")
    ax.set_ylabel("probability of error")
    ax.set_yscale("log")
    ax.legend(fontsize=7)
    fig.savefig(out, dpi=150, bbox_inches="tight")


def plot_fig1c(path, out):
    rows = read_csv(path)
    fig, ax = plt.subplots()
    for (k,), grp in sorted(groupby(rows, ["k"]).items(), key=lambda kv: int(kv[0][0])):
        ax.plot([float(r["sigma2_o"]) for r in grp], [float(r["capacity_bits"]) for r in grp],
                label=f"k={k}")
    ax.set_xlabel("MSI variance")
    ax.set_ylabel("capacity (bits/slot)")
    ax.legend()
    fig.savefig(out, dpi=150, bbox_inches="tight")


def plot_fig2(path, out, series_key):
    rows = read_csv(path)
    fig, ax = plt.subplots()
    for key, grp in sorted(groupby(rows, [series_key]).items()):
        x = [int(r["Q1"]) for r in grp]
        y = [float(r["Pe"]) for r in grp]
        (line,) = ax.plot(x, y, label=f"{series_key}={float(key[0]):g}")
        best = [r for r in grp if r["is_argmin"] == "1"]
        if best:
            ax.plot(int(best[0]["Q1"]), float(best[0]["Pe"]), "*", color=line.get_color(), ms=10)
    ax.set_xlabel("molecules in first slot")
    ax.set_ylabel("probability of error")
    ax.set_yscale("log")
    ax.legend(fontsize=7)
    fig.savefig(out, dpi=150, bbox_inches="tight")


PLOTTERS = {
    "fig1a.csv": plot_fig1a,
    "fig1b.csv": plot_fig1b,
    "fig1c.csv": plot_fig1c,
    "fig2a.csv": lambda p, o: plot_fig2(p, o, "D_tx"),
    "fig2b.csv": lambda p, o: plot_fig2(p, o, "sigma2_o"),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("results_dir", type=Path)
    args = parser.parse_args()
    found = False
    for name, plotter in PLOTTERS.items():
        path = args.results_dir / name
        if path.exists():
            out = path.with_suffix(".png")
            plotter(path, out)
            print(out)
            found = True
    if not found:
        print(f"no recognized CSVs in {args.results_dir}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

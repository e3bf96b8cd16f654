#!/usr/bin/env python3
"""Render an aggregate benchmark CSV as an error-bar figure.

Consumes the aggregate CSV contract produced by the benchmark command
(``model,algo,sweep_param,sweep_value,trials,mean_error,std_error``) and draws
mean error versus the swept parameter, one line per algorithm, with +-1
standard deviation as symmetric error bars.  Colors and markers are assigned
by sorted algorithm tag so legends are stable across runs.

Standalone: depends only on the CSV file, matplotlib and the stdlib.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

EXPECTED_HEADER = ["model", "algo", "sweep_param", "sweep_value", "trials",
                   "mean_error", "std_error"]

_MARKERS = ["o", "s", "^", "v", "D", "P", "X", "*", "<", ">"]


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    x_param: str
    output: str
    title: str = ""
    log_y: bool = False


def load_series(path: str, x_param: str) -> dict[str, tuple[list[float], list[float], list[float]]]:
    """Parse the aggregate CSV into {algo: (x, mean, std)}, sorted by x."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty CSV") from None
        if header != EXPECTED_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        rows = list(reader)
    if not rows:
        raise ValueError("CSV contains no data rows")
    series: dict[str, list[tuple[float, float, float]]] = {}
    for row in rows:
        if len(row) != len(EXPECTED_HEADER):
            raise ValueError(f"malformed row {row!r}")
        _model, algo, param, value, _trials, mean, std = row
        if param != x_param:
            raise ValueError(
                f"CSV sweeps {param!r}, but the figure x-axis is {x_param!r}")
        series.setdefault(algo, []).append((float(value), float(mean), float(std)))
    out = {}
    for algo, pts in series.items():
        pts.sort(key=lambda t: t[0])
        xs, means, stds = zip(*pts)
        out[algo] = (list(xs), list(means), list(stds))
    return out


def render(spec: FigureSpec) -> "matplotlib.figure.Figure":
    """Draw the figure and save it; returns the figure for inspection.

    Every plotted line carries its algorithm tag as the artist label, so the
    backing data can be re-read from the figure object.
    """
    series = load_series(spec.input_csv, spec.x_param)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    cmap = plt.get_cmap("tab10")
    for k, algo in enumerate(sorted(series)):
        xs, means, stds = series[algo]
        ax.errorbar(xs, means, yerr=stds, label=algo, color=cmap(k % 10),
                    marker=_MARKERS[k % len(_MARKERS)], capsize=3,
                    linewidth=1.5, markersize=5)
    ax.set_xlabel(spec.x_param)
    ax.set_ylabel("mean relative error")
    if spec.title:
        ax.set_title(spec.title)
    if spec.log_y:
        ax.set_yscale("log")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(spec.output)
    return fig


def figure_series(fig) -> dict[str, tuple[list[float], list[float]]]:
    """Re-parse the plotted (x, y) series from a rendered figure's artists.

    Error-bar artists are containers whose first member is the data line.
    """
    ax = fig.axes[0]
    out = {}
    for container in ax.containers:
        label = container.get_label()
        if label.startswith("_"):
            continue
        line = container[0]
        out[label] = (list(map(float, line.get_xdata())),
                      list(map(float, line.get_ydata())))
    for line in ax.lines:
        label = line.get_label()
        if label.startswith("_") or label in out:
            continue
        out[label] = (list(map(float, line.get_xdata())),
                      list(map(float, line.get_ydata())))
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", required=True, help="aggregate CSV path")
    parser.add_argument("--x", required=True, help="swept parameter name")
    parser.add_argument("--out", required=True, help="output image (png/svg)")
    parser.add_argument("--title", default="")
    parser.add_argument("--log-y", action="store_true")
    args = parser.parse_args(argv)
    spec = FigureSpec(args.input, args.x, args.out, args.title, args.log_y)
    try:
        render(spec)
    except (OSError, ValueError) as exc:
        print(f"plot_benchmark: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

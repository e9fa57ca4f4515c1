"""Render norm curves and pairwise-difference curves from simulation CSVs.

Reads the delimited output of a completed simulation run (norms.csv /
diffs.csv: a `#` version comment, a header row, then one row per recorded
instant) and renders one figure per component selector:

  u          membrane-potential L2 norms, one curve per neuron
  z<c>       ionic component c (1-based), one curve per neuron
  rho        memductance L2 norms, one curve per neuron
  pairwise   total difference norms, one curve per neuron pair (diffs.csv)

Rendering is read-only and deterministic: fixed canvas, fixed color cycle
keyed by curve index, no timestamps.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

_FIGSIZE = (8.0, 4.5)
_DPI = 120
_COLORS = plt.get_cmap("tab10").colors


class SchemaError(Exception):
    """CSV content does not match the expected simulation output schema."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure: which CSV, which component, where to write, which rows."""

    csv_path: Path
    component: str
    out_path: Path
    window: tuple[int, int] | None = None


@dataclass(frozen=True)
class RenderResult:
    out_path: Path
    n_curves: int
    n_points: int
    labels: tuple[str, ...]


def _read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise SchemaError(f"{path}: missing version comment line")
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: missing header row") from None
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    if header[0] != "t":
        raise SchemaError(f"{path}: first column must be 't', got {header[0]!r}")
    return header, np.asarray(rows)


def _select_columns(header: list[str], component: str) -> tuple[list[int], list[str]]:
    """Column indices and curve labels for a component selector."""
    if component == "pairwise":
        pattern = re.compile(r"total_(\d+)_(\d+)$")
        picked = [(idx, m.group(1) + "-" + m.group(2))
                  for idx, name in enumerate(header) if (m := pattern.match(name))]
        kind = "total_<i>_<j>"
    elif component == "u":
        pattern = re.compile(r"u_(\d+)_l2$")
        picked = [(idx, "u_" + m.group(1))
                  for idx, name in enumerate(header) if (m := pattern.match(name))]
        kind = "u_<i>_l2"
    elif component == "rho":
        pattern = re.compile(r"rho_(\d+)_l2$")
        picked = [(idx, "rho_" + m.group(1))
                  for idx, name in enumerate(header) if (m := pattern.match(name))]
        kind = "rho_<i>_l2"
    elif re.fullmatch(r"z\d+", component):
        c = component[1:]
        pattern = re.compile(r"z_(\d+)_" + c + r"_l2$")
        picked = [(idx, f"z_{m.group(1)}_{c}")
                  for idx, name in enumerate(header) if (m := pattern.match(name))]
        kind = f"z_<i>_{c}_l2"
    else:
        raise SchemaError(
            f"unknown component {component!r}; expected u, z<c>, rho or pairwise"
        )
    if not picked:
        raise SchemaError(f"no columns matching {kind} in CSV header")
    return [idx for idx, _ in picked], [label for _, label in picked]


def render(spec: FigureSpec) -> RenderResult:
    """Render one figure to ``spec.out_path``; returns curve/point counts.

    ``window`` selects recorded-instant indices [start, end], both inclusive
    (identical to iteration numbers when the run recorded every step); a
    window reaching past the recorded range is an error, not a clamp.
    """
    header, data = _read_csv(spec.csv_path)
    cols, labels = _select_columns(header, spec.component)

    n_rows = data.shape[0]
    if spec.window is not None:
        start, end = spec.window
        if start < 0 or end < start:
            raise SchemaError(f"bad window {spec.window}; need 0 <= start <= end")
        if end >= n_rows:
            raise SchemaError(
                f"window end {end} beyond recorded range (last index {n_rows - 1})"
            )
        data = data[start : end + 1]

    t = data[:, 0]
    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    for k, (col, label) in enumerate(zip(cols, labels)):
        ax.plot(t, data[:, col], color=_COLORS[k % len(_COLORS)], lw=1.4, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("difference norm" if spec.component == "pairwise" else "L2 norm")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8, ncol=2)
    fig.tight_layout()
    try:
        fig.savefig(spec.out_path)
    finally:
        plt.close(fig)
    return RenderResult(
        out_path=spec.out_path,
        n_curves=len(cols),
        n_points=data.shape[0],
        labels=tuple(labels),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotviz", description="Render figures from simulation CSV output."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one component figure")
    p.add_argument("--csv", required=True, help="norms.csv or diffs.csv from a run")
    p.add_argument("--component", required=True, help="u | z<c> | rho | pairwise")
    p.add_argument("--out", required=True, help="output image path (png)")
    p.add_argument("--window", help="recorded-instant window A:B (inclusive)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    window = None
    if args.window:
        try:
            a, b = (int(x) for x in args.window.split(":"))
            window = (a, b)
        except ValueError:
            print(f"error: --window expects 'A:B', got {args.window!r}", file=sys.stderr)
            return 2
    spec = FigureSpec(
        csv_path=Path(args.csv),
        component=args.component,
        out_path=Path(args.out),
        window=window,
    )
    try:
        result = render(spec)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.out_path} ({result.n_curves} curves, {result.n_points} points)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

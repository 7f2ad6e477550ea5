"""Leaf tracing for slice foliations: RK4 integration of a unit tangent
field, with CSV, SVG and PNG writers.

CSV columns are (leaf, s, x1, x2, x3) with s the arclength parameter;
output is deterministic for fixed seeds and flags.  SVG output is static
polylines plus axes; PNG goes through matplotlib's Agg backend.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .fieldexpr import SingularPoint
from .unify import UField


@dataclass
class TraceRecord:
    leaf: int
    points: np.ndarray  # (n, 4) columns: s, x1, x2, x3
    truncated: bool = False


def rk4_trace(ufield: UField, seed_point: Sequence[float], step: float,
              nsteps: int, leaf: int = 0) -> TraceRecord:
    """Integrate dx/ds = U(x) from the seed; leaves entering a singular
    locus are truncated (flagged, not an error)."""
    x = np.asarray(seed_point, dtype=float).copy()
    rows = [np.concatenate([[0.0], x])]
    truncated = False
    s = 0.0
    for _ in range(nsteps):
        try:
            k1 = ufield(x)
            k2 = ufield(x + 0.5 * step * k1)
            k3 = ufield(x + 0.5 * step * k2)
            k4 = ufield(x + step * k3)
        except (SingularPoint, ValueError):
            truncated = True
            break
        x = x + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        s += step
        rows.append(np.concatenate([[s], x]))
    return TraceRecord(leaf=leaf, points=np.array(rows), truncated=truncated)


def trace_leaves(ufield: UField, seeds: Sequence[Sequence[float]],
                 step: float, nsteps: int) -> List[TraceRecord]:
    return [rk4_trace(ufield, seed, step, nsteps, leaf=i)
            for i, seed in enumerate(seeds)]


def closure_error(record: TraceRecord) -> float:
    """Distance between first and last point; small for closed leaves
    traced over one period."""
    return float(np.linalg.norm(record.points[-1, 1:] - record.points[0, 1:]))


def write_csv(records: Sequence[TraceRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(csv_text(records))


def csv_text(records: Sequence[TraceRecord]) -> str:
    out = io.StringIO()
    out.write("leaf,s,x1,x2,x3\n")
    for rec in records:
        for row in rec.points:
            out.write(f"{rec.leaf},{row[0]:.12g},{row[1]:.12g},{row[2]:.12g},{row[3]:.12g}\n")
    return out.getvalue()


_AXIS_COLUMN = {"x1": 1, "x2": 2, "x3": 3}


def _projected(records: Sequence[TraceRecord], axes: Tuple[str, str]):
    ix, iy = _AXIS_COLUMN[axes[0]], _AXIS_COLUMN[axes[1]]
    return [(rec.points[:, ix], rec.points[:, iy]) for rec in records]


def write_svg(records: Sequence[TraceRecord], path: str,
              axes: Tuple[str, str] = ("x2", "x3"), size: int = 600) -> None:
    """Minimal static SVG 1.1: one polyline per leaf plus coordinate axes."""
    curves = _projected(records, axes)
    xs = np.concatenate([c[0] for c in curves])
    ys = np.concatenate([c[1] for c in curves])
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    span = max(x_hi - x_lo, y_hi - y_lo, 1e-9)
    pad = 0.08 * span
    x_lo, y_lo = x_lo - pad, y_lo - pad
    span = span + 2 * pad

    def to_px(x, y):
        px = (x - x_lo) / span * size
        py = size - (y - y_lo) / span * size
        return px, py

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    # axes through the origin where visible
    ox, oy = to_px(0.0, 0.0)
    if 0 <= ox <= size:
        lines.append(f'<line x1="{ox:.2f}" y1="0" x2="{ox:.2f}" y2="{size}" '
                     'stroke="#bbbbbb" stroke-width="1"/>')
    if 0 <= oy <= size:
        lines.append(f'<line x1="0" y1="{oy:.2f}" x2="{size}" y2="{oy:.2f}" '
                     'stroke="#bbbbbb" stroke-width="1"/>')
    palette = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
    for i, (cx, cy) in enumerate(curves):
        pts = " ".join(
            "{:.3f},{:.3f}".format(*to_px(x, y)) for x, y in zip(cx, cy)
        )
        color = palette[i % len(palette)]
        lines.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     'stroke-width="1.5"/>')
    lines.append(
        f'<text x="8" y="16" font-size="12" fill="#444444">{axes[0]} / {axes[1]}</text>'
    )
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_png(records: Sequence[TraceRecord], path: str,
              axes: Tuple[str, str] = ("x2", "x3"), dpi: int = 130) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 5), dpi=dpi)
    for cx, cy in _projected(records, axes):
        ax.plot(cx, cy, linewidth=1.2)
    ax.set_xlabel(axes[0])
    ax.set_ylabel(axes[1])
    ax.set_aspect("equal")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)

"""Reliability diagrams rendered as standalone SVG.

Follows the combined diagram-plus-density layout: every bin draws an
outlined bar at the height of its right edge (the perfectly calibrated
reference), occupied bins add a filled bar at the empirical accuracy whose
opacity is the bin's share of the densest bin, and the y = x diagonal is
drawn for reference. Output is deterministic text, so renders are diffable
and testable.
"""

from __future__ import annotations

import numpy as np

from .metrics import ReliabilityDiagram, ece_from_diagram

# Plot geometry in pixel units.
_PLOT = 400.0
_LEFT = 70.0
_TOP = 50.0
_WIDTH = 540.0
_HEIGHT = 520.0


def _x(v: float) -> float:
    return _LEFT + v * _PLOT


def _y(v: float) -> float:
    return _TOP + (1.0 - v) * _PLOT


def _f(v: float) -> str:
    return f"{v:.2f}"


def reliability_svg(diagram: ReliabilityDiagram, title: str = "reliability") -> str:
    """Render the diagram to an SVG string."""
    edges = diagram.scheme.edges
    max_count = int(diagram.count.max())
    ece = ece_from_diagram(diagram)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(_WIDTH)}" height="{_f(_HEIGHT)}" '
        f'viewBox="0 0 {_f(_WIDTH)} {_f(_HEIGHT)}">',
        f'<text x="{_f(_LEFT)}" y="24" font-family="monospace" font-size="14" class="title">'
        f"{title}: ECE={ece:.4f}, n={diagram.total_count}</text>",
        f'<rect x="{_f(_LEFT)}" y="{_f(_TOP)}" width="{_f(_PLOT)}" height="{_f(_PLOT)}" '
        f'fill="none" stroke="#000000" stroke-width="1" class="frame"/>',
    ]

    for b in range(diagram.scheme.num_bins):
        left = _x(float(edges[b]))
        width = _x(float(edges[b + 1])) - left
        ideal = float(edges[b + 1])
        parts.append(
            f'<rect x="{_f(left)}" y="{_f(_y(ideal))}" width="{_f(width)}" '
            f'height="{_f(_y(0.0) - _y(ideal))}" fill="none" stroke="#888888" '
            f'stroke-width="1" class="ideal"/>'
        )
        if diagram.count[b] > 0:
            acc = float(diagram.accuracy[b])
            opacity = diagram.count[b] / max_count
            height = _y(0.0) - _y(acc)
            parts.append(
                f'<rect x="{_f(left)}" y="{_f(_y(acc))}" width="{_f(width)}" '
                f'height="{_f(height)}" fill="#3366cc" fill-opacity="{opacity:.4f}" '
                f'stroke="none" class="observed"/>'
            )

    parts.append(
        f'<line x1="{_f(_x(0.0))}" y1="{_f(_y(0.0))}" x2="{_f(_x(1.0))}" y2="{_f(_y(1.0))}" '
        f'stroke="#cc3333" stroke-width="1" stroke-dasharray="6,4" class="diagonal"/>'
    )
    for tick in (0.0, 0.5, 1.0):
        parts.append(
            f'<text x="{_f(_x(tick) - 8)}" y="{_f(_y(0.0) + 18)}" font-family="monospace" '
            f'font-size="11" class="xtick">{tick:g}</text>'
        )
        parts.append(
            f'<text x="{_f(_LEFT - 30)}" y="{_f(_y(tick) + 4)}" font-family="monospace" '
            f'font-size="11" class="ytick">{tick:g}</text>'
        )
    parts.append(
        f'<text x="{_f(_x(0.5) - 40)}" y="{_f(_y(0.0) + 40)}" font-family="monospace" '
        f'font-size="12" class="xlabel">confidence</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_reliability_svg(diagram: ReliabilityDiagram, path, title: str = "reliability") -> None:
    """Write the rendered diagram to ``path``."""
    text = reliability_svg(diagram, title=title)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as err:
        raise IOError(f"cannot write SVG to {path}: {err}") from err

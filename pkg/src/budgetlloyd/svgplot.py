"""Deployment snapshot as a standalone SVG.

Initial positions are green circles, final positions red circles, movement
paths blue lines: exactly N of each, tagged with CSS classes (initial, final,
path) so they are easy to count and style.
"""

from __future__ import annotations

import numpy as np

from .geometry import Region

_CANVAS = 640.0
_MARGIN = 20.0


def deployment_svg(region: Region, initial: np.ndarray, final: np.ndarray,
                   radii: np.ndarray | None = None) -> str:
    scale = (_CANVAS - 2 * _MARGIN) / max(region.width, region.height)
    width = region.width * scale + 2 * _MARGIN
    height = region.height * scale + 2 * _MARGIN

    def sx(x: float) -> float:
        return _MARGIN + (x - region.xmin) * scale

    def sy(y: float) -> float:
        # SVG y grows downward
        return height - _MARGIN - (y - region.ymin) * scale

    dot = max(2.5, 0.004 * _CANVAS)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect class="region" x="{sx(region.xmin):.2f}" y="{sy(region.ymax):.2f}" '
        f'width="{region.width * scale:.2f}" height="{region.height * scale:.2f}" '
        'fill="white" stroke="black"/>',
    ]
    if radii is not None:
        for (x, y), r in zip(final, radii):
            parts.append(
                f'<circle class="range" cx="{sx(x):.2f}" cy="{sy(y):.2f}" '
                f'r="{r * scale:.2f}" fill="none" stroke="#bbbbbb" stroke-width="0.5"/>'
            )
    for (x0, y0), (x1, y1) in zip(initial, final):
        parts.append(
            f'<line class="path" x1="{sx(x0):.2f}" y1="{sy(y0):.2f}" '
            f'x2="{sx(x1):.2f}" y2="{sy(y1):.2f}" stroke="blue" stroke-width="1"/>'
        )
    for x, y in initial:
        parts.append(
            f'<circle class="initial" cx="{sx(x):.2f}" cy="{sy(y):.2f}" '
            f'r="{dot:.2f}" fill="green"/>'
        )
    for x, y in final:
        parts.append(
            f'<circle class="final" cx="{sx(x):.2f}" cy="{sy(y):.2f}" '
            f'r="{dot:.2f}" fill="red"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

"""Standalone SVG scatter plot of a 2D projection, one color per label"""
import logging
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from gaitembed.errors import ArtifactWriteError


log = logging.getLogger(__name__)

PALETTE = [
    '#e6194b', '#3cb44b', '#ffe119', '#4363d8', '#f58231', '#911eb4', '#46f0f0', '#f032e6',
    '#bcf60c', '#fabebe', '#008080', '#e6beff', '#9a6324', '#b8860b', '#800000', '#aaffc3',
    '#808000', '#ffd8b1', '#000075', '#808080', '#2f4f4f', '#000000',
]

BACKGROUND = '#ffffff'
WIDTH = 640
HEIGHT = 480
MARGIN = 40
LEGEND_WIDTH = 140
POINT_RADIUS = 3


def label_colors(labels):
    """Sorted distinct labels mapped to palette colors, cycling after 22"""
    return {label: PALETTE[index % len(PALETTE)]
            for index, label in enumerate(sorted(set(labels)))}


def _scale(values, low, high):
    if len(values) == 0:
        return values
    minimum, maximum = float(values.min()), float(values.max())
    span = maximum - minimum
    if span == 0:
        return np.full(len(values), (low + high) / 2.0)
    return low + (values - minimum) / span * (high - low)


def render_scatter_svg(projection, title=None):
    """SVG document text; identical input gives identical text"""
    plot_right = WIDTH - LEGEND_WIDTH
    plot_bottom = HEIGHT - MARGIN
    xs = _scale(projection.points[:, 0], MARGIN, plot_right - MARGIN / 2)
    ys = _scale(-projection.points[:, 1], MARGIN, plot_bottom - MARGIN / 2)
    colors = label_colors(projection.labels)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="{BACKGROUND}"/>',
        f'<line class="axis" x1="{MARGIN}" y1="{plot_bottom}" x2="{plot_right}" y2="{plot_bottom}" '
        'stroke="#333333" stroke-width="1"/>',
        f'<line class="axis" x1="{MARGIN}" y1="{plot_bottom}" x2="{MARGIN}" y2="{MARGIN / 2:.0f}" '
        'stroke="#333333" stroke-width="1"/>',
        f'<text x="{(MARGIN + plot_right) / 2:.0f}" y="{HEIGHT - 10}" font-size="12" '
        'text-anchor="middle">t-SNE 1</text>',
        f'<text x="12" y="{(MARGIN + plot_bottom) / 2:.0f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 12 {(MARGIN + plot_bottom) / 2:.0f})">t-SNE 2</text>',
    ]
    if title:
        lines.append(f'<text x="{WIDTH / 2:.0f}" y="16" font-size="14" text-anchor="middle">'
                     f'{escape(title)}</text>')

    lines.append('<g class="points">')
    for x, y, label in zip(xs, ys, projection.labels):
        lines.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{POINT_RADIUS}" fill="{colors[label]}" '
                     f'stroke="#333333" stroke-width="0.3"><title>{escape(label)}</title></circle>')
    lines.append('</g>')

    lines.append('<g class="legend">')
    for row, (label, color) in enumerate(colors.items()):
        y = MARGIN + 16 * row
        lines.append(
            f'<g class="legend-entry" data-label={quoteattr(label)}>'
            f'<rect x="{plot_right + 10}" y="{y - 8}" width="10" height="10" fill="{color}" '
            'stroke="#333333" stroke-width="0.3"/>'
            f'<text x="{plot_right + 26}" y="{y + 1}" font-size="11">{escape(label)}</text></g>')
    lines.append('</g>')
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'


def emit_scatter_svg(projection, path, title=None):
    """Writes the scatter plot of projection to path"""
    document = render_scatter_svg(projection, title)
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as stream:
            stream.write(document)
    except OSError as error:
        raise ArtifactWriteError(f"cannot write SVG '{path}': {error}") from error
    log.info(f"Wrote scatter plot of {len(projection)} points to {path}")

import os
import tempfile
import unittest

import numpy as np

from gaitembed.analysis import PALETTE, Projection2D, emit_scatter_svg, render_scatter_svg
from gaitembed.analysis.plot import BACKGROUND
from gaitembed.errors import ArtifactWriteError


class TestScatterSvg(unittest.TestCase):

    def test_counts_points_and_legend(self):
        projection = Projection2D([[0.0, 0.0], [1.0, 2.0], [3.0, -1.0]], ['A', 'B', 'A'])
        document = render_scatter_svg(projection)
        assert document.count('<circle') == 3
        assert document.count('class="legend-entry"') == 2
        assert document.count('class="axis"') == 2
        assert PALETTE[0] in document and PALETTE[1] in document

    def test_identical_files(self):
        projection = Projection2D(np.random.default_rng(0).normal(size=(30, 2)), [str(i % 4) for i in range(30)])
        with tempfile.TemporaryDirectory() as directory:
            first, second = os.path.join(directory, 'a.svg'), os.path.join(directory, 'b.svg')
            emit_scatter_svg(projection, first, 'run & plot')
            emit_scatter_svg(projection, second, 'run & plot')
            with open(first, 'rb') as a, open(second, 'rb') as b:
                content = a.read()
                assert content == b.read()
        assert b'run &amp; plot' in content

    def test_empty_projection(self):
        document = render_scatter_svg(Projection2D(np.zeros((0, 2)), []))
        assert document.startswith('<?xml')
        assert document.rstrip().endswith('</svg>')
        assert '<circle' not in document
        assert document.count('class="axis"') == 2

    def test_palette_cycles(self):
        labels = [f'L{i:02d}' for i in range(len(PALETTE) + 1)]
        projection = Projection2D(np.zeros((len(labels), 2)), labels)
        document = render_scatter_svg(projection)
        assert document.count('class="legend-entry"') == len(labels)
        assert document.count(f'fill="{PALETTE[0]}"') == 4

    def test_unwritable(self):
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(ArtifactWriteError):
                emit_scatter_svg(Projection2D(np.zeros((0, 2)), []), os.path.join(directory, 'x', 'p.svg'))


def luminance(color):
    red, green, blue = (int(color[i:i + 2], 16) / 255.0 for i in (1, 3, 5))
    return 0.2126 * red + 0.7152 * green + 0.0722 * blue


class TestPalette(unittest.TestCase):

    def test_colors_distinct(self):
        assert len(set(PALETTE)) == len(PALETTE)

    def test_colors_visible_on_background(self):
        for color in PALETTE:
            assert color.lower() != BACKGROUND, color
            assert luminance(color) < 0.95, color

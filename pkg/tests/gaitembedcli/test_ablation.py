import csv
import os
import tempfile
import unittest

import yaml

from gaitembed.errors import InvalidParams
from gaitembedcli import EXIT_DATA, EXIT_OK, run
from gaitembedcli.ablation import AblationSpec, cell_name, run_ablation, summary_table
from gaitembedcli.settings import ExperimentSettings


SPEC = {
    'synth': {'subjects': 3, 'duration': 4, 'seed': 1},
    'settings': {'epochs': 1, 'seq_len': 10, 'split_ratio': 0.75, 'batch_size': 6,
                 'embedding_dim': 3, 'channel_widths': [2, 3], 'eval_every': 1},
    'grid': {'mining': ['random', 'semi-hard', 'hard']},
    'seeds': [0],
}


class TestAblation(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def write_spec(self, spec, name='spec.yaml'):
        path = os.path.join(self.directory.name, name)
        with open(path, 'w', encoding='utf-8') as stream:
            yaml.safe_dump(spec, stream)
        return path

    def read_rows(self, out_dir):
        with open(os.path.join(out_dir, 'ablation.csv'), newline='', encoding='utf-8') as stream:
            return list(csv.DictReader(stream))

    def test_three_strategies_one_seed(self):
        out_dir = os.path.join(self.directory.name, 'report')
        rows = run_ablation(self.write_spec(SPEC), out_dir, ExperimentSettings())
        assert [row['cell'] for row in rows] == [
            '000_mining-random', '001_mining-semi-hard', '002_mining-hard', 'raw']
        written = self.read_rows(out_dir)
        assert len(written) == 4
        assert all(row['status'] == 'ok' for row in written)
        with open(os.path.join(out_dir, 'ablation.md'), encoding='utf-8') as stream:
            assert stream.read().count('\n') == 2 + 4

    def test_repeated_spec_identical_csv(self):
        spec = self.write_spec(dict(SPEC, grid={'mining': ['hard']}, raw_baseline=False))
        first, second = (os.path.join(self.directory.name, name) for name in ('a', 'b'))
        run_ablation(spec, first, ExperimentSettings())
        run_ablation(spec, second, ExperimentSettings())
        with open(os.path.join(first, 'ablation.csv'), 'rb') as a, \
                open(os.path.join(second, 'ablation.csv'), 'rb') as b:
            assert a.read() == b.read()

    def test_failed_cell_reported(self):
        spec = self.write_spec(dict(SPEC, grid={'margin': [0.2, -1.0]}, raw_baseline=False))
        out_dir = os.path.join(self.directory.name, 'report')
        rows = run_ablation(spec, out_dir, ExperimentSettings())
        assert [row['status'] for row in rows] == ['ok', 'failed']
        assert 'InvalidParams' in rows[1]['error']

    def test_unknown_grid_setting(self):
        spec = self.write_spec(dict(SPEC, grid={'dropout': [0.1]}))
        with self.assertRaises(InvalidParams):
            run_ablation(spec, os.path.join(self.directory.name, 'x'), ExperimentSettings())

    def test_spec_needs_one_data_source(self):
        with self.assertRaises(InvalidParams):
            AblationSpec({'mining': ['hard']}, [0])
        with self.assertRaises(InvalidParams):
            AblationSpec({'mining': ['hard']}, [0], data='a.jsonl', synth={'subjects': 2})

    def test_relative_data_path(self):
        path = self.write_spec({'data': 'capture.jsonl', 'grid': {'mining': ['hard']}})
        spec = AblationSpec.from_file(path)
        assert spec.data == os.path.join(self.directory.name, 'capture.jsonl')
        assert spec.seeds == [0]

    def test_cells_product(self):
        spec = AblationSpec({'mining': ['hard', 'random'], 'margin': [0.1, 0.2]}, [0], synth={})
        assert len(spec.cells()) == 4
        assert cell_name(3, spec.cells()[3]) == '003_mining-random_margin-0.2'

    def test_summary_table(self):
        rows = [
            {'cell': 'c1', 'mining': 'hard', 'seed': 0, 'ari': 0.5, 'status': 'ok'},
            {'cell': 'c1', 'mining': 'hard', 'seed': 1, 'ari': 0.7, 'status': 'ok'},
            {'cell': 'c2', 'mining': 'random', 'seed': 0, 'ari': None, 'status': 'failed'},
        ]
        lines = summary_table(rows, ['mining']).splitlines()
        assert lines[2] == '| hard | 2 | 0.600 | 0.600 | 0 |'
        assert lines[3] == '| random | 1 | n/a | n/a | 1 |'

    def test_command_line(self):
        spec = self.write_spec(dict(SPEC, grid={'mining': ['semi-hard']}))
        out_dir = os.path.join(self.directory.name, 'cli')
        assert run(['ablate', '--spec', spec, '--out', out_dir]) == EXIT_OK
        assert len(self.read_rows(out_dir)) == 2

    def test_command_line_bad_spec(self):
        spec = self.write_spec(['not', 'a', 'mapping'])
        assert run(['ablate', '--spec', spec, '--out', self.directory.name]) == EXIT_DATA

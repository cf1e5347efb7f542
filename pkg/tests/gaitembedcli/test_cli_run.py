import contextlib
import io
import json
import os
import shutil
import tempfile
import unittest

import yaml

from gaitembed.analysis import cluster_and_score
from gaitembed.dataset import build_dataset, read_capture_file
from gaitembed.embedder import embed_batch
from gaitembed.trainer import load_checkpoint
from gaitembedcli import EXIT_DATA, EXIT_IO, EXIT_OK, EXIT_USAGE, run
from utils.common import derive_seeds


TINY_SETTINGS = {
    'seq_len': 10,
    'split_ratio': 0.75,
    'batch_size': 6,
    'embedding_dim': 3,
    'channel_widths': [2, 3],
    'epochs': 2,
    'eval_every': 1,
    'tsne_iters': 50,
}


def invoke(*argv):
    """Runs the command line; returns (exit code, stdout, stderr)"""
    stdout, stderr = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
        code = run([str(arg) for arg in argv])
    return code, stdout.getvalue(), stderr.getvalue()


def result_value(stdout, name):
    for line in stdout.splitlines():
        key, _, value = line.partition('=')
        if key == name:
            return float(value)
    raise AssertionError(f"{name} not printed: {stdout!r}")


class TestCommandLine(unittest.TestCase):
    """Runs every subcommand on a tiny synthetic data set"""

    @classmethod
    def setUpClass(cls):
        cls.directory = tempfile.mkdtemp()
        cls.data = cls.path('data.jsonl')
        cls.config = cls.path('tiny.yaml')
        with open(cls.config, 'w', encoding='utf-8') as stream:
            yaml.safe_dump(TINY_SETTINGS, stream)
        code, _, _ = invoke('synth', '--subjects', 3, '--duration', 4, '--seed', 7, '--out', cls.data)
        assert code == EXIT_OK
        cls.run_dir = cls.path('run1')
        cls.train_result = invoke('train', '--data', cls.data, '--config', cls.config, '--seed', 5,
                                  '--out', cls.run_dir)

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.directory)

    @classmethod
    def path(cls, name):
        return os.path.join(cls.directory, name)

    def test_synth_deterministic(self):
        other = self.path('again.jsonl')
        code, _, _ = invoke('synth', '--subjects', 3, '--duration', 4, '--seed', 7, '--out', other)
        assert code == EXIT_OK
        with open(self.data, 'rb') as first, open(other, 'rb') as second:
            assert first.read() == second.read()
        assert [track.subject_label for track in read_capture_file(other)] == ['S01', 'S02', 'S03']

    def test_train_artifacts(self):
        code, stdout, _ = self.train_result
        assert code == EXIT_OK
        for name in ('manifest.json', 'final.ckpt', 'history.csv', 'timings.csv', 'settings.json',
                     'embeddings.csv', 'tsne.svg'):
            assert os.path.exists(os.path.join(self.run_dir, name)), name
        assert -1.0 <= result_value(stdout, 'ari') <= 1.0
        assert -1.0 <= result_value(stdout, 'raw_ari') <= 1.0
        with open(os.path.join(self.run_dir, 'history.csv'), encoding='utf-8') as stream:
            assert len(stream.read().splitlines()) == 1 + TINY_SETTINGS['epochs']

    def test_manifest_replay_reproduces_artifacts(self):
        replay_dir = self.path('replay')
        code, stdout, _ = invoke('train', '--manifest', os.path.join(self.run_dir, 'manifest.json'),
                                 '--out', replay_dir)
        assert code == EXIT_OK
        assert stdout == self.train_result[1]
        with open(os.path.join(self.run_dir, 'manifest.json'), encoding='utf-8') as stream:
            listed = json.load(stream)['artifacts']
        assert 'timings.csv' not in listed
        for name in ['manifest.json'] + listed:
            with open(os.path.join(self.run_dir, name), 'rb') as first, \
                    open(os.path.join(replay_dir, name), 'rb') as second:
                assert first.read() == second.read(), name

    def test_settings_snapshot_reproduces_checkpoint(self):
        snapshot = os.path.join(self.run_dir, 'settings.json')
        with open(snapshot, encoding='utf-8') as stream:
            saved = json.load(stream)
        assert saved['seed'] == 5
        assert saved['channel_widths'] == TINY_SETTINGS['channel_widths']
        rerun_dir = self.path('from-snapshot')
        code, _, _ = invoke('train', '--data', self.data, '--config', snapshot, '--out', rerun_dir)
        assert code == EXIT_OK
        with open(os.path.join(self.run_dir, 'final.ckpt'), 'rb') as first, \
                open(os.path.join(rerun_dir, 'final.ckpt'), 'rb') as second:
            assert first.read() == second.read()

    def test_damaged_checkpoint_is_data_error(self):
        with open(os.path.join(self.run_dir, 'final.ckpt'), 'rb') as stream:
            blob = bytearray(stream.read())
        header_end = 16 + int.from_bytes(blob[8:16], 'little')
        header = blob[16:header_end].replace(b'"offset":0', b'"offset":9', 1)
        assert len(header) == header_end - 16
        damaged = self.path('damaged.ckpt')
        with open(damaged, 'wb') as stream:
            stream.write(bytes(blob[:16] + header + blob[header_end:]))
        code, _, stderr = invoke('evaluate', '--checkpoint', damaged, '--data', self.data)
        assert code == EXIT_DATA
        assert 'CorruptPayload' in stderr

    def test_evaluate_matches_library(self):
        checkpoint = os.path.join(self.run_dir, 'final.ckpt')
        code, stdout, _ = invoke('evaluate', '--checkpoint', checkpoint, '--data', self.data,
                                 '--split-ratio', 0.75, '--k', 3, '--baseline')
        assert code == EXIT_OK
        params, _ = load_checkpoint(checkpoint)
        split = build_dataset(read_capture_file(self.data), seq_len=10, ratio=0.75, seed=5)
        batch = embed_batch(params, split.validation)
        _, expected = cluster_and_score(batch.matrix, batch.labels, 3, derive_seeds(5, 4)[3])
        self.assertAlmostEqual(result_value(stdout, 'ari'), expected, places=8)
        assert 'raw_ari=' in stdout

    def test_embed_cluster_tsne_plot(self):
        embeddings = self.path('embeddings.csv')
        projection = self.path('projection.csv')
        svg = self.path('plot.svg')
        checkpoint = os.path.join(self.run_dir, 'final.ckpt')
        assert invoke('embed', '--checkpoint', checkpoint, '--data', self.data, '--split-ratio', 0.75,
                      '--subset', 'all', '--out', embeddings)[0] == EXIT_OK
        code, stdout, _ = invoke('cluster', '--embeddings', embeddings, '--out', self.path('clusters.csv'))
        assert code == EXIT_OK
        assert stdout.startswith('ari=')
        assert invoke('tsne', '--embeddings', embeddings, '--perplexity', 5, '--tsne-iters', 50,
                      '--out', projection)[0] == EXIT_OK
        assert invoke('plot', '--projection', projection, '--title', 'tiny', '--out', svg)[0] == EXIT_OK
        with open(svg, encoding='utf-8') as stream:
            # 3 subjects x 12 windows
            assert stream.read().count('<circle') == 36

    def test_no_command(self):
        code, _, stderr = invoke()
        assert code == EXIT_USAGE
        assert 'usage:' in stderr

    def test_unknown_flag(self):
        code, _, stderr = invoke('train', '--data', self.data, '--out', self.path('x'), '--bogus')
        assert code == EXIT_USAGE
        assert 'gaitembed train' in stderr

    def test_help(self):
        code, stdout, _ = invoke('evaluate', '--help')
        assert code == EXIT_OK
        assert '--checkpoint' in stdout

    def test_missing_data(self):
        code, _, stderr = invoke('train', '--out', self.path('nodata'))
        assert code == EXIT_USAGE
        assert '--data' in stderr

    def test_malformed_capture(self):
        bad = self.path('bad.jsonl')
        with open(bad, 'w', encoding='utf-8') as stream:
            stream.write('{"t": 0, "subject": "A", "joints": [], "valid": []}\n')
        code, _, _ = invoke('train', '--data', bad, '--out', self.path('bad-run'))
        assert code == EXIT_DATA

    def test_invalid_k(self):
        embeddings = self.path('k-embeddings.csv')
        checkpoint = os.path.join(self.run_dir, 'final.ckpt')
        invoke('embed', '--checkpoint', checkpoint, '--data', self.data, '--split-ratio', 0.75, '--out', embeddings)
        assert invoke('cluster', '--embeddings', embeddings, '--k', 1000)[0] == EXIT_DATA

    def test_missing_checkpoint(self):
        code, _, _ = invoke('evaluate', '--checkpoint', self.path('none.ckpt'), '--data', self.data)
        assert code == EXIT_IO

    def test_unwritable_run_directory(self):
        blocker = self.path('blocker')
        with open(blocker, 'w', encoding='utf-8') as stream:
            stream.write('file, not a directory')
        code, _, _ = invoke('train', '--data', self.data, '--config', self.config,
                            '--out', os.path.join(blocker, 'run'))
        assert code == EXIT_IO

import unittest

import numpy as np

from gaitembed.dataset.sequences import GaitSequence
from gaitembed.embedder import (
    EmbedderConfig,
    EmbedderParams,
    embed_batch,
    init_embedder,
    stack_sequences,
)
from gaitembed.errors import InvalidParams, ShapeMismatch
from gaitembed.skeleton import JOINT_COUNT


SMALL = EmbedderConfig(channel_widths=(4, 6), blocks_per_stage=1, embedding_dim=5, seq_len=8)


def random_sequences(count, seq_len=8, seed=0):
    rng = np.random.default_rng(seed)
    return [GaitSequence(rng.normal(size=(JOINT_COUNT, seq_len, 3)), f"L{index % 2}", (0, index))
            for index in range(count)]


class TestEmbedderConfig(unittest.TestCase):

    def test_default_layout(self):
        config = EmbedderConfig()
        shapes = config.tensor_shapes()
        assert shapes['stem.weight'] == (16, 3, 3, 3)
        assert shapes['head.weight'] == (32, 64)
        assert 'stage1.block1.shortcut.weight' not in shapes
        assert shapes['stage2.block1.shortcut.weight'] == (32, 16, 1, 1)
        assert config.input_shape == (3, JOINT_COUNT, 30)

    def test_dict_round_trip(self):
        assert EmbedderConfig.from_dict(SMALL.to_dict()) == SMALL

    def test_invalid_values(self):
        with self.assertRaises(InvalidParams):
            EmbedderConfig(embedding_dim=1)
        with self.assertRaises(InvalidParams):
            EmbedderConfig(channel_widths=())
        with self.assertRaises(InvalidParams):
            EmbedderConfig(dtype='float16')


class TestInitEmbedder(unittest.TestCase):

    def test_same_seed_identical(self):
        first, second = init_embedder(SMALL, 3), init_embedder(SMALL, 3)
        for name in first.tensors:
            np.testing.assert_array_equal(first.tensors[name], second.tensors[name])

    def test_biases_zero(self):
        params = init_embedder(SMALL, 3)
        for name, value in params.tensors.items():
            if name.endswith('.bias'):
                assert not value.any()
            assert value.dtype == np.float32

    def test_wrong_tensor_shape(self):
        tensors = init_embedder(SMALL, 0).tensors
        tensors['head.bias'] = np.zeros(7)
        with self.assertRaises(ShapeMismatch):
            EmbedderParams(SMALL, tensors)

    def test_astype(self):
        params = init_embedder(SMALL, 0).astype(np.float64)
        assert params.config.dtype == 'float64'
        assert params.tensors['stem.weight'].dtype == np.float64


class TestEmbedBatch(unittest.TestCase):

    def test_unit_norm_rows(self):
        batch = embed_batch(init_embedder(SMALL, 1), random_sequences(5))
        assert batch.matrix.shape == (5, 5)
        np.testing.assert_allclose(np.linalg.norm(batch.matrix, axis=1), np.ones(5), atol=1e-5)
        assert batch.labels == ['L0', 'L1', 'L0', 'L1', 'L0']
        assert batch.sequence_ids == ['0:0', '0:1', '0:2', '0:3', '0:4']

    def test_duplicate_sequence_identical_rows(self):
        sequences = random_sequences(3)
        batch = embed_batch(init_embedder(SMALL, 1), sequences + [sequences[1]])
        np.testing.assert_allclose(batch.matrix[1], batch.matrix[3], rtol=0, atol=1e-6)

    def test_batch_matches_row_by_row(self):
        params = init_embedder(SMALL, 2)
        sequences = random_sequences(6, seed=4)
        whole = embed_batch(params, sequences).matrix
        rows = np.concatenate([embed_batch(params, [sequence]).matrix for sequence in sequences])
        np.testing.assert_allclose(whole, rows, rtol=0, atol=1e-6)
        chunked = embed_batch(params, sequences, chunk_size=4).matrix
        np.testing.assert_allclose(whole, chunked, rtol=0, atol=1e-6)

    def test_wrong_sequence_length(self):
        with self.assertRaises(ShapeMismatch):
            stack_sequences(random_sequences(2, seq_len=7), 8)

    def test_empty_batch(self):
        batch = embed_batch(init_embedder(SMALL, 1), [])
        assert batch.matrix.shape == (0, 5)

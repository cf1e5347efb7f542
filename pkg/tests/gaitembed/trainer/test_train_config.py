import unittest

from gaitembed.errors import InvalidParams
from gaitembed.trainer import TrainConfig, resolve_pk
from gaitembed.triplet import MiningKind


class TestResolvePk(unittest.TestCase):

    def test_default_batch(self):
        assert resolve_pk(64, 8) == (8, 8)

    def test_more_labels_than_fit(self):
        assert resolve_pk(64, 20) == (16, 4)

    def test_small_batch(self):
        assert resolve_pk(6, 3) == (3, 2)
        assert resolve_pk(4, 2) == (2, 2)

    def test_unsplittable_batch(self):
        with self.assertRaises(InvalidParams):
            resolve_pk(7, 8)

    def test_too_few_labels(self):
        with self.assertRaises(InvalidParams):
            resolve_pk(64, 1)

    def test_batch_too_small(self):
        with self.assertRaises(InvalidParams):
            resolve_pk(3, 3)


class TestTrainConfig(unittest.TestCase):

    def test_defaults(self):
        config = TrainConfig()
        assert config.batch_size == 64
        assert config.mining_strategy().kind is MiningKind.SemiHard
        assert config.embedder_config().embedding_dim == 32

    def test_dict_round_trip(self):
        config = TrainConfig(labels_per_batch=2, sequences_per_label=3, mining='hard', epochs=5)
        assert TrainConfig.from_dict(config.to_dict()).to_dict() == config.to_dict()
        assert config.to_dict()['mining'] == 'hard'

    def test_invalid_values(self):
        with self.assertRaises(InvalidParams):
            TrainConfig(sequences_per_label=1)
        with self.assertRaises(InvalidParams):
            TrainConfig(learning_rate=0)
        with self.assertRaises(InvalidParams):
            TrainConfig(mining='hardest')
        with self.assertRaises(InvalidParams):
            TrainConfig(margin=0)

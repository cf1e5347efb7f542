"""Training hyperparameters"""
from gaitembed.embedder import EmbedderConfig
from gaitembed.errors import InvalidParams
from gaitembed.triplet import MiningKind, MiningStrategy


def resolve_pk(batch_size, label_count):
    """Splits a batch size into P labels x K sequences, using as many labels as possible

    P starts at min(label_count, batch_size // 2) and decreases until it divides the batch
    size; 64 with 8 labels gives P=8, K=8.
    """
    if batch_size < 4:
        raise InvalidParams(f"batch size must be at least 4, got {batch_size}")
    if label_count < 2:
        raise InvalidParams("at least two labels are needed for triplet training")
    labels_per_batch = min(label_count, batch_size // 2)
    while batch_size % labels_per_batch:
        labels_per_batch -= 1
    if labels_per_batch < 2:
        raise InvalidParams(f"batch size {batch_size} cannot be split into P >= 2 labels")
    return labels_per_batch, batch_size // labels_per_batch


class TrainConfig:  # pylint: disable=too-many-instance-attributes
    """All settings of one training run; defaults reproduce the reference setup"""

    def __init__(self, labels_per_batch=8, sequences_per_label=8, epochs=300, learning_rate=1e-4,
                 margin=0.2, mining='semi-hard', mining_sample_one=False, seed=0, seq_len=30,
                 embedding_dim=32, channel_widths=(16, 32, 64), blocks_per_stage=1,
                 checkpoint_every=0, eval_every=10):
        self.labels_per_batch = int(labels_per_batch)
        self.sequences_per_label = int(sequences_per_label)
        self.epochs = int(epochs)
        self.learning_rate = float(learning_rate)
        self.margin = float(margin)
        self.mining = MiningKind.parse(mining).value
        self.mining_sample_one = bool(mining_sample_one)
        self.seed = int(seed)
        self.seq_len = int(seq_len)
        self.embedding_dim = int(embedding_dim)
        self.channel_widths = [int(width) for width in channel_widths]
        self.blocks_per_stage = int(blocks_per_stage)
        self.checkpoint_every = int(checkpoint_every)
        self.eval_every = int(eval_every)
        self.validate()

    @property
    def batch_size(self):
        """N = P * K"""
        return self.labels_per_batch * self.sequences_per_label

    def validate(self):
        """Raises InvalidParams when the settings are inconsistent"""
        if self.labels_per_batch < 2 or self.sequences_per_label < 2:
            raise InvalidParams("PK sampling needs P >= 2 and K >= 2")
        if self.learning_rate <= 0:
            raise InvalidParams(f"learning rate must be positive, got {self.learning_rate}")
        if self.epochs < 0:
            raise InvalidParams(f"epochs must be non-negative, got {self.epochs}")
        if self.checkpoint_every < 0 or self.eval_every < 0:
            raise InvalidParams("checkpoint and evaluation intervals must be non-negative")
        self.mining_strategy()
        self.embedder_config()
        return self

    def mining_strategy(self):
        """MiningStrategy described by these settings"""
        return MiningStrategy(self.mining, self.margin, self.mining_sample_one)

    def embedder_config(self):
        """EmbedderConfig described by these settings"""
        return EmbedderConfig(self.channel_widths, self.blocks_per_stage, self.embedding_dim,
                              self.seq_len)

    def to_dict(self):
        """Plain mapping for manifests and checkpoint headers"""
        return dict(vars(self), channel_widths=list(self.channel_widths))

    @classmethod
    def from_dict(cls, values):
        """Inverse of to_dict"""
        return cls(**values)

    def __repr__(self):
        return (f"TrainConfig<N={self.batch_size} (P={self.labels_per_batch}, "
                f"K={self.sequences_per_label}), epochs={self.epochs}, mining={self.mining}>")

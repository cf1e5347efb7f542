"""Compact residual CNN mapping a (J, T, 3) gait tensor to an L2-normalized embedding

Layout: stem 3x3 conv + relu, one stage per channel width (first stage stride 1, later stages
stride 2), each stage made of residual blocks of two 3x3 convs, global average pooling, a linear
projection to D dimensions and L2 normalization. Coordinates (x, y, z) are the 3 input channels.
"""
import collections
import logging

import numpy as np

from gaitembed.autodiff import Graph, add, conv2d, global_avg_pool, l2_normalize, linear, relu
from gaitembed.errors import InvalidParams, ShapeMismatch
from gaitembed.skeleton import JOINT_COUNT


log = logging.getLogger(__name__)

BlockSpec = collections.namedtuple(
    'BlockSpec', ['prefix', 'in_channels', 'out_channels', 'stride', 'has_shortcut'])


class EmbedderConfig:
    """Architecture of the embedder"""

    def __init__(self, channel_widths=(16, 32, 64), blocks_per_stage=1, embedding_dim=32,
                 seq_len=30, dtype='float32'):
        self.channel_widths = [int(width) for width in channel_widths]
        self.blocks_per_stage = int(blocks_per_stage)
        self.embedding_dim = int(embedding_dim)
        self.seq_len = int(seq_len)
        self.dtype = str(dtype)
        self.validate()

    @property
    def feature_dim(self):
        """Length of the pooled feature vector (last stage width)"""
        return self.channel_widths[-1]

    @property
    def input_shape(self):
        """Channel-first network input (3, J, T)"""
        return (3, JOINT_COUNT, self.seq_len)

    def validate(self):
        """Raises InvalidParams when the architecture is inconsistent"""
        if self.embedding_dim < 2:
            raise InvalidParams(f"embedding dimension must be at least 2, got {self.embedding_dim}")
        if not self.channel_widths or min(self.channel_widths) < 1:
            raise InvalidParams("channel widths must be a non-empty list of positive integers")
        if self.blocks_per_stage < 1:
            raise InvalidParams("at least one residual block per stage is required")
        if self.seq_len < 2:
            raise InvalidParams(f"sequence length must be at least 2, got {self.seq_len}")
        if self.dtype not in ('float32', 'float64'):
            raise InvalidParams(f"dtype must be float32 or float64, got {self.dtype}")
        return self

    def blocks(self):
        """Residual block layout in evaluation order"""
        specs = []
        in_channels = self.channel_widths[0]
        for stage, width in enumerate(self.channel_widths):
            for block in range(self.blocks_per_stage):
                stride = 2 if stage > 0 and block == 0 else 1
                specs.append(BlockSpec(
                    f'stage{stage + 1}.block{block + 1}', in_channels, width, stride,
                    stride != 1 or in_channels != width))
                in_channels = width
        return specs

    def tensor_shapes(self):
        """Ordered mapping of every learnable tensor name to its shape"""
        shapes = collections.OrderedDict()
        shapes['stem.weight'] = (self.channel_widths[0], 3, 3, 3)
        shapes['stem.bias'] = (self.channel_widths[0],)
        for spec in self.blocks():
            shapes[f'{spec.prefix}.conv1.weight'] = (spec.out_channels, spec.in_channels, 3, 3)
            shapes[f'{spec.prefix}.conv1.bias'] = (spec.out_channels,)
            shapes[f'{spec.prefix}.conv2.weight'] = (spec.out_channels, spec.out_channels, 3, 3)
            shapes[f'{spec.prefix}.conv2.bias'] = (spec.out_channels,)
            if spec.has_shortcut:
                shapes[f'{spec.prefix}.shortcut.weight'] = (spec.out_channels, spec.in_channels, 1, 1)
                shapes[f'{spec.prefix}.shortcut.bias'] = (spec.out_channels,)
        shapes['head.weight'] = (self.embedding_dim, self.feature_dim)
        shapes['head.bias'] = (self.embedding_dim,)
        return shapes

    def to_dict(self):
        """Plain mapping for checkpoint headers and manifests"""
        return {
            'channel_widths': list(self.channel_widths),
            'blocks_per_stage': self.blocks_per_stage,
            'embedding_dim': self.embedding_dim,
            'seq_len': self.seq_len,
            'dtype': self.dtype,
        }

    @classmethod
    def from_dict(cls, values):
        """Inverse of to_dict"""
        return cls(**values)

    def __eq__(self, other):
        return isinstance(other, EmbedderConfig) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"EmbedderConfig<{self.to_dict()}>"


class EmbedderParams:
    """Named learnable tensors plus the architecture they belong to"""

    def __init__(self, config, tensors):
        self.config = config
        self.tensors = collections.OrderedDict(tensors)
        expected = config.tensor_shapes()
        if list(self.tensors) != list(expected):
            raise InvalidParams("tensor names do not match the embedder configuration")
        for name, shape in expected.items():
            if self.tensors[name].shape != shape:
                raise ShapeMismatch(f"parameter '{name}'", shape, self.tensors[name].shape)

    def astype(self, dtype):
        """Copy of the parameters in another floating point precision"""
        config = EmbedderConfig.from_dict(dict(self.config.to_dict(), dtype=np.dtype(dtype).name))
        return EmbedderParams(config, [(name, value.astype(dtype)) for name, value in self.tensors.items()])

    def count(self):
        """Total number of scalar parameters"""
        return int(sum(value.size for value in self.tensors.values()))

    def __repr__(self):
        return f"EmbedderParams<{self.count()} values, {self.config}>"


class EmbeddingBatch:  # pylint: disable=too-few-public-methods
    """(N, D) matrix of unit-norm embedding rows with their labels and sequence ids"""

    def __init__(self, matrix, labels, sequence_ids=None):
        self.matrix = matrix
        self.labels = list(labels)
        self.sequence_ids = list(sequence_ids) if sequence_ids is not None else \
            [str(index) for index in range(len(self.labels))]

    def __len__(self):
        return len(self.labels)


def init_embedder(config, seed):
    """Zero-mean normal weights with variance 2/fan_in, zero biases; deterministic given seed"""
    rng = np.random.default_rng(seed)
    tensors = collections.OrderedDict()
    for name, shape in config.tensor_shapes().items():
        if name.endswith('.bias'):
            tensors[name] = np.zeros(shape, dtype=config.dtype)
            continue
        fan_in = int(np.prod(shape[1:]))
        tensors[name] = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=shape).astype(config.dtype)
    params = EmbedderParams(config, tensors)
    log.debug(f"Initialized {params}")
    return params


def build_forward(graph, params, inputs):
    """Records the embedder on graph for a (N, J, T, 3) input array; returns the (N, D) output"""
    config = params.config
    expected = (JOINT_COUNT, config.seq_len, 3)
    if inputs.ndim != 4 or inputs.shape[1:] != expected:
        raise ShapeMismatch('embedder input', ('N',) + expected, inputs.shape)

    x = graph.input('sequences', np.ascontiguousarray(inputs.transpose(0, 3, 1, 2), dtype=config.dtype))
    leaves = {name: graph.parameter(name, value) for name, value in params.tensors.items()}

    hidden = relu(conv2d(x, leaves['stem.weight'], leaves['stem.bias'], stride=1, padding=1))
    for spec in config.blocks():
        branch = relu(conv2d(hidden, leaves[f'{spec.prefix}.conv1.weight'],
                             leaves[f'{spec.prefix}.conv1.bias'], stride=spec.stride, padding=1))
        branch = conv2d(branch, leaves[f'{spec.prefix}.conv2.weight'],
                        leaves[f'{spec.prefix}.conv2.bias'], stride=1, padding=1)
        shortcut = hidden
        if spec.has_shortcut:
            shortcut = conv2d(hidden, leaves[f'{spec.prefix}.shortcut.weight'],
                              leaves[f'{spec.prefix}.shortcut.bias'], stride=spec.stride, padding=0)
        hidden = relu(add(branch, shortcut))

    features = global_avg_pool(hidden)
    return l2_normalize(linear(features, leaves['head.weight'], leaves['head.bias']))


def stack_sequences(sequences, seq_len):
    """(N, J, T, 3) array from a list of GaitSequence, checking every shape"""
    expected = (JOINT_COUNT, seq_len, 3)
    for sequence in sequences:
        if sequence.tensor.shape != expected:
            raise ShapeMismatch(f"sequence {sequence.source_span}", expected, sequence.tensor.shape)
    if not sequences:
        return np.zeros((0,) + expected)
    return np.stack([sequence.tensor for sequence in sequences])


def embed_batch(params, sequences, chunk_size=256):
    """Embeds N sequences into an EmbeddingBatch; rows are independent of batch composition"""
    inputs = stack_sequences(sequences, params.config.seq_len)
    chunks = []
    for start in range(0, len(sequences), chunk_size):
        graph = Graph()
        chunks.append(build_forward(graph, params, inputs[start:start + chunk_size]).data)
    matrix = np.concatenate(chunks) if chunks else np.zeros((0, params.config.embedding_dim))
    return EmbeddingBatch(
        matrix,
        [sequence.label for sequence in sequences],
        [sequence.sequence_id for sequence in sequences],
    )

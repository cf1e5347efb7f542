"""Versioned binary checkpoint of embedder parameters and Adam state

Layout: b"GAIT", u32 LE version, u64 LE header length, UTF-8 JSON header, then little-endian
float32 tensor payloads concatenated in header order. The header holds the embedder config,
optional training config, the Adam step counter and the tensor table: a list of {name, shape,
offset} in payload order.
Adam moments are stored as ordinary tensors named adam.m.<name> and adam.v.<name>.
"""
import collections
import json
import logging
import struct

import numpy as np

from gaitembed.embedder import EmbedderConfig, EmbedderParams
from gaitembed.errors import CheckpointIoError, CorruptPayload, FormatError
from gaitembed.trainer.optimizer import AdamState


log = logging.getLogger(__name__)

MAGIC = b'GAIT'
VERSION = 1
PAYLOAD_DTYPE = np.dtype('<f4')
_PREAMBLE = struct.Struct('<4sIQ')

FIRST_MOMENT_PREFIX = 'adam.m.'
SECOND_MOMENT_PREFIX = 'adam.v.'


def _collect_tensors(params, state):
    tensors = collections.OrderedDict(params.tensors)
    if state is not None:
        for name, value in state.first_moments.items():
            tensors[FIRST_MOMENT_PREFIX + name] = value
        for name, value in state.second_moments.items():
            tensors[SECOND_MOMENT_PREFIX + name] = value
    return tensors


def encode_checkpoint(params, state=None, train_config=None):
    """Checkpoint file contents as bytes"""
    tensors = _collect_tensors(params, state)
    entries = []
    payload = []
    offset = 0
    for name, value in tensors.items():
        data = np.ascontiguousarray(value, dtype=PAYLOAD_DTYPE).tobytes()
        entries.append({'name': name, 'shape': list(value.shape), 'offset': offset})
        payload.append(data)
        offset += len(data)

    header = {
        'config': dict(params.config.to_dict(), dtype='float32'),
        'train_config': train_config.to_dict() if train_config is not None else None,
        'adam_step': state.step if state is not None else None,
        'tensors': entries,
        'payload_bytes': offset,
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(',', ':')).encode('utf-8')
    return _PREAMBLE.pack(MAGIC, VERSION, len(header_bytes)) + header_bytes + b''.join(payload)


def decode_checkpoint(blob):
    """Inverse of encode_checkpoint; returns (EmbedderParams, AdamState or None, header dict)"""
    if len(blob) < len(MAGIC) or blob[:len(MAGIC)] != MAGIC:
        raise FormatError("not a gait embedder checkpoint (bad magic bytes)")
    if len(blob) < _PREAMBLE.size:
        raise CorruptPayload("checkpoint truncated inside the preamble")
    _, version, header_length = _PREAMBLE.unpack_from(blob)
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}, expected {VERSION}")
    header_end = _PREAMBLE.size + header_length
    if len(blob) < header_end:
        raise CorruptPayload("checkpoint truncated inside the header")
    try:
        header = json.loads(blob[_PREAMBLE.size:header_end].decode('utf-8'))
        config = EmbedderConfig.from_dict(header['config'])
        entries = header['tensors']
    except (ValueError, KeyError, TypeError) as error:
        raise FormatError(f"unreadable checkpoint header: {error}") from error

    payload = memoryview(blob)[header_end:]
    layout = []
    offset = 0
    try:
        for entry in entries:
            name = str(entry['name'])
            shape = tuple(int(extent) for extent in entry['shape'])
            count = int(np.prod(shape, dtype=np.int64))
            if min(shape, default=1) < 0 or int(entry['offset']) != offset:
                raise CorruptPayload(f"tensor '{name}' is not laid out contiguously in the payload")
            layout.append((name, shape, count, offset))
            offset += count * PAYLOAD_DTYPE.itemsize
    except (KeyError, TypeError, ValueError, AttributeError) as error:
        raise FormatError(f"unreadable tensor table in checkpoint header: {error}") from error
    if len(payload) != offset:
        raise CorruptPayload(f"payload holds {len(payload)} bytes, header declares {offset}")

    tensors = collections.OrderedDict(
        (name, np.frombuffer(payload, dtype=PAYLOAD_DTYPE, count=count, offset=start)
         .astype(np.float32).reshape(shape))
        for name, shape, count, start in layout)

    params = EmbedderParams(config, [(name, value) for name, value in tensors.items()
                                     if not name.startswith('adam.')])
    state = None
    if header.get('adam_step') is not None:
        state = AdamState(
            [(name[len(FIRST_MOMENT_PREFIX):], value) for name, value in tensors.items()
             if name.startswith(FIRST_MOMENT_PREFIX)],
            [(name[len(SECOND_MOMENT_PREFIX):], value) for name, value in tensors.items()
             if name.startswith(SECOND_MOMENT_PREFIX)],
            header['adam_step'],
        )
    return params, state, header


def save_checkpoint(params, state, path, train_config=None):
    """Writes a checkpoint file; raises CheckpointIoError when path is not writable"""
    blob = encode_checkpoint(params, state, train_config)
    try:
        with open(path, 'wb') as stream:
            stream.write(blob)
    except OSError as error:
        raise CheckpointIoError(f"cannot write checkpoint '{path}': {error}") from error
    log.info(f"Saved checkpoint {path} ({len(blob)} bytes)")


def load_checkpoint(path):
    """Reads a checkpoint file; returns (EmbedderParams, AdamState or None)"""
    params, state, _ = load_checkpoint_with_header(path)
    return params, state


def load_checkpoint_with_header(path):
    """Like load_checkpoint but also returns the decoded JSON header"""
    try:
        with open(path, 'rb') as stream:
            blob = stream.read()
    except OSError as error:
        raise CheckpointIoError(f"cannot read checkpoint '{path}': {error}") from error
    log.debug(f"Loading checkpoint {path}")
    return decode_checkpoint(blob)

"""CSV exchange of embeddings, projections and per-run results (UTF-8, header row)"""
import csv
import logging

import numpy as np

from gaitembed.analysis.tsne import Projection2D
from gaitembed.embedder import EmbeddingBatch
from gaitembed.errors import ArtifactWriteError, EmptyInput, ParseError


log = logging.getLogger(__name__)

RUN_COLUMNS = ['sequence_id', 'label', 'cluster', 'x', 'y']
PROJECTION_COLUMNS = ['sequence_id', 'label', 'x', 'y']


def _number(value):
    return repr(float(value))


def _write(path, header, rows):
    try:
        with open(path, 'w', newline='', encoding='utf-8') as stream:
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as error:
        raise ArtifactWriteError(f"cannot write '{path}': {error}") from error
    log.info(f"Wrote {path}")


def _read(path, required):
    with open(path, newline='', encoding='utf-8') as stream:
        rows = list(csv.reader(stream))
    if not rows:
        raise EmptyInput(f"'{path}' is empty")
    header = rows[0]
    missing = [column for column in required if column not in header]
    if missing:
        raise ParseError(1, f"missing columns {missing}")
    return header, rows[1:]


def _floats(row, indices, line):
    try:
        return [float(row[index]) for index in indices]
    except (ValueError, IndexError) as error:
        raise ParseError(line, f"bad numeric field: {error}") from error


def write_embeddings_csv(batch, path):
    """sequence_id,label,e0..e{D-1}"""
    dimension = batch.matrix.shape[1] if batch.matrix.ndim == 2 else 0
    _write(path, ['sequence_id', 'label'] + [f'e{index}' for index in range(dimension)], [
        [sequence_id, label] + [_number(value) for value in row]
        for sequence_id, label, row in zip(batch.sequence_ids, batch.labels, batch.matrix)
    ])


def read_embeddings_csv(path):
    """EmbeddingBatch from a file written by write_embeddings_csv"""
    header, rows = _read(path, ['sequence_id', 'label', 'e0'])
    value_columns = [index for index, column in enumerate(header) if column.startswith('e')
                     and column[1:].isdigit()]
    ids, labels, matrix = [], [], []
    for line, row in enumerate(rows, start=2):
        ids.append(row[header.index('sequence_id')])
        labels.append(row[header.index('label')])
        matrix.append(_floats(row, value_columns, line))
    if not matrix:
        raise EmptyInput(f"'{path}' holds no embeddings")
    return EmbeddingBatch(np.array(matrix), labels, ids)


def write_projection_csv(projection, path):
    """sequence_id,label,x,y"""
    _write(path, PROJECTION_COLUMNS, [
        [sequence_id, label, _number(x), _number(y)]
        for sequence_id, label, (x, y) in zip(projection.sequence_ids, projection.labels,
                                              projection.points)
    ])


def read_projection_csv(path):
    """Projection2D from a file written by write_projection_csv (or a run embeddings.csv)"""
    header, rows = _read(path, PROJECTION_COLUMNS)
    columns = [header.index(column) for column in ('x', 'y')]
    ids, labels, points = [], [], []
    for line, row in enumerate(rows, start=2):
        ids.append(row[header.index('sequence_id')])
        labels.append(row[header.index('label')])
        points.append(_floats(row, columns, line))
    return Projection2D(np.array(points).reshape(-1, 2), labels, ids)


def write_run_embeddings_csv(projection, clusters, path):
    """sequence_id,label,cluster,x,y for every embedded sequence of a run"""
    _write(path, RUN_COLUMNS, [
        [sequence_id, label, int(cluster), _number(x), _number(y)]
        for sequence_id, label, cluster, (x, y) in zip(
            projection.sequence_ids, projection.labels, clusters, projection.points)
    ])


def write_clusters_csv(batch, clusters, path):
    """sequence_id,label,cluster"""
    _write(path, ['sequence_id', 'label', 'cluster'], [
        [sequence_id, label, int(cluster)]
        for sequence_id, label, cluster in zip(batch.sequence_ids, batch.labels, clusters)
    ])

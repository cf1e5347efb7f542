"""Grid ablation harness: trains every parameter cell for every seed and tabulates final ARI

Spec file (YAML):

    data: data.jsonl            # relative to the spec file; or instead:
    synth: {subjects: 8, duration: 120, seed: 7}
    settings: {epochs: 300}     # overrides shared by every cell
    grid:
      mining: [random, semi-hard, hard]
    seeds: [0, 1, 2]
    raw_baseline: true          # adds a 'raw' row per seed

Failed cells are reported with their error and do not stop the remaining cells.
"""
import concurrent.futures
import csv
import itertools
import logging
import os
import statistics

import yaml

from gaitembed.analysis import raw_baseline_ari
from gaitembed.dataset import build_dataset, random_subject_params, read_capture_file, synth_generate
from gaitembed.errors import ArtifactWriteError, GaitEmbedError, InvalidParams
from gaitembed.trainer import train, validation_ari
from gaitembedcli.settings import ExperimentSettings
from utils.common import derive_seeds, format_float
from utils.logging_decorators import log_duration


log = logging.getLogger(__name__)

CSV_NAME = 'ablation.csv'
SUMMARY_NAME = 'ablation.md'
RAW_CELL = 'raw'


class AblationSpec:  # pylint: disable=too-few-public-methods
    """Parsed ablation spec file"""

    def __init__(self, grid, seeds, settings=None, data=None, synth=None, raw_baseline=True):
        if not grid:
            raise InvalidParams("ablation grid must name at least one parameter")
        self.grid = {key.replace('-', '_'): list(values) for key, values in grid.items()}
        if any(not values for values in self.grid.values()):
            raise InvalidParams("every grid parameter needs at least one value")
        self.seeds = [int(seed) for seed in seeds]
        if not self.seeds:
            raise InvalidParams("ablation needs at least one seed")
        self.settings = dict(settings or {})
        self.data = data
        self.synth = synth
        if (data is None) == (synth is None):
            raise InvalidParams("ablation spec needs exactly one of 'data' or 'synth'")
        self.raw_baseline = bool(raw_baseline)

    @classmethod
    def from_file(cls, path):
        """Reads a YAML spec; a relative data path is taken relative to the spec file"""
        with open(path, encoding='utf-8') as stream:
            try:
                values = yaml.safe_load(stream)
            except yaml.YAMLError as error:
                raise InvalidParams(f"ablation spec '{path}' is not valid YAML: {error}") from error
        if not isinstance(values, dict):
            raise InvalidParams(f"ablation spec '{path}' must hold a mapping")
        unknown = sorted(set(values) - {'grid', 'seeds', 'settings', 'data', 'synth', 'raw_baseline'})
        if unknown:
            raise InvalidParams(f"unknown ablation spec keys: {unknown}")
        data = values.get('data')
        if data is not None and not os.path.isabs(data):
            data = os.path.join(os.path.dirname(os.path.abspath(path)), data)
        return cls(values.get('grid') or {}, values.get('seeds', [0]), values.get('settings'),
                   data, values.get('synth'), values.get('raw_baseline', True))

    def cells(self):
        """Cartesian product of the grid, in grid key order"""
        keys = list(self.grid)
        return [dict(zip(keys, combination))
                for combination in itertools.product(*(self.grid[key] for key in keys))]

    def load_tracks(self):
        """Capture tracks the cells train on"""
        if self.data is not None:
            return read_capture_file(self.data)
        options = dict(self.synth)
        seed = int(options.get('seed', 0))
        params_seed, track_seed = derive_seeds(seed, 2)
        subjects = random_subject_params(int(options.get('subjects', 8)), params_seed,
                                         float(options.get('noise', 0.005)))
        return synth_generate(subjects, float(options.get('duration', 120.0)), track_seed)


def cell_name(index, cell):
    """Directory-safe cell identifier"""
    parts = [f"{key}-{value}" for key, value in cell.items()]
    return f"{index:03d}_" + '_'.join(parts).replace(os.sep, '-')


def run_cell(tracks, base_settings, cell, seed, run_dir=None):
    """Trains one (cell, seed) combination; returns its result row instead of raising"""
    row = dict(cell, seed=seed, ari=None, status='ok', error='')
    try:
        settings = ExperimentSettings().initialize(base_settings).merge(dict(cell, seed=seed))
        split = build_dataset(tracks, **settings.dataset_arguments())
        config = settings.train_config(len(split.labels()))
        params, history = train(split, config, run_dir)
        score = history.last_validation_ari()
        if score is None or config.eval_every == 0:
            score = validation_ari(params, split.validation, derive_seeds(config.seed, 4)[3])
        row['ari'] = score
    except GaitEmbedError as error:
        log.warning(f"Cell {cell} seed {seed} failed: {error}")
        row.update(status='failed', error=f"{type(error).__name__}: {error}")
    return row


def run_raw_baseline(tracks, base_settings, seed):
    """K-means ARI of the raw validation tensors for the split drawn with seed"""
    row = {'seed': seed, 'ari': None, 'status': 'ok', 'error': ''}
    try:
        settings = ExperimentSettings().initialize(base_settings).merge({'seed': seed})
        split = build_dataset(tracks, **settings.dataset_arguments())
        row['ari'] = raw_baseline_ari(split.validation, settings.get('k'),
                                      derive_seeds(seed, 4)[3])
    except GaitEmbedError as error:
        row.update(status='failed', error=f"{type(error).__name__}: {error}")
    return row


def _write_csv(rows, keys, path):
    columns = ['cell'] + keys + ['seed', 'ari', 'status', 'error']
    try:
        with open(path, 'w', newline='', encoding='utf-8') as stream:
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(columns)
            for row in rows:
                writer.writerow([row['cell']] + [row.get(key, '') for key in keys] + [
                    row['seed'], format_float(row['ari']), row['status'], row['error']])
    except OSError as error:
        raise ArtifactWriteError(f"cannot write '{path}': {error}") from error


def summary_table(rows, keys):
    """Markdown table with one line per cell: median and mean ARI over its successful seeds"""
    lines = ['| ' + ' | '.join(keys + ['seeds', 'median ARI', 'mean ARI', 'failed']) + ' |',
             '|' + '---|' * (len(keys) + 4)]
    grouped = {}
    for row in rows:
        grouped.setdefault(row['cell'], []).append(row)
    for cell_rows in grouped.values():
        scores = [row['ari'] for row in cell_rows if row['status'] == 'ok']
        failed = sum(row['status'] != 'ok' for row in cell_rows)
        first = cell_rows[0]
        median = f"{statistics.median(scores):.3f}" if scores else 'n/a'
        mean = f"{statistics.mean(scores):.3f}" if scores else 'n/a'
        values = [str(first.get(key, RAW_CELL if first['cell'] == RAW_CELL else '')) for key in keys]
        lines.append('| ' + ' | '.join(values + [str(len(cell_rows)), median, mean, str(failed)]) + ' |')
    return '\n'.join(lines) + '\n'


@log_duration(log, 'ablation')
def run_ablation(spec_path, out_dir, settings, jobs=1):
    """Runs every cell of the spec; writes ablation.csv and ablation.md into out_dir"""
    spec = AblationSpec.from_file(spec_path)
    base = ExperimentSettings().initialize(settings.to_dict()).merge(spec.settings).to_dict()
    for cell in spec.cells():
        ExperimentSettings().merge(cell)
    tracks = spec.load_tracks()
    os.makedirs(out_dir, exist_ok=True)

    tasks = []
    for index, cell in enumerate(spec.cells()):
        name = cell_name(index, cell)
        for seed in spec.seeds:
            tasks.append((name, cell, seed, os.path.join(out_dir, 'cells', f"{name}_seed{seed}")))
    log.info(f"Ablation: {len(spec.cells())} cells x {len(spec.seeds)} seeds")

    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [executor.submit(run_cell, tracks, base, cell, seed, run_dir)
                       for _, cell, seed, run_dir in tasks]
            results = [future.result() for future in futures]
    else:
        results = [run_cell(tracks, base, cell, seed, run_dir) for _, cell, seed, run_dir in tasks]

    rows = [dict(result, cell=name) for (name, _, _, _), result in zip(tasks, results)]
    if spec.raw_baseline:
        rows.extend(dict(run_raw_baseline(tracks, base, seed), cell=RAW_CELL) for seed in spec.seeds)

    keys = list(spec.grid)
    _write_csv(rows, keys, os.path.join(out_dir, CSV_NAME))
    try:
        with open(os.path.join(out_dir, SUMMARY_NAME), 'w', encoding='utf-8', newline='\n') as stream:
            stream.write(summary_table(rows, keys))
    except OSError as error:
        raise ArtifactWriteError(f"cannot write ablation summary: {error}") from error
    log.info(f"Ablation report written to {out_dir}")
    return rows

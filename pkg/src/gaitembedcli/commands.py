"""Implementation of each subcommand; every function returns the process exit code"""
import logging
import os

from gaitembed.analysis import (
    cluster_and_score,
    emit_scatter_svg,
    raw_baseline_ari,
    read_embeddings_csv,
    read_projection_csv,
    tsne,
    write_clusters_csv,
    write_embeddings_csv,
    write_projection_csv,
    write_run_embeddings_csv,
)
from gaitembed.dataset import (
    build_dataset,
    random_subject_params,
    read_capture_file,
    synth_generate,
    write_capture_file,
)
from gaitembed.embedder import embed_batch
from gaitembed.errors import ArtifactWriteError, InvalidParams
from gaitembed.trainer import FINAL_CHECKPOINT, train, write_history_csv, write_timings_csv
from gaitembedcli.ablation import run_ablation
from gaitembedcli.manifest import build_manifest, write_manifest
from utils.common import derive_seeds, format_float


log = logging.getLogger(__name__)

HISTORY_FILE = 'history.csv'
TIMINGS_FILE = 'timings.csv'
EMBEDDINGS_FILE = 'embeddings.csv'
TSNE_FILE = 'tsne.svg'
SETTINGS_FILE = 'settings.json'


def _evaluation_seed(settings):
    return derive_seeds(int(settings.get('seed')), 4)[3]


def _print_result(name, value):
    print(f'{name}={format_float(value)}')


def _load_split(data_path, settings):
    tracks = read_capture_file(data_path)
    return build_dataset(tracks, **settings.dataset_arguments())


def _scored_subset(split, settings, minimum=1):
    name = settings.get('subset')
    sequences = split.subset(name)
    if len(sequences) < minimum:
        raise InvalidParams(f"subset '{name}' holds {len(sequences)} sequences, need {minimum}")
    return sequences


def _write_settings(settings, path):
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as stream:
            settings.save(stream)
    except OSError as error:
        raise ArtifactWriteError(f"cannot write settings '{path}': {error}") from error


def _check_seq_len(params, settings):
    if int(settings.get('seq_len')) != params.config.seq_len:
        raise InvalidParams(f"checkpoint expects sequences of {params.config.seq_len} frames, "
                            f"settings ask for {settings.get('seq_len')}")


def run_synth(args, settings):
    """Writes a synthetic JSON-Lines capture file"""
    params_seed, track_seed = derive_seeds(int(settings.get('seed')), 2)
    subjects = random_subject_params(args.subjects, params_seed, args.noise)
    tracks = synth_generate(subjects, args.duration, track_seed)
    write_capture_file(tracks, args.out)
    log.info(f"Wrote {len(tracks)} synthetic tracks to {args.out}")
    return 0


def run_train(args, settings):
    """Trains and fills the run directory with manifest, checkpoint, history, embeddings and plot"""
    split = _load_split(args.data, settings)
    config = settings.train_config(len(split.labels()))
    run_dir = args.out
    params, history = train(split, config, run_dir)
    write_history_csv(history, os.path.join(run_dir, HISTORY_FILE))
    write_timings_csv(history, os.path.join(run_dir, TIMINGS_FILE))
    _write_settings(settings, os.path.join(run_dir, SETTINGS_FILE))

    sequences = _scored_subset(split, settings, minimum=4)
    batch = embed_batch(params, sequences)
    seed = _evaluation_seed(settings)
    assignment, score = cluster_and_score(batch.matrix, batch.labels, settings.get('k'), seed)
    raw_score = raw_baseline_ari(sequences, settings.get('k'), seed)
    projection = tsne(batch.matrix, batch.labels, settings.get('perplexity'),
                      int(settings.get('seed')), int(settings.get('tsne_iters')), sequence_ids=batch.sequence_ids)
    write_run_embeddings_csv(projection, assignment.labels, os.path.join(run_dir, EMBEDDINGS_FILE))
    emit_scatter_svg(projection, os.path.join(run_dir, TSNE_FILE),
                     f"{settings.get('mining')} mining, {config.epochs} epochs")

    summary = {
        'ari': score,
        'raw_ari': raw_score,
        'subset': settings.get('subset'),
        'epochs_recorded': len(history),
        'final_loss': history.records[-1].mean_loss if len(history) else None,
        'labels_per_batch': config.labels_per_batch,
        'sequences_per_label': config.sequences_per_label,
        'sequences': {'train': len(split.train), 'validation': len(split.validation),
                      'test': len(split.test)},
    }
    # timings.csv holds wall time and is left out: listed artifacts replay bitwise
    artifacts = [FINAL_CHECKPOINT, HISTORY_FILE, SETTINGS_FILE, EMBEDDINGS_FILE, TSNE_FILE]
    write_manifest(build_manifest('train', settings, args.data, artifacts, summary), run_dir)
    _print_result('ari', score)
    _print_result('raw_ari', raw_score)
    return 0


def run_embed(args, settings):
    """Embeds a subset of a capture file with a checkpoint into an embeddings CSV"""
    params = args.loaded_checkpoint[0]
    _check_seq_len(params, settings)
    split = _load_split(args.data, settings)
    batch = embed_batch(params, _scored_subset(split, settings))
    write_embeddings_csv(batch, args.out)
    return 0


def run_cluster(args, settings):
    """K-means over an embeddings CSV; prints the ARI against the CSV labels"""
    batch = read_embeddings_csv(args.embeddings)
    assignment, score = cluster_and_score(batch.matrix, batch.labels, settings.get('k'),
                                          int(settings.get('seed')))
    if args.out:
        write_clusters_csv(batch, assignment.labels, args.out)
    _print_result('ari', score)
    return 0


def run_evaluate(args, settings):
    """Prints ari=<value> for a checkpoint on a subset of a capture file"""
    params = args.loaded_checkpoint[0]
    _check_seq_len(params, settings)
    split = _load_split(args.data, settings)
    sequences = _scored_subset(split, settings, minimum=2)
    batch = embed_batch(params, sequences)
    seed = _evaluation_seed(settings)
    _, score = cluster_and_score(batch.matrix, batch.labels, settings.get('k'), seed)
    _print_result('ari', score)
    if args.baseline:
        _print_result('raw_ari', raw_baseline_ari(sequences, settings.get('k'), seed))
    return 0


def run_tsne(args, settings):
    """Projects an embeddings CSV to a projection CSV"""
    batch = read_embeddings_csv(args.embeddings)
    projection = tsne(batch.matrix, batch.labels, settings.get('perplexity'),
                      int(settings.get('seed')), int(settings.get('tsne_iters')), sequence_ids=batch.sequence_ids)
    write_projection_csv(projection, args.out)
    return 0


def run_plot(args, settings):  # pylint: disable=unused-argument
    """Renders a projection CSV as an SVG scatter plot"""
    emit_scatter_svg(read_projection_csv(args.projection), args.out, args.title)
    return 0


def run_ablate(args, settings):
    """Runs the ablation grid of a spec file"""
    run_ablation(args.spec, args.out, settings, jobs=args.jobs)
    return 0


COMMANDS = {
    'synth': run_synth,
    'train': run_train,
    'embed': run_embed,
    'cluster': run_cluster,
    'evaluate': run_evaluate,
    'tsne': run_tsne,
    'plot': run_plot,
    'ablate': run_ablate,
}

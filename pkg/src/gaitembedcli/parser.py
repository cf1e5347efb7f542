"""Argument grammar of the gaitembed command line"""
import argparse


class UsageError(Exception):
    """Command line does not match the grammar; carries the synopsis of the failing parser"""

    def __init__(self, message, usage):
        super().__init__(message)
        self.usage = usage


class GaitArgumentParser(argparse.ArgumentParser):
    """ArgumentParser raising UsageError instead of exiting (subparsers inherit the class)"""

    def error(self, message):
        raise UsageError(message, self.format_usage())


def _add_common(parser):
    group = parser.add_argument_group('common')
    group.add_argument('--seed', type=int, help='master seed, every random stream derives from it')
    group.add_argument('--config', help='YAML or JSON settings file')
    group.add_argument('--log-level', default='INFO',
                       choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='stderr log level')
    group.add_argument('--verbose', action='store_true', help='shorthand for --log-level DEBUG')


def _add_data(parser):
    group = parser.add_argument_group('data')
    group.add_argument('--data', help='JSON-Lines capture file')
    group.add_argument('--seq-len', type=int, help='frames per sequence (default 30)')
    group.add_argument('--stride', type=int, help='window stride (default seq-len)')
    group.add_argument('--split-ratio', type=float, help='training share per label (default 0.9)')
    group.add_argument('--holdout', help='comma separated labels kept out of training')
    group.add_argument('--label-field', choices=['subject', 'activity'],
                       help='record field that labels sequences (default subject)')
    group.add_argument('--subset', choices=['all', 'train', 'validation', 'test'],
                       help='sequences to embed or score (default validation)')
    group.add_argument('--manifest', help='replay the settings of a previous run')


def _add_training(parser):
    group = parser.add_argument_group('training')
    group.add_argument('--embedding-dim', type=int, help='embedding size D (default 32)')
    group.add_argument('--batch-size', type=int, help='batch size N = P x K (default 64)')
    group.add_argument('--margin', type=float, help='triplet margin (default 0.2)')
    group.add_argument('--lr', type=float, help='Adam learning rate (default 1e-4)')
    group.add_argument('--mining', choices=['random', 'semi-hard', 'hard'],
                       help='negative selection (default semi-hard)')
    group.add_argument('--mining-sample-one', action='store_const', const=True,
                       help='keep one random semi-hard negative per anchor-positive pair')
    group.add_argument('--epochs', type=int, help='training epochs (default 300)')
    group.add_argument('--eval-every', type=int, help='validation ARI interval in epochs')
    group.add_argument('--checkpoint-every', type=int, help='checkpoint interval in epochs')


def _add_analysis(parser, projection=True):
    group = parser.add_argument_group('analysis')
    group.add_argument('--k', type=int, help='cluster count (default: number of labels)')
    if projection:
        group.add_argument('--perplexity', type=float, help='t-SNE perplexity (default 30)')
        group.add_argument('--tsne-iters', type=int, help='t-SNE iterations (default 1000)')


def build_parser():
    """Top level parser with one subparser per command"""
    parser = GaitArgumentParser(
        prog='gaitembed', description='Gait embeddings from skeleton sequences trained with a triplet loss')
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    synth = commands.add_parser('synth', help='generate a synthetic capture file')
    _add_common(synth)
    synth.add_argument('--subjects', type=int, default=8, help='number of walkers')
    synth.add_argument('--duration', type=float, default=120.0, help='seconds per walker')
    synth.add_argument('--noise', type=float, default=0.005, help='joint noise, fraction of height')
    synth.add_argument('--out', required=True, help='output JSON-Lines file')

    train = commands.add_parser('train', help='train an embedder and write a run directory')
    _add_common(train)
    _add_data(train)
    _add_training(train)
    _add_analysis(train)
    train.add_argument('--out', required=True, help='run directory')

    embed = commands.add_parser('embed', help='embed sequences with a checkpoint')
    _add_common(embed)
    _add_data(embed)
    embed.add_argument('--checkpoint', required=True, help='checkpoint file')
    embed.add_argument('--out', required=True, help='output embeddings CSV')

    cluster = commands.add_parser('cluster', help='k-means over an embeddings CSV')
    _add_common(cluster)
    _add_analysis(cluster, projection=False)
    cluster.add_argument('--embeddings', required=True, help='embeddings CSV')
    cluster.add_argument('--out', help='output CSV of cluster assignments')

    evaluate = commands.add_parser('evaluate', help='score a checkpoint by k-means ARI')
    _add_common(evaluate)
    _add_data(evaluate)
    _add_analysis(evaluate, projection=False)
    evaluate.add_argument('--checkpoint', required=True, help='checkpoint file')
    evaluate.add_argument('--baseline', action='store_true',
                          help='also print the ARI of k-means on the raw sequences')

    tsne = commands.add_parser('tsne', help='project an embeddings CSV to 2D')
    _add_common(tsne)
    _add_analysis(tsne)
    tsne.add_argument('--embeddings', required=True, help='embeddings CSV')
    tsne.add_argument('--out', required=True, help='output projection CSV')

    plot = commands.add_parser('plot', help='render a projection CSV as SVG')
    _add_common(plot)
    plot.add_argument('--projection', required=True, help='projection CSV')
    plot.add_argument('--title', help='plot title')
    plot.add_argument('--out', required=True, help='output SVG')

    ablate = commands.add_parser('ablate', help='run a grid of training experiments')
    _add_common(ablate)
    ablate.add_argument('--spec', required=True, help='YAML ablation spec')
    ablate.add_argument('--out', required=True, help='report directory')
    ablate.add_argument('--jobs', type=int, default=1, help='parallel worker processes')

    for subparser in commands.choices.values():
        subparser.set_defaults(synopsis=subparser.format_usage())
    return parser


SETTING_FLAGS = [
    'seed', 'seq_len', 'stride', 'split_ratio', 'holdout', 'label_field', 'subset',
    'embedding_dim', 'batch_size', 'margin', 'lr', 'mining', 'mining_sample_one', 'epochs',
    'eval_every', 'checkpoint_every', 'k', 'perplexity', 'tsne_iters',
]


def explicit_settings(args):
    """Settings given on the command line (flags left out are None)"""
    values = vars(args)
    return {key: values[key] for key in SETTING_FLAGS if values.get(key) is not None}

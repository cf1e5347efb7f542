"""Command line front end: synthesize data, train, embed, cluster, evaluate, project, plot, ablate"""
import logging
import sys

from gaitembed.errors import ArtifactIoError, DataError
from gaitembed.trainer import load_checkpoint_with_header
from gaitembedcli.commands import COMMANDS
from gaitembedcli.manifest import load_manifest
from gaitembedcli.parser import UsageError, build_parser, explicit_settings
from gaitembedcli.settings import ExperimentSettings


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3

LOGGER_NAMES = ('gaitembed', 'gaitembedcli')
DATA_COMMANDS = ('train', 'embed', 'evaluate')

log = logging.getLogger(__name__)


def setup_logger(level):
    """Define loggers at the package roots so all submodules inherit; output goes to stderr"""
    formatter = logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s")
    for name in LOGGER_NAMES:
        package_log = logging.getLogger(name)
        package_log.setLevel(logging.DEBUG)  # Define lowest handled (not output)
        for handler in list(package_log.handlers):
            package_log.removeHandler(handler)

        stderr_handler = logging.StreamHandler(sys.stderr)
        stderr_handler.setLevel(level)
        stderr_handler.setFormatter(formatter)
        package_log.addHandler(stderr_handler)


def _checkpoint_settings(header):
    """Settings a checkpoint implies: its sequence length and, when recorded, the training seed"""
    values = {'seq_len': header['config']['seq_len']}
    train_config = header.get('train_config')
    if train_config:
        values['seed'] = train_config['seed']
    return values


def resolve_settings(args):
    """defaults < checkpoint < --config file < explicit flags < --manifest"""
    base = None
    checkpoint = getattr(args, 'checkpoint', None)
    if checkpoint is not None:
        params, state, header = load_checkpoint_with_header(checkpoint)
        args.loaded_checkpoint = (params, state)
        base = _checkpoint_settings(header)
    if args.config:
        settings = ExperimentSettings.from_file(args.config, base)
    else:
        settings = ExperimentSettings().initialize(base)
    settings.merge(explicit_settings(args))

    manifest_path = getattr(args, 'manifest', None)
    if manifest_path:
        manifest = load_manifest(manifest_path)
        settings.merge(manifest['settings'])
        if manifest.get('data'):
            args.data = manifest['data']['path']
    if args.command in DATA_COMMANDS and not args.data:
        raise UsageError("the following arguments are required: --data (or --manifest)",
                         args.synopsis)
    return settings


def run(argv=None):
    """Runs one command; returns 0 on success, 1 usage error, 2 data error, 3 I/O error"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as error:
        print(f"error: {error}\n{error.usage}", file=sys.stderr, end='')
        return EXIT_USAGE
    except SystemExit as exit_request:  # --help
        return exit_request.code or EXIT_OK

    setup_logger(logging.DEBUG if args.verbose else getattr(logging, args.log_level))
    try:
        settings = resolve_settings(args)
        log.debug(f"Resolved settings for '{args.command}': {settings}")
        return COMMANDS[args.command](args, settings)
    except UsageError as error:
        print(f"error: {error}\n{error.usage}", file=sys.stderr, end='')
        return EXIT_USAGE
    except DataError as error:
        log.error(f"{type(error).__name__}: {error}")
        return EXIT_DATA
    except (ArtifactIoError, OSError) as error:
        log.error(f"{type(error).__name__}: {error}")
        return EXIT_IO


def main():
    """Entry point for running the tool from the command line"""
    sys.exit(run())

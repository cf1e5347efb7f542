"""manifest.json: everything needed to re-run a command and reproduce its artifacts"""
import json
import logging
import os

from gaitembed import __version__
from gaitembed.errors import ArtifactWriteError, InvalidParams
from utils.common import derive_seeds, sha256_file


log = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'
SEED_STREAMS = ['init', 'sampling', 'mining', 'evaluation']


def build_manifest(command, settings, data_path=None, artifacts=(), summary=None):
    """Manifest mapping for a run; holds no timestamps so reruns write identical files"""
    seed = int(settings.get('seed'))
    manifest = {
        'command': command,
        'version': __version__,
        'settings': settings.to_dict(),
        'seeds': {
            'seed': seed,
            'derived': dict(zip(SEED_STREAMS, derive_seeds(seed, len(SEED_STREAMS)))),
        },
        'artifacts': sorted(artifacts),
        'summary': summary or {},
    }
    if data_path is not None:
        manifest['data'] = {'path': os.path.abspath(data_path), 'sha256': sha256_file(data_path)}
    return manifest


def write_manifest(manifest, run_dir):
    """Writes run_dir/manifest.json and returns its path"""
    path = os.path.join(run_dir, MANIFEST_NAME)
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as stream:
            json.dump(manifest, stream, indent=2, sort_keys=True)
            stream.write('\n')
    except OSError as error:
        raise ArtifactWriteError(f"cannot write manifest '{path}': {error}") from error
    log.info(f"Wrote {path}")
    return path


def load_manifest(path):
    """Reads a manifest, warning when the recorded input data has changed since"""
    with open(path, encoding='utf-8') as stream:
        try:
            manifest = json.load(stream)
        except json.JSONDecodeError as error:
            raise InvalidParams(f"manifest '{path}' is not valid JSON: {error}") from error
    if not isinstance(manifest, dict) or 'settings' not in manifest:
        raise InvalidParams(f"'{path}' is not a run manifest")
    data = manifest.get('data')
    if data and os.path.exists(data['path']) and sha256_file(data['path']) != data['sha256']:
        log.warning(f"Input data {data['path']} changed since the manifest was written")
    return manifest

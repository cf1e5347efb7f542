import json
import os
import tempfile
import unittest

from gaitembed.errors import ArtifactWriteError, InvalidParams
from gaitembedcli.manifest import MANIFEST_NAME, build_manifest, load_manifest, write_manifest
from gaitembedcli.settings import ExperimentSettings
from utils.common import derive_seeds


class TestManifest(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)
        self.data = os.path.join(self.directory.name, 'data.jsonl')
        with open(self.data, 'w', encoding='utf-8') as stream:
            stream.write('{}\n')

    def test_build_manifest(self):
        settings = ExperimentSettings().initialize({'seed': 3})
        manifest = build_manifest('train', settings, self.data, ['b.csv', 'a.ckpt'], {'ari': 0.5})
        assert manifest['command'] == 'train'
        assert manifest['settings']['seed'] == 3
        assert manifest['seeds']['derived']['evaluation'] == derive_seeds(3, 4)[3]
        assert manifest['artifacts'] == ['a.ckpt', 'b.csv']
        assert manifest['data']['path'] == os.path.abspath(self.data)
        assert len(manifest['data']['sha256']) == 64

    def test_write_identical_and_load(self):
        manifest = build_manifest('train', ExperimentSettings(), self.data)
        first = write_manifest(manifest, self.directory.name)
        with open(first, 'rb') as stream:
            content = stream.read()
        write_manifest(build_manifest('train', ExperimentSettings(), self.data), self.directory.name)
        with open(first, 'rb') as stream:
            assert stream.read() == content
        assert load_manifest(first)['settings'] == ExperimentSettings().to_dict()

    def test_changed_data_warns(self):
        path = write_manifest(build_manifest('train', ExperimentSettings(), self.data), self.directory.name)
        with open(self.data, 'a', encoding='utf-8') as stream:
            stream.write('{}\n')
        with self.assertLogs('gaitembedcli.manifest', level='WARNING'):
            load_manifest(path)

    def test_not_a_manifest(self):
        path = os.path.join(self.directory.name, MANIFEST_NAME)
        with open(path, 'w', encoding='utf-8') as stream:
            json.dump({'command': 'train'}, stream)
        with self.assertRaises(InvalidParams):
            load_manifest(path)

    def test_unwritable(self):
        with self.assertRaises(ArtifactWriteError):
            write_manifest({}, os.path.join(self.directory.name, 'missing'))

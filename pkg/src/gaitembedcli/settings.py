"""Experiment settings: built-in defaults merged with a settings file, flags and manifests"""
import json

import yaml

from gaitembed.errors import InvalidParams
from gaitembed.trainer import TrainConfig, resolve_pk
from utils.common import coalesce, parse_label_list
from utils.mapping import NormalizedKeyDict, recursive_merge


DEFAULTS = {
    'seed': 0,
    'seq_len': 30,
    'stride': None,
    'embedding_dim': 32,
    'batch_size': 64,
    'margin': 0.2,
    'lr': 1e-4,
    'mining': 'semi-hard',
    'mining_sample_one': False,
    'epochs': 300,
    'split_ratio': 0.9,
    'holdout': [],
    'label_field': 'subject',
    'channel_widths': [16, 32, 64],
    'blocks_per_stage': 1,
    'checkpoint_every': 0,
    'eval_every': 10,
    'k': None,
    'perplexity': 30.0,
    'tsne_iters': 1000,
    'subset': 'validation',
}


def read_settings_file(path):
    """Raw mapping of a YAML or JSON settings file (JSON is valid YAML)"""
    with open(path, encoding='utf-8') as stream:
        try:
            source_settings = yaml.safe_load(stream)
        except yaml.YAMLError as error:
            raise InvalidParams(f"settings file '{path}' is not valid YAML/JSON: {error}") from error
    if source_settings is None:
        source_settings = {}
    if not isinstance(source_settings, dict):
        raise InvalidParams(f"settings file '{path}' must hold a mapping")
    return source_settings


class ExperimentSettings:
    """Wraps resolved experiment settings into an abstraction managing read and write access"""

    @classmethod
    def from_file(cls, path, base=None):
        """Creates a new settings instance seeded from a YAML or JSON mapping file

        base holds values that rank between the defaults and the file (a checkpoint's own settings).
        """
        return cls().initialize(base).merge(read_settings_file(path))

    def __init__(self):
        self.settings = NormalizedKeyDict(DEFAULTS)

    def get(self, key, *args, **kwargs):
        return self.settings.get(key, *args, **kwargs)

    def __getitem__(self, key):
        return self.settings[key]

    def initialize(self, initial_settings):
        """Initializes settings from values. Intended to be called after base init"""
        if initial_settings is not None:
            self.merge(initial_settings)
        return self

    def merge(self, settings_object):
        """Merges settings from the given mapping; keys outside the known settings are rejected"""
        incoming = NormalizedKeyDict(settings_object)
        unknown = sorted(key for key in incoming if key not in self.settings)
        if unknown:
            raise InvalidParams(f"unknown settings: {', '.join(unknown)}")
        recursive_merge(self.settings, incoming, default=NormalizedKeyDict)
        return self

    @property
    def stride(self):
        """Window stride, defaulting to the sequence length"""
        return int(coalesce(self.get('stride'), self.get('seq_len')))

    @property
    def holdout(self):
        """Held-out labels as a list"""
        value = self.get('holdout')
        if isinstance(value, str):
            return parse_label_list(value)
        return [str(label) for label in coalesce(value, [])]

    def dataset_arguments(self):
        """Keyword arguments for gaitembed.dataset.build_dataset"""
        return {
            'seq_len': int(self.get('seq_len')),
            'stride': self.stride,
            'ratio': float(self.get('split_ratio')),
            'seed': int(self.get('seed')),
            'holdout': self.holdout,
            'label_field': self.get('label_field'),
        }

    def train_config(self, label_count):
        """TrainConfig for a training set with label_count distinct labels"""
        labels_per_batch, sequences_per_label = resolve_pk(int(self.get('batch_size')), label_count)
        return TrainConfig(
            labels_per_batch=labels_per_batch,
            sequences_per_label=sequences_per_label,
            epochs=self.get('epochs'),
            learning_rate=self.get('lr'),
            margin=self.get('margin'),
            mining=self.get('mining'),
            mining_sample_one=self.get('mining_sample_one'),
            seed=self.get('seed'),
            seq_len=self.get('seq_len'),
            embedding_dim=self.get('embedding_dim'),
            channel_widths=self.get('channel_widths'),
            blocks_per_stage=self.get('blocks_per_stage'),
            checkpoint_every=self.get('checkpoint_every'),
            eval_every=self.get('eval_every'),
        )

    def to_dict(self):
        """Plain dict, sorted by key"""
        return dict(sorted(self.settings.to_dict().items()))

    def save(self, fp):
        """Serializes and writes the settings content to the file object; from_file reads it back"""
        json.dump(self.to_dict(), fp, indent=2, sort_keys=True)
        fp.write('\n')

    def __repr__(self):
        return repr(self.settings)

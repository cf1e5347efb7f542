"""Settings mapping with normalized keys and utility functions for merging nested mappings"""
import unicodedata
import collections.abc


class NormalizedKeyDict(collections.abc.MutableMapping):
    """Mapping with case insensitive keys where '-' and '_' are interchangeable

    Lets `seq-len` from a command line flag, `seq_len` from a YAML file and `Seq_Len` typed by
    hand all address the same setting.
    """

    def __init__(self, *args, **kwargs):
        self.store = dict()
        self.update(*args, **kwargs)  # Set with update to apply transforms

    def __getitem__(self, key):
        return self.store[self.keytransform(key)]

    def __setitem__(self, key, value):
        # Nested mappings are converted so lookups stay normalized at every level
        if isinstance(value, collections.abc.Mapping) and not isinstance(value, NormalizedKeyDict):
            value = NormalizedKeyDict(value)
        self.store[self.keytransform(key)] = value

    def __delitem__(self, key):
        del self.store[self.keytransform(key)]

    def __iter__(self):
        return iter(self.store)

    def __len__(self):
        return len(self.store)

    def keytransform(self, key):
        """Normalizes text keys to lower case with underscores, else pass through"""
        if isinstance(key, str):
            key = unicodedata.normalize("NFKC", key.casefold()).strip()
            return '_'.join(key.replace('-', '_').split())
        return key

    def to_dict(self):
        """Plain nested dict copy, suitable for json/yaml dumping"""
        return {
            key: value.to_dict() if isinstance(value, NormalizedKeyDict) else value
            for key, value in self.store.items()
        }

    def __repr__(self):
        return repr(self.store)


def recursive_merge(origin_dict, merge_dict, default=dict):
    """Deep merge two mappings, assigning merge dict values back into origin"""
    for key, value in merge_dict.items():
        if isinstance(value, collections.abc.Mapping):
            if key not in origin_dict:
                origin_dict[key] = default()
            # Re-read: the mapping may have converted the stored value on assignment
            origin_value = origin_dict[key]
            if isinstance(origin_value, collections.abc.Mapping):
                recursive_merge(origin_value, value, default=default)
            else:
                origin_dict[key] = value
        else:
            origin_dict[key] = value
    return origin_dict

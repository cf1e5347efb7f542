"""Small value helpers shared by the library and the command line front end"""
import hashlib

import numpy as np


def coalesce(*args):
    """Returns first non-None argument passed to the function, or None if empty or all None"""
    for arg in args:
        if arg is not None:
            return arg
    return None


def derive_seeds(seed, count):
    """Splits one integer seed into count independent integer seeds (stable across runs)"""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint32)[0]) for child in children]


def sha256_file(path, chunk_size=1 << 20):
    """Hex SHA-256 digest of a file's bytes"""
    digest = hashlib.sha256()
    with open(path, 'rb') as stream:
        for chunk in iter(lambda: stream.read(chunk_size), b''):
            digest.update(chunk)
    return digest.hexdigest()


def format_float(value, digits=9):
    """Formats a float for text artifacts with a fixed number of significant digits"""
    if value is None:
        return ''
    return f'{value:.{digits}g}'


def parse_label_list(value):
    """Splits a comma separated command line value into a list of stripped, non-empty items"""
    if not value:
        return []
    return [item.strip() for item in value.split(',') if item.strip()]

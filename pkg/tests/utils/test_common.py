import os
import tempfile
import unittest

from utils.common import coalesce, derive_seeds, format_float, parse_label_list, sha256_file


class TestCoalesce(unittest.TestCase):

    def test_coalesce_first_not_none(self):
        self.assertEqual(0, coalesce(None, 0, 1))

    def test_coalesce_all_none(self):
        self.assertIsNone(coalesce(None, None))


class TestDeriveSeeds(unittest.TestCase):

    def test_derive_seeds_stable(self):
        assert derive_seeds(7, 4) == derive_seeds(7, 4)

    def test_derive_seeds_distinct(self):
        seeds = derive_seeds(7, 4)
        assert len(set(seeds)) == 4
        assert seeds != derive_seeds(8, 4)

    def test_derive_seeds_prefix(self):
        assert derive_seeds(3, 2) == derive_seeds(3, 4)[:2]


class TestFormatFloat(unittest.TestCase):

    def test_format_float_digits(self):
        self.assertEqual('0.571428571', format_float(4 / 7))

    def test_format_float_none(self):
        self.assertEqual('', format_float(None))

    def test_format_float_whole(self):
        self.assertEqual('1', format_float(1.0))


class TestParseLabelList(unittest.TestCase):

    def test_parse_label_list(self):
        self.assertEqual(['S01', 'S02'], parse_label_list(' S01, ,S02 '))

    def test_parse_label_list_empty(self):
        self.assertEqual([], parse_label_list(''))


class TestSha256File(unittest.TestCase):

    def test_sha256_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'data.txt')
            with open(path, 'wb') as stream:
                stream.write(b'abc')
            self.assertEqual('ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad',
                             sha256_file(path))

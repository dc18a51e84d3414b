import json
import os
import tempfile
import unittest

import numpy as np

import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../..'))
from edastress.errors import ContractError, DataError, ParseError, SchemaError
from edastress.feature_extraction.eda_features import FEATURE_NAMES, WindowFeatures
from edastress.feature_extraction.feature_table import FeatureTable


def _rows():
    rng = np.random.default_rng(5)
    rows = []
    for subject in ('S02', 'S01'):
        for k in (2, 0, 1):
            rows.append(WindowFeatures(subject, 30.0 * k, k % 2, rng.normal(size=25)))
    return rows


class TestFeatureTable(unittest.TestCase):

    def test_ordering(self):
        table = FeatureTable.from_windows(_rows(), dataset='wesad_wrist')
        self.assertEqual(len(table), 6)
        self.assertEqual(table.subjects(), ['S01', 'S02'])
        self.assertEqual(table.subject_ids.tolist(), ['S01'] * 3 + ['S02'] * 3)
        self.assertEqual(table.t_start_s.tolist(), [0.0, 30.0, 60.0] * 2)
        self.assertEqual(table.labels.tolist(), [0, 1, 0] * 2)
        self.assertEqual(table.class_counts(), (4, 2))

        sub = table.for_subject('S02')
        self.assertEqual(len(sub), 3)
        self.assertEqual(sub.dataset, 'wesad_wrist')

    def test_validation(self):
        with self.assertRaises(ContractError):
            FeatureTable(['S01'], [0.0, 1.0], [0], np.zeros((1, 25)))
        with self.assertRaises(DataError):
            FeatureTable(['S01'], [0.0], [2], np.zeros((1, 25)))

    def test_frame(self):
        frame = FeatureTable.from_windows(_rows()).to_frame()
        self.assertEqual(list(frame.columns),
                         ['subject_id', 't_start_s', 'label'] + list(FEATURE_NAMES))

    def test_save_load(self):
        table = FeatureTable.from_windows(_rows(), dataset='synthetic', window_s=60.0,
                                          shift_s=30.0)
        with tempfile.TemporaryDirectory() as tmp:
            path = table.save(os.path.join(tmp, 'features.csv'), manifest_hash='abc')
            with open(os.path.join(tmp, 'features.json')) as fin:
                meta = json.load(fin)
            self.assertEqual(meta['manifest_hash'], 'abc')
            self.assertEqual(meta['n_windows'], 6)
            self.assertEqual(meta['feature_set_version'], 'eda25-v1')

            loaded = FeatureTable.load(path)
            self.assertEqual(loaded.dataset, 'synthetic')
            self.assertEqual(loaded.subject_ids.tolist(), table.subject_ids.tolist())
            np.testing.assert_array_equal(loaded.labels, table.labels)
            np.testing.assert_allclose(loaded.X, table.X, rtol=1e-11)

    def test_version_mismatch(self):
        table = FeatureTable.from_windows(_rows())
        with tempfile.TemporaryDirectory() as tmp:
            path = table.save(os.path.join(tmp, 'features.csv'))
            meta_path = os.path.join(tmp, 'features.json')
            with open(meta_path) as fin:
                meta = json.load(fin)
            meta['feature_set_version'] = 'eda24-v0'
            with open(meta_path, 'w') as fout:
                json.dump(meta, fout)
            with self.assertRaises(SchemaError):
                FeatureTable.load(path)

    def test_bad_values(self):
        table = FeatureTable.from_windows(_rows())
        with tempfile.TemporaryDirectory() as tmp:
            path = table.save(os.path.join(tmp, 'features.csv'))
            with open(path) as fin:
                lines = fin.read().splitlines()
            cells = lines[2].split(',')
            cells[5] = 'oops'
            lines[2] = ','.join(cells)
            with open(path, 'w') as fout:
                fout.write('\n'.join(lines) + '\n')
            with self.assertRaises(ParseError) as ctx:
                FeatureTable.load(path)
            self.assertEqual(ctx.exception.line, 3)

    def test_concat(self):
        a = FeatureTable.from_windows(_rows()[:3], dataset='d')
        b = FeatureTable.from_windows(_rows()[3:], dataset='d')
        merged = FeatureTable.concat([a, b])
        self.assertEqual(len(merged), 6)
        self.assertEqual(merged.subjects(), ['S01', 'S02'])

        c = FeatureTable.from_windows(_rows()[3:], dataset='d', window_s=30.0, shift_s=15.0)
        with self.assertRaises(SchemaError):
            FeatureTable.concat([a, c])
        d = FeatureTable.from_windows(_rows()[3:], feature_set_version='other')
        with self.assertRaises(SchemaError):
            FeatureTable.concat([a, d])

if __name__ == '__main__':
    unittest.main()

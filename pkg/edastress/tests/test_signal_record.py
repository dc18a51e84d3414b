import filecmp
import json
import os
import tempfile
import unittest

import numpy as np

import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../..'))
from edastress.errors import DataError, ParseError, SchemaError
from edastress.util.signal_record import (
    Device, SignalRecord, load_canonical, load_canonical_dir, write_canonical,
)


def _write_raw(out_dir, rows, n_samples=None, stem='S01_wrist'):
    csv_path = os.path.join(out_dir, stem + '.csv')
    with open(csv_path, 'w') as fout:
        fout.write('t_s,eda_us,label\n')
        for row in rows:
            fout.write(','.join(row) + '\n')
    with open(os.path.join(out_dir, stem + '.json'), 'w') as fout:
        json.dump({'format_version': 1, 'subject_id': 'S01', 'device': 'wrist',
                   'sampling_rate_hz': 4.0,
                   'n_samples': len(rows) if n_samples is None else n_samples}, fout)
    return csv_path


class TestSignalRecord(unittest.TestCase):

    def test_basic(self):
        record = SignalRecord('S01', 'wrist', 4, [1.0, 1.5, 2.0, 2.5], [0, 0, 1, 1])
        self.assertEqual(len(record), 4)
        self.assertEqual(record.device, Device.WRIST)
        self.assertEqual(record.duration_s, 1.0)
        self.assertEqual(record.stress_fraction, 0.5)
        np.testing.assert_allclose(record.times(), [0.0, 0.25, 0.5, 0.75])
        self.assertEqual(record.stem(), 'S01_wrist')
        with self.assertRaises(ValueError):
            record.samples[0] = 3.0

    def test_invalid_records(self):
        with self.assertRaises(SchemaError):
            SignalRecord('S01', 'ankle', 4, [1.0], [0])
        with self.assertRaises(SchemaError):
            SignalRecord('S01', 'wrist', 0, [1.0], [0])
        with self.assertRaises(SchemaError):
            SignalRecord('S01', 'wrist', 4, [1.0, 2.0], [0])
        with self.assertRaises(DataError):
            SignalRecord('S01', 'wrist', 4, [1.0, np.nan], [0, 0])
        with self.assertRaises(DataError):
            SignalRecord('S01', 'wrist', 4, [1.0, 2.0], [0, 2])

    def test_save_load(self):
        rng = np.random.default_rng(3)
        record = SignalRecord('S07', 'chest', 700, 5.0 + rng.random(50),
                              (np.arange(50) >= 20).astype(int))
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            path = write_canonical(record, first)
            loaded = load_canonical(path)
            self.assertEqual(loaded.subject_id, 'S07')
            self.assertEqual(loaded.sampling_rate_hz, 700.0)
            np.testing.assert_allclose(loaded.samples, record.samples, rtol=1e-11)
            np.testing.assert_array_equal(loaded.labels, record.labels)

            # A loaded record re-writes to the same bytes.
            again = write_canonical(loaded, second)
            self.assertTrue(filecmp.cmp(path, again, shallow=False))
            self.assertTrue(filecmp.cmp(path[:-4] + '.json', again[:-4] + '.json',
                                        shallow=False))

    def test_time_offset(self):
        for t0 in (100.0, 100.25, 100.5):
            record = SignalRecord('S02', 'wrist', 4, [1.0, 1.5, 2.0, 2.5], [0, 0, 1, 1], t0_s=t0)
            np.testing.assert_allclose(record.times(), t0 + np.array([0.0, 0.25, 0.5, 0.75]))
            with tempfile.TemporaryDirectory() as first, \
                    tempfile.TemporaryDirectory() as second:
                path = write_canonical(record, first)
                loaded = load_canonical(path)
                self.assertEqual(loaded.t0_s, t0)
                self.assertEqual(loaded, record)
                again = write_canonical(loaded, second)
                self.assertTrue(filecmp.cmp(path, again, shallow=False))
        self.assertNotEqual(record, record.replace(t0_s=0.0))
        self.assertEqual(record.replace(device='chest').t0_s, 100.5)

    def test_off_grid_times(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = _write_raw(tmp, [['10', '1.0', '0'], ['10.25', '1.0', '0'],
                                    ['10.75', '1.0', '0']])
            with self.assertRaises(ParseError) as ctx:
                load_canonical(path)
            self.assertEqual(ctx.exception.line, 4)

    def test_manifest_hash_in_sidecar(self):
        record = SignalRecord('S01', 'wrist', 4, [1.0, 2.0], [0, 1])
        with tempfile.TemporaryDirectory() as tmp:
            path = write_canonical(record, tmp, manifest_hash='abc123')
            with open(path[:-4] + '.json') as fin:
                self.assertEqual(json.load(fin)['manifest_hash'], 'abc123')
            self.assertEqual(load_canonical(path), record)

    def test_parse_errors(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = _write_raw(tmp, [['0', '1.0', '0'], ['0.25', 'abc', '0']])
            with self.assertRaises(ParseError) as ctx:
                load_canonical(path)
            self.assertEqual(ctx.exception.line, 3)

        with tempfile.TemporaryDirectory() as tmp:
            path = _write_raw(tmp, [['0', '1.0', '0'], ['0.25', '1.0', '3']])
            with self.assertRaises(ParseError) as ctx:
                load_canonical(path)
            self.assertEqual(ctx.exception.line, 3)

        with tempfile.TemporaryDirectory() as tmp:
            path = _write_raw(tmp, [['0', '1.0', '0'], ['0.5', '1.0', '0'],
                                    ['0.5', '1.0', '0']])
            with self.assertRaises(ParseError) as ctx:
                load_canonical(path)
            self.assertEqual(ctx.exception.line, 4)

    def test_schema_errors(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = _write_raw(tmp, [['0', '1.0', '0']], n_samples=5)
            with self.assertRaises(SchemaError):
                load_canonical(path)

        with tempfile.TemporaryDirectory() as tmp:
            path = _write_raw(tmp, [['0', '1.0', '0']])
            os.remove(path[:-4] + '.json')
            with self.assertRaises(SchemaError):
                load_canonical(path)

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'S01_wrist.csv')
            _write_raw(tmp, [['0', '1.0', '0']])
            with open(path, 'w') as fout:
                fout.write('time,eda,label\n0,1.0,0\n')
            with self.assertRaises(SchemaError):
                load_canonical(path)

    def test_load_dir(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(DataError):
                load_canonical_dir(tmp)
            for subject in ('S02', 'S01'):
                write_canonical(SignalRecord(subject, 'wrist', 4, [1.0, 2.0], [0, 1]), tmp)
            records = load_canonical_dir(tmp)
            self.assertEqual([r.subject_id for r in records], ['S01', 'S02'])

if __name__ == '__main__':
    unittest.main()

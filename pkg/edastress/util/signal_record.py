"""Defines the single-stream EDA record and its canonical file format.

Canonical format (one stream per file pair):

    <subject>_<device>.csv    header ``t_s,eda_us,label``; t_s = t0 + i / fs
    <subject>_<device>.json   ``subject_id, device, sampling_rate_hz, n_samples``
                              plus ``format_version`` and, for generated
                              corpora, ``manifest_hash``

Numbers are written with 12 significant digits, so loading and re-writing
a canonical file reproduces it byte for byte.
"""

import enum
import json
import os

import numpy as np
import pandas as pd

from edastress.constants import CANONICAL_FORMAT_VERSION, STRESS
from edastress.errors import DataError, ParseError, SchemaError
from edastress.util.asserts import (
    assert_binary_labels, assert_finite, assert_positive, assert_same_length,
)

CSV_COLUMNS = ['t_s', 'eda_us', 'label']
SIDECAR_FIELDS = ('subject_id', 'device', 'sampling_rate_hz', 'n_samples')
FLOAT_FORMAT = '%.12g'


class Device(str, enum.Enum):
    CHEST = 'chest'
    WRIST = 'wrist'
    FINGER = 'finger'
    SYNTHETIC = 'synthetic'


class SignalRecord(object):
    """One subject/device EDA stream.

    `samples` are skin conductance values in microsiemens and `labels` the
    per-sample ground truth (0 non-stress, 1 stress).  Sample i was taken at
    `t0_s + i / sampling_rate_hz` seconds.  Arrays are stored read-only;
    derive new records instead of mutating.
    """

    def __init__(self, subject_id, device, sampling_rate_hz, samples, labels, t0_s=0.0):
        try:
            device = Device(device)
        except ValueError:
            raise SchemaError("Unknown device %r." % (device,))
        assert_positive(sampling_rate_hz, 'sampling_rate_hz', error=SchemaError)
        if not np.isfinite(t0_s):
            raise SchemaError("t0_s must be finite, got %r." % (t0_s,))

        samples = np.array(samples, dtype=float)
        labels = np.array(labels, dtype=np.int8)
        if samples.ndim != 1 or labels.ndim != 1:
            raise SchemaError("samples and labels must be one-dimensional.")
        assert_same_length(samples, labels, 'samples', 'labels', error=SchemaError)
        assert_finite(samples, 'samples of subject %s' % subject_id)
        assert_binary_labels(labels)
        samples.setflags(write=False)
        labels.setflags(write=False)

        self.subject_id = str(subject_id)
        self.device = device
        self.sampling_rate_hz = float(sampling_rate_hz)
        self.samples = samples
        self.labels = labels
        self.t0_s = float(t0_s)

    def __len__(self):
        return len(self.samples)

    def __repr__(self):
        return 'SignalRecord(subject=%s, device=%s, fs=%g, n=%d)' % (
            self.subject_id, self.device.value, self.sampling_rate_hz, len(self))

    def __eq__(self, other):
        if not isinstance(other, SignalRecord):
            return NotImplemented
        return (self.subject_id == other.subject_id
                and self.device == other.device
                and self.sampling_rate_hz == other.sampling_rate_hz
                and self.t0_s == other.t0_s
                and np.array_equal(self.samples, other.samples)
                and np.array_equal(self.labels, other.labels))

    __hash__ = None

    @property
    def duration_s(self):
        return len(self) / self.sampling_rate_hz

    @property
    def stress_fraction(self):
        if len(self) == 0:
            return 0.0
        return float(np.mean(self.labels == STRESS))

    def times(self):
        """Returns sample times in seconds, starting at `t0_s`."""
        return self.t0_s + np.arange(len(self)) / self.sampling_rate_hz

    def replace(self, **changes):
        """Returns a copy of this record with the given fields replaced."""
        fields = dict(
            subject_id=self.subject_id, device=self.device,
            sampling_rate_hz=self.sampling_rate_hz,
            samples=self.samples, labels=self.labels, t0_s=self.t0_s,
        )
        fields.update(changes)
        return SignalRecord(**fields)

    def stem(self):
        return '%s_%s' % (self.subject_id, self.device.value)

    @staticmethod
    def _get_meta_filename(csv_path):
        return os.path.splitext(str(csv_path))[0] + '.json'

    def save(self, out_dir, manifest_hash=None):
        """Writes this record in canonical format into `out_dir`.

        `manifest_hash` names the run that produced the record and goes into
        the sidecar when given.

        Returns the path of the CSV file; the sidecar sits next to it.
        """
        os.makedirs(out_dir, exist_ok=True)
        csv_path = os.path.join(out_dir, self.stem() + '.csv')
        frame = pd.DataFrame({
            't_s': self.times(),
            'eda_us': self.samples,
            'label': self.labels.astype(int),
        }, columns=CSV_COLUMNS)
        frame.to_csv(csv_path, index=False, float_format=FLOAT_FORMAT)

        meta = {
            'format_version': CANONICAL_FORMAT_VERSION,
            'subject_id': self.subject_id,
            'device': self.device.value,
            'sampling_rate_hz': self.sampling_rate_hz,
            'n_samples': len(self),
        }
        if manifest_hash is not None:
            meta['manifest_hash'] = manifest_hash
        with open(self._get_meta_filename(csv_path), 'w') as fout:
            json.dump(meta, fout, indent=2, sort_keys=True)
            fout.write('\n')
        return csv_path

    @staticmethod
    def load(csv_path):
        """Loads a SignalRecord from a canonical CSV file and its sidecar."""
        meta_path = SignalRecord._get_meta_filename(csv_path)
        if not os.path.exists(meta_path):
            raise SchemaError("Missing sidecar metadata %s." % meta_path)
        with open(meta_path) as fin:
            try:
                meta = json.load(fin)
            except ValueError as e:
                raise SchemaError("Unreadable sidecar %s: %s" % (meta_path, e))
        missing = [f for f in SIDECAR_FIELDS if f not in meta]
        if missing:
            raise SchemaError("Sidecar %s lacks fields %s." % (meta_path, missing))

        try:
            frame = pd.read_csv(csv_path, dtype=str, keep_default_na=False)
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise ParseError(csv_path, _parser_error_line(e), str(e).strip())
        if list(frame.columns) != CSV_COLUMNS:
            raise SchemaError("%s: header must be %s, got %s." % (
                csv_path, ','.join(CSV_COLUMNS), ','.join(frame.columns)))

        columns = {}
        for name in CSV_COLUMNS:
            parsed = pd.to_numeric(frame[name], errors='coerce').to_numpy(dtype=float)
            bad = ~np.isfinite(parsed)
            if np.any(bad):
                row = int(np.flatnonzero(bad)[0])
                # +2: one for the header, one for 1-based line numbers.
                raise ParseError(csv_path, row + 2, "non-numeric %s value %r" % (
                    name, frame[name].iloc[row]))
            columns[name] = parsed

        labels = columns['label']
        not_binary = ~np.isin(labels, (0.0, 1.0))
        if np.any(not_binary):
            row = int(np.flatnonzero(not_binary)[0])
            raise ParseError(csv_path, row + 2, "label must be 0 or 1, got %r" % (
                frame['label'].iloc[row]))
        t_s = columns['t_s']
        if len(t_s) > 1 and np.any(np.diff(t_s) <= 0):
            row = int(np.flatnonzero(np.diff(t_s) <= 0)[0]) + 1
            raise ParseError(csv_path, row + 2, "t_s is not strictly increasing")
        try:
            fs = float(meta['sampling_rate_hz'])
        except (TypeError, ValueError):
            raise SchemaError("%s: sampling_rate_hz %r is not a number." % (
                meta_path, meta['sampling_rate_hz']))
        t0_s = float(t_s[0]) if len(t_s) else 0.0
        if fs > 0 and len(t_s):
            expected = t0_s + np.arange(len(t_s)) / fs
            off_grid = ~np.isclose(t_s, expected, rtol=1e-10, atol=1e-3 / fs)
            if np.any(off_grid):
                row = int(np.flatnonzero(off_grid)[0])
                raise ParseError(csv_path, row + 2, "t_s %r is off the %g Hz grid from %r" % (
                    frame['t_s'].iloc[row], fs, t0_s))

        if int(meta['n_samples']) != len(frame):
            raise SchemaError("%s: sidecar declares %d samples, file holds %d." % (
                csv_path, int(meta['n_samples']), len(frame)))

        try:
            return SignalRecord(
                subject_id=meta['subject_id'],
                device=meta['device'],
                sampling_rate_hz=float(meta['sampling_rate_hz']),
                samples=columns['eda_us'],
                labels=labels.astype(np.int8),
                t0_s=t0_s,
            )
        except DataError as e:
            raise SchemaError("%s: %s" % (csv_path, e))


def _parser_error_line(error):
    """Best-effort line number out of a pandas parser message."""
    text = str(error)
    marker = 'line '
    if marker in text:
        digits = ''
        for ch in text[text.index(marker) + len(marker):]:
            if not ch.isdigit():
                break
            digits += ch
        if digits:
            return int(digits)
    return 0


def load_canonical(path):
    """Loads one canonical signal file (see module docstring)."""
    return SignalRecord.load(path)


def write_canonical(record, out_dir, manifest_hash=None):
    """Writes `record` in canonical format; returns the CSV path."""
    return record.save(out_dir, manifest_hash)


def load_canonical_dir(in_dir):
    """Loads every canonical record in `in_dir`, sorted by (subject, device)."""
    paths = sorted(
        os.path.join(in_dir, fn) for fn in os.listdir(in_dir) if fn.endswith('.csv')
    )
    if not paths:
        raise DataError("No canonical signal files in %s." % in_dir)
    records = [SignalRecord.load(p) for p in paths]
    return sorted(records, key=lambda r: (r.subject_id, r.device.value))

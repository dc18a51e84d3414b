"""
The feature file: one row per retained window.

    <name>.csv    header ``subject_id,t_start_s,label,f01_eda_mean,...,f25_d2_mean_abs``
    <name>.json   feature_set_version, dataset, window parameters, manifest hash
"""

import json
import os

import numpy as np
import pandas as pd

from edastress.constants import FEATURE_SET_VERSION, SHIFT_S, WINDOW_S
from edastress.errors import ContractError, ParseError, SchemaError
from edastress.feature_extraction.eda_features import FEATURE_NAMES, N_FEATURES
from edastress.util.asserts import assert_binary_labels

KEY_COLUMNS = ['subject_id', 't_start_s', 'label']
FLOAT_FORMAT = '%.12g'


class FeatureTable(object):
    """A dataset's windows as aligned arrays, ordered by (subject, start time)."""

    def __init__(self, subject_ids, t_start_s, labels, X, dataset='dataset',
                 window_s=WINDOW_S, shift_s=SHIFT_S,
                 feature_set_version=FEATURE_SET_VERSION, meta=None):
        X = np.asarray(X, dtype=float).reshape(-1, N_FEATURES)
        subject_ids = np.asarray(subject_ids, dtype=str)
        t_start_s = np.asarray(t_start_s, dtype=float)
        labels = np.asarray(labels, dtype=int)
        if not len(subject_ids) == len(t_start_s) == len(labels) == len(X):
            raise ContractError("Feature table columns differ in length.")
        assert_binary_labels(labels, 'window labels')

        order = np.lexsort((t_start_s, subject_ids))
        self.subject_ids = subject_ids[order]
        self.t_start_s = t_start_s[order]
        self.labels = labels[order]
        self.X = X[order]
        self.dataset = dataset
        self.window_s = float(window_s)
        self.shift_s = float(shift_s)
        self.feature_set_version = feature_set_version
        self.meta = dict(meta or {})

    @classmethod
    def from_windows(cls, rows, **kwargs):
        """Builds a table from WindowFeatures."""
        rows = list(rows)
        return cls(
            subject_ids=[r.subject_id for r in rows],
            t_start_s=[r.t_start_s for r in rows],
            labels=[r.label for r in rows],
            X=np.array([r.features for r in rows]).reshape(-1, N_FEATURES),
            **kwargs
        )

    def __len__(self):
        return len(self.labels)

    def __repr__(self):
        return 'FeatureTable(dataset=%s, windows=%d, subjects=%d)' % (
            self.dataset, len(self), len(self.subjects()))

    def subjects(self):
        return sorted(set(self.subject_ids.tolist()))

    def _like(self, mask):
        return FeatureTable(
            self.subject_ids[mask], self.t_start_s[mask], self.labels[mask], self.X[mask],
            dataset=self.dataset, window_s=self.window_s, shift_s=self.shift_s,
            feature_set_version=self.feature_set_version, meta=self.meta,
        )

    def for_subject(self, subject_id):
        return self._like(self.subject_ids == subject_id)

    def class_counts(self):
        return int(np.sum(self.labels == 0)), int(np.sum(self.labels == 1))

    @staticmethod
    def concat(tables, dataset=None):
        """Stacks tables that share one feature-set version and window setup."""
        tables = list(tables)
        if not tables:
            raise ContractError("Nothing to concatenate.")
        first = tables[0]
        for t in tables[1:]:
            if t.feature_set_version != first.feature_set_version:
                raise SchemaError("Mixed feature-set versions: %s vs %s." % (
                    first.feature_set_version, t.feature_set_version))
            if (t.window_s, t.shift_s) != (first.window_s, first.shift_s):
                raise SchemaError("Mixed window parameters in one dataset.")
        return FeatureTable(
            np.concatenate([t.subject_ids for t in tables]),
            np.concatenate([t.t_start_s for t in tables]),
            np.concatenate([t.labels for t in tables]),
            np.concatenate([t.X for t in tables]),
            dataset=dataset or first.dataset,
            window_s=first.window_s, shift_s=first.shift_s,
            feature_set_version=first.feature_set_version, meta=first.meta,
        )

    def to_frame(self):
        frame = pd.DataFrame(self.X, columns=list(FEATURE_NAMES))
        frame.insert(0, 'label', self.labels)
        frame.insert(0, 't_start_s', self.t_start_s)
        frame.insert(0, 'subject_id', self.subject_ids)
        return frame

    @staticmethod
    def _get_meta_filename(csv_path):
        return os.path.splitext(str(csv_path))[0] + '.json'

    def save(self, csv_path, manifest_hash=None):
        """Writes the CSV and its JSON sidecar."""
        directory = os.path.dirname(os.path.abspath(csv_path))
        os.makedirs(directory, exist_ok=True)
        self.to_frame().to_csv(csv_path, index=False, float_format=FLOAT_FORMAT)
        meta = dict(self.meta)
        meta.update({
            'feature_set_version': self.feature_set_version,
            'feature_names': list(FEATURE_NAMES),
            'dataset': self.dataset,
            'window_s': self.window_s,
            'shift_s': self.shift_s,
            'n_windows': len(self),
            'manifest_hash': manifest_hash,
        })
        with open(self._get_meta_filename(csv_path), 'w') as fout:
            json.dump(meta, fout, indent=2, sort_keys=True)
            fout.write('\n')
        return csv_path

    @staticmethod
    def load(csv_path):
        meta_path = FeatureTable._get_meta_filename(csv_path)
        if not os.path.exists(meta_path):
            raise SchemaError("Missing feature sidecar %s." % meta_path)
        with open(meta_path) as fin:
            meta = json.load(fin)
        version = meta.get('feature_set_version')
        if version != FEATURE_SET_VERSION:
            raise SchemaError("%s was built with feature set %r; this build uses %r." % (
                csv_path, version, FEATURE_SET_VERSION))

        try:
            frame = pd.read_csv(csv_path, dtype={'subject_id': str})
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise ParseError(csv_path, 0, str(e).strip())
        expected = KEY_COLUMNS + list(FEATURE_NAMES)
        if list(frame.columns) != expected:
            raise SchemaError("%s: unexpected header %s." % (csv_path, ','.join(frame.columns)))
        values = frame[expected[1:]].apply(pd.to_numeric, errors='coerce')
        bad = ~np.isfinite(values.to_numpy(dtype=float)).all(axis=1)
        if bad.any():
            raise ParseError(csv_path, int(np.flatnonzero(bad)[0]) + 2,
                             "non-numeric or non-finite feature value")

        extra = dict((k, v) for k, v in meta.items() if k not in (
            'feature_set_version', 'feature_names', 'dataset', 'window_s', 'shift_s',
            'n_windows', 'manifest_hash'))
        return FeatureTable(
            frame['subject_id'].to_numpy(dtype=str),
            values['t_start_s'].to_numpy(dtype=float),
            values['label'].to_numpy(dtype=int),
            values[list(FEATURE_NAMES)].to_numpy(dtype=float),
            dataset=meta.get('dataset', 'dataset'),
            window_s=meta.get('window_s', WINDOW_S),
            shift_s=meta.get('shift_s', SHIFT_S),
            feature_set_version=version,
            meta=extra,
        )

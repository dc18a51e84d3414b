"""
Contains the implementation of the two evaluation protocols.

    user-dependent     for every subject: stratified hold-out of its own
                       windows -> grid search on the rest -> BA on the hold-out
    user-independent   for every subject: grid search on all other subjects'
                       pooled windows -> BA on the held-out subject

Standardization and grid search run inside every split, so no statistic
of a test window reaches training.  Subjects (or subject/family pairs)
that cannot be evaluated are skipped and logged, never imputed.
"""

import dataclasses
import enum
import json
import logging
import os

import numpy as np
import pandas as pd

from edastress.constants import TEST_FRACTION
from edastress.errors import ContractError, ProtocolError, SchemaError
from edastress.learners.grid_search import grid_search
from edastress.learners.grids import ALL_FAMILIES, Family
from edastress.protocol.metrics import balanced_accuracy
from edastress.protocol.splits import logo_splits, stratified_split

logger = logging.getLogger(__name__)

SCORE_COLUMNS = ['dataset', 'subject_id', 'family', 'protocol', 'balanced_accuracy']


class Protocol(str, enum.Enum):
    USER_DEPENDENT = 'user_dependent'
    USER_INDEPENDENT = 'user_independent'

    @staticmethod
    def parse(name):
        if isinstance(name, Protocol):
            return name
        aliases = {'ud': Protocol.USER_DEPENDENT, 'ui': Protocol.USER_INDEPENDENT}
        name = str(name).lower()
        if name in aliases:
            return aliases[name]
        try:
            return Protocol(name)
        except ValueError:
            raise ContractError("Unknown protocol %r." % name)


@dataclasses.dataclass(frozen=True)
class BAScore(object):
    dataset: str
    subject_id: str
    family: Family
    protocol: Protocol
    balanced_accuracy: float

    @property
    def key(self):
        return (self.dataset, self.subject_id, self.family, self.protocol)


@dataclasses.dataclass(frozen=True)
class SkipRecord(object):
    dataset: str
    subject_id: str
    family: str
    protocol: str
    reason: str


def _sort_key(key):
    dataset, subject_id, family, protocol = key
    return (dataset, subject_id, ALL_FAMILIES.index(family), protocol.value)


class ScoreTable(object):
    """BAScore rows in canonical (dataset, subject, family) order plus a skip log."""

    def __init__(self, scores=(), skips=(), meta=None):
        self._scores = {}
        self.skips = []
        self.meta = dict(meta or {})
        for score in scores:
            self.add(score)
        for skip in skips:
            self.skips.append(skip)

    def add(self, score):
        if score.key in self._scores:
            raise ContractError("Duplicate score for %s." % (score.key,))
        self._scores[score.key] = score

    def skip(self, dataset, subject_id, family, protocol, reason):
        logger.warning("skipped %s/%s %s %s: %s", dataset, subject_id,
                       family, protocol, reason)
        self.skips.append(SkipRecord(dataset, str(subject_id), str(family),
                                     str(protocol), str(reason)))

    @property
    def scores(self):
        return [self._scores[k] for k in sorted(self._scores, key=_sort_key)]

    def __len__(self):
        return len(self._scores)

    def __iter__(self):
        return iter(self.scores)

    def select(self, protocol=None, family=None, dataset=None):
        protocol = None if protocol is None else Protocol.parse(protocol)
        family = None if family is None else Family.parse(family)
        return ScoreTable([
            s for s in self.scores
            if (protocol is None or s.protocol == protocol)
            and (family is None or s.family == family)
            and (dataset is None or s.dataset == dataset)
        ], meta=self.meta)

    def values(self):
        return np.array([s.balanced_accuracy for s in self.scores], dtype=float)

    @staticmethod
    def concat(tables):
        merged = ScoreTable()
        for table in tables:
            for score in table.scores:
                merged.add(score)
            merged.skips.extend(table.skips)
        return merged

    def to_frame(self):
        return pd.DataFrame(
            [[s.dataset, s.subject_id, s.family.value, s.protocol.value, s.balanced_accuracy]
             for s in self.scores],
            columns=SCORE_COLUMNS,
        )

    @staticmethod
    def _get_meta_filename(csv_path):
        return os.path.splitext(str(csv_path))[0] + '.json'

    def save(self, csv_path, manifest_hash=None):
        os.makedirs(os.path.dirname(os.path.abspath(csv_path)), exist_ok=True)
        self.to_frame().to_csv(csv_path, index=False, float_format='%.12g')
        meta = dict(self.meta)
        meta.update({
            'n_scores': len(self),
            'skips': [dataclasses.asdict(s) for s in self.skips],
            'manifest_hash': manifest_hash,
        })
        with open(self._get_meta_filename(csv_path), 'w') as fout:
            json.dump(meta, fout, indent=2, sort_keys=True)
            fout.write('\n')
        return csv_path

    @staticmethod
    def load(csv_path):
        frame = pd.read_csv(csv_path, dtype={'dataset': str, 'subject_id': str})
        if list(frame.columns) != SCORE_COLUMNS:
            raise SchemaError("%s: score table header must be %s." % (
                csv_path, ','.join(SCORE_COLUMNS)))
        meta, skips = {}, []
        meta_path = ScoreTable._get_meta_filename(csv_path)
        if os.path.exists(meta_path):
            with open(meta_path) as fin:
                meta = json.load(fin)
            skips = [SkipRecord(**s) for s in meta.pop('skips', [])]
        scores = [
            BAScore(row.dataset, row.subject_id, Family.parse(row.family),
                    Protocol.parse(row.protocol), float(row.balanced_accuracy))
            for row in frame.itertuples(index=False)
        ]
        return ScoreTable(scores, skips, meta)


def _score_split(table, family, train, test, seed, grid, options):
    X, y = table.X, table.labels
    model = grid_search(family, X[train], y[train], seed=seed, grid=grid, options=options)
    return balanced_accuracy(y[test], model.predict(X[test]))


def _grid_for(grids, family):
    if not grids:
        return None
    return grids.get(family, grids.get(family.value))


def run_user_dependent(table, families=ALL_FAMILIES, seed=0, test_frac=TEST_FRACTION,
                       grids=None, options=None, dataset=None):
    """One stratified hold-out per subject; one score per (subject, family).

    :param table: FeatureTable of one dataset.
    :param grids: optional {family: grid} overriding the table grids.
    """
    dataset = dataset or table.dataset
    families = [Family.parse(f) for f in families]
    scores = ScoreTable(meta={'test_frac': test_frac})
    for subject in table.subjects():
        sub = table.for_subject(subject)
        try:
            plan = stratified_split(sub.labels, test_frac, seed, subject_id=subject)
        except ProtocolError as e:
            for family in families:
                scores.skip(dataset, subject, family.value, Protocol.USER_DEPENDENT.value, e)
            continue
        for family in families:
            try:
                ba = _score_split(sub, family, plan.train, plan.test, seed,
                                  _grid_for(grids, family), options)
            except ProtocolError as e:
                scores.skip(dataset, subject, family.value, Protocol.USER_DEPENDENT.value, e)
                continue
            scores.add(BAScore(dataset, subject, family, Protocol.USER_DEPENDENT, ba))
        logger.info("%s/%s: user-dependent done", dataset, subject)
    return scores


def run_user_independent(table, families=ALL_FAMILIES, seed=0, grids=None, options=None,
                         dataset=None):
    """Leave-one-subject-out; the score is attributed to the held-out subject.

    Grid search is nested: each fold selects hyperparameters on its own
    training subjects only.
    """
    dataset = dataset or table.dataset
    families = [Family.parse(f) for f in families]
    scores = ScoreTable(meta={'grid_search': 'nested_per_fold'})
    for plan in logo_splits(table.subject_ids):
        held_out = plan.held_out
        if len(np.unique(table.labels[plan.test])) < 2:
            for family in families:
                scores.skip(dataset, held_out, family.value, Protocol.USER_INDEPENDENT.value,
                            "held-out subject has a single class")
            continue
        for family in families:
            try:
                ba = _score_split(table, family, plan.train, plan.test, seed,
                                  _grid_for(grids, family), options)
            except ProtocolError as e:
                scores.skip(dataset, held_out, family.value,
                            Protocol.USER_INDEPENDENT.value, e)
                continue
            scores.add(BAScore(dataset, held_out, family, Protocol.USER_INDEPENDENT, ba))
        logger.info("%s/%s: user-independent fold done", dataset, held_out)
    return scores


def summarize_per_subject(scores, family=Family.SVM, protocol=Protocol.USER_DEPENDENT):
    """Per-dataset mean/median/min/max of the selected scores.

    returns a DataFrame indexed by dataset, with an 'all' row last.
    """
    frame = scores.select(protocol=protocol, family=family).to_frame()
    if frame.empty:
        raise ContractError("No %s %s scores to summarize." % (
            Family.parse(family).value, Protocol.parse(protocol).value))
    stats = ['count', 'mean', 'median', 'min', 'max']
    summary = frame.groupby('dataset')['balanced_accuracy'].agg(stats)
    summary.loc['all'] = frame['balanced_accuracy'].agg(stats).to_numpy()
    summary['count'] = summary['count'].astype(int)
    return summary

"""
The two comparisons run on balanced-accuracy score tables.

Hypothesis 1: user-independent vs user-dependent models.
    H0: equal medians.  Ha: user-dependent scores are higher, tested as
    x = user-independent, y = user-dependent with alternative 'less'.
    alpha 0.001, 99 % one-sided confidence interval on the UI - UD shift.

Hypothesis 2: high-resolution (chest) vs low-resolution (wrist) signals,
    user-dependent scores only.  Two-sided at alpha 0.05 with a 95 %
    interval on the chest - wrist shift.
"""

import dataclasses
import json
import logging
import os

import numpy as np
import pandas as pd
from scipy import stats

from edastress.constants import (
    ALPHA_HYPOTHESIS1, ALPHA_HYPOTHESIS2, CI_LEVEL_HYPOTHESIS1, CI_LEVEL_HYPOTHESIS2,
)
from edastress.errors import AuditError, StatisticsError
from edastress.protocol.evaluator import BAScore, Protocol
from edastress.stats.normality import normality_report
from edastress.stats.rank_tests import (
    Alternative, all_equal, identical_samples_result, wilcoxon_rank_sum,
)

logger = logging.getLogger(__name__)

REPORT_FILENAME = 'report_hypothesis%d.json'


def _as_scores(scores):
    """(values, keys) of a ScoreTable, BAScore sequence or plain numbers."""
    scores = list(scores)
    if scores and isinstance(scores[0], BAScore):
        return (np.array([s.balanced_accuracy for s in scores], dtype=float),
                [s for s in scores])
    return np.asarray(scores, dtype=float), None


def paired_differences(x, y, x_keys=None, y_keys=None, key=None):
    """x - y over the observations present in both groups.

    Scores are aligned on `key(score)`; plain numbers pair by position and
    must have equal lengths.
    """
    if x_keys is None or y_keys is None:
        if len(x) != len(y):
            return np.array([])
        return np.asarray(x) - np.asarray(y)
    y_by_key = dict((key(s), s.balanced_accuracy) for s in y_keys)
    return np.array([s.balanced_accuracy - y_by_key[key(s)]
                     for s in x_keys if key(s) in y_by_key], dtype=float)


def qq_points(values):
    """Normal probability-plot pairs, as a `theoretical_q,sample_q` frame."""
    (theoretical, ordered), _ = stats.probplot(np.asarray(values, dtype=float), dist='norm')
    return pd.DataFrame({'theoretical_q': theoretical, 'sample_q': ordered})


def histogram_bins(values):
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins='auto')
    return pd.DataFrame({'bin_left': edges[:-1], 'bin_right': edges[1:], 'count': counts})


def _normality_or_none(name, values, ad_table, notes):
    try:
        return normality_report(values, ad_table)
    except StatisticsError as e:
        logger.warning("normality of %s not testable: %s", name, e)
        notes[name] = str(e)
        return None


@dataclasses.dataclass
class HypothesisReport(object):
    hypothesis: int
    x_name: str
    y_name: str
    test: object
    medians: dict
    normality: dict
    normality_notes: dict
    decision: str
    qq: dict
    histograms: dict

    def to_dict(self, manifest_hash=None):
        return {
            'hypothesis': self.hypothesis,
            'groups': {'x': self.x_name, 'y': self.y_name},
            'medians': self.medians,
            'test': self.test.to_dict(),
            'normality': dict(
                (name, None if r is None else r.to_dict())
                for name, r in sorted(self.normality.items())),
            'normality_notes': self.normality_notes,
            'decision': self.decision,
            'manifest_hash': manifest_hash,
        }

    def save(self, out_dir, manifest_hash=None):
        """Writes the JSON report plus one CSV per plot series; returns the paths."""
        os.makedirs(out_dir, exist_ok=True)
        paths = []
        report_path = os.path.join(out_dir, REPORT_FILENAME % self.hypothesis)
        with open(report_path, 'w') as fout:
            json.dump(self.to_dict(manifest_hash), fout, indent=2, sort_keys=True)
            fout.write('\n')
        paths.append(report_path)
        for prefix, frames in (('qq', self.qq), ('hist', self.histograms)):
            for name, frame in sorted(frames.items()):
                path = os.path.join(out_dir, 'h%d_%s_%s.csv' % (self.hypothesis, prefix, name))
                frame.to_csv(path, index=False, float_format='%.12g')
                paths.append(path)
        return paths


def _decision_text(result, statement):
    if result.reject_null:
        return "Reject H0 (p = %.4g < alpha = %g): %s." % (
            result.p_value, result.alpha, statement)
    return "Fail to reject H0 (p = %.4g >= alpha = %g): no evidence that %s." % (
        result.p_value, result.alpha, statement)


def _compare(hypothesis, x, y, x_name, y_name, alternative, alpha, ci_level,
             ad_table, pair_key, statement, expected_n):
    x_values, x_keys = _as_scores(x)
    y_values, y_keys = _as_scores(y)
    if expected_n is not None:
        for name, values in ((x_name, x_values), (y_name, y_values)):
            if len(values) != expected_n:
                raise AuditError("%s holds %d scores; the run manifest expects %d." % (
                    name, len(values), expected_n))

    if all_equal(x_values, y_values):
        logger.warning("hypothesis %d: every score equals %g; reporting no difference",
                       hypothesis, x_values[0])
        result = identical_samples_result(x_values, y_values, alternative, alpha, ci_level)
    else:
        result = wilcoxon_rank_sum(x_values, y_values, alternative, alpha, ci_level)
    diffs = paired_differences(x_values, y_values, x_keys, y_keys, pair_key)
    diff_name = '%s_minus_%s' % (x_name, y_name)

    notes = {}
    normality = {
        x_name: _normality_or_none(x_name, x_values, ad_table, notes),
        y_name: _normality_or_none(y_name, y_values, ad_table, notes),
    }
    qq = {x_name: qq_points(x_values), y_name: qq_points(y_values)}
    histograms = {}
    if len(diffs):
        normality[diff_name] = _normality_or_none(diff_name, diffs, ad_table, notes)
        qq[diff_name] = qq_points(diffs)
        histograms[diff_name] = histogram_bins(diffs)
    else:
        notes[diff_name] = 'no paired observations'

    report = HypothesisReport(
        hypothesis=hypothesis,
        x_name=x_name,
        y_name=y_name,
        test=result,
        medians={x_name: float(np.median(x_values)), y_name: float(np.median(y_values))},
        normality=normality,
        normality_notes=notes,
        decision=_decision_text(result, statement),
        qq=qq,
        histograms=histograms,
    )
    logger.info("hypothesis %d: %s", hypothesis, report.decision)
    return report


def run_hypothesis1(ba_ud, ba_ui, alpha=ALPHA_HYPOTHESIS1, ci_level=CI_LEVEL_HYPOTHESIS1,
                    ad_table='size_adjusted', expected_n=None):
    """User-dependent vs user-independent balanced accuracy.

    :param ba_ud, ba_ui: ScoreTables, BAScore sequences or plain values.
    :param expected_n: group size recorded in the run manifest, if any.
    """
    return _compare(
        1, ba_ui, ba_ud, 'user_independent', 'user_dependent',
        Alternative.LESS, alpha, ci_level, ad_table,
        pair_key=lambda s: (s.dataset, s.subject_id, s.family),
        statement='user-dependent models score higher than user-independent ones',
        expected_n=expected_n,
    )


def run_hypothesis2(ba_chest, ba_wrist, alpha=ALPHA_HYPOTHESIS2, ci_level=CI_LEVEL_HYPOTHESIS2,
                    ad_table='size_adjusted', expected_n=None):
    """High- vs low-resolution signals; user-dependent scores only."""
    for name, group in (('chest', ba_chest), ('wrist', ba_wrist)):
        for score in group:
            if isinstance(score, BAScore) and score.protocol != Protocol.USER_DEPENDENT:
                raise AuditError("Hypothesis 2 takes user-dependent scores only; "
                                 "%s group holds a %s score." % (name, score.protocol.value))
    return _compare(
        2, ba_chest, ba_wrist, 'chest', 'wrist',
        Alternative.TWO_SIDED, alpha, ci_level, ad_table,
        pair_key=lambda s: (s.subject_id, s.family),
        statement='signal resolution changes the balanced accuracy',
        expected_n=expected_n,
    )

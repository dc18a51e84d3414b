"""
Train/test split plans.

    stratified_holdout   per-class random hold-out of round(frac * n_c) windows
    logo                 leave one subject out
"""

import dataclasses
import enum

import numpy as np
from sklearn.model_selection import LeaveOneGroupOut

from edastress.constants import NON_STRESS, STRESS, TEST_FRACTION
from edastress.errors import ProtocolError
from edastress.util.math_utils import make_rng, round_half_up


class SplitStrategy(str, enum.Enum):
    STRATIFIED_HOLDOUT = 'stratified_holdout'
    LOGO = 'logo'


@dataclasses.dataclass(frozen=True, eq=False)
class SplitPlan(object):
    train: np.ndarray
    test: np.ndarray
    strategy: SplitStrategy
    held_out: str = None


def stratified_split(labels, test_frac=TEST_FRACTION, seed=0, subject_id=None):
    """Holds out round(test_frac * n_c) windows of each class, at least one.

    Indices are drawn uniformly per class from a PCG64 stream keyed by
    `seed`; both index arrays come back sorted.
    """
    labels = np.asarray(labels, dtype=int)
    if not 0.0 < test_frac < 1.0:
        raise ProtocolError("test_frac must lie in (0, 1), got %r." % test_frac)
    rng = make_rng(seed)
    test = []
    for cls in (NON_STRESS, STRESS):
        members = np.flatnonzero(labels == cls)
        if len(members) < 2:
            raise ProtocolError("Subject %s has %d window(s) of class %d; need 2." % (
                subject_id if subject_id is not None else '?', len(members), cls))
        n_test = min(max(1, round_half_up(test_frac * len(members))), len(members) - 1)
        test.append(rng.permutation(members)[:n_test])
    test = np.sort(np.concatenate(test))
    train = np.setdiff1d(np.arange(len(labels)), test)
    return SplitPlan(train=train, test=test, strategy=SplitStrategy.STRATIFIED_HOLDOUT,
                     held_out=subject_id)


def logo_splits(groups):
    """One plan per subject (sorted): test = its windows, train = the rest."""
    groups = np.asarray(groups, dtype=str)
    subjects = sorted(set(groups.tolist()))
    if len(subjects) < 2:
        raise ProtocolError("Leave-one-subject-out needs at least 2 subjects, got %d." % (
            len(subjects)))
    plans = []
    for train, test in LeaveOneGroupOut().split(np.zeros(len(groups)), groups=groups):
        plans.append(SplitPlan(train=train, test=test, strategy=SplitStrategy.LOGO,
                               held_out=str(groups[test[0]])))
    return sorted(plans, key=lambda p: p.held_out)

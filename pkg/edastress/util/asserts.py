"""
Contains custom asserts
"""

import numpy as np

from edastress.constants import NON_STRESS, STRESS
from edastress.errors import DataError, DomainError, ProtocolError


def assert_positive(value, name, error=DomainError):
    if not value > 0:
        raise error("%s must be positive, got %r." % (name, value))


def assert_finite(values, what, error=DataError):
    values = np.asarray(values, dtype=float)
    if values.size and not np.all(np.isfinite(values)):
        first = int(np.flatnonzero(~np.isfinite(values).ravel())[0])
        raise error("%s contains a non-finite value at flat index %d." % (what, first))


def assert_binary_labels(labels, what='labels'):
    labels = np.asarray(labels)
    bad = ~np.isin(labels, (NON_STRESS, STRESS))
    if np.any(bad):
        raise DataError(
            "%s must be 0 or 1, got %r at index %d."
            % (what, labels[bad][0], int(np.flatnonzero(bad)[0]))
        )


def assert_same_length(a, b, what_a, what_b, error=DataError):
    if len(a) != len(b):
        raise error(
            "%s and %s differ in length: %d != %d."
            % (what_a, what_b, len(a), len(b))
        )


def assert_both_classes(labels, what='training labels', error=ProtocolError):
    present = set(np.unique(np.asarray(labels)).tolist())
    if present != {NON_STRESS, STRESS}:
        raise error("%s must contain both classes, got %s." % (what, sorted(present)))

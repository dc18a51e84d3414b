"""Evaluation metrics."""

import numpy as np
from sklearn.metrics import confusion_matrix

from edastress.constants import NON_STRESS, STRESS
from edastress.errors import MetricError
from edastress.util.asserts import assert_same_length


def balanced_accuracy(y_true, y_pred):
    """(TPR + TNR) / 2 from the binary confusion matrix.

    Undefined unless `y_true` holds both classes.
    """
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    assert_same_length(y_true, y_pred, 'y_true', 'y_pred', error=MetricError)
    if len(np.unique(y_true)) != 2:
        raise MetricError("Balanced accuracy needs both classes in y_true.")
    (tn, fp), (fn, tp) = confusion_matrix(y_true, y_pred, labels=[NON_STRESS, STRESS])
    tpr = tp / float(tp + fn)
    tnr = tn / float(tn + fp)
    return 0.5 * (tpr + tnr)

"""
Grid-search model selection by stratified k-fold balanced accuracy.
"""

import logging

import numpy as np
from sklearn.model_selection import GridSearchCV, StratifiedKFold

from edastress.constants import FALLBACK_CV_FOLDS, INNER_CV_FOLDS
from edastress.errors import ProtocolError
from edastress.learners.estimators import _check_fit_input
from edastress.learners.grids import Family, candidate_points
from edastress.learners.models import (
    LearnerOptions, ModelSpec, make_estimator, sklearn_grid_point, train,
)

logger = logging.getLogger(__name__)


def choose_folds(y, folds=INNER_CV_FOLDS, fallback=FALLBACK_CV_FOLDS):
    """Number of stratified folds the labels support.

    returns (n_folds, fell_back)
    """
    smallest = int(np.min(np.bincount(np.asarray(y, dtype=int), minlength=2)))
    if smallest >= folds:
        return folds, False
    if smallest >= fallback:
        return fallback, True
    raise ProtocolError(
        "Smallest class has %d samples; %d-fold cross-validation is infeasible." % (
            smallest, fallback))


def grid_search(family, X, y, seed=0, grid=None, options=None):
    """Selects the best grid point of `family` and refits it on all of (X, y).

    Every candidate is scored by the mean balanced accuracy over stratified
    folds; the first maximum in grid-declaration order wins.

    :param grid: rows or dict overriding the family's table grid.
    :returns: TrainedModel whose metadata records the selection.
    """
    family = Family.parse(family)
    options = options or LearnerOptions()
    X, y = _check_fit_input(X, y)
    points = candidate_points(family, grid)

    n_folds, fell_back = choose_folds(y)
    if fell_back:
        logger.warning("%s: a class has fewer than %d samples; using %d-fold CV",
                       family.value, INNER_CV_FOLDS, n_folds)

    search = GridSearchCV(
        make_estimator(family, seed=seed, options=options),
        # One single-valued dict per point keeps declaration order.
        [dict((k, [v]) for k, v in sklearn_grid_point(family, p).items())
         for p in points],
        scoring='balanced_accuracy',
        cv=StratifiedKFold(n_splits=n_folds, shuffle=True, random_state=seed),
        refit=False,
        error_score='raise',
        n_jobs=options.n_jobs,
    )
    search.fit(X, y)
    scores = search.cv_results_['mean_test_score']
    best = int(np.argmax(scores))

    model = train(ModelSpec(family, points[best]), X, y, seed, options)
    model.metadata.update({
        'selected': dict(points[best]),
        'inner_cv_balanced_accuracy': float(scores[best]),
        'cv_folds': n_folds,
        'cv_fallback': fell_back,
        'n_candidates': len(points),
    })
    logger.debug("%s: selected %s (inner BA %s)", family.value, points[best],
                 model.metadata['inner_cv_balanced_accuracy'])
    return model

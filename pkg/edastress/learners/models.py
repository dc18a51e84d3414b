"""
Model specs, fitted models and their JSON model files.

Training fits the family's estimator, then exports its fitted state into
plain arrays; prediction always runs on those exported arrays, so a model
predicts identically before and after a save/load round trip.
"""

import dataclasses
import json
import logging

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.ensemble import RandomForestClassifier
from sklearn.neighbors import KNeighborsClassifier
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import StandardScaler
from sklearn.svm import SVC

from edastress.constants import MODEL_FORMAT_VERSION, NON_STRESS, STRESS
from edastress.errors import ContractError, SchemaError
from edastress.learners.estimators import (
    OneHiddenLayerMLP, WeightedLogisticRegression, _check_fit_input, mlp_forward,
)
from edastress.learners.grids import Family
from edastress.util.asserts import assert_finite

logger = logging.getLogger(__name__)

SVM_KERNELS = ('linear', 'rbf')


@dataclasses.dataclass(frozen=True)
class LearnerOptions(object):
    """Switches outside the hyperparameter grids."""

    svm_kernel: str = 'linear'
    mlp_class_weight: bool = False
    n_jobs: int = 1

    def __post_init__(self):
        if self.svm_kernel not in SVM_KERNELS:
            raise ContractError("svm_kernel must be one of %s." % (SVM_KERNELS,))


@dataclasses.dataclass(frozen=True)
class ModelSpec(object):
    family: Family
    hyperparameters: dict

    def __post_init__(self):
        object.__setattr__(self, 'family', Family.parse(self.family))
        object.__setattr__(self, 'hyperparameters', dict(self.hyperparameters))

    @property
    def standardize(self):
        return self.family.standardize

    @property
    def class_weight_mode(self):
        return self.hyperparameters.get('class_weight') or 'none'

    def to_dict(self):
        return {'family': self.family.value, 'hyperparameters': dict(self.hyperparameters)}

    @staticmethod
    def from_dict(values):
        return ModelSpec(values['family'], values['hyperparameters'])


class Standardizer(object):
    """Per-feature centering and scaling fitted on training rows only.

    Constant features have scale 1, so they are centered but not scaled.
    """

    def __init__(self, mean, scale):
        self.mean = np.asarray(mean, dtype=float)
        self.scale = np.asarray(scale, dtype=float)

    @staticmethod
    def fit(X):
        scaler = StandardScaler().fit(np.asarray(X, dtype=float))
        return Standardizer(scaler.mean_, scaler.scale_)

    def transform(self, X):
        return (np.asarray(X, dtype=float) - self.mean) / self.scale

    def to_dict(self):
        return {'mean': self.mean.tolist(), 'scale': self.scale.tolist()}

    @staticmethod
    def from_dict(values):
        return Standardizer(values['mean'], values['scale'])


def _sklearn_class_weight(mode):
    # Library 'balanced' weights are n / (2 n_c), the same as ours.
    return 'balanced' if mode == 'balance' else None


def make_estimator(family, hyperparameters=None, seed=0, options=None):
    """Unfitted pipeline for `family`, standardizing first where required."""
    family = Family.parse(family)
    options = options or LearnerOptions()
    hp = dict(hyperparameters or {})
    if family == Family.LR:
        clf = WeightedLogisticRegression(C=hp.get('C', 1.0), class_weight=hp.get('class_weight'))
    elif family == Family.RF:
        clf = RandomForestClassifier(
            n_estimators=hp.get('n_estimators', 500),
            min_samples_split=hp.get('min_samples_split', 2),
            min_samples_leaf=hp.get('min_samples_leaf', 1),
            class_weight=_sklearn_class_weight(hp.get('class_weight')),
            criterion='gini', max_features='sqrt', random_state=seed,
        )
    elif family == Family.SVM:
        clf = SVC(
            C=hp.get('C', 1.0), kernel=options.svm_kernel, gamma='scale',
            class_weight=_sklearn_class_weight(hp.get('class_weight')),
        )
    elif family == Family.MLP:
        clf = OneHiddenLayerMLP(
            hidden_layer_sizes=hp.get('hidden_layer_sizes', 64),
            class_weight='balance' if options.mlp_class_weight else None,
            random_state=seed,
        )
    else:
        clf = KNeighborsClassifier(
            n_neighbors=hp.get('n_neighbors', 5), weights=hp.get('weights', 'uniform'),
            algorithm='brute', metric='euclidean',
        )
    steps = [('clf', clf)]
    if family.standardize:
        steps.insert(0, ('scale', StandardScaler()))
    return Pipeline(steps)


def sklearn_grid_point(family, point):
    """Maps a grid point onto pipeline parameter names and values."""
    library_weights = Family.parse(family) in (Family.RF, Family.SVM)
    params = {}
    for name, value in point.items():
        if name == 'class_weight' and library_weights:
            value = _sklearn_class_weight(value)
        params['clf__' + name] = value
    return params


def _export_tree(tree):
    value = tree.value[:, 0, :].astype(float)
    totals = value.sum(axis=1, keepdims=True)
    totals[totals == 0] = 1.0
    return {
        'left': tree.children_left.tolist(),
        'right': tree.children_right.tolist(),
        'feature': tree.feature.tolist(),
        'threshold': tree.threshold.tolist(),
        'value': (value / totals).tolist(),
    }


def export_params(family, clf, X, y, options):
    """Fitted state of `clf` as JSON-safe lists.

    `X` is the (standardized) training matrix the classifier saw.
    """
    if family == Family.LR:
        return {'coef': clf.coef_.tolist(), 'intercept': clf.intercept_}
    if family == Family.MLP:
        p = clf.params_
        return {'W1': p['W1'].tolist(), 'b1': p['b1'].tolist(),
                'w2': p['w2'].tolist(), 'b2': p['b2']}
    if family == Family.SVM:
        if options.svm_kernel == 'linear':
            return {'kernel': 'linear', 'coef': clf.coef_[0].tolist(),
                    'intercept': float(clf.intercept_[0])}
        # gamma='scale' resolves to 1 / (d Var(X)) on the training matrix.
        gamma = 1.0 / (X.shape[1] * X.var()) if X.var() > 0 else 1.0
        return {'kernel': 'rbf', 'gamma': float(gamma),
                'support_vectors': clf.support_vectors_.tolist(),
                'dual_coef': clf.dual_coef_[0].tolist(),
                'intercept': float(clf.intercept_[0])}
    if family == Family.RF:
        if list(clf.classes_) != [NON_STRESS, STRESS]:
            raise ContractError("Random forest was fitted on unexpected classes.")
        return {'trees': [_export_tree(est.tree_) for est in clf.estimators_]}
    return {'X': X.tolist(), 'y': y.tolist(),
            'n_neighbors': int(clf.n_neighbors), 'weights': clf.weights}


def _tree_proba(tree, X32):
    left, right = tree['left'], tree['right']
    feature, threshold = tree['feature'], tree['threshold']
    node = np.zeros(len(X32), dtype=int)
    while True:
        active = np.flatnonzero(left[node] != -1)
        if active.size == 0:
            break
        current = node[active]
        go_left = X32[active, feature[current]] <= threshold[current]
        node[active] = np.where(go_left, left[current], right[current])
    return tree['value'][node]


def _knn_predict(params, X):
    train_X, train_y = params['X'], params['y']
    k = min(params['n_neighbors'], len(train_y))
    dist = cdist(X, train_X)
    nearest = np.argsort(dist, axis=1, kind='stable')[:, :k]
    near_d = np.take_along_axis(dist, nearest, axis=1)
    near_y = train_y[nearest]
    if params['weights'] == 'distance':
        with np.errstate(divide='ignore'):
            w = 1.0 / near_d
        exact = near_d == 0
        has_exact = exact.any(axis=1)
        w[has_exact] = exact[has_exact].astype(float)
    else:
        w = np.ones_like(near_d)
    votes = np.stack([np.sum(w * (near_y == c), axis=1) for c in (NON_STRESS, STRESS)], axis=1)
    return np.argmax(votes, axis=1)


def _as_arrays(family, params):
    """JSON lists -> numpy arrays, once per model."""
    if family == Family.RF:
        return {'trees': [{
            'left': np.asarray(t['left'], dtype=int),
            'right': np.asarray(t['right'], dtype=int),
            'feature': np.asarray(t['feature'], dtype=int),
            'threshold': np.asarray(t['threshold'], dtype=float),
            'value': np.asarray(t['value'], dtype=float),
        } for t in params['trees']]}
    arrays = {}
    for key, value in params.items():
        arrays[key] = np.asarray(value) if isinstance(value, list) else value
    if family == Family.KNN:
        arrays['X'] = np.asarray(params['X'], dtype=float)
        arrays['y'] = np.asarray(params['y'], dtype=int)
    return arrays


class TrainedModel(object):
    """A fitted classifier: spec, optional standardizer, exported parameters."""

    def __init__(self, spec, params, n_features, standardizer=None, metadata=None):
        self.spec = spec
        self.params = params
        self.n_features = int(n_features)
        self.standardizer = standardizer
        self.metadata = dict(metadata or {})
        self._arrays = _as_arrays(spec.family, params)

    @property
    def family(self):
        return self.spec.family

    def decision_values(self, X):
        """Scores whose sign (or, for RF/KNN, argmax) gives the label."""
        family = self.family
        a = self._arrays
        if family == Family.LR:
            return X.dot(a['coef']) + a['intercept']
        if family == Family.MLP:
            return mlp_forward(a, X)[2]
        if family == Family.SVM:
            if a['kernel'] == 'linear':
                return X.dot(a['coef']) + a['intercept']
            sq = cdist(X, a['support_vectors'], 'sqeuclidean')
            return np.exp(-a['gamma'] * sq).dot(a['dual_coef']) + a['intercept']
        raise ContractError("%s has no scalar decision function." % family.value)

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        if X.size == 0:
            return np.zeros(0, dtype=int)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ContractError("Model expects %d features, got shape %s." % (
                self.n_features, X.shape))
        assert_finite(X, 'features to predict', error=ContractError)
        if self.standardizer is not None:
            X = self.standardizer.transform(X)
        if self.family == Family.RF:
            X32 = X.astype(np.float32)
            proba = np.mean([_tree_proba(t, X32) for t in self._arrays['trees']], axis=0)
            return np.argmax(proba, axis=1).astype(int)
        if self.family == Family.KNN:
            return _knn_predict(self._arrays, X).astype(int)
        return (self.decision_values(X) > 0).astype(int)

    def to_dict(self):
        return {
            'format_version': MODEL_FORMAT_VERSION,
            'spec': self.spec.to_dict(),
            'n_features': self.n_features,
            'standardizer': None if self.standardizer is None else self.standardizer.to_dict(),
            'params': self.params,
            'metadata': self.metadata,
        }

    @staticmethod
    def from_dict(values):
        if values.get('format_version') != MODEL_FORMAT_VERSION:
            raise SchemaError("Unsupported model format %r." % values.get('format_version'))
        std = values.get('standardizer')
        return TrainedModel(
            spec=ModelSpec.from_dict(values['spec']),
            params=values['params'],
            n_features=values['n_features'],
            standardizer=None if std is None else Standardizer.from_dict(std),
            metadata=values.get('metadata'),
        )

    def save(self, path):
        with open(path, 'w') as fout:
            json.dump(self.to_dict(), fout, sort_keys=True)
            fout.write('\n')
        return path

    @staticmethod
    def load(path):
        with open(path) as fin:
            return TrainedModel.from_dict(json.load(fin))


def train(spec, X, y, seed=0, options=None):
    """Fits `spec` on (X, y) and returns the exported TrainedModel."""
    options = options or LearnerOptions()
    X, y = _check_fit_input(X, y)
    assert_finite(X, 'training features', error=ContractError)

    pipe = make_estimator(spec.family, spec.hyperparameters, seed, options)
    pipe.fit(X, y)
    standardizer = None
    seen = X
    if spec.standardize:
        scaler = pipe.named_steps['scale']
        standardizer = Standardizer(scaler.mean_, scaler.scale_)
        seen = standardizer.transform(X)
    params = export_params(spec.family, pipe.named_steps['clf'], seen, y, options)
    metadata = {
        'seed': int(seed),
        'n_train': int(len(y)),
        'svm_kernel': options.svm_kernel if spec.family == Family.SVM else None,
        'mlp_class_weight': options.mlp_class_weight if spec.family == Family.MLP else None,
    }
    return TrainedModel(spec, params, X.shape[1], standardizer, metadata)


def predict(model, X):
    return model.predict(X)

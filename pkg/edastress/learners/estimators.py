"""
In-house estimators for the two families trained from their loss directly:
weighted L2 logistic regression and a one-hidden-layer perceptron.

Both follow the scikit-learn estimator protocol so grid search can clone
and cross-validate them next to the library's SVC, random forest and
k-NN classifiers.
"""

import dataclasses

import numpy as np
from scipy import optimize
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin

from edastress.constants import NON_STRESS, STRESS
from edastress.errors import NumericFailureError, ProtocolError
from edastress.util.asserts import assert_both_classes
from edastress.util.math_utils import make_rng

LR_GTOL = 1e-6
LR_MAX_ITER = 5000

MLP_EPOCHS = 300
MLP_BATCH_SIZE = 32
MLP_LEARNING_RATE = 1e-3
MLP_ALPHA = 1e-4
_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8


@dataclasses.dataclass(frozen=True)
class ClassWeights(object):
    w0: float = 1.0
    w1: float = 1.0

    def sample_weights(self, labels):
        labels = np.asarray(labels)
        return np.where(labels == STRESS, self.w1, self.w0).astype(float)


def compute_class_weights(labels, mode=None):
    """Per-class loss weights: 1 each for mode None, N / (2 n_c) for 'balance'."""
    labels = np.asarray(labels)
    assert_both_classes(labels)
    if mode in (None, 'none'):
        return ClassWeights(1.0, 1.0)
    if mode != 'balance':
        raise ProtocolError("Unknown class-weight mode %r." % (mode,))
    n = float(len(labels))
    n0 = np.count_nonzero(labels == NON_STRESS)
    n1 = np.count_nonzero(labels == STRESS)
    return ClassWeights(n / (2.0 * n0), n / (2.0 * n1))


def _check_fit_input(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    if X.ndim != 2 or len(X) != len(y):
        raise ProtocolError("X must be 2-D with one row per label.")
    assert_both_classes(y)
    return X, y


def logistic_loss_and_grad(params, X, y, sample_weight, C):
    """0.5 ||w||^2 + C * sum_i s_i log(1 + exp(-t_i z_i)), t_i in {-1, +1}.

    `params` is w followed by the (unregularized) intercept; returns
    (loss, gradient) in the same layout.
    """
    w, b = params[:-1], params[-1]
    t = np.where(y == STRESS, 1.0, -1.0)
    margin = t * (X.dot(w) + b)
    loss = 0.5 * w.dot(w) + C * np.dot(sample_weight, np.logaddexp(0.0, -margin))
    dz = -C * sample_weight * t * expit(-margin)
    grad = np.empty_like(params)
    grad[:-1] = w + X.T.dot(dz)
    grad[-1] = dz.sum()
    return loss, grad


class WeightedLogisticRegression(BaseEstimator, ClassifierMixin):
    """L2-regularized logistic regression with per-class loss weights.

    Minimized with L-BFGS until the projected gradient norm falls below
    1e-6 or 5000 iterations pass.
    """

    def __init__(self, C=1.0, class_weight=None):
        self.C = C
        self.class_weight = class_weight

    def fit(self, X, y):
        X, y = _check_fit_input(X, y)
        weights = compute_class_weights(y, self.class_weight).sample_weights(y)
        x0 = np.zeros(X.shape[1] + 1)

        def fun(params):
            loss, grad = logistic_loss_and_grad(params, X, y, weights, self.C)
            if not np.isfinite(loss):
                raise NumericFailureError("Logistic loss is not finite.", self.get_params())
            return loss, grad

        result = optimize.minimize(fun, x0, jac=True, method='L-BFGS-B',
                                   options={'gtol': LR_GTOL, 'maxiter': LR_MAX_ITER})
        self.coef_ = result.x[:-1]
        self.intercept_ = float(result.x[-1])
        self.n_iter_ = int(result.nit)
        self.classes_ = np.array([NON_STRESS, STRESS])
        return self

    def decision_function(self, X):
        return np.asarray(X, dtype=float).dot(self.coef_) + self.intercept_

    def predict(self, X):
        return (self.decision_function(X) > 0).astype(int)


def mlp_init(n_features, n_hidden, rng):
    """Glorot-uniform weights, zero biases."""
    limit1 = np.sqrt(6.0 / (n_features + n_hidden))
    limit2 = np.sqrt(6.0 / (n_hidden + 1))
    return {
        'W1': rng.uniform(-limit1, limit1, size=(n_features, n_hidden)),
        'b1': np.zeros(n_hidden),
        'w2': rng.uniform(-limit2, limit2, size=n_hidden),
        'b2': 0.0,
    }


def mlp_pack(params):
    return np.concatenate([params['W1'].ravel(), params['b1'], params['w2'],
                           [params['b2']]])


def mlp_unpack(flat, n_features, n_hidden):
    d, h = n_features, n_hidden
    return {
        'W1': flat[:d * h].reshape(d, h),
        'b1': flat[d * h:d * h + h],
        'w2': flat[d * h + h:d * h + 2 * h],
        'b2': float(flat[-1]),
    }


def mlp_forward(params, X):
    """Returns (pre-activations, hidden activations, output logits)."""
    a = X.dot(params['W1']) + params['b1']
    r = np.maximum(a, 0.0)
    z = r.dot(params['w2']) + params['b2']
    return a, r, z


def mlp_loss_and_grad(params, X, y, sample_weight, alpha=MLP_ALPHA):
    """Weighted mean cross-entropy plus (alpha / 2m) times the squared weights.

    returns (loss, grads) with grads keyed like `params`.
    """
    m = float(len(y))
    a, r, z = mlp_forward(params, X)
    yf = y.astype(float)
    # log(1 + e^z) - y z is the cross-entropy of a logistic output.
    ce = np.logaddexp(0.0, z) - yf * z
    penalty = np.sum(params['W1'] ** 2) + np.sum(params['w2'] ** 2)
    loss = np.dot(sample_weight, ce) / m + alpha * penalty / (2.0 * m)

    dz = sample_weight * (expit(z) - yf) / m
    da = np.outer(dz, params['w2']) * (a > 0)
    grads = {
        'W1': X.T.dot(da) + alpha * params['W1'] / m,
        'b1': da.sum(axis=0),
        'w2': r.T.dot(dz) + alpha * params['w2'] / m,
        'b2': float(dz.sum()),
    }
    return loss, grads


class OneHiddenLayerMLP(BaseEstimator, ClassifierMixin):
    """ReLU hidden layer, logistic output, Adam on mini-batches.

    Runs a fixed budget of `epochs` passes; the batch order of every epoch
    comes from the seeded generator, so a fit is fully reproducible.
    """

    def __init__(self, hidden_layer_sizes=64, class_weight=None, alpha=MLP_ALPHA,
                 learning_rate=MLP_LEARNING_RATE, batch_size=MLP_BATCH_SIZE,
                 epochs=MLP_EPOCHS, random_state=0):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.class_weight = class_weight
        self.alpha = alpha
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.random_state = random_state

    def fit(self, X, y):
        X, y = _check_fit_input(X, y)
        weights = compute_class_weights(y, self.class_weight).sample_weights(y)
        rng = make_rng(self.random_state)
        n, d = X.shape
        h = int(self.hidden_layer_sizes)

        flat = mlp_pack(mlp_init(d, h, rng))
        m1 = np.zeros_like(flat)
        m2 = np.zeros_like(flat)
        step = 0
        for epoch in range(self.epochs):
            order = rng.permutation(n)
            epoch_loss = 0.0
            for start in range(0, n, self.batch_size):
                batch = order[start:start + self.batch_size]
                params = mlp_unpack(flat, d, h)
                loss, grads = mlp_loss_and_grad(
                    params, X[batch], y[batch], weights[batch], self.alpha)
                g = mlp_pack(grads)
                step += 1
                m1 = _ADAM_BETA1 * m1 + (1 - _ADAM_BETA1) * g
                m2 = _ADAM_BETA2 * m2 + (1 - _ADAM_BETA2) * g * g
                m1_hat = m1 / (1 - _ADAM_BETA1 ** step)
                m2_hat = m2 / (1 - _ADAM_BETA2 ** step)
                flat = flat - self.learning_rate * m1_hat / (np.sqrt(m2_hat) + _ADAM_EPS)
                epoch_loss += loss * len(batch)
            if not np.isfinite(epoch_loss) or not np.all(np.isfinite(flat)):
                raise NumericFailureError(
                    "MLP loss diverged in epoch %d." % epoch, self.get_params())

        self.params_ = mlp_unpack(flat, d, h)
        self.loss_ = epoch_loss / n
        self.classes_ = np.array([NON_STRESS, STRESS])
        return self

    def decision_function(self, X):
        return mlp_forward(self.params_, np.asarray(X, dtype=float))[2]

    def predict(self, X):
        return (self.decision_function(X) > 0).astype(int)

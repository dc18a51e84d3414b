import os
import tempfile
import unittest

import numpy as np
from scipy import optimize
from sklearn.neighbors import KNeighborsClassifier
from sklearn.preprocessing import StandardScaler
from sklearn.svm import SVC

import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../..'))
from edastress.errors import ContractError, ProtocolError, SchemaError
from edastress.learners.estimators import (
    OneHiddenLayerMLP, WeightedLogisticRegression, compute_class_weights,
    logistic_loss_and_grad, mlp_init, mlp_loss_and_grad, mlp_pack, mlp_unpack,
)
from edastress.learners.grids import Family
from edastress.learners.models import (
    LearnerOptions, ModelSpec, TrainedModel, make_estimator, predict, train,
)
from edastress.util.math_utils import make_rng


def blobs(n_per_class=30, n_features=4, gap=4.0, seed=0):
    rng = np.random.default_rng(seed)
    X0 = rng.normal(size=(n_per_class, n_features))
    X1 = rng.normal(size=(n_per_class, n_features)) + gap
    X = np.vstack([X0, X1])
    y = np.array([0] * n_per_class + [1] * n_per_class)
    return X, y


SMALL_POINTS = {
    Family.LR: {'C': 1.0, 'class_weight': None},
    Family.RF: {'n_estimators': 25, 'min_samples_split': 2, 'min_samples_leaf': 1,
                'class_weight': 'balance'},
    Family.SVM: {'C': 1.0, 'class_weight': None},
    Family.MLP: {'hidden_layer_sizes': 16},
    Family.KNN: {'n_neighbors': 3, 'weights': 'distance'},
}


class TestClassWeights(unittest.TestCase):

    def test_weights(self):
        weights = compute_class_weights([0, 0, 0, 1], 'balance')
        self.assertAlmostEqual(weights.w0, 4.0 / 6.0)
        self.assertAlmostEqual(weights.w1, 2.0)
        np.testing.assert_allclose(weights.sample_weights([1, 0]), [2.0, 4.0 / 6.0])
        self.assertEqual(compute_class_weights([0, 1], None).w1, 1.0)
        with self.assertRaises(ProtocolError):
            compute_class_weights([0, 0, 0], 'balance')
        with self.assertRaises(ProtocolError):
            compute_class_weights([0, 1], 'inverse')


class TestGradients(unittest.TestCase):

    def test_logistic_gradient(self):
        X, y = blobs(10, 3, gap=1.0)
        sw = compute_class_weights(y[:15], 'balance').sample_weights(y[:15])
        X, y = X[:15], y[:15]
        params = np.random.default_rng(1).normal(size=4)
        err = optimize.check_grad(
            lambda p: logistic_loss_and_grad(p, X, y, sw, 0.5)[0],
            lambda p: logistic_loss_and_grad(p, X, y, sw, 0.5)[1],
            params)
        self.assertLess(err, 1e-5)

    def test_mlp_gradient(self):
        X, y = blobs(8, 3, gap=1.0)
        d, h = 3, 5
        sw = np.ones(len(y))
        flat = mlp_pack(mlp_init(d, h, make_rng(2)))

        def loss(f):
            return mlp_loss_and_grad(mlp_unpack(f, d, h), X, y, sw, 0.1)[0]

        def grad(f):
            return mlp_pack(mlp_loss_and_grad(mlp_unpack(f, d, h), X, y, sw, 0.1)[1])

        self.assertLess(optimize.check_grad(loss, grad, flat), 1e-5)

    def test_random_instances(self):
        def central_diff(f, p, h=1e-6):
            g = np.zeros_like(p)
            for i in range(len(p)):
                e = np.zeros_like(p)
                e[i] = h
                g[i] = (f(p + e) - f(p - e)) / (2 * h)
            return g

        for seed in range(20):
            rng = np.random.default_rng(100 + seed)
            n, d = int(rng.integers(6, 20)), int(rng.integers(1, 5))
            X = rng.normal(size=(n, d))
            y = np.arange(n) % 2
            sw = rng.uniform(0.5, 2.0, size=n)

            p = rng.normal(size=d + 1)
            lr_loss = lambda q: logistic_loss_and_grad(q, X, y, sw, 0.7)[0]
            exact = logistic_loss_and_grad(p, X, y, sw, 0.7)[1]
            numeric = central_diff(lr_loss, p)
            self.assertLess(np.linalg.norm(numeric - exact),
                            1e-5 * max(np.linalg.norm(exact), 1e-3))

            h = int(rng.integers(2, 6))
            flat = mlp_pack(mlp_init(d, h, make_rng(seed)))
            mlp_loss = lambda f: mlp_loss_and_grad(mlp_unpack(f, d, h), X, y, sw, 0.1)[0]
            exact = mlp_pack(mlp_loss_and_grad(mlp_unpack(flat, d, h), X, y, sw, 0.1)[1])
            numeric = central_diff(mlp_loss, flat)
            self.assertLess(np.linalg.norm(numeric - exact),
                            1e-4 * max(np.linalg.norm(exact), 1e-3))


class TestEstimators(unittest.TestCase):

    def test_logistic_regularization(self):
        X, y = blobs(gap=1.5)
        weak = WeightedLogisticRegression(C=10.0).fit(X, y)
        strong = WeightedLogisticRegression(C=0.001).fit(X, y)
        self.assertLess(np.linalg.norm(strong.coef_), np.linalg.norm(weak.coef_))
        self.assertGreater(weak.score(X, y), 0.8)

    def test_mlp_reproducible(self):
        X, y = blobs()
        a = OneHiddenLayerMLP(hidden_layer_sizes=8, epochs=20, random_state=4).fit(X, y)
        b = OneHiddenLayerMLP(hidden_layer_sizes=8, epochs=20, random_state=4).fit(X, y)
        np.testing.assert_array_equal(a.params_['W1'], b.params_['W1'])

    def test_single_class(self):
        X, _ = blobs()
        with self.assertRaises(ProtocolError):
            WeightedLogisticRegression().fit(X, np.zeros(len(X)))

    def test_class_weight_raises_minority_recall(self):
        rng = np.random.default_rng(8)
        X = np.vstack([rng.normal(0.0, 1.0, size=(180, 1)), rng.normal(1.0, 1.0, size=(20, 1))])
        y = np.array([0] * 180 + [1] * 20)
        recall = lambda model: np.mean(model.predict(X[y == 1]) == 1)
        plain = WeightedLogisticRegression(C=1.0).fit(X, y)
        balanced = WeightedLogisticRegression(C=1.0, class_weight='balance').fit(X, y)
        self.assertGreater(recall(balanced), recall(plain) + 0.2)


class TestTrainedModels(unittest.TestCase):

    def test_every_family_separates_blobs(self):
        X, y = blobs(gap=6.0)
        for family in Family:
            model = train(ModelSpec(family, SMALL_POINTS[family]), X, y, seed=3)
            np.testing.assert_array_equal(predict(model, X), y, err_msg=family.value)
            self.assertEqual(model.standardizer is not None, family.standardize)

    def test_save_load(self):
        X, y = blobs(gap=1.0, seed=8)
        X_new = np.random.default_rng(9).normal(size=(40, 4)) + 0.5
        for family in Family:
            model = train(ModelSpec(family, SMALL_POINTS[family]), X, y, seed=3)
            with tempfile.TemporaryDirectory() as tmp:
                path = model.save(os.path.join(tmp, 'model.json'))
                loaded = TrainedModel.load(path)
            self.assertEqual(loaded.spec, model.spec)
            np.testing.assert_array_equal(loaded.predict(X_new), model.predict(X_new),
                                          err_msg=family.value)

    def test_forest_matches_library(self):
        X, y = blobs(gap=1.0, seed=6)
        X_new = np.random.default_rng(7).normal(size=(50, 4)) * 2.0
        spec = ModelSpec(Family.RF, SMALL_POINTS[Family.RF])
        model = train(spec, X, y, seed=5)
        library = make_estimator(Family.RF, spec.hyperparameters, seed=5).fit(X, y)
        np.testing.assert_array_equal(model.predict(X_new), library.predict(X_new))

    def test_knn_matches_library(self):
        X, y = blobs(gap=1.0, seed=10)
        X_new = np.random.default_rng(11).normal(size=(50, 4))
        for weights in ('uniform', 'distance'):
            model = train(ModelSpec(Family.KNN, {'n_neighbors': 5, 'weights': weights}), X, y)
            scaler = StandardScaler().fit(X)
            library = KNeighborsClassifier(n_neighbors=5, weights=weights).fit(
                scaler.transform(X), y)
            np.testing.assert_array_equal(model.predict(X_new),
                                          library.predict(scaler.transform(X_new)))

    def test_knn_exact_match(self):
        X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [5.0, 5.0], [5.0, 6.0], [6.0, 5.0]])
        y = np.array([0, 0, 0, 1, 1, 1])
        model = train(ModelSpec(Family.KNN, {'n_neighbors': 5, 'weights': 'distance'}), X, y)
        # A query on a training point takes that point's label.
        self.assertEqual(model.predict(X[3:4])[0], 1)

    def test_rbf_svm_matches_library(self):
        X, y = blobs(gap=1.0, seed=12)
        X_new = np.random.default_rng(13).normal(size=(50, 4))
        options = LearnerOptions(svm_kernel='rbf')
        model = train(ModelSpec(Family.SVM, {'C': 1.0, 'class_weight': None}), X, y,
                      options=options)
        scaler = StandardScaler().fit(X)
        library = SVC(C=1.0, kernel='rbf', gamma='scale').fit(scaler.transform(X), y)
        np.testing.assert_allclose(model.decision_values(scaler.transform(X_new)),
                                   library.decision_function(scaler.transform(X_new)),
                                   atol=1e-8)
        self.assertEqual(model.metadata['svm_kernel'], 'rbf')

    def test_predict_contract(self):
        X, y = blobs()
        model = train(ModelSpec(Family.LR, SMALL_POINTS[Family.LR]), X, y)
        self.assertEqual(len(model.predict(np.zeros((0, 4)))), 0)
        with self.assertRaises(ContractError):
            model.predict(np.zeros((3, 5)))
        with self.assertRaises(ContractError):
            model.predict(np.full((1, 4), np.nan))

    def test_model_format_version(self):
        X, y = blobs()
        values = train(ModelSpec(Family.LR, SMALL_POINTS[Family.LR]), X, y).to_dict()
        values['format_version'] = 99
        with self.assertRaises(SchemaError):
            TrainedModel.from_dict(values)

    def test_options(self):
        with self.assertRaises(ContractError):
            LearnerOptions(svm_kernel='poly')
        pipe = make_estimator(Family.MLP, {'hidden_layer_sizes': 8},
                              options=LearnerOptions(mlp_class_weight=True))
        self.assertEqual(pipe.named_steps['clf'].class_weight, 'balance')
        self.assertEqual(list(make_estimator(Family.LR).named_steps), ['clf'])
        self.assertEqual(list(make_estimator(Family.KNN).named_steps), ['scale', 'clf'])

if __name__ == '__main__':
    unittest.main()

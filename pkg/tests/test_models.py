import numpy as np
import pytest

from feng.models import (
    EvalMetrics,
    ModelSpec,
    UndefinedMetricError,
    accuracy,
    encode_labels,
    fit_preprocessor,
    loss_and_grad,
    roc_auc,
    train,
)
from feng.models.forest import ForestModel, _Node
from feng.tabular import Dtype, Table, make_column


# --- independent O(n^2) oracles (kept naive on purpose) ---------------------


def auc_pair_counting(scores, positive):
    pos = [s for s, p in zip(scores, positive) if p]
    neg = [s for s, p in zip(scores, positive) if not p]
    total = 0.0
    for a in pos:
        for b in neg:
            if a > b:
                total += 1.0
            elif a == b:
                total += 0.5
    return total / (len(pos) * len(neg))


def ovo_pair_counting(scores, labels):
    present = sorted(set(int(l) for l in labels))
    if len(present) == 2 and scores.shape[1] == 2:
        return auc_pair_counting(scores[:, 1], labels == 1)
    pairs = [(i, j) for k, i in enumerate(present) for j in present[k + 1 :]]
    total = 0.0
    for i, j in pairs:
        rows = [(s[i], l == i) for s, l in zip(scores, labels) if l in (i, j)]
        total += auc_pair_counting([r[0] for r in rows], [r[1] for r in rows])
    return total / len(pairs)


class TestRocAuc:
    def test_worked_example(self):
        scores = np.array([0.1, 0.4, 0.35, 0.8])
        labels = np.array([0, 0, 1, 1])
        # oracle: 3 of the 4 pos/neg pairs are correctly ordered
        assert auc_pair_counting(scores, labels == 1) == 0.75
        assert roc_auc(scores, labels) == 0.75

    def test_perfect_separation(self):
        scores = np.array([[0.9, 0.1], [0.8, 0.2], [0.1, 0.9], [0.3, 0.7]])
        labels = np.array([0, 0, 1, 1])
        assert roc_auc(scores, labels) == 1.0

    def test_all_ties(self):
        scores = np.full(6, 0.5)
        labels = np.array([0, 1, 0, 1, 0, 1])
        assert roc_auc(scores, labels) == 0.5

    def test_single_class_undefined(self):
        with pytest.raises(UndefinedMetricError):
            roc_auc(np.array([0.1, 0.2]), np.array([1, 1]))

    @pytest.mark.parametrize("seed", range(60))
    def test_binary_matches_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 40))
        labels = rng.integers(0, 2, size=n)
        labels[:2] = [0, 1]
        scores = np.round(rng.random(n), 2)  # rounding forces ties
        matrix = np.column_stack([1 - scores, scores])
        expected = auc_pair_counting(scores, labels == 1)
        assert roc_auc(matrix, labels) == pytest.approx(expected, abs=1e-9)
        assert roc_auc(scores, labels) == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("seed", range(40))
    def test_ovo_matches_oracle(self, seed):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(6, 40))
        labels = rng.integers(0, 3, size=n)
        labels[:3] = [0, 1, 2]
        scores = rng.random((n, 3))
        scores = np.round(scores / scores.sum(axis=1, keepdims=True), 2)
        expected = ovo_pair_counting(scores, labels)
        assert roc_auc(scores, labels) == pytest.approx(expected, abs=1e-9)

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(7)
        scores = rng.random(30)
        labels = rng.integers(0, 2, size=30)
        labels[:2] = [0, 1]
        transformed = np.exp(3 * scores) + 5
        assert roc_auc(scores, labels) == pytest.approx(
            roc_auc(transformed, labels), abs=1e-12
        )

    def test_complement_sums_to_one_without_ties(self):
        rng = np.random.default_rng(11)
        scores = rng.permutation(np.linspace(0.01, 0.99, 20))  # all distinct
        labels = rng.integers(0, 2, size=20)
        labels[:2] = [0, 1]
        assert roc_auc(scores, labels) + roc_auc(1 - scores, labels) == pytest.approx(
            1.0, abs=1e-12
        )


class TestAccuracy:
    def test_all_correct(self):
        scores = np.array([[0.9, 0.1], [0.2, 0.8]])
        assert accuracy(scores, np.array([0, 1])) == 1.0

    def test_half_correct(self):
        scores = np.array([[0.9, 0.1], [0.9, 0.1]])
        assert accuracy(scores, np.array([0, 1])) == 0.5

    def test_tie_breaks_to_lowest_index(self):
        scores = np.array([[0.5, 0.5]])
        assert accuracy(scores, np.array([0])) == 1.0
        assert accuracy(scores, np.array([1])) == 0.0


def _random_instance(rng, n, d, k):
    X = rng.normal(size=(n, d))
    y = rng.integers(0, k, size=n)
    return X, y


class TestLogisticRegression:
    def test_separable_data_fit(self):
        rng = np.random.default_rng(0)
        X = np.vstack([rng.normal(-3, 0.3, (20, 2)), rng.normal(3, 0.3, (20, 2))])
        y = np.array([0] * 20 + [1] * 20)
        model = train(ModelSpec("logistic_regression"), X, y)
        assert accuracy(model.predict_proba(X), y) == 1.0

    @pytest.mark.parametrize("seed", range(50))
    def test_gradient_matches_central_differences(self, seed):
        rng = np.random.default_rng(seed)
        n, d, k = int(rng.integers(3, 12)), int(rng.integers(1, 5)), int(rng.integers(2, 4))
        X, y = _random_instance(rng, n, d, k)
        Y = np.zeros((n, k))
        Y[np.arange(n), y] = 1.0
        W = rng.normal(size=(d, k))
        b = rng.normal(size=k)
        l2 = 1e-3
        _, gw, gb = loss_and_grad(W, b, X, Y, l2)
        analytic = np.concatenate([gw.ravel(), gb.ravel()])
        h = 1e-5
        numeric = np.empty_like(analytic)
        theta = np.concatenate([W.ravel(), b.ravel()])

        def f(t):
            w_ = t[: d * k].reshape(d, k)
            b_ = t[d * k :]
            return loss_and_grad(w_, b_, X, Y, l2)[0]

        for i in range(len(theta)):
            up, down = theta.copy(), theta.copy()
            up[i] += h
            down[i] -= h
            numeric[i] = (f(up) - f(down)) / (2 * h)
        scale = np.maximum(np.abs(analytic), np.abs(numeric))
        scale[scale < 1e-8] = 1.0
        assert np.max(np.abs(analytic - numeric) / scale) < 1e-4

    def test_loss_nonincreasing(self):
        rng = np.random.default_rng(3)
        X, y = _random_instance(rng, 40, 5, 3)
        model = train(ModelSpec("logistic_regression"), X, y)
        history = np.array(model.loss_history)
        assert len(history) > 1
        assert np.all(np.diff(history) <= 0)

    def test_zero_weights_uniform_probabilities(self):
        from feng.models.logistic import LogisticModel

        model = LogisticModel(np.zeros((3, 4)), np.zeros(4), 4)
        probs = model.predict_proba(np.ones((5, 3)))
        assert probs == pytest.approx(np.full((5, 4), 0.25))

    def test_single_class_predicts_it(self):
        X = np.ones((4, 2))
        model = train(ModelSpec("logistic_regression"), X, np.zeros(4, dtype=int), n_classes=1)
        assert model.predict_proba(X) == pytest.approx(np.ones((4, 1)))

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(5)
        X, y = _random_instance(rng, 30, 4, 3)
        model = train(ModelSpec("logistic_regression"), X, y)
        sums = model.predict_proba(rng.normal(size=(10, 4))).sum(axis=1)
        assert np.all(np.abs(sums - 1.0) < 1e-9)

    def test_bit_reproducible(self):
        rng = np.random.default_rng(9)
        X, y = _random_instance(rng, 25, 3, 2)
        m1 = train(ModelSpec("logistic_regression"), X, y)
        m2 = train(ModelSpec("logistic_regression"), X, y)
        assert np.array_equal(m1.weights, m2.weights)
        assert np.array_equal(m1.bias, m2.bias)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            train(ModelSpec("logistic_regression"), np.ones((3, 2)), np.zeros(4, dtype=int))

    def test_nonfinite_rejected(self):
        X = np.array([[1.0], [np.nan]])
        with pytest.raises(ValueError, match="non-finite"):
            train(ModelSpec("logistic_regression"), X, np.array([0, 1]))


class TestRandomForest:
    def test_xor_pattern(self):
        # the 4-point XOR pattern, each point duplicated 25x; axis-aligned
        # splits at 0.5 reach purity by depth 2
        base = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        X = np.repeat(base, 25, axis=0)
        y = np.repeat(np.array([0, 1, 1, 0]), 25)
        model = train(ModelSpec("random_forest", rng_seed=1), X, y)
        assert accuracy(model.predict_proba(X), y) == 1.0

    def test_vote_fraction(self):
        leaf0, leaf1 = _Node(leaf_class=0), _Node(leaf_class=1)
        model = ForestModel([leaf1] * 30 + [leaf0] * 20, n_classes=2, n_features=1)
        probs = model.predict_proba(np.zeros((3, 1)))
        assert probs[:, 1] == pytest.approx(np.full(3, 0.6))

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(2)
        X, y = _random_instance(rng, 60, 4, 3)
        model = train(ModelSpec("random_forest"), X, y)
        sums = model.predict_proba(X).sum(axis=1)
        assert np.all(np.abs(sums - 1.0) < 1e-9)

    def test_bit_reproducible(self):
        rng = np.random.default_rng(4)
        X, y = _random_instance(rng, 50, 3, 2)
        spec = ModelSpec("random_forest", rng_seed=123)
        p1 = train(spec, X, y).predict_proba(X)
        p2 = train(spec, X, y).predict_proba(X)
        assert np.array_equal(p1, p2)

    def test_different_seeds_differ(self):
        rng = np.random.default_rng(4)
        X, y = _random_instance(rng, 80, 5, 2)
        p1 = train(ModelSpec("random_forest", rng_seed=0), X, y).predict_proba(X)
        p2 = train(ModelSpec("random_forest", rng_seed=1), X, y).predict_proba(X)
        assert not np.array_equal(p1, p2)

    def test_width_mismatch(self):
        X = np.ones((10, 2))
        y = np.array([0, 1] * 5)
        model = train(ModelSpec("random_forest"), X, y)
        with pytest.raises(ValueError, match="features"):
            model.predict_proba(np.ones((2, 3)))


def _train_table():
    return Table(
        (
            make_column("num", Dtype.NUMBER, [1.0, None, 3.0]),
            make_column("cat", Dtype.CATEGORY, ["a", "b", "a"]),
            make_column("txt", Dtype.TEXT, ["p/1", "q/2", None]),
            make_column("flag", Dtype.BOOLEAN, [True, False, None]),
            make_column("y", Dtype.CATEGORY, ["u", "v", "u"]),
        ),
        "y",
    )


class TestPreprocessor:
    def test_mean_imputation(self):
        pre = fit_preprocessor(_train_table(), "one_hot")
        recipe = next(r for r in pre.recipes if r.column == "num")
        assert recipe.mean == 2.0

    def test_one_hot_width(self):
        pre = fit_preprocessor(_train_table(), "one_hot")
        recipe = next(r for r in pre.recipes if r.column == "cat")
        assert recipe.width == 3  # 2 categories + unknown slot

    def test_standardized_train_matrix(self):
        t = _train_table()
        pre = fit_preprocessor(t, "one_hot")
        X = pre.transform(t)
        assert np.isfinite(X).all()
        assert np.all(np.abs(X.mean(axis=0)) < 1e-9)

    def test_unseen_category_goes_to_unknown_slot(self):
        t = _train_table()
        pre = fit_preprocessor(t, "one_hot")
        t2 = Table(
            (
                make_column("num", Dtype.NUMBER, [5.0]),
                make_column("cat", Dtype.CATEGORY, ["never-seen"]),
                make_column("txt", Dtype.TEXT, ["zz"]),
                make_column("flag", Dtype.BOOLEAN, [True]),
                make_column("y", Dtype.CATEGORY, ["u"]),
            ),
            "y",
        )
        X = pre.transform(t2)
        assert np.isfinite(X).all()
        recipe_offset = 1  # num occupies one column; cat block follows
        raw_unknown = X[0, recipe_offset + 2]  # third slot of the cat block
        # standardization moved the scale, but the unknown slot is the hot one
        assert raw_unknown == X[0, recipe_offset:recipe_offset + 3].max()

    def test_ordinal_encoding(self):
        pre = fit_preprocessor(_train_table(), "ordinal")
        recipe = next(r for r in pre.recipes if r.column == "cat")
        assert recipe.kind == "ordinal" and recipe.width == 1

    def test_text_always_ordinal(self):
        pre = fit_preprocessor(_train_table(), "one_hot")
        recipe = next(r for r in pre.recipes if r.column == "txt")
        assert recipe.kind == "ordinal"

    def test_target_excluded(self):
        pre = fit_preprocessor(_train_table(), "one_hot")
        assert all(r.column != "y" for r in pre.recipes)

    def test_encode_labels(self):
        t = _train_table()
        codes, classes = encode_labels(t.column("y"))
        assert classes == ("u", "v")
        assert list(codes) == [0, 1, 0]

import numpy as np
import pytest

from memetune.data import Dataset, gen_banana, normalize_apply, normalize_fit
from memetune.objective import CvObjective, make_folds
from memetune.objective import test_error as held_out_error
from memetune.space import encode, SvmParams


def small_banana(n=60, seed=0, noise=0.15):
    data = gen_banana(n, noise, seed)
    return normalize_apply(normalize_fit(data), data)


class TestFoldPlan:
    def test_exact_divisibility_gives_one_per_class(self):
        features = np.arange(20.0).reshape(10, 2)
        labels = np.array([1.0] * 5 + [-1.0] * 5)
        plan = make_folds(Dataset(features, labels), 5, seed=3)
        for j in range(5):
            fold_labels = labels[plan.assignments == j]
            assert (fold_labels == 1.0).sum() == 1
            assert (fold_labels == -1.0).sum() == 1

    def test_stratification_deviation_at_most_one(self):
        rng = np.random.default_rng(9)
        for trial in range(50):
            n = int(rng.integers(20, 80))
            labels = np.where(rng.uniform(size=n) < 0.3, 1.0, -1.0)
            labels[:6] = 1.0  # keep both classes >= k
            labels[6:12] = -1.0
            data = Dataset(rng.normal(size=(n, 2)), labels)
            plan = make_folds(data, 5, seed=trial)
            for label in (-1.0, 1.0):
                counts = [
                    int(((plan.assignments == j) & (labels == label)).sum()) for j in range(5)
                ]
                assert max(counts) - min(counts) <= 1

    def test_k_of_one_rejected(self):
        data = small_banana()
        with pytest.raises(ValueError):
            make_folds(data, 1, seed=0)

    def test_small_class_rejected(self):
        features = np.zeros((6, 1))
        labels = np.array([1.0, 1.0, 1.0, 1.0, -1.0, -1.0])
        with pytest.raises(ValueError, match="class"):
            make_folds(Dataset(features, labels), 5, seed=0)

    def test_seeded_determinism(self):
        data = small_banana()
        a = make_folds(data, 5, seed=11)
        b = make_folds(data, 5, seed=11)
        np.testing.assert_array_equal(a.assignments, b.assignments)
        c = make_folds(data, 5, seed=12)
        assert not np.array_equal(a.assignments, c.assignments)


class TestCvObjective:
    def test_counter_ticks_once_per_evaluation(self):
        data = small_banana()
        objective = CvObjective(data, make_folds(data, 5, 0))
        for expected, position in enumerate(np.linspace(-5, 5, 7), start=1):
            objective(np.array([position, 0.0]))
            assert objective.evaluations == expected

    def test_fitness_within_unit_interval(self):
        rng = np.random.default_rng(20)
        data = small_banana(n=40, seed=2)
        objective = CvObjective(data, make_folds(data, 5, 2))
        for _ in range(25):
            value = objective(rng.uniform(-10, 10, size=2))
            assert 0.0 <= value <= 1.0

    def test_repeat_evaluation_is_identical(self):
        data = small_banana()
        objective = CvObjective(data, make_folds(data, 5, 0))
        position = np.array([2.0, -1.0])
        assert objective(position) == objective(position)

    def test_perfect_classifier_scores_zero(self):
        data = small_banana(n=80, seed=4, noise=0.0)
        objective = CvObjective(data, make_folds(data, 5, 4))
        assert objective(encode(SvmParams(16.0, 4.0))) == 0.0

    def test_fold_mean_arithmetic(self):
        # fitness is the plain mean of per-fold misclassification rates
        data = small_banana(n=50, seed=6)
        plan = make_folds(data, 5, 6)
        objective = CvObjective(data, plan)
        position = np.array([1.0, 1.0])
        from memetune.svm import Kernel, smo_train, predict

        rates = []
        for j in range(5):
            held = plan.assignments == j
            model = smo_train(data.subset(~held), 2.0, Kernel.rbf(2.0))
            rates.append(float(np.mean(predict(model, data.features[held]) != data.labels[held])))
        assert objective(position) == pytest.approx(float(np.mean(rates)), abs=1e-12)

    def test_cache_hits_still_count(self):
        data = small_banana()
        objective = CvObjective(data, make_folds(data, 5, 0), cache=True)
        position = np.array([0.5, 0.5])
        first = objective(position)
        second = objective(position)
        assert first == second
        assert objective.evaluations == 2

    def test_mismatched_fold_plan_rejected(self):
        data = small_banana(n=40)
        other = small_banana(n=60)
        with pytest.raises(ValueError):
            CvObjective(data, make_folds(other, 5, 0))


class TestTestError:
    def test_memorized_separable_data(self):
        data = small_banana(n=60, seed=8, noise=0.0)
        err = held_out_error(data, data, encode(SvmParams(1e4, 4.0)))
        assert err == 0.0

    def test_random_labels_near_half(self):
        rng = np.random.default_rng(33)
        train = Dataset(rng.normal(size=(60, 2)), np.where(rng.uniform(size=60) < 0.5, 1.0, -1.0))
        test = Dataset(rng.normal(size=(2000, 2)), np.where(rng.uniform(size=2000) < 0.5, 1.0, -1.0))
        err = held_out_error(train, test, np.array([0.0, 0.0]))
        assert err == pytest.approx(0.5, abs=0.05)

    def test_error_bounded(self):
        rng = np.random.default_rng(34)
        train = small_banana(n=40, seed=9)
        test = small_banana(n=30, seed=10)
        for _ in range(10):
            err = held_out_error(train, test, rng.uniform(-10, 10, size=2))
            assert 0.0 <= err <= 1.0

    def test_does_not_touch_counter(self):
        data = small_banana()
        objective = CvObjective(data, make_folds(data, 5, 0))
        held_out_error(data, data, np.array([1.0, 1.0]))
        assert objective.evaluations == 0

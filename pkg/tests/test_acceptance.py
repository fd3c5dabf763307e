"""Acceptance suite: one test per release criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s``. The benchmark reproduction
(criterion 7) takes a few minutes; everything else finishes in seconds.
"""

import json

import numpy as np

from memetune.cli import BenchmarkSpec, DataSource, format_jsonl, run_benchmark
from memetune.controller import RunConfig, grid_search, run
from memetune.data import Dataset, gen_banana, normalize_apply, normalize_fit
from memetune.objective import CvObjective, make_folds
from memetune.pattern_search import PatternConfig, refine
from memetune.pso import PsoConfig
from memetune.selection import select_probabilistic, selection_probabilities
from memetune.space import SearchSpace
from memetune.svm import Kernel, dual_objective, kernel_matrix, kkt_violations, smo_train

from qp_oracle import solve_dual_reference

SPACE = SearchSpace.svm_default()

BANANA_NOISE = 0.32  # calibrated so the plain-swarm baseline lands inside 9-14% test error


class Counting:
    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.fn(x)


def sphere(x):
    return float(x @ x)


def wavy(x):
    return float((x @ x) + 3.0 * np.sum(1.0 - np.cos(2.0 * x)))


def test_criterion_1_grid_cardinality():
    counting = Counting(sphere)
    result = grid_search(SPACE, 0.5, counting)
    assert result.evaluations == 1681
    assert counting.calls == 1681
    print("criterion 1 PASS: grid on [-10,10]^2 with step 0.5 makes exactly 1681 evaluations")


def test_criterion_2_budget_compliance():
    worst = 0
    for algorithm in ("ma1", "ma2", "ma3", "ma4"):
        for seed in range(30):
            counting = Counting(wavy)
            result = run(RunConfig(algorithm=algorithm, seed=seed), counting)
            assert result.evaluations == counting.calls
            assert result.evaluations <= 1500
            worst = max(worst, result.evaluations)
    print(f"criterion 2 PASS: 120 memetic runs all within the 1500-evaluation budget (max {worst})")


def test_criterion_3_smo_oracle_equivalence():
    rng = np.random.default_rng(2024)
    worst_gap = 0.0
    worst_violation = 0.0
    for trial in range(100):
        n = int(rng.integers(4, 13))
        d = int(rng.integers(1, 4))
        features = rng.normal(size=(n, d))
        labels = np.where(rng.uniform(size=n) < 0.5, 1.0, -1.0)
        labels[0] = 1.0
        labels[1] = -1.0
        data = Dataset(features, labels)
        c = float(rng.choice([0.1, 1.0, 10.0]))
        kernel = Kernel.linear() if trial % 2 == 0 else Kernel.rbf(float(rng.uniform(0.1, 2.0)))
        model = smo_train(data, c, kernel)
        K = kernel_matrix(kernel, features, features)
        _, reference = solve_dual_reference(K, labels, c)
        gap = abs(dual_objective(model) - reference)
        assert gap <= 1e-4 * (1.0 + abs(reference))
        violation = float(kkt_violations(model).max())
        assert violation <= 1e-3 + 1e-12
        worst_gap = max(worst_gap, gap / (1.0 + abs(reference)))
        worst_violation = max(worst_violation, violation)
    print(
        "criterion 3 PASS: 100 solver-vs-oracle instances agree "
        f"(worst relative gap {worst_gap:.2e}, worst KKT violation {worst_violation:.2e})"
    )


def test_criterion_4_pattern_search_descent():
    exact = refine(np.array([1.0, 0.0]), 1.0, sphere, PatternConfig(), SPACE, 10_000)
    np.testing.assert_array_equal(exact.point, [0.0, 0.0])
    assert exact.fitness == 0.0

    rng = np.random.default_rng(99)
    functions = [
        sphere,
        wavy,
        lambda x: float(abs(x[0]) + 0.5 * abs(x[1] - 3.0)),
        lambda x: float(np.sign(np.sin(x[0] * 2.0))),
    ]
    for _ in range(1000):
        fn = functions[int(rng.integers(len(functions)))]
        start = rng.uniform(-10, 10, size=2)
        start_fitness = fn(start)
        result = refine(start, start_fitness, fn, PatternConfig(), SPACE, int(rng.integers(0, 80)))
        assert result.fitness <= start_fitness
    repeat = refine(np.array([1.0, 0.0]), 1.0, sphere, PatternConfig(), SPACE, 10_000)
    assert repeat.fitness == exact.fitness and np.array_equal(repeat.point, exact.point)
    print("criterion 4 PASS: stencil search finds the sphere optimum exactly and never worsens (1000 random runs)")


def test_criterion_5_selection_probability_law():
    probs = selection_probabilities([0.1, 0.2, 0.3])
    np.testing.assert_allclose(probs, [2 / 3, 1 / 3, 0.0], atol=1e-15)

    positions = np.array([[0.0, 0.0], [100.0, 0.0], [200.0, 0.0]])
    rng = np.random.default_rng(7)
    counts = np.zeros(3)
    trials = 10_000
    for _ in range(trials):
        outcome = select_probabilistic(positions, [0.1, 0.2, 0.3], 1e-6, rng)
        counts[outcome.selected] += 1
    np.testing.assert_allclose(counts / trials, [2 / 3, 1 / 3, 0.0], atol=0.02)

    for trial in range(200):
        n = int(rng.integers(2, 16))
        pop = rng.uniform(-10, 10, size=(n, 2))
        outcome = select_probabilistic(pop, rng.uniform(size=n), 2.0, rng)
        chosen = pop[outcome.selected]
        for a in range(len(chosen)):
            for b in range(a + 1, len(chosen)):
                assert float(np.linalg.norm(chosen[a] - chosen[b])) > 2.0
    print(
        "criterion 5 PASS: selection law exact at (2/3, 1/3, 0), Monte Carlo within +/-0.02, "
        "crowding radius respected"
    )


def test_criterion_6_pso_sphere_sanity():
    hits = 0
    for seed in range(100):
        config = RunConfig(
            algorithm="pso",
            pso=PsoConfig(stall_iterations=101),  # run the full 100 iterations
            seed=seed,
        )
        result = run(config, sphere)
        hits += result.best_fitness <= 1e-3
    assert hits >= 95
    print(f"criterion 6 PASS: sphere reached 1e-3 in {hits}/100 seeded swarm runs")


def test_criterion_7_benchmark_reproduction():
    spec = BenchmarkSpec(
        source=DataSource(banana_train=400, banana_test=2000, noise=BANANA_NOISE),
        algorithms=["gs", "ma4", "pso"],
        seeds=list(range(10)),
        cache=True,
        workers=2,
    )
    report = run_benchmark(spec)
    assert all("error" not in row for row in report.rows)
    mean = {a: report.aggregates[a]["mean_test_error"] for a in ("pso", "ma4", "gs")}
    assert 0.09 <= mean["pso"] <= 0.14, f"baseline off window: {mean['pso']:.4f}"
    assert mean["ma4"] <= mean["pso"] + 0.005
    assert mean["ma4"] <= mean["gs"] + 0.005
    ma4_evals = report.aggregates["ma4"]["mean_evaluations"]
    assert ma4_evals < 1681
    print(
        "criterion 7 PASS: mean test error "
        f"pso={100 * mean['pso']:.2f}% ma4={100 * mean['ma4']:.2f}% gs={100 * mean['gs']:.2f}%, "
        f"ma4 #eva={ma4_evals:.1f} < 1681"
    )


def test_criterion_8_traces_and_reproducibility():
    for algorithm in ("pso", "ma1", "ma2", "ma3", "ma4", "gs"):
        result = run(RunConfig(algorithm=algorithm, seed=13, grid_step=2.0), wavy)
        bests = [b for _, b in result.trace]
        assert all(a >= b for a, b in zip(bests, bests[1:]))

    spec = dict(
        source=DataSource(banana_train=60, banana_test=60, noise=0.25),
        algorithms=["pso", "ma4", "gs"],
        seeds=[0, 1],
        cache=True,
        run_config=RunConfig(max_evaluations=120, stall_evaluations=60, grid_step=2.0),
    )
    first = format_jsonl(run_benchmark(BenchmarkSpec(**spec)))
    second = format_jsonl(run_benchmark(BenchmarkSpec(**spec)))

    def strip_wall(text):
        return [
            {k: v for k, v in json.loads(line).items() if k != "wall_ms"}
            for line in text.strip().splitlines()
        ]

    assert strip_wall(first) == strip_wall(second)
    print("criterion 8 PASS: best-fitness traces are non-increasing; reruns match except wall time")


def test_criterion_9_cv_objective_properties():
    rng = np.random.default_rng(55)
    data = gen_banana(90, 0.3, 12)
    data = normalize_apply(normalize_fit(data), data)
    plan = make_folds(data, 5, seed=12)
    for label in (-1.0, 1.0):
        counts = [
            int(((plan.assignments == j) & (data.labels == label)).sum()) for j in range(5)
        ]
        assert max(counts) - min(counts) <= 1
    objective = CvObjective(data, plan)
    position = np.array([1.5, -0.5])
    first = objective(position)
    for _ in range(20):
        value = objective(rng.uniform(-10, 10, size=2))
        assert 0.0 <= value <= 1.0
    assert objective(position) == first
    assert objective.evaluations == 22
    print("criterion 9 PASS: stratified folds, unit-interval fitness, frozen-fold purity")

"""Acceptance suite: one test per acceptance criterion.

Each test prints a single ``ACCEPTANCE n <name>: PASS`` line on success
(run pytest with ``-s`` to see them); a failed assertion marks the
criterion FAIL.
"""

import time

import numpy as np
import pytest

from analytic_cl import persist
from analytic_cl.buffer import projection_weight, relu_project
from analytic_cl.exceptions import SingularMatrixError
from analytic_cl.learner import AnalyticContinualClassifier
from analytic_cl.metrics import AccuracyTrace, auc_accuracy, avg_accuracy, task_accuracy
from analytic_cl.oracle import accumulate, joint_solve
from analytic_cl.runner import RunConfig, run_training
from analytic_cl.scenario import ScenarioSpec, build_stream, generate_siblurry, generate_synthetic


def report(n, name):
    print(f"\nACCEPTANCE {n} {name}: PASS")


def make_stream(seed, classes, per_class, k, rd, rb, d_e=8, separation=8.0):
    dataset = generate_synthetic(classes, per_class, d_e, separation, seed)
    spec = ScenarioSpec(num_tasks=k, disjoint_ratio=rd, blurry_ratio=rb, seed=seed)
    return build_stream(spec, dataset)


def buffered_tasks(stream, config):
    d_e = stream.tasks[0].x.shape[1]
    w = projection_weight(config.buffer_seed, d_e, config.buffer_width)
    return [(relu_project(w, t.x), np.asarray(t.y)) for t in stream.tasks], w


def test_01_weight_invariance_20_random_configs():
    rng = np.random.default_rng(20240613)
    start = time.monotonic()
    for trial in range(20):
        d_b = int(rng.choice([16, 32, 64]))
        k = int(rng.choice([3, 5, 8]))
        rd = float(rng.choice([0.0, 0.5, 1.0]))
        rb = float(rng.choice([0.1, 0.5]))
        gamma = float(rng.choice([10.0, 100.0, 1000.0]))
        classes = int(rng.integers(k, 13))  # classes <= 12, >= K for feasibility
        per_class = int(rng.integers(20, 2000 // classes + 1))
        stream = make_stream(trial, classes, per_class, k, rd, rb)
        config = RunConfig(gamma=gamma, buffer_width=d_b, buffer_seed=trial, delta_n=100)

        tasks, _ = buffered_tasks(stream, config)
        learner = AnalyticContinualClassifier(gamma=gamma)
        for x, y in tasks:
            learner.fit_task(x, y)
        data = accumulate(tasks)
        w_joint = joint_solve(data, gamma)
        assert data.registry.classes == learner.registry_.classes
        diff = np.abs(learner.weights_ - w_joint).max()
        assert diff <= 1e-8, f"trial {trial}: diff {diff}"
    elapsed = time.monotonic() - start
    assert elapsed < 30.0, f"took {elapsed:.1f}s"
    report(1, "weight invariance (recursive == joint, 20 configs)")


def test_02_disjoint_stream_reduction():
    for seed in range(5):
        stream = make_stream(seed, classes=8, per_class=40, k=4, rd=1.0, rb=0.5)
        config = RunConfig(gamma=100.0, buffer_width=32, buffer_seed=seed, delta_n=50)
        tasks, _ = buffered_tasks(stream, config)
        learner = AnalyticContinualClassifier(gamma=100.0)
        for x, y in tasks:
            dec = learner.fit_task(x, y)
            assert np.abs(dec.exposed_gain).max() == 0.0
        result = run_training(stream, config)
        assert all(norm == 0.0 for norm in result.report.eclg_norms)
    report(2, "fully disjoint streams have exactly zero exposed-class gain")


def test_03_exposed_gain_ablation_direction():
    with_gain, without_gain = [], []
    for seed in range(5):
        stream = make_stream(seed, classes=8, per_class=60, k=5, rd=0.5, rb=0.5,
                             separation=3.0)
        for enabled, sink in ((True, with_gain), (False, without_gain)):
            config = RunConfig(gamma=100.0, buffer_width=32, buffer_seed=seed,
                               delta_n=100, use_exposed_gain=enabled)
            sink.append(run_training(stream, config).report.last)
    assert np.mean(with_gain) > np.mean(without_gain), (with_gain, without_gain)
    report(3, "ablating the exposed-class gain lowers mean final accuracy")


def test_04_last_accuracy_equals_joint_oracle():
    for seed in range(3):
        stream = make_stream(seed, classes=6, per_class=50, k=4, rd=0.5, rb=0.3)
        config = RunConfig(gamma=100.0, buffer_width=32, buffer_seed=seed, delta_n=40)
        result = run_training(stream, config)
        tasks, w_buf = buffered_tasks(stream, config)
        data = accumulate(tasks)
        w_joint = joint_solve(data, config.gamma)
        test_x = relu_project(w_buf, stream.test_x)
        seen = set(result.learner.registry_.classes)
        mask = np.array([int(v) in seen for v in stream.test_y])
        ids = np.asarray(data.registry.classes)
        pred_joint = ids[np.argmax(test_x[mask] @ w_joint, axis=1)]
        pred_rec = result.learner.predict(test_x[mask])
        assert np.array_equal(pred_joint, pred_rec)
        acc_joint = task_accuracy(pred_joint.tolist(), stream.test_y[mask].tolist())
        assert result.report.last == acc_joint
    report(4, "final accuracy equals the joint-oracle classifier's exactly")


def test_05_robustness_across_stream_composition():
    last_values = []
    for rd in (0.0, 0.5, 1.0):
        for rb in (0.1, 0.3, 0.5):
            accs = []
            for seed in (0, 1):
                stream = make_stream(seed, classes=8, per_class=80, k=4, rd=rd, rb=rb,
                                     separation=8.0)
                config = RunConfig(gamma=100.0, buffer_width=48, buffer_seed=seed,
                                   delta_n=100)
                accs.append(run_training(stream, config).report.last)
            last_values.append(np.mean(accs))
    spread = max(last_values) - min(last_values)
    assert spread < 0.02, f"spread {spread:.4f}, cells {last_values}"
    report(5, "final accuracy spread < 2 points across the (r_d, r_b) grid")


def test_06_gamma_insensitivity_and_degenerate_gamma():
    lasts = {}
    stream = make_stream(3, classes=8, per_class=80, k=4, rd=0.5, rb=0.3)
    for gamma in (10.0, 100.0, 1000.0):
        config = RunConfig(gamma=gamma, buffer_width=48, buffer_seed=3, delta_n=100)
        lasts[gamma] = run_training(stream, config).report.last
    assert max(lasts.values()) - min(lasts.values()) < 0.03, lasts

    config = RunConfig(gamma=100.0, buffer_width=48, buffer_seed=3, delta_n=100)
    tasks, _ = buffered_tasks(stream, config)
    data = accumulate(tasks)
    try:
        joint_solve(data, 0.0)  # may complete if the Gram matrix is nonsingular
    except SingularMatrixError:
        pass
    report(6, "gamma in {10,100,1000} within 3 points; gamma=0 never crashes")


def test_07_state_size_independent_of_samples_seen(tmp_path):
    rng = np.random.default_rng(0)

    def train(n_tasks):
        learner = AnalyticContinualClassifier(gamma=100.0)
        for t in range(n_tasks):
            x = rng.standard_normal((60, 16))
            y = rng.integers(0, 5, 60)  # all 5 classes appear early
            learner.fit_task(x, y)
        assert len(learner.registry_) == 5
        return learner

    p2, p8 = tmp_path / "t2.gacl", tmp_path / "t8.gacl"
    persist.save_checkpoint(p2, train(2))
    persist.save_checkpoint(p8, train(8))
    assert p2.stat().st_size == p8.stat().st_size
    report(7, "checkpoint size after 2 tasks equals size after 8 tasks")


def test_08_resume_equivalence_every_boundary(tmp_path):
    stream = make_stream(5, classes=6, per_class=50, k=5, rd=0.5, rb=0.3)
    config = RunConfig(gamma=100.0, buffer_width=32, buffer_seed=5, delta_n=40)
    paths = {}

    def checkpoint(t, learner):
        paths[t] = tmp_path / f"task_{t}.gacl"
        persist.save_checkpoint(paths[t], learner)

    full = run_training(stream, config, after_task=checkpoint)
    for t in range(len(stream.tasks) - 1):
        resumed = run_training(stream, config,
                               learner=persist.load_checkpoint(paths[t]),
                               start_task=t + 1)
        assert np.array_equal(resumed.learner.weights_, full.learner.weights_)
        assert np.array_equal(resumed.learner.memory_, full.learner.memory_)
    report(8, "checkpoint/reload at every task boundary is bit-identical")


def test_09_generator_properties_100_seeds():
    rng = np.random.default_rng(1)
    classes, per_class = 10, 40
    y = np.repeat(np.arange(classes), per_class)
    x = rng.standard_normal((y.size, 4))
    class_counts = []
    overlap_seen = False
    size_variation_seen = False
    for seed in range(100):
        spec = ScenarioSpec(num_tasks=5, disjoint_ratio=0.5, blurry_ratio=0.3, seed=seed)
        tasks, manifest = generate_siblurry(spec, x, y)
        # partition conservation (exact)
        assert sum(t.y.size for t in tasks) == y.size
        all_counts = {}
        for t in tasks:
            ids, counts = np.unique(t.y, return_counts=True)
            for c, n in zip(ids, counts):
                all_counts[int(c)] = all_counts.get(int(c), 0) + int(n)
        assert all(all_counts[c] == per_class for c in range(classes))
        # disjoint classes appear in exactly one task
        appearances = {}
        for i, t in enumerate(tasks):
            for c in np.unique(t.y):
                appearances.setdefault(int(c), set()).add(i)
        multi = [c for c, s in appearances.items() if len(s) > 1]
        assert len(multi) <= classes - round(0.5 * classes)
        if multi:
            overlap_seen = True
        class_counts.extend(len(m["classes"]) for m in manifest)
        if any(len(set(m["classes"].values())) > 1 for m in manifest):
            size_variation_seen = True
    assert np.var(class_counts) > 0      # property 1: class count not fixed
    assert overlap_seen                  # property 2: classes overlap
    assert size_variation_seen           # property 3: per-class sizes differ
    report(9, "generator satisfies the three stream properties over 100 seeds")


def test_10_metric_identities():
    flat = AccuracyTrace(points=((100, 0.7), (200, 0.7)))
    assert auc_accuracy(flat) == 0.7
    assert auc_accuracy(AccuracyTrace(points=((50, 0.0), (100, 1.0)))) == 0.5
    assert auc_accuracy(AccuracyTrace(points=((77, 0.31),))) == 0.31
    assert avg_accuracy([0.5, 0.7, 0.9]) == pytest.approx(0.7)
    assert avg_accuracy([0.4, 0.9]) == avg_accuracy([0.9, 0.4])
    assert task_accuracy([1, 2, 3, 4], [1, 2, 3, 9]) == 0.75
    report(10, "metric identities hold exactly")

from collections import Counter

import numpy as np
import pytest

from analytic_cl.exceptions import ParameterError
from analytic_cl.learner import AnalyticContinualClassifier
from analytic_cl.scenario import (
    ScenarioSpec,
    generate_siblurry,
    generate_synthetic,
    manifest_text,
)


def small_dataset(seed=0, classes=10, per_class=40, d=4):
    rng = np.random.default_rng(seed)
    y = np.repeat(np.arange(classes), per_class)
    x = rng.standard_normal((y.size, d))
    return x, y


def sample_multiset(x, y):
    return Counter((tuple(row), int(lbl)) for row, lbl in zip(x, y))


class TestSiBlurry:
    def test_partition_conservation(self):
        x, y = small_dataset()
        spec = ScenarioSpec(num_tasks=5, disjoint_ratio=0.5, blurry_ratio=0.3, seed=3)
        tasks, _ = generate_siblurry(spec, x, y)
        combined = Counter()
        for t in tasks:
            combined += sample_multiset(t.x, t.y)
        assert combined == sample_multiset(x, y)

    def test_fully_disjoint_classes_never_reappear(self):
        x, y = small_dataset()
        for seed in range(20):
            spec = ScenarioSpec(num_tasks=5, disjoint_ratio=1.0, blurry_ratio=0.5, seed=seed)
            tasks, _ = generate_siblurry(spec, x, y)
            seen = set()
            for t in tasks:
                classes = set(int(c) for c in np.unique(t.y))
                assert not classes & seen
                seen |= classes

    def test_disjoint_classes_never_reappear_mixed(self):
        x, y = small_dataset(classes=12, per_class=30)
        for seed in range(20):
            spec = ScenarioSpec(num_tasks=4, disjoint_ratio=0.5, blurry_ratio=0.4, seed=seed)
            tasks, _ = generate_siblurry(spec, x, y)
            appearances = Counter()
            for t in tasks:
                for c in np.unique(t.y):
                    appearances[int(c)] += 1
            # exactly round(0.5*12)=6 classes must be single-task
            single = sum(1 for v in appearances.values() if v == 1)
            assert single >= 6

    def test_zero_disjoint_ratio_overlaps(self):
        x, y = small_dataset()
        overlap_seen = False
        for seed in range(5):
            spec = ScenarioSpec(num_tasks=5, disjoint_ratio=0.0, blurry_ratio=0.3, seed=seed)
            tasks, _ = generate_siblurry(spec, x, y)
            per_task = [set(int(c) for c in np.unique(t.y)) for t in tasks]
            for i in range(len(per_task)):
                for j in range(i + 1, len(per_task)):
                    if per_task[i] & per_task[j]:
                        overlap_seen = True
        assert overlap_seen

    def test_extraction_fraction_within_rounding_slack(self):
        x, y = small_dataset(classes=8, per_class=50)
        k, r_b = 4, 0.3
        spec = ScenarioSpec(num_tasks=k, disjoint_ratio=0.0, blurry_ratio=r_b, seed=1)
        tasks, _ = generate_siblurry(spec, x, y)
        # with r_d=0 every sample is blurry; count rows that moved away from
        # their original task is not directly observable, so check per-task
        # totals still sum to the source size and no task lost everything
        assert sum(t.x.shape[0] for t in tasks) == y.size
        assert all(t.x.shape[0] >= 1 for t in tasks)

    def test_per_task_class_count_varies(self):
        x, y = small_dataset()
        counts = []
        for seed in range(100):
            spec = ScenarioSpec(num_tasks=5, disjoint_ratio=0.5, blurry_ratio=0.1, seed=seed)
            tasks, _ = generate_siblurry(spec, x, y)
            counts.extend(len(np.unique(t.y)) for t in tasks)
        assert np.var(counts) > 0

    def test_within_task_class_sizes_vary(self):
        x, y = small_dataset()
        spec = ScenarioSpec(num_tasks=5, disjoint_ratio=0.5, blurry_ratio=0.3, seed=7)
        tasks, _ = generate_siblurry(spec, x, y)
        assert any(len(set(np.bincount(t.y)[np.unique(t.y)])) > 1 for t in tasks)

    def test_infeasible_spec_rejected(self):
        x, y = small_dataset(classes=3)
        with pytest.raises(ParameterError):
            generate_siblurry(ScenarioSpec(num_tasks=5, disjoint_ratio=1.0,
                                           blurry_ratio=0.1, seed=0), x, y)

    def test_bad_ratio_rejected(self):
        with pytest.raises(ParameterError):
            ScenarioSpec(num_tasks=3, disjoint_ratio=1.2, blurry_ratio=0.1, seed=0)

    def test_deterministic_per_seed(self):
        x, y = small_dataset()
        spec = ScenarioSpec(num_tasks=5, disjoint_ratio=0.5, blurry_ratio=0.2, seed=9)
        t1, m1 = generate_siblurry(spec, x, y)
        t2, m2 = generate_siblurry(spec, x, y)
        assert m1 == m2
        for a, b in zip(t1, t2):
            assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)

    def test_manifest_text_format(self):
        x, y = small_dataset(classes=4, per_class=10)
        spec = ScenarioSpec(num_tasks=2, disjoint_ratio=1.0, blurry_ratio=0.0, seed=0)
        _, manifest = generate_siblurry(spec, x, y)
        text = manifest_text(manifest)
        lines = text.strip().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("task 0 total ")


class TestSynthetic:
    def test_deterministic(self):
        a = generate_synthetic(5, 20, 8, 4.0, seed=3)
        b = generate_synthetic(5, 20, 8, 4.0, seed=3)
        assert np.array_equal(a.train_x, b.train_x)
        assert np.array_equal(a.test_y, b.test_y)

    def test_split_sizes(self):
        ds = generate_synthetic(5, 20, 8, 4.0, seed=3)
        assert ds.train_x.shape == (90, 8)
        assert ds.test_x.shape == (10, 8)

    def test_zero_separation_is_chance_level(self):
        accs = []
        for seed in range(5):
            ds = generate_synthetic(10, 200, 8, 0.0, seed=seed)
            learner = AnalyticContinualClassifier(gamma=10.0).fit(ds.train_x, ds.train_y)
            accs.append((learner.predict(ds.test_x) == ds.test_y).mean())
        assert abs(np.mean(accs) - 0.1) < 0.1

    def test_well_separated_is_accurate(self):
        ds = generate_synthetic(5, 100, 8, 8.0, seed=1)
        learner = AnalyticContinualClassifier(gamma=10.0).fit(ds.train_x, ds.train_y)
        assert (learner.predict(ds.test_x) == ds.test_y).mean() >= 0.95

    def test_bad_params_rejected(self):
        with pytest.raises(ParameterError):
            generate_synthetic(0, 10, 4, 1.0, seed=0)
        with pytest.raises(ParameterError):
            generate_synthetic(3, 10, 4, -1.0, seed=0)

"""Task stream generation for stochastic-boundary incremental learning.

A scenario splits the class set into "disjoint" classes, each confined
to exactly one task, and "blurry" classes whose samples may leak into
other tasks.  Construction per spec (K tasks, disjoint class ratio r_d,
blurry sample ratio r_b, all choices seeded):

1. choose round(r_d * n_classes) classes as disjoint, rest blurry;
2. partition disjoint classes uniformly into K groups, likewise the
   blurry classes;
3. from each blurry task extract an r_b fraction of its samples and
   reassign them uniformly among the other K-1 blurry tasks;
4. task t = disjoint group t plus blurry group t after reassignment,
   rows shuffled.

Class partition, grouping, reassignment, and shuffling each draw from
an independent (seed, stream) substream so e.g. changing K does not
reshuffle the class partition.

A synthetic Gaussian-cluster dataset generator is included so the whole
pipeline runs without any external data.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ParameterError

_STREAM_CLASS_SPLIT = 0
_STREAM_GROUPING = 1
_STREAM_REASSIGN = 2
_STREAM_SHUFFLE = 3


def _rng(seed, stream):
    return np.random.default_rng(np.random.SeedSequence([int(seed), stream]))


def _round_half_up(x):
    return int(np.floor(x + 0.5))


def _split_into_groups(items, k):
    """Split a sequence into k groups, remainders to the earliest groups."""
    n = len(items)
    base, rem = divmod(n, k)
    groups, start = [], 0
    for t in range(k):
        size = base + (1 if t < rem else 0)
        groups.append(list(items[start:start + size]))
        start += size
    return groups


@dataclass(frozen=True)
class ScenarioSpec:
    num_tasks: int
    disjoint_ratio: float
    blurry_ratio: float
    seed: int

    def __post_init__(self):
        if self.num_tasks < 1:
            raise ParameterError(f"num_tasks must be >= 1, got {self.num_tasks}")
        for name, v in (("disjoint_ratio", self.disjoint_ratio),
                        ("blurry_ratio", self.blurry_ratio)):
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class TaskBatch:
    """One task's features and integer labels.

    ``pre_buffer`` flags features still in raw input space (before the
    random ReLU expansion).
    """

    x: np.ndarray
    y: np.ndarray
    pre_buffer: bool = True


@dataclass(frozen=True)
class TaskStream:
    tasks: list
    test_x: np.ndarray
    test_y: np.ndarray
    manifest: list = field(default_factory=list)


def generate_siblurry(spec, x, y):
    """Partition training data ``(x, y)`` into a seeded blurry task stream.

    Every training row lands in exactly one task.  Disjoint classes
    never appear in two tasks.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    if x.shape[0] != y.shape[0]:
        raise ParameterError("feature and label row counts differ")
    class_ids = np.unique(y)
    k = spec.num_tasks
    if spec.disjoint_ratio > 0 and len(class_ids) < k:
        raise ParameterError(
            f"{len(class_ids)} classes cannot fill {k} tasks with disjoint_ratio > 0"
        )

    n_disjoint = _round_half_up(spec.disjoint_ratio * len(class_ids))
    perm = _rng(spec.seed, _STREAM_CLASS_SPLIT).permutation(class_ids)
    disjoint_classes = list(perm[:n_disjoint])
    blurry_classes = list(perm[n_disjoint:])

    rng_group = _rng(spec.seed, _STREAM_GROUPING)
    disjoint_groups = _split_into_groups(rng_group.permutation(disjoint_classes)
                                         if disjoint_classes else [], k)
    blurry_groups = _split_into_groups(rng_group.permutation(blurry_classes)
                                       if blurry_classes else [], k)

    # sample indices initially assigned per task
    task_rows = [[] for _ in range(k)]
    for t in range(k):
        keep = set(disjoint_groups[t]) | set(blurry_groups[t])
        if keep:
            mask = np.isin(y, list(keep))
            task_rows[t] = list(np.nonzero(mask)[0])

    # blurry sample reassignment
    rng_re = _rng(spec.seed, _STREAM_REASSIGN)
    if k > 1 and spec.blurry_ratio > 0:
        blurry_sets = [set(g) for g in blurry_groups]
        total_blurry = 0
        total_extracted = 0
        for t in range(k):
            rows = np.array([i for i in task_rows[t] if int(y[i]) in blurry_sets[t]])
            total_blurry += len(rows)
            n_extract = _round_half_up(spec.blurry_ratio * len(rows))
            if n_extract == 0:
                continue
            total_extracted += n_extract
            extracted = rng_re.choice(rows, size=n_extract, replace=False)
            others = [t2 for t2 in range(k) if t2 != t]
            targets = rng_re.choice(others, size=n_extract, replace=True)
            extracted_set = set(int(i) for i in extracted)
            task_rows[t] = [i for i in task_rows[t] if i not in extracted_set]
            for i, t2 in zip(extracted, targets):
                task_rows[t2].append(int(i))
        # per-task rounding may drift from the global target by at most
        # half a sample per task
        target = _round_half_up(spec.blurry_ratio * total_blurry)
        assert abs(total_extracted - target) <= k

    rng_shuf = _rng(spec.seed, _STREAM_SHUFFLE)
    tasks, manifest = [], []
    for t in range(k):
        rows = np.array(sorted(task_rows[t]), dtype=np.intp)
        if rows.size == 0:
            raise ParameterError(
                f"task {t} came out empty; spec {spec} is infeasible for this data"
            )
        rows = rows[rng_shuf.permutation(rows.size)]
        tasks.append(TaskBatch(x=x[rows], y=y[rows]))
        ids, counts = np.unique(y[rows], return_counts=True)
        manifest.append({
            "task": t,
            "classes": {int(c): int(n) for c, n in zip(ids, counts)},
            "total": int(rows.size),
        })
    return tasks, manifest


def manifest_text(manifest):
    """Render a manifest as audit-friendly text lines."""
    lines = []
    for entry in manifest:
        counts = " ".join(f"{c}:{n}" for c, n in sorted(entry["classes"].items()))
        lines.append(f"task {entry['task']} total {entry['total']} classes {counts}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SyntheticDataset:
    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray


def generate_synthetic(classes, per_class, d_e, separation, seed):
    """Gaussian clusters with means on a sphere of radius `separation`.

    Unit-variance isotropic clusters, 90/10 train/test split per class,
    fully deterministic per seed.
    """
    if classes < 1 or per_class < 1 or d_e < 1:
        raise ParameterError("classes, per_class and d_e must all be >= 1")
    if separation < 0:
        raise ParameterError(f"separation must be >= 0, got {separation}")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 100]))
    train_x, train_y, test_x, test_y = [], [], [], []
    n_test = max(1, _round_half_up(0.1 * per_class)) if per_class > 1 else 0
    for c in range(classes):
        direction = rng.standard_normal(d_e)
        norm = np.linalg.norm(direction)
        mu = separation * direction / norm if norm > 0 else np.zeros(d_e)
        samples = mu + rng.standard_normal((per_class, d_e))
        test_x.append(samples[:n_test])
        test_y.append(np.full(n_test, c, dtype=np.int64))
        train_x.append(samples[n_test:])
        train_y.append(np.full(per_class - n_test, c, dtype=np.int64))
    return SyntheticDataset(
        train_x=np.vstack(train_x),
        train_y=np.concatenate(train_y),
        test_x=np.vstack(test_x),
        test_y=np.concatenate(test_y),
    )


def build_stream(spec, dataset):
    """Realize a task stream over a dataset's training split."""
    tasks, manifest = generate_siblurry(spec, dataset.train_x, dataset.train_y)
    return TaskStream(tasks=tasks, test_x=dataset.test_x,
                      test_y=dataset.test_y, manifest=manifest)

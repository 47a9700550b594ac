"""Experiment orchestration: training runs, invariance checks, sweeps.

Training follows the anytime-inference protocol: each task's samples
are consumed in chunks of ``delta_n`` (the closed-form update is
partition-invariant, so chunking never changes the final weight), and
the held-out test set, masked to classes seen so far, is evaluated
after every chunk.

The exposed-gain norm logged per task is computed at task granularity:
it is the magnitude of R_k X_k^T Y_exposed with exposure determined at
task start, and is exactly zero on streams where no class reappears.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .buffer import projection_weight, relu_project
from .exceptions import ParameterError
from .learner import AnalyticContinualClassifier
from .metrics import AccuracyTrace, MetricsReport, auc_accuracy, avg_accuracy, task_accuracy
from .oracle import accumulate, joint_solve


@dataclass
class RunConfig:
    """Knobs of one training run; defaults match the reference setup
    except for desk-scale buffer width."""

    gamma: float = 100.0
    buffer_width: int = 64
    buffer_seed: int = 0
    delta_n: int = 100
    use_exposed_gain: bool = True

    def __post_init__(self):
        if self.delta_n < 1:
            raise ParameterError(f"delta_n must be >= 1, got {self.delta_n}")
        if self.buffer_width < 1:
            raise ParameterError(f"buffer_width must be >= 1, got {self.buffer_width}")


def _chunk_counts(n_rows, delta_n):
    return max(1, math.ceil(n_rows / delta_n))


def task_boundary_from_updates(stream, delta_n, n_updates):
    """Map a chunk-update count back to the number of completed tasks."""
    total = 0
    for t, batch in enumerate(stream.tasks):
        total += _chunk_counts(batch.x.shape[0], delta_n)
        if total == n_updates:
            return t + 1
    if n_updates == 0:
        return 0
    raise ParameterError(f"{n_updates} updates is not a task boundary for this stream")


@dataclass
class RunResult:
    learner: AnalyticContinualClassifier
    report: MetricsReport
    buffer_weight: np.ndarray = None
    checkpoints: list = field(default_factory=list)


def _embed(stream_batch_x, weight):
    if weight is None:
        return np.asarray(stream_batch_x, dtype=np.float64)
    return relu_project(weight, stream_batch_x)


def run_training(stream, config, learner=None, start_task=0, after_task=None):
    """Train over a task stream, producing the learner and a metrics report.

    `learner` plus `start_task` resume a partially trained run; the
    resumed trajectory is bit-identical to the uninterrupted one.
    `after_task(task_index, learner)` is invoked at every task boundary
    (checkpoint hook).
    """
    if not stream.tasks:
        raise ParameterError("task stream is empty")
    pre_buffer = stream.tasks[0].pre_buffer
    weight = None
    if pre_buffer:
        d_e = stream.tasks[0].x.shape[1]
        weight = projection_weight(config.buffer_seed, d_e, config.buffer_width)

    if learner is None:
        learner = AnalyticContinualClassifier(
            gamma=config.gamma, use_exposed_gain=config.use_exposed_gain
        )
    test_x = _embed(stream.test_x, weight)
    test_y = np.asarray(stream.test_y)

    samples_seen = sum(stream.tasks[t].x.shape[0] for t in range(start_task))
    trace_points = []
    per_task_acc = []
    eclg_norms = []

    def seen_mask():
        seen = set(learner.registry_.classes)
        return np.array([int(v) in seen for v in test_y])

    def masked_accuracy():
        mask = seen_mask()
        if not mask.any():
            return 0.0
        pred = learner.predict(test_x[mask])
        return task_accuracy(pred.tolist(), test_y[mask].tolist())

    for t in range(start_task, len(stream.tasks)):
        batch = stream.tasks[t]
        x_b = _embed(batch.x, weight)
        y_b = np.asarray(batch.y)
        registry_before = learner.registry_ if hasattr(learner, "registry_") else None
        known_before = set(registry_before.classes) if registry_before else set()

        n = x_b.shape[0]
        for lo in range(0, n, config.delta_n):
            hi = min(lo + config.delta_n, n)
            learner.fit_task(x_b[lo:hi], y_b[lo:hi])
            samples_seen += hi - lo
            trace_points.append((samples_seen, masked_accuracy()))

        # task-granular exposed-class gain, exposure fixed at task start
        if known_before:
            idx = registry_before.index
            y_exposed = np.zeros((n, len(registry_before)))
            for i, v in enumerate(y_b):
                if int(v) in known_before:
                    y_exposed[i, idx[int(v)]] = 1.0
            gain = learner.memory_ @ (x_b.T @ y_exposed)
            eclg_norms.append(float(np.abs(gain).max()) if gain.size else 0.0)
        else:
            eclg_norms.append(0.0)

        per_task_acc.append(masked_accuracy())
        if after_task is not None:
            after_task(t, learner)

    trace = AccuracyTrace(points=tuple(trace_points))
    report = MetricsReport(
        auc=auc_accuracy(trace),
        avg=avg_accuracy(per_task_acc),
        last=per_task_acc[-1],
        per_task_acc=tuple(per_task_acc),
        trace=trace,
        eclg_norms=tuple(eclg_norms),
    )
    return RunResult(learner=learner, report=report, buffer_weight=weight)


def verify_invariance(stream, config):
    """Train recursively and solve the joint problem on the same data.

    Returns (max_abs_diff, recursive_weight, joint_weight) with columns
    aligned by class registry order.
    """
    pre_buffer = stream.tasks[0].pre_buffer
    weight = None
    if pre_buffer:
        d_e = stream.tasks[0].x.shape[1]
        weight = projection_weight(config.buffer_seed, d_e, config.buffer_width)

    learner = AnalyticContinualClassifier(gamma=config.gamma)
    embedded = []
    for batch in stream.tasks:
        x_b = _embed(batch.x, weight)
        learner.fit_task(x_b, batch.y)
        embedded.append((x_b, np.asarray(batch.y)))

    data = accumulate(embedded)
    w_joint = joint_solve(data, config.gamma)
    # same first-appearance order on both paths
    assert data.registry.classes == learner.registry_.classes
    diff = float(np.abs(learner.weights_ - w_joint).max())
    return diff, learner.weights_, w_joint


@dataclass(frozen=True)
class SweepCell:
    disjoint_ratio: float
    blurry_ratio: float
    gamma: float


def run_sweep(cells, seeds, make_stream, config_for):
    """Run each (cell, seed) pair; aggregate mean and standard error.

    `make_stream(cell, seed)` builds the task stream, `config_for(cell,
    seed)` its RunConfig.  Per-cell failures are recorded and the sweep
    continues.
    """
    rows = []
    for cell in cells:
        values = {"a_auc": [], "a_avg": [], "a_last": []}
        error = None
        for seed in seeds:
            try:
                stream = make_stream(cell, seed)
                result = run_training(stream, config_for(cell, seed))
            except Exception as exc:  # noqa: BLE001 - sweep must survive cell failures
                error = f"{type(exc).__name__}: {exc}"
                continue
            values["a_auc"].append(result.report.auc)
            values["a_avg"].append(result.report.avg)
            values["a_last"].append(result.report.last)
        row = {"cell": cell, "n_ok": len(values["a_last"]), "error": error}
        for key, vals in values.items():
            if vals:
                arr = np.asarray(vals)
                se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
                row[key] = (float(arr.mean()), se)
            else:
                row[key] = None
        rows.append(row)
    return rows


def sweep_table(rows):
    """Render sweep rows as a mean +/- standard-error text table."""
    header = f"{'r_d':>5} {'r_b':>5} {'gamma':>8}  {'a_auc':>17} {'a_avg':>17} {'a_last':>17}"
    lines = [header]
    for row in rows:
        cell = row["cell"]
        if row["n_ok"] == 0:
            lines.append(
                f"{cell.disjoint_ratio:>5g} {cell.blurry_ratio:>5g} {cell.gamma:>8g}"
                f"  FAILED ({row['error']})"
            )
            continue
        cols = []
        for key in ("a_auc", "a_avg", "a_last"):
            mean, se = row[key]
            cols.append(f"{mean:.4f}±{se:.4f}")
        lines.append(
            f"{cell.disjoint_ratio:>5g} {cell.blurry_ratio:>5g} {cell.gamma:>8g}  "
            + " ".join(f"{c:>17}" for c in cols)
        )
    return "\n".join(lines) + "\n"

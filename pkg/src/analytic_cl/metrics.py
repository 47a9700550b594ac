"""Evaluation metrics: anytime-accuracy AUC, average and last accuracy.

The anytime trace records test accuracy after every evaluation point
during training, indexed by the number of training samples consumed.
Its area under the curve is a rectangle-rule sum normalized by the
total sample count, so a constant curve at accuracy a scores exactly a
and every metric stays in [0, 1].
"""

import io
from dataclasses import dataclass, field

from .exceptions import ParameterError


@dataclass(frozen=True)
class AccuracyTrace:
    """(samples_seen, accuracy) points; samples_seen strictly increasing."""

    points: tuple  # of (int, float)

    def __post_init__(self):
        seen = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(seen, seen[1:])):
            raise ParameterError("samples_seen must be strictly increasing")

    @property
    def total_samples(self):
        return self.points[-1][0] if self.points else 0

    def to_csv(self):
        buf = io.StringIO()
        buf.write("samples_seen,accuracy\n")
        for n, acc in self.points:
            buf.write(f"{n},{acc!r}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class MetricsReport:
    auc: float
    avg: float
    last: float
    per_task_acc: tuple
    trace: AccuracyTrace
    eclg_norms: tuple = field(default_factory=tuple)

    def to_text(self):
        lines = [
            f"a_auc={self.auc!r}",
            f"a_avg={self.avg!r}",
            f"a_last={self.last!r}",
            f"num_tasks={len(self.per_task_acc)}",
        ]
        for k, acc in enumerate(self.per_task_acc, start=1):
            lines.append(f"task_{k}_acc={acc!r}")
        for k, norm in enumerate(self.eclg_norms, start=1):
            lines.append(f"task_{k}_eclg_norm={norm!r}")
        return "\n".join(lines) + "\n"


def auc_accuracy(trace):
    """Rectangle-rule area of the anytime curve, normalized to [0, 1].

    Each point's accuracy is weighted by the number of samples consumed
    since the previous point.
    """
    if not trace.points:
        raise ParameterError("empty accuracy trace")
    total = trace.total_samples
    area = 0.0
    prev = 0
    for n, acc in trace.points:
        area += acc * (n - prev)
        prev = n
    return area / total


def avg_accuracy(per_task):
    """Arithmetic mean of the per-task accuracies."""
    per_task = list(per_task)
    if not per_task:
        raise ParameterError("empty per-task accuracy sequence")
    return sum(per_task) / len(per_task)


def task_accuracy(predictions, truth):
    """Fraction of exact matches between two equal-length ID sequences."""
    predictions = list(predictions)
    truth = list(truth)
    if not truth:
        raise ParameterError("empty evaluation set")
    if len(predictions) != len(truth):
        raise ParameterError(
            f"length mismatch: {len(predictions)} predictions vs {len(truth)} labels"
        )
    hits = sum(1 for p, t in zip(predictions, truth) if p == t)
    return hits / len(truth)

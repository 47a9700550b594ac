"""Direct batch ridge solution used as ground truth in tests.

This module deliberately violates the exemplar-free contract: it stacks
every sample ever seen and solves the regularized least-squares problem
in one shot.  It exists to certify that the recursive learner reaches
the identical weight, and is never imported by the learner itself.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError
from .labels import ClassRegistry, split_and_register
from .linalg import as_matrix, spd_solve


@dataclass(frozen=True)
class AccumulatedDataset:
    """All samples stacked, labels block-one-hot over the full registry."""

    x_total: np.ndarray   # N x d
    y_total: np.ndarray   # N x n_classes
    registry: ClassRegistry

    def __post_init__(self):
        if self.x_total.shape[0] != self.y_total.shape[0]:
            raise ValueError("x_total and y_total row counts differ")


def accumulate(task_batches):
    """Stack ``(X, y)`` task batches into one dataset.

    Class columns follow first-appearance order over the concatenated
    stream, matching what the recursive learner's registry produces.
    """
    registry = ClassRegistry()
    splits = []
    xs = []
    for x, y in task_batches:
        registry, split = split_and_register(registry, y)
        splits.append(split)
        xs.append(as_matrix(x))
    d_y = len(registry)
    blocks = []
    for split in splits:
        block = split.onehot
        blocks.append(np.hstack([block, np.zeros((block.shape[0], d_y - block.shape[1]))]))
    return AccumulatedDataset(
        x_total=np.vstack(xs), y_total=np.vstack(blocks), registry=registry
    )


def joint_solve(data, gamma):
    """(X.T X + gamma I)^-1 X.T Y via a symmetric solve.

    gamma == 0 is admitted; it raises SingularMatrixError when X.T X is
    singular instead of producing garbage.
    """
    if gamma < 0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    x = data.x_total
    gram = x.T @ x
    gram[np.diag_indices_from(gram)] += gamma
    gram = 0.5 * (gram + gram.T)
    return spd_solve(gram, x.T @ data.y_total)


def cross_correlation(data):
    """X.T Y, the accumulated feature/label cross-correlation."""
    return data.x_total.T @ data.y_total

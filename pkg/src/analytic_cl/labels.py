"""Class registry and exposed/unexposed one-hot label splitting.

Each classifier column corresponds to one external class ID, assigned
in order of first appearance and never reassigned.  For a new task the
labels are encoded as two one-hot blocks: columns for classes already
registered before the task ("exposed") and columns for classes first
seen in the task ("unexposed", ordered by first appearance within the
task).
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ClassRegistry:
    """Append-only mapping from external class IDs to column indices."""

    classes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if len(set(self.classes)) != len(self.classes):
            raise ValueError("duplicate class IDs in registry")

    def __len__(self):
        return len(self.classes)

    def __contains__(self, class_id):
        return class_id in self.index

    @property
    def index(self):
        return {c: i for i, c in enumerate(self.classes)}


@dataclass(frozen=True)
class SplitLabels:
    """One-hot labels split into exposed and unexposed column blocks."""

    exposed: np.ndarray    # N x d_prev
    unexposed: np.ndarray  # N x (d_new - d_prev)

    @property
    def onehot(self):
        """The plain one-hot encoding over the updated registry order."""
        return np.hstack([self.exposed, self.unexposed])


def split_and_register(registry, labels):
    """Register new classes and split labels into one-hot blocks.

    Returns ``(updated_registry, SplitLabels)``.  New classes are
    appended in order of first occurrence within `labels`.
    """
    labels = [int(v) for v in labels]
    if not labels:
        raise ValueError("labels must be non-empty")
    known = registry.index
    new_classes = []
    for v in labels:
        if v not in known and v not in new_classes:
            new_classes.append(v)
    updated = ClassRegistry(registry.classes + tuple(new_classes))

    n = len(labels)
    d_prev = len(registry)
    exposed = np.zeros((n, d_prev))
    unexposed = np.zeros((n, len(new_classes)))
    new_index = {c: j for j, c in enumerate(new_classes)}
    for i, v in enumerate(labels):
        if v in known:
            exposed[i, known[v]] = 1.0
        else:
            unexposed[i, new_index[v]] = 1.0
    return updated, SplitLabels(exposed=exposed, unexposed=unexposed)


def onehot(registry, labels):
    """One-hot encode `labels` against a fixed registry (no registration)."""
    idx = registry.index
    out = np.zeros((len(labels), len(registry)))
    for i, v in enumerate(labels):
        out[i, idx[int(v)]] = 1.0
    return out

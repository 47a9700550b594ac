"""Recursive closed-form ridge classifier for class-incremental streams.

The classifier keeps exactly two matrices between tasks: the inverse
regularized Gram accumulation R (the "memory") and the linear weight W.
Each task batch updates both in closed form; no raw samples or
embeddings are retained.  The per-task update provably reproduces the
joint ridge solution over all data seen so far (see
:mod:`analytic_cl.oracle` for the direct check).

Update steps per task, in fixed order:

1. register the batch labels, splitting them into exposed (already
   known classes) and unexposed (first appearance) one-hot blocks;
2. R' = woodbury_update(R, X);
3. pad W on the right with zero columns for the new classes;
4. unexposed part: W_pad - R' X.T X W_pad, with R' X.T Y_unexposed
   filling exactly the new columns;
5. exposed gain part: R' X.T Y_exposed in the old columns, zero in the
   new ones;
6. W' = unexposed part + exposed gain part.

The exposed-gain term (step 5) is what lets reappearing classes keep
contributing label information; disabling it (``use_exposed_gain=False``)
reduces the update to the disjoint-stream special case and is exposed
purely for ablation runs.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import ParameterError, ShapeError, StateError
from .labels import ClassRegistry, split_and_register
from .linalg import woodbury_update


@dataclass(frozen=True)
class TaskUpdateDecomposition:
    """Additive split of one task's weight update.

    ``unexposed + exposed_gain`` equals the new weight exactly (same
    floating-point expression order).  ``exposed_gain`` is all-zero
    whenever no already-known class appears in the task.
    """

    unexposed: np.ndarray
    exposed_gain: np.ndarray


class AnalyticContinualClassifier(BaseEstimator, ClassifierMixin):
    """Exemplar-free incremental classifier with a closed-form update.

    Parameters
    ----------
    gamma : positive ridge regularization strength.  gamma == 0 is
        rejected: the memory matrix is initialized to (1/gamma) I and a
        zero gamma makes the first-task Gram matrix potentially
        singular.
    use_exposed_gain : keep the reappearing-class label term in the
        update.  Disable only for ablation studies; doing so forfeits
        the equivalence with joint training on overlapping streams.

    Attributes (after the first task)
    ----------
    memory_ : (d, d) inverse regularized Gram accumulation.
    weights_ : (d, n_classes) linear classifier weight.
    registry_ : ClassRegistry mapping class IDs to weight columns.
    n_tasks_ : number of task batches consumed.
    """

    def __init__(self, gamma=100.0, use_exposed_gain=True):
        self.gamma = gamma
        self.use_exposed_gain = use_exposed_gain

    def initialize(self, n_features):
        """Reset to the empty-knowledge state for `n_features`-wide inputs."""
        if not np.isfinite(self.gamma) or self.gamma <= 0:
            raise ParameterError(
                f"gamma must be > 0, got {self.gamma}: with gamma == 0 the "
                "memory matrix starts from a potentially singular Gram matrix"
            )
        if n_features < 1:
            raise ParameterError(f"n_features must be >= 1, got {n_features}")
        self.n_features_in_ = int(n_features)
        self.memory_ = np.eye(n_features) / self.gamma
        self.weights_ = np.zeros((n_features, 0))
        self.registry_ = ClassRegistry()
        self.n_tasks_ = 0
        return self

    def fit_task(self, X, y):
        """Consume one task batch; returns the update decomposition."""
        if np.asarray(X).shape[0] == 0:
            raise ShapeError("empty task batch")
        X = check_array(X, dtype=np.float64)
        y = np.asarray(y)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ShapeError(f"labels shape {y.shape} does not match {X.shape[0]} rows")
        if not hasattr(self, "memory_"):
            self.initialize(X.shape[1])
        if X.shape[1] != self.n_features_in_:
            raise ShapeError(
                f"embedding width {X.shape[1]} != expected {self.n_features_in_}"
            )

        registry, split = split_and_register(self.registry_, y)
        d_prev = self.weights_.shape[1]
        d_new = len(registry)

        r_new = woodbury_update(self.memory_, X)
        w_pad = np.hstack([self.weights_, np.zeros((self.n_features_in_, d_new - d_prev))])

        rxt = r_new @ X.T
        unexposed = w_pad - rxt @ (X @ w_pad)
        unexposed[:, d_prev:] = rxt @ split.unexposed

        exposed_gain = np.zeros_like(unexposed)
        exposed_gain[:, :d_prev] = rxt @ split.exposed

        self.memory_ = r_new
        self.registry_ = registry
        if self.use_exposed_gain:
            self.weights_ = unexposed + exposed_gain
        else:
            self.weights_ = unexposed.copy()
        self.n_tasks_ += 1
        return TaskUpdateDecomposition(unexposed=unexposed, exposed_gain=exposed_gain)

    def partial_fit(self, X, y, classes=None):
        """sklearn-style alias for :meth:`fit_task`; returns self."""
        self.fit_task(X, y)
        return self

    def fit(self, X, y):
        """Reset and train on a single batch (the one-task stream)."""
        X = check_array(X, dtype=np.float64)
        self.initialize(X.shape[1])
        self.fit_task(X, y)
        return self

    def decision_function(self, X):
        """Raw linear scores, one column per registered class."""
        check_is_fitted(self, "weights_")
        if len(self.registry_) == 0:
            raise StateError("no classes registered yet")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ShapeError(
                f"embedding width {X.shape[1]} != expected {self.n_features_in_}"
            )
        return X @ self.weights_

    def predict(self, X):
        """Argmax class IDs; ties break toward the lowest column index."""
        logits = self.decision_function(X)
        cols = np.argmax(logits, axis=1)
        ids = np.asarray(self.registry_.classes)
        return ids[cols]

    @property
    def classes_(self):
        check_is_fitted(self, "registry_")
        return np.asarray(self.registry_.classes)

    def clone_state(self):
        """Deep snapshot for concurrent evaluation during training."""
        check_is_fitted(self, "memory_")
        snap = AnalyticContinualClassifier(
            gamma=self.gamma, use_exposed_gain=self.use_exposed_gain
        )
        snap.n_features_in_ = self.n_features_in_
        snap.memory_ = self.memory_.copy()
        snap.weights_ = self.weights_.copy()
        snap.registry_ = self.registry_
        snap.n_tasks_ = self.n_tasks_
        return snap

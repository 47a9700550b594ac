"""Random feature expansion: a fixed linear projection plus ReLU.

The projection weight is sampled once from N(0, 1) using the portable
generator in :mod:`analytic_cl.rng`, so the same ``(seed, d_in, d_out)``
triple yields bit-identical weights everywhere.  There is no
width-dependent rescaling; the downstream ridge regularizer absorbs
scale.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import ParameterError, ShapeError
from .rng import normal_stream


def projection_weight(seed, d_in, d_out):
    """The d_in x d_out standard-normal projection matrix, row-major."""
    if d_in < 1 or d_out < 1:
        raise ParameterError(f"projection dimensions must be >= 1, got {d_in}x{d_out}")
    return normal_stream(seed, d_in * d_out).reshape(d_in, d_out)


def relu_project(weight, x):
    """max(0, x @ weight); raises ShapeError on width mismatch."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != weight.shape[0]:
        raise ShapeError(
            f"input width {x.shape[1] if x.ndim == 2 else x.shape} "
            f"does not match projection input width {weight.shape[0]}"
        )
    return np.maximum(0.0, x @ weight)


class RandomReluProjection(BaseEstimator, TransformerMixin):
    """Deterministic random ReLU feature map as a sklearn transformer.

    Parameters
    ----------
    n_components : output width of the expansion.
    seed : 64-bit seed controlling the frozen projection weight.
    """

    def __init__(self, n_components=5000, seed=0):
        self.n_components = n_components
        self.seed = seed

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        self.weight_ = projection_weight(self.seed, self.n_features_in_, self.n_components)
        return self

    def transform(self, X):
        check_is_fitted(self, "weight_")
        X = check_array(X, dtype=np.float64)
        return relu_project(self.weight_, X)

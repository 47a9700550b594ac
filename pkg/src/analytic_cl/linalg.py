"""Dense float64 linear algebra kernels.

Matrices are plain 2-D ``numpy.ndarray`` in row-major float64.  The
heavy lifting is delegated to LAPACK (via scipy); these wrappers add
the shape/symmetry checks and the error contract the rest of the
package relies on.
"""

import numpy as np
from scipy.linalg import lapack

from .exceptions import ShapeError, SingularMatrixError

SYMMETRY_RTOL = 1e-10


def as_matrix(a):
    """Coerce to a 2-D float64 array, validating rank."""
    out = np.asarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={out.ndim}")
    return out


def matmul(a, b):
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def _check_spd_input(a):
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise ShapeError(f"matrix must be square, got {a.shape}")
    scale = np.abs(a).max()
    if scale > 0 and np.abs(a - a.T).max() > SYMMETRY_RTOL * scale:
        raise ShapeError("matrix is not symmetric within tolerance")
    return a


def cholesky_factor(a):
    """Lower Cholesky factor of a symmetric positive definite matrix.

    Raises SingularMatrixError carrying the 1-based index of the first
    failing pivot when the matrix is not positive definite.
    """
    a = _check_spd_input(a)
    if a.size == 0:
        return a.copy()
    c, info = lapack.dpotrf(a, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        raise SingularMatrixError(
            f"matrix is not positive definite (pivot {info} failed)", pivot=int(info)
        )
    if info < 0:
        raise ShapeError(f"invalid argument {-info} to dpotrf")
    return c


def spd_solve(a, b):
    """Solve a @ X = b for symmetric positive definite `a`.

    Uses a Cholesky factorization; the explicit inverse is never formed.
    """
    b = as_matrix(b)
    c = cholesky_factor(a)
    if c.shape[0] != b.shape[0]:
        raise ShapeError(f"right-hand side rows {b.shape[0]} != system size {c.shape[0]}")
    x, info = lapack.dpotrs(c, b, lower=1)
    if info != 0:
        raise SingularMatrixError("triangular solve failed", pivot=int(abs(info)))
    if not np.isfinite(x).all():
        raise SingularMatrixError("solve produced non-finite entries")
    return x


def woodbury_update(r_prev, x):
    """Rank-n downdate of an inverse Gram matrix.

    Given r_prev = (G + gI)^-1 for some Gram accumulation G, returns
    (G + x.T x + gI)^-1 without touching G itself:

        R' = R - R x.T (I + x R x.T)^-1 x R

    The result is re-symmetrized as (R' + R'.T)/2 before returning so
    drift cannot accumulate over long task streams.
    """
    r_prev = as_matrix(r_prev)
    x = as_matrix(x)
    d = r_prev.shape[0]
    if r_prev.shape[1] != d:
        raise ShapeError(f"r_prev must be square, got {r_prev.shape}")
    if x.shape[1] != d:
        raise ShapeError(f"update rows have width {x.shape[1]}, expected {d}")
    if x.shape[0] == 0:
        return r_prev.copy()
    xr = x @ r_prev                      # n x d
    inner = xr @ x.T                     # n x n, equals x R x.T
    inner[np.diag_indices_from(inner)] += 1.0
    inner = 0.5 * (inner + inner.T)
    correction = xr.T @ spd_solve(inner, xr)
    r_new = r_prev - correction
    r_new = 0.5 * (r_new + r_new.T)
    if not np.isfinite(r_new).all():
        raise SingularMatrixError("update produced non-finite entries")
    return r_new

"""Dense kernel for small square matrices.

Everything operates on plain numpy arrays of shape (n, n), real or complex,
with 2 <= n <= 12.  Outputs of the public operations are checked to be
finite; dimension mismatches raise ValueError.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

MAX_DIM = 12

# |diag(R)| below this times the matrix norm counts as a QR breakdown.
_SINGULAR_RTOL = 1e-13


def as_square(a, name: str = "matrix") -> np.ndarray:
    """Coerce to an inexact square ndarray within the supported size range."""
    m = np.asarray(a)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    n = m.shape[0]
    if not 2 <= n <= MAX_DIM:
        raise ValueError(f"{name} has dimension {n}, supported range is 2..{MAX_DIM}")
    if not np.issubdtype(m.dtype, np.inexact):
        m = m.astype(float)
    if not np.isfinite(m).all():
        raise ValueError(f"{name} has non-finite entries")
    return m


def require_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")


def frobenius(a) -> float:
    """Frobenius norm, the norm used throughout this package."""
    return float(np.linalg.norm(a))


def commutator(x, y) -> np.ndarray:
    """[X, Y] = XY - YX."""
    xm, ym = as_square(x, "X"), as_square(y, "Y")
    require_same_dim(xm, ym)
    return xm @ ym - ym @ xm


def anticommutator(x, y) -> np.ndarray:
    """{X, Y} = XY + YX."""
    xm, ym = as_square(x, "X"), as_square(y, "Y")
    require_same_dim(xm, ym)
    return xm @ ym + ym @ xm


def expm(a) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring with a Pade core).

    Relative accuracy is at the 1e-12 level or better for ||A|| <= 10.
    Raises OverflowError when the result leaves the floating-point range.
    """
    m = as_square(a, "A")
    with np.errstate(over="ignore", invalid="ignore"):
        e = scipy.linalg.expm(m)
    if not np.isfinite(e).all():
        raise OverflowError(
            f"matrix exponential overflowed (input norm {frobenius(m):.3g})"
        )
    return e


def qr_decompose(a) -> tuple[np.ndarray, np.ndarray]:
    """Factor A = Q R with Q orthogonal and R upper triangular, diag(R) > 0.

    The positive diagonal pins down the otherwise sign-ambiguous factors.
    Real input only; a (numerically) singular A raises ValueError.
    """
    m = as_square(a, "A")
    if np.iscomplexobj(m):
        raise ValueError("qr_decompose supports real matrices only")
    q, r = np.linalg.qr(m)
    d = np.diagonal(r).copy()
    if np.min(np.abs(d)) <= _SINGULAR_RTOL * max(1.0, frobenius(m)):
        raise ValueError("matrix is numerically singular, QR normalization failed")
    s = np.sign(d)
    q = q * s[np.newaxis, :]
    r = r * s[:, np.newaxis]
    assert np.allclose(q.T @ q, np.eye(m.shape[0]), atol=1e-12), "Q lost orthogonality"
    assert np.all(np.diagonal(r) > 0), "R diagonal not positive after normalization"
    return q, r


def charpoly_coeffs(a) -> np.ndarray:
    """Coefficients [1, c1, ..., cn] of det(lam*I - A) = lam^n + c1*lam^(n-1) + ... + cn.

    Computed with the Faddeev-LeVerrier recurrence; this is the spectrum
    witness used project-wide (isospectrality checks compare these vectors).
    """
    m = as_square(a, "A")
    n = m.shape[0]
    coeffs = np.empty(n + 1, dtype=m.dtype)
    coeffs[0] = 1.0
    work = m.copy()
    for k in range(1, n + 1):
        coeffs[k] = -np.trace(work) / k
        if k < n:
            work = m @ (work + coeffs[k] * np.eye(n, dtype=m.dtype))
    if not np.isfinite(coeffs).all():
        raise ValueError("characteristic polynomial coefficients are non-finite")
    return coeffs

"""Dense linear-algebra kernel shared by the rest of the package.

Matrices are plain 2-D float64 ``numpy`` arrays. Functions never mutate
their inputs.
"""

from __future__ import annotations

import numpy as np


class ContractError(ValueError):
    """Raised when a caller violates an operation's preconditions."""


class NumericError(ArithmeticError):
    """Raised when a numerical routine fails to converge."""


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D float array (1-D input becomes a column)."""
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ContractError(f"{name}: expected a 2-D array, got shape {m.shape}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ContractError(f"{name}: empty matrix of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractError(f"{name}: contains NaN or Inf")
    return m


def pinv_tolerance(shape: tuple[int, int], sigma_max: float) -> float:
    return max(shape) * np.finfo(float).eps * sigma_max


def pseudoinverse(m) -> np.ndarray:
    """Moore-Penrose pseudoinverse via the thin SVD.

    Singular values below ``max(rows, cols) * eps * sigma_max`` are treated
    as zero.
    """
    a = as_matrix(m, "pseudoinverse")
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"pseudoinverse: SVD did not converge ({exc})") from exc
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[1], a.shape[0]))
    keep = s > pinv_tolerance(a.shape, s[0])
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (vt.T * s_inv) @ u.T


def lstsq(a, b) -> np.ndarray:
    """Minimum-norm least-squares solution of ``a @ x = b``."""
    a = as_matrix(a, "lstsq a")
    b = as_matrix(b, "lstsq b")
    if a.shape[0] != b.shape[0]:
        raise ContractError(
            f"lstsq: row mismatch, a is {a.shape} but b is {b.shape}"
        )
    return pseudoinverse(a) @ b


def mse(pred, target) -> float:
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape:
        raise ContractError(f"mse: shape mismatch {pred.shape} vs {target.shape}")
    return float(np.mean((pred - target) ** 2))

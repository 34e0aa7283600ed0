"""Smooth convex objectives with blockwise gradient oracles and O(m) caches.

Two concrete objectives are provided: least squares and l2-regularized
logistic regression. Both expose the same oracle surface: full/block
gradients, an auxiliary cache (residual or linear predictors) that a solver
updates incrementally after single-block changes, and cheap one-dimensional
restrictions used by the exact thresholding map.
"""
from __future__ import annotations

from typing import Protocol, runtime_checkable

import numpy as np

__all__ = [
    "SmoothOracle",
    "LeastSquaresObjective",
    "LogisticL2Objective",
    "load_matrix_csv",
    "load_vector_csv",
    "load_labels_csv",
    "finite_difference_error",
]


@runtime_checkable
class SmoothOracle(Protocol):
    """Oracle surface a smooth convex objective must provide.

    ``cache`` is objective-specific auxiliary state (e.g. the residual) that
    makes single-block updates O(m * n_i) instead of O(m * n). The cache is
    exclusively owned by one solver run; oracles themselves are immutable.
    """

    dim: int

    def eval(self, x: np.ndarray) -> float: ...

    def full_grad(self, x: np.ndarray) -> np.ndarray: ...

    def make_cache(self, x: np.ndarray) -> np.ndarray: ...

    def value_from_cache(self, x: np.ndarray, cache: np.ndarray) -> float: ...

    def block_grad(self, x: np.ndarray, sl: slice, cache: np.ndarray) -> np.ndarray: ...

    def update_cache(
        self, cache: np.ndarray, sl: slice, old_block: np.ndarray, new_block: np.ndarray
    ) -> np.ndarray: ...

    def coord_grad_shifted(self, x: np.ndarray, j: int, h: float, cache: np.ndarray) -> float: ...

    def coord_curvature_shifted(
        self, x: np.ndarray, j: int, h: float, cache: np.ndarray
    ) -> float: ...

    def value_shifted(self, x: np.ndarray, j: int, h: float, cache: np.ndarray) -> float: ...


def _finite(v: float) -> float:
    if not np.isfinite(v):
        raise ValueError(f"objective evaluated to a non-finite value: {v}")
    return float(v)


class LeastSquaresObjective:
    """f(x) = 1/2 ||Ax - b||^2 with cached residual r = Ax - b."""

    def __init__(self, A: np.ndarray, b: np.ndarray) -> None:
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        if A.ndim != 2:
            raise ValueError("A must be a 2-D matrix")
        if b.shape != (A.shape[0],):
            raise ValueError(f"b must have length {A.shape[0]}, got shape {b.shape}")
        # Fortran order keeps block-column slices contiguous.
        self.A = np.asfortranarray(A)
        self.b = b.copy()
        self._col_sq = np.einsum("ij,ij->j", A, A)

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def eval(self, x: np.ndarray) -> float:
        r = self.A @ x - self.b
        return _finite(0.5 * float(r @ r))

    def full_grad(self, x: np.ndarray) -> np.ndarray:
        return self.A.T @ (self.A @ x - self.b)

    def make_cache(self, x: np.ndarray) -> np.ndarray:
        return self.A @ x - self.b

    def value_from_cache(self, x: np.ndarray, cache: np.ndarray) -> float:
        return _finite(0.5 * float(cache @ cache))

    def block_grad(self, x: np.ndarray, sl: slice, cache: np.ndarray) -> np.ndarray:
        return self.A[:, sl].T @ cache

    def update_cache(
        self, cache: np.ndarray, sl: slice, old_block: np.ndarray, new_block: np.ndarray
    ) -> np.ndarray:
        diff = new_block - old_block
        if np.any(diff != 0.0):
            cache += self.A[:, sl] @ diff
        return cache

    def coord_grad_shifted(self, x: np.ndarray, j: int, h: float, cache: np.ndarray) -> float:
        return float(self.A[:, j] @ cache) + self._col_sq[j] * h

    def coord_curvature_shifted(
        self, x: np.ndarray, j: int, h: float, cache: np.ndarray
    ) -> float:
        return float(self._col_sq[j])

    def value_shifted(self, x: np.ndarray, j: int, h: float, cache: np.ndarray) -> float:
        r = cache + self.A[:, j] * h
        return 0.5 * float(r @ r)

    # Constants for partition construction.

    def column_lipschitz(self) -> np.ndarray:
        """Per-coordinate gradient Lipschitz constants ||A_j||^2."""
        return self._col_sq.copy()

    def block_lipschitz(self, block_sizes) -> np.ndarray:
        """Per-block constants ||A_S||_2^2 (squared spectral norm of the column slice)."""
        out = []
        start = 0
        for s in block_sizes:
            sub = self.A[:, start : start + s]
            if s == 1:
                out.append(float(self._col_sq[start]))
            else:
                out.append(float(np.linalg.norm(sub, 2) ** 2))
            start += s
        return np.array(out)

    def spectral_lipschitz(self) -> float:
        """The tight global constant lambda_max(A^T A)."""
        return float(np.linalg.eigvalsh(self.A.T @ self.A)[-1])


def _log1pexp(t: np.ndarray) -> np.ndarray:
    # max(t, 0) + log1p(exp(-|t|)), the overflow-safe branch form
    t = np.asarray(t, dtype=float)
    return np.maximum(t, 0.0) + np.log1p(np.exp(-np.abs(t)))


def _sigmoid(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    et = np.exp(t[~pos])
    out[~pos] = et / (1.0 + et)
    return out


class LogisticL2Objective:
    """Mean logistic loss with ridge term.

    f(x) = (1/m) sum_k [log(1 + e^{<a_k,x>}) - y_k <a_k,x>] + (nu/2) ||x||^2

    Samples a_k are the rows of ``data`` (shape m x n); labels y in {0,1}.
    Strongly convex with parameter nu. Cache: linear predictors t = data @ x.
    """

    def __init__(self, data: np.ndarray, y: np.ndarray, nu: float) -> None:
        data = np.asarray(data, dtype=float)
        y = np.asarray(y, dtype=float)
        if data.ndim != 2:
            raise ValueError("data must be a 2-D matrix (rows are samples)")
        m = data.shape[0]
        if y.shape != (m,):
            raise ValueError(f"labels must have length {m}, got shape {y.shape}")
        if not np.all((y == 0.0) | (y == 1.0)):
            raise ValueError("labels must be 0 or 1")
        if nu <= 0:
            raise ValueError("ridge parameter nu must be positive")
        self.data = np.asfortranarray(data)
        self.y = y.copy()
        self.nu = float(nu)
        self.m = m
        self._col_sq = np.einsum("ij,ij->j", data, data)

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    @property
    def strong_convexity(self) -> float:
        return self.nu

    def eval(self, x: np.ndarray) -> float:
        t = self.data @ x
        loss = float(np.sum(_log1pexp(t) - self.y * t)) / self.m
        return _finite(loss + 0.5 * self.nu * float(x @ x))

    def full_grad(self, x: np.ndarray) -> np.ndarray:
        t = self.data @ x
        return self.data.T @ (_sigmoid(t) - self.y) / self.m + self.nu * x

    def make_cache(self, x: np.ndarray) -> np.ndarray:
        return self.data @ x

    def value_from_cache(self, x: np.ndarray, cache: np.ndarray) -> float:
        loss = float(np.sum(_log1pexp(cache) - self.y * cache)) / self.m
        return _finite(loss + 0.5 * self.nu * float(x @ x))

    def block_grad(self, x: np.ndarray, sl: slice, cache: np.ndarray) -> np.ndarray:
        return self.data[:, sl].T @ (_sigmoid(cache) - self.y) / self.m + self.nu * x[sl]

    def update_cache(
        self, cache: np.ndarray, sl: slice, old_block: np.ndarray, new_block: np.ndarray
    ) -> np.ndarray:
        diff = new_block - old_block
        if np.any(diff != 0.0):
            cache += self.data[:, sl] @ diff
        return cache

    def coord_grad_shifted(self, x: np.ndarray, j: int, h: float, cache: np.ndarray) -> float:
        t = cache + self.data[:, j] * h
        g = float(self.data[:, j] @ (_sigmoid(t) - self.y)) / self.m
        return g + self.nu * (x[j] + h)

    def coord_curvature_shifted(
        self, x: np.ndarray, j: int, h: float, cache: np.ndarray
    ) -> float:
        t = cache + self.data[:, j] * h
        s = _sigmoid(t)
        return float((s * (1.0 - s)) @ (self.data[:, j] ** 2)) / self.m + self.nu

    def value_shifted(self, x: np.ndarray, j: int, h: float, cache: np.ndarray) -> float:
        t = cache + self.data[:, j] * h
        loss = float(np.sum(_log1pexp(t) - self.y * t)) / self.m
        sq = float(x @ x) - x[j] ** 2 + (x[j] + h) ** 2
        return loss + 0.5 * self.nu * sq

    def column_lipschitz(self) -> np.ndarray:
        """Per-coordinate bound (1/(4m)) sum_k a_{k,j}^2 + nu."""
        return self._col_sq / (4.0 * self.m) + self.nu

    def block_lipschitz(self, block_sizes) -> np.ndarray:
        """Per-block bound (1/(4m)) ||A_S||_2^2 + nu."""
        out = []
        start = 0
        for s in block_sizes:
            sub = self.data[:, start : start + s]
            if s == 1:
                sq = float(self._col_sq[start])
            else:
                sq = float(np.linalg.norm(sub, 2) ** 2)
            out.append(sq / (4.0 * self.m) + self.nu)
            start += s
        return np.array(out)


def load_matrix_csv(path) -> np.ndarray:
    """Load a matrix from headerless CSV rows of decimal numbers."""
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float, ndmin=2))


def load_vector_csv(path) -> np.ndarray:
    """Load a vector from a headerless single-column (or single-row) CSV."""
    arr = np.loadtxt(path, delimiter=",", dtype=float)
    return np.atleast_1d(arr).ravel()


def load_labels_csv(path) -> np.ndarray:
    """Load binary labels from a single CSV column; values must be 0 or 1."""
    y = load_vector_csv(path)
    if not np.all((y == 0.0) | (y == 1.0)):
        raise ValueError(f"labels in {path} must all be 0 or 1")
    return y


def finite_difference_error(
    oracle: SmoothOracle, x: np.ndarray, h: float = 1e-6
) -> tuple[float, int]:
    """Worst relative error of the analytic gradient vs central differences.

    Returns (max |g_fd - g|_j / (1 + ||g||), offending coordinate index).
    """
    x = np.asarray(x, dtype=float)
    g = oracle.full_grad(x)
    fd = np.empty_like(g)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        fd[j] = (oracle.eval(x + e) - oracle.eval(x - e)) / (2.0 * h)
    denom = 1.0 + float(np.linalg.norm(g))
    err = np.abs(fd - g) / denom
    j_worst = int(np.argmax(err))
    return float(err[j_worst]), j_worst

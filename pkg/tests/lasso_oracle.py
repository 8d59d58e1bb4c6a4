"""Cyclic coordinate descent for the complex LASSO, used only as a test oracle."""

import numpy as np


def cd_lasso(A: np.ndarray, y: np.ndarray, lam: float, tol: float = 1e-10, max_sweeps: int = 200_000):
    """Minimize 0.5*||Ax - y||^2 + lam*||x||_1 one coordinate at a time.

    Each coordinate update is exact: with column a_j and the residual r of all
    other coordinates, the minimizer is the complex soft threshold of
    a_j^H r / ||a_j||^2 at lam / ||a_j||^2. Stops when a full sweep changes the
    objective by less than ``tol`` (relative).
    """
    m, n = A.shape
    x = np.zeros(n, complex)
    r = y.astype(complex).copy()
    col_sq = np.sum(np.abs(A) ** 2, axis=0)
    prev = 0.5 * np.vdot(r, r).real
    for _ in range(max_sweeps):
        for j in range(n):
            if col_sq[j] == 0:
                continue
            r += A[:, j] * x[j]
            z = np.vdot(A[:, j], r) / col_sq[j]
            mag = abs(z)
            x[j] = 0 if mag <= lam / col_sq[j] else z * (1 - lam / (col_sq[j] * mag))
            r -= A[:, j] * x[j]
        obj = 0.5 * np.vdot(r, r).real + lam * np.abs(x).sum()
        if abs(prev - obj) <= tol * max(abs(obj), 1e-300):
            break
        prev = obj
    return x, obj

"""Constant-step FISTA for complex LASSO problems.

Solves ``min_x 0.5*||A x - y||^2 + lam*||x||_1`` where ``A`` is anything with
``forward``, ``adjoint`` and ``shape`` (see :class:`ncisac.transforms.SensingOperator`).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

LIPSCHITZ_SAFETY = 1.05


class DivergenceError(FloatingPointError):
    pass


class DegenerateOperatorError(ValueError):
    pass


@dataclass(frozen=True)
class FistaConfig:
    lam: float = 0.0
    max_iters: int = 500
    error_tol: float = 1e-6
    lipschitz: float | None = None  # None: estimate by power iteration

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.error_tol < 0:
            raise ValueError("error_tol must be non-negative")
        if self.lipschitz is not None and not self.lipschitz > 0:
            raise ValueError("lipschitz must be positive")

    def with_lam(self, lam: float) -> "FistaConfig":
        return replace(self, lam=lam)


@dataclass
class FistaResult:
    solution: np.ndarray
    iterations: int
    residual_history: np.ndarray = field(repr=False)
    converged: bool
    objective: float

    @property
    def final_error(self) -> float:
        return float(self.residual_history[-1])


def soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    """Complex shrinkage: scale each entry's modulus down by ``t``, keep its phase."""
    if t < 0:
        raise ValueError("threshold must be non-negative")
    v = np.asarray(v)
    mag = np.abs(v)
    scale = np.divide(np.maximum(mag - t, 0.0), mag, out=np.zeros_like(mag, dtype=float), where=mag > 0)
    return v * scale


def objective(A, x: np.ndarray, y: np.ndarray, lam: float) -> float:
    r = A.forward(x) - y
    return float(0.5 * np.vdot(r, r).real + lam * np.abs(x).sum())


def estimate_lipschitz(A, iters: int = 30, seed=0) -> float:
    """Power-iteration estimate of ||A||_2^2 times a 5% safety margin."""
    if iters < 1:
        raise ValueError("iters must be at least 1")
    n = A.shape[1]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    sigma2 = 0.0
    for _ in range(iters):
        z = A.adjoint(A.forward(x))
        sigma2 = float(np.vdot(x, z).real)
        nz = np.linalg.norm(z)
        if nz == 0.0:
            break
        x = z / nz
    if not sigma2 > 0:
        raise DegenerateOperatorError("operator maps the probe vector to zero")
    return LIPSCHITZ_SAFETY * sigma2


def solve(A, y: np.ndarray, cfg: FistaConfig) -> FistaResult:
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError("y must be a vector; use solve_many for batches")
    return solve_many(A, y[:, None], cfg)[0]


def solve_many(A, Y: np.ndarray, cfg: FistaConfig) -> list[FistaResult]:
    """Solve one LASSO per column of ``Y``, all sharing the operator ``A``.

    Each column follows its own stopping rule, so the results equal those of
    separate :func:`solve` calls.
    """
    Y = np.asarray(Y, dtype=complex)
    m, n = A.shape
    if Y.ndim != 2 or Y.shape[0] != m:
        raise ValueError(f"observations must have shape ({m}, B), got {Y.shape}")
    batch = Y.shape[1]
    L = cfg.lipschitz if cfg.lipschitz is not None else estimate_lipschitz(A)
    lam = cfg.lam
    thresh = lam / L

    x_prev = np.zeros((n, batch), dtype=complex)
    probe = x_prev.copy()
    t = np.ones(batch)
    best = x_prev.copy()
    best_obj = np.full(batch, np.inf)
    history = np.zeros((cfg.max_iters, batch))
    iters = np.zeros(batch, dtype=int)
    converged = np.zeros(batch, dtype=bool)
    active = np.arange(batch)

    for k in range(cfg.max_iters):
        yk = probe[:, active]
        obs = Y[:, active]
        x = soft_threshold(yk - A.adjoint(A.forward(yk) - obs) / L, thresh)
        t_old = t[active]
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_old**2))
        probe[:, active] = x + ((t_old - 1.0) / t_new) * (x - x_prev[:, active])
        x_prev[:, active] = x
        t[active] = t_new

        r = A.forward(x) - obs
        err = np.linalg.norm(r, axis=0)
        if not (np.all(np.isfinite(err)) and np.all(np.isfinite(x))):
            raise DivergenceError(f"non-finite iterate at step {k + 1}; is the Lipschitz constant too small?")
        obj = 0.5 * err**2 + lam * np.abs(x).sum(axis=0)
        better = obj < best_obj[active]
        if better.any():
            cols = active[better]
            best[:, cols] = x[:, better]
            best_obj[cols] = obj[better]
        history[k, active] = err
        iters[active] = k + 1

        if k > 0:
            done = np.abs(history[k - 1, active] - err) < cfg.error_tol
            converged[active[done]] = True
            active = active[~done]
            if active.size == 0:
                break

    return [
        FistaResult(
            solution=best[:, b].copy(),
            iterations=int(iters[b]),
            residual_history=history[: iters[b], b].copy(),
            converged=bool(converged[b]),
            objective=float(best_obj[b]),
        )
        for b in range(batch)
    ]

"""Finite-difference gradient checking used by the neural tests."""

import numpy as np


def numerical_grad(f, x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of scalar f() with respect to array x,
    mutating x in place around each probe."""
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        orig = x[idx]
        x[idx] = orig + eps
        fp = f()
        x[idx] = orig - eps
        fm = f()
        x[idx] = orig
        grad[idx] = (fp - fm) / (2.0 * eps)
    return grad


def rel_error(a: np.ndarray, b: np.ndarray) -> float:
    # epsilon floor keeps zero-gradient parameters (for instance the key
    # projection bias, which softmax shift invariance makes inert) from
    # turning float dust into a 100% relative error
    num = np.linalg.norm(a - b)
    den = np.linalg.norm(a) + np.linalg.norm(b) + 1e-8
    return float(num / den)


def grads_close(analytic: np.ndarray, numeric: np.ndarray, rel_tol: float = 1e-5, abs_tol: float = 1e-9) -> bool:
    """Relative agreement, with an absolute floor for parameters whose true
    gradient is so small that finite differences are cancellation noise."""
    if rel_error(analytic, numeric) < rel_tol:
        return True
    return float(np.abs(analytic - numeric).max()) < abs_tol

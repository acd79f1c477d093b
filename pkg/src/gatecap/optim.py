"""Multi-restart local maximization shared by the capacity optimizers.

Every restart gets its own generator derived from ``(seed, restart index)``
so results do not depend on the order in which restarts execute. The merge
keeps the highest value; ties go to the lower restart index.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

log = logging.getLogger(__name__)

LOG2E = 1.0 / np.log(2.0)
GRAD_FREEZE = 1e-9


class InvariantViolation(RuntimeError):
    """A computed value broke a bound that must hold for any feasible point."""


@dataclass
class RestartOutcome:
    index: int
    value: float
    x: np.ndarray
    converged: bool
    iterations: int


def restart_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def entropy_and_grad(m: np.ndarray, want_grad: bool = True):
    """Entanglement entropy of the cut matrix ``m`` and d/d(conj m) times 2.

    The returned gradient is dE/dRe(m) + i dE/dIm(m). Schmidt weights below
    1e-9 use a frozen logarithm so the gradient stays finite.
    """
    if not want_grad:
        lam = np.linalg.svd(m, compute_uv=False) ** 2
        lam = lam[lam > 1e-12]
        return float(-np.sum(lam * np.log2(lam))), None
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    lam = s * s
    keep = lam > 1e-12
    e = float(-np.sum(lam[keep] * np.log2(lam[keep])))
    g = -(np.log2(np.maximum(lam, GRAD_FREEZE)) + LOG2E)
    grad = 2.0 * (u * (g * s)) @ vh
    return e, grad


def hermitian_entropy_and_grad(rho: np.ndarray):
    """S(rho) for a batch of Hermitian PSD matrices and -log2(rho) - 1/ln2.

    ``rho`` has shape (..., n, n). The returned gradient matrix G satisfies
    dS = Re tr(G drho).
    """
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    wl = np.where(w > 1e-12, w, 1.0)
    s = -np.sum(np.where(w > 1e-12, w * np.log2(wl), 0.0), axis=-1)
    g = -(np.log2(np.maximum(w, GRAD_FREEZE)) + LOG2E)
    gm = (v * g[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))
    return s, gm


def project_normalization(x: np.ndarray, g: np.ndarray):
    """Chain rule through psi = x / |x| for complex x and complex-form gradient g."""
    nrm = np.linalg.norm(x)
    psi = x / nrm
    radial = np.real(np.vdot(psi, g))
    return (g - radial * psi) / nrm


def c2r(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real.reshape(-1), z.imag.reshape(-1)])


def r2c(x: np.ndarray) -> np.ndarray:
    n = x.size // 2
    return x[:n] + 1j * x[n:]


def maximize(fun: Callable, x0: np.ndarray, max_iterations: int, gradient_tolerance: float):
    """Locally maximize ``fun`` (returning value and gradient) from x0."""

    def neg(x):
        v, g = fun(x)
        return -v, -g

    res = minimize(neg, x0, jac=True, method="L-BFGS-B",
                   options={"maxiter": max_iterations, "gtol": gradient_tolerance,
                            "ftol": 1e-15, "maxcor": 30, "maxls": 40})
    gnorm = float(np.abs(res.jac).max()) if res.jac is not None else np.inf
    converged = bool(res.success) or gnorm <= 10 * gradient_tolerance
    if res.nit >= max_iterations:
        converged = False
    return float(-res.fun), res.x, converged, int(res.nit)


def run_restarts(fun: Callable, starts: list[np.ndarray], max_iterations: int,
                 gradient_tolerance: float, threads: int = 1) -> list[RestartOutcome]:
    def one(item):
        i, x0 = item
        v, x, ok, nit = maximize(fun, x0, max_iterations, gradient_tolerance)
        log.debug("restart %d: value %.8f converged=%s iterations=%d", i, v, ok, nit)
        return RestartOutcome(i, v, x, ok, nit)

    items = list(enumerate(starts))
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, items))
    return [one(it) for it in items]


def best_of(outcomes: list[RestartOutcome]) -> RestartOutcome:
    return max(outcomes, key=lambda o: (o.value, -o.index))

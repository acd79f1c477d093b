"""Hamiltonian capacities as the small-time limit of capacity(exp(-iHs)) / s."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .entcap import EntCapConfig, optimize_entcap
from .holevo import optimize_delta_chi
from .qalg import Hamiltonian, matrix_exponential

DEFAULT_ANGLES = (0.2, 0.1, 0.05)
KINDS = ("entanglement", "holevo")


@dataclass(frozen=True, eq=False)
class HamCapResult:
    rate: float
    samples: list
    extrapolation_method: str
    residual: float
    kind: str = "entanglement"
    converged: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "rate": self.rate,
            "kind": self.kind,
            "samples": [{"s": s, "capacity_over_s": v} for s, v in self.samples],
            "extrapolation_method": self.extrapolation_method,
            "residual": self.residual,
            "converged": list(self.converged),
        }


def default_s_grid(h: Hamiltonian) -> tuple[float, ...]:
    """Times at which the largest phase spread of exp(-iHs) is 0.2, 0.1, 0.05 rad."""
    spread = h.spread()
    if spread < 1e-12:
        spread = 1.0
    return tuple(a / spread for a in DEFAULT_ANGLES)


def _error_order(s: np.ndarray, f: np.ndarray) -> float:
    """Exponent k in f(s) ~ r + c s^k fitted to the three finest samples."""
    s1, s2, s3 = s[-3:]
    d1, d2 = f[-3] - f[-2], f[-2] - f[-1]
    if abs(d2) < 1e-9 or d1 / d2 <= 0:
        return 1.0

    def gap(k):
        return (s1 ** k - s2 ** k) / (s2 ** k - s3 ** k) - d1 / d2

    try:
        return float(brentq(gap, 0.5, 4.0))
    except ValueError:
        return 1.0


def extrapolate(samples: Sequence[tuple[float, float]]) -> tuple[float, str, float]:
    """Richardson extrapolation to s = 0 from the finest pair of samples.

    Returns (limit, method tag, residual) where the residual is the largest
    deviation of the samples from a straight-line fit in s.
    """
    s = np.array([a for a, _ in samples], dtype=float)
    f = np.array([b for _, b in samples], dtype=float)
    order = _error_order(s, f) if len(s) >= 3 else 1.0
    (sa, fa), (sb, fb) = (s[-2], f[-2]), (s[-1], f[-1])
    ra, rb = sa ** order, sb ** order
    limit = (ra * fb - rb * fa) / (ra - rb)
    coef = np.polyfit(s, f, 1)
    residual = float(np.abs(np.polyval(coef, s) - f).max()) if len(s) > 2 else 0.0
    return float(limit), f"richardson(order={order:.3f})", residual


def hamiltonian_capacity(h: Hamiltonian, kind: str = "entanglement",
                         s_grid: Sequence[float] | None = None,
                         cfg: EntCapConfig = EntCapConfig(),
                         ensemble_size: int | None = None) -> HamCapResult:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    grid = tuple(float(x) for x in (default_s_grid(h) if s_grid is None else s_grid))
    if len(grid) < 2 or any(x <= 0 for x in grid) or list(grid) != sorted(grid, reverse=True):
        raise ValueError(f"s_grid must hold at least two descending positive times, got {grid}")
    samples, flags = [], []
    prev = None
    for s in grid:
        gate = matrix_exponential(h, s)
        warm = [prev] if prev is not None else []
        if kind == "entanglement":
            res = optimize_entcap(gate, cfg, warm_starts=warm)
            prev = res.optimal_input
        else:
            res = optimize_delta_chi(gate, ensemble_size, None, cfg, warm_starts=warm)
            prev = res.optimal_ensemble
        samples.append((s, res.value / s))
        flags.append(res.converged)
    rate, method, residual = extrapolate(samples)
    return HamCapResult(rate, samples, method, residual, kind, flags)

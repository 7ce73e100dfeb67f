"""Dense vector primitives, the objective contract, and run budgets.

Everything in this package works on one-dimensional float64 numpy arrays.
The helpers here validate finiteness and dimension at public boundaries;
hot loops elsewhere assume validated inputs and only re-check where an
update can blow up.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Array = np.ndarray


class DivergenceError(RuntimeError):
    """An update produced a non-finite iterate."""


class StationaryPointError(RuntimeError):
    """A step-size rule met a zero gradient away from the known optimum."""


def as_vector(x, dim: Optional[int] = None) -> Array:
    """Validate and return ``x`` as a finite 1-d float64 array.

    Dimension is checked against ``dim`` when given.  Raises ``ValueError``
    on non-finite entries, wrong rank, or mismatched length.
    """
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a 1-d vector of dimension >= 1, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector contains non-finite entries")
    if dim is not None and v.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.size}")
    return v


def axpy(a: float, x, y) -> Array:
    """Return ``a * x + y`` for equal-length vectors."""
    a = float(a)
    if not np.isfinite(a):
        raise ValueError("scalar coefficient must be finite")
    xv = as_vector(x)
    yv = as_vector(y, dim=xv.size)
    return a * xv + yv


def hadamard(x, y) -> Array:
    """Element-wise product of two equal-length vectors."""
    xv = as_vector(x)
    yv = as_vector(y, dim=xv.size)
    return xv * yv


class Objective:
    """A loss function with gradient access and evaluation accounting.

    ``grad`` increments :attr:`grad_evals` by exactly one per call;
    ``value`` increments :attr:`func_evals`.  Neither counter is ever reset
    implicitly.  The raw callables stay accessible (``value_fn``,
    ``grad_fn``) so diagnostics such as error traces and finite differences
    can evaluate without charging the optimizer.

    Instances are not thread-safe (the counters are plain ints); run each
    instance on a single thread and use distinct instances for concurrent
    runs.
    """

    def __init__(
        self,
        dimension: int,
        value_fn: Callable[[Array], float],
        grad_fn: Callable[[Array], Array],
        optimum_value: Optional[float] = None,
        optimum_point=None,
    ):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = int(dimension)
        self.value_fn = value_fn
        self.grad_fn = grad_fn
        self.optimum_value = None if optimum_value is None else float(optimum_value)
        self.optimum_point = None if optimum_point is None else as_vector(optimum_point, dim=dimension)
        self.grad_evals = 0
        self.func_evals = 0

    def value(self, w) -> float:
        self.func_evals += 1
        return float(self.value_fn(w))

    def grad(self, w) -> Array:
        self.grad_evals += 1
        return np.asarray(self.grad_fn(w), dtype=float)

    def error(self, w) -> float:
        """Loss above the optimum, via the uncounted raw callable."""
        base = self.optimum_value if self.optimum_value is not None else 0.0
        return float(self.value_fn(w)) - base


def finite_diff_grad(obj: Objective, w, h: float = 1e-6) -> Array:
    """Central-difference gradient estimate, used as a test oracle.

    The probe for component ``i`` is ``h * max(1, |w_i|)`` so that the
    step stays meaningful for large coordinates at 64-bit precision.
    Does not touch the objective's evaluation counters.
    """
    if not (h > 0):
        raise ValueError("h must be positive")
    wv = as_vector(w, dim=obj.dimension)
    g = np.empty_like(wv)
    for i in range(wv.size):
        step = h * max(1.0, abs(wv[i]))
        wp = wv.copy()
        wm = wv.copy()
        wp[i] += step
        wm[i] -= step
        fp = float(obj.value_fn(wp))
        fm = float(obj.value_fn(wm))
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise ValueError(f"non-finite objective value at probe points for component {i}")
        g[i] = (fp - fm) / (2.0 * step)
    return g


@dataclass
class EvalBudget:
    """Stopping conditions for a run.

    ``max_iterations`` always applies.  ``max_grad_evals`` optionally bounds
    total gradient evaluations (checked at iteration boundaries, so a
    planner iteration may overshoot by its own per-iteration cost).
    ``error_floor`` stops the run as converged once the recorded error is
    <= the floor; ``None`` disables error-based stopping, which lets a run
    continue past an exact-zero error.
    """

    max_iterations: int
    max_grad_evals: Optional[int] = None
    error_floor: Optional[float] = 0.0

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.max_grad_evals is not None and self.max_grad_evals <= 0:
            raise ValueError("max_grad_evals must be positive when set")
        if self.error_floor is not None and self.error_floor < 0:
            raise ValueError("error_floor must be non-negative when set")

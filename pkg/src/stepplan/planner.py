"""Step-size planning: learn a diagonal step-size from update experience.

The planner runs plain gradient descent and records its update experience
as (iterate, driving gradient) pairs in two buffers of capacity K, so that
paired records sit exactly K iterations apart.  Whenever the second buffer
fills, it fits a per-component step-size

    alpha_i = sum_s g_s_i (w_s_i - w_{s+K}_i)  /  sum_s g_s_i^2

— the least-squares one-shot predictor of where gradient descent will be K
steps ahead — and applies it as a projection w_i <- w_i - alpha_i g_i on a
fresh gradient.  Components whose gradients were identically zero across
the window get alpha_i = 0 (no projection) rather than a perturbed
denominator.  Entries may come out negative or exceed one; both are
intentional and no clamping is applied.

Repeated planning applies the projection P times per event, each followed
by M corrective gradient-descent steps that pull an off-track projection
back toward the descent path.  Every projection and every corrective step
evaluates a fresh gradient, so one planning event costs exactly P * (1 + M)
gradient evaluations on top of the one-per-iteration main loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Array, DivergenceError, EvalBudget, Objective, as_vector
from .tracing import Trace, run_steps


@dataclass
class ExperiencePair:
    """One recorded update: the iterate and the gradient that drove it."""

    w: Array
    g: Array

    def __post_init__(self):
        self.w = as_vector(self.w)
        self.g = as_vector(self.g, dim=self.w.size)


class ExperienceBuffer:
    """Two K-slot buffers holding update records K steps apart.

    Records fill ``b1`` first, then ``b2``; pairing ``b1[s]`` with
    ``b2[s]`` yields iterates exactly K steps apart.  After a planning
    event the buffers rotate (``b1 <- b2``, ``b2`` emptied), so planning
    fires at record counts 2K, 3K, 4K, ...
    """

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("buffer capacity K must be >= 1")
        self.k = int(k)
        self.b1: list[ExperiencePair] = []
        self.b2: list[ExperiencePair] = []

    @property
    def dimension(self) -> Optional[int]:
        if self.b1:
            return self.b1[0].w.size
        return None

    def record(self, pair: ExperiencePair) -> bool:
        """Append a pair; return True when planning should fire now."""
        dim = self.dimension
        if dim is not None and pair.w.size != dim:
            raise ValueError(f"dimension mismatch: buffer holds {dim}-vectors, got {pair.w.size}")
        if len(self.b2) >= self.k:
            raise ValueError("buffer is in the mid-planning state; rotate before recording")
        if len(self.b1) < self.k:
            self.b1.append(pair)
        else:
            self.b2.append(pair)
        return len(self.b2) == self.k

    def rotate(self):
        """After planning: the newer window becomes the older one."""
        if len(self.b2) != self.k:
            raise ValueError("rotate called before the second buffer filled")
        self.b1 = self.b2
        self.b2 = []


@dataclass
class PlanningStatistics:
    """Accumulated sums and the fitted diagonal step-size.

    ``sum1_i = sum_s g_s_i (w_s_i - w_{s+K}_i)`` and ``sum2_i = sum_s g_s_i^2``;
    ``alpha_i = sum1_i / sum2_i`` except alpha_i = 0 where sum2_i = 0.
    """

    sum1: Array
    sum2: Array
    alpha: Array


def compute_alpha(buf: ExperienceBuffer) -> PlanningStatistics:
    """Fit the diagonal step-size from a full pair of buffers."""
    if len(buf.b1) != buf.k or len(buf.b2) != buf.k:
        raise ValueError("planning requires both buffers full")
    dim = buf.b1[0].w.size
    sum1 = np.zeros(dim)
    sum2 = np.zeros(dim)
    for old, new in zip(buf.b1, buf.b2):
        sum1 += old.g * (old.w - new.w)
        sum2 += old.g * old.g
    zero = sum2 == 0.0
    alpha = np.where(zero, 0.0, sum1 / np.where(zero, 1.0, sum2))
    return PlanningStatistics(sum1=sum1, sum2=sum2, alpha=alpha)


def apply_projection(w, g, stats: PlanningStatistics) -> Array:
    """Project the iterate with the fitted step-size: w_i - alpha_i g_i."""
    w = as_vector(w)
    g = as_vector(g, dim=w.size)
    if stats.alpha.size != w.size:
        raise ValueError(f"dimension mismatch: alpha has {stats.alpha.size}, w has {w.size}")
    out = w - stats.alpha * g
    if not np.all(np.isfinite(out)):
        raise DivergenceError("non-finite iterate after projection")
    return out


@dataclass
class PlannerConfig:
    """gamma: inner GD step; K: buffer size / planning horizon;
    P: planning repetitions per event; M: corrective GD steps per repetition."""

    gamma: float
    k: int
    p: int = 1
    m: int = 0

    def __post_init__(self):
        if not np.isfinite(self.gamma):
            raise ValueError("gamma must be finite")
        if self.k < 1:
            raise ValueError("K must be >= 1")
        if self.p < 1:
            raise ValueError("P must be >= 1")
        if self.m < 0:
            raise ValueError("M must be >= 0")


class StepSizePlanner:
    """Stepper that interleaves GD with learned step-size projections.

    One ``step`` call is one main-loop iteration: evaluate the gradient,
    take the GD step, record the (post-update iterate, driving gradient)
    pair, and — when the record count reaches a multiple of K past the
    first 2K — run a planning event.  ``last_alpha`` exposes the fitted
    step-size on event iterations (None otherwise) so traces can snapshot
    exactly the planned values.
    """

    def __init__(self, w0, gamma: float, k: int, p: int = 1, m: int = 0):
        self.config = PlannerConfig(gamma=float(gamma), k=int(k), p=int(p), m=int(m))
        self.w = as_vector(w0).copy()
        self.k = 0
        self.buffer = ExperienceBuffer(self.config.k)
        self.planning_events = 0
        self.last_alpha: Optional[Array] = None
        self.last_stats: Optional[PlanningStatistics] = None

    def step(self, obj: Objective):
        cfg = self.config
        self.last_alpha = None
        g = obj.grad(self.w)
        w = self.w - cfg.gamma * g
        if not np.all(np.isfinite(w)):
            raise DivergenceError(f"non-finite iterate after step {self.k + 1}")
        triggered = self.buffer.record(ExperiencePair(w=w.copy(), g=g))
        if triggered:
            stats = compute_alpha(self.buffer)
            for _ in range(cfg.p):
                gp = obj.grad(w)
                w = apply_projection(w, gp, stats)
                for _ in range(cfg.m):
                    gm = obj.grad(w)
                    w = w - cfg.gamma * gm
                    if not np.all(np.isfinite(w)):
                        raise DivergenceError("non-finite iterate during corrective GD")
            self.buffer.rotate()
            self.planning_events += 1
            self.last_alpha = stats.alpha
            self.last_stats = stats
        self.w = w
        self.k += 1


def csawg_run(obj: Objective, w0, cfg: PlannerConfig, budget: EvalBudget,
              record_w: bool = False, record_alpha: bool = True) -> Trace:
    """Run the planner against an objective under a budget.

    The trace's error column is the objective value above its optimum
    (raw value when no optimum is declared), evaluated without charging
    the objective's counters.
    """
    planner = StepSizePlanner(w0, gamma=cfg.gamma, k=cfg.k, p=cfg.p, m=cfg.m)
    return run_steps(planner, obj, budget, obj.error,
                     record_w=record_w, record_alpha=record_alpha)

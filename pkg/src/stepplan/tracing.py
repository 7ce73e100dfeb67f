"""Run traces: per-iteration records, the generic step loop, CSV output.

A record is written after every completed step and carries the cumulative
gradient-evaluation count, so error-versus-cost curves can be read off
directly.  Runs that reach a non-finite error or exceed ``ERROR_CAP`` are
marked diverged and truncated at the offending record.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .core import Array, DivergenceError, EvalBudget, Objective

ERROR_CAP = 1e12

CONVERGED = "converged"
BUDGET_EXHAUSTED = "budget_exhausted"
DIVERGED = "diverged"


@dataclass
class TraceRecord:
    iteration: int
    grad_evals: int
    error: float
    w: Optional[Array] = None
    alpha: Optional[Array] = None


@dataclass
class Trace:
    records: List[TraceRecord] = field(default_factory=list)
    status: str = BUDGET_EXHAUSTED
    total_grad_evals: int = 0
    total_func_evals: int = 0

    def __len__(self) -> int:
        return len(self.records)

    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.records])

    def final_error(self) -> float:
        if not self.records:
            raise ValueError("empty trace has no final error")
        return self.records[-1].error

    def record_at_iteration(self, iteration: int) -> TraceRecord:
        for r in self.records:
            if r.iteration == iteration:
                return r
        raise ValueError(f"no record at iteration {iteration}")

    def last_record_at_evals(self, grad_evals: int) -> TraceRecord:
        """Latest record whose cumulative gradient count is <= the budget."""
        hit = None
        for r in self.records:
            if r.grad_evals <= grad_evals:
                hit = r
            else:
                break
        if hit is None:
            raise ValueError(f"no record within {grad_evals} gradient evaluations")
        return hit

    def reaches_evals(self, grad_evals: int) -> bool:
        """Whether the trace covers the budget point.

        A converged run is treated as covering any later budget: on these
        deterministic problems a converged iterate has zero gradient, so
        extending the run would repeat the final record forever.
        """
        return self.total_grad_evals >= grad_evals or self.status == CONVERGED


def run_steps(stepper, obj: Objective, budget: EvalBudget,
              error_fn: Callable[[Array], float],
              record_w: bool = False, record_alpha: bool = False) -> Trace:
    """Drive a stepper under a budget, recording one row per iteration.

    Stopping order per iteration: gradient budget (checked before the
    step), then divergence (non-finite or capped error), then the error
    floor.  ``record_alpha`` snapshots the stepper's ``last_alpha``
    attribute, which planners set only on planning-event iterations.
    """
    trace = Trace()
    for it in range(1, budget.max_iterations + 1):
        if budget.max_grad_evals is not None and obj.grad_evals >= budget.max_grad_evals:
            break
        try:
            # overflow on a diverging trajectory is data here, not an anomaly
            with np.errstate(over="ignore", invalid="ignore"):
                stepper.step(obj)
                err = float(error_fn(stepper.w))
        except DivergenceError:
            err = float("inf")
        rec = TraceRecord(iteration=it, grad_evals=obj.grad_evals, error=err)
        if record_w:
            rec.w = np.array(stepper.w, dtype=float, copy=True)
        if record_alpha:
            alpha = getattr(stepper, "last_alpha", None)
            if alpha is not None:
                rec.alpha = np.array(alpha, dtype=float, copy=True)
        trace.records.append(rec)
        if not np.isfinite(err) or err > ERROR_CAP:
            trace.status = DIVERGED
            break
        if budget.error_floor is not None and err <= budget.error_floor:
            trace.status = CONVERGED
            break
    trace.total_grad_evals = obj.grad_evals
    trace.total_func_evals = obj.func_evals
    return trace


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(trace: Trace, path) -> None:
    """Write a trace as CSV.

    Columns: iteration, grad_evals, error, then w_0..w_{d-1} when iterates
    were recorded and alpha_0..alpha_{d-1} when step-size snapshots were.
    Sparse alpha rows leave their cells empty.  Output is byte-stable for
    identical traces.
    """
    w_dim = next((r.w.size for r in trace.records if r.w is not None), 0)
    a_dim = next((r.alpha.size for r in trace.records if r.alpha is not None), 0)
    header = ["iteration", "grad_evals", "error"]
    header += [f"w_{i}" for i in range(w_dim)]
    header += [f"alpha_{i}" for i in range(a_dim)]
    lines = [",".join(header)]
    for r in trace.records:
        row = [str(r.iteration), str(r.grad_evals), _fmt(r.error)]
        if w_dim:
            row += [_fmt(v) for v in r.w] if r.w is not None else [""] * w_dim
        if a_dim:
            row += [_fmt(v) for v in r.alpha] if r.alpha is not None else [""] * a_dim
        lines.append(",".join(row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")

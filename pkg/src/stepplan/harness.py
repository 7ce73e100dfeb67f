"""Experiment orchestration: configs, runs, metrics, parameter sweeps.

An :class:`ExperimentConfig` names a problem and an optimizer from the
registries, a budget, and recording flags; ``run_experiment`` turns it
into a :class:`~stepplan.tracing.Trace` deterministically — identical
configs give byte-identical CSVs.  ``speedup_at_budget`` and
``empirical_rate`` compute the two headline metrics, and ``sweep`` runs a
Cartesian grid of dotted-path overrides.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass
from typing import List, Tuple

import numpy as np

from .core import EvalBudget, Objective
from .optimizers import Idbd, make_optimizer
from .problems import LmsStream, make_problem
from .tracing import (CONVERGED, DIVERGED, ERROR_CAP, Trace, TraceRecord,
                      run_steps, write_csv)

__all__ = [
    "ExperimentConfig", "run_experiment", "speedup_at_budget",
    "empirical_rate", "sweep", "apply_override", "load_config", "write_csv",
]


@dataclass
class ExperimentConfig:
    """A fully-specified run: problem + optimizer + budget + recording flags.

    ``problem`` and ``optimizer`` are dicts with a ``name`` key and the
    registry parameters; the whole config round-trips through JSON
    losslessly.
    """

    problem: dict
    optimizer: dict
    budget: EvalBudget
    seed: int = 0
    record_w: bool = False
    record_alpha: bool = False
    label: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["budget"] = {k: v for k, v in asdict(self.budget).items()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = json.loads(json.dumps(d))  # deep copy + reject non-JSON values
        budget = d.pop("budget")
        known = {"problem", "optimizer", "seed", "record_w", "record_alpha", "label"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(budget=EvalBudget(**budget), **d)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))


def save_config(cfg: ExperimentConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _split(entry: dict) -> tuple[str, dict]:
    entry = dict(entry)
    try:
        name = entry.pop("name")
    except KeyError:
        raise ValueError("problem/optimizer config needs a 'name' key") from None
    return name, entry


def run_experiment(cfg: ExperimentConfig) -> Trace:
    """Execute one config and return its trace.

    Divergence is recorded in the trace status, not raised; unknown
    problem/optimizer names raise ``ValueError``.
    """
    problem_name, problem_params = _split(cfg.problem)
    if problem_name == "lms":
        problem_params.setdefault("seed", cfg.seed)
    problem, w0 = make_problem(problem_name, problem_params)
    optimizer_name, optimizer_params = _split(cfg.optimizer)

    if optimizer_name == "idbd":
        if not isinstance(problem, LmsStream):
            raise ValueError("the idbd optimizer runs on the 'lms' problem only")
        return _run_stream(problem, w0, optimizer_params, cfg)
    if isinstance(problem, LmsStream):
        raise ValueError(f"the 'lms' problem drives the idbd optimizer, not {optimizer_name!r}")

    objective = Objective(
        dimension=problem.dimension,
        value_fn=problem.value,
        grad_fn=problem.gradient,
        optimum_value=0.0,
        optimum_point=problem.w_star,
    )
    stepper = make_optimizer(optimizer_name, w0, optimizer_params)
    return run_steps(stepper, objective, cfg.budget, objective.error,
                     record_w=cfg.record_w, record_alpha=cfg.record_alpha)


def _run_stream(stream: LmsStream, w0, params: dict, cfg: ExperimentConfig) -> Trace:
    """Stream-driven loop for idbd: one sample (one sampled gradient) per step."""
    stepper = make_optimizer("idbd", w0, params)
    assert isinstance(stepper, Idbd)
    trace = Trace()
    budget = cfg.budget
    for it in range(1, budget.max_iterations + 1):
        if budget.max_grad_evals is not None and it > budget.max_grad_evals:
            break
        x, y = stream.next()
        stepper.step_sample(x, y)
        err = stream.population_error(stepper.w)
        rec = TraceRecord(iteration=it, grad_evals=it, error=err)
        if cfg.record_w:
            rec.w = stepper.w.copy()
        if cfg.record_alpha:
            rec.alpha = stepper.alpha
        trace.records.append(rec)
        trace.total_grad_evals = it
        if not np.isfinite(err) or err > ERROR_CAP:
            trace.status = DIVERGED
            break
        if budget.error_floor is not None and err <= budget.error_floor:
            trace.status = CONVERGED
            break
    return trace


def speedup_at_budget(a: Trace, b: Trace, grad_evals: int) -> float:
    """error(a) / error(b) at equal gradient-evaluation cost.

    Uses the latest record of each trace with cumulative evaluations <=
    the budget.  Both traces must reach the budget (a converged run counts
    as reaching any later budget, since its iterate no longer moves).
    Returns ``inf`` when b's error is zero and a's is not.
    """
    if grad_evals < 1:
        raise ValueError("grad_evals must be positive")
    for name, t in (("first", a), ("second", b)):
        if not t.reaches_evals(grad_evals):
            raise ValueError(f"{name} trace ends before {grad_evals} gradient evaluations")
    ea = a.last_record_at_evals(grad_evals).error
    eb = b.last_record_at_evals(grad_evals).error
    if eb == 0.0:
        return float("inf") if ea != 0.0 else 1.0
    return ea / eb


def empirical_rate(trace: Trace, window: Tuple[int, int]) -> float:
    """Geometric mean of successive error ratios over an iteration window."""
    start, end = window
    if not (0 < start < end):
        raise ValueError("window must satisfy 0 < start < end")
    e_start = trace.record_at_iteration(start).error
    e_end = trace.record_at_iteration(end).error
    # every record in between must be positive for the geometric mean to exist
    for r in trace.records:
        if start <= r.iteration <= end and r.error <= 0.0:
            raise ValueError(f"non-positive error inside the window at iteration {r.iteration}")
    return float((e_end / e_start) ** (1.0 / (end - start)))


def apply_override(config_dict: dict, dotted_key: str, value) -> None:
    """Set ``value`` at a dotted path ('optimizer.gamma') in a config dict."""
    parts = dotted_key.split(".")
    node = config_dict
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ValueError(f"invalid override path: {dotted_key!r}")
        node = node[part]
    if not isinstance(node, dict):
        raise ValueError(f"invalid override path: {dotted_key!r}")
    node[parts[-1]] = value


def parse_override_value(text: str):
    """Interpret an override value as JSON when possible, else a string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def sweep(grid: dict, base: ExperimentConfig) -> List[Tuple[ExperimentConfig, Trace]]:
    """Run the Cartesian product of dotted-path value lists over a base config.

    Results come back in deterministic grid order (keys in the given
    order, values left to right).
    """
    if not grid:
        raise ValueError("sweep grid must be non-empty")
    keys = list(grid.keys())
    value_lists = []
    for key in keys:
        values = list(grid[key])
        if not values:
            raise ValueError(f"empty value list for sweep key {key!r}")
        value_lists.append(values)
    results = []
    for combo in itertools.product(*value_lists):
        d = base.to_dict()
        for key, value in zip(keys, combo):
            apply_override(d, key, value)
        tags = ",".join(f"{k}={v}" for k, v in zip(keys, combo))
        d["label"] = f"{base.label}[{tags}]" if base.label else tags
        cfg = ExperimentConfig.from_dict(d)
        results.append((cfg, run_experiment(cfg)))
    return results

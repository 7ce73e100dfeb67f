"""Canned experiment presets for the repro subcommand.

Each preset expands to a list of fully-specified configs reproducing one
benchmark figure at desk scale:

* ``convex-fig4``          ill-conditioned quadratic diag(1000, 1): GD,
                           accelerated gradient, planner K in {2,10,100,1000}
* ``rosenbrock-fig6``      Rosenbrock: GD step grid + single-shot planner
                           K in {2,5,10} at gamma in {0.001, 0.0015}
* ``rosenbrock-p5-fig8``   Rosenbrock: repeated planning P=5, M=10,
                           K in {2,10,100}
* ``rosenbrock-adam-fig10`` Rosenbrock: heavy-ball, RMSprop, and Adam
                           hyperparameter grids against the GD baseline
"""

from __future__ import annotations

from typing import List

from .core import EvalBudget
from .harness import ExperimentConfig

CONVEX_PROBLEM = {
    "name": "quadratic",
    "q_diag": [1000.0, 1.0],
    "w_star": [1.0, 1.0],
    "w0": [-1.0, 2.0],
}
ROSENBROCK_PROBLEM = {"name": "rosenbrock", "w0": [-1.0, 0.0]}


def _cfg(problem, optimizer, budget, label, record_alpha=False) -> ExperimentConfig:
    return ExperimentConfig(problem=dict(problem), optimizer=optimizer,
                            budget=budget, record_alpha=record_alpha, label=label)


def convex_fig4() -> List[ExperimentConfig]:
    configs = [
        _cfg(CONVEX_PROBLEM, {"name": "gd", "gamma": 0.00099},
             EvalBudget(max_iterations=20000, error_floor=None), "gd 0.00099"),
        _cfg(CONVEX_PROBLEM,
             {"name": "nesterov", "mode": "strongly_convex", "mu": 1.0, "L": 1000.0},
             EvalBudget(max_iterations=20000), "nesterov"),
    ]
    # budgets sized so each run shows the full step-size arc (rise, peak, drop)
    for k, iters in ((2, 2000), (10, 3000), (100, 6000), (1000, 15000)):
        budget = EvalBudget(max_iterations=iters, error_floor=None)
        configs.append(_cfg(CONVEX_PROBLEM,
                            {"name": "csawg", "gamma": 0.0009, "k": k},
                            budget, f"csawg K{k}", record_alpha=True))
    return configs


def rosenbrock_fig6() -> List[ExperimentConfig]:
    configs = []
    for gamma in (0.0005, 0.001, 0.0015, 0.002):
        configs.append(_cfg(ROSENBROCK_PROBLEM, {"name": "gd", "gamma": gamma},
                            EvalBudget(max_iterations=20000, error_floor=None),
                            f"gd {gamma}"))
    for gamma in (0.001, 0.0015):
        for k in (2, 5, 10):
            configs.append(_cfg(ROSENBROCK_PROBLEM,
                                {"name": "csawg", "gamma": gamma, "k": k},
                                EvalBudget(max_iterations=20000, max_grad_evals=20000,
                                           error_floor=None),
                                f"csawg K{k} g{gamma}", record_alpha=True))
    return configs


def rosenbrock_p5_fig8() -> List[ExperimentConfig]:
    configs = []
    for k in (2, 10, 100):
        configs.append(_cfg(ROSENBROCK_PROBLEM,
                            {"name": "csawg", "gamma": 0.001, "k": k, "p": 5, "m": 10},
                            EvalBudget(max_iterations=2000, max_grad_evals=5000,
                                       error_floor=1e-12),
                            f"csawg-p5 K{k}", record_alpha=True))
    return configs


def rosenbrock_adam_fig10() -> List[ExperimentConfig]:
    budget = EvalBudget(max_iterations=20000, error_floor=None)
    configs = [
        _cfg(ROSENBROCK_PROBLEM, {"name": "gd", "gamma": gamma}, budget, f"gd {gamma}")
        for gamma in (0.0005, 0.001, 0.0015, 0.002)
    ]
    for p in (0.8, 0.9):
        configs.append(_cfg(ROSENBROCK_PROBLEM,
                            {"name": "heavy_ball", "gamma": 0.0015, "p": p},
                            budget, f"heavy_ball p{p}"))
    for alpha in (0.0005, 0.001, 0.0015, 0.01):
        for beta in (0.8, 0.9, 0.99):
            configs.append(_cfg(ROSENBROCK_PROBLEM,
                                {"name": "rmsprop", "alpha": alpha, "beta": beta},
                                budget, f"rmsprop a{alpha} b{beta}"))
    for alpha in (0.005, 0.01):
        for beta1 in (0.9, 0.99, 0.999):
            for beta2 in (0.99, 0.999, 0.9999):
                configs.append(_cfg(ROSENBROCK_PROBLEM,
                                    {"name": "adam", "alpha": alpha,
                                     "beta1": beta1, "beta2": beta2},
                                    budget, f"adam a{alpha} b{beta1}/{beta2}"))
    return configs


PRESETS = {
    "convex-fig4": convex_fig4,
    "rosenbrock-fig6": rosenbrock_fig6,
    "rosenbrock-p5-fig8": rosenbrock_p5_fig8,
    "rosenbrock-adam-fig10": rosenbrock_adam_fig10,
}

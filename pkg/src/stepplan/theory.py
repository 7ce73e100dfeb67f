"""Closed-form optimal step-sizes on quadratics and their numeric checks.

For f(w) = 1/2 w^T Q w with SPD Q (the optimum translated to zero):

* the best scalar step for one iteration is  a* = w^T Q^2 w / w^T Q^3 w,
  and its one-step error-reduction ratio never exceeds the Kantorovich
  limit 1 - 4 mu L / (mu + L)^2;
* the best diagonal step is  a*_i = w_i / (Qw)_i, which reaches the
  optimum in a single iteration whenever no (Qw)_i vanishes — for
  diagonal Q this is exactly the inverse spectrum (1/mu, ..., 1/L);
* for a known target, the per-component step (w_i - target_i) / g_i lands
  exactly on the target, the deterministic form of the distance-minimizing
  diagonal step.

``verify_theorems`` stress-tests all three statements on random SPD
instances against brute-force grid oracles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Array, as_vector
from .problems import random_spd


class SingularDirectionError(ValueError):
    """The diagonal optimum is undefined: some (Qw)_i is exactly zero."""


def _check_spd_input(q, w) -> tuple[Array, Array]:
    q = np.asarray(q, dtype=float)
    w = as_vector(w)
    if q.shape != (w.size, w.size):
        raise ValueError(f"Q shape {q.shape} does not match w dimension {w.size}")
    return q, w


def quadratic_value(q, w) -> float:
    """f(w) = 1/2 w^T Q w (optimum-at-zero convention)."""
    q, w = _check_spd_input(q, w)
    return float(0.5 * w @ q @ w)


def optimal_scalar_step(q, w) -> float:
    """w^T Q^2 w / w^T Q^3 w, the scalar step minimizing the next loss."""
    q, w = _check_spd_input(q, w)
    if not np.any(w):
        raise ValueError("optimal scalar step is undefined at w = 0")
    y = q @ w
    return float(y @ y) / float(y @ (q @ y))


def optimal_diag_step(q, w) -> Array:
    """w_i / (Qw)_i, the diagonal step reaching the optimum in one iteration."""
    q, w = _check_spd_input(q, w)
    y = q @ w
    if np.any(y == 0.0):
        bad = int(np.flatnonzero(y == 0.0)[0])
        raise SingularDirectionError(f"(Qw)_{bad} is zero; diagonal optimum undefined there")
    return w / y


def ideal_diag_step(w, g, target) -> Array:
    """(w_i - target_i) / g_i: the step that lands each component on the target."""
    w = as_vector(w)
    g = as_vector(g, dim=w.size)
    target = as_vector(target, dim=w.size)
    if np.any(g == 0.0):
        bad = int(np.flatnonzero(g == 0.0)[0])
        raise SingularDirectionError(f"gradient component {bad} is zero")
    return (w - target) / g


def reduction_ratio(q, w, step) -> float:
    """f(w - step * Qw) / f(w) for a scalar or per-component step."""
    q, w = _check_spd_input(q, w)
    fw = quadratic_value(q, w)
    if fw == 0.0:
        raise ValueError("reduction ratio undefined at f(w) = 0")
    step = np.asarray(step, dtype=float)
    w_next = w - step * (q @ w)
    return quadratic_value(q, w_next) / fw


def kantorovich_bound(mu: float, L: float) -> float:
    """1 - 4 mu L / (mu + L)^2, the scalar-optimum rate limit."""
    if not (0 < mu <= L):
        raise ValueError("need 0 < mu <= L")
    return 1.0 - 4.0 * mu * L / (mu + L) ** 2


@dataclass
class RateReport:
    """Outcome of one theorem check on one instance."""

    check: str
    rho: float
    bound: float
    satisfied: bool
    witness: Optional[tuple] = None
    skipped: bool = False
    note: str = ""


def _grid_scalar_oracle(q, w, L: float, points: int) -> float:
    """Brute-force the best next-loss ratio over a step grid on [0, 2/L]."""
    alphas = np.linspace(0.0, 2.0 / L, points)
    y = q @ w
    candidates = w[None, :] - alphas[:, None] * y[None, :]
    values = 0.5 * np.einsum("ij,jk,ik->i", candidates, q, candidates)
    return float(values.min()) / quadratic_value(q, w)


def _grid_component_gap(w, g, target, points: int = 2001) -> float:
    """Largest distance (in grid spacings) between the per-component grid
    minimizer of the post-update distance and the closed-form step."""
    exact = (w - target) / g
    worst = 0.0
    for i in range(w.size):
        radius = max(1.0, 2.0 * abs(exact[i]))
        grid = np.linspace(exact[i] - radius, exact[i] + radius, points)
        spacing = grid[1] - grid[0]
        resid = (w[i] - grid * g[i] - target[i]) ** 2
        best = grid[int(np.argmin(resid))]
        worst = max(worst, abs(best - exact[i]) / spacing)
    return worst


def check_instance(q, mu: float, L: float, w, grid_points: int = 10_000) -> list[RateReport]:
    """Run the four checks on one SPD instance.

    * ``scalar-rate``      rho(a*) <= Kantorovich bound,
    * ``scalar-grid``      f(a*) <= min over a ``grid_points`` step grid,
    * ``diag-one-step``    rho(diagonal a*) <= 1e-10 (skipped with a
      singular-direction note when some (Qw)_i = 0),
    * ``ideal-step-grid``  per-component grid minimizer of the post-update
      distance within one grid spacing of the closed form.
    """
    q, w = _check_spd_input(q, w)
    witness = (q, w)
    reports: list[RateReport] = []

    rho = reduction_ratio(q, w, optimal_scalar_step(q, w))
    bound = kantorovich_bound(mu, L)
    reports.append(RateReport("scalar-rate", rho, bound, rho <= bound + 1e-12, witness))

    grid_best = _grid_scalar_oracle(q, w, L, grid_points)
    reports.append(RateReport("scalar-grid", rho, grid_best, rho <= grid_best + 1e-12, witness))

    y = q @ w
    if np.any(y == 0.0):
        for check in ("diag-one-step", "ideal-step-grid"):
            reports.append(RateReport(check, float("nan"), 1e-10, True,
                                      witness, skipped=True, note="singular direction"))
        return reports

    rho_d = reduction_ratio(q, w, optimal_diag_step(q, w))
    reports.append(RateReport("diag-one-step", rho_d, 1e-10, rho_d <= 1e-10 + 1e-12, witness))

    gap = _grid_component_gap(w, y, np.zeros(w.size))
    reports.append(RateReport("ideal-step-grid", gap, 1.0, gap <= 1.0 + 1e-12, witness))
    return reports


def verify_theorems(trials: int, d_max: int = 10, seed: int = 0,
                    grid_points: int = 10_000, cond_max: float = 1e6) -> list[RateReport]:
    """Check the closed-form results on random SPD instances.

    Per trial: random dimension <= d_max, condition number log-uniform up
    to cond_max, random nonzero w, then the four :func:`check_instance`
    checks.  Failures are reported, not raised.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not (1 <= d_max <= 64):
        raise ValueError("d_max must be in [1, 64] (dense instances only)")
    rng = np.random.default_rng(seed)
    reports: list[RateReport] = []
    for _ in range(trials):
        d = int(rng.integers(1, d_max + 1))
        cond = 10.0 ** rng.uniform(0.0, np.log10(cond_max))
        q, mu, L = random_spd(rng, d, cond)
        w = rng.standard_normal(d)
        while not np.any(w):
            w = rng.standard_normal(d)
        reports.extend(check_instance(q, mu, L, w, grid_points=grid_points))
    return reports


def summarize_reports(reports: list[RateReport]) -> dict:
    """Aggregate reports per check: counts, worst rho/margin, pass flag.

    Bounds differ per instance (Kantorovich depends on mu and L; the grid
    oracle on the instance), so the aggregate keeps the worst margin
    ``bound - rho`` rather than any single bound.
    """
    summary: dict = {}
    for r in reports:
        entry = summary.setdefault(r.check, {
            "trials": 0, "failures": 0, "skipped": 0,
            "worst_rho": None, "worst_margin": None,
        })
        entry["trials"] += 1
        if r.skipped:
            entry["skipped"] += 1
            continue
        if not r.satisfied:
            entry["failures"] += 1
        if entry["worst_rho"] is None or r.rho > entry["worst_rho"]:
            entry["worst_rho"] = r.rho
        margin = r.bound - r.rho
        if entry["worst_margin"] is None or margin < entry["worst_margin"]:
            entry["worst_margin"] = margin
    for entry in summary.values():
        entry["passed"] = entry["failures"] == 0
    return summary

"""End-to-end acceptance suite.

Each criterion runs at its stated tolerance and reports one pass/fail line
(collected into the terminal summary).  The whole module is sized to finish
in well under two minutes on a laptop.
"""

import numpy as np
import pytest

import conftest
from conftest import make_objective

from stepplan.core import EvalBudget, Objective, finite_diff_grad
from stepplan.harness import (ExperimentConfig, empirical_rate, run_experiment,
                              speedup_at_budget)
from stepplan.optimizers import (GradientDescent, HeavyBall, HyperGradient,
                                 IdbdScalar, PolyakStep)
from stepplan.planner import StepSizePlanner
from stepplan.problems import (LmsStream, QuadraticProblem, RosenbrockProblem,
                               random_spd)
from stepplan.theory import ideal_diag_step, verify_theorems
from stepplan.tracing import CONVERGED, write_csv

CONVEX = {"name": "quadratic", "q_diag": [1000.0, 1.0],
          "w_star": [1.0, 1.0], "w0": [-1.0, 2.0]}
ROSEN = {"name": "rosenbrock", "w0": [-1.0, 0.0]}
SLOW = 1  # index of the unit-eigenvalue component of diag(1000, 1)


def report(num, name, passed, detail):
    line = f"criterion {num:>2} [{name}]: {'PASS' if passed else 'FAIL'} — {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    assert passed, line


@pytest.fixture(scope="module")
def theorem_reports():
    return verify_theorems(trials=1000, d_max=10, seed=2024, cond_max=1e6)


@pytest.fixture(scope="module")
def rosenbrock_runs():
    budget = EvalBudget(max_iterations=20000, max_grad_evals=10000, error_floor=None)
    gd = run_experiment(ExperimentConfig(
        problem=ROSEN, optimizer={"name": "gd", "gamma": 0.001}, budget=budget))
    planners = {
        k: run_experiment(ExperimentConfig(
            problem=ROSEN, optimizer={"name": "csawg", "gamma": 0.001, "k": k},
            budget=budget, record_alpha=True))
        for k in (2, 5, 10)
    }
    return gd, planners


def test_criterion_1_diag_one_step(theorem_reports):
    rhos = [r.rho for r in theorem_reports if r.check == "diag-one-step" and not r.skipped]
    skipped = sum(1 for r in theorem_reports if r.check == "diag-one-step" and r.skipped)
    worst = max(rhos)
    report(1, "one-iteration convergence", len(rhos) == 1000 and skipped == 0 and worst <= 1e-10,
           f"1000 trials, worst reduction ratio {worst:.3g} (tolerance 1e-10)")


def test_criterion_2_scalar_rate_and_grid(theorem_reports):
    rate = [r for r in theorem_reports if r.check == "scalar-rate"]
    grid = [r for r in theorem_reports if r.check == "scalar-grid"]
    rate_ok = all(r.rho <= r.bound + 1e-12 for r in rate)
    grid_ok = all(r.satisfied for r in grid)
    margin = min(r.bound - r.rho for r in rate)
    report(2, "scalar-optimum rate", rate_ok and grid_ok and len(rate) == 1000,
           f"Kantorovich bound respected in all 1000 trials (tightest margin {margin:.3g}); "
           f"closed form beats the 10^4-point grid everywhere")


def test_criterion_3_ideal_step_deterministic():
    rng = np.random.default_rng(77)
    worst_dist = 0.0
    worst_gap = 0.0
    for _ in range(100):
        d = int(rng.integers(1, 9))
        q, _, _ = random_spd(rng, d, 10.0 ** rng.uniform(0, 4))
        w_star = rng.standard_normal(d)
        p = QuadraticProblem(q, w_star)
        w = w_star + rng.standard_normal(d)
        g = p.gradient(w)
        if np.any(g == 0.0):
            continue
        alpha = ideal_diag_step(w, g, w_star)
        w_next = w - alpha * g
        worst_dist = max(worst_dist, float(np.linalg.norm(w_next - w_star)))
        # brute-force oracle: per-component grid of the post-update distance
        for i in range(d):
            radius = max(1.0, 2.0 * abs(alpha[i]))
            grid = np.linspace(alpha[i] - radius, alpha[i] + radius, 2001)
            spacing = grid[1] - grid[0]
            best = grid[int(np.argmin((w[i] - grid * g[i] - w_star[i]) ** 2))]
            worst_gap = max(worst_gap, abs(best - alpha[i]) / spacing)
    report(3, "ideal step-size", worst_dist <= 1e-10 and worst_gap <= 1.0,
           f"100 quadratics: worst one-projection distance {worst_dist:.3g} (tol 1e-10), "
           f"grid minimizer within {worst_gap:.2f} grid spacings of the formula")


def test_criterion_4_convex_experiment():
    planner = run_experiment(ExperimentConfig(
        problem=CONVEX, optimizer={"name": "csawg", "gamma": 0.0009, "k": 2},
        budget=EvalBudget(max_iterations=500, error_floor=1e-12)))
    planner_ok = planner.status == CONVERGED and planner.records[-1].iteration <= 500

    gd = run_experiment(ExperimentConfig(
        problem=CONVEX, optimizer={"name": "gd", "gamma": 0.00099},
        budget=EvalBudget(max_iterations=5000, error_floor=None)))
    rate = empirical_rate(gd, (500, 5000))
    expected = (1.0 - 0.00099 * 1.0) ** 2
    rate_ok = abs(rate - expected) <= 1e-4

    nesterov = run_experiment(ExperimentConfig(
        problem=CONVEX,
        optimizer={"name": "nesterov", "mode": "strongly_convex", "mu": 1.0, "L": 1000.0},
        budget=EvalBudget(max_iterations=2000, error_floor=None)))
    gd_err = gd.record_at_iteration(2000).error
    nesterov_err = nesterov.record_at_iteration(2000).error
    ratio = gd_err / nesterov_err
    nesterov_ok = ratio >= 1e3

    report(4, "convex experiment", planner_ok and rate_ok and nesterov_ok,
           f"planner K=2 converged at iteration {planner.records[-1].iteration} (<500); "
           f"GD rate {rate:.8f} vs closed form {expected:.8f}; "
           f"accelerated/GD error ratio at iteration 2000 = {ratio:.3g} (>=1e3)")


def test_criterion_5_step_size_peak():
    peaks = {}
    for k, iters in ((2, 1500), (10, 3000), (100, 6000)):
        trace = run_experiment(ExperimentConfig(
            problem=CONVEX, optimizer={"name": "csawg", "gamma": 0.0009, "k": k},
            budget=EvalBudget(max_iterations=iters, error_floor=None),
            record_alpha=True))
        alphas = [r.alpha[SLOW] for r in trace.records if r.alpha is not None]
        peaks[k] = max(alphas)
    ok = all(abs(peak - 1.0) <= 1e-6 for peak in peaks.values())
    detail = ", ".join(f"K={k}: {peak:.9f}" for k, peak in peaks.items())
    report(5, "step-size peak", ok,
           f"unit-curvature component peaks at {detail} (target 1.0 +/- 1e-6)")


def test_criterion_6_rosenbrock_speedup(rosenbrock_runs):
    gd, planners = rosenbrock_runs
    reference_speedups = {2: 400.0, 5: 320.0, 10: 133.0}
    speedups = {k: speedup_at_budget(gd, tr, 10000) for k, tr in planners.items()}
    ok = all(s >= 50.0 for s in speedups.values())
    detail = "; ".join(f"K={k}: {s:.3g}x (reference {reference_speedups[k]:.0f}x)"
                       for k, s in speedups.items())
    report(6, "Rosenbrock speedup", ok, f"error ratio at 1e4 gradient evaluations: {detail}")


def test_criterion_7_repeated_planning():
    results = {}
    for k in (2, 10):
        obj = make_objective(RosenbrockProblem())
        planner = StepSizePlanner([-1.0, 0.0], gamma=0.001, k=k, p=5, m=10)
        from stepplan.tracing import run_steps
        trace = run_steps(planner, obj, EvalBudget(max_iterations=2000, error_floor=1e-12),
                          obj.error, record_alpha=True)
        events = sum(1 for r in trace.records if r.alpha is not None)
        accounting_exact = trace.total_grad_evals == len(trace.records) + events * 55
        results[k] = (trace.status == CONVERGED, trace.total_grad_evals, accounting_exact)
    ok = all(conv and evals <= 1000 and acct for conv, evals, acct in results.values())
    detail = "; ".join(f"K={k}: error<=1e-12 in {evals} evals (reference {ref})"
                       for (k, (conv, evals, acct)), ref in zip(results.items(), (458, 465)))
    report(7, "repeated planning", ok, f"{detail}; per-event cost exactly 55")


def test_criterion_8_negative_step_sizes(rosenbrock_runs):
    _, planners = rosenbrock_runs
    alphas = [r.alpha for r in planners[2].records if r.alpha is not None]
    negatives = sum(1 for a in alphas if a[1] < 0.0)
    report(8, "negative step-sizes", negatives >= 1,
           f"K=2 run recorded {negatives} planning events with a negative second "
           f"component (of {len(alphas)} events)")


def test_criterion_9_property_suite():
    rng = np.random.default_rng(99)
    checks = {}

    # gradient vs central differences, 100 points per problem; relative error
    # per component, with near-zero components measured against the vector scale
    def rel_gap(g, fd):
        denom = np.maximum(np.abs(g), np.max(np.abs(g)))
        return float(np.max(np.abs(g - fd) / denom))

    worst = 0.0
    quad = QuadraticProblem.diagonal([1000.0, 1.0], [1.0, 1.0])
    rosen = RosenbrockProblem()
    for problem in (quad, rosen):
        obj = make_objective(problem)
        for _ in range(100):
            w = rng.uniform(-2.0, 2.0, size=problem.dimension)
            worst = max(worst, rel_gap(problem.gradient(w), finite_diff_grad(obj, w)))
    stream = LmsStream([1.0, -2.0], seed=1)
    for _ in range(100):
        x, y = stream.next()
        w = rng.standard_normal(2)
        sample_obj = Objective(2, lambda v, x=x, y=y: 0.5 * (y - v @ x) ** 2,
                               lambda v, x=x, y=y: -(y - v @ x) * x)
        worst = max(worst, rel_gap(sample_obj.grad_fn(w), finite_diff_grad(sample_obj, w)))
    checks["finite-diff agreement"] = worst <= 1e-6

    # Polyak step range on strongly convex quadratics
    in_range = True
    for _ in range(30):
        d = int(rng.integers(1, 6))
        q, mu, L = random_spd(rng, d, 10.0 ** rng.uniform(0, 3))
        p = QuadraticProblem(q, rng.standard_normal(d))
        obj = make_objective(p)
        s = PolyakStep(p.w_star + rng.standard_normal(d), f_star=0.0)
        for _ in range(5):
            s.step(obj)
            in_range &= 1.0 / (2 * L) - 1e-15 <= s.alpha <= 1.0 / (2 * mu) + 1e-15
    checks["Polyak range"] = in_range

    # hypergradient sign property, exact
    q, _, _ = random_spd(rng, 2, 10.0)
    p = QuadraticProblem(q, np.zeros(2))
    obj = make_objective(p)
    s = HyperGradient(rng.standard_normal(2), eta=1e-8, alpha0=0.01)
    sign_ok = True
    for _ in range(500):
        prev_alpha, prev_g = s.alpha, s.prev_g.copy()
        s.step(obj)
        sign_ok &= np.sign(s.alpha - prev_alpha) == np.sign(float(s.prev_g @ prev_g))
    checks["HD sign property"] = sign_ok

    # IdbdScalar(lam=0) bit-identical to HD over 1000 steps
    q, _, _ = random_spd(rng, 2, 10.0)
    p = QuadraticProblem(q, np.array([1.0, -1.0]))
    w0 = rng.standard_normal(2)
    hd, scalar = HyperGradient(w0, 1e-8, 0.01), IdbdScalar(w0, 1e-8, 0.0, 0.01)
    obj_a, obj_b = make_objective(p), make_objective(p)
    same = True
    for _ in range(1000):
        hd.step(obj_a)
        scalar.step(obj_b)
        same &= np.array_equal(hd.w, scalar.w) and hd.alpha == scalar.alpha
    checks["idbd1(lam=0) == hd"] = same

    # heavy ball p=0 bit-identical to gd
    same = True
    for _ in range(20):
        d = int(rng.integers(1, 3))
        q, _, L = random_spd(rng, d, 10.0)
        p = QuadraticProblem(q, rng.standard_normal(d))
        w0 = rng.standard_normal(d)
        hb, gd = HeavyBall(w0, 0.5 / L, 0.0), GradientDescent(w0, 0.5 / L)
        obj_a, obj_b = make_objective(p), make_objective(p)
        for _ in range(50):
            hb.step(obj_a)
            gd.step(obj_b)
            same &= np.array_equal(hb.w, gd.w)
    checks["heavy_ball(p=0) == gd"] = same

    # constant gradient: the first planning window is pure GD experience, so
    # alpha is exactly K * gamma; each later window straddles one projection
    # jump of size alpha_prev * g, giving exactly alpha_n = n * K * gamma
    # (dyadic constants keep the arithmetic exact)
    slope = np.array([2.0, -4.0])
    obj = Objective(2, lambda w: float(slope @ w), lambda w: slope.copy())
    planner = StepSizePlanner([0.0, 0.0], gamma=0.5, k=4)
    alphas = []
    for _ in range(16):
        planner.step(obj)
        if planner.last_alpha is not None:
            alphas.append(planner.last_alpha)
    k_gamma = 4 * 0.5
    exact = len(alphas) == 3 and all(
        np.array_equal(a, [k_gamma * n, k_gamma * n]) for n, a in enumerate(alphas, start=1))
    checks["constant-gradient alpha = K*gamma"] = exact

    # gradient-evaluation accounting on every run kind
    acct = True
    for optimizer, events_cost in ((({"name": "gd", "gamma": 0.0005}), 0),
                                   (({"name": "csawg", "gamma": 0.0009, "k": 3, "p": 2, "m": 4}), 10)):
        trace = run_experiment(ExperimentConfig(
            problem=CONVEX, optimizer=optimizer,
            budget=EvalBudget(max_iterations=90, error_floor=None), record_alpha=True))
        events = sum(1 for r in trace.records if r.alpha is not None)
        acct &= trace.total_grad_evals == len(trace.records) + events * events_cost
    checks["grad-eval accounting"] = acct

    # byte-identical CSVs for fixed seeds, including the stochastic stream
    import pathlib
    import tempfile
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        configs = [
            ExperimentConfig(problem=CONVEX,
                             optimizer={"name": "csawg", "gamma": 0.0009, "k": 2},
                             budget=EvalBudget(max_iterations=200, error_floor=None),
                             record_w=True, record_alpha=True),
            ExperimentConfig(problem={"name": "lms", "w_star": [1.0, -1.0], "noise_std": 0.1},
                             optimizer={"name": "idbd", "eta": 0.02, "beta0": -3.0},
                             budget=EvalBudget(max_iterations=300, error_floor=None),
                             seed=13, record_w=True, record_alpha=True),
        ]
        identical = True
        for i, c in enumerate(configs):
            pa, pb = tmp / f"{i}a.csv", tmp / f"{i}b.csv"
            write_csv(run_experiment(c), pa)
            write_csv(run_experiment(c), pb)
            identical &= pa.read_bytes() == pb.read_bytes()
    checks["byte-identical CSVs"] = identical

    failed = [name for name, ok in checks.items() if not ok]
    report(9, "property suite", not failed,
           f"{len(checks)} properties checked" + (f"; failed: {failed}" if failed else ""))


def test_criterion_10_baseline_ordering():
    budget = EvalBudget(max_iterations=20000, error_floor=None)

    def run(optimizer):
        return run_experiment(ExperimentConfig(problem=ROSEN, optimizer=optimizer,
                                               budget=budget))

    def err_at(trace, evals):
        return trace.last_record_at_evals(evals).error

    gd_traces = [run({"name": "gd", "gamma": g}) for g in (0.0005, 0.001, 0.0015, 0.002)]
    hb_traces = [run({"name": "heavy_ball", "gamma": 0.0015, "p": p}) for p in (0.8, 0.9)]
    adam_traces = [run({"name": "adam", "alpha": a, "beta1": b1, "beta2": b2})
                   for a in (0.005, 0.01)
                   for b1 in (0.9, 0.99, 0.999)
                   for b2 in (0.99, 0.999, 0.9999)]

    best_gd_5k = min(err_at(t, 5000) for t in gd_traces)
    best_hb_5k = min(err_at(t, 5000) for t in hb_traces)
    first_ok = best_hb_5k < best_gd_5k

    best_hb_final = min(err_at(t, 20000) for t in hb_traces)
    best_adam_final = min(err_at(t, 20000) for t in adam_traces)
    second_ok = best_adam_final > best_hb_final

    report(10, "baseline ordering", first_ok and second_ok,
           f"at 5e3 evals best heavy ball {best_hb_5k:.3g} vs best GD {best_gd_5k:.3g}; "
           f"at 2e4 evals best Adam {best_adam_final:.3g} vs best heavy ball {best_hb_final:.3g}")

"""Benchmark problems.

Three instances drive every experiment in this package: a parameterized
convex quadratic (ill-conditioned in the canonical setup), the 2-d
Rosenbrock valley, and a synthetic least-mean-squares stream for online
per-parameter step-size adaptation.  The quadratic and Rosenbrock problems
are immutable and safe to share; the stream owns a stateful RNG and is
single-threaded.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .core import Array, as_vector


class QuadraticProblem:
    """f(w) = 1/2 (w - w*)^T Q (w - w*) for symmetric positive-definite Q.

    ``mu`` and ``L`` hold the extreme eigenvalues of Q, i.e. the strong
    convexity and gradient-smoothness constants.
    """

    name = "quadratic"

    def __init__(self, q, w_star):
        q = np.asarray(q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError(f"Q must be square, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("Q contains non-finite entries")
        if np.max(np.abs(q - q.T)) > 1e-12:
            raise ValueError("Q must be symmetric (within 1e-12 component-wise)")
        eigs = np.linalg.eigvalsh(q)
        if eigs[0] <= 0:
            raise ValueError(f"Q must be positive definite, smallest eigenvalue {eigs[0]}")
        self.q = q
        self.w_star = as_vector(w_star, dim=q.shape[0])
        self.mu = float(eigs[0])
        self.L = float(eigs[-1])

    @classmethod
    def diagonal(cls, entries, w_star) -> "QuadraticProblem":
        return cls(np.diag(np.asarray(entries, dtype=float)), w_star)

    @property
    def dimension(self) -> int:
        return self.q.shape[0]

    def value(self, w) -> float:
        d = np.asarray(w, dtype=float) - self.w_star
        return float(0.5 * d @ self.q @ d)

    def gradient(self, w) -> Array:
        return self.q @ (np.asarray(w, dtype=float) - self.w_star)

    def eval_grad(self, w):
        """Return (value, gradient) with the dimension checked once."""
        wv = np.asarray(w, dtype=float)
        if wv.shape != self.w_star.shape:
            raise ValueError(f"dimension mismatch: expected {self.dimension}, got {wv.shape}")
        d = wv - self.w_star
        g = self.q @ d
        return float(0.5 * d @ g), g


class RosenbrockProblem:
    """f(w) = (w1 - 1)^2 + 100 (w2 - w1^2)^2, minimized at (1, 1).

    The minimum sits in a long, narrow, curved valley; plain gradient
    descent needs thousands of evaluations to trace it.
    """

    name = "rosenbrock"
    dimension = 2

    def __init__(self):
        self.w_star = np.array([1.0, 1.0])
        self.mu = None
        self.L = None

    def value(self, w) -> float:
        w1, w2 = float(w[0]), float(w[1])
        return (w1 - 1.0) ** 2 + 100.0 * (w2 - w1 * w1) ** 2

    def gradient(self, w) -> Array:
        w1, w2 = float(w[0]), float(w[1])
        return np.array(
            [
                2.0 * (w1 - 1.0) - 400.0 * w1 * (w2 - w1 * w1),
                200.0 * (w2 - w1 * w1),
            ]
        )

    def eval_grad(self, w):
        wv = np.asarray(w, dtype=float)
        if wv.shape != (2,):
            raise ValueError(f"Rosenbrock is 2-d, got shape {wv.shape}")
        return self.value(wv), self.gradient(wv)


class LmsStream:
    """Synthetic stream for online linear regression.

    Each call to :meth:`next` draws an input ``x`` with components uniform
    on [low, high] and emits the target ``y* = w*.x + noise`` with Gaussian
    noise of standard deviation ``noise_std``.  Identical seeds reproduce
    identical sequences.
    """

    name = "lms"

    def __init__(self, w_star, low: float = -1.0, high: float = 1.0,
                 noise_std: float = 0.0, seed: int = 0):
        self.w_star = as_vector(w_star)
        if not (high > low):
            raise ValueError("need high > low for the input range")
        if noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        self.low = float(low)
        self.high = float(high)
        self.noise_std = float(noise_std)
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)
        # E[x_i^2] for uniform [low, high]
        self._second_moment = (low * low + low * high + high * high) / 3.0

    @property
    def dimension(self) -> int:
        return self.w_star.size

    def next(self):
        x = self._rng.uniform(self.low, self.high, size=self.dimension)
        y = float(self.w_star @ x)
        if self.noise_std > 0:
            y += self.noise_std * float(self._rng.standard_normal())
        return x, y

    def population_error(self, w) -> float:
        """Expected squared-error loss above its minimum: 1/2 E[x_i^2] ||w - w*||^2."""
        d = np.asarray(w, dtype=float) - self.w_star
        return float(0.5 * self._second_moment * (d @ d))


def random_spd(rng: np.random.Generator, dim: int, cond: float, scale: float = 1.0):
    """Random SPD matrix with exact extreme eigenvalues (scale, scale * cond).

    Built as V^T diag(e) V with V orthogonal from the QR of a Gaussian
    matrix, so mu and L are controlled exactly.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if cond < 1:
        raise ValueError("cond must be >= 1")
    if dim == 1:
        eigs = np.array([1.0])
    else:
        interior = 10.0 ** rng.uniform(0.0, np.log10(cond), size=dim - 2) if dim > 2 else np.empty(0)
        eigs = np.concatenate([[1.0, cond], interior])
    eigs = np.sort(eigs) * scale
    gauss = rng.standard_normal((dim, dim))
    v, _ = np.linalg.qr(gauss)
    q = v.T @ np.diag(eigs) @ v
    q = 0.5 * (q + q.T)
    return q, float(eigs[0]), float(eigs[-1])


_DEFAULT_STARTS = {
    "rosenbrock": np.array([-1.0, 0.0]),
}


def make_problem(name: str, params: Optional[dict] = None):
    """Build a problem by registry name; returns ``(problem, w0)``.

    Accepted names: ``quadratic``, ``rosenbrock``, ``lms``.  ``params`` may
    carry ``w0`` to override the default start.
    """
    params = dict(params or {})
    w0 = params.pop("w0", None)
    if name == "quadratic":
        if "q_diag" in params:
            q = np.diag(np.asarray(params.pop("q_diag"), dtype=float))
        elif "q" in params:
            q = np.asarray(params.pop("q"), dtype=float)
        else:
            raise ValueError("quadratic problem needs 'q' or 'q_diag'")
        w_star = params.pop("w_star", np.zeros(q.shape[0]))
        problem = QuadraticProblem(q, w_star)
    elif name == "rosenbrock":
        problem = RosenbrockProblem()
    elif name == "lms":
        w_star = params.pop("w_star")
        problem = LmsStream(
            w_star,
            low=params.pop("low", -1.0),
            high=params.pop("high", 1.0),
            noise_std=params.pop("noise_std", 0.0),
            seed=params.pop("seed", 0),
        )
    else:
        raise ValueError(f"unknown problem name: {name!r}")
    if params:
        raise ValueError(f"unknown {name} parameters: {sorted(params)}")
    if w0 is None:
        w0 = _DEFAULT_STARTS.get(name, np.zeros(problem.dimension))
    return problem, as_vector(w0, dim=problem.dimension)

"""One-step update rules for the compared optimizers.

Each optimizer is a small stateful stepper: construct it at a start point,
then call ``step(objective)`` once per iteration.  Every step consumes
exactly one gradient evaluation; the function-value based rules (Polyak,
L4, LossGrad) additionally consume function evaluations, which the
objective counts separately.  Steppers do not police stability — finite
oscillation passes through, and only a non-finite iterate aborts.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Array, DivergenceError, Objective, StationaryPointError, as_vector


class _Stepper:
    """Shared state: current iterate ``w`` and a step counter ``k``."""

    def __init__(self, w0):
        self.w = as_vector(w0).copy()
        self.k = 0

    def _commit(self, w_new: Array):
        if not np.all(np.isfinite(w_new)):
            raise DivergenceError(f"non-finite iterate after step {self.k + 1}")
        self.w = w_new
        self.k += 1


class GradientDescent(_Stepper):
    """w <- w - gamma * f'(w) with a constant step-size."""

    def __init__(self, w0, gamma: float):
        super().__init__(w0)
        if not np.isfinite(gamma):
            raise ValueError("gamma must be finite")
        self.gamma = float(gamma)

    def step(self, obj: Objective):
        g = obj.grad(self.w)
        self._commit(self.w - self.gamma * g)


class HeavyBall(_Stepper):
    """w <- w - gamma * f'(w) + p * delta, momentum on the last weight change."""

    def __init__(self, w0, gamma: float, p: float):
        super().__init__(w0)
        if not (0.0 <= p < 1.0):
            raise ValueError("momentum rate p must be in [0, 1)")
        self.gamma = float(gamma)
        self.p = float(p)
        self.delta = np.zeros_like(self.w)

    def step(self, obj: Objective):
        g = obj.grad(self.w)
        w_new = self.w - self.gamma * g + self.p * self.delta
        self.delta = w_new - self.w
        self._commit(w_new)


class NesterovAGD(_Stepper):
    """Accelerated gradient with the standard momentum schedules.

    The gradient step is taken at the lookahead point x:
    ``w+ = x - step * f'(x)``, ``x+ = w+ + gamma_k (w+ - w)``.  In
    ``strongly_convex`` mode gamma_k is the constant
    (sqrt(L) - sqrt(mu)) / (sqrt(L) + sqrt(mu)); in ``convex`` mode it
    follows the t-sequence t+ = (1 + sqrt(1 + 4 t^2)) / 2 with t0 = 1 and
    gamma_k = (t - 1) / t+.  The default gradient step is 1/L.
    """

    def __init__(self, w0, mode: str, mu: float = 0.0, L: float = 1.0,
                 step: float | None = None):
        super().__init__(w0)
        if mode not in ("convex", "strongly_convex"):
            raise ValueError(f"unknown mode {mode!r}")
        if L <= 0:
            raise ValueError("L must be positive")
        if mode == "strongly_convex":
            if not (0 < mu <= L):
                raise ValueError("strongly_convex mode needs 0 < mu <= L")
        self.mode = mode
        self.mu = float(mu)
        self.L = float(L)
        self.step_size = float(step) if step is not None else 1.0 / self.L
        self.x = self.w.copy()
        self.t = 1.0

    def step(self, obj: Objective):
        g = obj.grad(self.x)
        w_new = self.x - self.step_size * g
        if self.mode == "strongly_convex":
            gamma_k = (math.sqrt(self.L) - math.sqrt(self.mu)) / (
                math.sqrt(self.L) + math.sqrt(self.mu)
            )
        else:
            t_next = (1.0 + math.sqrt(1.0 + 4.0 * self.t * self.t)) / 2.0
            gamma_k = (self.t - 1.0) / t_next
            self.t = t_next
        self.x = w_new + gamma_k * (w_new - self.w)
        self._commit(w_new)


class PolyakStep(_Stepper):
    """alpha = (f(w) - f*) / ||f'(w)||^2, requires the optimal value f*."""

    def __init__(self, w0, f_star: float = 0.0):
        super().__init__(w0)
        self.f_star = float(f_star)
        self.alpha = 0.0

    def step(self, obj: Objective):
        fval = obj.value(self.w)
        g = obj.grad(self.w)
        gg = float(g @ g)
        if gg == 0.0:
            if fval > self.f_star:
                raise StationaryPointError(
                    f"zero gradient with f(w) = {fval} above f* = {self.f_star}"
                )
            self.alpha = 0.0
            self._commit(self.w.copy())
            return
        self.alpha = (fval - self.f_star) / gg
        self._commit(self.w - self.alpha * g)


class L4(_Stepper):
    """alpha = (f(w) - f*) / (f'(w).v + eps) along a direction v.

    ``direction='gradient'`` uses the raw gradient (where the rule and the
    Polyak step coincide as eps -> 0); ``direction='momentum'`` smooths the
    direction with v <- p * v + g.
    """

    def __init__(self, w0, f_star: float = 0.0, eps: float = 1e-12,
                 direction: str = "gradient", p: float = 0.9):
        super().__init__(w0)
        if eps <= 0:
            raise ValueError("eps must be positive")
        if direction not in ("gradient", "momentum"):
            raise ValueError(f"unknown direction {direction!r}")
        self.f_star = float(f_star)
        self.eps = float(eps)
        self.direction = direction
        self.p = float(p)
        self.v = np.zeros_like(self.w)
        self.alpha = 0.0

    def step(self, obj: Objective):
        fval = obj.value(self.w)
        g = obj.grad(self.w)
        if self.direction == "gradient":
            v = g
        else:
            self.v = self.p * self.v + g
            v = self.v
        self.alpha = (fval - self.f_star) / (float(g @ v) + self.eps)
        if not np.isfinite(self.alpha):
            raise DivergenceError("non-finite L4 step-size")
        self._commit(self.w - self.alpha * v)


class LossGrad(_Stepper):
    """Multiplicative step-size control from the linearization residual.

    With the current scalar alpha, compare f(w - alpha g) against the
    linear model f(w) - alpha ||g||^2.  The residual ratio
    r = e / (alpha ||g||^2) decides: increase alpha by the factor rho when
    r < 1/2, otherwise decrease.  Costs one extra function evaluation per
    step (the probe) on top of f(w); no extra gradient.
    """

    def __init__(self, w0, alpha0: float, rho: float = 1.1):
        super().__init__(w0)
        if alpha0 <= 0:
            raise ValueError("alpha0 must be positive")
        if rho <= 1:
            raise ValueError("adjustment factor rho must exceed 1")
        self.alpha = float(alpha0)
        self.rho = float(rho)

    def step(self, obj: Objective):
        g = obj.grad(self.w)
        gg = float(g @ g)
        if gg == 0.0:
            self._commit(self.w.copy())
            return
        fval = obj.value(self.w)
        probe = obj.value(self.w - self.alpha * g)
        e = probe - (fval - self.alpha * gg)
        r = e / (self.alpha * gg)
        if r < 0.5:
            self.alpha *= self.rho
        else:
            self.alpha /= self.rho
        self._commit(self.w - self.alpha * g)


class RMSprop(_Stepper):
    """Normalize the gradient by a running average of its square.

    v <- beta v + (1 - beta) g*g;  w <- w - alpha * g / sqrt(v + eps).
    The eps sits inside the square root.
    """

    def __init__(self, w0, alpha: float, beta: float, eps: float = 1e-8):
        super().__init__(w0)
        if not (0.0 <= beta < 1.0):
            raise ValueError("beta must be in [0, 1)")
        if eps <= 0:
            raise ValueError("eps must be positive")
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.eps = float(eps)
        self.v = np.zeros_like(self.w)

    def step(self, obj: Objective):
        g = obj.grad(self.w)
        self.v = self.beta * self.v + (1.0 - self.beta) * g * g
        self._commit(self.w - self.alpha * g / np.sqrt(self.v + self.eps))


class Adam(_Stepper):
    """Bias-corrected first/second moment smoothing (momentum + RMSprop)."""

    def __init__(self, w0, alpha: float, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        super().__init__(w0)
        if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
            raise ValueError("beta1, beta2 must be in [0, 1)")
        if eps <= 0:
            raise ValueError("eps must be positive")
        self.alpha = float(alpha)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.m = np.zeros_like(self.w)
        self.v = np.zeros_like(self.w)

    def step(self, obj: Objective):
        g = obj.grad(self.w)
        k = self.k + 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * g
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * g * g
        m_hat = self.m / (1.0 - self.beta1 ** k)
        v_hat = self.v / (1.0 - self.beta2 ** k)
        self._commit(self.w - self.alpha * m_hat / (np.sqrt(v_hat) + self.eps))


class HyperGradient(_Stepper):
    """Adapt a scalar step-size by the correlation of successive gradients.

    alpha <- alpha + eta * f'(w_k).f'(w_{k-1}), then w <- w - alpha g.
    The previous gradient starts at zero, so the first step leaves alpha
    unchanged.  alpha may go negative; no clamping.
    """

    def __init__(self, w0, eta: float, alpha0: float):
        super().__init__(w0)
        self.eta = float(eta)
        self.alpha = float(alpha0)
        self.prev_g = np.zeros_like(self.w)

    def step(self, obj: Objective):
        g = obj.grad(self.w)
        self.alpha = self.alpha + self.eta * float(g @ self.prev_g)
        if not np.isfinite(self.alpha):
            raise DivergenceError("non-finite adapted step-size")
        w_new = self.w - self.alpha * g
        self.prev_g = g
        self._commit(w_new)


class IdbdScalar(_Stepper):
    """Scalar step-size adaptation against a decaying gradient trace.

    alpha <- alpha + eta * g.h;  w <- w - alpha g;  h <- lam * h + g.
    With lam = 0 the trace holds exactly the previous gradient and the
    update reduces to :class:`HyperGradient`.
    """

    def __init__(self, w0, eta: float, lam: float, alpha0: float):
        super().__init__(w0)
        if not (0.0 <= lam < 1.0):
            raise ValueError("lam must be in [0, 1)")
        self.eta = float(eta)
        self.lam = float(lam)
        self.alpha = float(alpha0)
        self.h = np.zeros_like(self.w)

    def step(self, obj: Objective):
        g = obj.grad(self.w)
        self.alpha = self.alpha + self.eta * float(g @ self.h)
        if not np.isfinite(self.alpha):
            raise DivergenceError("non-finite adapted step-size")
        w_new = self.w - self.alpha * g
        self.h = self.lam * self.h + g
        self._commit(w_new)


class Idbd:
    """Per-parameter log step-sizes for online least-mean-squares.

    Driven by stream samples rather than an objective.  For each sample
    (x, y*) with error delta = y* - w.x:

        beta_i  += eta * delta * x_i * h_i
        alpha_i  = exp(beta_i)
        w_i     += alpha_i * delta * x_i
        h_i      = h_i * relu(1 - alpha_i * x_i^2) + alpha_i * delta * x_i

    The exponential keeps every alpha_i positive; the relu zeroes the trace
    decay exactly when alpha_i * x_i^2 >= 1, resetting the memory instead
    of letting a negative decay destabilize it.
    """

    def __init__(self, w0, eta: float, beta0: float):
        self.w = as_vector(w0).copy()
        self.k = 0
        self.eta = float(eta)
        self.beta = np.full_like(self.w, float(beta0))
        self.h = np.zeros_like(self.w)

    @property
    def alpha(self) -> Array:
        return np.exp(self.beta)

    def step_sample(self, x, y_star: float):
        x = as_vector(x, dim=self.w.size)
        delta = float(y_star) - float(self.w @ x)
        self.beta = self.beta + self.eta * delta * x * self.h
        alpha = np.exp(self.beta)
        self.w = self.w + alpha * delta * x
        self.h = self.h * np.maximum(0.0, 1.0 - alpha * x * x) + alpha * delta * x
        if not (np.all(np.isfinite(self.w)) and np.all(np.isfinite(self.beta))):
            raise DivergenceError(f"non-finite state after sample {self.k + 1}")
        self.k += 1


def make_optimizer(name: str, w0, params: dict | None = None):
    """Build a stepper by its registry name.

    Names: gd, heavy_ball, nesterov, polyak, l4, lossgrad, rmsprop, adam,
    hd, idbd, idbd1 (plus "csawg", registered by the planner module).
    """
    params = dict(params or {})
    factories = {
        "gd": GradientDescent,
        "heavy_ball": HeavyBall,
        "nesterov": NesterovAGD,
        "polyak": PolyakStep,
        "l4": L4,
        "lossgrad": LossGrad,
        "rmsprop": RMSprop,
        "adam": Adam,
        "hd": HyperGradient,
        "idbd1": IdbdScalar,
        "idbd": Idbd,
    }
    if name == "csawg":
        from .planner import StepSizePlanner

        factory = StepSizePlanner
    elif name in factories:
        factory = factories[name]
    else:
        raise ValueError(f"unknown optimizer name: {name!r}")
    try:
        return factory(w0, **params)
    except TypeError as exc:
        raise ValueError(f"invalid parameters for {name!r}: {exc}") from None

"""Differentially private follow-the-regularized-leader (DP-FTRL).

The learner releases gradient prefix sums through the square-root
factorization counting mechanism: one standard-normal matrix G is drawn
up front, transformed per coordinate by the lower-triangular Toeplitz
factor, and row t is scaled to the per-round standard deviation
C(eps, delta) * kappa * ||R(t)||_{1->2}, where R(t) is the t x t principal
submatrix of the strategy factor.  After preprocessing every round costs
O(d): clip the gradient, add it to the prefix, add the stored noise row and
take the regularized argmin (a rescaling) projected onto the feasible ball.

Gradient clipping rescales to norm kappa whenever the gradient is longer
than kappa, so clipped gradients always lie in the radius-kappa ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .factorization import sqrt_coefficients
from .linalg import toeplitz_lower_matvec
from .mechanism import PrivacyBudget

__all__ = [
    "clip",
    "project_ball",
    "lambda_star",
    "regret_bound",
    "DpFtrlLearner",
    "RegretReport",
    "regret_report",
    "LogisticTask",
    "logistic_task",
    "minimize_logistic_in_ball",
    "run_dp_ftrl_logistic",
]


def clip(g, kappa: float) -> np.ndarray:
    """Rescale g to Euclidean norm at most kappa."""
    g = np.asarray(g, dtype=np.float64)
    if kappa <= 0:
        raise ValueError(f"clip norm must be positive, got {kappa}")
    norm = float(np.linalg.norm(g))
    if norm <= kappa:
        return g.copy()
    return g * (kappa / norm)


def project_ball(v, radius: float) -> np.ndarray:
    """Euclidean projection onto the centered ball of the given radius."""
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm <= radius:
        return v
    return v * (radius / norm)


def _log_factor(n: int) -> float:
    return 1.0 + math.log(4.0 * n / 5.0) / math.pi


def lambda_star(n: int, kappa: float, d: int, budget: PrivacyBudget, radius: float) -> float:
    """Regularization strength balancing the regret bound, with the feasible
    radius standing in for the unknowable norm of the post-hoc optimum:

    sqrt(2 n (1 + ln(4n/5)/pi) (kappa^2 + kappa C sqrt(d))) / radius.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    c = budget.noise_multiplier
    width = kappa * kappa + kappa * c * math.sqrt(d)
    return math.sqrt(2.0 * n * _log_factor(n) * width) / radius


def regret_bound(n: int, kappa: float, d: int, budget: PrivacyBudget, radius: float) -> float:
    """Expected-regret guarantee of DP-FTRL with the tuned regularizer:

    radius * sqrt((1 + ln(4n/5)/pi) (kappa^2 + kappa C sqrt(d)) / (2n)).
    """
    c = budget.noise_multiplier
    width = kappa * kappa + kappa * c * math.sqrt(d)
    return radius * math.sqrt(_log_factor(n) * width / (2.0 * n))


class DpFtrlLearner:
    """Sequential DP-FTRL state machine (single owner, one step per round)."""

    def __init__(
        self,
        n: int,
        d: int,
        budget: PrivacyBudget,
        seed: int,
        lam: float | None = None,
        kappa: float = 1.0,
        radius: float = 1.0,
    ):
        n, d = int(n), int(d)
        if n < 1 or d < 1:
            raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
        if kappa <= 0 or radius <= 0:
            raise ValueError("kappa and radius must be positive")
        self.n = n
        self.d = d
        self.budget = budget
        self.kappa = float(kappa)
        self.radius = float(radius)
        self.lam = float(lam) if lam is not None else lambda_star(n, kappa, d, budget, radius)
        if self.lam <= 0:
            raise ValueError("regularization strength must be positive")
        self.seed = int(seed)
        self.t = 0
        self.grad_prefix = np.zeros(d)
        self.theta = np.zeros(d)

        factor = sqrt_coefficients(n)
        rng = np.random.Generator(np.random.PCG64(int(seed)))
        base = rng.standard_normal((n, d))
        correlated = np.column_stack(
            [toeplitz_lower_matvec(factor.coeffs, base[:, j]) for j in range(d)]
        )
        row_scale = budget.noise_multiplier * kappa * np.sqrt(factor.row_norms_sq())
        self.noise = correlated * row_scale[:, None]

    def step_gradient(self, g) -> np.ndarray:
        """Consume the round-t gradient (evaluated at the current iterate)
        and return the next iterate."""
        if self.t >= self.n:
            raise ValueError(f"horizon {self.n} exceeded")
        g = np.asarray(g, dtype=np.float64)
        if g.shape != (self.d,):
            raise ValueError(f"gradient has shape {g.shape}, expected ({self.d},)")
        self.grad_prefix += clip(g, self.kappa)
        s_t = self.grad_prefix + self.noise[self.t]
        self.theta = project_ball(-s_t / self.lam, self.radius)
        self.t += 1
        return self.theta


@dataclass(frozen=True)
class RegretReport:
    avg_loss: float
    opt_loss: float
    regret: float
    bound: float


def regret_report(avg_loss: float, opt_loss: float, bound: float) -> RegretReport:
    return RegretReport(
        avg_loss=avg_loss, opt_loss=opt_loss, regret=avg_loss - opt_loss, bound=bound
    )


@dataclass(frozen=True)
class LogisticTask:
    """A stream of (x, y) pairs with ||x||_2 <= 1, y in {-1, +1}, under the
    1-Lipschitz logistic loss ln(1 + exp(-y <theta, x>))."""

    xs: np.ndarray = field(repr=False)
    ys: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.xs.shape[0]

    @property
    def d(self) -> int:
        return self.xs.shape[1]

    def point_loss(self, theta, i: int) -> float:
        margin = self.ys[i] * float(self.xs[i] @ theta)
        return float(np.logaddexp(0.0, -margin))

    def point_grad(self, theta, i: int) -> np.ndarray:
        margin = self.ys[i] * float(self.xs[i] @ theta)
        # d/dtheta ln(1 + e^(-m)) = -sigmoid(-m) * y * x
        return -(self.ys[i] * _sigmoid(-margin)) * self.xs[i]

    def avg_loss(self, theta) -> float:
        margins = self.ys * (self.xs @ theta)
        return float(np.mean(np.logaddexp(0.0, -margins)))

    def avg_grad(self, theta) -> np.ndarray:
        margins = self.ys * (self.xs @ theta)
        weights = -self.ys * _sigmoid(-margins)
        return (weights @ self.xs) / self.n


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def logistic_task(
    n: int, d: int, seed: int, flip_prob: float = 0.25, signal_scale: float = 1.0
) -> LogisticTask:
    """Generate a synthetic binary-classification stream.

    Inputs are uniform in the unit ball; labels follow the sign of a fixed
    random direction (scaled by ``signal_scale``) and flip independently
    with probability ``flip_prob``.  ``flip_prob=0`` yields linearly
    separable data.
    """
    n, d = int(n), int(d)
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if not 0 <= flip_prob < 0.5:
        raise ValueError(f"flip probability must be in [0, 0.5), got {flip_prob}")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    direction = rng.standard_normal(d)
    direction /= np.linalg.norm(direction)
    xs = rng.standard_normal((n, d))
    xs /= np.linalg.norm(xs, axis=1, keepdims=True)
    xs *= rng.uniform(size=(n, 1)) ** (1.0 / d)
    ys = np.sign(xs @ (signal_scale * direction))
    ys[ys == 0] = 1.0
    flips = rng.uniform(size=n) < flip_prob
    ys[flips] *= -1.0
    return LogisticTask(xs=xs, ys=ys)


def minimize_logistic_in_ball(
    task: LogisticTask, radius: float, tol: float = 1e-8, max_iter: int = 200_000
) -> np.ndarray:
    """Post-hoc optimum of the average logistic loss over the radius ball.

    Accelerated projected gradient descent, run until the projected-gradient
    norm ||theta - proj(theta - step * grad)|| / step drops below ``tol``.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    # Smoothness constant of the average logistic loss is at most
    # max eig of (1/4n) sum x x^T <= 1/4 for unit-ball inputs.
    step = 4.0
    theta = np.zeros(task.d)
    momentum = theta.copy()
    t_acc = 1.0
    for _ in range(max_iter):
        grad = task.avg_grad(momentum)
        nxt = project_ball(momentum - step * grad, radius)
        grad_at_theta = task.avg_grad(theta)
        mapped = (theta - project_ball(theta - step * grad_at_theta, radius)) / step
        if np.linalg.norm(mapped) <= tol:
            return theta
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_acc * t_acc))
        momentum = nxt + ((t_acc - 1.0) / t_next) * (nxt - theta)
        theta = nxt
        t_acc = t_next
    raise RuntimeError(f"ball-constrained optimizer did not reach tolerance {tol}")


def run_dp_ftrl_logistic(
    task: LogisticTask,
    budget: PrivacyBudget,
    seed: int,
    kappa: float = 1.0,
    radius: float = 1.0,
    lam: float | None = None,
    theta_opt: np.ndarray | None = None,
) -> RegretReport:
    """Run DP-FTRL over a logistic stream and report regret against the
    post-hoc in-ball optimum."""
    learner = DpFtrlLearner(
        task.n, task.d, budget, seed, lam=lam, kappa=kappa, radius=radius
    )
    incurred = 0.0
    for i in range(task.n):
        incurred += task.point_loss(learner.theta, i)
        learner.step_gradient(task.point_grad(learner.theta, i))
    if theta_opt is None:
        theta_opt = minimize_logistic_in_ball(task, radius)
    bound = regret_bound(task.n, kappa, task.d, budget, radius)
    return regret_report(incurred / task.n, task.avg_loss(theta_opt), bound)

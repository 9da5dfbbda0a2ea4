"""Private counting mechanisms and their Monte-Carlo error harness.

Noise calibration follows the Gaussian mechanism: a strategy matrix R with
maximum column norm s needs per-coordinate noise of standard deviation
s * C(eps, delta), where

    C(eps, delta) = (2/eps) * sqrt(4/9 + ln((1/delta) sqrt(2/pi))).

Randomness contract: all mechanisms draw from ``numpy.random.Generator``
seeded with ``PCG64(seed)`` and use ``standard_normal`` (ziggurat), so a
fixed seed reproduces outputs bit-for-bit.  Monte-Carlo trials use derived
seeds ``seed + trial_index`` so serial and parallel runs aggregate
identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .factorization import (
    Factorization,
    dyadic_decomposition,
    honaker_left,
    postorder_index,
    sqrt_coefficients,
)
from .linalg import col_norm_1to2, toeplitz_lower_matvec

__all__ = [
    "noise_multiplier",
    "PrivacyBudget",
    "StreamingCounter",
    "binary_mechanism_run",
    "matrix_mechanism_run",
    "monte_carlo_mse",
]

MECHANISM_KINDS = ("factorization", "binary", "honaker")


def noise_multiplier(epsilon: float, delta: float) -> float:
    """Gaussian-mechanism noise multiplier C(eps, delta) for unit sensitivity."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    return (2.0 / epsilon) * math.sqrt(4.0 / 9.0 + math.log(math.sqrt(2.0 / math.pi) / delta))


@dataclass(frozen=True)
class PrivacyBudget:
    """(eps, delta) privacy budget with its derived Gaussian noise multiplier.

    The error guarantees are stated for 0 < eps <= 1; pass
    ``allow_large_epsilon=True`` for exploratory runs beyond that.
    ``override_noise_multiplier`` is a test hook (e.g. 0.0 disables noise
    entirely); it leaves epsilon/delta untouched.
    """

    epsilon: float
    delta: float
    allow_large_epsilon: bool = False
    override_noise_multiplier: float | None = None

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.epsilon > 1 and not self.allow_large_epsilon:
            raise ValueError(
                f"epsilon={self.epsilon} > 1; pass allow_large_epsilon=True to override"
            )
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")

    @property
    def noise_multiplier(self) -> float:
        if self.override_noise_multiplier is not None:
            return self.override_noise_multiplier
        return noise_multiplier(self.epsilon, self.delta)


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


class StreamingCounter:
    """O(1)-per-round private counter based on the square-root factorization.

    At construction it draws g ~ N(0, I_n), scales by
    C(eps, delta) * ||R||_{1->2} and stores the correlated noise vector
    z = L g, where L is the lower-triangular Toeplitz factor.  Each round
    then just adds z[t] to the running true count.  Preprocessing costs at
    most O(n^2) arithmetic plus n normal draws; per-round work is constant.
    """

    def __init__(self, n: int, budget: PrivacyBudget, seed: int):
        n = int(n)
        if n < 1:
            raise ValueError(f"horizon must be >= 1, got {n}")
        self.n = n
        self.budget = budget
        self.seed = int(seed)
        self.t = 0
        self.running_sum = 0
        factor = sqrt_coefficients(n)
        scale = budget.noise_multiplier * math.sqrt(float(np.sum(factor.coeffs**2)))
        g = _generator(seed).standard_normal(n)
        self.noise = toeplitz_lower_matvec(factor.coeffs, scale * g)

    def step(self, x_t: int) -> float:
        """Consume one stream bit and return the noisy running count."""
        if self.t >= self.n:
            raise ValueError(f"horizon {self.n} exceeded")
        if x_t not in (0, 1):
            raise ValueError(f"stream elements must be bits, got {x_t!r}")
        self.running_sum += int(x_t)
        out = self.running_sum + self.noise[self.t]
        self.t += 1
        return float(out)


def _binary_node_sigma(budget: PrivacyBudget, full: int) -> float:
    # max column norm of the binary strategy matrix is sqrt(1 + log2(n'))
    return budget.noise_multiplier * math.sqrt(1.0 + math.log2(full))


def binary_mechanism_run(x, budget: PrivacyBudget, seed: int) -> np.ndarray:
    """Run the binary (tree) mechanism over a bit stream.

    One Gaussian p-sum noise value is drawn per tree node (post-order, so a
    shared seed reproduces the dense-factorization oracle L (R x + y)); each
    round combines the popcount(t) noisy p-sums covering [1, t].
    """
    x = np.asarray(x)
    n = x.shape[0]
    if n < 1:
        raise ValueError("empty stream")
    if not np.all((x == 0) | (x == 1)):
        raise ValueError("stream elements must be bits")
    full = 1 << max(0, (n - 1).bit_length())
    y = _generator(seed).standard_normal(2 * full - 1) * _binary_node_sigma(budget, full)

    psums = np.zeros(2 * full - 1)
    partial = [0.0] * (full.bit_length() + 1)
    out = np.empty(n)
    for t in range(1, n + 1):
        cur = float(x[t - 1])
        psums[postorder_index(t, t, full)] = cur
        level = 0
        while t % (1 << (level + 1)) == 0:
            cur += partial[level]
            level += 1
            psums[postorder_index(t - (1 << level) + 1, t, full)] = cur
        partial[level] = cur
        acc = 0.0
        for a, b in dyadic_decomposition(t):
            idx = postorder_index(a, b, full)
            acc += psums[idx] + y[idx]
        out[t - 1] = acc
    return out


def matrix_mechanism_run(fact: Factorization, x, budget: PrivacyBudget, seed: int) -> np.ndarray:
    """Generic matrix mechanism: L (R x + z) with z ~ N(0, ||R||_{1->2}^2 C^2 I)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (fact.n,):
        raise ValueError(f"stream length {x.shape} does not match factorization size {fact.n}")
    p = fact.right.shape[0]
    scale = budget.noise_multiplier * col_norm_1to2(fact.right)
    z = _generator(seed).standard_normal(p) * scale
    return fact.left @ (fact.right @ x + z)


def monte_carlo_mse(
    kind: str,
    n: int,
    trials: int,
    budget: PrivacyBudget,
    seed: int,
    fact: Factorization | None = None,
) -> tuple[float, float]:
    """Empirical mean-squared error of a counting mechanism and its standard error.

    Since the additive noise does not depend on the input, the worst-case
    input in the error definition can be replaced by any fixed stream; the
    harness uses the all-zeros stream.  Trial i is seeded with seed + i.
    """
    if kind not in MECHANISM_KINDS:
        raise ValueError(f"kind must be one of {MECHANISM_KINDS}, got {kind!r}")
    n = int(n)
    trials = int(trials)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if kind == "honaker" and fact is None:
        fact = honaker_left(n)
    zeros = np.zeros(n)
    zero_bits = np.zeros(n, dtype=np.int64)

    per_trial = np.empty(trials)
    for i in range(trials):
        trial_seed = seed + i
        if kind == "factorization":
            counter = StreamingCounter(n, budget, trial_seed)
            outputs = np.array([counter.step(0) for _ in range(n)])
        elif kind == "binary":
            outputs = binary_mechanism_run(zero_bits, budget, trial_seed)
        else:
            outputs = matrix_mechanism_run(fact, zeros, budget, trial_seed)
        per_trial[i] = np.mean(outputs**2)

    estimate = float(np.mean(per_trial))
    if trials == 1:
        return estimate, 0.0
    return estimate, float(np.std(per_trial, ddof=1) / math.sqrt(trials))

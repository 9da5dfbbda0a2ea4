"""Counting and parity workload matrices and their closed-form quantities.

The closed-form evaluators (spectrum, trace norm, factorization-norm bounds,
error bounds) never materialize a matrix, so they stay cheap for stream
lengths up to 2**30 and beyond.  The dense constructors exist separately so
tests can cross-check every closed form against a numeric oracle.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

__all__ = [
    "counting_matrix",
    "counting_inverse",
    "counting_singular_value",
    "counting_singular_values",
    "counting_schatten1",
    "gamma_lower_bound_count",
    "gamma_upper_bound_count",
    "err_upper_bound",
    "err_lower_bound_matrix_mech",
    "err_lower_bound_any_mechanism",
    "hadamard",
    "parity_workload",
    "parity_gamma_lower",
]


def _check_n(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"stream length must be >= 1, got {n}")
    return n


def counting_matrix(n: int) -> np.ndarray:
    """The n x n lower-triangular all-ones matrix mapping a stream to its prefix sums."""
    n = _check_n(n)
    return np.tril(np.ones((n, n)))


def counting_inverse(n: int) -> np.ndarray:
    """Exact inverse of the counting matrix: 1 on the diagonal, -1 below it."""
    n = _check_n(n)
    return np.eye(n) - np.diag(np.ones(n - 1), -1)


def counting_singular_value(n: int, i: int) -> float:
    """The i-th largest singular value of the counting matrix, in closed form.

    sigma_i = (1/2) |csc((2i - 1) pi / (4n + 2))|, strictly decreasing in i.
    """
    n = _check_n(n)
    if not 1 <= i <= n:
        raise ValueError(f"singular value index must be in [1, {n}], got {i}")
    return 0.5 / abs(math.sin((2 * i - 1) * math.pi / (4 * n + 2)))


def counting_singular_values(n: int) -> np.ndarray:
    """All n closed-form singular values of the counting matrix, descending."""
    n = _check_n(n)
    i = np.arange(1, n + 1, dtype=np.float64)
    return 0.5 / np.abs(np.sin((2.0 * i - 1.0) * np.pi / (4.0 * n + 2.0)))


def counting_schatten1(n: int) -> float:
    """Trace norm of the counting matrix (sum of the csc-form singular values)."""
    return float(np.sum(counting_singular_values(n)))


def gamma_lower_bound_count(n: int) -> float:
    """Closed-form lower bound on the factorization norm of the counting matrix.

    (sqrt(n) / pi) * (2 + ln((2n + 1)/5) + ln(2n + 1) / (2n)); unnormalized,
    i.e. it bounds the norm itself, not the norm divided by sqrt(n).
    """
    n = _check_n(n)
    return (math.sqrt(n) / math.pi) * (
        2.0 + math.log((2.0 * n + 1.0) / 5.0) + math.log(2.0 * n + 1.0) / (2.0 * n)
    )


def gamma_upper_bound_count(n: int) -> float:
    """Closed-form upper bound sqrt(n) * (1 + ln(4n/5)/pi) on the factorization norm.

    Note: at n = 1 the formula evaluates below 1 while the norm itself is
    exactly 1, so the bound is vacuous there; it is numerically valid for
    every n >= 2 (see the test suite).
    """
    n = _check_n(n)
    return math.sqrt(n) * (1.0 + math.log(4.0 * n / 5.0) / math.pi)


def err_upper_bound(n: int, budget) -> float:
    """Mean-squared-error guarantee of the square-root factorization mechanism.

    C^2 * (1 + ln(4n/5)/pi)^2 where C is the Gaussian noise multiplier of
    ``budget``.
    """
    n = _check_n(n)
    c = budget.noise_multiplier
    return c * c * (1.0 + math.log(4.0 * n / 5.0) / math.pi) ** 2


def _lower_bound_base(n: int) -> float:
    return (2.0 + math.log((2.0 * n + 1.0) / 5.0) + math.log(2.0 * n + 1.0) / (2.0 * n)) ** 2


def err_lower_bound_matrix_mech(n: int, budget) -> float:
    """Lower bound on the mean-squared error of any matrix mechanism for counting.

    (C^2 / pi^2) * (2 + ln((2n+1)/5) + ln(2n+1)/(2n))^2.
    """
    n = _check_n(n)
    c = budget.noise_multiplier
    return (c * c / math.pi**2) * _lower_bound_base(n)


def err_lower_bound_any_mechanism(n: int, epsilon: float, oblivious: bool = False) -> float:
    """Lower bound on the mean-squared error of *any* (eps, delta)-DP counter.

    Prefactor 1/(e^(4 eps) - 1)^2 in general, improving to
    1/(e^(2 eps) - 1)^2 for mechanisms whose noise is oblivious of the
    input.  The general form is only proven for delta below an unspecified
    small constant times e^(-eps); that precondition is not enforced here,
    this is a pure formula evaluator.
    """
    n = _check_n(n)
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    rate = 2.0 if oblivious else 4.0
    pref = 1.0 / (math.expm1(rate * epsilon)) ** 2
    return (pref / math.pi**2) * _lower_bound_base(n)


def hadamard(d: int) -> np.ndarray:
    """Unnormalized 2^d x 2^d Hadamard matrix (Sylvester construction).

    Entries are +-1 and H @ H.T = 2^d * I exactly.
    """
    d = int(d)
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d}")
    h = np.ones((1, 1))
    block = np.array([[1.0, 1.0], [1.0, -1.0]])
    for _ in range(d):
        h = np.kron(block, h)
    return h


def parity_workload(d: int, w: int) -> np.ndarray:
    """Workload matrix of all weight-w parity queries over {+-1}^d.

    One row per size-w subset P of {1..d} (lexicographic order); the row
    evaluates prod_{i in P} x_i on every x in {+-1}^d, with columns ordered
    by the binary enumeration of x (coordinate i is bit i-1, bit value b
    meaning x_i = (-1)^b).  Each row is the Hadamard row indexed by the
    bitmask of P, so shape is C(d, w) x 2^d.
    """
    d, w = int(d), int(w)
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if not 1 <= w <= d:
        raise ValueError(f"w must satisfy 1 <= w <= d, got w={w}, d={d}")
    cols = np.arange(2**d, dtype=np.int64)
    rows = []
    for subset in combinations(range(d), w):
        mask = 0
        for i in subset:
            mask |= 1 << i
        bits = cols & mask
        # parity of popcount(mask & col) decides the sign
        par = np.zeros_like(cols)
        x = bits
        while np.any(x):
            par ^= x & 1
            x >>= 1
        rows.append(1.0 - 2.0 * par.astype(np.float64))
    return np.array(rows)


def parity_gamma_lower(d: int, w: int) -> float:
    """Lower bound on the factorization norm of the parity workload: C(d, w).

    The workload's ||.||_1 / sqrt(cols) collapses to the binomial coefficient
    because all C(d, w) singular values equal 2^(d/2); this evaluator returns
    the exact closed form without materializing the matrix.
    """
    d, w = int(d), int(w)
    if d < 1 or not 1 <= w <= d:
        raise ValueError(f"invalid parity parameters d={d}, w={w}")
    return float(math.comb(d, w))

"""Factorizations of the counting matrix.

Three factorizations are provided:

* the square-root Toeplitz factorization, where both factors are the
  lower-triangular Toeplitz matrix of the coefficients f(0), f(1), ... with
  f(0) = 1 and f(k) = (1 - 1/(2k)) f(k-1) = (2k-1)!!/(2k)!!;
* the binary (tree) mechanism's factorization into p-sum indicator matrices;
* Honaker's variance-optimized left factor, the counting matrix times the
  pseudoinverse of the binary right factor.

Dense factor matrices are capped at n = 4096 (an O(n^2) memory wall);
streaming code paths work from the Toeplitz coefficients alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .workload import counting_matrix

__all__ = [
    "DENSE_LIMIT",
    "ToeplitzFactor",
    "Factorization",
    "sqrt_coefficients",
    "double_factorial_ratio",
    "factor_row_norm_sq",
    "factor_frobenius_sq",
    "sqrt_factorization",
    "binary_factorization",
    "binary_right_factor",
    "binary_left_factor",
    "dyadic_decomposition",
    "postorder_index",
    "honaker_left",
    "residual",
    "expected_mse",
    "suboptimality_ratio",
]

# Largest n for which dense factor matrices may be materialized.
DENSE_LIMIT = 4096


@dataclass(frozen=True)
class ToeplitzFactor:
    """Coefficient view of the square-root factor: coeffs[k] = f(k)."""

    n: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1 or len(self.coeffs) != self.n:
            raise ValueError("coefficient length must equal n >= 1")
        if self.coeffs[0] != 1.0:
            raise ValueError("f(0) must be 1")

    def row_norms_sq(self) -> np.ndarray:
        """All row norms squared at once: entry t-1 is ||L[t,:]||_2^2."""
        return np.cumsum(self.coeffs**2)


@dataclass(frozen=True)
class Factorization:
    """A dense factorization left @ right of the counting matrix."""

    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)
    kind: str

    def __post_init__(self):
        if self.left.shape[1] != self.right.shape[0]:
            raise ValueError(
                f"inner dimensions disagree: {self.left.shape} vs {self.right.shape}"
            )
        if self.kind not in ("sqrt_toeplitz", "binary", "honaker"):
            raise ValueError(f"unknown factorization kind {self.kind!r}")

    @property
    def n(self) -> int:
        return self.right.shape[1]


def sqrt_coefficients(n: int) -> ToeplitzFactor:
    """Toeplitz coefficients of the square-root factorization.

    f(0) = 1 and f(k) = (1 - 1/(2k)) f(k-1); equivalently the double
    factorial ratio (2k-1)!!/(2k)!!.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    terms = np.ones(n)
    if n > 1:
        k = np.arange(1, n, dtype=np.float64)
        terms[1:] = 1.0 - 1.0 / (2.0 * k)
    return ToeplitzFactor(n=n, coeffs=np.cumprod(terms))


def double_factorial_ratio(k: int) -> Fraction:
    """Exact (2k-1)!!/(2k)!! as a rational; the arbitrary-precision oracle
    for ``sqrt_coefficients``."""
    k = int(k)
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    num = 1
    den = 1
    for i in range(1, k + 1):
        num *= 2 * i - 1
        den *= 2 * i
    return Fraction(num, den)


def factor_row_norm_sq(factor: ToeplitzFactor, t: int) -> float:
    """Squared norm of row t of the square-root factor: 1 + sum_{i<t} f(i)^2.

    This is also the squared maximum column norm of the t x t principal
    submatrix.  A valid closed-form cap is 1 + ln(4t - 3)/pi (asserted in
    the tests); tighter constants circulate but fail numerically.
    """
    if not 1 <= t <= factor.n:
        raise ValueError(f"row index must be in [1, {factor.n}], got {t}")
    return float(np.sum(factor.coeffs[:t] ** 2))


def factor_frobenius_sq(factor: ToeplitzFactor) -> float:
    """Squared Frobenius norm of the square-root factor (sum of row norms)."""
    # row t contributes sum_{j < t} f(j)^2, so f(j)^2 appears n - j times
    n = factor.n
    weights = np.arange(n, 0, -1, dtype=np.float64)
    return float(np.sum(weights * factor.coeffs**2))


def _dense_guard(n: int, kind: str) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > DENSE_LIMIT:
        raise ValueError(
            f"dense {kind} factorization refused for n={n} > {DENSE_LIMIT}; "
            "use the coefficient/streaming path instead"
        )
    return n


def sqrt_factorization(n: int) -> Factorization:
    """Dense L = R = lower-triangular Toeplitz factorization of the counting matrix."""
    n = _dense_guard(n, "sqrt")
    mat = linalg.lower_toeplitz(sqrt_coefficients(n).coeffs)
    return Factorization(left=mat, right=mat, kind="sqrt_toeplitz")


def dyadic_decomposition(t: int) -> list[tuple[int, int]]:
    """Decompose [1, t] into maximal dyadic blocks, left to right.

    Each block (a, b) is aligned (a = j*2^k + 1, b = (j+1)*2^k) so it is a
    node of the complete binary tree; there are popcount(t) blocks.
    """
    t = int(t)
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    blocks = []
    start = 1
    remaining = t
    for bit in reversed(range(t.bit_length())):
        size = 1 << bit
        if remaining >= size:
            blocks.append((start, start + size - 1))
            start += size
            remaining -= size
    return blocks


def postorder_index(a: int, b: int, n: int) -> int:
    """Post-order index (0-based) of the tree node covering [a, b].

    The tree is the complete binary tree over leaves 1..n (n a power of
    two); nodes are numbered left subtree, right subtree, then root, which
    matches the recursive construction of the binary right factor.
    """
    if n & (n - 1) or n < 1:
        raise ValueError(f"tree size must be a power of two, got {n}")
    lo, hi, offset = 1, n, 0
    while True:
        if (a, b) == (lo, hi):
            return offset + 2 * (hi - lo + 1) - 2
        mid = (lo + hi) // 2
        if b <= mid:
            hi = mid
        elif a > mid:
            offset += 2 * (mid - lo + 1) - 1
            lo = mid + 1
        else:
            raise ValueError(f"[{a}, {b}] is not a node of the tree over [1, {n}]")


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def binary_right_factor(n: int) -> np.ndarray:
    """The (2n'-1) x n binary-mechanism strategy matrix (n' = next power of two).

    Row i is the indicator of the leaves summed by the i-th tree node in
    post-order; for n < n' only the first n columns are kept.
    """
    n = _dense_guard(n, "binary")
    full = _next_pow2(n)

    def build(size: int) -> np.ndarray:
        if size == 1:
            return np.ones((1, 1))
        half = build(size // 2)
        rows = half.shape[0]
        out = np.zeros((2 * rows + 1, size))
        out[:rows, : size // 2] = half
        out[rows : 2 * rows, size // 2 :] = half
        out[2 * rows, :] = 1.0
        return out

    return build(full)[:, :n]


def binary_left_factor(n: int) -> np.ndarray:
    """The n x (2n'-1) binary-mechanism reconstruction matrix.

    Row t has a one at each p-sum node of the dyadic decomposition of
    [1, t], i.e. popcount(t) ones.
    """
    n = _dense_guard(n, "binary")
    full = _next_pow2(n)
    out = np.zeros((n, 2 * full - 1))
    for t in range(1, n + 1):
        for a, b in dyadic_decomposition(t):
            out[t - 1, postorder_index(a, b, full)] = 1.0
    return out


def binary_factorization(n: int) -> Factorization:
    """Binary (tree) mechanism factorization; exact over the integers.

    For n not a power of two the tree is built at the next power of two
    and truncated to the first n rows/columns.
    """
    return Factorization(
        left=binary_left_factor(n), right=binary_right_factor(n), kind="binary"
    )


def honaker_left(n: int) -> Factorization:
    """Honaker's optimized factorization: same right factor as the binary
    mechanism, left factor counting_matrix @ pinv(R).

    The pseudoinverse-based left factor is the minimum-Frobenius-norm
    solution of L @ R = counting matrix, so it never has larger Frobenius
    norm than the binary left factor.
    """
    r = binary_right_factor(n)
    left = counting_matrix(n) @ linalg.pseudoinverse(r)
    return Factorization(left=left, right=r, kind="honaker")


def residual(fact: Factorization) -> float:
    """Max absolute entry of left @ right minus the counting matrix."""
    n = fact.n
    return float(np.max(np.abs(fact.left @ fact.right - counting_matrix(n))))


def expected_mse(fact: Factorization, budget, n: int) -> float:
    """Exact mean-squared error of the matrix mechanism using ``fact``:

    C^2 * ||R||_{1->2}^2 * ||L||_F^2 / n.
    """
    if int(n) != fact.n:
        raise ValueError(f"n={n} disagrees with factorization size {fact.n}")
    c = budget.noise_multiplier
    col = linalg.col_norm_1to2(fact.right)
    fro = linalg.frobenius_norm(fact.left)
    return c * c * col * col * fro * fro / fact.n


def suboptimality_ratio(n: int) -> float:
    """Guaranteed error ratio of the binary mechanism over the square-root
    factorization mechanism:

    log2(n) (1 + log2(n)) / (2 (1 + ln(4n/5)/pi)^2),

    nondecreasing for n >= 4 and approaching pi^2 / (2 ln(2)^2) ~ 10.27.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m = math.log2(n)
    return m * (1.0 + m) / (2.0 * (1.0 + math.log(4.0 * n / 5.0) / math.pi) ** 2)

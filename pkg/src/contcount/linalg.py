"""Dense real linear algebra primitives.

Norms, spectra, pseudoinverse, PSD checks and lower-triangular Toeplitz
products.  Everything here operates on plain 2-D float64 numpy arrays
("dense matrices"); the heavy decompositions delegate to numpy's LAPACK
bindings, which satisfy the tolerances documented on each function.

All functions are pure and safe for concurrent use.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_matrix",
    "frobenius_norm",
    "col_norm_1to2",
    "row_norm_2toinf",
    "singular_values",
    "schatten1",
    "pseudoinverse",
    "min_eigenvalue_symmetric",
    "toeplitz_lower_matvec",
    "lower_toeplitz",
    "read_matrix_csv",
    "write_matrix_csv",
]

# Symmetry slack accepted by min_eigenvalue_symmetric (absolute, entrywise).
SYMMETRY_TOL = 1e-10

# Singular values below PINV_RTOL * sigma_max are treated as zero.
PINV_RTOL = 1e-12


def as_matrix(values) -> np.ndarray:
    """Coerce ``values`` to a 2-D float64 array and validate it.

    Rejects empty matrices and non-finite entries (NaN/Inf).
    """
    a = np.asarray(values, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"matrix must be non-empty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def frobenius_norm(a) -> float:
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(as_matrix(a)))


def col_norm_1to2(a) -> float:
    """Maximum Euclidean norm over the columns."""
    a = as_matrix(a)
    return float(np.sqrt(np.max(np.sum(a * a, axis=0))))


def row_norm_2toinf(a) -> float:
    """Maximum Euclidean norm over the rows."""
    a = as_matrix(a)
    return float(np.sqrt(np.max(np.sum(a * a, axis=1))))


def singular_values(a) -> np.ndarray:
    """Full singular spectrum, descending, including zeros.

    Returns min(rows, cols) values.  Non-convergence of the underlying SVD
    surfaces as ``numpy.linalg.LinAlgError`` rather than garbage values.
    """
    return np.linalg.svd(as_matrix(a), compute_uv=False)


def schatten1(a) -> float:
    """Sum of singular values (trace norm)."""
    return float(np.sum(singular_values(a)))


def pseudoinverse(a) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD.

    Singular values below ``PINV_RTOL`` times the largest one are treated
    as zero.  Satisfies ``A @ pinv(A) @ A == A`` to within 1e-9 * ||A||_F.
    """
    return np.linalg.pinv(as_matrix(a), rcond=PINV_RTOL)


def min_eigenvalue_symmetric(h) -> float:
    """Smallest eigenvalue of a symmetric matrix.

    ``h`` must be square and symmetric to within ``SYMMETRY_TOL`` in every
    entry; anything less symmetric is rejected so that PSD verdicts are
    never computed from the wrong matrix.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"matrix must be square, got shape {h.shape}")
    skew = np.max(np.abs(h - h.T))
    if skew > SYMMETRY_TOL:
        raise ValueError(f"matrix is not symmetric: max|H - H^T| = {skew:g}")
    sym = 0.5 * (h + h.T)
    return float(np.linalg.eigvalsh(sym)[0])


def toeplitz_lower_matvec(coeffs, x) -> np.ndarray:
    """Apply the lower-triangular Toeplitz matrix with first column ``coeffs``.

    y[t] = sum_{j <= t} coeffs[t - j] * x[j], i.e. the leading ``n`` entries
    of the convolution of ``coeffs`` with ``x``.  Direct convolution is used
    up to 4096 entries; beyond that an FFT convolution keeps preprocessing
    well under the O(n^2) arithmetic budget.
    """
    c = np.asarray(coeffs, dtype=np.float64)
    v = np.asarray(x, dtype=np.float64)
    if c.ndim != 1 or v.ndim != 1:
        raise ValueError("coeffs and x must be 1-D")
    if c.shape[0] != v.shape[0]:
        raise ValueError(f"length mismatch: {c.shape[0]} coefficients vs {v.shape[0]} inputs")
    n = c.shape[0]
    if n == 0:
        raise ValueError("empty input")
    if n <= 4096:
        return np.convolve(c, v)[:n]
    from scipy.signal import fftconvolve

    return fftconvolve(c, v)[:n]


def lower_toeplitz(coeffs, n: int | None = None) -> np.ndarray:
    """Materialize the n x n lower-triangular Toeplitz matrix of ``coeffs``."""
    from scipy.linalg import toeplitz

    c = np.asarray(coeffs, dtype=np.float64)
    if n is None:
        n = c.shape[0]
    col = np.zeros(n)
    col[: min(n, c.shape[0])] = c[:n]
    return toeplitz(col, r=np.zeros(n))


def read_matrix_csv(path) -> np.ndarray:
    """Read a matrix from CSV: one row per line, comma-separated floats, no header.

    Ragged rows and non-numeric fields are rejected.
    """
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(field) for field in line.split(",")]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric field") from exc
            if rows and len(row) != len(rows[0]):
                raise ValueError(
                    f"{path}:{lineno}: ragged row of length {len(row)}, expected {len(rows[0])}"
                )
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    return as_matrix(rows)


def write_matrix_csv(path, a) -> None:
    """Write a matrix as CSV (no header), round-trip safe."""
    a = as_matrix(a)
    with open(path, "w", encoding="utf-8") as fh:
        for row in a:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")

"""Dual certificates for the factorization norm.

The factorization norm of a matrix A (minimum over A = L R of
||L||_F * ||R||_{1->2}) admits a semidefinite dual whose feasible points
certify lower bounds.  This module constructs and verifies two explicit
certificate families:

* the SVD certificate, proving gamma >= ||A||_1 / sqrt(m) for any n x m
  matrix A (Z = sqrt(n) U V^T from the SVD, weights split evenly between
  the two blocks);
* the diagonal certificate, proving gamma = ||A||_F for diagonal A.

Only certificate *verification* is implemented; solving the SDP generically
is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix, frobenius_norm, min_eigenvalue_symmetric, schatten1

__all__ = [
    "gamma_lower",
    "gamma_upper",
    "DualCertificate",
    "DiagonalCertificate",
    "build_svd_certificate",
    "verify_certificate",
    "build_diagonal_certificate",
    "verify_diagonal_certificate",
]

# Entries of the dual weight vector must clear this to count as strictly positive.
POSITIVITY_TOL = 1e-12


def gamma_lower(a) -> float:
    """Spectral lower bound ||A||_1 / sqrt(cols) on the factorization norm."""
    a = as_matrix(a)
    return schatten1(a) / np.sqrt(a.shape[1])


def gamma_upper(a) -> float:
    """Upper bound ||A||_F on the factorization norm (take L = A, R = I)."""
    return frobenius_norm(a)


@dataclass(frozen=True)
class DualCertificate:
    """Feasible dual point: weight vector w (length n + m) and the
    off-diagonal block Z of the dual matrix variable."""

    w: np.ndarray = field(repr=False)
    Z: np.ndarray = field(repr=False)
    claimed_objective: float


@dataclass(frozen=True)
class DiagonalCertificate:
    """Dual point in the (beta, Y, y) parametrization used for diagonal matrices."""

    beta: float
    Y: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    claimed_objective: float


def build_svd_certificate(a) -> DualCertificate:
    """Certificate witnessing gamma >= ||A||_1 / sqrt(m).

    Takes Z = sqrt(n) U V^T from the SVD of A and
    w = (1/sqrt(2)) (1_n / sqrt(n); 1_m / sqrt(m)).
    """
    a = as_matrix(a)
    n, m = a.shape
    if not np.any(a):
        raise ValueError("certificate construction needs a nonzero matrix")
    u, _, vt = np.linalg.svd(a, full_matrices=False)
    z = np.sqrt(n) * (u @ vt)
    w = np.concatenate(
        [np.full(n, 1.0 / np.sqrt(2.0 * n)), np.full(m, 1.0 / np.sqrt(2.0 * m))]
    )
    return DualCertificate(w=w, Z=z, claimed_objective=schatten1(a) / np.sqrt(m))


def _feasibility_block(z: np.ndarray) -> np.ndarray:
    # diag(n I_n, I_m) - Zhat, with Zhat the symmetric embedding of Z
    n, m = z.shape
    s = np.zeros((n + m, n + m))
    s[:n, :n] = n * np.eye(n)
    s[n:, n:] = np.eye(m)
    s[:n, n:] = -z
    s[n:, :n] = -z.T
    return s


def verify_certificate(a, cert: DualCertificate, tol: float = 1e-9) -> tuple[bool, float]:
    """Check dual feasibility of a certificate and evaluate its objective.

    Feasibility requires the weight structure (strictly positive entries,
    unit norm, first block constant) and positive semidefiniteness of
    diag(n I, I) - Zhat, tested as min-eigenvalue >= -tol * (1 + ||Z||_F)
    so the tolerance tracks the magnitude of the blocks.  The objective
    w^T (Ahat o Zhat) w = 2 w_1^T (A o Z) w_2 is returned either way; it is
    a valid lower bound on the factorization norm only when feasible.
    """
    a = as_matrix(a)
    n, m = a.shape
    z = as_matrix(cert.Z)
    w = np.asarray(cert.w, dtype=np.float64)
    if z.shape != (n, m):
        raise ValueError(f"Z has shape {z.shape}, expected {(n, m)}")
    if w.shape != (n + m,):
        raise ValueError(f"w has length {w.shape}, expected {n + m}")

    structure_ok = (
        bool(np.all(w > POSITIVITY_TOL))
        and abs(np.linalg.norm(w) - 1.0) <= 1e-9
        and float(np.max(w[:n]) - np.min(w[:n])) <= 1e-12
    )
    scale = 1.0 + frobenius_norm(z)
    psd_ok = min_eigenvalue_symmetric(_feasibility_block(z)) >= -tol * scale

    objective = 2.0 * float(w[:n] @ ((a * z) @ w[n:]))
    return structure_ok and psd_ok, objective


def build_diagonal_certificate(a) -> DiagonalCertificate:
    """Certificate pinning the factorization norm of a diagonal matrix to ||A||_F.

    beta = 1/2, Y = A / (2 ||A||_F), y_i = A[i,i]^2 / (2 ||A||_F^2); the
    normalization beta + sum(y) = 1 holds by construction and the objective
    Tr(A Y^T) + Tr(A^T Y) equals ||A||_F.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise ValueError(f"diagonal certificate needs a square matrix, got {a.shape}")
    if np.max(np.abs(a - np.diag(np.diag(a)))) != 0.0:
        raise ValueError("matrix must be diagonal")
    fro = frobenius_norm(a)
    if fro == 0.0:
        raise ValueError("certificate construction needs a nonzero matrix")
    y_mat = a / (2.0 * fro)
    y_vec = np.diag(a) ** 2 / (2.0 * fro**2)
    objective = float(np.trace(a @ y_mat.T) + np.trace(a.T @ y_mat))
    return DiagonalCertificate(beta=0.5, Y=y_mat, y=y_vec, claimed_objective=objective)


def verify_diagonal_certificate(
    a, cert: DiagonalCertificate, tol: float = 1e-9
) -> tuple[bool, float]:
    """Feasibility and objective of a (beta, Y, y) certificate.

    Uses the Schur-complement criterion: diag(beta I, Delta(y)) dominates
    the symmetric embedding of Y iff Delta(y) - Y^T Y / beta is PSD.
    """
    a = as_matrix(a)
    n = a.shape[0]
    y_mat = as_matrix(cert.Y)
    y_vec = np.asarray(cert.y, dtype=np.float64)
    if y_mat.shape != (n, n) or y_vec.shape != (n,):
        raise ValueError("certificate dimensions do not match the matrix")
    normalization_ok = abs(cert.beta + float(np.sum(y_vec)) - 1.0) <= 1e-12
    schur = np.diag(y_vec) - (y_mat.T @ y_mat) / cert.beta
    psd_ok = min_eigenvalue_symmetric(schur) >= -tol * (1.0 + float(np.sum(np.abs(y_vec))))
    objective = float(np.trace(a @ y_mat.T) + np.trace(a.T @ y_mat))
    return normalization_ok and cert.beta > 0 and psd_ok, objective

"""Dense symmetric linear algebra for systems up to a few thousand unknowns.

Everything here works on plain float64 numpy arrays.  The generalized
symmetric eigenproblem S*phi = lambda*M*phi is reduced with a Cholesky
factor of M to a standard symmetric problem, so the returned transforms
are exact inverses of each other up to roundoff:

    back_transform    = L^{-T} W        (columns are M-orthonormal eigenvectors)
    forward_transform = W^T L^T         (its inverse, no matrix inversion needed)
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NotPositiveDefinite, Singular

__all__ = [
    "EigenSystem",
    "cholesky",
    "sym_eigen",
    "gen_sym_eigen",
    "inverse",
    "solve_spd",
]


def _check_square(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotPositiveDefinite("matrix must be square, got shape %s" % (a.shape,))
    if not np.all(np.isfinite(a)):
        raise NotPositiveDefinite("matrix has non-finite entries")
    return a


def _check_symmetric(a, rel=1e-12):
    scale = max(np.abs(a).max(), 1e-300)
    skew = np.abs(a - a.T).max()
    if skew > rel * scale:
        raise NotPositiveDefinite(
            "matrix not symmetric: asymmetry %.3e relative to %.3e" % (skew, scale)
        )


@dataclass(frozen=True)
class EigenSystem:
    """Spectral factorization of M^{-1}S with M-orthonormal eigenvectors.

    eigenvalues are ascending and strictly positive.  For any coefficient
    vector c(lambda_i), back_transform @ diag(c) @ forward_transform is the
    matrix function c(M^{-1}S).
    """

    eigenvalues: np.ndarray
    back_transform: np.ndarray
    forward_transform: np.ndarray

    @property
    def size(self):
        return self.eigenvalues.shape[0]

    def matrix_function(self, coeffs):
        """Assemble back @ diag(coeffs) @ forward for given per-mode values."""
        coeffs = np.asarray(coeffs, dtype=float)
        return self.back_transform @ (coeffs[:, None] * self.forward_transform)


def cholesky(a):
    """Lower Cholesky factor of a symmetric positive definite matrix.

    Raises NotPositiveDefinite if the matrix is not symmetric to 1e-12
    (relative) or a pivot fails.
    """
    a = _check_square(a)
    _check_symmetric(a)
    try:
        return scipy.linalg.cholesky(a, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc


def sym_eigen(a):
    """Eigenvalues (ascending) and orthonormal eigenvectors of symmetric A."""
    a = _check_square(a)
    _check_symmetric(a)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return w, v


def gen_sym_eigen(s, m):
    """Solve S*phi = lambda*M*phi for symmetric S and SPD M.

    Reduces to the standard problem on L^{-1} S L^{-T} where M = L L^T,
    then maps the orthonormal eigenvectors back.  Eigenvalues must come
    out strictly positive (S is expected SPD as well).
    """
    s = _check_square(s)
    m = _check_square(m)
    if s.shape != m.shape:
        raise NotPositiveDefinite(
            "operand shapes differ: %s vs %s" % (s.shape, m.shape)
        )
    _check_symmetric(s)
    ell = cholesky(m)
    # C = L^{-1} S L^{-T}, symmetrized to kill roundoff skew
    c = scipy.linalg.solve_triangular(ell, s, lower=True)
    c = scipy.linalg.solve_triangular(ell, c.T, lower=True)
    c = 0.5 * (c + c.T)
    w, vecs = sym_eigen(c)
    if w[0] <= 0.0:
        raise NotPositiveDefinite("smallest eigenvalue %.3e is not positive" % w[0])
    back = scipy.linalg.solve_triangular(ell, vecs, lower=True, trans="T")
    forward = (ell @ vecs).T
    return EigenSystem(eigenvalues=w, back_transform=back, forward_transform=forward)


def inverse(a):
    """Inverse via LU with partial pivoting; raises Singular on tiny pivots."""
    a = _check_square(a)
    scale = max(np.abs(a).max(), 1e-300)
    lu, piv = scipy.linalg.lu_factor(a)
    if np.abs(np.diag(lu)).min() <= 1e-14 * scale:
        raise Singular("pivot below 1e-14 of matrix scale")
    return scipy.linalg.lu_solve((lu, piv), np.eye(a.shape[0]))


def solve_spd(a, b):
    """Solve A X = B for SPD A via Cholesky."""
    factor = scipy.linalg.cho_factor(_check_square(a), lower=True)
    return scipy.linalg.cho_solve(factor, np.asarray(b, dtype=float))

"""Posterior moments of the Gaussian hierarchical model, column by column.

The model per column is  v = K j + noise,  noise ~ N(0, beta*I),
j ~ N(0, diag(lam)).  The posterior covariance is

    Sigma = ((1/beta) K^T K + diag(lam)^{-1})^{-1}

which is never formed directly on solver paths.  Instead we factor
K = L D R^T once (economy SVD, rank-truncated) and use the Woodbury
identity

    Sigma = diag(lam) - diag(lam) R M^{-1} R^T diag(lam),
    M     = R^T diag(lam) R + beta D^{-2}

so the only dense solve is an r x r SPD system (r = rank of K).  Zero
prior variances enter multiplicatively, so pruned coordinates come out
exactly zero instead of dividing by zero.  A dense O(S^3) reference
implementation is kept as an oracle for tests.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .errors import DomainError, NumericError, RankError


@dataclass(frozen=True)
class ProblemData:
    """A discrete linear observation model: observations = K @ sources + noise."""

    K: np.ndarray  # (N, S) lead field
    V: np.ndarray  # (N, T) observations

    def __post_init__(self):
        K = np.atleast_2d(np.asarray(self.K, dtype=float))
        V = np.asarray(self.V, dtype=float)
        if V.ndim == 1:
            V = V[:, None]
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "V", V)
        if not np.all(np.isfinite(K)) or not np.all(np.isfinite(V)):
            raise DomainError("K and V must be finite")
        if K.shape[0] != V.shape[0]:
            raise DomainError(f"row mismatch: K has {K.shape[0]} rows, V has {V.shape[0]}")

    @property
    def n_sensors(self):
        return self.K.shape[0]

    @property
    def n_sources(self):
        return self.K.shape[1]

    @property
    def n_times(self):
        return self.V.shape[1]


@dataclass(frozen=True)
class LeadFieldSVD:
    """Rank-truncated economy SVD of the lead field, K ~= Lmat @ diag(D) @ R.T."""

    Lmat: np.ndarray  # (N, r) orthonormal columns
    D: np.ndarray  # (r,) singular values, descending, strictly positive
    R: np.ndarray  # (S, r) orthonormal columns

    @property
    def rank(self):
        return self.D.size

    @property
    def n_sources(self):
        return self.R.shape[0]

    def reconstruct(self):
        return (self.Lmat * self.D) @ self.R.T


@dataclass(frozen=True)
class PosteriorMoments:
    """Per-column posterior mean, variance diagonal, and the determinant term.

    logdet_term is log det(I + (1/beta) diag(lam) K^T K), i.e. the sum
    log|diag(lam)| + log|Sigma^{-1}| in a form that stays finite when
    entries of lam are exactly zero.
    """

    mu: np.ndarray
    sigma_diag: np.ndarray
    logdet_term: float


def svd_decompose(data, rank_tol=1e-12):
    """Economy SVD of the lead field with singular values below rank_tol*max dropped."""
    K = data.K if isinstance(data, ProblemData) else np.atleast_2d(np.asarray(data, dtype=float))
    if not np.all(np.isfinite(K)):
        raise DomainError("lead field must be finite")
    try:
        U, s, Vt = np.linalg.svd(K, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure is rare
        raise NumericError(f"SVD of the lead field failed: {exc}") from exc
    if s.size == 0 or s[0] <= 0.0:
        raise RankError("lead field has rank zero")
    keep = s > rank_tol * s[0]
    r = int(np.count_nonzero(keep))
    if r == 0:
        raise RankError("lead field has rank zero after truncation")
    return LeadFieldSVD(Lmat=U[:, :r].copy(), D=s[:r].copy(), R=Vt[:r].T.copy())


def _inner_cholesky(svd, lam, beta):
    """Cholesky factor of M = R^T diag(lam) R + beta D^{-2} with diagnostics."""
    R = svd.R
    M = (R.T * lam) @ R
    M[np.diag_indices_from(M)] += beta / (svd.D * svd.D)
    try:
        return sla.cholesky(M, lower=True)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(M)
        raise NumericError(
            f"inner posterior system is not numerically SPD (cond ~ {cond:.3e}); "
            f"beta={beta:.3e}, max lam={lam.max():.3e}"
        ) from exc


def posterior_moments(svd, lambda_col, beta, v_col):
    """Posterior mean, variance diagonal and determinant term via the SVD path.

    Parameters
    ----------
    svd : LeadFieldSVD
    lambda_col : (S,) nonnegative prior variances
    beta : positive noise variance
    v_col : (N,) observation column

    Returns
    -------
    PosteriorMoments with mu_i = sigma_diag_i = 0 wherever lambda_col_i = 0.
    """
    lam = np.asarray(lambda_col, dtype=float)
    v = np.asarray(v_col, dtype=float)
    if lam.shape != (svd.n_sources,):
        raise DomainError(f"lambda_col must have shape ({svd.n_sources},)")
    if not np.all(np.isfinite(lam)) or np.any(lam < 0):
        raise DomainError("lambda_col must be finite and nonnegative")
    if not np.isfinite(beta) or beta <= 0:
        raise DomainError("beta must be positive")

    R, D = svd.R, svd.D
    C = _inner_cholesky(svd, lam, beta)

    # mu = diag(lam) R M^{-1} D^{-1} L^T v
    rhs = (svd.Lmat.T @ v) / D
    w = sla.cho_solve((C, True), rhs)
    mu = lam * (R @ w)

    # sigma_diag = lam - lam^2 * rowwise ||C^{-1} R^T||^2
    Y = sla.solve_triangular(C, R.T, lower=True)
    q = np.einsum("ij,ij->j", Y, Y)
    sigma_diag = lam - lam * lam * q
    # exact zeros stay exact; tiny negative values are roundoff from the subtraction
    np.clip(sigma_diag, 0.0, None, out=sigma_diag)

    # log det(I + (1/beta) diag(lam) K^T K) = log det M + 2 sum log D - r log beta
    logdet = 2.0 * np.sum(np.log(np.diag(C))) + 2.0 * np.sum(np.log(D)) - svd.rank * np.log(beta)
    return PosteriorMoments(mu=mu, sigma_diag=sigma_diag, logdet_term=float(logdet))


def posterior_direct(K, lambda_col, beta, v_col):
    """Dense O(S^3) oracle: invert (1/beta) K^T K + diag(lam)^{-1} directly.

    Zero prior variances are floored at 1e-300 so the inverse exists; this
    routine exists for tests and small problems only.
    """
    K = np.atleast_2d(np.asarray(K, dtype=float))
    lam = np.maximum(np.asarray(lambda_col, dtype=float), 1e-300)
    v = np.asarray(v_col, dtype=float)
    if np.any(~np.isfinite(lam)):
        raise DomainError("lambda_col must be finite")
    if beta <= 0:
        raise DomainError("beta must be positive")
    prec = K.T @ K / beta
    prec[np.diag_indices_from(prec)] += 1.0 / lam
    try:
        sigma = np.linalg.inv(prec)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"direct posterior inversion failed: {exc}") from exc
    mu = sigma @ (K.T @ v) / beta
    sign, logdet_prec = np.linalg.slogdet(prec)
    if sign <= 0:
        raise NumericError("direct posterior precision is not positive definite")
    logdet = float(np.sum(np.log(lam)) + logdet_prec)
    return PosteriorMoments(mu=mu, sigma_diag=np.diag(sigma).copy(), logdet_term=logdet)

"""
Tikhonov-regularized least squares for the amplitudes:

    min_a  N^-1 |S a - y|^2 + lam |a|^2   <=>   (S^T S / N + lam I) a = S^T y / N
"""
import numpy as np
import scipy.linalg


class SingularSystemError(np.linalg.LinAlgError):
    """ normal equations are singular (only possible with lam = 0) """


class LsProblem:
    """least-squares problem for fixed frequencies and biases

    Parameters
    -----------
    design : array, shape (N, K)
        design matrix S
    targets : array, shape (N,)
        targets y
    lam : float
        Tikhonov regularization strength, >= 0
    """

    def __init__(self, design, targets, lam):
        design = np.asarray(design, dtype=np.float64)
        targets = np.asarray(targets, dtype=np.float64)
        if targets.ndim == 2 and targets.shape[1] == 1:
            targets = targets[:, 0]
        if design.ndim != 2 or design.shape[0] < 1 or design.shape[1] < 1:
            raise ValueError("design must be an N x K matrix with N, K >= 1")
        if targets.ndim != 1 or targets.shape[0] != design.shape[0]:
            raise ValueError(f"targets of shape {targets.shape} do not match "
                             f"design with {design.shape[0]} rows")
        if not np.isfinite(lam) or lam < 0:
            raise ValueError(f"lam must be a finite value >= 0, got {lam}")
        if not (np.all(np.isfinite(design)) and np.all(np.isfinite(targets))):
            raise ValueError("design or targets contain NaN or Inf")
        self.design = design
        self.targets = targets
        self.lam = float(lam)

    @property
    def n_samples(self):
        return self.design.shape[0]

    @property
    def n_nodes(self):
        return self.design.shape[1]

    def normal_equations(self):
        """ (S^T S / N + lam I, S^T y / N) """
        S, N = self.design, self.n_samples
        A = S.T @ S / N
        A[np.diag_indices_from(A)] += self.lam
        return A, S.T @ self.targets / N


def solve_amplitudes(problem):
    """ unique minimizer of N^-1 |S a - y|^2 + lam |a|^2

    Cholesky factorization of the K x K normal matrix (scipy.linalg.cho_factor);
    with lam = 0 a rank-deficient S raises SingularSystemError
    """
    A, rhs = problem.normal_equations()
    if problem.lam == 0 and np.linalg.matrix_rank(problem.design) < problem.n_nodes:
        raise SingularSystemError(
            f"S^T S is singular (rank < K={problem.n_nodes}) and lam = 0")
    try:
        factor = scipy.linalg.cho_factor(A, lower=True, check_finite=False)
    except np.linalg.LinAlgError as err:
        raise SingularSystemError(f"normal equations not positive definite: {err}") from err
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


def training_loss(problem, amplitudes):
    """ N^-1 |S a - y|^2 + lam |a|^2 """
    a = np.asarray(amplitudes, dtype=np.float64).reshape(-1)
    if a.shape[0] != problem.n_nodes:
        raise ValueError(f"{a.shape[0]} amplitudes for a problem with K={problem.n_nodes}")
    err = problem.design @ a - problem.targets
    return float((err**2).mean() + problem.lam * (a**2).sum())


def fit_amplitudes(design, targets, lam):
    """ shorthand for solve_amplitudes(LsProblem(design, targets, lam)) """
    return solve_amplitudes(LsProblem(design, targets, lam))

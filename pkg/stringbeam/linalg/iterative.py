"""
Iterative spectral solvers built on banded LU solves.

- InnerProduct: the weighted inner product <x, y>_M = x^H M y, with M
  applied by sparse product and inverted through a banded factorization.
- smallest_singular_value: block inverse iteration on the M-weighted normal
  operator (B^* B)^{-1} = B^{-1} M^{-1} B^{-H} M, with Rayleigh-Ritz
  extraction of the largest Ritz value.
- shift_invert_eigs: subspace iteration on (shift - A)^{-1}; converged Ritz
  pairs are carried, the subspace grows when residuals stall.

Start vectors come from numpy Generators seeded by the caller, so results do
not depend on evaluation order or thread count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from stringbeam.linalg.banded import LUFactors, factor_sparse, lu_solve
from stringbeam.utils.constants import (
    EIG_SUBSPACE_GROWTH,
    EIG_SUBSPACE_MARGIN,
    EIG_TOL,
    MAX_ITERATIONS,
    MAX_RESTARTS,
    NORM_ITERATIONS,
    STAGNATION_WINDOW,
    SVD_BLOCK_SIZE,
    SVD_TOL,
)
from stringbeam.utils.errors import NoConvergence
from stringbeam.utils.validators import DimensionMismatch, PreconditionViolation

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class InnerProduct:
    """Weighted inner product; `matrix is None` means Euclidean."""

    dim: int
    matrix: sp.csr_matrix | None = None
    factors: LUFactors | None = None

    @classmethod
    def euclidean(cls, dim: int) -> InnerProduct:
        return cls(dim=dim)

    @classmethod
    def from_matrix(cls, m, ordering: np.ndarray | None = None) -> InnerProduct:
        """Wrap an SPD Gram matrix; `ordering` makes it banded for the factorization."""
        matrix = sp.csr_matrix(m)
        if matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatch(f"Gram matrix must be square (got {matrix.shape})")
        return cls(dim=matrix.shape[0], matrix=matrix, factors=factor_sparse(matrix, ordering))

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.matrix is None:
            return np.array(x, copy=True)
        return self.matrix @ x

    def solve(self, x: np.ndarray) -> np.ndarray:
        if self.factors is None:
            return np.array(x, copy=True)
        return lu_solve(self.factors, x)

    def dot(self, x: np.ndarray, y: np.ndarray) -> complex:
        return complex(np.vdot(x, self.apply(y)))

    def gram(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        return left.conj().T @ self.apply(right)

    def norm(self, x: np.ndarray) -> float:
        return float(np.sqrt(max(self.dot(x, x).real, 0.0)))


def _random_block(rng: np.random.Generator, dim: int, size: int) -> np.ndarray:
    return rng.standard_normal((dim, size)) + 1j * rng.standard_normal((dim, size))


def _orthonormalize(block: np.ndarray, inner: InnerProduct) -> np.ndarray:
    """Columns orthonormal in the weighted inner product (Cholesky of the Gram matrix)."""
    gram = inner.gram(block, block)
    gram = 0.5 * (gram + gram.conj().T)
    chol = np.linalg.cholesky(gram)
    return sla.solve_triangular(chol, block.conj().T, lower=True).conj().T


def smallest_singular_value(
    solve_with: LUFactors,
    weight: InnerProduct | None = None,
    tol: float = SVD_TOL,
    max_iter: int = MAX_ITERATIONS,
    *,
    seed: int | None = None,
    block: int = SVD_BLOCK_SIZE,
) -> tuple[float, int]:
    """
    Smallest singular value of B in the M-norm, given the LU factors of B.

    Args:
        solve_with: Factorization of B
        weight: Inner product defining the norm (Euclidean when None)
        tol: Relative change of the leading Ritz value that ends the iteration
        max_iter: Iteration budget shared by all restarts
        seed: Seed of the random start block
        block: Block size of the inverse iteration

    Returns:
        (sigma_min, iterations)

    Raises:
        NoConvergence: If the budget is exhausted
    """
    n = solve_with.n
    inner = weight if weight is not None else InnerProduct.euclidean(n)
    if inner.dim != n:
        raise DimensionMismatch(f"Weight of dimension {inner.dim} for a factorization of {n}")

    def apply_inverse_normal(x: np.ndarray) -> np.ndarray:
        y = lu_solve(solve_with, inner.apply(x), trans="C")
        return lu_solve(solve_with, inner.solve(y))

    rng = np.random.default_rng(seed)
    size = max(1, min(block, n))
    basis = _orthonormalize(_random_block(rng, n, size), inner)
    previous = None
    restarts = 0

    for iteration in range(1, max_iter + 1):
        image = apply_inverse_normal(basis)
        projected = inner.gram(basis, image)
        values, vectors = np.linalg.eigh(0.5 * (projected + projected.conj().T))
        top = float(values[-1])

        stalled = not np.isfinite(top) or top <= 0.0
        if not stalled and previous is not None:
            if abs(top - previous) <= tol * top:
                logger.debug(f"sigma_min converged after {iteration} iterations ({restarts} restarts)")
                return 1.0 / np.sqrt(top), iteration
            # Ritz values of a positive self-adjoint operator only grow
            stalled = top < previous * (1.0 - tol)

        if not stalled:
            try:
                basis = _orthonormalize(image @ vectors[:, ::-1], inner)
                previous = top
                continue
            except np.linalg.LinAlgError:
                pass

        restarts += 1
        if restarts > MAX_RESTARTS:
            break
        logger.warning(f"sigma_min iteration stagnated at step {iteration}; restarting")
        basis = _orthonormalize(_random_block(rng, n, size), inner)
        previous = None

    raise NoConvergence(f"Smallest singular value did not converge in {max_iter} iterations")


def _residual_norm(apply_operator, inner: InnerProduct, vector: np.ndarray, value: complex) -> float:
    """||A x - lambda x||_M / ||x||_M."""
    residual = apply_operator(vector) - value * vector
    return inner.norm(residual) / inner.norm(vector)


def shift_invert_eigs(
    apply_inverse: Callable[[np.ndarray], np.ndarray],
    shift: complex,
    k: int,
    tol: float = EIG_TOL,
    *,
    apply_operator: Callable[[np.ndarray], np.ndarray],
    dim: int,
    inner: InnerProduct | None = None,
    max_iter: int = MAX_ITERATIONS,
    seed: int | None = None,
    subspace: int | None = None,
) -> list[tuple[complex, float]]:
    """
    The k eigenvalues of A nearest `shift`, nearest first.

    Every iteration applies the inverse to a freshly orthonormalized basis.
    Converged Ritz pairs are carried unchanged wherever they sit in the
    ordering; the others take one power step. When the worst unconverged
    residual fails to halve for STAGNATION_WINDOW iterations, k random
    columns are appended, up to EIG_SUBSPACE_GROWTH times the start size.

    Args:
        apply_inverse: X -> (shift - A)^{-1} X, column-wise
        shift: Target point in the complex plane
        k: Number of eigenvalues wanted
        tol: Absolute residual bound ||A x - lambda x||_M <= tol * ||x||_M
        apply_operator: x -> A x, used for the residual contract
        dim: Dimension of A
        inner: Inner product of the residual norm (Euclidean when None)
        max_iter: Iteration budget
        seed: Seed of the random start block and of any added columns
        subspace: Start size (default max(2k, k + EIG_SUBSPACE_MARGIN), capped at dim)

    Returns:
        List of (eigenvalue, residual norm)

    Raises:
        NoConvergence: If the k pairs do not all converge
    """
    if k < 1 or k > dim:
        raise PreconditionViolation(f"Need 1 <= k <= {dim} (got {k})")
    inner = inner if inner is not None else InnerProduct.euclidean(dim)
    size = subspace if subspace is not None else max(2 * k, k + EIG_SUBSPACE_MARGIN)
    size = max(k, min(size, dim))
    ceiling = max(size, min(dim, EIG_SUBSPACE_GROWTH * size))

    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(_random_block(rng, dim, size))
    best = np.inf
    stalled = 0

    for iteration in range(1, max_iter + 1):
        image = apply_inverse(basis)
        mu, vectors = sla.eig(basis.conj().T @ image)
        order = np.argsort(-np.abs(mu), kind="stable")
        mu, vectors = mu[order], vectors[:, order]
        ritz = basis @ vectors
        ritz_image = image @ vectors

        with np.errstate(divide="ignore", invalid="ignore"):
            values = shift - 1.0 / mu[:k]
        residuals = np.array([
            _residual_norm(apply_operator, inner, ritz[:, j], values[j])
            if np.isfinite(values[j]) else np.inf
            for j in range(k)
        ])
        converged = residuals <= tol
        if converged.all():
            logger.debug(f"shift {shift}: {k} eigenvalues after {iteration} iterations "
                         f"(subspace {basis.shape[1]})")
            return [(complex(v), float(r)) for v, r in zip(values, residuals)]

        carry = np.zeros(basis.shape[1], dtype=bool)
        carry[:k] = converged
        block = np.where(carry, ritz, ritz_image)

        worst = float(residuals[~converged].max())
        if worst < 0.5 * best:
            best, stalled = worst, 0
        else:
            stalled += 1
        if stalled >= STAGNATION_WINDOW and block.shape[1] < ceiling:
            extra = min(k, ceiling - block.shape[1])
            block = np.hstack([block, _random_block(rng, dim, extra)])
            logger.debug(f"shift {shift}: residual stalled at {worst:.2e}; "
                         f"subspace grown to {block.shape[1]}")
            best, stalled = np.inf, 0
        basis, _ = np.linalg.qr(block)

    raise NoConvergence(f"Eigenvalues near {shift} did not converge in {max_iter} iterations", shift=shift)


def weighted_operator_norm(
    operator: sp.spmatrix,
    inner: InnerProduct,
    iterations: int = NORM_ITERATIONS,
    seed: int = 0,
) -> float:
    """
    Power-iteration estimate of ||A||_M, the M-weighted operator norm.

    Iterates on A^* A with the adjoint A^* = M^{-1} A^T M. The estimate is a
    lower bound that is within a few percent after a few dozen steps.
    """
    if operator.shape != (inner.dim, inner.dim):
        raise DimensionMismatch(f"Operator of shape {operator.shape} for a weight of dimension {inner.dim}")
    x = np.random.default_rng(seed).standard_normal(inner.dim)
    x /= inner.norm(x)
    estimate = 0.0
    for _ in range(iterations):
        y = operator @ x
        estimate = inner.norm(y)
        x = inner.solve(operator.T @ inner.apply(y))
        size = inner.norm(x)
        if size == 0.0:
            break
        x /= size
    return estimate

"""
Banded LU factorization with partial pivoting.

Thin layer over the LAPACK general-band routines (gbtrf/gbtrs) obtained
through scipy.linalg.lapack.get_lapack_funcs, so real and complex matrices
share one code path. A BandedMatrix may carry a symmetric permutation
(`ordering`) under which the stored matrix is banded; solves accept and
return vectors in the original ordering.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg.lapack import get_lapack_funcs

from stringbeam.utils.constants import PIVOT_FLOOR
from stringbeam.utils.errors import SingularMatrix
from stringbeam.utils.validators import DimensionMismatch, PreconditionViolation

logger = logging.getLogger(__name__)

_TRANS_CODES = {"N": 0, "T": 1, "C": 2}


def _inverse_permutation(ordering: np.ndarray) -> np.ndarray:
    inverse = np.empty_like(ordering)
    inverse[ordering] = np.arange(ordering.size)
    return inverse


@dataclass(frozen=True, eq=False)
class BandedMatrix:
    """
    Square matrix in general-band storage.

    data[upper + i - j, j] holds stored[i, j], the layout used by
    scipy.linalg.solve_banded; stored = a[ordering][:, ordering].
    """

    data: np.ndarray
    lower: int
    upper: int
    ordering: np.ndarray | None = None

    def __post_init__(self):
        bands, n = self.data.shape
        if bands != self.lower + self.upper + 1:
            raise PreconditionViolation(
                f"Band storage has {bands} rows, expected {self.lower + self.upper + 1}"
            )
        if n > 0 and (self.lower >= n or self.upper >= n):
            raise PreconditionViolation(
                f"Bandwidths ({self.lower}, {self.upper}) must be below the dimension {n}"
            )
        if self.ordering is not None and self.ordering.shape != (n,):
            raise DimensionMismatch(f"Ordering of length {self.ordering.size} for dimension {n}")

    @property
    def rows(self) -> int:
        return self.data.shape[1]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.data)

    @property
    def storage_size(self) -> int:
        return self.data.size

    @classmethod
    def from_sparse(cls, a, ordering: np.ndarray | None = None) -> BandedMatrix:
        """Pack a square sparse (or dense) matrix, optionally permuted by `ordering`."""
        coo = sp.coo_matrix(a)
        n, m = coo.shape
        if n != m:
            raise PreconditionViolation(f"Banded LU needs a square matrix (got {n}x{m})")

        keep = coo.data != 0
        rows, cols, values = coo.row[keep], coo.col[keep], coo.data[keep]
        if ordering is not None:
            ordering = np.asarray(ordering, dtype=np.intp)
            inverse = _inverse_permutation(ordering)
            rows, cols = inverse[rows], inverse[cols]

        offsets = rows - cols
        lower = int(max(offsets.max(initial=0), 0))
        upper = int(max((-offsets).max(initial=0), 0))
        dtype = np.complex128 if np.iscomplexobj(values) else np.float64
        data = np.zeros((lower + upper + 1, n), dtype=dtype)
        np.add.at(data, (upper + rows - cols, cols), values)
        return cls(data=data, lower=lower, upper=upper, ordering=ordering)

    @classmethod
    def from_dense(cls, a: np.ndarray) -> BandedMatrix:
        """Dense entry point, used by the small-scale oracle comparisons."""
        return cls.from_sparse(sp.coo_matrix(np.asarray(a)))

    def to_dense(self) -> np.ndarray:
        n = self.cols
        stored = np.zeros((n, n), dtype=self.data.dtype)
        for offset in range(-self.upper, self.lower + 1):
            # offset = i - j
            j = np.arange(max(0, -offset), min(n, n - offset))
            stored[j + offset, j] = self.data[self.upper + offset, j]
        if self.ordering is None:
            return stored
        dense = np.empty_like(stored)
        dense[np.ix_(self.ordering, self.ordering)] = stored
        return dense


@dataclass(frozen=True, eq=False)
class LUFactors:
    """Packed gbtrf output: U in the top kl+ku+1 rows, multipliers below."""

    lu: np.ndarray
    pivots: np.ndarray
    lower: int
    upper: int
    ordering: np.ndarray | None
    growth: float

    @property
    def n(self) -> int:
        return self.lu.shape[1]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.lu)

    def reconstruct(self) -> np.ndarray:
        """Dense P*L*U in the original ordering (equals the factored matrix)."""
        kl, ku, n = self.lower, self.upper, self.n
        diag_row = kl + ku
        product = np.zeros((n, n), dtype=self.lu.dtype)
        for j in range(n):
            first = max(0, j - diag_row)
            r = np.arange(first, j + 1)
            product[r, j] = self.lu[diag_row + r - j, j]

        for j in range(n - 1, -1, -1):
            count = min(kl, n - j - 1)
            if count:
                multipliers = self.lu[diag_row + 1:diag_row + 1 + count, j]
                product[j + 1:j + 1 + count, :] += np.outer(multipliers, product[j, :])
            p = int(self.pivots[j])
            if p != j:
                product[[j, p], :] = product[[p, j], :]

        if self.ordering is None:
            return product
        dense = np.empty_like(product)
        dense[np.ix_(self.ordering, self.ordering)] = product
        return dense


def lu_factor(a: BandedMatrix) -> LUFactors:
    """
    Partial-pivoted LU factorization of a banded matrix.

    Args:
        a: Square banded matrix

    Returns:
        LUFactors with a growth-factor estimate max|U| / max|A|

    Raises:
        SingularMatrix: If a pivot magnitude falls below 1e-300
    """
    kl, ku, n = a.lower, a.upper, a.cols
    work = np.zeros((2 * kl + ku + 1, n), dtype=a.data.dtype)
    work[kl:, :] = a.data

    gbtrf, = get_lapack_funcs(("gbtrf",), (work,))
    lu, pivots, info = gbtrf(work, kl, ku, overwrite_ab=True)
    if info < 0:
        raise PreconditionViolation(f"gbtrf rejected argument {-info}")

    diagonal = np.abs(lu[kl + ku, :])
    smallest = float(diagonal.min()) if n else np.inf
    if info > 0 or smallest < PIVOT_FLOOR:
        column = int(np.argmin(diagonal)) if n else -1
        raise SingularMatrix(f"Pivot {smallest:.3e} in column {column} is below {PIVOT_FLOOR:g}")

    scale = float(np.abs(a.data).max()) if a.data.size else 1.0
    growth = float(np.abs(lu[:kl + ku + 1, :]).max()) / scale if scale > 0 else 1.0
    logger.debug(f"Banded LU: n={n}, kl={kl}, ku={ku}, growth={growth:.3e}")
    return LUFactors(lu=lu, pivots=pivots, lower=kl, upper=ku, ordering=a.ordering, growth=growth)


def factor_sparse(a, ordering: np.ndarray | None = None) -> LUFactors:
    """Shorthand for lu_factor(BandedMatrix.from_sparse(a, ordering))."""
    return lu_factor(BandedMatrix.from_sparse(a, ordering))


def _gbtrs(factors: LUFactors, rhs: np.ndarray, trans: str) -> np.ndarray:
    gbtrs, = get_lapack_funcs(("gbtrs",), (factors.lu,))
    x, info = gbtrs(factors.lu, factors.lower, factors.upper, rhs, factors.pivots,
                    trans=_TRANS_CODES[trans])
    if info != 0:
        raise PreconditionViolation(f"gbtrs rejected argument {-info}")
    return x


def lu_solve(f: LUFactors, b, trans: str = "N") -> np.ndarray:
    """
    Solve A x = b (trans="N"), A^T x = b ("T") or A^H x = b ("C").

    b may be a vector or a matrix of right-hand sides. A real factorization
    applied to complex data solves the real and imaginary parts separately.

    Raises:
        DimensionMismatch: If b does not have f.n rows
    """
    if trans not in _TRANS_CODES:
        raise PreconditionViolation(f"trans must be one of N, T, C (got {trans!r})")
    b = np.asarray(b)
    if b.ndim not in (1, 2) or b.shape[0] != f.n:
        raise DimensionMismatch(f"Right-hand side of shape {b.shape} for dimension {f.n}")

    vector = b.ndim == 1
    rhs = b.reshape(f.n, -1)
    if f.ordering is not None:
        rhs = rhs[f.ordering]

    if np.iscomplexobj(rhs) and not f.is_complex:
        x = _gbtrs(f, np.array(rhs.real, dtype=np.float64, order="F"), trans) \
            + 1j * _gbtrs(f, np.array(rhs.imag, dtype=np.float64, order="F"), trans)
    else:
        x = _gbtrs(f, np.array(rhs, dtype=f.lu.dtype, order="F"), trans)

    if f.ordering is not None:
        unpermuted = np.empty_like(x)
        unpermuted[f.ordering] = x
        x = unpermuted
    return x[:, 0] if vector else x

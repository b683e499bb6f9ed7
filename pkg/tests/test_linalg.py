"""Tests for banded LU, iterative spectral solvers and line fits."""

import numpy as np
import pytest
import scipy.linalg as sla
import scipy.sparse as sp


def _banded(rng, n, lower, upper, complex_values=False):
    offsets = list(range(-lower, upper + 1))
    diagonals = []
    for k in offsets:
        values = rng.standard_normal(n - abs(k))
        if complex_values:
            values = values + 1j * rng.standard_normal(n - abs(k))
        diagonals.append(values)
    a = sp.diags(diagonals, offsets, format='csr')
    return a + sp.identity(n) * 4.0


def _with_singular_values(rng, values):
    n = len(values)
    u, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    v, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return u @ np.diag(values) @ v.conj().T


@pytest.mark.unit
class TestBandedLU:
    """Tests for the LAPACK band factorization wrapper."""

    @pytest.mark.parametrize('complex_values', [False, True])
    def test_solve_matches_dense(self, rng, complex_values):
        """Test banded solves agree with numpy on random band matrices."""
        from stringbeam.linalg import factor_sparse, lu_solve
        a = _banded(rng, 40, 3, 2, complex_values)
        b = rng.standard_normal(40) + 1j * rng.standard_normal(40)
        x = lu_solve(factor_sparse(a), b)
        assert np.allclose(x, np.linalg.solve(a.toarray(), b), rtol=1e-10, atol=1e-12)

    def test_bandwidths_detected(self, rng):
        """Test (kl, ku) are read off the sparsity pattern."""
        from stringbeam.linalg import BandedMatrix
        a = _banded(rng, 20, 3, 2)
        band = BandedMatrix.from_sparse(a)
        assert (band.lower, band.upper) == (3, 2)
        assert np.allclose(band.to_dense(), a.toarray())

    def test_ordering_roundtrip(self, rng):
        """Test a permuted matrix is stored banded and solved in original order."""
        from stringbeam.linalg import BandedMatrix, factor_sparse, lu_solve
        base = _banded(rng, 30, 1, 1)
        perm = rng.permutation(30)
        scrambled = base[perm][:, perm]
        ordering = np.argsort(perm)
        band = BandedMatrix.from_sparse(scrambled, ordering)
        assert band.lower <= 1 and band.upper <= 1
        assert np.allclose(band.to_dense(), scrambled.toarray())
        b = rng.standard_normal(30)
        x = lu_solve(factor_sparse(scrambled, ordering), b)
        assert np.allclose(scrambled @ x, b, atol=1e-10)

    @pytest.mark.parametrize('trans', ['T', 'C'])
    def test_transposed_solves(self, rng, trans):
        """Test A^T and A^H solves."""
        from stringbeam.linalg import factor_sparse, lu_solve
        a = _banded(rng, 25, 2, 3, complex_values=True).toarray()
        b = rng.standard_normal(25) + 1j * rng.standard_normal(25)
        x = lu_solve(factor_sparse(a), b, trans=trans)
        op = a.T if trans == 'T' else a.conj().T
        assert np.allclose(op @ x, b, atol=1e-10)

    def test_matrix_right_hand_side(self, rng):
        """Test several right-hand sides at once."""
        from stringbeam.linalg import factor_sparse, lu_solve
        a = _banded(rng, 15, 1, 2)
        b = rng.standard_normal((15, 4))
        x = lu_solve(factor_sparse(a), b)
        assert x.shape == (15, 4)
        assert np.allclose(a @ x, b, atol=1e-10)

    def test_reconstruction(self, rng):
        """Test P*L*U reproduces the factored matrix."""
        from stringbeam.linalg import factor_sparse
        a = _banded(rng, 18, 2, 1, complex_values=True)
        factors = factor_sparse(a)
        assert np.allclose(factors.reconstruct(), a.toarray(), atol=1e-12)
        assert factors.growth > 0.0

    def test_singular_matrix(self):
        """Test a zero pivot raises SingularMatrix."""
        from stringbeam.linalg import factor_sparse
        from stringbeam.utils.errors import SingularMatrix
        with pytest.raises(SingularMatrix):
            factor_sparse(sp.diags([1.0, 0.0, 2.0, 3.0]))

    def test_dimension_mismatch(self, rng):
        """Test a wrong-length right-hand side is refused."""
        from stringbeam.linalg import factor_sparse, lu_solve
        from stringbeam.utils.validators import DimensionMismatch
        with pytest.raises(DimensionMismatch):
            lu_solve(factor_sparse(_banded(rng, 10, 1, 1)), np.ones(9))

    def test_non_square_rejected(self):
        """Test rectangular input is refused."""
        from stringbeam.linalg import BandedMatrix
        from stringbeam.utils.validators import PreconditionViolation
        with pytest.raises(PreconditionViolation):
            BandedMatrix.from_sparse(sp.csr_matrix(np.ones((3, 4))))


@pytest.mark.unit
class TestSmallestSingularValue:
    """Tests for block inverse iteration."""

    def test_matches_dense_svd(self, rng):
        """Test Euclidean sigma_min against a dense SVD."""
        from stringbeam.linalg import factor_sparse, smallest_singular_value
        values = np.concatenate([[0.05], np.linspace(1.0, 5.0, 29)])
        b = _with_singular_values(rng, values)
        sigma, iterations = smallest_singular_value(factor_sparse(b), seed=1)
        assert sigma == pytest.approx(0.05, rel=1e-6)
        assert iterations >= 1

    def test_weighted_norm(self, rng):
        """Test the M-weighted sigma_min equals sigma_min(D^1/2 B D^-1/2)."""
        from stringbeam.linalg import InnerProduct, factor_sparse, smallest_singular_value
        values = np.concatenate([[0.2], np.linspace(2.0, 6.0, 23)])
        core = _with_singular_values(rng, values)
        d = rng.uniform(0.5, 2.0, 24)
        b = np.diag(1.0 / np.sqrt(d)) @ core @ np.diag(np.sqrt(d))
        inner = InnerProduct.from_matrix(sp.diags(d))
        sigma, _ = smallest_singular_value(factor_sparse(b), inner, seed=3)
        assert sigma == pytest.approx(0.2, rel=1e-6)

    def test_seed_determinism(self, rng):
        """Test identical seeds give identical results."""
        from stringbeam.linalg import factor_sparse, smallest_singular_value
        factors = factor_sparse(_banded(rng, 20, 1, 1))
        assert smallest_singular_value(factors, seed=9) == smallest_singular_value(factors, seed=9)

    def test_iteration_budget(self, rng):
        """Test NoConvergence when the budget is too small."""
        from stringbeam.linalg import factor_sparse, smallest_singular_value
        from stringbeam.utils.errors import NoConvergence
        factors = factor_sparse(_banded(rng, 20, 1, 1))
        with pytest.raises(NoConvergence):
            smallest_singular_value(factors, max_iter=1, seed=0)


@pytest.mark.unit
class TestShiftInvertEigs:
    """Tests for shift-invert subspace iteration."""

    def test_nearest_eigenvalues(self, rng):
        """Test the eigenvalues nearest a shift on a matrix with known spectrum."""
        from stringbeam.linalg import shift_invert_eigs
        spectrum = np.array([-0.1 + 1j * k for k in range(1, 21)])
        basis = rng.standard_normal((20, 20)) + np.eye(20) * 5.0
        a = basis @ np.diag(spectrum) @ np.linalg.inv(basis)
        shift = 7.2j
        lu = sla.lu_factor(shift * np.eye(20) - a)
        found = shift_invert_eigs(lambda x: sla.lu_solve(lu, x), shift, 2,
                                  apply_operator=lambda x: a @ x, dim=20, seed=4)
        values = sorted((v for v, _ in found), key=lambda v: abs(v - shift))
        assert values[0] == pytest.approx(-0.1 + 7j, abs=1e-6)
        assert values[1] == pytest.approx(-0.1 + 8j, abs=1e-6)
        assert all(r <= 1e-8 for _, r in found)

    def test_bad_k(self):
        """Test k outside [1, dim] is refused."""
        from stringbeam.linalg import shift_invert_eigs
        from stringbeam.utils.validators import PreconditionViolation
        with pytest.raises(PreconditionViolation):
            shift_invert_eigs(lambda x: x, 0.0, 0, apply_operator=lambda x: x, dim=3)

    def test_residual_bound_is_absolute_at_large_shifts(self, rng):
        """Test residuals stay below tol itself when the eigenvalues are far from the origin."""
        from stringbeam.linalg import shift_invert_eigs
        spectrum = np.array([-0.05 + 1j * 50.0 * k for k in range(1, 21)])
        basis = rng.standard_normal((20, 20)) + np.eye(20) * 5.0
        a = basis @ np.diag(spectrum) @ np.linalg.inv(basis)
        shift = 501j
        lu = sla.lu_factor(shift * np.eye(20) - a)
        found = shift_invert_eigs(lambda x: sla.lu_solve(lu, x), shift, 2,
                                  apply_operator=lambda x: a @ x, dim=20, seed=2)
        assert all(r <= 1e-8 for _, r in found)
        assert min(abs(v - (-0.05 + 500j)) for v, _ in found) < 1e-6

    @pytest.mark.slow
    def test_s1_shift_converges(self, params):
        """Test two eigenvalues near 5i converge on the 256-cell S1 generator."""
        from stringbeam.discretization import assemble_generator, build_grids
        from stringbeam.model import S1
        from stringbeam.spectral import eigen_branch
        g = assemble_generator(params, S1, build_grids(params, 256, 256))
        branch = eigen_branch(g, [5j], k_per_shift=2)
        assert len(branch) == 2
        assert np.all(branch.residuals <= 1e-8)
        assert np.all(branch.eigenvalues.real < 0.0)


@pytest.mark.unit
class TestWeightedOperatorNorm:
    """Tests for the power-iteration estimate of the weighted operator norm."""

    def test_known_weighted_norm(self, rng):
        """Test ||A||_M on A = D^(-1/2) B D^(1/2) equals the top singular value of B."""
        from stringbeam.linalg import InnerProduct, weighted_operator_norm
        n = 12
        d = rng.uniform(0.5, 4.0, n)
        u, _ = np.linalg.qr(rng.standard_normal((n, n)))
        v, _ = np.linalg.qr(rng.standard_normal((n, n)))
        b = u @ np.diag(np.concatenate([[5.0], np.linspace(0.5, 3.0, n - 1)])) @ v.T
        a = sp.csr_matrix(np.diag(d ** -0.5) @ b @ np.diag(d ** 0.5))
        estimate = weighted_operator_norm(a, InnerProduct.from_matrix(sp.diags(d)))
        assert estimate == pytest.approx(5.0, abs=1e-6)
        assert estimate <= 5.0 * (1.0 + 1e-10)

    def test_shape_mismatch(self):
        """Test an operator and weight of different dimensions are refused."""
        from stringbeam.linalg import InnerProduct, weighted_operator_norm
        from stringbeam.utils.validators import DimensionMismatch
        with pytest.raises(DimensionMismatch):
            weighted_operator_norm(sp.identity(3, format='csr'), InnerProduct.euclidean(4))


@pytest.mark.unit
class TestFitLine:
    """Tests for least-squares line fits."""

    def test_exact_line(self):
        """Test slope and intercept of exact data."""
        from stringbeam.linalg import fit_line
        fit = fit_line([0.0, 1.0, 2.0, 3.0], [1.0, 3.0, 5.0, 7.0])
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(1.0)
        assert fit.r_squared == pytest.approx(1.0)

    def test_constant_data(self):
        """Test constant ordinates give a flat exact fit."""
        from stringbeam.linalg import fit_line
        fit = fit_line([1.0, 2.0, 3.0], [4.0, 4.0, 4.0])
        assert fit.slope == 0.0 and fit.r_squared == 1.0

    def test_degenerate_abscissae(self):
        """Test a single distinct abscissa raises DegenerateData."""
        from stringbeam.linalg import fit_line
        from stringbeam.utils.errors import DegenerateData
        with pytest.raises(DegenerateData):
            fit_line([2.0, 2.0], [1.0, 3.0])

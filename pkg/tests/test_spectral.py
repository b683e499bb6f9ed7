"""Tests for resolvent scans, eigenvalue branches and the frequency probe."""

import math

import numpy as np
import pytest


def _dense_resolvent_norm(g, beta):
    """M-norm of (i beta - A)^-1 from a dense SVD, M = L L^T."""
    a = g.operator.toarray()
    chol = np.linalg.cholesky(g.gram.toarray())
    shifted = 1j * beta * np.eye(g.dim) - a
    similar = chol.T @ shifted @ np.linalg.inv(chol.T)
    return 1.0 / np.linalg.svd(similar, compute_uv=False).min()


@pytest.fixture
def tiny_generators(params, skewed_params):
    """Both systems on 8 + 8 cells, small enough for dense oracles."""
    from stringbeam.discretization import assemble_generator, build_grids
    from stringbeam.model import S1, S2
    return [
        assemble_generator(p, kind, build_grids(p, 8, 8))
        for p in (params, skewed_params)
        for kind in (S1, S2)
    ]


@pytest.mark.unit
class TestResolventNorm:
    """Tests for r(beta) = ||(i beta - A_h)^-1||_M."""

    @pytest.mark.parametrize('beta', [0.7, 2.3, 9.1])
    def test_matches_dense_oracle(self, tiny_generators, beta):
        """Test the iterative value against a dense SVD."""
        from stringbeam.spectral import resolvent_norm
        for g in tiny_generators:
            assert resolvent_norm(g, beta) == pytest.approx(_dense_resolvent_norm(g, beta), rel=1e-6)

    def test_symmetric_in_beta(self, s2_small):
        """Test r(-beta) = r(beta) for the real generator."""
        from stringbeam.spectral import resolvent_norm
        assert resolvent_norm(s2_small, -3.7) == pytest.approx(resolvent_norm(s2_small, 3.7), rel=1e-6)

    def test_shift_seed_is_stable(self):
        """Test seeds depend only on the shift."""
        from stringbeam.spectral import shift_seed
        assert shift_seed(3.5j) == shift_seed(complex(0.0, 3.5))
        assert shift_seed(3.5j) != shift_seed(3.6j)
        assert 0 <= shift_seed(-1.0 - 2.0j) < 2 ** 63

    def test_shift_on_eigenvalue(self):
        """Test a shift on an eigenvalue raises NearSingularShift."""
        from stringbeam.discretization import BlockGenerator
        from stringbeam.spectral import resolvent_norm
        from stringbeam.utils.errors import NearSingularShift
        g = BlockGenerator.from_matrices(np.array([[0.0, 2.0], [-2.0, 0.0]]))
        with pytest.raises(NearSingularShift):
            resolvent_norm(g, 2.0)


@pytest.mark.unit
class TestResolventScan:
    """Tests for log-spaced scans and growth fits."""

    def test_scan_points(self, s2_small):
        """Test scan abscissae and output rows."""
        from stringbeam.spectral import resolvent_scan
        scan = resolvent_scan(s2_small, 1.0, 50.0, 12, refine_peaks=False)
        assert len(scan) == 12
        assert scan.betas[0] == pytest.approx(1.0)
        assert scan.betas[-1] == pytest.approx(50.0)
        assert np.allclose(np.diff(np.log(scan.betas)), math.log(50.0) / 11)
        assert np.all(scan.norms > 0.0)
        assert scan.beta_resolved == pytest.approx(0.64)

    def test_workers_do_not_change_results(self, s1_small):
        """Test a threaded scan is identical to a serial one."""
        from stringbeam.spectral import resolvent_scan
        serial = resolvent_scan(s1_small, 1.0, 30.0, 10, workers=1)
        threaded = resolvent_scan(s1_small, 1.0, 30.0, 10, workers=2)
        assert np.array_equal(serial.norms, threaded.norms)
        assert np.array_equal(serial.peak_betas, threaded.peak_betas)

    def test_refined_peaks_never_lower(self, s2_small):
        """Test peak refinement only raises the recorded maxima."""
        from stringbeam.spectral import resolvent_scan
        scan = resolvent_scan(s2_small, 1.0, 40.0, 25)
        coarse = resolvent_scan(s2_small, 1.0, 40.0, 25, refine_peaks=False)
        assert len(scan.peak_norms) == len(coarse.peak_norms)
        assert np.all(scan.peak_norms >= coarse.peak_norms)

    def test_single_point(self, s1_small):
        """Test count = 1 evaluates beta_min only."""
        from stringbeam.spectral import resolvent_scan
        scan = resolvent_scan(s1_small, 2.0, 20.0, 1)
        assert scan.betas.tolist() == [2.0]

    def test_bad_range(self, s1_small):
        """Test an empty or non-positive range is refused."""
        from stringbeam.spectral import resolvent_scan
        from stringbeam.utils.validators import ValidationError
        with pytest.raises(ValidationError):
            resolvent_scan(s1_small, 5.0, 5.0, 10)
        with pytest.raises(ValidationError):
            resolvent_scan(s1_small, 0.0, 5.0, 10)

    def test_growth_fit(self):
        """Test the slope of a synthetic power-law scan."""
        from stringbeam.spectral import ResolventScan, fit_resolvent_growth
        betas = np.geomspace(1.0, 100.0, 12)
        scan = ResolventScan(betas=betas, norms=3.0 * betas ** 1.5, iterations=np.ones(12, dtype=int))
        fit = fit_resolvent_growth(scan)
        assert fit.slope == pytest.approx(1.5)
        assert fit.source == 'scan'
        assert 'slope: 1.5' in fit.summary()

    def test_growth_fit_prefers_peaks(self):
        """Test two or more peaks form the envelope."""
        from stringbeam.spectral import ResolventScan, fit_resolvent_growth
        betas = np.geomspace(1.0, 100.0, 10)
        scan = ResolventScan(betas=betas, norms=np.ones(10), iterations=np.ones(10, dtype=int),
                             peak_betas=np.array([2.0, 6.0, 20.0]), peak_norms=np.array([4.0, 12.0, 40.0]))
        fit = fit_resolvent_growth(scan)
        assert fit.source == 'peaks'
        assert fit.slope == pytest.approx(1.0)
        assert fit.points == 3

    def test_growth_fit_window_too_small(self):
        """Test fewer than ten scan points raise WindowTooSmall."""
        from stringbeam.spectral import ResolventScan, fit_resolvent_growth
        from stringbeam.utils.errors import WindowTooSmall
        scan = ResolventScan(betas=np.arange(1.0, 6.0), norms=np.ones(5), iterations=np.ones(5, dtype=int))
        with pytest.raises(WindowTooSmall):
            fit_resolvent_growth(scan)

    def test_top_decade_ratio_needs_resolved_points(self, s2_small):
        """Test a scan entirely beyond the resolved band has no envelope ratio."""
        from stringbeam.spectral import resolvent_scan
        from stringbeam.utils.errors import UnderResolved
        scan = resolvent_scan(s2_small, 1.0, 50.0, 12, refine_peaks=False)
        assert len(scan.resolved_points()[0]) == 0
        with pytest.raises(UnderResolved):
            scan.top_decade_ratio()

    def test_top_decade_ratio_ignores_unresolved_points(self):
        """Test norms above beta_resolved do not enter the ratio."""
        from stringbeam.spectral import ResolventScan
        betas = np.geomspace(1.0, 100.0, 21)
        norms = np.where(betas > 10.5, 1e6, 2.0)
        norms[5] = 1.0
        scan = ResolventScan(betas=betas, norms=norms, iterations=np.ones(21, dtype=int), beta_resolved=10.5)
        assert scan.top_decade_ratio() == pytest.approx(2.0)

    def test_upper_envelope(self):
        """Test one maximum per logarithmic bin, in increasing beta."""
        from stringbeam.spectral import upper_envelope
        betas = np.array([1.0, 1.2, 1.5, 2.0, 2.4, 10.0, 12.0])
        norms = np.array([1.0, 5.0, 2.0, 3.0, 1.0, 7.0, 6.0])
        envelope_betas, envelope_norms = upper_envelope(betas, norms, bins_per_decade=5)
        assert envelope_betas.tolist() == [1.2, 2.0, 10.0]
        assert envelope_norms.tolist() == [5.0, 3.0, 7.0]

    def test_growth_fit_follows_resonances(self):
        """Test dips between resonances do not pull the slope down."""
        from stringbeam.spectral import ResolventScan, fit_resolvent_growth
        betas = np.geomspace(10.0, 100.0, 201)
        dips = np.where(np.arange(201) % 10 == 0, 1.0, 1e-3)
        scan = ResolventScan(betas=betas, norms=betas ** 2.0 * dips, iterations=np.ones(201, dtype=int))
        fit = fit_resolvent_growth(scan)
        assert fit.slope == pytest.approx(2.0, abs=0.15)
        assert len(fit.envelope_betas) == fit.points

    def test_growth_fit_needs_resolved_decades(self):
        """Test a resolved band narrower than half a decade raises UnderResolved."""
        from stringbeam.spectral import ResolventScan, fit_resolvent_growth
        from stringbeam.utils.errors import UnderResolved
        betas = np.geomspace(1.0, 100.0, 30)
        scan = ResolventScan(betas=betas, norms=betas, iterations=np.ones(30, dtype=int), beta_resolved=2.0)
        with pytest.raises(UnderResolved):
            fit_resolvent_growth(scan)

    @pytest.mark.slow
    def test_s1_envelope_is_bounded(self, params):
        """Test the S1 resolvent varies by less than a factor 3 over the resolved top decade."""
        from stringbeam.discretization import assemble_generator, build_grids
        from stringbeam.model import S1
        from stringbeam.spectral import resolvent_scan
        g = assemble_generator(params, S1, build_grids(params, 256, 256))
        scan = resolvent_scan(g, 1.0, 500.0, 60)
        assert scan.beta_resolved == pytest.approx(12.8)
        assert scan.top_decade_ratio() < 3.0

    @pytest.mark.slow
    def test_s2_growth_is_polynomial(self, params):
        """Test the S2 envelope grows like a power of beta between 1 and 2.5."""
        from stringbeam.discretization import assemble_generator, build_grids
        from stringbeam.model import S2
        from stringbeam.spectral import fit_resolvent_growth, resolvent_scan
        g = assemble_generator(params, S2, build_grids(params, 2048, 2048))
        scan = resolvent_scan(g, 10.0, 100.0, 400)
        fit = fit_resolvent_growth(scan)
        assert fit.source == 'peaks'
        assert 1.0 <= fit.slope <= 2.5

    def test_scan_csv(self, s1_small, tmp_path):
        """Test the scan CSV header."""
        from stringbeam.spectral import resolvent_scan
        path = resolvent_scan(s1_small, 1.0, 10.0, 3).to_csv(tmp_path / 'scan.csv')
        lines = path.read_text().splitlines()
        assert lines[0] == 'beta,r'
        assert len(lines) == 4


@pytest.mark.unit
class TestEigenBranch:
    """Tests for shift-invert eigenvalue branches."""

    def test_matches_dense_eigenvalues(self, tiny_generators):
        """Test every eigenvalue found is an eigenvalue of the dense matrix."""
        from stringbeam.spectral import eigen_branch
        for g in tiny_generators:
            dense = np.linalg.eigvals(g.operator.toarray())
            shift = 4.0j
            branch = eigen_branch(g, [shift], k_per_shift=2)
            assert len(branch) >= 1
            for value in branch.eigenvalues:
                assert np.abs(dense - value).min() <= 1e-6 * max(1.0, abs(value))
            nearest = dense[np.argmin(np.abs(dense - shift))]
            assert np.abs(branch.eigenvalues - nearest).min() <= 1e-6 * max(1.0, abs(nearest))

    def test_dissipative_spectrum_in_left_half_plane(self, tiny_generators):
        """Test Re lambda <= 0 for the heated systems."""
        from stringbeam.spectral import eigen_branch, sigma_shifts
        for g in tiny_generators:
            branch = eigen_branch(g, sigma_shifts(1.0, 6.0, 3), k_per_shift=2)
            assert branch.abscissa <= 1e-7 * np.abs(branch.eigenvalues).max()

    def test_conservative_core_is_on_imaginary_axis(self, params):
        """Test the elastic core has purely imaginary eigenvalues."""
        from stringbeam.discretization import assemble_generator, build_grids
        from stringbeam.model import S1
        from stringbeam.spectral import eigen_branch, sigma_shifts
        g = assemble_generator(params, S1, build_grids(params, 8, 8), heat=False)
        branch = eigen_branch(g, sigma_shifts(1.5, 5.5, 3), k_per_shift=2)
        scale = np.maximum(1.0, np.abs(branch.eigenvalues))
        assert np.all(np.abs(branch.eigenvalues.real) <= 1e-6 * scale)

    def test_duplicates_merged(self, s1_small):
        """Test repeated shifts do not duplicate eigenvalues."""
        from stringbeam.spectral import eigen_branch
        once = eigen_branch(s1_small, [3.0j], k_per_shift=2)
        twice = eigen_branch(s1_small, [3.0j, 3.0j], k_per_shift=2)
        assert len(twice) == len(once)

    def test_workers_do_not_change_results(self, s2_small):
        """Test threaded and serial branches agree."""
        from stringbeam.spectral import eigen_branch, sigma_shifts
        shifts = sigma_shifts(2.0, 8.0, 4)
        serial = eigen_branch(s2_small, shifts, workers=1)
        threaded = eigen_branch(s2_small, shifts, workers=2)
        assert np.array_equal(serial.eigenvalues, threaded.eigenvalues)

    def test_sigma_shifts(self):
        """Test shifts are evenly spaced on the imaginary axis."""
        from stringbeam.spectral import sigma_shifts
        assert np.allclose(sigma_shifts(5.0, 10.0, 6), 1j * np.array([5.0, 6.0, 7.0, 8.0, 9.0, 10.0]))

    def test_damping_fit(self):
        """Test Re lambda = -|Im lambda|^-2 gives slope -2."""
        from stringbeam.spectral import EigenBranch
        k = np.array([2.0, 4.0, 8.0, 16.0])
        values = -k ** -2.0 + 1j * k
        branch = EigenBranch(eigenvalues=values, residuals=np.zeros(4), shifts=1j * k)
        assert branch.fit_damping().slope == pytest.approx(-2.0)
        assert branch.abscissa == pytest.approx(-1.0 / 256.0)

    def test_damping_fit_degenerate(self):
        """Test a single usable eigenvalue raises DegenerateData."""
        from stringbeam.spectral import EigenBranch
        from stringbeam.utils.errors import DegenerateData
        branch = EigenBranch(eigenvalues=np.array([-0.1 + 2.0j]), residuals=np.zeros(1),
                             shifts=np.array([2.0j]))
        with pytest.raises(DegenerateData):
            branch.fit_damping()

    def test_abscissa_table(self):
        """Test relative variation and monotonicity of a refinement table."""
        from stringbeam.spectral import AbscissaTable
        table = AbscissaTable(cells=[64, 128, 256], abscissae=[-0.4, -0.2, -0.1], counts=[4, 4, 4])
        assert table.is_increasing()
        assert table.relative_variation() == pytest.approx(1.0)

    def test_abscissa_study(self, params):
        """Test one row per grid on a small refinement study inside the resolved band."""
        from stringbeam.model import S2
        from stringbeam.spectral import spectral_abscissa_study
        table = spectral_abscissa_study(params, S2, [64, 128], sigma_max=3.0, sigma_min=1.0,
                                        shift_count=2, k_per_shift=1)
        assert table.cells == [64, 128]
        assert all(c >= 1 for c in table.counts)
        assert all(a <= 1e-6 for a in table.abscissae)

    def test_abscissa_window_beyond_coarsest_band(self, params):
        """Test a window the coarsest grid cannot resolve raises UnderResolved."""
        from stringbeam.model import S2
        from stringbeam.spectral import spectral_abscissa_study
        from stringbeam.utils.errors import UnderResolved
        with pytest.raises(UnderResolved):
            spectral_abscissa_study(params, S2, [8, 16], sigma_max=4.0, sigma_min=1.0,
                                    shift_count=2, k_per_shift=1)

    def test_s1_eigenvalue_near_resonance(self, params):
        """Test the S1 eigenvalue nearest 2.2i on 64 + 64 cells."""
        from stringbeam.discretization import assemble_generator, build_grids
        from stringbeam.model import S1
        from stringbeam.spectral import eigen_branch
        g = assemble_generator(params, S1, build_grids(params, 64, 64))
        branch = eigen_branch(g, [2.2j], k_per_shift=1)
        assert branch.eigenvalues[0] == pytest.approx(-0.1321 + 2.2048j, abs=1e-3)

    def test_residuals_are_absolute(self, params):
        """Test every returned residual meets ||A x - lambda x||_M <= 1e-8 ||x||_M at high frequency."""
        from stringbeam.discretization import assemble_generator, build_grids
        from stringbeam.model import S2
        from stringbeam.spectral import eigen_branch
        from stringbeam.utils.constants import EIG_TOL
        g = assemble_generator(params, S2, build_grids(params, 64, 64))
        branch = eigen_branch(g, [60j, 80j, 100j], k_per_shift=2)
        assert len(branch) >= 3
        assert np.all(branch.residuals <= EIG_TOL)

    @pytest.mark.slow
    def test_s1_abscissa_is_grid_independent(self, params):
        """Test the S1 abscissa on a fixed window settles under refinement."""
        from stringbeam.model import S1
        from stringbeam.spectral import spectral_abscissa_study
        table = spectral_abscissa_study(params, S1, [64, 128, 256], sigma_max=3.0, sigma_min=1.0,
                                        shift_count=5, k_per_shift=2)
        assert all(-0.07 < a < -0.04 for a in table.abscissae)
        assert table.relative_variation() < 0.01


@pytest.mark.unit
class TestFrequencyProbe:
    """Tests for the S2 frequency probe."""

    def test_required_cells(self, skewed_params):
        """Test the resolution rule n >= 20 w max(ell) / pi."""
        from stringbeam.spectral import required_cells
        assert required_cells(skewed_params, 1.0) == 23
        assert required_cells(skewed_params, 2.0) == 45

    def test_gain_matches_dense_solve(self, params):
        """Test probe gains against a dense resolvent solve."""
        from stringbeam.discretization import assemble_generator, build_grids
        from stringbeam.model import S2
        from stringbeam.spectral import lack_exp_probe, string_forcing
        w = 1.3
        table = lack_exp_probe(params, 1, frequencies=[w])
        g = assemble_generator(params, S2, build_grids(params, table.cells, table.cells))
        f = string_forcing(g, w)
        y = np.linalg.solve(1j * w * np.eye(g.dim) - g.operator.toarray(), f)
        m = g.gram.toarray()
        expected = math.sqrt(np.vdot(y, m @ y).real / np.vdot(f, m @ f).real)
        assert table.gains[0] == pytest.approx(expected, rel=1e-8)

    def test_alpha_exponent_scaling(self, s2_small):
        """Test gains carry the w^-a normalization."""
        from stringbeam.spectral import probe_gains
        plain = probe_gains(s2_small, [2.0, 3.0])
        scaled = probe_gains(s2_small, [2.0, 3.0], alpha_exponent=1.0)
        assert np.allclose(scaled, plain / np.array([2.0, 3.0]))

    def test_forcing_lives_in_string_velocity(self, s2_small):
        """Test the forcing only touches the v block."""
        from stringbeam.discretization import nodal_profiles
        from stringbeam.spectral import string_forcing
        profiles = nodal_profiles(s2_small, string_forcing(s2_small, 2.0))
        assert np.allclose(profiles['u1'][1], 0.0)
        x, v1 = profiles['v1']
        assert np.allclose(v1[1:], -np.sin(2.0 * x[1:]), atol=1e-12)

    def test_sequence_frequencies(self, params):
        """Test the default probe follows the resonant sequence and resolves it."""
        from stringbeam.spectral import lack_exp_probe, required_cells
        table = lack_exp_probe(params, 1)
        assert table.denominators == [1]
        assert table.cells == required_cells(params, table.frequencies.max())
        assert table.exponent is None
        assert table.gains[0] > 0.0

    def test_fixed_grid_too_coarse(self, params):
        """Test a fixed n below the resolution rule raises UnderResolved."""
        from stringbeam.spectral import lack_exp_probe
        from stringbeam.utils.errors import UnderResolved
        with pytest.raises(UnderResolved):
            lack_exp_probe(params, 1, n=8, auto_resolve=False, frequencies=[3.0])

    def test_grid_limit(self, params):
        """Test a frequency needing more than max_cells raises UnderResolved."""
        from stringbeam.spectral import lack_exp_probe
        from stringbeam.utils.errors import UnderResolved
        with pytest.raises(UnderResolved):
            lack_exp_probe(params, 1, frequencies=[3.0], max_cells=16)

    def test_auto_resolve_raises_n(self, params):
        """Test auto_resolve replaces a too-small n."""
        from stringbeam.spectral import lack_exp_probe, required_cells
        table = lack_exp_probe(params, 1, n=8, frequencies=[1.0])
        assert table.cells == required_cells(params, 1.0)

    def test_non_positive_frequency(self, params):
        """Test non-positive frequencies are refused."""
        from stringbeam.spectral import lack_exp_probe
        from stringbeam.utils.validators import PreconditionViolation
        with pytest.raises(PreconditionViolation):
            lack_exp_probe(params, 1, frequencies=[0.0, 1.0])

    def test_table_fit_and_csv(self, tmp_path):
        """Test the fitted exponent and CSV of a probe table."""
        from stringbeam.spectral import ProbeTable
        w = np.array([1.0, 10.0, 100.0])
        table = ProbeTable(frequencies=w, gains=0.5 * w ** 0.75, cells=64, alpha_exponent=0.0)
        assert table.exponent == pytest.approx(0.75)
        path = table.to_csv(tmp_path / 'gains.csv')
        assert path.read_text().splitlines()[0] == 'w,gain'

    @pytest.mark.slow
    def test_gain_grows_along_sequence(self, params):
        """Test gains increase from the first to the third sequence frequency."""
        from stringbeam.spectral import lack_exp_probe
        table = lack_exp_probe(params, 3)
        assert table.denominators == [1, 6, 19]
        assert table.gains[-1] > table.gains[0]

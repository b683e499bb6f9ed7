"""Tests for implicit midpoint stepping, energy traces and decay fits."""

import numpy as np
import pytest


def _synthetic_trace(times, energies):
    from stringbeam.evolution import EnergyTrace
    times = np.asarray(times, dtype=float)
    energies = np.asarray(energies, dtype=float)
    zeros = np.zeros_like(times)
    return EnergyTrace(times=times, energies=energies, dissipations=zeros,
                       dissipated=zeros, dt=float(times[1] - times[0]))


@pytest.mark.unit
class TestImplicitMidpoint:
    """Tests for single steps and full simulations."""

    @pytest.mark.parametrize('dt', [1e-3, 0.1, 5.0])
    def test_step_never_gains_energy(self, small_generators, rng, dt):
        """Test E(y+) - E(y) = -dt D(midpoint) <= 0 for any dt."""
        from stringbeam.discretization import dissipation, energy
        from stringbeam.evolution import step_implicit_midpoint
        for g in small_generators:
            y = rng.standard_normal(g.dim)
            y_next = step_implicit_midpoint(g, y, dt)
            change = energy(g, y_next) - energy(g, y)
            expected = -dt * dissipation(g, 0.5 * (y + y_next))
            assert change <= 1e-12 * energy(g, y)
            assert change == pytest.approx(expected, abs=1e-10 * energy(g, y))

    def test_backward_step_reverses(self, s2_small, rng):
        """Test a backward step undoes a forward step."""
        from stringbeam.evolution import step_implicit_midpoint
        y = rng.standard_normal(s2_small.dim)
        forward = step_implicit_midpoint(s2_small, y, 0.05)
        back = step_implicit_midpoint(s2_small, forward, 0.05, backward=True)
        assert np.allclose(back, y, atol=1e-10)

    def test_non_positive_dt(self, s1_small):
        """Test dt <= 0 is refused."""
        from stringbeam.evolution import step_implicit_midpoint
        from stringbeam.utils.validators import ValidationError
        with pytest.raises(ValidationError):
            step_implicit_midpoint(s1_small, np.zeros(s1_small.dim), 0.0)

    def test_simulate_balance(self, s1_small):
        """Test the telescoped balance E_0 - E_k = dissipated_k."""
        from stringbeam.evolution import Modal, make_initial_data, simulate
        y0 = make_initial_data(s1_small, Modal(k=1))
        trace = simulate(s1_small, y0, dt=0.05, t_end=5.0, stride=4)
        assert trace.energies[0] == pytest.approx(1.0)
        assert trace.balance_residual() < 1e-10
        assert trace.monotonicity_violations() == []
        assert trace.energies[-1] < trace.energies[0]

    def test_simulate_sampling(self, s2_small):
        """Test stride sampling always records the final state."""
        from stringbeam.evolution import RandomSeeded, make_initial_data, simulate
        y0 = make_initial_data(s2_small, RandomSeeded(seed=1))
        trace = simulate(s2_small, y0, dt=0.1, t_end=1.0, stride=3)
        assert trace.metadata['steps'] == 10
        assert trace.times.tolist() == pytest.approx([0.0, 0.3, 0.6, 0.9, 1.0])
        assert trace.t_end == pytest.approx(1.0)
        assert trace.kind == 'S2'

    def test_conservative_core_keeps_energy(self, params):
        """Test the elastic core conserves the energy."""
        from stringbeam.discretization import assemble_generator, build_grids
        from stringbeam.evolution import Modal, make_initial_data, simulate
        from stringbeam.model import S2
        g = assemble_generator(params, S2, build_grids(params, 16, 16), heat=False)
        trace = simulate(g, make_initial_data(g, Modal(k=2)), dt=0.1, t_end=10.0, stride=10)
        assert np.allclose(trace.energies, 1.0, rtol=1e-10)
        assert np.all(trace.dissipated == 0.0)

    def test_step_factors_die_with_generator(self, params):
        """Test cached step factorizations do not keep a generator alive."""
        import gc
        import weakref
        from stringbeam.discretization import assemble_generator, build_grids
        from stringbeam.evolution import Modal, make_initial_data, simulate
        from stringbeam.model import S2
        g = assemble_generator(params, S2, build_grids(params, 16, 16))
        simulate(g, make_initial_data(g, Modal(k=1)), dt=0.1, t_end=1.0, stride=5)
        assert 0.05 in g.step_factors
        ref = weakref.ref(g)
        del g
        gc.collect()
        assert ref() is None

    def test_trapped_flag_in_metadata(self, s1_small, s2_small):
        """Test the trace records whether an S1 grid pair traps beam modes."""
        from stringbeam.evolution import Modal, make_initial_data, simulate
        traces = [simulate(g, make_initial_data(g, Modal(k=1)), dt=0.1, t_end=0.5, stride=5)
                  for g in (s1_small, s2_small)]
        assert traces[0].metadata['beam_trapped'] is True
        assert traces[1].metadata['beam_trapped'] is False

    def test_long_run_balance(self, params):
        """Test the energy balance holds to 1e-8 over ten thousand steps."""
        from stringbeam.discretization import assemble_generator, build_grids
        from stringbeam.evolution import RandomSeeded, make_initial_data, simulate
        from stringbeam.model import S2
        g = assemble_generator(params, S2, build_grids(params, 32, 32))
        trace = simulate(g, make_initial_data(g, RandomSeeded(seed=2)), dt=0.01, t_end=100.0, stride=100)
        assert trace.metadata['steps'] == 10000
        assert trace.balance_residual() < 1e-8
        assert trace.monotonicity_violations() == []

    @pytest.mark.slow
    def test_s1_decays_exponentially(self, params):
        """Test a resolved S1 run on matched grids is classified Exponential."""
        from stringbeam.discretization import assemble_generator, build_grids
        from stringbeam.evolution import DecayModel, Modal, fit_decay, make_initial_data, simulate
        from stringbeam.model import S1
        g = assemble_generator(params, S1, build_grids(params, 512, 16))
        trace = simulate(g, make_initial_data(g, Modal(k=1)), dt=0.02, t_end=100.0, stride=10)
        assert trace.metadata['beam_trapped'] is False
        fit = fit_decay(trace)
        assert fit.model is DecayModel.EXPONENTIAL
        assert fit.rate > 0.05

    @pytest.mark.slow
    def test_s2_decays_polynomially(self, params):
        """Test smooth S2 data decays like a power of t."""
        from stringbeam.discretization import assemble_generator, build_grids
        from stringbeam.evolution import DecayModel, RandomSeeded, fit_decay, make_initial_data, simulate
        from stringbeam.model import S2
        g = assemble_generator(params, S2, build_grids(params, 400, 400))
        y0 = make_initial_data(g, RandomSeeded(seed=3, modes=20))
        trace = simulate(g, y0, dt=0.025, t_end=500.0, stride=20)
        fit = fit_decay(trace, window=(50.0, 500.0))
        assert fit.model is DecayModel.POLYNOMIAL
        assert 0.8 <= fit.rate <= 2.2

    def test_trace_csv(self, s1_small, tmp_path):
        """Test the trace CSV header and row count."""
        from stringbeam.evolution import Modal, make_initial_data, simulate
        from stringbeam.utils.tables import read_csv
        trace = simulate(s1_small, make_initial_data(s1_small, Modal()), dt=0.1, t_end=1.0, stride=5)
        path = trace.to_csv(tmp_path / 'trace.csv')
        assert path.read_text().splitlines()[0] == 't,E,D'
        assert len(read_csv(path)) == len(trace)


@pytest.mark.unit
class TestFitDecay:
    """Tests for exponential against power-law decay fits."""

    def test_exponential_trace(self):
        """Test an exponential trace is classified with its rate."""
        from stringbeam.evolution import DecayModel, fit_decay
        t = np.linspace(0.0, 20.0, 201)
        fit = fit_decay(_synthetic_trace(t, np.exp(-0.7 * t)))
        assert fit.model is DecayModel.EXPONENTIAL
        assert fit.rate == pytest.approx(0.7)
        assert fit.window == (2.0, 20.0)
        assert 'model: Exponential' in fit.summary()

    def test_polynomial_trace(self):
        """Test a power-law trace is classified with its exponent."""
        from stringbeam.evolution import DecayModel, fit_decay
        t = np.linspace(0.0, 200.0, 401)
        fit = fit_decay(_synthetic_trace(t, (t + (t == 0.0)) ** -2.0))
        assert fit.model is DecayModel.POLYNOMIAL
        assert fit.rate == pytest.approx(2.0)
        assert 'exponent:' in fit.summary()
        assert fit.r_squared == pytest.approx(1.0)

    def test_shifted_power_law_is_fitted_in_log_t(self):
        """Test (1 + t)^-1 on [10, 100] is Polynomial with the log-t slope 0.971."""
        from stringbeam.evolution import DecayModel, fit_decay
        t = np.linspace(0.0, 100.0, 1001)
        fit = fit_decay(_synthetic_trace(t, 1.0 / (1.0 + t)), window=(10.0, 100.0))
        assert fit.model is DecayModel.POLYNOMIAL
        assert fit.samples == 901
        assert fit.rate == pytest.approx(0.971, abs=2e-3)

    def test_explicit_window(self):
        """Test the window restricts the samples used."""
        from stringbeam.evolution import fit_decay
        t = np.linspace(0.0, 20.0, 201)
        fit = fit_decay(_synthetic_trace(t, np.exp(-0.3 * t)), window=(4.95, 10.05))
        assert fit.samples == 51

    def test_window_from_zero_skips_initial_sample(self):
        """Test a window starting at 0 fits from the first step on."""
        from stringbeam.evolution import fit_decay
        t = np.linspace(0.0, 10.0, 101)
        fit = fit_decay(_synthetic_trace(t, np.exp(-0.5 * t)), window=(0.0, 10.0))
        assert fit.samples == 100
        assert fit.rate == pytest.approx(0.5)

    def test_window_too_small(self):
        """Test fewer than ten samples raises WindowTooSmall."""
        from stringbeam.evolution import fit_decay
        from stringbeam.utils.errors import WindowTooSmall
        t = np.linspace(0.0, 1.0, 6)
        with pytest.raises(WindowTooSmall):
            fit_decay(_synthetic_trace(t, np.exp(-t)))

    def test_energy_underflow(self):
        """Test zero energies inside the window raise EnergyUnderflow."""
        from stringbeam.evolution import fit_decay
        from stringbeam.utils.errors import EnergyUnderflow
        t = np.linspace(0.0, 10.0, 101)
        energies = np.exp(-t)
        energies[60:] = 0.0
        with pytest.raises(EnergyUnderflow):
            fit_decay(_synthetic_trace(t, energies))


@pytest.mark.unit
class TestInitialData:
    """Tests for initial-data recipes."""

    def test_parse_recipes(self):
        """Test recipe names and options."""
        from stringbeam.evolution import InterfaceBump, Modal, RandomSeeded, parse_recipe
        assert parse_recipe('modal', {'k': 3}) == Modal(k=3)
        assert parse_recipe('RANDOM', {'seed': 7}) == RandomSeeded(seed=7)
        assert parse_recipe('interface_bump') == InterfaceBump()
        assert parse_recipe(None) == Modal(k=1)

    @pytest.mark.parametrize('name, options', [
        ('spiral', {}),
        ('modal', {'k': 0}),
        ('modal', {'seed': 1}),
        ('interface_bump', {'width': -1.0}),
    ])
    def test_bad_recipes(self, name, options):
        """Test unknown names, bad values and unknown options raise BadRecipe."""
        from stringbeam.evolution import parse_recipe
        from stringbeam.utils.validators import BadRecipe
        with pytest.raises(BadRecipe):
            parse_recipe(name, options)

    def test_unit_energy(self, params):
        """Test every recipe is normalized to E = 1."""
        from stringbeam.discretization import assemble_generator, build_grids, energy
        from stringbeam.evolution import InterfaceBump, Modal, RandomSeeded, make_initial_data
        from stringbeam.model import S1, S2
        for kind in (S1, S2):
            g = assemble_generator(params, kind, build_grids(params, 32, 32))
            for recipe in (Modal(k=2), RandomSeeded(seed=3), InterfaceBump()):
                assert energy(g, make_initial_data(g, recipe)) == pytest.approx(1.0)

    def test_modal_shape(self, s1_small):
        """Test the modal recipe only excites the string displacement."""
        from stringbeam.discretization import nodal_profiles
        from stringbeam.evolution import Modal, make_initial_data
        y = make_initial_data(s1_small, Modal(k=1))
        profiles = nodal_profiles(s1_small, y)
        x, u1 = profiles['u1']
        assert np.allclose(u1 / u1.max(), np.sin(x), atol=1e-12)
        assert np.allclose(profiles['v2'][1], 0.0)

    def test_random_is_seeded(self, s2_small):
        """Test equal seeds give equal data."""
        from stringbeam.evolution import RandomSeeded, make_initial_data
        a = make_initial_data(s2_small, RandomSeeded(seed=5))
        b = make_initial_data(s2_small, RandomSeeded(seed=5))
        assert np.array_equal(a, b)

    def test_random_modes_recipe(self, params, s1_small):
        """Test smooth random data parses, normalizes and needs a resolving string grid."""
        from stringbeam.discretization import assemble_generator, build_grids, energy
        from stringbeam.evolution import RandomSeeded, make_initial_data, parse_recipe
        from stringbeam.model import S2
        from stringbeam.utils.validators import BadRecipe
        assert parse_recipe('random', {'seed': 1, 'modes': 3}) == RandomSeeded(seed=1, modes=3)
        g = assemble_generator(params, S2, build_grids(params, 64, 64))
        y = make_initial_data(g, RandomSeeded(seed=1, modes=3))
        assert energy(g, y) == pytest.approx(1.0)
        with pytest.raises(BadRecipe):
            make_initial_data(s1_small, RandomSeeded(seed=1, modes=1))

    def test_unresolved_mode(self, s1_small):
        """Test k >= n1 is refused."""
        from stringbeam.evolution import Modal, make_initial_data
        from stringbeam.utils.validators import BadRecipe
        with pytest.raises(BadRecipe):
            make_initial_data(s1_small, Modal(k=16))

    def test_unresolved_bump(self, s1_small):
        """Test a bump narrower than two cells is refused."""
        from stringbeam.evolution import InterfaceBump, make_initial_data
        from stringbeam.utils.validators import BadRecipe
        with pytest.raises(BadRecipe):
            make_initial_data(s1_small, InterfaceBump(width=0.05))

    def test_explicit_generator_rejected(self):
        """Test recipes need an assembled string/beam generator."""
        from stringbeam.discretization import BlockGenerator
        from stringbeam.evolution import Modal, make_initial_data
        from stringbeam.utils.validators import BadRecipe
        g = BlockGenerator.from_matrices(np.zeros((2, 2)))
        with pytest.raises(BadRecipe):
            make_initial_data(g, Modal())

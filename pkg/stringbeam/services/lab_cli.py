#!/usr/bin/env python3
"""
Command-line front end for the thermoelastic string/beam laboratory.

Runs one experiment per invocation from a JSON config and writes CSV
tables, a text summary, report.txt and a run.json echo of the resolved
configuration into the output directory.

Usage:
    # Energy decay of the default S1 system
    python -m stringbeam.services.lab_cli simulate

    # Resolvent norms along the imaginary axis for an S2 config
    python -m stringbeam.services.lab_cli resolvent-scan --config s2.json --out results/s2

    # Eigenvalues near i[sigma_min, sigma_max] and the abscissa study
    python -m stringbeam.services.lab_cli eigen-branch --config s2.json

    # Characteristic roots and their asymptotics
    python -m stringbeam.services.lab_cli char-roots

    # Gains along the resonant frequency sequence (S2)
    python -m stringbeam.services.lab_cli lack-exp --seed 3

    # Zero resolvent against its closed form (S1)
    python -m stringbeam.services.lab_cli zero-resolvent-check --verbose

Exit codes: 0 success, 2 configuration/validation error, 3 numerical failure.
"""

import argparse
import logging
import math
import sys
from pathlib import Path

# Add parent directory for imports
sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from stringbeam.analytic import (  # noqa: E402
    CharacteristicCoefficients,
    mode_coefficients,
    mode_gain_table,
    resonant_frequencies,
    root_table,
    verify_root_asymptotics,
    write_root_table,
    zero_resolvent_convergence,
)
from stringbeam.discretization import assemble_generator, build_grids, resolved_frequency  # noqa: E402
from stringbeam.evolution import fit_decay, make_initial_data, parse_recipe, simulate  # noqa: E402
from stringbeam.logging_config import get_logger, setup_logging  # noqa: E402
from stringbeam.model import S1, S2  # noqa: E402
from stringbeam.services.experiment_config import ExperimentConfig, load_config  # noqa: E402
from stringbeam.services.reports import RunReport, write_text  # noqa: E402
from stringbeam.spectral import (  # noqa: E402
    eigen_branch,
    fit_resolvent_growth,
    lack_exp_probe,
    probe_gains,
    required_cells,
    resolvent_scan,
    sigma_shifts,
    spectral_abscissa_study,
)
from stringbeam.utils.errors import (  # noqa: E402
    AsymptoticsNotConfirmed,
    DegenerateData,
    NumericalError,
    UnderResolved,
    WindowTooSmall,
)
from stringbeam.utils.validators import ValidationError  # noqa: E402

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# top-decade ratio below which an S1 scan counts as bounded
BOUNDED_RATIO = 3.0
POLYNOMIAL_SLOPE = (1.0, 2.5)


def _generator(config: ExperimentConfig, kind=None, n1=None, n2=None):
    p = config.params
    grids = build_grids(p, n1 or config.grid.n1, n2 or config.grid.n2)
    return assemble_generator(p, kind or config.system, grids, heat=config.grid.heat)


def cmd_simulate(config: ExperimentConfig, report: RunReport):
    """Integrate the energy and fit its decay."""
    settings = config.integrator
    g = _generator(config)
    options = dict(settings.recipe_options)
    if settings.recipe == "random":
        options.setdefault("seed", config.seed)
    y0 = make_initial_data(g, parse_recipe(settings.recipe, options))

    trace = simulate(g, y0, settings.dt, settings.t_end, settings.stride)
    report.add_file(trace.to_csv(report.path("trace.csv")))
    window = tuple(settings.fit_window) if settings.fit_window else None
    fit = fit_decay(trace, window)
    report.add_file(write_text(report.path("decay_fit.txt"), fit.summary()))

    report.add("model", fit.model.value)
    report.add("rate" if fit.model.value == "Exponential" else "exponent", fit.rate)
    report.add("r_squared", fit.r_squared)
    report.add("final_energy", float(trace.energies[-1]))
    report.add("balance_residual", trace.balance_residual())
    report.add("monotonicity_violations", len(trace.monotonicity_violations()))
    report.add("beam_trapped", bool(trace.metadata.get("beam_trapped", False)))


def cmd_resolvent_scan(config: ExperimentConfig, report: RunReport):
    """Resolvent norms on a log-spaced beta grid and the envelope fit."""
    settings = config.scan
    g = _generator(config)
    beta_min, beta_max = config.beta_range
    scan = resolvent_scan(g, beta_min, beta_max, settings.count, settings.workers, settings.refine_peaks)
    report.add_file(scan.to_csv(report.path("scan.csv")))

    report.add("beta_resolved", scan.beta_resolved)
    lines = [f"beta_resolved: {scan.beta_resolved:.10g}"]

    try:
        growth = fit_resolvent_growth(scan)
    except (UnderResolved, WindowTooSmall) as e:
        if config.system is not S1:
            raise
        logger.warning(f"No growth fit: {e}")
        growth = None
    if growth is not None:
        lines.insert(0, growth.summary().rstrip("\n"))
        lines.append("envelope_points:")
        lines.extend(f"  {b:.17g} {r:.17g}" for b, r in zip(growth.envelope_betas, growth.envelope_norms))
        report.add("slope", growth.slope)
        report.add("envelope_points", growth.points)

    if config.system is S1:
        ratio = scan.top_decade_ratio()
        lines.append(f"top_decade_ratio: {ratio:.10g}")
        report.add("top_decade_ratio", ratio)
        verdict = "bounded envelope in the resolved band" if ratio < BOUNDED_RATIO \
            else "unbounded envelope in the resolved band"
    elif POLYNOMIAL_SLOPE[0] <= growth.slope <= POLYNOMIAL_SLOPE[1]:
        verdict = "polynomial growth in the resolved band"
    else:
        verdict = "growth outside the polynomial bracket"
    lines.append(f"verdict: {verdict}")
    report.add("verdict", verdict)
    report.add_file(write_text(report.path("growth_fit.txt"), "\n".join(lines)))


def cmd_eigen_branch(config: ExperimentConfig, report: RunReport):
    """Eigenvalues near the imaginary axis and the abscissa refinement study."""
    settings = config.eigen
    g = _generator(config)
    shifts = sigma_shifts(settings.sigma_min, settings.sigma_max, settings.shift_count)
    branch = eigen_branch(g, shifts, settings.k_per_shift, workers=settings.workers)
    report.add_file(branch.to_csv(report.path("eigs.csv")))
    report.add("eigenvalues", len(branch))
    report.add("resolved_band", resolved_frequency(config.params, config.grid.n1, config.grid.n2))
    report.add("abscissa", branch.abscissa)
    try:
        damping = branch.fit_damping()
        report.add("sigma_fit", -damping.slope)
        report.add("sigma_fit_r_squared", damping.r_squared)
    except DegenerateData as e:
        logger.warning(f"No damping fit: {e}")

    study = spectral_abscissa_study(
        config.params,
        config.system,
        settings.abscissa_grids,
        settings.sigma_max,
        sigma_min=settings.sigma_min,
        shift_count=settings.shift_count,
        k_per_shift=settings.k_per_shift,
        heat=config.grid.heat,
        workers=settings.workers,
    )
    report.add_file(study.to_csv(report.path("abscissa.csv")))
    report.add("abscissa_relative_variation", study.relative_variation())
    report.add("abscissa_increasing", study.is_increasing())


def cmd_char_roots(config: ExperimentConfig, report: RunReport):
    """Cardano roots of the characteristic sextic and their asymptotic deviations."""
    cc = CharacteristicCoefficients.from_params(config.params)
    frequencies = config.roots.frequencies
    roots = root_table(cc, frequencies)
    report.add_file(write_root_table(report.path("roots.csv"), cc, roots))
    report.add("max_residual", max(float(r.sextic_residuals(cc).max()) for r in roots))

    table = verify_root_asymptotics(cc, frequencies)
    report.add_file(table.to_csv(report.path("asymptotics.csv")))
    report.add("asymptotics", table.status)
    report.add("final_deviation", float(table.final().max()))

    sequence = resonant_frequencies(config.params, config.probe.count)
    report.add("target", sequence.target)
    report.add("denominators", " ".join(str(q) for q in sequence.denominators))
    report.add("rational_target", sequence.rational)
    if table.status == "failed":
        raise AsymptoticsNotConfirmed(f"Root deviations are not monotone over w = {list(frequencies)}")


def cmd_lack_exp(config: ExperimentConfig, report: RunReport):
    """S2 gains along the resonant frequency sequence, with the analytic mode system."""
    p, settings = config.params, config.probe
    if config.system is not S2:
        logger.info("lack-exp always probes the S2 system")
    table = lack_exp_probe(p, settings.count, settings.alpha_exponent, n=settings.n,
                           max_cells=settings.max_cells)
    report.add_file(table.to_csv(report.path("gains.csv")))
    report.add("cells", table.cells)

    lines = [f"cells: {table.cells}", f"alpha_exponent: {settings.alpha_exponent:.10g}"]
    exponent = table.exponent
    if exponent is not None:
        fit = table.fit()
        lines += [f"exponent: {fit.slope:.10g}", f"r_squared: {fit.r_squared:.10g}"]
        report.add("exponent", fit.slope)

    if math.isclose(p.ell1, math.pi) and math.isclose(p.ell2, math.pi):
        sequence = resonant_frequencies(p, settings.mode_count)
        modes = mode_gain_table(p, sequence.frequencies, settings.alpha_exponent)
        report.add_file(modes.to_csv(report.path("modes.csv")))
        if len(modes.solutions) >= 2:
            growth = modes.fit_gamma_c1(p.alpha1)
            lines.append(f"gamma_c1_exponent: {growth.slope:.10g}")
            report.add("gamma_c1_exponent", growth.slope)

        w = settings.cross_check_frequency
        analytic = mode_coefficients(p, w, settings.alpha_exponent)
        n = max(required_cells(p, w), 64)
        discrete = probe_gains(_generator(config, S2, n, n), [w], settings.alpha_exponent)[0]
        agreement = abs(discrete - analytic.gain) / analytic.gain
        lines += [
            f"cross_check_w: {w:.10g}",
            f"cross_check_analytic_gain: {analytic.gain:.10g}",
            f"cross_check_discrete_gain: {discrete:.10g}",
            f"cross_check_relative_difference: {agreement:.10g}",
        ]
        report.add("cross_check_relative_difference", agreement)
    else:
        logger.info("Mode system skipped: it needs ell1 = ell2 = pi")
    report.add_file(write_text(report.path("exponent.txt"), "\n".join(lines)))


def cmd_zero_resolvent_check(config: ExperimentConfig, report: RunReport):
    """Grid-refinement study of A_h^-1 against the closed-form S1 solution."""
    settings = config.zero_resolvent
    study = zero_resolvent_convergence(
        config.params, settings.grids, settings.samples, seed=config.seed, amplitude=settings.amplitude,
    )
    report.add_file(study.to_csv(report.path("convergence.csv")))
    report.add("order", study.order if study.order is not None else "n/a")
    report.add("finest_error", study.errors[-1])


command_handlers = {
    "simulate": cmd_simulate,
    "resolvent-scan": cmd_resolvent_scan,
    "eigen-branch": cmd_eigen_branch,
    "char-roots": cmd_char_roots,
    "lack-exp": cmd_lack_exp,
    "zero-resolvent-check": cmd_zero_resolvent_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="JSON experiment config (default: all defaults)")
    common.add_argument("--out", type=str, help="Output directory (overrides config and STRINGBEAM_OUTPUT_DIR)")
    common.add_argument("--seed", type=int, help="Seed for random data (overrides config)")
    common.add_argument("--verbose", action="store_true", help="Debug output on the console")

    parser = argparse.ArgumentParser(
        description="Thermoelastic string/beam laboratory - energy, resolvent and spectral experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    subparsers.add_parser("simulate", parents=[common], help="Energy decay by implicit midpoint")
    subparsers.add_parser("resolvent-scan", parents=[common], help="Resolvent norms along the imaginary axis")
    subparsers.add_parser("eigen-branch", parents=[common], help="Eigenvalues near the imaginary axis")
    subparsers.add_parser("char-roots", parents=[common], help="Characteristic roots and asymptotics")
    subparsers.add_parser("lack-exp", parents=[common], help="Gains along the resonant frequencies (S2)")
    subparsers.add_parser("zero-resolvent-check", parents=[common], help="Zero resolvent vs closed form (S1)")
    return parser


def main(argv=None) -> int:
    """Main CLI entry point; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_OK

    setup_logging(level=logging.DEBUG if args.verbose else logging.INFO)
    handler = command_handlers[args.command]
    report = None

    try:
        config = load_config(args.config, output_dir=args.out, seed=args.seed)
        report = RunReport(args.command, config.output_dir, config.to_dict())
        logger.info(f"Running {args.command} ({config.system.value}) -> {config.output_dir}")
        handler(config, report)
        report.save()
    except ValidationError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error(f"Numerical failure ({type(e).__name__}): {e}")
        if report is not None:
            report.add("status", f"failed ({type(e).__name__}): {e}")
            report.save()
        return EXIT_NUMERICAL
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"Command failed: {e}", exc_info=True)
        return EXIT_FAILURE

    logger.info(f"{args.command} finished")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

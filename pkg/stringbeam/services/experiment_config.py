"""
Experiment configuration: JSON file -> validated ExperimentConfig.

Priority order for the output directory:
1. --out on the command line
2. STRINGBEAM_OUTPUT_DIR environment variable
3. output_dir in the config file
4. ./results

Every section is optional; missing keys take the defaults from
stringbeam.utils.constants. Unknown keys are rejected at every level.

Example:

    {
      "system": "S2",
      "params": {"alpha1": 1.0, "tau2": 0.5},
      "grid": {"n1": null, "n2": 128},
      "integrator": {"dt": 0.005, "t_end": 50, "recipe": "interface_bump"},
      "scan": {"beta_min": 10, "beta_max": 1000, "count": 60},
      "seed": 7
    }
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from stringbeam.discretization import matched_string_cells
from stringbeam.model import MaterialParams, SystemKind, validate_params
from stringbeam.utils.constants import (
    ALLOWED_RECIPES,
    DEFAULT_ABSCISSA_GRIDS,
    DEFAULT_CELLS,
    DEFAULT_CROSS_CHECK_FREQUENCY,
    DEFAULT_DT,
    DEFAULT_EIGS_PER_SHIFT,
    DEFAULT_PROBE_COUNT,
    DEFAULT_RECIPE,
    DEFAULT_ROOT_FREQUENCIES,
    DEFAULT_SCAN_COUNT,
    DEFAULT_SHIFT_COUNT,
    DEFAULT_SIGMA_MAX,
    DEFAULT_SIGMA_MIN,
    DEFAULT_STRIDE,
    DEFAULT_T_END,
    DEFAULT_WORKERS,
    DEFAULT_ZERO_RESOLVENT_GRIDS,
    DEFAULT_ZERO_RESOLVENT_SAMPLES,
    MAX_PROBE_CELLS,
    MIN_CELLS,
    PARAM_NAMES,
    S1_BETA_RANGE,
    S2_BETA_RANGE,
)
from stringbeam.utils.validators import (
    ConfigError,
    ValidationError,
    validate_enum,
    validate_float,
    validate_increasing,
    validate_int,
    validate_range,
)

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = Path("results")
MAX_SEED = 2 ** 64 - 1
MODE_TABLE_COUNT = 6


@dataclass
class GridSettings:
    """`n1 = None` picks the string grid from n2: matched cells for S1, n2 for S2."""

    n1: int | None = DEFAULT_CELLS
    n2: int = DEFAULT_CELLS
    heat: bool = True


@dataclass
class IntegratorSettings:
    dt: float = DEFAULT_DT
    t_end: float = DEFAULT_T_END
    stride: int = DEFAULT_STRIDE
    recipe: str = DEFAULT_RECIPE
    recipe_options: dict[str, Any] = field(default_factory=dict)
    fit_window: list[float] | None = None


@dataclass
class ScanSettings:
    beta_min: float | None = None
    beta_max: float | None = None
    count: int = DEFAULT_SCAN_COUNT
    workers: int = DEFAULT_WORKERS
    refine_peaks: bool = True


@dataclass
class EigenSettings:
    sigma_min: float = DEFAULT_SIGMA_MIN
    sigma_max: float = DEFAULT_SIGMA_MAX
    shift_count: int = DEFAULT_SHIFT_COUNT
    k_per_shift: int = DEFAULT_EIGS_PER_SHIFT
    abscissa_grids: list[int] = field(default_factory=lambda: list(DEFAULT_ABSCISSA_GRIDS))
    workers: int = DEFAULT_WORKERS


@dataclass
class RootSettings:
    frequencies: list[float] = field(default_factory=lambda: list(DEFAULT_ROOT_FREQUENCIES))


@dataclass
class ProbeSettings:
    count: int = DEFAULT_PROBE_COUNT
    alpha_exponent: float = 0.0
    n: int | None = None
    max_cells: int = MAX_PROBE_CELLS
    mode_count: int = MODE_TABLE_COUNT
    cross_check_frequency: float = DEFAULT_CROSS_CHECK_FREQUENCY


@dataclass
class ZeroResolventSettings:
    grids: list[int] = field(default_factory=lambda: list(DEFAULT_ZERO_RESOLVENT_GRIDS))
    samples: int = DEFAULT_ZERO_RESOLVENT_SAMPLES
    amplitude: float = 1.0


SECTIONS = {
    "grid": GridSettings,
    "integrator": IntegratorSettings,
    "scan": ScanSettings,
    "eigen": EigenSettings,
    "roots": RootSettings,
    "probe": ProbeSettings,
    "zero_resolvent": ZeroResolventSettings,
}
TOP_LEVEL_KEYS = {"system", "params", "output_dir", "seed", *SECTIONS}


@dataclass
class ExperimentConfig:
    """Fully resolved experiment settings."""

    system: SystemKind = SystemKind.S1_THERMO_STRING_ELASTIC_BEAM
    params: MaterialParams = field(default_factory=MaterialParams)
    grid: GridSettings = field(default_factory=GridSettings)
    integrator: IntegratorSettings = field(default_factory=IntegratorSettings)
    scan: ScanSettings = field(default_factory=ScanSettings)
    eigen: EigenSettings = field(default_factory=EigenSettings)
    roots: RootSettings = field(default_factory=RootSettings)
    probe: ProbeSettings = field(default_factory=ProbeSettings)
    zero_resolvent: ZeroResolventSettings = field(default_factory=ZeroResolventSettings)
    output_dir: Path = DEFAULT_OUTPUT_DIR
    seed: int = 0

    @property
    def beta_range(self) -> tuple[float, float]:
        default = S1_BETA_RANGE if self.system.heated_string else S2_BETA_RANGE
        low = self.scan.beta_min if self.scan.beta_min is not None else default[0]
        high = self.scan.beta_max if self.scan.beta_max is not None else default[1]
        return low, high

    def to_dict(self) -> dict[str, Any]:
        """Plain JSON-ready dict with every default materialized."""
        data = {
            "system": self.system.value,
            "params": self.params.to_dict(),
            "output_dir": str(self.output_dir),
            "seed": self.seed,
        }
        for name in SECTIONS:
            data[name] = asdict(getattr(self, name))
        data["scan"]["beta_min"], data["scan"]["beta_max"] = self.beta_range
        return data


def _check_keys(data: Any, allowed, where: str) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"'{where}' must be a JSON object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"Unknown key(s) in {where}: {', '.join(unknown)}")
    return data


def _validate_bool(value: Any, name: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"'{name}' must be true or false (got {value!r})")
    return value


def _parse_section(name: str, data: Any):
    cls = SECTIONS[name]
    allowed = [f.name for f in fields(cls)]
    return cls(**_check_keys(data, allowed, name))


def _validate(config: ExperimentConfig) -> ExperimentConfig:
    grid, integ, scan = config.grid, config.integrator, config.scan
    eig, roots, probe, zero = config.eigen, config.roots, config.probe, config.zero_resolvent

    config.params = validate_params(config.params)
    grid.n2 = validate_int(grid.n2, min_val=MIN_CELLS, default=DEFAULT_CELLS, name="grid.n2")
    if grid.n1 is None:
        grid.n1 = matched_string_cells(config.params, grid.n2) if config.system.heated_string else grid.n2
        logger.info(f"grid.n1 not set; using n1={grid.n1} for n2={grid.n2}")
    grid.n1 = validate_int(grid.n1, min_val=MIN_CELLS, name="grid.n1")
    grid.heat = _validate_bool(grid.heat, "grid.heat")

    integ.dt = validate_float(integ.dt, min_val=0.0, strict_min=True, name="integrator.dt")
    integ.t_end = validate_float(integ.t_end, min_val=0.0, strict_min=True, name="integrator.t_end")
    integ.stride = validate_int(integ.stride, min_val=1, name="integrator.stride")
    integ.recipe = validate_enum(integ.recipe, ALLOWED_RECIPES, default=DEFAULT_RECIPE)
    if not isinstance(integ.recipe_options, dict):
        raise ConfigError("'integrator.recipe_options' must be a JSON object")
    if integ.fit_window is not None:
        low, high = validate_range(*_pair(integ.fit_window, "integrator.fit_window"),
                                   name="integrator.fit_window")
        integ.fit_window = [low, high]

    if scan.beta_min is not None or scan.beta_max is not None:
        low, high = config.beta_range
        scan.beta_min, scan.beta_max = validate_range(low, high, name="scan beta range", positive=True)
    scan.count = validate_int(scan.count, min_val=1, name="scan.count")
    scan.workers = validate_int(scan.workers, min_val=1, name="scan.workers")
    scan.refine_peaks = _validate_bool(scan.refine_peaks, "scan.refine_peaks")

    eig.sigma_min = validate_float(eig.sigma_min, min_val=0.0, strict_min=True, name="eigen.sigma_min")
    eig.sigma_max = validate_float(eig.sigma_max, min_val=eig.sigma_min, name="eigen.sigma_max")
    eig.shift_count = validate_int(eig.shift_count, min_val=1, name="eigen.shift_count")
    eig.k_per_shift = validate_int(eig.k_per_shift, min_val=1, name="eigen.k_per_shift")
    eig.abscissa_grids = [validate_int(n, min_val=MIN_CELLS, name="eigen.abscissa_grids")
                          for n in validate_increasing(eig.abscissa_grids, name="eigen.abscissa_grids")]
    eig.workers = validate_int(eig.workers, min_val=1, name="eigen.workers")

    roots.frequencies = validate_increasing(roots.frequencies, name="roots.frequencies")
    if roots.frequencies[0] <= 0.0:
        raise ConfigError("'roots.frequencies' must be positive")

    probe.count = validate_int(probe.count, min_val=1, name="probe.count")
    probe.alpha_exponent = validate_float(probe.alpha_exponent, name="probe.alpha_exponent")
    probe.n = validate_int(probe.n, min_val=MIN_CELLS, name="probe.n")
    probe.max_cells = validate_int(probe.max_cells, min_val=MIN_CELLS, name="probe.max_cells")
    probe.mode_count = validate_int(probe.mode_count, min_val=1, name="probe.mode_count")
    probe.cross_check_frequency = validate_float(probe.cross_check_frequency, min_val=0.0, strict_min=True,
                                                 name="probe.cross_check_frequency")

    zero.grids = [validate_int(n, min_val=MIN_CELLS, name="zero_resolvent.grids")
                  for n in validate_increasing(zero.grids, name="zero_resolvent.grids", min_len=2)]
    zero.samples = validate_int(zero.samples, min_val=1, name="zero_resolvent.samples")
    zero.amplitude = validate_float(zero.amplitude, min_val=0.0, name="zero_resolvent.amplitude")

    config.seed = validate_int(config.seed, min_val=0, max_val=MAX_SEED, name="seed")
    return config


def _pair(values: Any, name: str) -> tuple[Any, Any]:
    if not isinstance(values, (list, tuple)) or len(values) != 2:
        raise ConfigError(f"'{name}' must be a list of two numbers")
    return values[0], values[1]


def config_from_dict(data: dict[str, Any]) -> ExperimentConfig:
    """
    Build and validate an ExperimentConfig from a decoded JSON object.

    Raises:
        ConfigError: For unknown keys or malformed sections
        ValidationError: For out-of-range values (including NonPositiveParameter)
    """
    data = _check_keys(data, TOP_LEVEL_KEYS, "config")
    config = ExperimentConfig()
    try:
        if "system" in data:
            config.system = SystemKind.parse(data["system"])
        if "params" in data:
            config.params = MaterialParams.from_dict(_check_keys(data["params"], PARAM_NAMES, "params"))
        for name in SECTIONS:
            if name in data:
                setattr(config, name, _parse_section(name, data[name]))
        if "output_dir" in data:
            config.output_dir = Path(data["output_dir"])
        if "seed" in data:
            config.seed = data["seed"]
    except TypeError as e:
        raise ConfigError(f"Malformed config: {e}")
    return _validate(config)


def load_config(
    path: str | Path | None = None,
    output_dir: str | Path | None = None,
    seed: int | None = None,
) -> ExperimentConfig:
    """
    Load a JSON experiment file and apply command-line overrides.

    Args:
        path: Config file; None gives the all-defaults config
        output_dir: --out override
        seed: --seed override

    Returns:
        Validated ExperimentConfig

    Raises:
        ConfigError: If the file cannot be read or parsed
        ValidationError: If any value is out of range
    """
    data: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError:
            raise ConfigError(f"Config file not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON in {path}: {e}")
        logger.info(f"Loaded config from {path}")

    config = config_from_dict(data)

    env_dir = os.getenv("STRINGBEAM_OUTPUT_DIR")
    if output_dir is not None:
        config.output_dir = Path(output_dir)
    elif env_dir:
        config.output_dir = Path(env_dir)
    if seed is not None:
        try:
            config.seed = validate_int(seed, min_val=0, max_val=MAX_SEED, name="seed")
        except ValidationError as e:
            raise ConfigError(str(e))
    return config

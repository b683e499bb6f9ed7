"""Initial-data recipes, each normalized to unit discrete energy."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from stringbeam.discretization import BlockGenerator, energy, sample_state
from stringbeam.utils.constants import ALLOWED_RECIPES, POINTS_PER_FREQUENCY
from stringbeam.utils.validators import (
    BadRecipe,
    ValidationError,
    validate_enum,
    validate_float,
    validate_int,
)

logger = logging.getLogger(__name__)

# Width of the interface bump relative to the shorter component
BUMP_WIDTH_FRACTION = 0.1


@dataclass(frozen=True)
class Modal:
    """u1 = sin(k pi x / ell1) on the string, everything else zero."""

    k: int = 1


@dataclass(frozen=True)
class RandomSeeded:
    """
    Seeded random data.

    Without `modes`, every stored DOF gets an independent standard normal
    entry. Such white noise puts most of its energy near the grid cutoff and
    is meant for balance and monotonicity checks, not decay fits.

    With `modes` = K, only the string moves: u1 and v1 are sums of the first
    K sine modes with random signs and energy falling like k^-2, so the data
    stays inside the resolved band.
    """

    seed: int = 0
    modes: int | None = None


@dataclass(frozen=True)
class InterfaceBump:
    """Gaussian displacement centred on the interface, on both components."""

    width: float | None = None


Recipe = Union[Modal, RandomSeeded, InterfaceBump]


def parse_recipe(name: str, options: dict[str, Any] | None = None) -> Recipe:
    """Build a recipe from its config name (modal, random, interface_bump)."""
    options = dict(options or {})
    try:
        name = validate_enum(name, ALLOWED_RECIPES, default="modal")
        if name == "modal":
            recipe = Modal(k=validate_int(options.pop("k", 1), min_val=1, name="k"))
        elif name == "random":
            seed = validate_int(options.pop("seed", 0), min_val=0, name="seed")
            modes = options.pop("modes", None)
            if modes is not None:
                modes = validate_int(modes, min_val=1, name="modes")
            recipe = RandomSeeded(seed=seed, modes=modes)
        else:
            width = validate_float(options.pop("width", None), min_val=0.0, strict_min=True, name="width")
            recipe = InterfaceBump(width=width)
    except ValidationError as e:
        raise BadRecipe(str(e))
    if options:
        raise BadRecipe(f"Unknown option(s) for recipe '{name}': {', '.join(sorted(options))}")
    return recipe


def _modal(g: BlockGenerator, recipe: Modal) -> np.ndarray:
    string_grid, _ = g.grids
    if not isinstance(recipe.k, int) or recipe.k < 1:
        raise BadRecipe(f"Mode number must be a positive integer (got {recipe.k!r})")
    if recipe.k >= string_grid.n:
        raise BadRecipe(f"Mode {recipe.k} is not resolved on {string_grid.n} string cells")
    wavenumber = recipe.k * math.pi / string_grid.length
    return sample_state(g, {"u1": lambda x: np.sin(wavenumber * x)})


def _random(g: BlockGenerator, recipe: RandomSeeded) -> np.ndarray:
    rng = np.random.default_rng(recipe.seed)
    if recipe.modes is None:
        return rng.standard_normal(g.dim)
    string_grid, _ = g.grids
    count = recipe.modes
    if not isinstance(count, int) or count < 1:
        raise BadRecipe(f"Mode count must be a positive integer (got {count!r})")
    if count * POINTS_PER_FREQUENCY > string_grid.n:
        raise BadRecipe(
            f"{count} modes need at least {count * POINTS_PER_FREQUENCY} string cells "
            f"(got {string_grid.n})"
        )
    k = np.arange(1, count + 1)
    wavenumbers = k * math.pi / string_grid.length
    signs = rng.choice([-1.0, 1.0], size=(2, count))
    displacement = signs[0] / (wavenumbers * k)
    velocity = signs[1] / k

    def modes(amplitudes):
        return lambda x: np.sin(np.multiply.outer(x, wavenumbers)) @ amplitudes

    return sample_state(g, {"u1": modes(displacement), "v1": modes(velocity)})


def _bump(g: BlockGenerator, recipe: InterfaceBump) -> np.ndarray:
    string_grid, beam_grid = g.grids
    width = recipe.width
    if width is None:
        width = BUMP_WIDTH_FRACTION * min(string_grid.length, beam_grid.length)
    if not width > 0.0:
        raise BadRecipe(f"Bump width must be positive (got {width!r})")
    if width < 2.0 * max(string_grid.h, beam_grid.h):
        raise BadRecipe(f"Bump width {width:g} is not resolved by the grid")

    def profile(x):
        return np.exp(-(x / width) ** 2)

    return sample_state(g, {"u1": profile, "u2": profile})


def make_initial_data(g: BlockGenerator, recipe: Recipe) -> np.ndarray:
    """
    Build a StateVector from a recipe and scale it to E = 1.

    Raises:
        BadRecipe: For unknown recipes, unresolved modes or zero-energy data
    """
    if g.layout is None:
        raise BadRecipe("Initial-data recipes need an assembled string/beam generator")
    if isinstance(recipe, Modal):
        y = _modal(g, recipe)
    elif isinstance(recipe, RandomSeeded):
        y = _random(g, recipe)
    elif isinstance(recipe, InterfaceBump):
        y = _bump(g, recipe)
    else:
        raise BadRecipe(f"Unknown recipe {recipe!r}")

    e = energy(g, y)
    if not e > 0.0:
        raise BadRecipe(f"Recipe {recipe!r} produced a zero-energy state")
    logger.debug(f"Initial data {recipe!r}: raw energy {e:.6e}")
    return y / math.sqrt(e)

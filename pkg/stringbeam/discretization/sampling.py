"""Sampling continuous profiles onto StateVectors, and back to nodal profiles."""

from __future__ import annotations

import logging
from typing import Callable, Mapping

import numpy as np

from stringbeam.discretization.generator import BlockGenerator, StateLayout
from stringbeam.model import S1
from stringbeam.utils.validators import PreconditionViolation

logger = logging.getLogger(__name__)

Profile = Callable[[np.ndarray], np.ndarray]

PROFILE_KEYS = ("u1", "v1", "u2", "v2", "theta", "q")


def _require_layout(g: BlockGenerator) -> StateLayout:
    if g.layout is None or g.grids is None:
        raise PreconditionViolation("Sampling needs an assembled string/beam generator")
    return g.layout


def heat_coordinates(g: BlockGenerator) -> tuple[np.ndarray, np.ndarray]:
    """Physical x of the stored theta and q values on the heated component."""
    layout = _require_layout(g)
    if not layout.heat:
        return np.empty(0), np.empty(0)
    string_grid, beam_grid = g.grids
    if layout.kind is S1:
        return string_grid.nodes[1:-1], string_grid.dual_nodes
    return beam_grid.nodes[1:-1], beam_grid.dual_nodes


def _evaluate(profile: Profile | None, x: np.ndarray) -> np.ndarray:
    if profile is None:
        return np.zeros_like(x)
    return np.broadcast_to(np.asarray(profile(x)), x.shape)


def _shared_value(g: BlockGenerator, string_value, beam_value):
    """Mass-weighted average of the two one-sided values at the interface."""
    string_grid, beam_grid = g.grids
    left = g.weights.string_velocity * string_grid.h
    right = g.weights.beam_velocity * beam_grid.h
    return (left * string_value + right * beam_value) / (left + right)


def sample_state(g: BlockGenerator, profiles: Mapping[str, Profile]) -> np.ndarray:
    """
    Interpolate component profiles onto a StateVector.

    Args:
        g: Assembled generator
        profiles: Callables of x keyed by u1, v1, u2, v2, theta, q (missing
            keys are zero). theta and q refer to the heated component.

    Returns:
        StateVector (complex if any profile returns complex values)

    Raises:
        PreconditionViolation: For unknown keys or heat profiles without heat blocks
    """
    layout = _require_layout(g)
    unknown = sorted(set(profiles) - set(PROFILE_KEYS))
    if unknown:
        raise PreconditionViolation(f"Unknown profile key(s): {', '.join(unknown)}")
    if not layout.heat and (profiles.get("theta") or profiles.get("q")):
        raise PreconditionViolation("The conservative core has no heat blocks to sample")

    string_grid, beam_grid = g.grids
    x1 = string_grid.nodes[:-1]
    x2 = beam_grid.nodes[:-1]
    columns = {key: None for key in PROFILE_KEYS}
    for key in ("u1", "v1"):
        columns[key] = _evaluate(profiles.get(key), x1)
    for key in ("u2", "v2"):
        columns[key] = _evaluate(profiles.get(key), x2)
    theta_x, q_x = heat_coordinates(g)
    columns["theta"] = _evaluate(profiles.get("theta"), theta_x)
    columns["q"] = _evaluate(profiles.get("q"), q_x)

    dtype = np.result_type(float, *(c.dtype for c in columns.values()))
    y = np.zeros(layout.size, dtype=dtype)
    for block, (left, right) in (("u", ("u1", "u2")), ("v", ("v1", "v2"))):
        values = np.zeros(layout.n_u, dtype=dtype)
        values[layout.string_index[1:]] = columns[left][1:]
        values[layout.beam_index[1:]] = columns[right][1:]
        values[0] = _shared_value(g, columns[left][0], columns[right][0])
        y[layout.block(block)] = values
    if layout.heat:
        y[layout.theta] = columns["theta"]
        y[layout.q] = columns["q"]
    return y


def nodal_profiles(g: BlockGenerator, y: np.ndarray) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """
    Split a StateVector into (x, values) pairs per component.

    Eliminated Dirichlet values are re-inserted, so u1/v1 cover string nodes
    0..n1 and u2/v2 beam nodes 0..n2.
    """
    layout = _require_layout(g)
    y = g.check(y)
    string_grid, beam_grid = g.grids
    result = {}
    for block, left, right in (("u", "u1", "u2"), ("v", "v1", "v2")):
        values = y[layout.block(block)]
        result[left] = (string_grid.nodes, layout.string_profile(values))
        result[right] = (beam_grid.nodes, layout.beam_profile(values))
    if layout.heat:
        _, q_x = heat_coordinates(g)
        heated_grid = string_grid if layout.kind is S1 else beam_grid
        result["theta"] = (heated_grid.nodes, layout.theta_profile(y[layout.theta]))
        result["q"] = (q_x, y[layout.q])
    return result

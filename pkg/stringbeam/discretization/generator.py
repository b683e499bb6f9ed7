"""
Structure-preserving semi-discretization of the two transmission systems.

Unknowns (StateVector, fixed block order):

    [ u | v | theta | q ]

u and v share one global node numbering over both components: index 0 is
the interface displacement shared by u1(0) and u2(0), string nodes
1..n1-1 follow, then beam nodes 1..n2-1. The Dirichlet values u1(ell1) and
u2(ell2) are eliminated. theta and q belong to the heated component:

    S1: theta1 on the string nodes 1..n1-1, q1 on the n1 string cells
    S2: theta2 on the beam nodes 1..n2-1, q2 on the n2 beam cells

Both temperatures carry homogeneous Dirichlet values at the two ends of
their component; the fluxes live on the dual (cell midpoint) grid.

The generator is assembled as

    A = [[ 0,           I,             0,             0          ],
         [ -Mv^-1 S,    0,             Mv^-1 C,       0          ],
         [ 0,           -Wt^-1 C^T,    0,             Wt^-1 H    ],
         [ 0,           0,             -Wq^-1 H^T,    -Wq^-1 R   ]]

with M = diag(S, Mv, Wt, Wq) the energy Gram matrix. Then M A + (M A)^T
equals -2 diag(0, 0, 0, R) entry by entry, which is the discrete
dissipation identity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from stringbeam.discretization.grids import Grid1D
from stringbeam.linalg import InnerProduct, LUFactors, factor_sparse, lu_solve, weighted_operator_norm
from stringbeam.model import (
    S1,
    SystemKind,
    ValidatedParams,
    WeightSet,
    energy_weights,
    heat_constants,
)
from stringbeam.utils.validators import AssemblyError, DimensionMismatch

logger = logging.getLogger(__name__)

BLOCK_NAMES = ("u", "v", "theta", "q")


@dataclass(frozen=True)
class StateLayout:
    """Sizes, slices and node maps of a StateVector."""

    kind: SystemKind
    n1: int
    n2: int
    heat: bool = True

    @property
    def n_u(self) -> int:
        return self.n1 + self.n2 - 1

    @property
    def n_theta(self) -> int:
        if not self.heat:
            return 0
        return self.n1 - 1 if self.kind is S1 else self.n2 - 1

    @property
    def n_q(self) -> int:
        if not self.heat:
            return 0
        return self.n1 if self.kind is S1 else self.n2

    @property
    def size(self) -> int:
        return 2 * self.n_u + self.n_theta + self.n_q

    @property
    def u(self) -> slice:
        return slice(0, self.n_u)

    @property
    def v(self) -> slice:
        return slice(self.n_u, 2 * self.n_u)

    @property
    def theta(self) -> slice:
        start = 2 * self.n_u
        return slice(start, start + self.n_theta)

    @property
    def q(self) -> slice:
        start = 2 * self.n_u + self.n_theta
        return slice(start, start + self.n_q)

    def block(self, name: str) -> slice:
        return getattr(self, name)

    @property
    def string_index(self) -> np.ndarray:
        """Global u/v index of string nodes 0..n1-1."""
        return np.arange(self.n1)

    @property
    def beam_index(self) -> np.ndarray:
        """Global u/v index of beam nodes 0..n2-1 (node 0 is the shared DOF)."""
        return np.concatenate(([0], np.arange(self.n1, self.n1 + self.n2 - 1)))

    def string_profile(self, values: np.ndarray) -> np.ndarray:
        """Nodal values on string nodes 0..n1, the Dirichlet end re-inserted."""
        return np.append(values[self.string_index], 0.0)

    def beam_profile(self, values: np.ndarray) -> np.ndarray:
        """Nodal values on beam nodes 0..n2, the Dirichlet end re-inserted."""
        return np.append(values[self.beam_index], 0.0)

    def theta_profile(self, values: np.ndarray) -> np.ndarray:
        """theta on all nodes of the heated component, the two Dirichlet ends re-inserted."""
        return np.concatenate(([0.0], values, [0.0]))


def _string_strain(layout: StateLayout, h: float) -> sp.csr_matrix:
    """(u_{i+1} - u_i)/h on the n1 string cells, u at ell1 eliminated."""
    n1 = layout.n1
    rows, cols, vals = [], [], []
    for c in range(n1):
        rows.append(c)
        cols.append(c)
        vals.append(-1.0 / h)
        if c + 1 < n1:
            rows.append(c)
            cols.append(c + 1)
            vals.append(1.0 / h)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n1, layout.n_u))


def _beam_curvature(layout: StateLayout, h: float) -> sp.csr_matrix:
    """
    Second differences on beam nodes 0..n2-1.

    Node 0 uses the ghost reflection u_{-1} = u_1 (zero slope at the
    interface); u at ell2 is eliminated.
    """
    n2 = layout.n2
    index = layout.beam_index
    h2 = h * h
    rows, cols, vals = [0, 0], [index[0], index[1]], [-2.0 / h2, 2.0 / h2]
    for j in range(1, n2):
        rows += [j, j]
        cols += [index[j - 1], index[j]]
        vals += [1.0 / h2, -2.0 / h2]
        if j + 1 < n2:
            rows.append(j)
            cols.append(index[j + 1])
            vals.append(1.0 / h2)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n2, layout.n_u))


def _velocity_mass(layout: StateLayout, weights: WeightSet, h1: float, h2: float) -> np.ndarray:
    mass = np.empty(layout.n_u)
    mass[layout.string_index[1:]] = weights.string_velocity * h1
    mass[layout.beam_index[1:]] = weights.beam_velocity * h2
    mass[0] = 0.5 * (weights.string_velocity * h1 + weights.beam_velocity * h2)
    return mass


def _difference(rows: int, cols: int, h: float) -> sp.csr_matrix:
    """(x_{i+1} - x_i)/h as a rows x cols matrix."""
    return sp.diags(
        [np.full(rows, -1.0 / h), np.full(rows, 1.0 / h)],
        [0, 1],
        shape=(rows, cols),
        format="csr",
    )


def _cell_average(n: int) -> sp.csr_matrix:
    """(x_i + x_{i+1})/2 on n cells from the n-1 interior nodes, both ends zero."""
    return sp.diags(
        [np.full(n - 1, 0.5), np.full(n - 1, 0.5)],
        [0, -1],
        shape=(n, n - 1),
        format="csr",
    )


def _dof_coordinates(layout: StateLayout, h1: float, h2: float) -> np.ndarray:
    """Signed position of every DOF: string at s = -x, beam at s = +x."""
    nodes = np.zeros(layout.n_u)
    nodes[layout.string_index] = -np.arange(layout.n1) * h1
    nodes[layout.beam_index] = np.arange(layout.n2) * h2
    parts = [nodes, nodes]
    if layout.heat:
        if layout.kind is S1:
            parts += [-np.arange(1, layout.n1) * h1, -(np.arange(layout.n1) + 0.5) * h1]
        else:
            parts += [np.arange(1, layout.n2) * h2, (np.arange(layout.n2) + 0.5) * h2]
    return np.concatenate(parts)


def _banded_ordering(layout: StateLayout, h1: float, h2: float) -> np.ndarray:
    """Interleave all unknowns by position so that every operator is banded."""
    coordinates = _dof_coordinates(layout, h1, h2)
    block_ids = np.concatenate([
        np.full(layout.n_u, 0), np.full(layout.n_u, 1),
        np.full(layout.n_theta, 2), np.full(layout.n_q, 3),
    ])
    return np.lexsort((block_ids, np.round(coordinates, 12)))


@dataclass(frozen=True, eq=False)
class BlockGenerator:
    """
    Assembled A_h with its energy Gram matrix M_h and dissipation operator R.

    Hashes by identity. Factorizations of shifted copies (one per time
    step size) are cached on the instance and die with it.
    """

    operator: sp.csr_matrix
    gram: sp.csr_matrix
    dissipation_matrix: sp.csr_matrix
    ordering: np.ndarray | None = None
    layout: StateLayout | None = None
    params: ValidatedParams | None = None
    kind: SystemKind | None = None
    weights: WeightSet | None = None
    grids: tuple[Grid1D, Grid1D] | None = None
    step_factors: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        n = self.operator.shape[0]
        for name in ("operator", "gram", "dissipation_matrix"):
            shape = getattr(self, name).shape
            if shape != (n, n):
                raise AssemblyError(f"{name} has shape {shape}, expected ({n}, {n})")
        if self.layout is not None and self.layout.size != n:
            raise AssemblyError(f"Layout of size {self.layout.size} for an operator of size {n}")

    @classmethod
    def from_matrices(cls, a, m=None, r=None) -> BlockGenerator:
        """Wrap explicit matrices (M = I and R = 0 by default)."""
        a = sp.csr_matrix(a, dtype=float)
        n = a.shape[0]
        m = sp.identity(n, format="csr") if m is None else sp.csr_matrix(m, dtype=float)
        r = sp.csr_matrix((n, n)) if r is None else sp.csr_matrix(r, dtype=float)
        return cls(operator=a, gram=m, dissipation_matrix=r)

    @property
    def dim(self) -> int:
        return self.operator.shape[0]

    @property
    def heat(self) -> bool:
        return self.layout is not None and self.layout.heat

    @cached_property
    def inner_product(self) -> InnerProduct:
        return InnerProduct.from_matrix(self.gram, self.ordering)

    @cached_property
    def operator_norm(self) -> float:
        """Estimate of ||A_h||_M."""
        return weighted_operator_norm(self.operator, self.inner_product)

    @cached_property
    def factors(self) -> LUFactors:
        """Banded LU of A_h itself."""
        return factor_sparse(self.operator, self.ordering)

    @cached_property
    def bandwidths(self) -> tuple[int, int]:
        f = self.factors
        return f.lower, f.upper

    def shifted(self, shift: complex, scale: float = 1.0) -> sp.csr_matrix:
        """shift * I - scale * A_h."""
        return (shift * sp.identity(self.dim, format="csr") - scale * self.operator).tocsr()

    def check(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y)
        if y.shape != (self.dim,):
            raise DimensionMismatch(f"State of shape {y.shape} for a generator of size {self.dim}")
        return y


def assemble_generator(
    p: ValidatedParams,
    kind: SystemKind,
    grids: tuple[Grid1D, Grid1D],
    heat: bool = True,
) -> BlockGenerator:
    """
    Assemble A_h, M_h and R for S1 or S2.

    Args:
        p: Validated material parameters
        kind: Which component carries the heat pair
        grids: (string grid, beam grid) from build_grids
        heat: False drops the heat blocks and leaves the conservative
            elastic core (u, v only)

    Returns:
        BlockGenerator

    Raises:
        AssemblyError: If the grids do not span the parameter lengths
    """
    string_grid, beam_grid = grids
    for grid, length, name in ((string_grid, p.ell1, "string"), (beam_grid, p.ell2, "beam")):
        if not np.isclose(grid.length, length, rtol=1e-12, atol=0.0):
            raise AssemblyError(f"The {name} grid spans {grid.length}, expected {length}")

    n1, n2 = string_grid.n, beam_grid.n
    h1, h2 = string_grid.h, beam_grid.h
    layout = StateLayout(kind=kind, n1=n1, n2=n2, heat=heat)
    weights = energy_weights(p, kind)

    strain = _string_strain(layout, h1)
    curvature = _beam_curvature(layout, h2)
    curvature_quadrature = np.full(n2, h2)
    curvature_quadrature[0] = 0.5 * h2
    stiffness = (
        strain.T @ sp.diags(np.full(n1, weights.string_strain * h1)) @ strain
        + curvature.T @ sp.diags(weights.beam_curvature * curvature_quadrature) @ curvature
    ).tocsr()
    mass = _velocity_mass(layout, weights, h1, h2)
    mass_inv = sp.diags(1.0 / mass)
    identity = sp.identity(layout.n_u, format="csr")

    if not heat:
        operator = sp.bmat([[None, identity], [-mass_inv @ stiffness, None]], format="csr")
        gram = sp.block_diag((stiffness, sp.diags(mass)), format="csr")
        dissipation_matrix = sp.csr_matrix(gram.shape)
    else:
        gamma, delta, tau, kappa = heat_constants(p, kind)
        if kind is S1:
            theta_weights = np.full(n1 - 1, weights.temperature * h1)
            flux_quadrature = np.full(n1, h1)
            # thermal stress beta1*theta1 acts on the cells next to each node
            coupling = (delta * h1) * (strain.T @ _cell_average(n1))
            flux_coupling = (-gamma * h1) * _difference(n1 - 1, n1, h1)
        else:
            theta_weights = np.full(n2 - 1, weights.temperature * h2)
            flux_quadrature = np.full(n2, h2)
            coupling = (delta * h2) * curvature[1:, :].T
            # (D q)_j = (q_{j+1/2} - q_{j-1/2})/h on beam nodes 1..n2-1
            flux_coupling = (-gamma * h2) * _difference(n2 - 1, n2, h2)
        flux_weights = weights.heat_flux * flux_quadrature
        damping = sp.diags((gamma / kappa) * flux_quadrature, format="csr")

        theta_inv = sp.diags(1.0 / theta_weights)
        flux_inv = sp.diags(1.0 / flux_weights)
        coupling = sp.csr_matrix(coupling)
        flux_coupling = sp.csr_matrix(flux_coupling)
        if coupling.shape != (layout.n_u, layout.n_theta) or \
                flux_coupling.shape != (layout.n_theta, layout.n_q):
            raise AssemblyError(
                f"Heat coupling blocks {coupling.shape} / {flux_coupling.shape} do not match "
                f"the layout ({layout.n_u}, {layout.n_theta}, {layout.n_q})"
            )

        operator = sp.bmat([
            [None, identity, None, None],
            [-mass_inv @ stiffness, None, mass_inv @ coupling, None],
            [None, -theta_inv @ coupling.T, None, theta_inv @ flux_coupling],
            [None, None, -flux_inv @ flux_coupling.T, -flux_inv @ damping],
        ], format="csr")
        gram = sp.block_diag(
            (stiffness, sp.diags(mass), sp.diags(theta_weights), sp.diags(flux_weights)),
            format="csr",
        )
        zeros = sp.csr_matrix((2 * layout.n_u + layout.n_theta,) * 2)
        dissipation_matrix = sp.block_diag((zeros, damping), format="csr")

    ordering = _banded_ordering(layout, h1, h2)
    g = BlockGenerator(
        operator=operator,
        gram=gram,
        dissipation_matrix=dissipation_matrix,
        ordering=ordering,
        layout=layout,
        params=p,
        kind=kind,
        weights=weights,
        grids=(string_grid, beam_grid),
    )
    logger.debug(f"Assembled {kind.value} generator: n1={n1}, n2={n2}, heat={heat}, dim={g.dim}")
    return g


def apply_generator(g: BlockGenerator, y: np.ndarray) -> np.ndarray:
    """A_h y."""
    return g.operator @ g.check(y)


def energy(g: BlockGenerator, y: np.ndarray) -> float:
    """Discrete energy 1/2 <y, y>_M."""
    y = g.check(y)
    return 0.5 * float(np.vdot(y, g.gram @ y).real)


def dissipation(g: BlockGenerator, y: np.ndarray) -> float:
    """(gamma/kappa) * ||q||^2 under the q-block quadrature; zero without heat."""
    y = g.check(y)
    return float(np.vdot(y, g.dissipation_matrix @ y).real)


def solve(g: BlockGenerator, f: np.ndarray) -> np.ndarray:
    """Solve A_h y = f with the banded LU of A_h."""
    return lu_solve(g.factors, g.check(f))

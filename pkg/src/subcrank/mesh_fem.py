"""P1 finite elements on the unit interval and the unit square.

Homogeneous Dirichlet data are eliminated at assembly, so every vector and
matrix handed out by this module lives on the interior nodes only. The
operator is the negative Laplacian.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

import numpy as np
import scipy.sparse as sp

from . import linsolve
from .errors import AlignmentError, ParameterError

__all__ = [
    "Mesh",
    "FemSystem",
    "PowerLaw",
    "BoxIndicator",
    "ZeroProfile",
    "build_mesh",
    "assemble",
    "load_vector",
    "l2_project",
    "l2_norm",
]

_GAUSS_ORDER = 8


# --------------------------------------------------------------------------
# spatial profiles


@dataclass(frozen=True)
class PowerLaw:
    """g(x) = x**exponent on (0, 1); integrated exactly against hat functions (1D only)."""

    exponent: float = -0.25

    def __post_init__(self):
        if not self.exponent > -1.0:
            raise ParameterError("power-law exponent must exceed -1 to be integrable")

    def __call__(self, x):
        return np.asarray(x, dtype=float) ** self.exponent


@dataclass(frozen=True)
class BoxIndicator:
    """Indicator of [lo, hi] in 1D or [lo, hi]^2 in 2D."""

    lo: float = 0.25
    hi: float = 0.75

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi <= 1.0:
            raise ParameterError(f"box must satisfy 0 <= lo < hi <= 1, got [{self.lo}, {self.hi}]")

    def __call__(self, *coords):
        inside = np.ones(np.shape(coords[0]), dtype=bool)
        for c in coords:
            c = np.asarray(c)
            inside &= (c >= self.lo) & (c <= self.hi)
        return inside.astype(float)


@dataclass(frozen=True)
class ZeroProfile:
    def __call__(self, *coords):
        return np.zeros(np.shape(coords[0]))


Profile = Union[PowerLaw, BoxIndicator, ZeroProfile, Callable]


# --------------------------------------------------------------------------
# mesh and assembly


@dataclass(frozen=True, eq=False)
class Mesh:
    """Uniform mesh of (0,1)^d.

    In 2D every square cell is cut by its lower-left to upper-right diagonal
    (Friedrichs-Keller pattern). ``nodes`` holds vertex coordinates,
    ``elements`` vertex indices (pairs in 1D, counter-clockwise triples in 2D)
    and ``interior`` the vertices that carry degrees of freedom, in order.
    """

    dimension: int
    subdivisions: int
    nodes: np.ndarray
    elements: np.ndarray
    interior: np.ndarray
    dof: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return 1.0 / self.subdivisions

    @property
    def num_dofs(self) -> int:
        return len(self.interior)

    def element_measures(self) -> np.ndarray:
        p = self.nodes[self.elements]
        if self.dimension == 1:
            return p[:, 1, 0] - p[:, 0, 0]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def interior_coords(self) -> np.ndarray:
        return self.nodes[self.interior]


def build_mesh(dimension: int, M: int) -> Mesh:
    """Uniform mesh with ``M`` cells per axis."""
    if dimension not in (1, 2):
        raise ParameterError(f"dimension must be 1 or 2, got {dimension}")
    M = int(M)
    if M < 2:
        raise ParameterError(f"need at least 2 subdivisions, got {M}")
    x = np.linspace(0.0, 1.0, M + 1)
    if dimension == 1:
        nodes = x[:, None]
        elements = np.column_stack([np.arange(M), np.arange(1, M + 1)])
        boundary = np.zeros(M + 1, dtype=bool)
        boundary[[0, M]] = True
    else:
        X, Y = np.meshgrid(x, x, indexing="xy")
        nodes = np.column_stack([X.ravel(), Y.ravel()])
        i, j = np.meshgrid(np.arange(M), np.arange(M), indexing="xy")
        a = (i + j * (M + 1)).ravel()
        b, c, d = a + 1, a + M + 2, a + M + 1
        elements = np.concatenate([np.column_stack([a, b, c]), np.column_stack([a, c, d])])
        ii, jj = np.meshgrid(np.arange(M + 1), np.arange(M + 1), indexing="xy")
        boundary = ((ii == 0) | (ii == M) | (jj == 0) | (jj == M)).ravel()
    interior = np.flatnonzero(~boundary)
    dof = np.full(len(nodes), -1, dtype=np.intp)
    dof[interior] = np.arange(len(interior))
    for arr in (nodes, elements, interior, dof):
        arr.setflags(write=False)
    return Mesh(dimension, M, nodes, elements, interior, dof)


def _local_matrices(mesh: Mesh):
    """Element mass and stiffness blocks, shape (n_elem, k, k)."""
    meas = mesh.element_measures()
    if mesh.dimension == 1:
        mloc = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
        sloc = np.array([[1.0, -1.0], [-1.0, 1.0]])
        return meas[:, None, None] * mloc, sloc[None] / meas[:, None, None]
    mloc = (np.ones((3, 3)) + np.eye(3)) / 12.0
    p = mesh.nodes[mesh.elements]
    # gradients of barycentric coordinates: rotate opposite edges
    edges = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    grads = np.stack([-edges[..., 1], edges[..., 0]], axis=-1) / (2.0 * meas[:, None, None])
    sloc = meas[:, None, None] * np.einsum("eik,ejk->eij", grads, grads)
    return meas[:, None, None] * mloc, sloc


def _assemble_full(mesh: Mesh):
    mloc, sloc = _local_matrices(mesh)
    k = mesh.elements.shape[1]
    rows = np.repeat(mesh.elements, k, axis=1).ravel()
    cols = np.tile(mesh.elements, (1, k)).ravel()
    n = len(mesh.nodes)
    mass = sp.csr_matrix((mloc.ravel(), (rows, cols)), shape=(n, n))
    stiff = sp.csr_matrix((sloc.ravel(), (rows, cols)), shape=(n, n))
    return mass, stiff


@dataclass(frozen=True, eq=False)
class FemSystem:
    """Mass and stiffness matrices restricted to interior nodes (CSR)."""

    mesh: Mesh
    mass: sp.csr_matrix
    stiffness: sp.csr_matrix

    @property
    def num_dofs(self) -> int:
        return self.mesh.num_dofs

    @cached_property
    def mass_factor(self) -> linsolve.SpdFactorization:
        return linsolve.factor(self.mass)


def assemble(mesh: Mesh) -> FemSystem:
    mass, stiff = _assemble_full(mesh)
    idx = mesh.interior
    mass = mass[idx][:, idx].tocsr()
    stiff = stiff[idx][:, idx].tocsr()
    for m in (mass, stiff):
        m.sum_duplicates()
        m.sort_indices()
    return FemSystem(mesh, mass, stiff)


# --------------------------------------------------------------------------
# load vectors


def _pow_diff(a, b, q):
    """b**q - a**q for 0 <= a < b without cancellation."""
    out = b**q
    pos = a > 0
    ap = a[pos]
    out[pos] = ap**q * np.expm1(q * np.log1p((b[pos] - ap) / ap))
    return out


def _load_power_1d(mesh: Mesh, g: PowerLaw) -> np.ndarray:
    p = g.exponent
    x = mesh.nodes[:, 0]
    a, b = x[mesh.elements[:, 0]], x[mesh.elements[:, 1]]
    h = b - a
    i0 = _pow_diff(a, b, p + 1.0) / (p + 1.0)
    i1 = _pow_diff(a, b, p + 2.0) / (p + 2.0)
    rising = (i1 - a * i0) / h
    falling = (b * i0 - i1) / h
    full = np.zeros(len(x))
    np.add.at(full, mesh.elements[:, 1], rising)
    np.add.at(full, mesh.elements[:, 0], falling)
    return full


def _load_box_1d(mesh: Mesh, g: BoxIndicator) -> np.ndarray:
    x = mesh.nodes[:, 0]
    a, b = x[mesh.elements[:, 0]], x[mesh.elements[:, 1]]
    h = b - a
    c = np.clip(g.lo, a, b)
    d = np.clip(g.hi, a, b)
    rising = ((d - a) ** 2 - (c - a) ** 2) / (2.0 * h)
    falling = ((b - c) ** 2 - (b - d) ** 2) / (2.0 * h)
    full = np.zeros(len(x))
    np.add.at(full, mesh.elements[:, 1], rising)
    np.add.at(full, mesh.elements[:, 0], falling)
    return full


def _load_box_2d(mesh: Mesh, g: BoxIndicator) -> np.ndarray:
    M = mesh.subdivisions
    for edge in (g.lo, g.hi):
        if abs(edge * M - round(edge * M)) > 1e-12:
            raise AlignmentError(
                f"box edge {edge} does not fall on a grid line of the {M}x{M} mesh"
            )
    p = mesh.nodes[mesh.elements]
    centroid = p.mean(axis=1)
    inside = np.all((centroid > g.lo) & (centroid < g.hi), axis=1)
    share = np.where(inside, mesh.element_measures() / 3.0, 0.0)
    full = np.zeros(len(mesh.nodes))
    for k in range(3):
        np.add.at(full, mesh.elements[:, k], share)
    return full


def _load_quadrature(mesh: Mesh, g: Callable) -> np.ndarray:
    xi, wi = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
    xi = 0.5 * (xi + 1.0)
    wi = 0.5 * wi
    p = mesh.nodes[mesh.elements]
    meas = mesh.element_measures()
    if mesh.dimension == 1:
        bary = np.column_stack([1.0 - xi, xi])
        w = wi
    else:
        # collapsed (Duffy) tensor rule on the reference triangle
        U, V = np.meshgrid(xi, xi, indexing="ij")
        WU, WV = np.meshgrid(wi, wi, indexing="ij")
        s = U.ravel()
        t = (V * (1.0 - U)).ravel()
        w = (WU * WV * (1.0 - U)).ravel() * 2.0
        bary = np.column_stack([1.0 - s - t, s, t])
    pts = np.einsum("qk,ekd->eqd", bary, p)
    vals = np.asarray(g(*np.moveaxis(pts, -1, 0)), dtype=float)
    vals = np.broadcast_to(vals, pts.shape[:2])
    contrib = np.einsum("eq,q,qk->ek", vals, w, bary) * meas[:, None]
    full = np.zeros(len(mesh.nodes))
    for k in range(mesh.elements.shape[1]):
        np.add.at(full, mesh.elements[:, k], contrib[:, k])
    return full


def load_vector(mesh: Mesh, g: Profile) -> np.ndarray:
    """Entries int g * phi_i over the domain, for each interior node i.

    Power laws (1D) and box indicators are integrated exactly; other
    callables use an 8-point Gauss rule per axis on every element. Callables
    receive one coordinate array per dimension.
    """
    if isinstance(g, ZeroProfile):
        return np.zeros(mesh.num_dofs)
    if isinstance(g, PowerLaw):
        if mesh.dimension != 1:
            raise ParameterError("power-law profile is only available in 1D")
        full = _load_power_1d(mesh, g)
    elif isinstance(g, BoxIndicator):
        full = _load_box_1d(mesh, g) if mesh.dimension == 1 else _load_box_2d(mesh, g)
    elif callable(g):
        full = _load_quadrature(mesh, g)
    else:
        raise ParameterError(f"unsupported spatial profile {g!r}")
    return full[mesh.interior]


def l2_project(system: FemSystem, g: Profile) -> np.ndarray:
    """Coefficients of the L2 projection of ``g`` onto the P1 space."""
    b = load_vector(system.mesh, g)
    return system.mass_factor.solve(b)


def l2_norm(system: FemSystem, v) -> float:
    v = np.asarray(v, dtype=float)
    if v.shape != (system.num_dofs,):
        raise ParameterError(f"vector has shape {v.shape}, expected ({system.num_dofs},)")
    return float(np.sqrt(max(v @ (system.mass @ v), 0.0)))

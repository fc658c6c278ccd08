"""Discrete spaces: DOF numbering and coefficient containers.

Velocity functions carry two kinds of coefficients: a cellwise vector
polynomial of degree k (the "interior" part, discontinuous across cells)
and an edgewise vector polynomial of degree k-1 (single-valued on each
edge, shared by the two incident cells).  Pressures are cellwise
polynomials of degree k-1 with no continuity.

Global numbering: all interior blocks first (cell-major, x-component then
y-component), then all edge blocks (edge-major, x then y).  Pressure DOFs
are numbered cell-major.
"""

import numpy as np

from .basis import space_dimension
from .errors import ConfigurationError


class DofMap:
    """Degree-of-freedom layout for one mesh and one polynomial degree k >= 1."""

    def __init__(self, mesh, degree):
        if not isinstance(degree, (int, np.integer)) or degree < 1:
            raise ConfigurationError(f"polynomial degree must be an integer >= 1, got {degree!r}")
        self.mesh = mesh
        self.degree = int(degree)
        self.dim_cell = space_dimension(degree)  # P_k on a cell, per component
        self.dim_cell_low = space_dimension(degree - 1)  # P_{k-1} on a cell
        self.dim_edge = degree  # P_{k-1} on an edge, per component
        self.interior_size = mesh.num_cells * 2 * self.dim_cell
        self.num_velocity_dofs = self.interior_size + mesh.num_edges * 2 * self.dim_edge
        self.num_pressure_dofs = mesh.num_cells * self.dim_cell_low
        self._cell_dofs = None
        self._boundary_mask = None

    # -- velocity numbering -------------------------------------------

    def interior_dofs(self, c):
        """Global indices of cell c's interior block: x-component then y."""
        start = c * 2 * self.dim_cell
        return np.arange(start, start + 2 * self.dim_cell)

    def edge_dofs(self, e):
        """Global indices of edge e's block: x-component then y."""
        start = self.interior_size + e * 2 * self.dim_edge
        return np.arange(start, start + 2 * self.dim_edge)

    def cell_dofs(self, c):
        """All velocity DOFs seen by cell c, in local layout order.

        Local layout: [v0x (dim_cell), v0y (dim_cell)] then per side s
        [vbx (dim_edge), vby (dim_edge)] in loop order.
        """
        if self._cell_dofs is None:
            self._cell_dofs = [None] * self.mesh.num_cells
        cached = self._cell_dofs[c]
        if cached is None:
            parts = [self.interior_dofs(c)]
            for e in self.mesh.cell_edges[c]:
                parts.append(self.edge_dofs(e))
            cached = np.concatenate(parts)
            self._cell_dofs[c] = cached
        return cached

    def local_size(self, c):
        return 2 * self.dim_cell + 2 * self.dim_edge * len(self.mesh.cells[c])

    def component_maps(self, c):
        """Positions of the x/y scalar sub-vectors inside the local layout.

        Returns an int array of shape (2, dim_cell + m*dim_edge): row i
        lists where component i's scalar coefficients (interior first,
        then per-side edge blocks) sit in the local vector layout.
        """
        m = len(self.mesh.cells[c])
        nk, ne = self.dim_cell, self.dim_edge
        out = np.empty((2, nk + m * ne), dtype=int)
        for comp in (0, 1):
            out[comp, :nk] = comp * nk + np.arange(nk)
            for s in range(m):
                out[comp, nk + s * ne : nk + (s + 1) * ne] = (
                    2 * nk + s * 2 * ne + comp * ne + np.arange(ne)
                )
        return out

    # -- boundary -------------------------------------------------------

    def boundary_velocity_mask(self):
        """Boolean mask over velocity DOFs: True on boundary-edge blocks."""
        if self._boundary_mask is None:
            mask = np.zeros(self.num_velocity_dofs, dtype=bool)
            for e in np.nonzero(self.mesh.boundary_edges)[0]:
                mask[self.edge_dofs(e)] = True
            self._boundary_mask = mask
        return self._boundary_mask

    # -- pressure numbering ---------------------------------------------

    def pressure_dofs(self, c):
        start = c * self.dim_cell_low
        return np.arange(start, start + self.dim_cell_low)


class WeakFunction:
    """Coefficients of one discrete velocity field {v0, vb}."""

    def __init__(self, dofmap, coeffs=None):
        self.dofmap = dofmap
        if coeffs is None:
            coeffs = np.zeros(dofmap.num_velocity_dofs)
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.shape != (dofmap.num_velocity_dofs,):
            raise ValueError("coefficient vector has the wrong length")

    @classmethod
    def zeros(cls, dofmap):
        return cls(dofmap)

    @classmethod
    def random(cls, dofmap, rng, zero_boundary=False):
        f = cls(dofmap, rng.standard_normal(dofmap.num_velocity_dofs))
        if zero_boundary:
            f.coeffs[dofmap.boundary_velocity_mask()] = 0.0
        return f

    def interior(self, c):
        """(2, dim_cell) view of cell c's interior coefficients."""
        nk = self.dofmap.dim_cell
        start = c * 2 * nk
        return self.coeffs[start : start + 2 * nk].reshape(2, nk)

    def edge(self, e):
        """(2, dim_edge) view of edge e's coefficients."""
        ne = self.dofmap.dim_edge
        start = self.dofmap.interior_size + e * 2 * ne
        return self.coeffs[start : start + 2 * ne].reshape(2, ne)

    def local(self, c):
        """Local coefficient vector of cell c (copy)."""
        return self.coeffs[self.dofmap.cell_dofs(c)]

    def copy(self):
        return WeakFunction(self.dofmap, self.coeffs.copy())

    def __sub__(self, other):
        return WeakFunction(self.dofmap, self.coeffs - other.coeffs)

    def __add__(self, other):
        return WeakFunction(self.dofmap, self.coeffs + other.coeffs)


class PressureFunction:
    """Coefficients of one discrete pressure (cellwise P_{k-1})."""

    def __init__(self, dofmap, coeffs=None):
        self.dofmap = dofmap
        if coeffs is None:
            coeffs = np.zeros(dofmap.num_pressure_dofs)
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.shape != (dofmap.num_pressure_dofs,):
            raise ValueError("coefficient vector has the wrong length")

    @classmethod
    def zeros(cls, dofmap):
        return cls(dofmap)

    @classmethod
    def random(cls, dofmap, rng):
        return cls(dofmap, rng.standard_normal(dofmap.num_pressure_dofs))

    def cell(self, c):
        """(dim_cell_low,) view of cell c's coefficients."""
        nl = self.dofmap.dim_cell_low
        return self.coeffs[c * nl : (c + 1) * nl]

    def copy(self):
        return PressureFunction(self.dofmap, self.coeffs.copy())

    def __sub__(self, other):
        return PressureFunction(self.dofmap, self.coeffs - other.coeffs)

    def __add__(self, other):
        return PressureFunction(self.dofmap, self.coeffs + other.coeffs)

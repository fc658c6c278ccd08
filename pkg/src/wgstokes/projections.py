"""L2 projections of exact fields into the discrete spaces.

Velocity fields project componentwise onto P_k inside each cell and onto
P_{k-1} on each edge; pressures and divergences onto cellwise P_{k-1};
gradients onto cellwise P_{k-1} tensors.  Pass ``data_degree`` when the
field is polynomial of known total degree so the moment quadrature is
exact; leave it None for general smooth data (a high fixed exactness is
used instead).
"""

import numpy as np

from .spaces import PressureFunction, WeakFunction


def project_velocity(ops, u, data_degree=None):
    """Projection {Q0 u, Qb u} of a velocity field into the weak space.

    Parameters
    ----------
    ops : ElementOps
    u : callable
        Maps (n, 2) points to (n, 2) velocity values.
    data_degree : int or None
        Total polynomial degree of u's components, if polynomial.
    """
    out = WeakFunction.zeros(ops.dofmap)
    for c in range(ops.mesh.num_cells):
        moments = ops.cell_moments(c, u, ops.degree, data_degree)  # (2, nk)
        out.interior(c)[:] = ops.solve_cell_mass(c, moments)
    for e in range(ops.mesh.num_edges):
        moments = ops.edge_moments(e, u, data_degree)  # (2, ne)
        out.edge(e)[:] = ops.solve_edge_mass(e, moments)
    return out


def project_boundary_velocity(ops, g, data_degree=None):
    """Edgewise projection of Dirichlet data onto the boundary edge blocks.

    Returns a WeakFunction that is zero except on boundary edges.
    """
    out = WeakFunction.zeros(ops.dofmap)
    for e in np.nonzero(ops.mesh.boundary_edges)[0]:
        moments = ops.edge_moments(e, g, data_degree)
        out.edge(e)[:] = ops.solve_edge_mass(e, moments)
    return out


def project_pressure(ops, p, data_degree=None):
    """Cellwise P_{k-1} projection of a scalar field."""
    out = PressureFunction.zeros(ops.dofmap)
    for c in range(ops.mesh.num_cells):
        moments = ops.cell_moments(c, p, ops.degree - 1, data_degree)
        out.cell(c)[:] = ops.solve_cell_mass(c, moments, degree=ops.degree - 1)
    return out


def project_gradient(ops, grad_u, data_degree=None):
    """Cellwise tensor projection of a velocity gradient.

    grad_u maps (n, 2) points to (n, 2, 2) Jacobians (entry [i, j] is
    d u_i / d x_j).  Returns an (num_cells, 2, 2, dim_cell_low) array.
    """
    nc = ops.mesh.num_cells
    nlow = ops.dofmap.dim_cell_low
    out = np.empty((nc, 2, 2, nlow))
    for c in range(nc):
        flat = lambda pts: np.asarray(grad_u(pts), dtype=float).reshape(-1, 4)
        moments = ops.cell_moments(c, flat, ops.degree - 1, data_degree)  # (4, nlow)
        coeffs = ops.solve_cell_mass(c, moments, degree=ops.degree - 1)
        out[c] = coeffs.reshape(2, 2, nlow)
    return out


def project_divergence(ops, div_u, data_degree=None):
    """Cellwise P_{k-1} projection of a scalar divergence field."""
    return project_pressure(ops, div_u, data_degree).coeffs.reshape(
        ops.mesh.num_cells, ops.dofmap.dim_cell_low
    )

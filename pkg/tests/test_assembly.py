"""Global assembly: matrix structure, energy identity, and data handling."""

import numpy as np
import pytest

from wgstokes.analysis import triple_bar_norm
from wgstokes.assembly import assemble, eval_a, eval_b, eval_grad_product, eval_s
from wgstokes.errors import CompatibilityError
from wgstokes.mesh import generate_mesh
from wgstokes.projections import project_boundary_velocity, project_velocity
from wgstokes.spaces import PressureFunction, WeakFunction
from wgstokes.weakops import ElementOps

from conftest import PolyField


@pytest.fixture(scope="module")
def system_quad_k1(ops_quad_k1):
    return assemble(ops_quad_k1)


@pytest.fixture(scope="module")
def system_poly_k2(ops_poly_k2):
    return assemble(ops_poly_k2)


def test_velocity_matrix_symmetric(system_quad_k1, system_poly_k2):
    for system in (system_quad_k1, system_poly_k2):
        A = system.A
        gap = abs(A - A.T).max()
        assert gap <= 1e-13 * abs(A).max()


def test_homogeneous_data_gives_zero_load(system_quad_k1):
    system = system_quad_k1
    assert np.all(system.load == 0.0)
    assert np.all(system.fixed_values == 0.0)
    assert system.boundary_flux == 0.0


def test_shapes_and_free_dofs(system_quad_k1):
    system = system_quad_k1
    dm = system.ops.dofmap
    assert system.A.shape == (dm.num_velocity_dofs, dm.num_velocity_dofs)
    assert system.B.shape == (dm.num_pressure_dofs, dm.num_velocity_dofs)
    assert np.array_equal(system.fixed_mask, dm.boundary_velocity_mask())
    assert len(system.free) + system.fixed_mask.sum() == dm.num_velocity_dofs


def test_matrix_energy_matches_matrix_free(system_poly_k2):
    system = system_poly_k2
    rng = np.random.default_rng(3)
    for _ in range(20):
        v = WeakFunction.random(system.ops.dofmap, rng)
        quad = float(v.coeffs @ (system.A @ v.coeffs))
        direct = eval_a(system.ops, v, v)
        assert abs(quad - direct) <= 1e-12 * max(abs(quad), 1.0)


def test_energy_equals_triple_bar_squared(system_quad_k1):
    system = system_quad_k1
    rng = np.random.default_rng(9)
    for _ in range(10):
        v = WeakFunction.random(system.ops.dofmap, rng)
        quad = float(v.coeffs @ (system.A @ v.coeffs))
        norm = triple_bar_norm(system.ops, v)
        assert abs(quad - norm**2) <= 1e-12 * max(quad, 1.0)


def test_cauchy_schwarz(system_quad_k1):
    system = system_quad_k1
    rng = np.random.default_rng(12)
    for _ in range(10):
        v = WeakFunction.random(system.ops.dofmap, rng)
        w = WeakFunction.random(system.ops.dofmap, rng)
        cross = abs(float(v.coeffs @ (system.A @ w.coeffs)))
        bound = triple_bar_norm(system.ops, v) * triple_bar_norm(system.ops, w)
        assert cross <= bound * (1 + 1e-12)


def test_divergence_matrix_matches_matrix_free(system_poly_k2):
    system = system_poly_k2
    rng = np.random.default_rng(5)
    for _ in range(10):
        v = WeakFunction.random(system.ops.dofmap, rng)
        q = PressureFunction.random(system.ops.dofmap, rng)
        quad = float(q.coeffs @ (system.B @ v.coeffs))
        direct = eval_b(system.ops, v, q)
        assert abs(quad - direct) <= 1e-12 * max(abs(quad), 1.0)


def test_stabilizer_and_gradient_split(system_quad_k1):
    """eval_a = eval_grad_product + eval_s, and both pieces are nonnegative."""
    system = system_quad_k1
    rng = np.random.default_rng(7)
    v = WeakFunction.random(system.ops.dofmap, rng)
    g = eval_grad_product(system.ops, v, v)
    s = eval_s(system.ops, v, v)
    assert g >= 0.0 and s >= 0.0
    assert np.isclose(g + s, eval_a(system.ops, v, v), rtol=1e-13)


@pytest.mark.parametrize("degree", [1, 2])
def test_divergence_form_exact_for_polynomials(degree, poly_mesh_4):
    """b(Q_h u, q) equals the integral of (div u) q for polynomial data."""
    ops = ElementOps(poly_mesh_4, degree)
    rng = np.random.default_rng(degree)
    field = PolyField(degree + 1, rng)
    v = project_velocity(ops, field.u, data_degree=field.degree)
    q = PressureFunction.random(ops.dofmap, rng)
    exact = 0.0
    for c in range(ops.mesh.num_cells):
        rule = ops.cell_rule(c, ops.data_cell_exactness(2 * field.degree))
        qv = ops.cell_basis_low[c].eval(rule.points) @ q.cell(c)
        exact += rule.weights @ (field.div(rule.points) * qv)
    assert np.isclose(eval_b(ops, v, q), exact, rtol=1e-12, atol=1e-13)


def test_stabilizer_energy_decays_at_projection_order():
    """s(Q_h u, Q_h u) for smooth non-polynomial u shrinks like h^(2k)."""
    u = lambda pts: np.column_stack(
        [np.sin(np.pi * pts[:, 0]) * pts[:, 1], np.cos(pts[:, 0] + pts[:, 1])]
    )
    for degree in (1, 2):
        values, hs = [], []
        for n in (4, 8, 16):
            mesh = generate_mesh("uniform-quad", n)
            ops = ElementOps(mesh, degree)
            v = project_velocity(ops, u)
            values.append(eval_s(ops, v, v))
            hs.append(mesh.mesh_size)
        slope = np.polyfit(np.log(hs), np.log(values), 1)[0]
        assert slope >= 2 * degree - 0.2


def test_incompatible_boundary_data_rejected(ops_quad_k1):
    with pytest.raises(CompatibilityError):
        assemble(ops_quad_k1, boundary_velocity=lambda pts: pts.copy(), data_degree=1)


def test_boundary_flux_reported_for_compatible_data(ops_quad_k1):
    g = lambda pts: np.column_stack([pts[:, 1], np.zeros(len(pts))])
    system = assemble(ops_quad_k1, boundary_velocity=g, data_degree=1)
    assert abs(system.boundary_flux) <= 1e-12


def test_fixed_values_are_boundary_projection(ops_quad_k2):
    g = lambda pts: np.column_stack([pts[:, 1] ** 3, pts[:, 0] ** 2])
    system = assemble(ops_quad_k2, boundary_velocity=g, data_degree=3)
    proj = project_boundary_velocity(ops_quad_k2, g)
    assert np.allclose(system.fixed_values, proj.coeffs, atol=1e-14)
    assert np.all(system.fixed_values[~system.fixed_mask] == 0.0)


def test_divergence_rows_are_cell_local(system_quad_k1):
    """Each pressure DOF couples only to velocity DOFs of its own cell."""
    system = system_quad_k1
    dm = system.ops.dofmap
    B = system.B.tocsr()
    for c in range(system.ops.mesh.num_cells):
        allowed = set(dm.cell_dofs(c))
        for p in dm.pressure_dofs(c):
            cols = B.indices[B.indptr[p] : B.indptr[p + 1]]
            assert set(cols) <= allowed


def test_load_vector_is_interior_moments(ops_quad_k1):
    """Body-force moments land on interior DOFs only, matching cell_moments."""
    f = lambda pts: np.column_stack([pts[:, 0] * pts[:, 1], np.ones(len(pts))])
    system = assemble(ops_quad_k1, body_force=f, data_degree=2)
    dm = ops_quad_k1.dofmap
    edge_dofs = np.ones(dm.num_velocity_dofs, dtype=bool)
    for c in range(ops_quad_k1.mesh.num_cells):
        idx = dm.interior_dofs(c)
        edge_dofs[idx.ravel() if hasattr(idx, "ravel") else np.asarray(idx).ravel()] = False
        moments = ops_quad_k1.cell_moments(c, f, ops_quad_k1.degree, data_degree=2)
        assert np.allclose(system.load[np.asarray(idx).reshape(moments.shape)], moments, atol=1e-14)
    assert np.all(system.load[edge_dofs] == 0.0)

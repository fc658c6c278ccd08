"""Direct, iterative, and condensed solves against closed-form solutions."""

import json

import numpy as np
import pytest

from wgstokes.assembly import assemble
from wgstokes.cases import get_case
from wgstokes.errors import SolverError
from wgstokes.mesh import generate_mesh
from wgstokes.projections import project_pressure, project_velocity
from wgstokes.solver import solve
from wgstokes.weakops import ElementOps


@pytest.fixture(scope="module")
def system_quad_k1(ops_quad_k1):
    return assemble(ops_quad_k1)


def test_zero_data_zero_solution(system_quad_k1):
    report = solve(system_quad_k1)
    assert np.allclose(report.velocity.coeffs, 0.0, atol=1e-13)
    assert np.allclose(report.pressure.coeffs, 0.0, atol=1e-13)
    assert abs(report.multiplier) <= 1e-13


def test_constant_boundary_data_reproduced(ops_quad_k1):
    """Rigid translation: u = (a, b) everywhere, zero pressure."""
    ops = ops_quad_k1
    g = lambda pts: np.tile([0.7, -0.3], (len(pts), 1))
    system = assemble(ops, boundary_velocity=g, data_degree=0)
    report = solve(system)
    exact = project_velocity(ops, g, data_degree=0)
    assert np.abs(report.velocity.coeffs - exact.coeffs).max() <= 1e-10
    assert np.abs(report.pressure.coeffs).max() <= 1e-10


@pytest.mark.parametrize(
    "case_name, degree",
    [("poly-exact-k1", 1), ("poly-exact-k2", 2)],
)
@pytest.mark.parametrize("family", ["uniform-quad", "perturbed-polygon"])
def test_polynomial_solutions_reproduced(case_name, degree, family):
    """Velocity in [P_k]^2 with pressure in P_{k-1} is solved exactly."""
    case = get_case(case_name)
    ops = ElementOps(generate_mesh(family, 4, seed=2), degree)
    system = assemble(ops, body_force=case.f, boundary_velocity=case.g, data_degree=case.data_degree)
    report = solve(system)
    u_exact = project_velocity(ops, case.u, data_degree=case.data_degree)
    p_exact = project_pressure(ops, case.p, data_degree=case.data_degree)
    u_scale = max(np.abs(u_exact.coeffs).max(), 1.0)
    assert np.abs(report.velocity.coeffs - u_exact.coeffs).max() <= 1e-9 * u_scale
    assert np.abs(report.pressure.coeffs - p_exact.coeffs).max() <= 1e-9


def test_pressure_gauge_and_multiplier(ops_quad_k2):
    case = get_case("taylor-trig")
    system = assemble(ops_quad_k2, body_force=case.f, boundary_velocity=case.g)
    report = solve(system)
    assert abs(system.pressure_moments @ report.pressure.coeffs) <= 1e-12
    assert abs(report.multiplier) <= 1e-10


def test_minres_matches_direct(ops_quad_k1):
    case = get_case("taylor-trig")
    system = assemble(ops_quad_k1, body_force=case.f, boundary_velocity=case.g)
    direct = solve(system)
    iterative = solve(system, method="minres", residual_tol=1e-8)
    assert iterative.iterations is not None and iterative.iterations > 0
    gap = np.abs(direct.velocity.coeffs - iterative.velocity.coeffs).max()
    assert gap <= 1e-7 * max(np.abs(direct.velocity.coeffs).max(), 1.0)
    assert np.abs(direct.pressure.coeffs - iterative.pressure.coeffs).max() <= 1e-6


def test_condensed_solve_matches_full(ops_quad_k1):
    case = get_case("taylor-trig")
    system = assemble(ops_quad_k1, body_force=case.f, boundary_velocity=case.g)
    full = solve(system)
    red = solve(system, condense=True)
    assert np.abs(full.velocity.coeffs - red.velocity.coeffs).max() <= 1e-9
    assert np.abs(full.pressure.coeffs - red.pressure.coeffs).max() <= 1e-9
    assert red.condensed and red.method == "condensed-direct"


def test_condensed_system_size(ops_quad_k1):
    """The reduced system keeps free edge DOFs, pressures, and the multiplier."""
    system = assemble(ops_quad_k1)
    report = solve(system, condense=True)
    dm = ops_quad_k1.dofmap
    mesh = ops_quad_k1.mesh
    n_interior_edges = int((~mesh.boundary_edges).sum())
    expected = 2 * dm.dim_edge * n_interior_edges + dm.num_pressure_dofs + 1
    assert report.num_reduced == expected
    assert np.allclose(report.velocity.coeffs, 0.0, atol=1e-13)


def test_unknown_method_rejected(system_quad_k1):
    with pytest.raises(SolverError):
        solve(system_quad_k1, method="jacobi")


def test_report_serializes(system_quad_k1):
    report = solve(system_quad_k1)
    blob = json.loads(report.to_json())
    assert blob["method"] == "direct"
    assert blob["condensed"] is False
    assert blob["num_pressure"] == system_quad_k1.num_pressure_dofs
    assert blob["residual"] <= 1e-10
    assert blob["iterations"] is None
    assert blob["wall_time"] > 0


def test_residuals_reported_small(ops_quad_k2):
    case = get_case("stream-quartic")
    system = assemble(ops_quad_k2, body_force=case.f, boundary_velocity=case.g, data_degree=case.data_degree)
    report = solve(system)
    assert report.residual <= 1e-10
    assert report.momentum_residual < 1e-8
    assert report.mass_residual < 1e-8
    assert report.num_free_velocity == len(system.free)

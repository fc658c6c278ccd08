"""Error measurement, convergence rates, and discrete stability checks.

The norms here deliberately avoid the assembled matrices: the energy norm
is accumulated by evaluating the weak gradient and the edge jumps at
quadrature points, so tests comparing it against the bilinear form
exercise two independent code paths.

Conventions: errors against the exact solution use quadrature boosted to
the data degree (or a high fixed order for transcendental data); errors
between two discrete fields use the cell mass matrices, which are exact.
"""

import csv
import dataclasses

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import splu

from .errors import ConfigurationError
from .projections import project_gradient, project_pressure, project_velocity
from .weakops import NONPOLY_EXACTNESS

# Dense inf-sup eigensolves refuse meshes with more pressure DOFs than the
# cap; the ceiling bounds how far a caller may raise it.
BETA_DOF_CAP = 1200
BETA_DOF_CEILING = 5000

# Columns below this size are reported as resolved to rounding rather than
# given a meaningless fitted rate.
EXACT_TOL = 1e-9

CSV_COLUMNS = (
    "level",
    "h",
    "cells",
    "triple_bar",
    "vel_l2_proj",
    "vel_l2_true",
    "pres_l2",
    "pres_l2_true",
    "beta_h",
)
ERROR_COLUMNS = CSV_COLUMNS[3:8]


# -- discrete norms ------------------------------------------------------


def triple_bar_norm(ops, v):
    """Energy norm of a discrete velocity, accumulated at quadrature points.

    Squares the weak gradient over each cell and the scaled trace jumps
    over each cell side; equals sqrt(v' A v) up to rounding.
    """
    total = 0.0
    for c in range(ops.mesh.num_cells):
        rule = ops.cell_rule(c)
        vals_low = ops.cell_basis_low[c].eval(rule.points)
        grad = np.einsum("pr,ijr->pij", vals_low, ops.weak_gradient(v, c))
        total += rule.weights @ (grad**2).sum(axis=(1, 2))
        h = ops.mesh.diameters[c]
        for s, e in enumerate(ops.mesh.cell_edges[c]):
            erule = ops.edge_rule(e)
            evals = ops.edge_basis[e].eval(erule.points)
            jump = evals @ ops.trace_jump(v, c, s).T  # (npts, 2)
            total += (erule.weights @ (jump**2).sum(axis=1)) / h
    return float(np.sqrt(max(total, 0.0)))


def weak_divergence_norm(ops, v):
    """L2 norm of the weak divergence over the whole mesh."""
    total = 0.0
    for c in range(ops.mesh.num_cells):
        d = ops.weak_divergence(v, c)
        total += d @ ops.mass_low[c] @ d
    return float(np.sqrt(max(total, 0.0)))


def velocity_interior_norm(ops, v):
    """L2 norm of the interior (cellwise) part of a discrete velocity."""
    total = 0.0
    for c in range(ops.mesh.num_cells):
        coeffs = v.interior(c)
        total += np.einsum("ir,rs,is->", coeffs, ops.mass_cell[c], coeffs)
    return float(np.sqrt(max(total, 0.0)))


def pressure_norm(ops, p):
    total = 0.0
    for c in range(ops.mesh.num_cells):
        coeffs = p.cell(c)
        total += coeffs @ ops.mass_low[c] @ coeffs
    return float(np.sqrt(max(total, 0.0)))


def _norm_exactness(data_degree):
    return NONPOLY_EXACTNESS if data_degree is None else 2 * data_degree


def velocity_interior_error(ops, v, u, data_degree=None):
    """L2 distance between an exact velocity and the interior part of v."""
    total = 0.0
    ex = _norm_exactness(data_degree)
    for c in range(ops.mesh.num_cells):
        rule = ops.cell_rule(c, ex)
        vals = ops.cell_basis[c].eval(rule.points)
        diff = np.asarray(u(rule.points), dtype=float) - vals @ v.interior(c).T
        total += rule.weights @ (diff**2).sum(axis=1)
    return float(np.sqrt(max(total, 0.0)))


def pressure_error(ops, p_h, p, data_degree=None):
    """L2 distance between an exact pressure and a discrete one."""
    total = 0.0
    ex = _norm_exactness(data_degree)
    for c in range(ops.mesh.num_cells):
        rule = ops.cell_rule(c, ex)
        vals = ops.cell_basis_low[c].eval(rule.points)
        diff = np.asarray(p(rule.points), dtype=float) - vals @ p_h.cell(c)
        total += rule.weights @ diff**2
    return float(np.sqrt(max(total, 0.0)))


def gradient_projection_error(ops, grad_u, data_degree=None):
    """L2 distance between an exact Jacobian field and its cellwise projection."""
    proj = project_gradient(ops, grad_u, data_degree)
    total = 0.0
    ex = _norm_exactness(data_degree)
    for c in range(ops.mesh.num_cells):
        rule = ops.cell_rule(c, ex)
        vals = ops.cell_basis_low[c].eval(rule.points)
        approx = np.einsum("pr,ijr->pij", vals, proj[c])
        diff = np.asarray(grad_u(rule.points), dtype=float) - approx
        total += rule.weights @ (diff**2).sum(axis=(1, 2))
    return float(np.sqrt(max(total, 0.0)))


# -- error bundles -------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ErrorBundle:
    """The five error measures reported per refinement level.

    triple_bar compares the solution with the projected exact velocity in
    the energy norm; vel_l2_proj does the same in L2 (interior part only);
    vel_l2_true and pres_l2_true measure against the exact fields directly.
    """

    triple_bar: float
    vel_l2_proj: float
    vel_l2_true: float
    pres_l2: float
    pres_l2_true: float

    def as_dict(self):
        return dataclasses.asdict(self)


def error_bundle(ops, case, velocity, pressure):
    """Measure a discrete solution against a manufactured case."""
    d = case.data_degree
    qu = project_velocity(ops, case.u, d)
    qp = project_pressure(ops, case.p, d)
    return ErrorBundle(
        triple_bar=triple_bar_norm(ops, qu - velocity),
        vel_l2_proj=velocity_interior_norm(ops, qu - velocity),
        vel_l2_true=velocity_interior_error(ops, velocity, case.u, d),
        pres_l2=pressure_norm(ops, qp - pressure),
        pres_l2_true=pressure_error(ops, pressure, case.p, d),
    )


def projection_errors(ops, case):
    """Approximation quality of the projections alone (no solve).

    Returns L2 errors of the interior velocity projection, the pressure
    projection, and the gradient projection; these decay at one order
    higher than, equal to, and equal to the energy-norm rate.
    """
    d = case.data_degree
    qu = project_velocity(ops, case.u, d)
    qp = project_pressure(ops, case.p, d)
    return {
        "velocity": velocity_interior_error(ops, qu, case.u, d),
        "pressure": pressure_error(ops, qp, case.p, d),
        "gradient": gradient_projection_error(ops, case.grad_u, d),
    }


# -- inf-sup stability ---------------------------------------------------


def discrete_inf_sup(system, cap=BETA_DOF_CAP):
    """Discrete inf-sup constant of the assembled saddle system.

    Computes the square root of the smallest eigenvalue of the pressure
    Schur complement, generalized against the pressure mass matrix and
    restricted to zero-mean pressures.  The eigensolve is dense, so meshes
    with more pressure DOFs than `cap` return None; `cap` may not exceed
    the hard ceiling.
    """
    if cap > BETA_DOF_CEILING:
        raise ConfigurationError(
            f"inf-sup DOF cap {cap} exceeds the dense-solve ceiling {BETA_DOF_CEILING}"
        )
    n_p = system.num_pressure_dofs
    if n_p > cap:
        return None

    free = system.free
    lu = splu(system.A[free][:, free].tocsc())
    Bt = system.B[:, free].T.toarray()  # (n_free, n_p)
    X = np.empty_like(Bt)
    for j0 in range(0, n_p, 64):
        X[:, j0 : j0 + 64] = lu.solve(Bt[:, j0 : j0 + 64])
    S = Bt.T @ X
    S = 0.5 * (S + S.T)

    Z = linalg.null_space(system.pressure_moments[None, :])
    M_p = system.pressure_mass().toarray()
    lam = linalg.eigh(Z.T @ S @ Z, Z.T @ M_p @ Z, eigvals_only=True)
    return float(np.sqrt(max(lam[0], 0.0)))


# -- consistency functionals ----------------------------------------------


def consistency_functionals(ops, case):
    """The three boundary functionals appearing in the discrete error equation.

    Each is returned as a vector over all velocity DOFs.  "gradient"
    pairs the trace mismatch of a test field with the projection residual
    of the exact velocity gradient; "pressure" does the same with the
    pressure residual; "stabilizer" is the jump form against the projected
    exact velocity.  "total" = gradient - pressure + stabilizer, the
    right-hand side of the error equation.
    """
    mesh, dofmap = ops.mesh, ops.dofmap
    d = case.data_degree
    gproj = project_gradient(ops, case.grad_u, d)
    pproj = project_pressure(ops, case.p, d)
    qu = project_velocity(ops, case.u, d)
    edge_ex = NONPOLY_EXACTNESS if d is None else d + ops.degree

    nk, ne = dofmap.dim_cell, dofmap.dim_edge
    ell = np.zeros(dofmap.num_velocity_dofs)
    theta = np.zeros_like(ell)
    stab = np.zeros_like(ell)

    for c in range(mesh.num_cells):
        normals = mesh.cell_normals(c)
        h = mesh.diameters[c]
        idofs = dofmap.interior_dofs(c)
        for s, e in enumerate(mesh.cell_edges[c]):
            erule = ops.edge_rule(e, edge_ex)
            pts, wts = erule.points, erule.weights
            kvals = ops.cell_basis[c].eval(pts)
            evals = ops.edge_basis[e].eval(pts)
            lowvals = ops.cell_basis_low[c].eval(pts)
            n = normals[s]
            edofs = dofmap.edge_dofs(e)

            grad_res = np.asarray(case.grad_u(pts), dtype=float) - np.einsum(
                "pr,ijr->pij", lowvals, gproj[c]
            )
            rvec = grad_res @ n  # (npts, 2)
            pres_res = np.asarray(case.p(pts), dtype=float) - lowvals @ pproj.cell(c)
            pvec = pres_res[:, None] * n[None, :]

            jump = ops.trace_jump(qu, c, s)  # (2, ne)
            mjump = jump @ ops.edge_mass[e].T / h
            R = ops.trace_proj[c][s]

            for i in (0, 1):
                cell_rows = idofs[i * nk : (i + 1) * nk]
                edge_rows = edofs[i * ne : (i + 1) * ne]
                ell[cell_rows] += kvals.T @ (wts * rvec[:, i])
                ell[edge_rows] -= evals.T @ (wts * rvec[:, i])
                theta[cell_rows] += kvals.T @ (wts * pvec[:, i])
                theta[edge_rows] -= evals.T @ (wts * pvec[:, i])
                stab[cell_rows] += R.T @ mjump[i]
                stab[edge_rows] -= mjump[i]

    return {
        "gradient": ell,
        "pressure": theta,
        "stabilizer": stab,
        "total": ell - theta + stab,
    }


def dual_norms(system, vectors):
    """Dual energy norms of functionals over the homogeneous test space.

    For each vector L the value is sup over v of L(v)/|||v|||, realized as
    sqrt(L' A_ff^{-1} L) on the free DOFs; one factorization serves all.
    """
    free = system.free
    lu = splu(system.A[free][:, free].tocsc())
    out = {}
    for name, vec in vectors.items():
        r = vec[free]
        out[name] = float(np.sqrt(max(r @ lu.solve(r), 0.0)))
    return out


def consistency_dual_norms(system, case):
    """Dual norms of the error-equation functionals for one case."""
    return dual_norms(system, consistency_functionals(system.ops, case))


def verify_error_equation(system, case, report, n_random=50, seed=0):
    """Residuals of the discrete error equation for a computed solution.

    The momentum identity pairs the projected-minus-computed errors with
    random homogeneous test fields; the returned worst value is relative
    to the test field's energy norm (evaluated as the A quadratic form,
    which the energy-identity check guarantees matches the norm).  The
    mass identity is checked against every pressure test function at once
    via the dual norm of the weak divergence moments of the velocity error.
    """
    ops = system.ops
    d = case.data_degree
    qu = project_velocity(ops, case.u, d)
    qp = project_pressure(ops, case.p, d)
    e_vec = qu.coeffs - report.velocity.coeffs
    eps_vec = qp.coeffs - report.pressure.coeffs
    phi = consistency_functionals(ops, case)["total"]
    residual = system.A @ e_vec - system.B.T @ eps_vec - phi

    free = system.free
    A_ff = system.A[free][:, free]
    rng = np.random.default_rng(seed)
    tests = rng.standard_normal((len(free), n_random))
    energies = np.sqrt(np.einsum("if,if->f", tests, A_ff @ tests))
    worst = float(np.max(np.abs(residual[free] @ tests) / energies))

    moments = system.B @ e_vec
    mass = 0.0
    for c in range(ops.mesh.num_cells):
        mb = moments[ops.dofmap.pressure_dofs(c)]
        mass += mb @ ops.solve_cell_mass(c, mb, degree=ops.degree - 1)
    return worst, float(np.sqrt(max(mass, 0.0)))


# -- convergence rates -----------------------------------------------------


def pairwise_rates(hs, values):
    """Observed order between consecutive levels; NaN where undefined."""
    hs = np.asarray(hs, dtype=float)
    vals = np.asarray(values, dtype=float)
    out = np.full(len(hs) - 1, np.nan)
    for i in range(len(out)):
        if vals[i] > 0 and vals[i + 1] > 0 and hs[i] != hs[i + 1]:
            out[i] = np.log(vals[i] / vals[i + 1]) / np.log(hs[i] / hs[i + 1])
    return out


def fit_rate(hs, values, window=3):
    """Least-squares slope of log(error) vs log(h) over the finest levels.

    Uses the last min(window, len) levels; returns None when fewer than
    two usable (positive) values remain.
    """
    hs = np.asarray(hs, dtype=float)
    vals = np.asarray(values, dtype=float)
    n = min(window, len(hs))
    h, v = hs[-n:], vals[-n:]
    keep = v > 0
    if keep.sum() < 2:
        return None
    return float(np.polyfit(np.log(h[keep]), np.log(v[keep]), 1)[0])


def rate_label(hs, values, window=3, exact_tol=EXACT_TOL):
    """Rate column entry: a fitted slope, "exact", or blank."""
    vals = np.asarray(values, dtype=float)
    if len(vals) and np.all(vals <= exact_tol):
        return "exact"
    rate = fit_rate(hs, values, window)
    return "" if rate is None else f"{rate:.3f}"


# -- study records ---------------------------------------------------------


class ConvergenceRecord:
    """Per-level error rows of one convergence study, with CSV output."""

    def __init__(self):
        self.rows = []

    def add(self, level, h, cells, errors, beta_h=None):
        row = {"level": int(level), "h": float(h), "cells": int(cells), "beta_h": beta_h}
        row.update(errors.as_dict())
        self.rows.append(row)

    @property
    def hs(self):
        return [row["h"] for row in self.rows]

    def column(self, name):
        return [row[name] for row in self.rows]

    def rates(self, window=3):
        """Rate label for each error column."""
        return {name: rate_label(self.hs, self.column(name), window) for name in ERROR_COLUMNS}

    def write_csv(self, path, window=3):
        """Write the per-level table plus a trailing rates row.

        Floats are written with repr so identical runs produce identical
        bytes.
        """
        rates = self.rates(window)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in self.rows:
                beta = "" if row["beta_h"] is None else repr(float(row["beta_h"]))
                writer.writerow(
                    [row["level"], repr(row["h"]), row["cells"]]
                    + [repr(float(row[name])) for name in ERROR_COLUMNS]
                    + [beta]
                )
            writer.writerow(["rates", "", ""] + [rates[name] for name in ERROR_COLUMNS] + [""])

    def format_table(self, window=3):
        """Human-readable fixed-width table for terminal output."""
        header = f"{'level':>5} {'h':>10} {'cells':>7}" + "".join(
            f"{name:>14}" for name in ERROR_COLUMNS
        ) + f"{'beta_h':>10}"
        lines = [header]
        for row in self.rows:
            beta = "" if row["beta_h"] is None else f"{row['beta_h']:.4f}"
            lines.append(
                f"{row['level']:>5} {row['h']:>10.4e} {row['cells']:>7}"
                + "".join(f"{row[name]:>14.4e}" for name in ERROR_COLUMNS)
                + f"{beta:>10}"
            )
        rates = self.rates(window)
        lines.append(
            f"{'rates':>5} {'':>10} {'':>7}"
            + "".join(f"{rates[name]:>14}" for name in ERROR_COLUMNS)
            + f"{'':>10}"
        )
        return "\n".join(lines)

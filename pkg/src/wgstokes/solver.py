"""Saddle-point solves, with optional static condensation.

The solved system couples the free velocity DOFs (interior blocks plus
interior-edge blocks), all pressure DOFs, and one Lagrange multiplier
enforcing the zero-mean pressure gauge:

    [ A_ff   -B_fᵀ   0 ] [u_f]   [F_f - A_fx u_x]
    [ -B_f    0      m ] [ p ] = [    B_x u_x    ]
    [  0      mᵀ     0 ] [ γ ]   [       0       ]

where x marks the eliminated Dirichlet DOFs and m holds the pressure
basis integrals.  For compatible boundary data the multiplier γ vanishes
(up to roundoff).  The default path factorizes the sparse matrix
directly; a MINRES path exists behind a flag.  Static condensation
eliminates the per-cell interior velocity blocks through dense local
Schur complements before the global solve.
"""

import json
import time

import numpy as np
from scipy import sparse
from scipy.linalg import cho_factor, cho_solve
from scipy.sparse.linalg import LinearOperator, minres, splu

from .errors import SolverError
from .spaces import PressureFunction, WeakFunction


class SolveReport:
    """Solution plus algebraic diagnostics."""

    def __init__(
        self,
        velocity,
        pressure,
        multiplier,
        residual,
        momentum_residual,
        mass_residual,
        method,
        condensed,
        num_free_velocity,
        num_pressure,
        num_reduced,
        wall_time,
        iterations=None,
    ):
        self.velocity = velocity
        self.pressure = pressure
        self.multiplier = multiplier
        self.residual = residual
        self.momentum_residual = momentum_residual
        self.mass_residual = mass_residual
        self.method = method
        self.condensed = condensed
        self.num_free_velocity = num_free_velocity
        self.num_pressure = num_pressure
        self.num_reduced = num_reduced
        self.wall_time = wall_time
        self.iterations = iterations

    def to_json(self):
        return json.dumps(
            {
                "method": self.method,
                "condensed": self.condensed,
                "residual": self.residual,
                "momentum_residual": self.momentum_residual,
                "mass_residual": self.mass_residual,
                "multiplier": self.multiplier,
                "num_free_velocity": self.num_free_velocity,
                "num_pressure": self.num_pressure,
                "num_reduced": self.num_reduced,
                "wall_time": self.wall_time,
                "iterations": self.iterations,
            }
        )


def solve(system, method="direct", condense=False, residual_tol=1e-10, minres_rtol=1e-12):
    """Solve an assembled SaddleSystem.

    Parameters
    ----------
    system : SaddleSystem
    method : {"direct", "minres"}
        Sparse LU factorization (default) or preconditioned MINRES.
    condense : bool
        Eliminate interior velocity DOFs cell-by-cell first, solve the
        reduced system, then recover the interior unknowns.
    residual_tol : float
        Maximum admissible relative algebraic residual.
    """
    t0 = time.perf_counter()
    free = system.free
    fixed = system.fixed_mask
    ubar = system.fixed_values
    A, B, m = system.A, system.B, system.pressure_moments
    n_p = system.num_pressure_dofs

    A_ff = A[free][:, free].tocsr()
    B_f = B[:, free].tocsr()
    rhs_u = system.load[free] - A[free][:, fixed] @ ubar[fixed]
    rhs_p = B[:, fixed] @ ubar[fixed]
    rhs = np.concatenate([rhs_u, rhs_p, [0.0]])

    if condense:
        u_f, p, gamma, n_reduced = _condensed_solve(system, A_ff, B_f, rhs_u, rhs_p)
        iterations = None
    else:
        n_reduced = None
        K = _saddle_matrix(A_ff, B_f, m)
        if method == "direct":
            try:
                x = splu(K).solve(rhs)
            except RuntimeError as err:  # singular factorization
                raise SolverError(f"sparse factorization failed: {err}") from err
            iterations = None
        elif method == "minres":
            x, iterations = _minres_solve(system, K, rhs, minres_rtol)
        else:
            raise SolverError(f"unknown solve method {method!r}")
        u_f = x[: len(free)]
        p = x[len(free) : len(free) + n_p]
        gamma = float(x[-1])

    if not np.isfinite(u_f).all() or not np.isfinite(p).all():
        raise SolverError("solve produced non-finite values (singular system?)")

    # full velocity vector: solved free DOFs + projected boundary data
    u_full = ubar.copy()
    u_full[free] = u_f

    # residuals on the full system (momentum tested on free rows only)
    r_mom = (A @ u_full - B.T @ p)[free] - system.load[free]
    r_mass = B @ u_full - m * gamma
    r_mean = float(m @ p)
    scale = max(float(np.linalg.norm(rhs)), 1e-30)
    momentum_residual = float(np.linalg.norm(r_mom))
    mass_residual = float(np.linalg.norm(r_mass))
    residual = float(np.sqrt(momentum_residual**2 + mass_residual**2 + r_mean**2)) / scale
    if not residual <= residual_tol and np.linalg.norm(rhs) > 0:
        raise SolverError(
            f"relative algebraic residual {residual:.3e} exceeds {residual_tol:g}"
        )

    # pressure gauge: remove the roundoff-level mean
    p = p - _pressure_mean(system, p)
    pressure = PressureFunction(system.ops.dofmap, p)
    velocity = WeakFunction(system.ops.dofmap, u_full)

    return SolveReport(
        velocity=velocity,
        pressure=pressure,
        multiplier=gamma,
        residual=residual,
        momentum_residual=momentum_residual,
        mass_residual=mass_residual,
        method="condensed-direct" if condense else method,
        condensed=condense,
        num_free_velocity=len(free),
        num_pressure=n_p,
        num_reduced=n_reduced,
        wall_time=time.perf_counter() - t0,
        iterations=iterations,
    )


def _pressure_mean(system, p):
    """Mean-value coefficient shift: returns c with mean(p - c*1) = 0.

    The constant function has coefficient 1 on each cell's first basis
    function only for the raw monomial basis; compute the shift through
    the moment vector to stay basis-agnostic.
    """
    m = system.pressure_moments
    mean = float(m @ p)  # integral of p_h over the domain
    area = float(system.ops.mesh.areas.sum())
    shift = np.zeros_like(p)
    dofmap = system.ops.dofmap
    for c in range(system.ops.mesh.num_cells):
        # coefficients of the constant (mean/area) on cell c
        const = _constant_coeffs(system.ops, c) * (mean / area)
        shift[dofmap.pressure_dofs(c)] = const
    return shift


def _constant_coeffs(ops, c):
    """Coefficients representing the constant 1 in cell c's pressure basis."""
    basis = ops.cell_basis_low[c]
    if basis.transform is None:
        out = np.zeros(basis.dim)
        out[0] = 1.0
        return out
    # orthonormalized basis: solve the (tiny) Vandermonde-free projection
    moments = ops.cell_moments(c, lambda pts: np.ones(len(pts)), ops.degree - 1, 0)
    return ops.solve_cell_mass(c, moments, degree=ops.degree - 1)


def _saddle_matrix(A_ff, B_f, m):
    mcol = sparse.csc_matrix(m[:, None])
    K = sparse.bmat(
        [[A_ff, -B_f.T, None], [-B_f, None, mcol], [None, mcol.T, None]], format="csc"
    )
    return K


def _minres_solve(system, K, rhs, rtol):
    """MINRES with a block-diagonal preconditioner: diag(A) and pressure mass."""
    n_u = len(system.free)
    n_p = system.num_pressure_dofs
    diag_a = K.diagonal()[:n_u]
    diag_a = np.where(diag_a > 0, diag_a, 1.0)
    Mp = system.pressure_mass()
    Mp_factor = splu(Mp.tocsc())
    gamma_scale = float(np.mean(Mp.diagonal()))

    def apply_prec(r):
        out = np.empty_like(r)
        out[:n_u] = r[:n_u] / diag_a
        out[n_u : n_u + n_p] = Mp_factor.solve(r[n_u : n_u + n_p])
        out[-1] = r[-1] / gamma_scale
        return out

    M = LinearOperator(K.shape, matvec=apply_prec)
    counter = {"n": 0}

    def cb(_):
        counter["n"] += 1

    x, info = minres(K, rhs, M=M, rtol=rtol, maxiter=50 * K.shape[0], callback=cb)
    if info != 0:
        raise SolverError(f"MINRES did not converge (info={info}, iters={counter['n']})")
    return x, counter["n"]


# -- static condensation ------------------------------------------------


def _condensed_solve(system, A_ff, B_f, rhs_u, rhs_p):
    """Eliminate interior velocity DOFs per cell, solve, and recover them.

    Interior DOFs couple only within their own cell, so the interior
    block of A_ff is block-diagonal and the Schur complement onto the
    edge and pressure unknowns assembles cell by cell.
    """
    ops = system.ops
    mesh = ops.mesh
    dofmap = ops.dofmap
    free = system.free
    m = system.pressure_moments

    # positions of each global free DOF inside the free numbering
    free_pos = np.full(dofmap.num_velocity_dofs, -1, dtype=int)
    free_pos[free] = np.arange(len(free))

    interior_free = []  # per cell: interior DOFs in free numbering
    edge_free = []  # per cell: free edge DOFs in free numbering
    for c in range(mesh.num_cells):
        interior_free.append(free_pos[dofmap.interior_dofs(c)])
        ed = np.concatenate([dofmap.edge_dofs(e) for e in mesh.cell_edges[c]])
        pos = free_pos[ed]
        edge_free.append(pos[pos >= 0])

    # reduced velocity unknowns = free edge DOFs (keep their free-number order)
    is_interior = np.zeros(len(free), dtype=bool)
    for idx in interior_free:
        is_interior[idx] = True
    edge_unknowns = np.nonzero(~is_interior)[0]
    red_pos = np.full(len(free), -1, dtype=int)
    red_pos[edge_unknowns] = np.arange(len(edge_unknowns))
    n_e = len(edge_unknowns)
    n_p = system.num_pressure_dofs

    A_csr = A_ff.tocsr()
    B_csr = B_f.tocsr()

    S_rows, S_cols, S_vals = [], [], []  # Schur corrections to the edge block
    C_rows, C_cols, C_vals = [], [], []  # edge-pressure coupling corrections
    P_rows, P_cols, P_vals = [], [], []  # pressure-pressure block
    rhs_e = rhs_u[edge_unknowns].copy()
    rhs_q = rhs_p.copy()
    factors = []

    for c in range(mesh.num_cells):
        iloc = interior_free[c]
        eloc = edge_free[c]
        pdofs = dofmap.pressure_dofs(c)
        Aii = A_csr[iloc][:, iloc].toarray()
        Aie = A_csr[iloc][:, eloc].toarray()
        Bi = B_csr[pdofs][:, iloc].toarray()
        Fi = rhs_u[iloc]
        try:
            chol = cho_factor(Aii)
        except np.linalg.LinAlgError as err:
            raise SolverError(f"interior block of cell {c} is singular: {err}") from err
        factors.append((chol, Aie, Bi, iloc, eloc, pdofs))
        Zi = cho_solve(chol, Aie)  # Aii^{-1} A_ie
        Yi = cho_solve(chol, Bi.T)  # Aii^{-1} B_iᵀ
        wi = cho_solve(chol, Fi)  # Aii^{-1} F_i
        epos = red_pos[eloc]
        gr, gc = np.meshgrid(epos, epos, indexing="ij")
        S_rows.append(gr.ravel())
        S_cols.append(gc.ravel())
        S_vals.append(-(Aie.T @ Zi).ravel())
        gr, gc = np.meshgrid(epos, pdofs, indexing="ij")
        C_rows.append(gr.ravel())
        C_cols.append(gc.ravel())
        C_vals.append((Aie.T @ Yi).ravel())
        gr, gc = np.meshgrid(pdofs, pdofs, indexing="ij")
        P_rows.append(gr.ravel())
        P_cols.append(gc.ravel())
        P_vals.append(-(Bi @ Yi).ravel())
        rhs_e[epos] -= Aie.T @ wi
        rhs_q[pdofs] += Bi @ wi

    S_ee = A_csr[edge_unknowns][:, edge_unknowns] + sparse.coo_matrix(
        (np.concatenate(S_vals), (np.concatenate(S_rows), np.concatenate(S_cols))),
        shape=(n_e, n_e),
    ).tocsr()
    C = sparse.coo_matrix(
        (np.concatenate(C_vals), (np.concatenate(C_rows), np.concatenate(C_cols))),
        shape=(n_e, n_p),
    ).tocsr() - B_csr[:, edge_unknowns].T
    P = sparse.coo_matrix(
        (np.concatenate(P_vals), (np.concatenate(P_rows), np.concatenate(P_cols))),
        shape=(n_p, n_p),
    ).tocsr()
    mcol = sparse.csc_matrix(m[:, None])
    K_red = sparse.bmat(
        [[S_ee, C, None], [C.T, P, mcol], [None, mcol.T, None]], format="csc"
    )
    rhs_red = np.concatenate([rhs_e, rhs_q, [0.0]])
    try:
        x = splu(K_red).solve(rhs_red)
    except RuntimeError as err:
        raise SolverError(f"condensed factorization failed: {err}") from err
    u_e = x[:n_e]
    p = x[n_e : n_e + n_p]
    gamma = float(x[-1])

    # recover interior unknowns cell by cell
    u_f = np.zeros(len(free))
    u_f[edge_unknowns] = u_e
    for c, (chol, Aie, Bi, iloc, eloc, pdofs) in enumerate(factors):
        rhs_i = rhs_u[iloc] - Aie @ u_f[eloc] + Bi.T @ p[pdofs]
        u_f[iloc] = cho_solve(chol, rhs_i)
    n_reduced = n_e + n_p + 1
    return u_f, p, gamma, n_reduced

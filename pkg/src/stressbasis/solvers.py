"""Expansion-coefficient solvers and reconstruction of the approximate stress.

Given an equilibrated particular field sigma_p and a verified basis, the
approximate stress is sigma^N = sigma_p + sum_j a_j phi_j with coefficients
from one of three principles:

* ``SE``      -- strain-energy minimization: solve M a = f with
                 M(i,j) = <C^-1 phi_j, phi_i>, f(i) = -<C^-1 sigma_p, phi_i>;
* ``PT``      -- planar-trace projection: a_i = -<trace(sigma_p), trace(phi_i)>
                 (material-blind by construction);
* ``PT_body`` -- planar-trace projection with a body-force potential V:
                 a_i = -<trace(sigma_p) - V/(1-nu), trace(phi_i)>.

Diagnostics (objective, strain energy, approximation error against an oracle)
are reported for every n in the requested schedule from a single assembly.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .basis import BasisSet
from .fields import (ScalarField, SymTensorField2, theta_factors,
                     trace_theta_factor, _ops)
from .materials import Material, compliance_quad, strain_energy
from .meshes import RadialMesh


class SolverError(RuntimeError):
    pass


@dataclass
class Approximation:
    """Coefficients, reconstructed field, and per-n diagnostics of one solve."""

    coeffs: np.ndarray
    sigma_N: SymTensorField2
    principle: str
    diagnostics: dict
    mode_indices: list = dc_field(default_factory=list)


def _select_indices(basis: BasisSet, sigma_p: SymTensorField2, N: int):
    if isinstance(sigma_p.mesh, RadialMesh):
        idx = basis.select(m=sigma_p.m, parity=sigma_p.parity)
        if not idx:
            raise SolverError(
                f"basis holds no modes with tag (m={sigma_p.m}, {sigma_p.parity})")
    else:
        idx = basis.select()
    if N > len(idx):
        raise SolverError(f"N={N} exceeds the {len(idx)} available basis modes")
    if basis.mesh != sigma_p.mesh:
        raise SolverError("basis and particular field live on different meshes")
    return idx[:N]


def _area_weights(mesh):
    ops = _ops(mesh)
    if isinstance(mesh, RadialMesh):
        return ops.wq * ops.rq
    return ops.qw


def _tensor_products(mesh, m, parity, Aq, Phi):
    """<A, phi_i> for quadrature fields: Aq (3, nq), Phi (3, nq, k)."""
    w = _area_weights(mesh)
    if isinstance(mesh, RadialMesh):
        fn, fs = theta_factors(m, parity)
        return (fn * np.einsum("q,q,qk->k", w, Aq[0], Phi[0])
                + fn * np.einsum("q,q,qk->k", w, Aq[1], Phi[1])
                + 2 * fs * np.einsum("q,q,qk->k", w, Aq[2], Phi[2]))
    return (np.einsum("q,q,qk->k", w, Aq[0], Phi[0])
            + np.einsum("q,q,qk->k", w, Aq[1], Phi[1])
            + 2 * np.einsum("q,q,qk->k", w, Aq[2], Phi[2]))


def _tensor_gram(mesh, m, parity, Aq, Bq):
    """Gram <A_i, B_j> for mode stacks (3, nq, k)."""
    w = _area_weights(mesh)
    if isinstance(mesh, RadialMesh):
        fn, fs = theta_factors(m, parity)
        return (fn * np.einsum("q,qi,qj->ij", w, Aq[0], Bq[0])
                + fn * np.einsum("q,qi,qj->ij", w, Aq[1], Bq[1])
                + 2 * fs * np.einsum("q,qi,qj->ij", w, Aq[2], Bq[2]))
    return (np.einsum("q,qi,qj->ij", w, Aq[0], Bq[0])
            + np.einsum("q,qi,qj->ij", w, Aq[1], Bq[1])
            + 2 * np.einsum("q,qi,qj->ij", w, Aq[2], Bq[2]))


def _compliance_on_stack(material: Material, mesh, Phi):
    """C^-1 applied to a mode stack (3, nq, k)."""
    ops = _ops(mesh)
    if material.kind == "isotropic":
        if material.uniform:
            Y = float(material.Y)
        else:
            Y = material._modulus_on_quad(mesh)[:, None]
        nu = material.nu
        exx = ((1 - nu**2) * Phi[0] - nu * (1 + nu) * Phi[1]) / Y
        eyy = ((1 - nu**2) * Phi[1] - nu * (1 + nu) * Phi[0]) / Y
        exy = (1 + nu) * Phi[2] / Y
        return np.stack([exx, eyy, exy])
    nxy = material.nu_xy
    exx = (1 - nxy**2) * Phi[0] / material.Y_x \
        - nxy * (1 + nxy) * Phi[1] / material.Y_y
    eyy = -nxy * (1 + nxy) * Phi[0] / material.Y_y \
        + (1 - nxy**2) * Phi[1] / material.Y_y
    exy = Phi[2] / (2 * material.G_xy)
    return np.stack([exx, eyy, exy])


def assemble_se_system(basis: BasisSet, sigma_p: SymTensorField2,
                       material: Material, N: int):
    """The strain-energy normal system (M, f) for the leading N modes."""
    idx = _select_indices(basis, sigma_p, N)
    mesh = basis.mesh
    Phi = basis.quad_matrix(idx)
    CPhi = _compliance_on_stack(material, mesh, Phi)
    m, parity = sigma_p.m, sigma_p.parity
    M = _tensor_gram(mesh, m, parity, CPhi, Phi)
    M = 0.5 * (M + M.T)
    eq = compliance_quad(material, sigma_p)
    f = -_tensor_products(mesh, m, parity, eq, Phi)
    return M, f


def _trace_vector(basis, idx, sbar_quad, mesh, m, parity):
    """<sbar, trace(phi_i)> for a scalar quadrature field."""
    Phi = basis.quad_matrix(idx)
    Tq = Phi[0] + Phi[1]
    w = _area_weights(mesh)
    if isinstance(mesh, RadialMesh):
        fac = trace_theta_factor(m, parity)
        return fac * np.einsum("q,q,qk->k", w, sbar_quad, Tq)
    return np.einsum("q,q,qk->k", w, sbar_quad, Tq)


def _scalar_sq(mesh, m, parity, g):
    w = _area_weights(mesh)
    if isinstance(mesh, RadialMesh):
        return trace_theta_factor(m, parity) * float(np.dot(w, g * g))
    return float(np.dot(w, g * g))


def _reconstruct(sigma_p, basis, idx, a):
    parts = [(1.0, sigma_p)] + [(float(a[j]), basis.modes[i])
                                for j, i in enumerate(idx) if a[j] != 0.0]
    return SymTensorField2(sigma_p.mesh, m=sigma_p.m, parity=sigma_p.parity,
                           parts=parts)


def _oracle_terms(basis, idx, sigma_p, sigma_true, material):
    """Quadratic-form ingredients of E_n = |sigma^n - sigma_true|_E / |sigma_true|_E."""
    mesh = sigma_p.mesh
    d = sigma_p - sigma_true
    dd = strain_energy(material, d)
    Cd = compliance_quad(material, d)
    Phi = basis.quad_matrix(idx)
    g = _tensor_products(mesh, sigma_p.m, sigma_p.parity, Cd, Phi)
    CPhi = _compliance_on_stack(material, mesh, Phi)
    Mse = _tensor_gram(mesh, sigma_p.m, sigma_p.parity, CPhi, Phi)
    denom = strain_energy(material, sigma_true)
    if denom <= 0:
        raise SolverError("oracle stress has zero energy")
    return dd, g, 0.5 * (Mse + Mse.T), denom


def _schedule(N, ns):
    if ns is None:
        return list(range(1, N + 1))
    ns = sorted(set(int(n) for n in ns))
    if not ns or ns[0] < 0 or ns[-1] > N:
        raise SolverError("report schedule must lie within [0, N]")
    return ns


def solve_strain_energy(sigma_p: SymTensorField2, basis: BasisSet,
                        material: Material, N: int, ns=None,
                        oracle: SymTensorField2 | None = None) -> Approximation:
    """Coefficients by strain-energy minimization (M a = f, SPD factorization)."""
    idx = _select_indices(basis, sigma_p, N)
    M, f = assemble_se_system(basis, sigma_p, material, N)
    Ep = strain_energy(material, sigma_p)
    if oracle is not None:
        dd, g, _, denom = _oracle_terms(basis, idx, sigma_p, oracle, material)
    sched = _schedule(N, ns)
    objective = np.empty(len(sched))
    energy = np.empty(len(sched))
    errors = np.empty(len(sched)) if oracle is not None else None
    a = np.zeros(N)
    for k, n in enumerate(sched):
        if n == 0:
            an = np.zeros(0)
        else:
            try:
                L = np.linalg.cholesky(M[:n, :n])
            except np.linalg.LinAlgError as exc:
                raise SolverError(
                    f"SE system is not positive definite at n={n}: "
                    "broken basis or material") from exc
            an = np.linalg.solve(L.T, np.linalg.solve(L, f[:n]))
        En = Ep - 2 * an @ f[:n] + an @ M[:n, :n] @ an
        objective[k] = En
        energy[k] = En
        if oracle is not None:
            e2 = (dd + 2 * an @ g[:n] + an @ M[:n, :n] @ an) / denom
            errors[k] = np.sqrt(max(e2, 0.0))
        if n == N:
            a = an
    diag = {"n": np.array(sched), "objective": objective, "energy": energy,
            "condition": float(np.linalg.cond(M)) if N else 1.0}
    if errors is not None:
        diag["E_N"] = errors
    return Approximation(a, _reconstruct(sigma_p, basis, idx, a), "SE", diag,
                         list(idx))


def _pt_like(sigma_p, basis, N, ns, sbar_quad, principle):
    idx = _select_indices(basis, sigma_p, N)
    mesh = sigma_p.mesh
    t = _trace_vector(basis, idx, sbar_quad, mesh, sigma_p.m, sigma_p.parity)
    Gt = basis.trace_gram[np.ix_(idx, idx)]
    a = -t
    Tp = _scalar_sq(mesh, sigma_p.m, sigma_p.parity, sbar_quad)
    sched = _schedule(N, ns)
    objective = np.empty(len(sched))
    for k, n in enumerate(sched):
        an = a[:n]
        objective[k] = Tp + 2 * an @ t[:n] + an @ Gt[:n, :n] @ an
    diag = {"n": np.array(sched), "objective": objective}
    return Approximation(a, _reconstruct(sigma_p, basis, idx, a), principle,
                         diag, list(idx))


def solve_planar_trace(sigma_p: SymTensorField2, basis: BasisSet, N: int,
                       ns=None) -> Approximation:
    """Planar-trace projection. Never reads a material.

    Valid for homogeneous isotropic bodies with zero net force on every hole
    (caller's responsibility); each coefficient is an independent integral.
    """
    from .fields import planar_trace
    sbar = planar_trace(sigma_p).at_quad()
    return _pt_like(sigma_p, basis, N, ns, sbar, "PT")


def solve_planar_trace_body(sigma_p: SymTensorField2, basis: BasisSet,
                            V: ScalarField, nu: float, N: int,
                            ns=None) -> Approximation:
    """Planar-trace projection with body-force potential V (b = -grad V)."""
    from .fields import planar_trace
    sbar = planar_trace(sigma_p).at_quad() - V.at_quad() / (1.0 - nu)
    return _pt_like(sigma_p, basis, N, ns, sbar, "PT_body")


def energy_series(approx: Approximation, sigma_p: SymTensorField2,
                  basis: BasisSet, material: Material) -> np.ndarray:
    """Strain energy of sigma^n for every n in the recorded schedule.

    Used to attach the energy column to material-blind (PT) solves.
    """
    idx = approx.mode_indices
    mesh = sigma_p.mesh
    Phi = basis.quad_matrix(idx)
    CPhi = _compliance_on_stack(material, mesh, Phi)
    M = _tensor_gram(mesh, sigma_p.m, sigma_p.parity, CPhi, Phi)
    M = 0.5 * (M + M.T)
    eq = compliance_quad(material, sigma_p)
    q = _tensor_products(mesh, sigma_p.m, sigma_p.parity, eq, Phi)
    Ep = strain_energy(material, sigma_p)
    a = approx.coeffs
    out = np.empty(len(approx.diagnostics["n"]))
    for k, n in enumerate(approx.diagnostics["n"]):
        an = a[:n]
        out[k] = Ep + 2 * an @ q[:n] + an @ M[:n, :n] @ an
    return out


def error_series(approx: Approximation, sigma_p: SymTensorField2,
                 basis: BasisSet, material: Material,
                 sigma_true: SymTensorField2) -> np.ndarray:
    """E_n against an oracle for every n in the recorded schedule."""
    idx = approx.mode_indices
    dd, g, M, denom = _oracle_terms(basis, idx, sigma_p, sigma_true, material)
    a = approx.coeffs
    out = np.empty(len(approx.diagnostics["n"]))
    for k, n in enumerate(approx.diagnostics["n"]):
        an = a[:n]
        e2 = (dd + 2 * an @ g[:n] + an @ M[:n, :n] @ an) / denom
        out[k] = np.sqrt(max(e2, 0.0))
    return out


def galerkin_residual(approx: Approximation, sigma_p: SymTensorField2,
                      basis: BasisSet, material: Material) -> float:
    """max_i |<C^-1 sigma^N, phi_i>| over the solved modes (SE optimality)."""
    idx = approx.mode_indices
    mesh = sigma_p.mesh
    Phi = basis.quad_matrix(idx)
    eq = compliance_quad(material, approx.sigma_N)
    r = _tensor_products(mesh, sigma_p.m, sigma_p.parity, eq, Phi)
    return float(np.max(np.abs(r)))

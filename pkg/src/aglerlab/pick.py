"""Tangential Agler-Pick interpolation on finite node sets.

Data are node matrices a(x), b(x); feasibility is the positivity of
(a a^* - b b^*) against the admissible kernels and is certified exactly as
in the realization solver.  A feasible certificate synthesizes, through the
lurking isometry, a contractive-valued transfer function W with
b(x) = a(x) W(x) at the nodes, evaluable anywhere in the domain.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import DEFAULT_TOL, hermitize, min_eig, polar_isometry, psd_clip
from .auxfun import AuxFunctionSample, monomial_rows_at
from .kernels import (HermitianKernel, PointSample, is_admissible, kolmogorov,
                      psd_check, szego_factor)
from .preorder import MultiIndex, Preordering, classify, weight
from .realize import (AglerCertificate, Colligation, DecomposeResult, FunctionSample,
                      SolverParams, Witness, _solve_iterative, eval_transfer, pairing)


@dataclass(frozen=True)
class PickProblem:
    """Nodes with target data a(x), b(x) of common shape m x p."""

    nodes: PointSample
    a: np.ndarray  # (N, m, p)
    b: np.ndarray  # (N, m, p)
    preordering: Preordering

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        b = np.asarray(self.b, dtype=complex)
        if a.ndim == 1:
            a = a[:, None, None]
        if b.ndim == 1:
            b = b[:, None, None]
        N = self.nodes.n_points
        if a.shape[0] != N or b.shape != a.shape or a.ndim != 3:
            raise ValueError(f"need matching (N, m, p) data, got {a.shape} and {b.shape}")
        if self.preordering.d != self.nodes.d:
            raise ValueError("preordering dimension != node dimension")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return self.a.shape[1]

    @property
    def p(self) -> int:
        return self.a.shape[2]

    def target_blocks(self) -> np.ndarray:
        """(a_x a_y^* - b_x b_y^*) as (N, N, m, m) blocks."""
        return (np.einsum("xij,ykj->xyik", self.a, self.a.conj())
                - np.einsum("xij,ykj->xyik", self.b, self.b.conj()))


def pick_feasible(problem: PickProblem,
                  params: SolverParams | None = None) -> DecomposeResult:
    """Certificate or verified witness for (a a^* - b b^*) positivity.

    Ample preorderings reduce to a single eigenvalue test against the
    Szego kernel; otherwise the general decomposition solver runs with the
    Pick target in place of c^2 - phi phi^*.
    """
    params = params or SolverParams()
    cls = classify(problem.preordering)
    if cls.is_ample and not params.force_iterative:
        return _ample_pick(problem, cls.lambda_max, params)
    phi_like = FunctionSample(problem.nodes,
                              np.zeros((problem.nodes.n_points, problem.m, problem.m)))
    return _solve_iterative(phi_like, problem.preordering, 1.0, params,
                            R_blocks=problem.target_blocks())


def _ample_pick(problem: PickProblem, lam_m: MultiIndex,
                params: SolverParams) -> DecomposeResult:
    R = problem.target_blocks()
    ks = szego_factor(problem.nodes, lam_m)
    G = HermitianKernel(problem.nodes, R * ks[:, :, None, None])
    A = hermitize(G.assembled())
    w, V = np.linalg.eigh(A)
    scale = max(np.abs(w).max(), 1.0)
    if w.min() >= -params.feas_tol * scale:
        cert = AglerCertificate(
            {lam_m: HermitianKernel.from_assembled(problem.nodes, psd_clip(A))}, 0.0, 1.0)
        return DecomposeResult("feasible", cert, None, 0.0, 0)
    u = V[:, 0]
    wvec = u.conj().reshape(problem.nodes.n_points, problem.m)
    blocks = np.einsum("xy,xi,yj->xyij", ks, wvec, wvec.conj())
    kern = HermitianKernel(problem.nodes, blocks)
    report = is_admissible(kern, problem.preordering, 1e-12)
    _, lo = psd_check(kern, 1e-12)
    val = pairing(R, kern)
    if report.admissible and val < -params.feas_tol * max(np.abs(kern.blocks).max(), 1e-300):
        wit = Witness(kern, val, lo, report.worst_eig)
        return DecomposeResult("infeasible", None, wit, float(-w.min()), 0)
    return DecomposeResult("unresolved", None, None, float(-w.min()), 0)


def sigma_model_min_eig(problem: PickProblem, sigma_ext: AuxFunctionSample) -> float:
    """Min eigenvalue of ((a a^* - b b^*) (x) 1_n) * (1 - sigma sigma^*)^{-1}.

    The sigma-model analogue of the Szego test.  Exact only for a true
    extended auxiliary function; with a finite-stage extension this is a
    diagnostic whose error is bounded by the extension's defect quality,
    so agreement with pick_feasible is asserted only on instances whose
    feasibility margin dominates that defect.
    """
    if sigma_ext.sample != problem.nodes:
        raise ValueError("extended sigma sample must live on the node set")
    N, n = problem.nodes.n_points, sigma_ext.n
    R = problem.target_blocks()
    m = problem.m
    big = np.zeros((N * m * n, N * m * n), dtype=complex)
    for x in range(N):
        for y in range(N):
            ksig = np.linalg.inv(np.eye(n) - sigma_ext.sigmas[x] @ sigma_ext.sigmas[y].conj().T)
            big[x * m * n:(x + 1) * m * n, y * m * n:(y + 1) * m * n] = np.kron(R[x, y], ksig)
    return min_eig(big)


@dataclass(frozen=True)
class PickSolution:
    """Synthesized interpolant: b(x) = a(x) W(x) at the nodes."""

    colligation: Colligation
    node_residual: float

    def evaluate(self, point) -> np.ndarray:
        """W at an arbitrary domain point; contractive for unitary colligations."""
        return eval_transfer(self.colligation, point)


def pick_solve(problem: PickProblem, cert: AglerCertificate,
               feas_tol: float = 1e-8, rank_tol: float = DEFAULT_TOL) -> PickSolution:
    """Lurking isometry on the Pick defect identity.

    From a a^* - b b^* = sum Gamma_lam * defect_lam, the vector families
    built on (gamma (x) psi^-, a^*) and (gamma (x) psi^+, b^*) have equal
    Gram matrices, so a unitary on state (+) C^p maps one to the other; its
    transfer function is the p x p contractive multiplier W with b = a W
    at every node.
    """
    sample = problem.nodes
    N, m, p = sample.n_points, problem.m, problem.p
    lams = cert.lambdas()
    gammas, mults, ns = {}, {}, {}
    for lam in lams:
        fac = kolmogorov(cert.gammas[lam], rank_tol)
        gammas[lam] = fac.gammas
        mults[lam] = fac.rank
        ns[lam] = 2 ** (weight(lam) - 1)
    E = sum(mults[lam] * ns[lam] for lam in lams)

    M_minus = np.zeros((E + p, N * m), dtype=complex)
    M_plus = np.zeros((E + p, N * m), dtype=complex)
    for x in range(N):
        cols = slice(x * m, (x + 1) * m)
        off = 0
        for lam in lams:
            pr, mr = monomial_rows_at(sample.points[x], lam)
            g = gammas[lam][x]  # (m, r)
            r = mults[lam]
            if r:
                M_plus[off:off + r * ns[lam], cols] = np.kron(g.conj().T, pr.conj()[:, None])
                M_minus[off:off + r * ns[lam], cols] = np.kron(g.conj().T, mr.conj()[:, None])
            off += r * ns[lam]
        M_minus[E:, cols] = problem.a[x].conj().T
        M_plus[E:, cols] = problem.b[x].conj().T

    gram_err = np.abs(M_plus.conj().T @ M_plus - M_minus.conj().T @ M_minus).max()
    scale = max(np.abs(M_minus).max() ** 2, 1.0)
    if gram_err > 100 * feas_tol * scale:
        raise ValueError(f"certificate rejected: Gram mismatch {gram_err:.3e}")

    U_, s_, Vh_ = np.linalg.svd(M_minus)
    rank = int((s_ > rank_tol * max(s_.max(initial=0.0), 1e-300)).sum())
    Um, Um_perp = U_[:, :rank], U_[:, rank:]
    pinv = Vh_[:rank].conj().T @ np.diag(1 / s_[:rank]) @ Um.conj().T
    images = polar_isometry(M_plus @ pinv @ Um)
    comp = np.eye(E + p) - images @ images.conj().T
    Uc, _, _ = np.linalg.svd(comp)
    images_perp = Uc[:, :E + p - rank]
    U_hat = np.hstack([images, images_perp]) @ np.hstack([Um, Um_perp]).conj().T
    U = U_hat.conj().T

    partition = tuple((lam, mults[lam]) for lam in lams if mults[lam])
    col = Colligation(U[:E, :E], U[:E, E:], U[E:, :E], U[E:, E:], partition)
    worst = 0.0
    for x in range(N):
        W = eval_transfer(col, sample.points[x])
        worst = max(worst, float(np.abs(problem.a[x] @ W - problem.b[x]).max()))
    return PickSolution(col, worst)


def corona_right_inverse(sample: PointSample, lam: MultiIndex,
                         preordering: Preordering,
                         params: SolverParams | None = None):
    """Toeplitz-corona instance a = psi^+_lam, b = (1, 0, ..., 0).

    Returns the per-node n-column omega with psi^+ omega = 1, the solution
    object for off-node evaluation, and the worst node residual.
    """
    params = params or SolverParams()
    cls = classify(preordering)
    if not cls.is_ample:
        raise ValueError("the corona reduction here needs an ample preordering")
    lam = tuple(int(v) for v in lam)
    N = sample.n_points
    n = 2 ** (weight(lam) - 1)
    a = np.zeros((N, 1, n), dtype=complex)
    b = np.zeros((N, 1, n), dtype=complex)
    for x in range(N):
        pr, _ = monomial_rows_at(sample.points[x], lam)
        a[x, 0, :] = pr
        b[x, 0, 0] = 1.0
    problem = PickProblem(sample, a, b, preordering)
    out = pick_feasible(problem, params)
    if not out.feasible:
        raise ArithmeticError(f"corona problem unexpectedly {out.status}")
    sol = pick_solve(problem, out.certificate, params.feas_tol)
    omegas = np.zeros((N, n, 1), dtype=complex)
    worst = 0.0
    for x in range(N):
        W = sol.evaluate(sample.points[x])
        omegas[x] = W[:, :1]
        pr, _ = monomial_rows_at(sample.points[x], lam)
        worst = max(worst, abs(pr @ omegas[x][:, 0] - 1.0))
    return omegas, sol, float(worst)


def pointwise_right_inverse(sample: PointSample, lam: MultiIndex) -> np.ndarray:
    """Sanity oracle omega(x) = psi^+(x)^* / |psi^+(x)|^2 (no norm bound claim)."""
    lam = tuple(int(v) for v in lam)
    N = sample.n_points
    n = 2 ** (weight(lam) - 1)
    out = np.zeros((N, n, 1), dtype=complex)
    for x in range(N):
        pr, _ = monomial_rows_at(sample.points[x], lam)
        out[x, :, 0] = pr.conj() / (np.linalg.norm(pr) ** 2)
    return out


def classical_pick_matrix(problem: PickProblem) -> np.ndarray:
    """Scalar d=1 cross-check: ((a_x conj(a_y) - b_x conj(b_y)) / (1 - z_x conj(z_y)))."""
    if problem.nodes.d != 1 or problem.m != 1 or problem.p != 1:
        raise ValueError("classical Pick matrix is the scalar one-variable form")
    z = problem.nodes.points[:, 0]
    a = problem.a[:, 0, 0]
    b = problem.b[:, 0, 0]
    num = np.outer(a, a.conj()) - np.outer(b, b.conj())
    den = 1 - np.outer(z, z.conj())
    return num / den

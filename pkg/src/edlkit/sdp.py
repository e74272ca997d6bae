"""Witness synthesis by semidefinite programming.

The synthesis problem: given a state rho and a family of particle subsets,
minimize Tr(W rho) over observables W that (a) are supported on the family,
(b) have unit trace, and (c) admit, for every canonical bipartition A, a
decomposition W = P_A + Q_A^{T_A} with P_A, Q_A both PSD. A negative optimum
certifies that measurements on the family's subsets detect genuine
multipartite entanglement, and the optimizer is the witness.

Everything is solved by a feasible-start barrier (Newton path-following)
method working in Pauli coordinates, where the partial transpose is a
diagonal sign flip. The witness coordinates and the P_A blocks are the
variables; each Q_A is eliminated exactly as Q_A = signs_A * (x_W - r_A), so
every iterate satisfies the equality constraints to machine precision and the
returned certificates are exactly feasible by construction. Deterministic:
no randomization anywhere, so identical inputs give identical iterates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import pauli
from .witness import ObservableExpr, Witness

DETECT_TOL = 1e-6  # alpha below -DETECT_TOL counts as detection


@dataclass(frozen=True)
class SolverTolerances:
    gap: float = 1e-7
    feas: float = 1e-8
    max_iter: int = 200


class SolverError(RuntimeError):
    """Raised when the barrier method fails to reach the gap tolerance."""

    def __init__(self, message: str, last_gap: float | None = None):
        super().__init__(message)
        self.last_gap = last_gap


@dataclass(frozen=True)
class SdpProblem:
    """Synthesis program data: support restriction, objective, cone structure."""

    n: int
    free_words: tuple[str, ...]        # allowed non-identity Pauli words
    target_vector: np.ndarray          # Tr(P rho) per free word
    bipartitions: tuple[frozenset[int], ...]
    identity_coeff: float              # fixed witness identity coordinate

    @property
    def dim(self) -> int:
        return 2**self.n


@dataclass
class SdpSolution:
    witness_expr: ObservableExpr
    alpha: float
    certificates: dict[frozenset[int], tuple[np.ndarray, np.ndarray]]
    duality_gap: float
    iterations: int


@dataclass
class SynthesisResult:
    solution: SdpSolution
    detected: bool
    p_noise: float | None

    @property
    def alpha(self) -> float:
        return self.solution.alpha

    def witness(self, family, label: str = "", target_state: str | None = None) -> Witness:
        return Witness(
            expr=self.solution.witness_expr,
            family=tuple(frozenset(s) for s in family),
            label=label,
            alpha=self.alpha,
            p_noise=self.p_noise,
            target_state=target_state,
        )


def build_problem(rho: np.ndarray, family) -> SdpProblem:
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    n = d.bit_length() - 1
    if 2**n != d or rho.shape != (d, d):
        raise ValueError("state dimension is not a power of two")
    fam = [frozenset(s) for s in family]
    if not fam:
        raise ValueError("family must be nonempty")
    for s in fam:
        if not s or not s <= set(range(1, n + 1)):
            raise ValueError(f"subset {sorted(s)} outside qubit range 1..{n}")
    words = pauli.all_words(n)
    free = [
        w
        for w in words[1:]
        if any(pauli.word_support(w) <= s for s in fam)
    ]
    x_rho = pauli.to_pauli_coords(rho)
    target = np.array([d * x_rho[pauli.word_index(w)] for w in free])
    return SdpProblem(
        n=n,
        free_words=tuple(free),
        target_vector=target,
        bipartitions=pauli.bipartitions(n),
        identity_coeff=1.0 / d,
    )


def _logdet_grad_hess(x: np.ndarray, basis: np.ndarray, basis_flat: np.ndarray):
    """(gradient, Hessian) of logdet M(x) in Pauli coordinates; M must be PD.

    grad[p] = Tr(M^-1 P_p);  hess[p,q] = -Tr(M^-1 P_p M^-1 P_q)  (returned
    positive, i.e. as the barrier curvature K with K[p,q] = +Tr(...)).
    """
    d = basis.shape[1]
    m = (x @ basis_flat).reshape(d, d)
    np.linalg.cholesky(m)  # fail fast (and loudly) if not PD
    minv = np.linalg.inv(m)
    grad = np.real(basis_flat @ minv.T.ravel())
    t = np.matmul(minv[None, :, :], basis)  # t[p] = M^-1 P_p
    tf = t.reshape(-1, d * d)
    ts = t.transpose(0, 2, 1).reshape(-1, d * d)
    hess = np.real(tf @ ts.T)
    return grad, hess


def _logdet(x: np.ndarray, basis_flat: np.ndarray, d: int) -> float | None:
    """log det of M(x), or None when M(x) is not positive definite."""
    m = (x @ basis_flat).reshape(d, d)
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return None
    return 2.0 * float(np.sum(np.log(np.real(np.diagonal(chol)))))


def synthesize(
    rho: np.ndarray, family, tol: SolverTolerances = SolverTolerances()
) -> SynthesisResult:
    """Solve the synthesis program; negative alpha means the family detects rho."""
    problem = build_problem(rho, family)
    n, d = problem.n, problem.dim
    big = 4**n
    basis = pauli.pauli_basis(n)
    basis_flat = basis.reshape(big, d * d)
    parts = problem.bipartitions
    signs = np.stack([pauli.pt_signs(n, a) for a in parts])
    free_idx = np.array([pauli.word_index(w) for w in problem.free_words], dtype=int)
    c = problem.target_vector
    nfree = len(free_idx)

    # Feasible start: W = I/2^n, P_A = Q_A = I/2^(n+1).
    w = np.zeros(nfree)
    r = np.zeros((len(parts), big))
    r[:, 0] = 0.5 / d

    nu = 2.0 * d * len(parts)  # total barrier parameter (two cones per bipartition)
    t_barrier = 1.0
    mu = 100.0
    iterations = 0

    def witness_coords(wv: np.ndarray) -> np.ndarray:
        xw = np.zeros(big)
        xw[0] = problem.identity_coeff
        xw[free_idx] = wv
        return xw

    def psi(tb: float, wv: np.ndarray, rv: np.ndarray) -> float:
        """Barrier merit; +inf outside the cone product."""
        xw = witness_coords(wv)
        total = tb * float(c @ wv)
        for a in range(len(parts)):
            for x in (rv[a], signs[a] * (xw - rv[a])):
                ld = _logdet(x, basis_flat, d)
                if ld is None:
                    return np.inf
                total -= ld
        return total

    while True:
        # Newton-center psi_t(w, r) = t*(c.w) - sum_A [logdet P_A + logdet Q_A].
        # Intermediate stages only need rough centering to keep the path jumps
        # sound; the final stage is polished so alpha carries the full gap bound.
        final_stage = nu / t_barrier <= tol.gap
        center_tol = 1e-10 if final_stage else 0.04
        for _ in range(60):
            if iterations >= tol.max_iter:
                raise SolverError(
                    f"no convergence after {tol.max_iter} Newton iterations",
                    last_gap=nu / t_barrier,
                )
            xw = witness_coords(w)
            grad_w = t_barrier * c.copy()
            schur = np.zeros((nfree, nfree))
            rhs_w = np.zeros(nfree)
            solves = []
            gammas = []
            try:
                for a in range(len(parts)):
                    q = signs[a] * (xw - r[a])
                    g_r, k_r = _logdet_grad_hess(r[a], basis, basis_flat)
                    g_q, k_q = _logdet_grad_hess(q, basis, basis_flat)
                    sg_q = signs[a] * g_q
                    gamma = -g_r + sg_q
                    grad_w -= sg_q[free_idx]
                    g_mat = (signs[a][:, None] * signs[a][None, :]) * k_q
                    b_mat = k_r + g_mat
                    gf = g_mat[:, free_idx]
                    sol = np.linalg.solve(
                        b_mat, np.concatenate([gamma[:, None], gf], axis=1)
                    )
                    schur += g_mat[np.ix_(free_idx, free_idx)] - gf.T @ sol[:, 1:]
                    rhs_w -= gf.T @ sol[:, 0]
                    solves.append(sol)
                    gammas.append(gamma)
                rhs_w -= grad_w
                dw = np.linalg.solve(schur, rhs_w)
            except np.linalg.LinAlgError:
                break  # curvature numerically singular: accept current center
            dr = np.stack(
                [sol[:, 1:] @ dw - sol[:, 0] for sol in solves]
            )
            lam2 = -(grad_w @ dw + sum(g @ s for g, s in zip(gammas, dr)))
            if not np.isfinite(lam2) or lam2 < 0:
                lam2 = 0.0  # curvature lost to roundoff: accept as centered
            base = psi(t_barrier, w, r)
            # Progress below the float resolution of psi is indistinguishable
            # from noise, so such a point counts as centered too.
            noise = 1e-13 * (1.0 + abs(base))
            if lam2 <= center_tol or 0.25 * lam2 <= noise:
                break
            step = 1.0
            while step > 1e-12:
                cand = psi(t_barrier, w + step * dw, r + step * dr)
                if cand <= base - 0.25 * step * lam2 + noise:
                    break
                step *= 0.5
            if step <= 1e-12:
                raise SolverError("line search failed", last_gap=nu / t_barrier)
            w = w + step * dw
            r = r + step * dr
            iterations += 1
        if final_stage:
            break
        t_barrier = min(mu * t_barrier, 2.0 * nu / tol.gap)

    xw = witness_coords(w)
    alpha = float(c @ w + 1.0 / d)  # constant term: Tr((I/2^n) rho) / 2^n * 2^n
    certificates = {}
    for a, part in enumerate(parts):
        p_mat = pauli.from_pauli_coords(r[a])
        q_mat = pauli.from_pauli_coords(signs[a] * (xw - r[a]))
        certificates[part] = (p_mat, q_mat)
    expr = ObservableExpr.from_coords(n, xw, eps=0.0)
    solution = SdpSolution(
        witness_expr=expr,
        alpha=alpha,
        certificates=certificates,
        duality_gap=nu / t_barrier,
        iterations=iterations,
    )
    detected = alpha < -DETECT_TOL
    p_noise = d * alpha / (d * alpha - 1.0) if detected else None
    return SynthesisResult(solution=solution, detected=detected, p_noise=p_noise)


def verify_witness(
    expr: ObservableExpr, tol: SolverTolerances = SolverTolerances()
) -> dict[frozenset[int], tuple[np.ndarray, np.ndarray]] | None:
    """PSD certificates (P_A, Q_A) with expr = P_A + Q_A^{T_A}, or None.

    For each bipartition the largest-margin decomposition is found by
    maximizing lambda subject to P_A >= lambda*I and Q_A >= lambda*I; the
    decomposition exists iff the optimal margin is nonnegative (up to the
    feasibility tolerance).
    """
    if expr.trace() <= 0:
        raise ValueError("expression must have positive trace")
    n = expr.n
    d = 2**n
    big = 4**n
    basis = pauli.pauli_basis(n)
    basis_flat = basis.reshape(big, d * d)
    xw = expr.coords()
    certificates = {}
    for part in pauli.bipartitions(n):
        achieved, _, p_mat, q_mat = _max_margin_split(xw, part, n, basis, basis_flat, tol)
        if achieved < -tol.feas:
            return None
        certificates[part] = (p_mat, q_mat)
    return certificates


def decomposition_margins(
    expr: ObservableExpr, tol: SolverTolerances = SolverTolerances()
) -> dict[frozenset[int], tuple[float, float]]:
    """Per-bipartition (best found, certified bound) margins of the P/Q split.

    The first number is the min eigenvalue across both blocks of the best
    decomposition found; the second is an upper bound on what any
    decomposition can achieve (inf when the solve stalled before a bound
    was established). A witness admits PSD certificates exactly when every
    best-found margin clears -tol.feas.
    """
    if expr.trace() <= 0:
        raise ValueError("expression must have positive trace")
    n = expr.n
    d = 2**n
    big = 4**n
    basis = pauli.pauli_basis(n)
    basis_flat = basis.reshape(big, d * d)
    xw = expr.coords()
    return {
        part: _max_margin_split(xw, part, n, basis, basis_flat, tol)[:2]
        for part in pauli.bipartitions(n)
    }


def _max_margin_split(xw, part, n, basis, basis_flat, tol):
    """Maximize min(eig P, eig Q) over splits W = P + Q^{T_A} of one bipartition.

    Returns (achieved, bound, P, Q): the best margin found, a certified upper
    bound on the optimal margin (inf when none was established), and the
    matrices realizing the best margin.
    """
    d = 2**n
    big = 4**n
    s = pauli.pt_signs(n, part)
    e0 = np.zeros(big)
    e0[0] = 1.0

    # Trivial splits first: all of W on one side. These settle every case
    # whose binding block is exactly PSD (projector witnesses in particular).
    best_margin = -np.inf
    best_pair = None
    for rc in (np.zeros(big), xw):
        p_mat = pauli.from_pauli_coords(rc)
        q_mat = pauli.from_pauli_coords(s * (xw - rc))
        margin = min(np.linalg.eigvalsh(p_mat)[0], np.linalg.eigvalsh(q_mat)[0])
        if margin > best_margin:
            best_margin, best_pair = margin, (p_mat, q_mat)
        if margin >= -tol.feas:
            return margin, np.inf, p_mat, q_mat

    r = xw / 2.0
    m_r = pauli.from_pauli_coords(r)
    m_q = pauli.from_pauli_coords(s * (xw - r))
    lam = float(
        min(np.linalg.eigvalsh(m_r)[0], np.linalg.eigvalsh(m_q)[0])
    ) - 1.0

    nu = 2.0 * d
    gap_goal = min(tol.gap, 0.25 * tol.feas)  # must resolve margins at feas scale
    t_barrier = 1.0
    mu = 100.0

    def phi(tb, lv, rv):
        """Barrier merit for the (maximized) margin program, negated; +inf outside."""
        total = -tb * lv
        for x in (rv - lv * e0, s * (xw - rv) - lv * e0):
            ld = _logdet(x, basis_flat, d)
            if ld is None:
                return np.inf
            total -= ld
        return total

    iterations = 0
    stalled = False
    while True:
        final_stage = nu / t_barrier <= gap_goal
        center_tol = 1e-10 if final_stage else 0.04
        for _ in range(60):
            if iterations > tol.max_iter:
                raise SolverError("margin solve stalled", last_gap=nu / t_barrier)
            u_r = r - lam * e0
            u_q = s * (xw - r) - lam * e0
            g_r, k_r = _logdet_grad_hess(u_r, basis, basis_flat)
            g_q, k_q = _logdet_grad_hess(u_q, basis, basis_flat)
            # maximize phi = t*lam + logdet(U_r) + logdet(U_q)
            grad_r = g_r - s * g_q
            grad_l = t_barrier - g_r[0] - g_q[0]
            g_mat = (s[:, None] * s[None, :]) * k_q
            h_rr = k_r + g_mat
            h_rl = -k_r[:, 0] + g_mat[:, 0]  # du_r/dlam = -e0, du_q/dr = -D, du_q/dlam = -e0
            h_ll = k_r[0, 0] + k_q[0, 0]
            try:
                sol = np.linalg.solve(
                    h_rr, np.concatenate([grad_r[:, None], h_rl[:, None]], axis=1)
                )
            except np.linalg.LinAlgError:
                stalled = True  # curvature numerically singular at extreme t
                break
            denom = h_ll - h_rl @ sol[:, 1]
            if not np.isfinite(denom) or denom <= 0:
                stalled = True
                break
            dlam = (grad_l - h_rl @ sol[:, 0]) / denom
            dr = sol[:, 0] - sol[:, 1] * dlam
            lam2 = grad_r @ dr + grad_l * dlam
            if not np.isfinite(lam2) or lam2 < 0:
                lam2 = 0.0
            base = phi(t_barrier, lam, r)
            noise = 1e-13 * (1.0 + abs(base))
            if lam2 <= center_tol or 0.25 * lam2 <= noise:
                break
            step = 1.0
            while step > 1e-12:
                cand = phi(t_barrier, lam + step * dlam, r + step * dr)
                if cand <= base - 0.25 * step * lam2 + noise:
                    break
                step *= 0.5
            if step <= 1e-12:
                stalled = True  # direction too noisy to make progress; move on
                break
            lam += step * dlam
            r = r + step * dr
            iterations += 1
        if lam > 0:
            break  # current split already has positive margin
        if not stalled and lam + 1.1 * nu / t_barrier < -tol.feas:
            break  # certified: no decomposition clears the tolerance
        if final_stage:
            break
        stalled = False
        t_barrier = min(mu * t_barrier, 2.0 * nu / gap_goal)

    # The pair sums to W exactly by construction, so the residual is pure
    # float rounding; the achieved margin is read off the matrices themselves
    # (>= lam, since the barrier keeps both blocks strictly above lam).
    p_mat = pauli.from_pauli_coords(r)
    q_mat = pauli.from_pauli_coords(s * (xw - r))
    achieved = float(
        min(np.linalg.eigvalsh(p_mat)[0], np.linalg.eigvalsh(q_mat)[0])
    )
    if achieved < best_margin:
        achieved = best_margin
        p_mat, q_mat = best_pair
    bound = lam + 1.1 * nu / t_barrier if not stalled else np.inf
    return achieved, max(bound, achieved), p_mat, q_mat


def edl_search(rho: np.ndarray, tol: SolverTolerances = SolverTolerances()) -> int:
    """Smallest subset size k whose all-k family detects rho; n+1 if none does."""
    d = np.asarray(rho).shape[0]
    n = d.bit_length() - 1
    for k in range(1, n + 1):
        fam = all_k_family(n, k)
        if synthesize(rho, fam, tol).detected:
            return k
    return n + 1


def edl_scan(rho: np.ndarray, tol: SolverTolerances = SolverTolerances()):
    """Per-k synthesis results for k = 1..n on the all-k families."""
    d = np.asarray(rho).shape[0]
    n = d.bit_length() - 1
    return {k: synthesize(rho, all_k_family(n, k), tol) for k in range(1, n + 1)}


def all_k_family(n: int, k: int) -> tuple[frozenset[int], ...]:
    if not 1 <= k <= n:
        raise ValueError("subset size out of range")
    return tuple(frozenset(c) for c in combinations(range(1, n + 1), k))

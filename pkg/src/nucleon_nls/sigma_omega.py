"""Newton continuation of the ground state into the relativistic mean-field system.

A single radial nucleon coupled to an attractive scalar field and a
repulsive vector field reduces, for the lowest-angular-momentum spinor
ansatz, to four radial profiles: the large and small spinor components
(``phi``, ``chi``, even and odd at the origin) and the half-sum and
half-difference of the two screened mean fields (``wplus``, ``wminus``,
both even).  After scaling lengths and amplitudes with the nucleon mass m,
the system depends on the inverse mass eps = 1/m only polynomially and
through one constant 2x2 matrix multiplying the radial Laplacian of the
field pair.  At eps = 0 the field pair collapses onto algebraic functions
of (phi, chi) and the spinor block becomes the first-order form of the
scalar ground-state equation, so the certified profile furnishes the exact
starting point of the branch.

``residual`` evaluates the rescaled system with the screened-field block in
resolvent form: the source quadratics are pushed through the inverse of
(eps * R * (-Lap) + 1), applied exactly by diagonalizing the constant
matrix R (eigenvalues eps/C and eps/(C + D eps^2), eigenvectors (1, +-eps))
and solving two scalar radial Helmholtz problems with a banded direct
solve.  ``jacobian`` differentiates the map analytically; for the linear
solve the field rows are left-multiplied by the forward Helmholtz operator,
which makes the full four-field Newton matrix banded without changing the
solution.  ``continue_branch`` warm-starts damped Newton along an ascending
list of eps values and records the distance to the non-relativistic limit
state in a discrete Sobolev-type norm.

Derivatives use 6th-order central stencils on a staggered grid closed by
parity reflection at the origin, so even and odd profiles keep their full
order down to the first node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import splu

from .scalar_model import Params
from .shooting import GroundState, find_ground_state

EPS_CAP = 0.5
DEFAULT_N = 4000
DEFAULT_R_FACTOR = 30.0
NEWTON_TOL = 1e-10
MAX_NEWTON_ITER = 50
MAX_STEP_HALVINGS = 30

_FIELD_NAMES = ("phi", "chi", "wplus", "wminus")
# origin parity of (phi, chi, wplus, wminus)
_FIELD_PARITY = (1, -1, 1, 1)


class NewtonError(RuntimeError):
    """Newton iteration failed; carries the final residual norm."""

    def __init__(self, message, residual_norm=math.nan, iterations=0):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.iterations = iterations


class ContinuationError(RuntimeError):
    """Branch following stopped early; carries the converged prefix."""

    def __init__(self, message, points, eps_failed, cause=None):
        super().__init__(message)
        self.points = points
        self.eps_failed = eps_failed
        self.cause = cause


@dataclass(frozen=True)
class ContinuationParams:
    """Scaled couplings of the two-field nucleon model.

    C sets the scalar mass through m_sigma^2 = C m^2, D the squared-mass gap
    m_omega^2 - m_sigma^2, theta the coupling density scale (g_sigma /
    m_sigma)^2 = theta m, lam the difference of squared coupling ratios and
    mu the eigenvalue shift.  The induced scalar-model couplings are
    a = 2 lam / theta and b = 2 mu; the requirement lam > 2 mu theta is
    exactly a > 2b, the regime where the limiting ground state exists.
    eps records an intended inverse-mass target for configuration purposes;
    the operations below always take eps explicitly.
    """

    C: float = 1.0
    D: float = 1.0
    theta: float = 1.0
    lam: float = 2.0
    mu: float = 0.5
    eps: float = 0.0

    def __post_init__(self):
        for name in ("C", "D", "theta", "lam", "mu"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        if not self.lam > 2.0 * self.mu * self.theta:
            raise ValueError(
                "need lam > 2 mu theta (induced couplings a > 2b); got "
                f"lam={self.lam}, mu={self.mu}, theta={self.theta}"
            )
        if not (self.eps >= 0 and math.isfinite(self.eps)):
            raise ValueError(f"eps must be nonnegative and finite, got {self.eps}")

    @property
    def a(self) -> float:
        return 2.0 * self.lam / self.theta

    @property
    def b(self) -> float:
        return 2.0 * self.mu

    def nls_params(self) -> Params:
        """Scalar-model parameters of the eps = 0 limit (always d = 3)."""
        return Params(a=self.a, b=self.b, d=3)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Uniform staggered radii r_i = (i - 1/2) h, i = 1..n, with r_n = R."""

    n: int
    radius: float
    h: float
    r: np.ndarray = field(repr=False)

    @staticmethod
    def make(n: int, radius: float) -> "RadialGrid":
        if n < 8:
            raise ValueError(f"need at least 8 grid points, got {n}")
        if not (radius > 0 and math.isfinite(radius)):
            raise ValueError(f"radius must be positive and finite, got {radius}")
        h = radius / (n - 0.5)
        r = (np.arange(1, n + 1) - 0.5) * h
        r.setflags(write=False)
        return RadialGrid(n=n, radius=radius, h=h, r=r)

    @staticmethod
    def default(cp: ContinuationParams) -> "RadialGrid":
        return RadialGrid.make(DEFAULT_N, DEFAULT_R_FACTOR / math.sqrt(cp.b))


@dataclass(frozen=True, eq=False)
class SigmaOmegaState:
    """Four radial profiles with the parameter they were solved at."""

    grid: RadialGrid
    phi: np.ndarray
    chi: np.ndarray
    wplus: np.ndarray
    wminus: np.ndarray
    eps: float
    residual_norm: float

    def fields(self) -> np.ndarray:
        """Stack (phi, chi, wplus, wminus) into shape (4, n)."""
        return np.stack([self.phi, self.chi, self.wplus, self.wminus])

    def replace_fields(self, fields, eps, residual_norm) -> "SigmaOmegaState":
        return SigmaOmegaState(
            grid=self.grid,
            phi=fields[0].copy(),
            chi=fields[1].copy(),
            wplus=fields[2].copy(),
            wminus=fields[3].copy(),
            eps=eps,
            residual_norm=residual_norm,
        )


@dataclass(frozen=True)
class BranchPoint:
    eps: float
    state: SigmaOmegaState
    newton_iters: int
    distance_to_limit: float


# ---------------------------------------------------------------------------
# stencils

# 6th-order central first and second derivative weights, offsets -3..3
_D1_W = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
_D2_W = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0


def _stencil_matrix(n, h, parity, weights, power):
    """Banded derivative matrix with parity ghosts at 0, zero beyond r = n h.

    Row i samples offsets i+k; a ghost index j <= 0 reflects to 1 - j with
    the field's origin parity as sign (the staggered grid has no node at
    r = 0, so every reflection lands on an interior node).  Indices beyond
    the last node are dropped, the zero-extension closure for profiles that
    have decayed below rounding at the outer radius.
    """
    scale = h ** (-power)
    base = np.arange(1, n + 1)
    rows, cols, vals = [], [], []
    for k, w in zip(range(-3, 4), weights):
        if w == 0.0:
            continue
        j = base + k
        keep = j <= n
        jj = j[keep]
        sign = np.where(jj < 1, float(parity), 1.0)
        jj = np.where(jj < 1, 1 - jj, jj)
        rows.append(base[keep] - 1)
        cols.append(jj - 1)
        vals.append(sign * (w * scale))
    mat = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    )
    return mat.tocsr()


@lru_cache(maxsize=None)
def _d1(n, h, parity):
    return _stencil_matrix(n, h, parity, tuple(_D1_W), 1)


@lru_cache(maxsize=None)
def _d2(n, h, parity):
    return _stencil_matrix(n, h, parity, tuple(_D2_W), 2)


@lru_cache(maxsize=None)
def _neg_laplacian_even(n, h):
    """-(w'' + (2/r) w') for even fields on the staggered grid."""
    r = (np.arange(1, n + 1) - 0.5) * h
    lap = _d2(n, h, 1) + sparse.diags(2.0 / r) @ _d1(n, h, 1)
    return (-lap).tocsr()


# ---------------------------------------------------------------------------
# norms

def discrete_norm(fields, h) -> float:
    """Grid-weighted l2 norm sqrt(h * sum of squares) over all components."""
    fields = np.asarray(fields)
    return math.sqrt(h * float(np.sum(fields * fields)))


def state_distance(xi: SigmaOmegaState, xi0: SigmaOmegaState) -> float:
    """Discrete Sobolev-type distance: values plus two derivative levels.

    Differences of each field are measured in the grid-weighted l2 norm
    together with their 6th-order first and second differences (parity
    closures matching the field), giving a discrete H2-flavored metric.
    """
    if xi.grid.n != xi0.grid.n or xi.grid.h != xi0.grid.h:
        raise ValueError("states live on different grids")
    n, h = xi.grid.n, xi.grid.h
    total = 0.0
    for f1, f0, parity in zip(xi.fields(), xi0.fields(), _FIELD_PARITY):
        diff = f1 - f0
        total += float(np.sum(diff * diff))
        d1 = _d1(n, h, parity) @ diff
        total += float(np.sum(d1 * d1))
        d2 = _d2(n, h, parity) @ diff
        total += float(np.sum(d2 * d2))
    return math.sqrt(h * total)


# ---------------------------------------------------------------------------
# screened-field resolvent

class _ResolventSolver:
    """Exact application of (eps R (-Lap) + 1)^(-1) on the field pair.

    R is the constant 2x2 coupling matrix of the screened fields; its
    eigendecomposition is closed-form, with eigenvalues eps/C and
    eps/(C + D eps^2) and eigenvectors (1, eps) and (1, -eps).  The inverse
    therefore splits into two scalar radial Helmholtz solves, each a banded
    direct solve; at eps = 0 the operator is the identity.
    """

    def __init__(self, eps, C, D, n, h):
        self.eps = eps
        self.n = n
        if eps == 0.0:
            return
        lap_neg = _neg_laplacian_even(n, h)
        eye = sparse.identity(n, format="csr")
        kappa1 = eps / C
        kappa2 = eps / (C + D * eps * eps)
        self._lu1 = splu((kappa1 * lap_neg + eye).tocsc())
        self._lu2 = splu((kappa2 * lap_neg + eye).tocsc())
        self._lap_neg = lap_neg
        denom = 2.0 * (C + D * eps * eps)
        self.r11 = eps * (2.0 + eps * eps * D / C) / denom
        self.r12 = eps * eps * D / (C * denom)
        self.r21 = eps ** 4 * D / (C * denom)
        self.r22 = self.r11

    def apply(self, s_plus, s_minus):
        """Solve (eps R (-Lap) + 1) v = s for the pair v."""
        if self.eps == 0.0:
            return s_plus.copy(), s_minus.copy()
        half_over_eps = 0.5 / self.eps
        t1 = 0.5 * s_plus + half_over_eps * s_minus
        t2 = 0.5 * s_plus - half_over_eps * s_minus
        v1 = self._lu1.solve(t1)
        v2 = self._lu2.solve(t2)
        return v1 + v2, self.eps * (v1 - v2)

    def forward(self, v_plus, v_minus):
        """Apply (eps R (-Lap) + 1) to the pair v."""
        if self.eps == 0.0:
            return v_plus.copy(), v_minus.copy()
        lp = self._lap_neg @ v_plus
        lm = self._lap_neg @ v_minus
        return (
            v_plus + self.r11 * lp + self.r12 * lm,
            v_minus + self.r21 * lp + self.r22 * lm,
        )

    def forward_blocks(self, n):
        """Sparse blocks of the forward operator for Jacobian assembly."""
        eye = sparse.identity(n, format="csr")
        if self.eps == 0.0:
            zero = sparse.csr_matrix((n, n))
            return eye, zero, zero, eye
        lap_neg = self._lap_neg
        return (
            eye + self.r11 * lap_neg,
            self.r12 * lap_neg,
            self.r21 * lap_neg,
            eye + self.r22 * lap_neg,
        )


@lru_cache(maxsize=32)
def _resolvent(eps, C, D, n, h):
    return _ResolventSolver(eps, C, D, n, h)


# ---------------------------------------------------------------------------
# the nonlinear map

def _check_eps(eps, eps_cap):
    if not (0.0 <= eps < eps_cap and math.isfinite(eps)):
        raise ValueError(
            f"eps must lie in [0, {eps_cap}); got {eps} "
            "(the continuation is only locally guaranteed in the inverse mass)"
        )


def _source_quadratics(eps, a, phi, chi):
    """Quadratic sources feeding the screened-field block."""
    phi2 = phi * phi
    chi2 = chi * chi
    s_plus = 0.25 * a * phi2 - 0.25 * chi2 + eps * a * chi2 / 16.0
    s_minus = phi2 - 0.25 * eps * a * phi2 - eps * eps * a * chi2 / 16.0
    return s_plus, s_minus


def _residual_fields(eps, fields, grid, cp):
    n, h, r = grid.n, grid.h, grid.r
    phi, chi, wp, wm = fields
    a, b = cp.a, cp.b
    k_phi = _d1(n, h, 1) @ phi - (1.0 + wm - 0.25 * eps * b) * chi
    k_chi = _d1(n, h, -1) @ chi + 2.0 * chi / r - (4.0 * wp + b) * phi
    s_plus, s_minus = _source_quadratics(eps, a, phi, chi)
    v_plus, v_minus = _resolvent(eps, cp.C, cp.D, n, h).apply(s_plus, s_minus)
    return np.stack([k_phi, k_chi, wp + v_plus, wm + v_minus])


def residual(eps, xi: SigmaOmegaState, cp: ContinuationParams, eps_cap=EPS_CAP):
    """Evaluate the rescaled system at (eps, xi); returns shape (4, n).

    Rows: the even spinor equation phi' - (1 + wminus - eps b/4) chi, the
    odd spinor equation chi' + (2/r) chi - (4 wplus + b) phi, and the field
    pair plus the resolvent image of its quadratic sources.  At eps = 0 the
    resolvent is the identity and the last two rows are algebraic.
    """
    _check_eps(eps, eps_cap)
    _check_state(xi)
    return _residual_fields(eps, xi.fields(), xi.grid, cp)


def residual_norm(eps, xi, cp) -> float:
    return discrete_norm(residual(eps, xi, cp), xi.grid.h)


def _check_state(xi):
    n = xi.grid.n
    for name in _FIELD_NAMES:
        arr = getattr(xi, name)
        if arr.shape != (n,):
            raise ValueError(f"field {name} has shape {arr.shape}, expected ({n},)")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"field {name} contains non-finite entries")


# ---------------------------------------------------------------------------
# Jacobian

class JacobianOperator:
    """Derivative of the map at a state, in banded solvable form.

    ``apply`` is the true directional derivative, with the field rows
    composed with the resolvent exactly as in the residual.  ``solve``
    works on an equivalent system whose field rows were left-multiplied by
    the forward Helmholtz operator; that keeps every block banded
    (bandwidth 3 nodes, i.e. 15 interleaved unknowns per side) and the
    sparse LU factorization fill-free up to ordering.  At eps = 0 the rows
    reduce to the first-order spinor block plus the algebraic field rows.
    """

    def __init__(self, eps, xi, cp, eps_cap=EPS_CAP):
        _check_eps(eps, eps_cap)
        _check_state(xi)
        self.eps = eps
        self.cp = cp
        self.grid = xi.grid
        n, h, r = xi.grid.n, xi.grid.h, xi.grid.r
        a, b = cp.a, cp.b
        phi, chi, wp, wm = xi.fields()
        self._res = _resolvent(eps, cp.C, cp.D, n, h)

        self._coef_phi_chi = -(1.0 + wm - 0.25 * eps * b)
        self._coef_phi_wm = -chi
        self._coef_chi_phi = -(4.0 * wp + b)
        self._coef_chi_wp = -4.0 * phi
        # derivatives of the quadratic sources
        self._dsp_dphi = 0.5 * a * phi
        self._dsp_dchi = -0.5 * chi + eps * a * chi / 8.0
        self._dsm_dphi = 2.0 * phi - 0.5 * eps * a * phi
        self._dsm_dchi = -(eps * eps) * a * chi / 8.0

        d1e = _d1(n, h, 1)
        d1o = _d1(n, h, -1)
        f11, f12, f21, f22 = self._res.forward_blocks(n)
        dia = sparse.diags
        blocks = [
            [d1e, dia(self._coef_phi_chi), None, dia(self._coef_phi_wm)],
            [dia(self._coef_chi_phi), d1o + dia(2.0 / r), dia(self._coef_chi_wp), None],
            [dia(self._dsp_dphi), dia(self._dsp_dchi), f11, f12],
            [dia(self._dsm_dphi), dia(self._dsm_dchi), f21, f22],
        ]
        mat = sparse.bmat(blocks, format="csr")
        # interleave the four fields per node to make the matrix banded
        perm = (np.arange(4 * n).reshape(4, n).T).ravel()
        self._perm = perm
        self.matrix = mat[perm][:, perm].tocsc()
        self._lu = None
        self._d1e, self._d1o = d1e, d1o
        self._r = r

    @property
    def bandwidth(self) -> int:
        rows, cols = self.matrix.nonzero()
        return int(np.max(np.abs(rows - cols)))

    def apply(self, eta):
        """True directional derivative on a (4, n) direction."""
        f, g, hp, hm = np.asarray(eta)
        row_phi = self._d1e @ f + self._coef_phi_chi * g + self._coef_phi_wm * hm
        row_chi = (
            self._coef_chi_phi * f
            + self._d1o @ g
            + (2.0 / self._r) * g
            + self._coef_chi_wp * hp
        )
        bp = self._dsp_dphi * f + self._dsp_dchi * g
        bm = self._dsm_dphi * f + self._dsm_dchi * g
        vp, vm = self._res.apply(bp, bm)
        return np.stack([row_phi, row_chi, hp + vp, hm + vm])

    def solve(self, rhs):
        """Solve J delta = rhs for a (4, n) right-hand side."""
        rhs = np.asarray(rhs)
        tp, tm = self._res.forward(rhs[2], rhs[3])
        stacked = np.concatenate([rhs[0], rhs[1], tp, tm])
        if self._lu is None:
            self._lu = splu(self.matrix)
        sol = self._lu.solve(stacked[self._perm])
        n = self.grid.n
        out = np.empty(4 * n)
        out[self._perm] = sol
        return out.reshape(4, n)

    def _inverse_operator(self):
        from scipy.sparse.linalg import LinearOperator

        if self._lu is None:
            self._lu = splu(self.matrix)
        m = self.matrix.shape[0]
        return LinearOperator(
            (m, m),
            matvec=self._lu.solve,
            rmatvec=lambda v: self._lu.solve(v, trans="T"),
        )

    def inverse_norm_estimate(self) -> float:
        """1-norm estimate of the inverse of the Newton matrix.

        This is the resolution-stable measure of solvability: the forward
        matrix norm grows like 1/h because of the derivative rows, so the
        plain condition number scales with the grid size even though the
        underlying linearized map has a bounded inverse.
        """
        from scipy.sparse.linalg import onenormest

        return float(onenormest(self._inverse_operator()))

    def condition_estimate(self) -> float:
        """1-norm condition estimate of the banded Newton matrix."""
        from scipy.sparse.linalg import onenormest

        inv_op = self._inverse_operator()
        return float(onenormest(self.matrix) * onenormest(inv_op))


def jacobian(eps, xi, cp, eps_cap=EPS_CAP) -> JacobianOperator:
    """Assemble the analytic derivative of the map at (eps, xi)."""
    return JacobianOperator(eps, xi, cp, eps_cap)


# ---------------------------------------------------------------------------
# Newton and branch following

@dataclass(frozen=True)
class NewtonResult:
    state: SigmaOmegaState
    iterations: int
    residual_norms: tuple


def _newton(eps, initial, cp, tol, max_iter, max_halvings):
    grid = initial.grid
    fields = initial.fields().astype(float)
    res = _residual_fields(eps, fields, grid, cp)
    norm = discrete_norm(res, grid.h)
    history = [norm]
    for it in range(max_iter):
        if norm < tol:
            return NewtonResult(
                state=initial.replace_fields(fields, eps, norm),
                iterations=it,
                residual_norms=tuple(history),
            )
        state = initial.replace_fields(fields, eps, norm)
        jac = JacobianOperator(eps, state, cp)
        delta = jac.solve(-res)
        alpha = 1.0
        for _ in range(max_halvings):
            trial = fields + alpha * delta
            trial_res = _residual_fields(eps, trial, grid, cp)
            trial_norm = discrete_norm(trial_res, grid.h)
            if trial_norm <= (1.0 - 1e-4 * alpha) * norm:
                fields, res, norm = trial, trial_res, trial_norm
                break
            alpha *= 0.5
        else:
            raise NewtonError(
                f"step halving exhausted at eps={eps} "
                f"(residual stuck at {norm:.3e} after {it} iterations)",
                residual_norm=norm,
                iterations=it,
            )
        history.append(norm)
    if norm < tol:
        return NewtonResult(
            state=initial.replace_fields(fields, eps, norm),
            iterations=max_iter,
            residual_norms=tuple(history),
        )
    raise NewtonError(
        f"no convergence at eps={eps} within {max_iter} iterations "
        f"(final residual {norm:.3e})",
        residual_norm=norm,
        iterations=max_iter,
    )


def newton_solve(
    eps,
    initial: SigmaOmegaState,
    cp: ContinuationParams,
    newton_tol=NEWTON_TOL,
    max_iter=MAX_NEWTON_ITER,
    eps_cap=EPS_CAP,
) -> SigmaOmegaState:
    """Damped Newton from the given state; converges on the true residual.

    Steps are halved until the residual norm decreases; non-convergence and
    step-halving exhaustion raise NewtonError with the final residual.
    """
    _check_eps(eps, eps_cap)
    _check_state(initial)
    return _newton(eps, initial, cp, newton_tol, max_iter, MAX_STEP_HALVINGS).state


def build_limit_state(
    cp: ContinuationParams,
    grid: RadialGrid | None = None,
    gs: GroundState | None = None,
    polish: bool = True,
    newton_tol=NEWTON_TOL,
) -> SigmaOmegaState:
    """Sample the non-relativistic limit state from a certified profile.

    phi = sin(Q), chi = Q' / cos(Q) (equivalently phi' / (1 - phi^2)),
    wplus = -(a/4) phi^2 + (1/4) chi^2, wminus = -phi^2.  The sampled state
    already satisfies the eps = 0 system to ground-state accuracy; with
    ``polish`` a short Newton run pushes the discrete residual below
    ``newton_tol`` so branch distances are measured from the discrete root.
    """
    if gs is None:
        gs = find_ground_state(cp.nls_params())
    else:
        p = gs.params
        if p.d != 3 or abs(p.a - cp.a) > 1e-12 or abs(p.b - cp.b) > 1e-12:
            raise ValueError(
                f"ground state solves (a={p.a}, b={p.b}, d={p.d}) but the "
                f"continuation needs (a={cp.a}, b={cp.b}, d=3)"
            )
    if grid is None:
        grid = RadialGrid.default(cp)
    q = np.asarray(gs.profile(grid.r), dtype=float)
    dq = np.asarray(gs.dprofile(grid.r), dtype=float)
    phi = np.sin(q)
    chi = dq / np.cos(q)
    wplus = -0.25 * cp.a * phi * phi + 0.25 * chi * chi
    wminus = -phi * phi
    fields = np.stack([phi, chi, wplus, wminus])
    norm = discrete_norm(_residual_fields(0.0, fields, grid, cp), grid.h)
    state = SigmaOmegaState(
        grid=grid,
        phi=phi,
        chi=chi,
        wplus=wplus,
        wminus=wminus,
        eps=0.0,
        residual_norm=norm,
    )
    if polish:
        state = _newton(0.0, state, cp, newton_tol, MAX_NEWTON_ITER, MAX_STEP_HALVINGS).state
    return state


def continue_branch(
    eps_list,
    cp: ContinuationParams,
    grid: RadialGrid | None = None,
    gs: GroundState | None = None,
    newton_tol=NEWTON_TOL,
    max_iter=MAX_NEWTON_ITER,
    eps_cap=EPS_CAP,
) -> list:
    """Warm-started Newton along an ascending eps list starting at 0.

    The first entry must be 0; the limit state seeds the branch and each
    converged state seeds the next parameter.  distance_to_limit is the
    discrete Sobolev-type distance to the eps = 0 root.  On a failed
    parameter the branch is truncated: a ContinuationError carries the
    converged prefix and the failure diagnostics.
    """
    eps_arr = [float(e) for e in eps_list]
    if not eps_arr or eps_arr[0] != 0.0:
        raise ValueError("eps_list must start at 0")
    if any(b <= a for a, b in zip(eps_arr, eps_arr[1:])):
        raise ValueError("eps_list must be strictly ascending")
    for e in eps_arr:
        _check_eps(e, eps_cap)
    limit = build_limit_state(cp, grid=grid, gs=gs, newton_tol=newton_tol)
    points = [
        BranchPoint(eps=0.0, state=limit, newton_iters=0, distance_to_limit=0.0)
    ]
    prev = limit
    for eps in eps_arr[1:]:
        try:
            result = _newton(eps, prev, cp, newton_tol, max_iter, MAX_STEP_HALVINGS)
        except NewtonError as exc:
            raise ContinuationError(
                f"branch truncated at eps={eps}: {exc} "
                f"({len(points)} points converged)",
                points=points,
                eps_failed=eps,
                cause=exc,
            ) from exc
        state = result.state
        points.append(
            BranchPoint(
                eps=eps,
                state=state,
                newton_iters=result.iterations,
                distance_to_limit=state_distance(state, limit),
            )
        )
        prev = state
    return points


# ---------------------------------------------------------------------------
# resolvent bound report

@dataclass(frozen=True, eq=False)
class ResolventReport:
    eps_samples: np.ndarray
    x_samples: np.ndarray
    inverse_norms: np.ndarray
    eigenvalue_errors: np.ndarray
    max_inverse_norm: float
    max_eigenvalue_error: float
    norm_bound_ok: bool
    eigenvalue_ok: bool

    NORM_TOL = 1e-12
    EIG_TOL = 1e-12


def resolvent_bound_check(
    cp: ContinuationParams, eps_samples=None, x_samples=None
) -> ResolventReport:
    """Sample the screened-field multiplier matrix and verify its bounds.

    For each (eps, x) the matrix M = x [[2C + eps^2 D, eps D], [eps^3 D,
    2C + eps^2 D]] + 1 is formed; its inverse 2-norm must stay at or below
    1 (the contraction property that keeps the field block benign) and its
    smaller eigenvalue must equal 1 + 2 C x.  The matrix is not symmetric
    for eps > 0, so the norm is computed from singular values and reported
    with margins instead of being asserted from the eigenvalues.
    """
    C, D = cp.C, cp.D
    if eps_samples is None:
        eps_samples = np.linspace(0.0, EPS_CAP, 50)
    if x_samples is None:
        x_samples = np.linspace(0.0, 1000.0, 50)
    eps_samples = np.asarray(eps_samples, dtype=float)
    x_samples = np.asarray(x_samples, dtype=float)
    if np.any(eps_samples < 0) or np.any(x_samples < 0):
        raise ValueError("samples must be nonnegative")
    inv_norms = np.empty((eps_samples.size, x_samples.size))
    eig_errs = np.empty_like(inv_norms)
    eye = np.eye(2)
    for i, e in enumerate(eps_samples):
        coupling = np.array(
            [[2.0 * C + e * e * D, e * D], [e ** 3 * D, 2.0 * C + e * e * D]]
        )
        for j, x in enumerate(x_samples):
            m = x * coupling + eye
            sigma_min = float(np.linalg.svd(m, compute_uv=False).min())
            inv_norms[i, j] = 1.0 / sigma_min
            xi_minus = float(np.min(np.linalg.eigvals(m).real))
            eig_errs[i, j] = abs(xi_minus - (1.0 + 2.0 * C * x))
    max_norm = float(inv_norms.max())
    max_err = float(eig_errs.max())
    return ResolventReport(
        eps_samples=eps_samples,
        x_samples=x_samples,
        inverse_norms=inv_norms,
        eigenvalue_errors=eig_errs,
        max_inverse_norm=max_norm,
        max_eigenvalue_error=max_err,
        norm_bound_ok=max_norm <= 1.0 + ResolventReport.NORM_TOL,
        eigenvalue_ok=max_err <= ResolventReport.EIG_TOL,
    )


# ---------------------------------------------------------------------------
# physical units

@dataclass(frozen=True)
class PhysicalParameters:
    m_sigma: float
    m_omega: float
    g_sigma: float
    g_omega: float
    mu: float


def physical_parameters(cp: ContinuationParams, m: float) -> PhysicalParameters:
    """Recover the field masses and couplings at mass scale m.

    Inverts m_sigma^2 = C m^2, m_omega^2 - m_sigma^2 = D, (g_sigma /
    m_sigma)^2 = theta m and (g_sigma/m_sigma)^2 - (g_omega/m_omega)^2 =
    lam.  Requires theta m >= lam so the vector coupling stays real.
    """
    if not (m > 0 and math.isfinite(m)):
        raise ValueError(f"mass scale must be positive and finite, got {m}")
    if cp.theta * m < cp.lam:
        raise ValueError(
            f"mass scale m={m} too small: need theta m >= lam "
            f"(theta={cp.theta}, lam={cp.lam}) for a real vector coupling"
        )
    m_sigma = math.sqrt(cp.C) * m
    m_omega = math.sqrt(cp.C * m * m + cp.D)
    g_sigma = m_sigma * math.sqrt(cp.theta * m)
    g_omega = m_omega * math.sqrt(cp.theta * m - cp.lam)
    return PhysicalParameters(
        m_sigma=m_sigma, m_omega=m_omega, g_sigma=g_sigma, g_omega=g_omega, mu=cp.mu
    )


def parameters_from_physical(
    pp: PhysicalParameters, m: float, eps: float | None = None
) -> ContinuationParams:
    """Invert physical_parameters; round-trips to rounding error."""
    if not (m > 0 and math.isfinite(m)):
        raise ValueError(f"mass scale must be positive and finite, got {m}")
    ratio_sigma = (pp.g_sigma / pp.m_sigma) ** 2
    ratio_omega = (pp.g_omega / pp.m_omega) ** 2
    return ContinuationParams(
        C=(pp.m_sigma / m) ** 2,
        D=pp.m_omega ** 2 - pp.m_sigma ** 2,
        theta=ratio_sigma / m,
        lam=ratio_sigma - ratio_omega,
        mu=pp.mu,
        eps=(1.0 / m) if eps is None else eps,
    )


@dataclass(frozen=True, eq=False)
class PhysicalProfiles:
    """Profiles in unscaled units on the physical radii x = r / sqrt(m)."""

    radii: np.ndarray
    h: float
    phi_tilde: np.ndarray
    chi_tilde: np.ndarray
    w_plus_tilde: np.ndarray
    w_minus_tilde: np.ndarray
    s_field: np.ndarray
    v_field: np.ndarray


def unscale_state(xi: SigmaOmegaState, cp: ContinuationParams, m: float) -> PhysicalProfiles:
    """Undo the mass rescaling and report the two mean fields.

    phi_tilde(x) = phi(sqrt(m) x)/sqrt(theta), chi_tilde(x) =
    chi(sqrt(m) x)/(2 sqrt(theta m)), w_plus_tilde(x) = wplus(sqrt(m) x)
    and w_minus_tilde(x) = m wminus(sqrt(m) x); the scalar field is their
    sum and the vector field their difference.  The state must have been
    solved at eps = 1/m.
    """
    if not (m > 0 and math.isfinite(m)):
        raise ValueError(f"mass scale must be positive and finite, got {m}")
    if abs(xi.eps * m - 1.0) > 1e-9:
        raise ValueError(
            f"state solved at eps={xi.eps} but the requested mass scale "
            f"m={m} implies eps={1.0 / m}"
        )
    root_m = math.sqrt(m)
    root_theta = math.sqrt(cp.theta)
    radii = xi.grid.r / root_m
    radii.setflags(write=False)
    w_plus_tilde = xi.wplus.copy()
    w_minus_tilde = m * xi.wminus
    return PhysicalProfiles(
        radii=radii,
        h=xi.grid.h / root_m,
        phi_tilde=xi.phi / root_theta,
        chi_tilde=xi.chi / (2.0 * root_theta * root_m),
        w_plus_tilde=w_plus_tilde,
        w_minus_tilde=w_minus_tilde,
        s_field=w_plus_tilde + w_minus_tilde,
        v_field=w_plus_tilde - w_minus_tilde,
    )


# independent 4th-order stencils for the physical-variable check
_D1_W4 = np.array([0.0, 1.0, -8.0, 0.0, 8.0, -1.0, 0.0]) / 12.0
_D2_W4 = np.array([0.0, -1.0, 16.0, -30.0, 16.0, -1.0, 0.0]) / 12.0


def physical_system_residual(
    phys: PhysicalProfiles, cp: ContinuationParams, m: float
) -> np.ndarray:
    """Evaluate the unscaled field equations on the physical profiles.

    Independent verification route: the spinor pair must satisfy the
    first-order system with masses restored and each mean-field combination
    must satisfy its screened Poisson identity written with explicit
    inverse-square-mass Laplacian coefficients.  4th-order stencils are
    used here on purpose, so this check shares no derivative operators with
    the rescaled residual path.
    """
    pp = physical_parameters(cp, m)
    n = phys.radii.size
    h = phys.h
    x = phys.radii
    d1e = _stencil_matrix(n, h, 1, _D1_W4, 1)
    d1o = _stencil_matrix(n, h, -1, _D1_W4, 1)
    d2e = _stencil_matrix(n, h, 1, _D2_W4, 2)

    def laplacian(w):
        return d2e @ w + (2.0 / x) * (d1e @ w)

    pt, ct = phys.phi_tilde, phys.chi_tilde
    wpt, wmt = phys.w_plus_tilde, phys.w_minus_tilde
    inv_ms2 = 1.0 / pp.m_sigma ** 2
    inv_mo2 = 1.0 / pp.m_omega ** 2
    c_same = 0.5 * (inv_ms2 + inv_mo2)
    c_cross = 0.5 * (inv_ms2 - inv_mo2)
    quad = 0.5 * cp.lam * (pt * pt + ct * ct)
    row1 = d1e @ pt - (2.0 * m + 2.0 * wmt - cp.mu) * ct
    row2 = d1o @ ct + 2.0 * ct / x - (2.0 * wpt + cp.mu) * pt
    row3 = wpt - (
        c_same * laplacian(wpt)
        + c_cross * laplacian(wmt)
        - quad
        + cp.theta * m * ct * ct
    )
    row4 = wmt - (
        c_cross * laplacian(wpt)
        + c_same * laplacian(wmt)
        + quad
        - cp.theta * m * pt * pt
    )
    return np.stack([row1, row2, row3, row4])

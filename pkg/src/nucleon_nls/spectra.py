"""Sector discretizations of the linearized operators and kernel certification.

The second variation of the energy around a radial ground state splits into
angular-momentum sectors.  Each sector of the Schrodinger family reduces to

    A(ell) v = -v'' - ((d-1)/r) v' + ell(ell+d-2)/r^2 v - F'(Q(r)) v

on (0, R) with a Dirichlet truncation at R.  ``assemble_sector_A``
discretizes this with second-order central differences on the transformed
variable w = r^((d-1)/2) v, which removes the first-order term (at the cost
of an extra (d-1)(d-3)/4 / r^2 potential term) and makes the matrix
symmetric tridiagonal.  The staggered grid r_i = (i - 1/2) h closes the r=0
stencil by the exact parity reflection of w and the r=R stencil by odd
reflection (w(R) = 0).

The linearized operators in the field variable take divergence form

    -div(grad(eta) / cos^2 Q) + V(r) eta.

``assemble_L1_direct`` keeps the transformed-variable skeleton, writing the
divergence part as -(gamma w')' with edge coefficients built from products
of adjacent secant samples.  Its potential uses the discrete second
difference of the secant samples, the grid-exact image of the
-sec(Q) Laplacian(sec(Q)) term produced by conjugating the sector operator
with cos(Q); as a consequence the assembled matrix equals
D_sec * A * D_sec entrywise up to rounding, with D_sec = diag(sec(Q_i)),
mirroring the continuum conjugation identity.

``assemble_L2_direct`` discretizes the same divergence form by a
flux-conservative finite-volume scheme in the untransformed variable,
symmetrized by square roots of cell volumes.  The flux form absorbs the
derivative of the steep diffusion coefficient into edge differences, which
keeps the discrete image of the analytically known kernel direction far
below the kernel tolerance at the default grid.

Eigenvalues come from bisection on Sturm sequences with inverse iteration
for eigenvectors (LAPACK stebz/stein).  An independent LDL^T Sturm count
doubles as a Morse-index reporter.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .scalar_model import ScalarFns
from .shooting import GroundState

KERNEL_TOL = 1e-6
DEFAULT_N = 16000
DEFAULT_R_FACTOR = 30.0
MIN_POINTS_PER_DECAY_LENGTH = 10.0
COS2_FLOOR = 1e-10


class ResolutionWarning(UserWarning):
    """Grid too coarse to resolve the exponential decay scale."""


@dataclass(frozen=True)
class SectorOperator:
    """Symmetric tridiagonal sector operator in symmetrized coordinates.

    ``main_diag`` and ``off_diag`` represent the operator after the weighted
    transform w = sym_weight * v, where ``sym_weight`` approximates
    r^((d-1)/2) (exactly that for the finite-difference skeleton, the square
    root of cell volume over grid step for the finite-volume skeleton).
    Plain Euclidean inner products of transformed vectors then correspond
    to r^(d-1)-weighted inner products of the physical functions.

    ``references`` holds transformed samples of analytically expected
    kernel functions, keyed by a descriptive name; eigensolvers correlate
    kernel candidates against them.
    """

    ell: int
    d: int
    grid: np.ndarray
    main_diag: np.ndarray
    off_diag: np.ndarray
    boundary: str
    h: float
    sym_weight: np.ndarray
    references: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.grid.size


@dataclass(frozen=True)
class SpectralReport:
    """Lowest eigenpairs of a sector operator with kernel bookkeeping.

    ``eigenvectors[i]`` is the physical grid function v, normalized so the
    discrete r^(d-1)-weighted norm is one.  ``kernel_candidates`` lists
    (index, eigenvalue) pairs with magnitude below ``kernel_tol``;
    ``correlations`` maps each reference name to the per-candidate absolute
    cosine with that reference.
    """

    ell: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    kernel_candidates: list
    correlations: dict
    kernel_tol: float


def _left_parity(d: int, ell: int) -> int:
    # Regular sector functions behave like v ~ r^ell near the origin, so
    # w = r^((d-1)/2) v has exact parity for odd d; the ghost value at -h/2
    # is that parity times w_1, keeping the closure O(h^2).  Even d admits
    # no polynomial reflection and drops the ghost (one low-order node).
    if d % 2 == 0:
        return 0
    return -1 if ((ell + (d - 1) // 2) % 2) else 1


def _boundary_label(d: int, ell: int) -> str:
    if ell == 0:
        left = "v'(0)=0 via ghost reflection"
    else:
        left = "v(0)=0 via sector parity"
    return f"{left}; v(R)=0 via odd reflection"


def _check_resolution(h: float, b: float) -> None:
    points = 1.0 / (h * math.sqrt(b))
    if points < MIN_POINTS_PER_DECAY_LENGTH:
        warnings.warn(
            f"grid step {h:.3g} gives {points:.1f} points per decay length "
            f"1/sqrt(b); eigenvalues will be under-resolved",
            ResolutionWarning,
            stacklevel=3,
        )


def _staggered_grid(N: int, R: float):
    if N < 3:
        raise ValueError("need at least 3 grid points")
    if R <= 0.0:
        raise ValueError("R must be positive")
    h = R / N
    r = (np.arange(1, N + 1) - 0.5) * h
    return h, r


def _assemble_schrodinger(d, ell, N, R, potential, references=None, b=None):
    """Central differences for -w'' + (kappa_eff/r^2 + V) w on the staggered grid."""
    h, r = _staggered_grid(N, R)
    if b is not None:
        _check_resolution(h, b)
    kappa_eff = ell * (ell + d - 2) + 0.25 * (d - 1) * (d - 3)
    inv_h2 = 1.0 / (h * h)
    main = np.full(N, 2.0 * inv_h2)
    main[0] = (2.0 - _left_parity(d, ell)) * inv_h2
    main[-1] = 3.0 * inv_h2
    main = main + kappa_eff / r**2 + potential(r)
    off = np.full(N - 1, -inv_h2)
    return SectorOperator(
        ell=ell,
        d=d,
        grid=r,
        main_diag=main,
        off_diag=off,
        boundary=_boundary_label(d, ell),
        h=h,
        sym_weight=r ** (0.5 * (d - 1)),
        references=dict(references or {}),
    )


def assemble_sector_A(gs: GroundState, ell: int, N: int = DEFAULT_N,
                      R: float | None = None) -> SectorOperator:
    """Discretize the sector operator with potential -F'(Q) at the ground state.

    The profile is sampled through the certified evaluator, so R may exceed
    the stored trajectory extent (the tail law takes over there).  For ell=1
    the derivative profile is attached as a kernel reference.
    """
    if ell < 0:
        raise ValueError("ell must be a nonnegative integer")
    p = gs.params
    fns = ScalarFns(p)
    if R is None:
        R = DEFAULT_R_FACTOR / math.sqrt(p.b)
    op = _assemble_schrodinger(
        p.d, ell, N, R,
        potential=lambda r: -fns.Fprime(gs.profile(r)),
        b=p.b,
    )
    if ell == 1:
        op.references["dprofile"] = op.sym_weight * gs.dprofile(op.grid)
    return op


def _profile_secants(gs, r):
    Q = gs.profile(r)
    dQ = gs.dprofile(r)
    cos2 = np.cos(Q) ** 2
    if np.any(cos2 < COS2_FLOOR):
        raise ValueError(
            "positivity check failure: 1 - sin(Q)^2 fell below "
            f"{COS2_FLOOR:g}; profile is not a valid interior state"
        )
    return Q, dQ, 1.0 / np.cos(Q)


def _secant_edges(sec):
    """Edge diffusion samples sec(Q_i) sec(Q_{i+1}), mirrored at the ends."""
    gamma = np.empty(sec.size + 1)
    gamma[1:-1] = sec[:-1] * sec[1:]
    gamma[0] = sec[0] * sec[0]
    gamma[-1] = sec[-1] * sec[-1]
    return gamma


def _mirrored_second_difference(x: np.ndarray, h: float) -> np.ndarray:
    """(2 x_i - x_{i-1} - x_{i+1}) / h^2 with both end ghosts mirrored."""
    t = np.empty_like(x)
    t[1:-1] = 2.0 * x[1:-1] - x[:-2] - x[2:]
    t[0] = x[0] - x[1]
    t[-1] = x[-1] - x[-2]
    return t / (h * h)


def assemble_L1_direct(gs: GroundState, N: int = DEFAULT_N,
                       R: float | None = None, ell: int = 1) -> SectorOperator:
    """Divergence-form assembly of the phase-direction linearized operator.

    Works on the transformed-variable skeleton: the divergence part
    -(gamma w')' is discretized with edge coefficients sec(Q_i) sec(Q_{i+1})
    and the centrifugal term carries sec^2 at the nodes.  The potential
    combines -F'(Q) sec^2(Q) with sec(Q) times the mirrored second
    difference of the secant samples, so that the assembled matrix equals
    the congruence D_sec * A * D_sec of the matching ``assemble_sector_A``
    matrix entrywise up to rounding (see ``conjugated_form``).

    Defaults to the ell=1 sector, where the kernel direction cos(Q) Q' lives.
    """
    if ell < 0:
        raise ValueError("ell must be a nonnegative integer")
    p = gs.params
    if R is None:
        R = DEFAULT_R_FACTOR / math.sqrt(p.b)
    h, r = _staggered_grid(N, R)
    _check_resolution(h, p.b)
    Q, dQ, sec = _profile_secants(gs, r)
    fns = ScalarFns(p)
    kappa_eff = ell * (ell + p.d - 2) + 0.25 * (p.d - 1) * (p.d - 3)
    inv_h2 = 1.0 / (h * h)

    gamma = _secant_edges(sec)
    sigma = _left_parity(p.d, ell)
    main = (gamma[:-1] + gamma[1:]) * inv_h2
    main[0] = (gamma[0] * (1 - sigma) + gamma[1]) * inv_h2
    main[-1] = (gamma[N - 1] + 2.0 * gamma[N]) * inv_h2
    main = main + kappa_eff * sec * sec / r**2
    main = main + sec * _mirrored_second_difference(sec, h) \
        - fns.Fprime(Q) * sec * sec
    off = -gamma[1:N] * inv_h2

    references = {}
    if ell == 1:
        references["dprofile_cos"] = \
            r ** (0.5 * (p.d - 1)) * np.cos(Q) * gs.dprofile(r)
    return SectorOperator(
        ell=ell,
        d=p.d,
        grid=r,
        main_diag=main,
        off_diag=off,
        boundary=_boundary_label(p.d, ell),
        h=h,
        sym_weight=r ** (0.5 * (p.d - 1)),
        references=references,
    )


def assemble_L2_direct(gs: GroundState, N: int = DEFAULT_N,
                       R: float | None = None, ell: int = 0) -> SectorOperator:
    """Divergence-form assembly of the amplitude-direction linearized operator.

    Uses a flux-conservative finite-volume scheme in the untransformed
    variable: edge fluxes r^(d-1) sec(Q_i) sec(Q_{i+1}) (v_{i+1} - v_i)/h,
    cell volumes from exact integrals of r^(d-1), rows symmetrized by the
    square roots of the cell volumes.  The potential is the analytic
    (Q')^2 sec^2 Q - a sin^2 Q + b.  Absorbing the steep diffusion
    coefficient into edge differences keeps the discrete image of the
    kernel direction sin(Q) orders of magnitude inside the kernel
    tolerance at the default grid.

    Defaults to the ell=0 sector, where the profile sine spans the kernel;
    it is attached as a reference.
    """
    if ell < 0:
        raise ValueError("ell must be a nonnegative integer")
    p = gs.params
    if R is None:
        R = DEFAULT_R_FACTOR / math.sqrt(p.b)
    h, r = _staggered_grid(N, R)
    _check_resolution(h, p.b)
    Q, dQ, sec = _profile_secants(gs, r)
    kappa = ell * (ell + p.d - 2)

    edges = np.arange(N + 1) * h
    G = edges ** (p.d - 1)
    if p.d == 1:
        G[0] = 1.0
    vol = np.diff(edges ** p.d) / p.d
    sym = np.sqrt(vol / h)

    cond = G * _secant_edges(sec)          # edge conductances
    left_dirichlet = p.d == 1 and ell >= 1
    if not left_dirichlet:
        cond[0] = 0.0                      # zero flux through the axis
    main = (cond[:-1] + cond[1:]) / (h * vol)
    if left_dirichlet:
        main[0] += cond[0] / (h * vol[0])
    main[-1] += cond[-1] / (h * vol[-1])   # Dirichlet ghost at R
    main = main + kappa * sec * sec / r**2
    main = main + dQ * dQ * sec * sec - p.a * np.sin(Q) ** 2 + p.b
    off = -cond[1:N] / (h * np.sqrt(vol[:-1] * vol[1:]))

    references = {}
    if ell == 0:
        references["profile_sine"] = sym * np.sin(Q)
    return SectorOperator(
        ell=ell,
        d=p.d,
        grid=r,
        main_diag=main,
        off_diag=off,
        boundary=_boundary_label(p.d, ell),
        h=h,
        sym_weight=sym,
        references=references,
    )


def l1_closed_form_potential(gs: GroundState, r: np.ndarray) -> np.ndarray:
    """Analytic potential of the phase-direction operator, skeleton terms excluded.

    Equal to -sec(Q) (sec Q)'' - F'(Q) sec^2(Q), rewritten through the
    profile equation as sec^2 (tan(Q) F(Q) - (Q')^2 (tan^2 + sec^2)
    - F'(Q)) + (d-1) sec^2 tan(Q) Q' / r.  This is the continuum limit of
    the mimetic potential inside ``assemble_L1_direct`` (the centrifugal
    and dimensional 1/r^2 terms live in the skeleton, not here); tests use
    it for an independent route to the same operator at O(h^2).
    """
    p = gs.params
    fns = ScalarFns(p)
    Q = gs.profile(r)
    dQ = gs.dprofile(r)
    sec = 1.0 / np.cos(Q)
    tan = np.tan(Q)
    base = sec**2 * (tan * fns.F(Q) - dQ**2 * (tan**2 + sec**2)
                     - fns.Fprime(Q))
    return base + (p.d - 1.0) * sec**2 * tan * dQ / r


def conjugated_form(op: SectorOperator, gs: GroundState):
    """Congruence transform D_sec * M * D_sec of a sector matrix.

    Returns (main_diag, off_diag) of the transformed tridiagonal system,
    for entrywise comparison against ``assemble_L1_direct``.
    """
    sec = 1.0 / np.cos(gs.profile(op.grid))
    main = sec * op.main_diag * sec
    off = sec[:-1] * op.off_diag * sec[1:]
    return main, off


def apply_operator(op: SectorOperator, w: np.ndarray) -> np.ndarray:
    """Tridiagonal matrix-vector product in symmetrized coordinates."""
    out = op.main_diag * w
    out[:-1] += op.off_diag * w[1:]
    out[1:] += op.off_diag * w[:-1]
    return out


def lowest_eigenpairs(op: SectorOperator, k: int,
                      kernel_tol: float = KERNEL_TOL) -> SpectralReport:
    """Lowest k eigenpairs via Sturm bisection plus inverse iteration.

    Deterministic for a fixed matrix.  Eigenvalues come back ascending;
    eigenvectors are returned as physical grid functions with unit weighted
    norm.  Kernel candidates and their reference correlations are recorded.
    """
    if not 1 <= k <= op.size:
        raise ValueError("k must be between 1 and the grid size")
    try:
        vals, vecs = eigh_tridiagonal(
            op.main_diag, op.off_diag,
            select="i", select_range=(0, k - 1), check_finite=False,
        )
    except np.linalg.LinAlgError as exc:   # pragma: no cover - LAPACK internal
        raise RuntimeError(
            "eigenvalue bisection or inverse iteration failed to converge "
            "within the LAPACK iteration budget (5 refinement sweeps)"
        ) from exc
    order = np.argsort(vals)
    vals = vals[order]
    vecs = vecs[:, order]

    candidates = [(int(i), float(vals[i])) for i in range(k)
                  if abs(vals[i]) < kernel_tol]
    correlations = {}
    for name, ref in op.references.items():
        ref_norm = float(np.linalg.norm(ref))
        correlations[name] = [
            float(abs(ref @ vecs[:, idx])
                  / (ref_norm * np.linalg.norm(vecs[:, idx])))
            for idx, _ in candidates
        ]

    scale = 1.0 / math.sqrt(op.h)
    eigenvectors = (vecs * scale / op.sym_weight[:, None]).T
    return SpectralReport(
        ell=op.ell,
        eigenvalues=vals,
        eigenvectors=eigenvectors,
        kernel_candidates=candidates,
        correlations=correlations,
        kernel_tol=kernel_tol,
    )


def sturm_count(op: SectorOperator, sigma: float) -> int:
    """Number of eigenvalues strictly below sigma, by LDL^T inertia.

    Runs the Sturm recurrence q_i = d_i - sigma - e_{i-1}^2 / q_{i-1} and
    counts negative pivots, guarding tiny pivots the way bisection codes
    do.  Independent of the eigensolver, so it serves as a cross-check and
    as the Morse-index reporter.
    """
    main = op.main_diag
    off = op.off_diag
    pivmin = 1e-300 + 1e-30 * float(np.max(np.abs(main)))
    count = 0
    q = main[0] - sigma
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, main.size):
        q = main[i] - sigma - off[i - 1] * off[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


def morse_index(op: SectorOperator, kernel_tol: float = KERNEL_TOL) -> int:
    """Count of eigenvalues below -kernel_tol (kernel zone excluded)."""
    return sturm_count(op, -kernel_tol)


def harmonic_dimension(ell: int, d: int) -> int:
    """Multiplicity of the ell-th angular sector in dimension d."""
    if ell < 0 or d < 1:
        raise ValueError("need ell >= 0 and d >= 1")
    if d == 1:
        return 1 if ell <= 1 else 0
    if ell == 0:
        return 1
    top = math.comb(d + ell - 1, ell)
    low = math.comb(d + ell - 3, ell - 2) if ell >= 2 else 0
    return top - low


def kernel_census(gs: GroundState, ells=(0, 1, 2, 3), N: int = DEFAULT_N,
                  R: float | None = None, k: int = 4,
                  kernel_tol: float = KERNEL_TOL) -> dict:
    """Kernel structure across sectors for both linearized families.

    Assembles the Schrodinger-form sector operators for each requested ell
    and the amplitude-direction operator in its kernel sector, solves for
    the lowest eigenpairs, and tallies kernel candidates weighted by the
    angular multiplicities.  A nondegenerate ground state shows candidates
    only at ell=1 for the first family (total multiplicity d) and only at
    ell=0 for the second (multiplicity 1).
    """
    reports_A = {}
    dim_A = 0
    for ell in ells:
        op = assemble_sector_A(gs, ell, N=N, R=R)
        rep = lowest_eigenpairs(op, k, kernel_tol=kernel_tol)
        reports_A[ell] = rep
        dim_A += len(rep.kernel_candidates) * harmonic_dimension(ell, gs.params.d)

    op2 = assemble_L2_direct(gs, N=N, R=R, ell=0)
    rep2 = lowest_eigenpairs(op2, k, kernel_tol=kernel_tol)
    dim_2 = len(rep2.kernel_candidates)

    return {
        "A": reports_A,
        "L2": {0: rep2},
        "kernel_dim_A": dim_A,
        "kernel_dim_L2": dim_2,
    }

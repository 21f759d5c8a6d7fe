"""Scalar model data for the nuclear NLS problem in arcsin-transformed variables.

The field equation for the transformed profile u = arcsin(phi) is

    u'' + ((d-1)/r) u' + F(u) = 0,      F(u) = (a/2) sin(2u) (sin(u)^2 - b/a),

with coupling a > 0 and mass b > 0.  This module holds the parameter record,
closed-form evaluation of F and its derivatives, the cubic factor P with
F(x) = cos(x) P(sin(x)), the local Hamiltonian density, the auxiliary function
I(x) = x F'(x) - lambda F(x) used in the uniqueness argument, and the
variational quotient giving upper bounds on the dimension-dependent coupling
threshold a_d.

Angles live in [0, pi/2]; inputs within ANGLE_TOL outside are clamped, anything
further out is rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ANGLE_TOL",
    "Params",
    "ScalarFns",
    "eval_P",
    "eval_F",
    "eval_Fprime",
    "eval_Fsecond",
    "eval_I",
    "root_of_I",
    "hamiltonian",
    "xi_quotient",
    "ad_quotient_upper_bound",
    "surface_measure",
]

ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class Params:
    """Model parameters: coupling a, mass b, spatial dimension d."""

    a: float
    b: float
    d: int

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"coupling a must be positive and finite, got {self.a}")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ValueError(f"mass b must be positive and finite, got {self.b}")
        if self.d not in (1, 2, 3, 4, 5, 6, 7):
            raise ValueError(f"dimension d must be a small positive integer, got {self.d}")

    @property
    def ground_state_regime(self) -> bool:
        """True iff a > 2b, the regime where a decaying positive profile exists."""
        return self.a > 2.0 * self.b

    @property
    def stationary_angle(self) -> float:
        """Interior zero arcsin(sqrt(b/a)) of F; only defined for a > b."""
        if self.a <= self.b:
            raise ValueError("interior stationary angle requires a > b")
        return math.asin(math.sqrt(self.b / self.a))

    @property
    def threshold_angle(self) -> float:
        """arcsin(sqrt(2b/a)): zero-Hamiltonian start, the d=1 ground-state height."""
        if not self.ground_state_regime:
            raise ValueError("threshold angle requires a > 2b")
        return math.asin(math.sqrt(2.0 * self.b / self.a))


def _clamp_angle(x):
    """Clamp x into [0, pi/2] when within ANGLE_TOL, else raise."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -ANGLE_TOL) or np.any(x > math.pi / 2 + ANGLE_TOL):
        raise ValueError("angle outside [0, pi/2] beyond tolerance")
    return np.clip(x, 0.0, math.pi / 2)


# Unclamped kernels, usable on any real angle; the radial integrator needs these
# because guarded trajectories may graze the domain edge before an event fires.

def _F(x, a, b):
    return 0.5 * a * np.sin(2.0 * x) * (np.sin(x) ** 2 - b / a)


def _Fprime(x, a, b):
    # F'(x) = (a/2)(cos 2x - cos 4x) - b cos 2x
    return 0.5 * a * (np.cos(2.0 * x) - np.cos(4.0 * x)) - b * np.cos(2.0 * x)


def _Fsecond(x, a, b):
    # F''(x) = 2a sin 4x + (2b - a) sin 2x
    return 2.0 * a * np.sin(4.0 * x) + (2.0 * b - a) * np.sin(2.0 * x)


def eval_P(xi, p: Params):
    """Cubic factor P(xi) = a xi^3 - b xi, so that F(x) = cos(x) P(sin(x))."""
    xi = np.asarray(xi, dtype=float)
    out = p.a * xi**3 - p.b * xi
    return float(out) if out.ndim == 0 else out


def eval_F(x, p: Params):
    """F(x) = (a/2) sin(2x) (sin(x)^2 - b/a) on [0, pi/2]."""
    x = _clamp_angle(x)
    out = _F(x, p.a, p.b)
    return float(out) if out.ndim == 0 else out


def eval_Fprime(x, p: Params):
    """Closed-form F'(x); F'(0) = -b and F'(pi/2) = b - a."""
    x = _clamp_angle(x)
    out = _Fprime(x, p.a, p.b)
    return float(out) if out.ndim == 0 else out


def eval_Fsecond(x, p: Params):
    """Closed-form F''(x); vanishes at both endpoints of [0, pi/2]."""
    x = _clamp_angle(x)
    out = _Fsecond(x, p.a, p.b)
    return float(out) if out.ndim == 0 else out


def eval_I(x, lam: float, p: Params):
    """I(x) = x F'(x) - lam F(x), the scaled comparison function.

    Requires lam > 1.  On (0, pi/2) the function has a single sign change
    when a > 2b; I(x)/x -> (lam - 1) b as x -> 0+ and I(pi/2) = (pi/2)(b - a).
    """
    if not lam > 1.0:
        raise ValueError(f"lambda must exceed 1, got {lam}")
    x = _clamp_angle(x)
    out = x * _Fprime(x, p.a, p.b) - lam * _F(x, p.a, p.b)
    return float(out) if out.ndim == 0 else out


def root_of_I(lam: float, p: Params, tol: float = 1e-12):
    """Unique root of I on (arcsin sqrt(b/a), pi/2), by bracketed bisection.

    Returns (x_star, I_prime_at_root).  The sign of the returned derivative is
    checked to be negative (transversal crossing); a positive value means the
    bracketing failed and is reported as an error.
    """
    if not lam > 1.0:
        raise ValueError(f"lambda must exceed 1, got {lam}")
    lo = p.stationary_angle
    hi = math.pi / 2
    f_lo = eval_I(lo, lam, p)
    f_hi = eval_I(hi, lam, p)
    if not (f_lo > 0.0 > f_hi):
        raise RuntimeError(
            f"no sign change for I on ({lo:.6f}, {hi:.6f}): I(lo)={f_lo:.3e}, I(hi)={f_hi:.3e}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if eval_I(mid, lam, p) > 0.0:
            lo = mid
        else:
            hi = mid
    x_star = 0.5 * (lo + hi)
    h = 1e-7
    d_i = (eval_I(min(x_star + h, math.pi / 2), lam, p) - eval_I(x_star - h, lam, p)) / (
        min(x_star + h, math.pi / 2) - (x_star - h)
    )
    if d_i >= 0.0:
        raise RuntimeError("root of I found with non-negative slope; bracket unreliable")
    return x_star, d_i


def hamiltonian(u, du, p: Params):
    """Local energy H = u'^2/2 + (a/4) sin(u)^4 - (b/2) sin(u)^2.

    Along a radial trajectory H' = -((d-1)/r) u'^2, so H is non-increasing for
    d >= 2 and conserved for d = 1.
    """
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    s2 = np.sin(u) ** 2
    out = 0.5 * du**2 + 0.25 * p.a * s2**2 - 0.5 * p.b * s2
    return float(out) if out.ndim == 0 else out


def xi_quotient(xi: float, p: Params) -> float:
    """Logarithmic derivative quotient xi P'(xi)/P(xi) = 3 + 2b/(a xi^2 - b).

    Strictly decreasing in xi on (sqrt(b/a), 1]; diverges at the pole
    a xi^2 = b, which is rejected.
    """
    denom = p.a * xi**2 - p.b
    if denom <= 0.0:
        raise ValueError("xi_quotient requires a xi^2 > b (pole at equality)")
    return 3.0 + 2.0 * p.b / denom


def surface_measure(d: int) -> float:
    """Surface measure of the unit sphere in R^d (2, 2 pi, 4 pi, ...)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def ad_quotient_upper_bound(r, phi, p: Params) -> float:
    """Variational quotient 2 (∫phi^2)^(2/d) (∫|grad phi|^2/(1-phi^2)_+) / ∫phi^4.

    Any admissible radial profile with 0 <= phi <= 1 gives an upper bound for
    the coupling threshold a_d.  Integrals use the surface-measure weight
    r^(d-1) |S^(d-1)| and trapezoid quadrature on the given grid; the gradient
    is a second-order finite difference of the samples.  The quotient is
    invariant under dilation of the profile in every dimension.
    """
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if r.ndim != 1 or r.shape != phi.shape or r.size < 5:
        raise ValueError("profile must be two matching 1-d arrays with >= 5 samples")
    if np.any(np.diff(r) <= 0) or r[0] < 0:
        raise ValueError("radial grid must be increasing and non-negative")
    if np.any(phi < -1e-12) or np.any(phi > 1.0 + 1e-12):
        raise ValueError("profile values must lie in [0, 1]")
    d = p.d
    w = surface_measure(d) * r ** (d - 1)
    grad = np.gradient(phi, r)
    denom_pt = 1.0 - phi**2
    # (1-phi^2)_+ in the denominator: a saturated profile with nonzero slope
    # contributes an arbitrarily large amount, which still yields a valid bound.
    denom_pt = np.where(denom_pt > 1e-300, denom_pt, 1e-300)
    int_sq = np.trapezoid(phi**2 * w, r)
    int_grad = np.trapezoid(grad**2 / denom_pt * w, r)
    int_quartic = np.trapezoid(phi**4 * w, r)
    if int_quartic < 1e-290:
        raise ValueError("degenerate profile: vanishing quartic integral")
    return 2.0 * int_sq ** (2.0 / d) * int_grad / int_quartic


@dataclass(frozen=True)
class ScalarFns:
    """Evaluation surface bound to a fixed parameter record."""

    p: Params

    def P(self, xi):
        return eval_P(xi, self.p)

    def F(self, x):
        return eval_F(x, self.p)

    def Fprime(self, x):
        return eval_Fprime(x, self.p)

    def Fsecond(self, x):
        return eval_Fsecond(x, self.p)

    def I(self, x, lam):
        return eval_I(x, lam, self.p)

    def H(self, u, du):
        return hamiltonian(u, du, self.p)

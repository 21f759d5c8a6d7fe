"""Shooting solver for the radial profile equation.

Integrates u'' + ((d-1)/r) u' + F(u) = 0 outward from a series start at the
origin, classifies each trajectory by its first decisive event, and bisects
the initial angle until the bracket around the decaying profile is thinner
than the requested tolerance.  The certified output bundles the bracket with
its endpoint verdicts, the final trajectory, a resampled profile whose far
field is replaced by the fitted decay law, and the decay constants.

Verdict semantics:

* ``SMinus``: the angle crossed zero while decreasing (crossing radius and the
  slope there are the certificate).
* ``SPlus``: the slope vanished while the angle was still positive and the
  local energy H was negative, which traps the trajectory away from zero for
  all later radii.
* ``SZero``: never certified exactly.  The tag marks a candidate: either the
  trajectory entered the near-zero funnel and reached the truncation radius,
  or (d = 1 only) the conserved energy is numerically indistinguishable from
  the separatrix value and the trajectory funneled toward zero before any
  event that machine noise could produce.
* ``Unresolved``: anything else, with a reason recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import simpson, solve_ivp

from .scalar_model import (
    Params,
    _F,
    eval_F,
    eval_Fprime,
    hamiltonian,
    surface_measure,
)

SPLUS = "SPlus"
SZERO = "SZero"
SMINUS = "SMinus"
UNRESOLVED = "Unresolved"

STATIONARY_TOL = 1e-12
ESCAPE_MARGIN = 0.2  # terminal guard this far above pi/2
FUNNEL_FRACTION = 0.05  # "near zero" means u below this fraction of u(0)
U_SWITCH = 1e-4  # hand off from dense output to the decay law at this angle
DEFAULT_GRID_N = 4001


class RegimeError(ValueError):
    """No decaying profile can exist for the requested couplings."""


class BracketError(RuntimeError):
    """The bisection bracket could not be established or maintained."""


@dataclass(frozen=True)
class ShootControls:
    """Integration and bisection knobs.

    ``r_max`` and ``h_max`` default to 40/sqrt(b) and 0.1/sqrt(b); pass
    explicit values to override.  ``h_min`` is a reporting threshold only:
    the adaptive integrator signals underflow itself.
    """

    r_start: float = 1e-4
    r_max: float | None = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    bisect_tol: float = 1e-12
    h_min: float = 0.0
    h_max: float | None = None
    grid_n: int = DEFAULT_GRID_N

    def __post_init__(self):
        if not self.r_start > 0:
            raise ValueError("r_start must be positive")
        if self.r_max is not None and not self.r_max > self.r_start:
            raise ValueError("r_max must exceed r_start")
        for name in ("rel_tol", "abs_tol", "bisect_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.h_min < 0:
            raise ValueError("h_min must be non-negative")
        if self.grid_n < 9:
            raise ValueError("grid_n must be at least 9")

    def resolved_r_max(self, p: Params) -> float:
        return self.r_max if self.r_max is not None else 40.0 / math.sqrt(p.b)

    def resolved_h_max(self, p: Params) -> float:
        return self.h_max if self.h_max is not None else 0.1 / math.sqrt(p.b)


@dataclass
class Trajectory:
    """Accepted-step samples of one shot plus the dense interpolant."""

    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    H: np.ndarray
    y: float
    interp: object = field(default=None, repr=False)


@dataclass
class Classification:
    tag: str
    r_event: float | None
    certificate: dict


def taylor_coefficients(y: float, p: Params) -> tuple[float, float]:
    """Series coefficients for u = y + c2 r^2 + c4 r^4 near the regular origin.

    c2 = -F(y)/(2d) comes from balancing the ODE at r = 0; c4 follows from
    differentiating the equation once more.
    """
    c2 = -eval_F(y, p) / (2.0 * p.d)
    c4 = -eval_Fprime(y, p) * c2 / (4.0 * p.d + 8.0)
    return c2, c4


def _series_state(y: float, p: Params, r0: float) -> tuple[float, float]:
    c2, c4 = taylor_coefficients(y, p)
    return y + c2 * r0**2 + c4 * r0**4, 2.0 * c2 * r0 + 4.0 * c4 * r0**3


def shoot(y: float, p: Params, c: ShootControls | None = None):
    """Integrate one trajectory from u(0) = y and classify its fate.

    Returns ``(Trajectory, Classification)``.  Event locations come from
    sign-change bracketing on the dense output followed by root polish, so
    the recorded radii are accurate to interpolant resolution.
    """
    if c is None:
        c = ShootControls()
    if not 0.0 < y < math.pi / 2:
        raise ValueError("initial angle must lie strictly inside (0, pi/2)")
    if p.a > p.b and abs(y - p.stationary_angle) <= STATIONARY_TOL:
        raise ValueError("initial angle coincides with the stationary value arcsin(sqrt(b/a))")

    a, b, d = p.a, p.b, p.d
    r_max = c.resolved_r_max(p)
    fric = float(d - 1)

    def rhs(r, s):
        return (s[1], -fric / r * s[1] - _F(s[0], a, b))

    def ev_cross(r, s):
        return s[0]

    ev_cross.terminal = True
    ev_cross.direction = -1.0

    def ev_turn(r, s):
        return s[1]

    ev_turn.terminal = True
    ev_turn.direction = 0.0

    def ev_escape(r, s):
        return s[0] - (math.pi / 2 + ESCAPE_MARGIN)

    ev_escape.terminal = True
    ev_escape.direction = 1.0

    u0, du0 = _series_state(y, p, c.r_start)
    sol = solve_ivp(
        rhs,
        (c.r_start, r_max),
        (u0, du0),
        method="DOP853",
        rtol=c.rel_tol,
        atol=c.abs_tol,
        max_step=c.resolved_h_max(p),
        dense_output=True,
        events=(ev_cross, ev_turn, ev_escape),
    )
    if sol.status == -1:
        raise RuntimeError(f"integrator failure (step-size underflow): {sol.message}")

    r = sol.t
    u, du = sol.y
    H = hamiltonian(u, du, p)
    traj = Trajectory(r=r, u=u, du=du, H=H, y=float(y), interp=sol.sol)

    crossed = sol.t_events[0].size > 0
    turned = sol.t_events[1].size > 0
    escaped = sol.t_events[2].size > 0

    def event_state(i):
        re = float(sol.t_events[i][0])
        ue, due = (float(v) for v in sol.y_events[i][0])
        return re, ue, due

    funnel_h_slack = 1e-8 * max(1.0, b)
    in_funnel = (u < FUNNEL_FRACTION * y) & (du < 0.0) & (H < funnel_h_slack)
    funnel_entry = float(r[int(np.argmax(in_funnel))]) if bool(in_funnel.any()) else None

    if escaped:
        re, ue, _ = event_state(2)
        return traj, Classification(UNRESOLVED, re, {"reason": "exited-angle-window", "u": ue})

    if d == 1:
        return traj, _classify_d1(
            traj, p, c, crossed, turned, event_state, funnel_entry
        )

    if crossed:
        re, _, due = event_state(0)
        return traj, Classification(SMINUS, re, {"du_at_zero": due})
    if turned:
        re, ue, due = event_state(1)
        He = float(hamiltonian(ue, due, p))
        if ue > 0.0 and He < 0.0:
            return traj, Classification(SPLUS, re, {"H_at_turn": He, "u_at_turn": ue})
        return traj, Classification(
            UNRESOLVED, re, {"reason": "turning-without-trap-certificate", "H_at_turn": He, "u_at_turn": ue}
        )
    # no event fired by r_max
    if funnel_entry is not None and bool(in_funnel[-1]):
        cert = {"reason": "funnel", "u_end": float(u[-1]), "du_end": float(du[-1]), "H_end": float(H[-1])}
        return traj, Classification(SZERO, funnel_entry, cert)
    if float(H[-1]) < 0.0 and float(u[-1]) > 0.0:
        # negative local energy keeps the angle away from zero for all later
        # radii, so the trajectory belongs to the trapped side even though no
        # turning point was seen
        cert = {"reason": "stationary-attracted", "H_end": float(H[-1]), "u_end": float(u[-1])}
        return traj, Classification(SPLUS, float(r[-1]), cert)
    return traj, Classification(UNRESOLVED, None, {"reason": "no-event"})


def _classify_d1(traj, p, c, crossed, turned, event_state, funnel_entry):
    """d = 1 verdicts lean on exact conservation of H.

    H(0) = G(y) already decides the fate analytically: positive energy forces
    a zero crossing, negative energy traps the angle, and the separatrix value
    zero is the decaying profile.  Events confirm the verdict; when |H(0)| is
    below the integration noise floor the event direction is meaningless and
    funnel capture is the only honest signal.
    """
    G0 = float(hamiltonian(traj.y, 0.0, p))
    floor = 10.0 * c.abs_tol * max(1.0, p.b)

    if abs(G0) <= floor:
        if funnel_entry is not None:
            cert = {"reason": "separatrix-funnel", "H0": G0, "u_end": float(traj.u[-1])}
            if crossed:
                cert["noise_event"] = "crossing"
            elif turned:
                cert["noise_event"] = "turning"
            return Classification(SZERO, funnel_entry, cert)
        # zero energy but no funnel: tiny initial angles sit on the unstable
        # side of u = 0 and still resolve through their first event
        if turned:
            re, ue, due = event_state(1)
            He = float(hamiltonian(ue, due, p))
            if ue > 0.0 and He <= floor:
                return Classification(SPLUS, re, {"H_at_turn": He, "u_at_turn": ue, "H0": G0})
        if crossed:
            re, _, due = event_state(0)
            return Classification(SMINUS, re, {"du_at_zero": due, "H0": G0})
        return Classification(UNRESOLVED, None, {"reason": "no-event", "H0": G0})

    if G0 > 0.0:
        if crossed:
            re, _, due = event_state(0)
            return Classification(SMINUS, re, {"du_at_zero": due, "H0": G0})
        return Classification(
            UNRESOLVED, None, {"reason": "positive-energy-without-crossing", "H0": G0}
        )
    if turned:
        re, ue, due = event_state(1)
        He = float(hamiltonian(ue, due, p))
        if ue > 0.0:
            return Classification(SPLUS, re, {"H_at_turn": He, "u_at_turn": ue, "H0": G0})
    return Classification(
        UNRESOLVED, None, {"reason": "negative-energy-without-turning", "H0": G0}
    )


def _steer(cls: Classification) -> int:
    """Bisection direction implied by a verdict: +1 moves the lower endpoint."""
    if cls.tag == SPLUS:
        return 1
    if cls.tag == SMINUS:
        return -1
    if cls.tag == SZERO:
        if cls.certificate.get("noise_event") == "crossing":
            return -1
        return 1
    return 0


def classify_portrait(p: Params, y_samples, c: ShootControls | None = None, keep_trajectories: bool = False):
    """Classify a batch of initial angles.

    Returns ``[(y, Classification), ...]`` or triples with the trajectory
    appended when ``keep_trajectories`` is set.  Stationary inputs raise.
    """
    out = []
    for y in y_samples:
        traj, cls = shoot(float(y), p, c)
        out.append((float(y), cls, traj) if keep_trajectories else (float(y), cls))
    return out


def decay_fit(traj: Trajectory, p: Params, u_lo: float = 1e-10, u_hi: float = 1e-3, min_samples: int = 20):
    """Least-squares fit of the far-field law u ~ C exp(-rate r) r^{-(d-1)/2}.

    Regresses log u + ((d-1)/2) log r against r over the window where
    u_lo < u < u_hi, the angle is still falling, and the sample sits at least
    3/sqrt(b) before the trajectory end (the last stretch is contaminated by
    the unstable mode that eventually triggers an event).  Returns
    ``(C, rate, (r_first, r_last))``.
    """
    sqrt_b = math.sqrt(p.b)
    r_end = float(traj.r[-1])
    mask = (
        (traj.u > u_lo)
        & (traj.u < u_hi)
        & (traj.du < 0.0)
        & (traj.r <= r_end - 3.0 / sqrt_b)
    )
    n = int(mask.sum())
    if n < min_samples:
        raise RuntimeError(f"decay window too short: {n} qualifying samples (need {min_samples})")
    r = traj.r[mask]
    z = np.log(traj.u[mask]) + 0.5 * (p.d - 1) * np.log(r)
    design = np.column_stack([np.ones_like(r), -r])
    (log_c, rate), *_ = np.linalg.lstsq(design, z, rcond=None)
    rate = float(rate)
    if abs(rate - sqrt_b) > 0.02 * sqrt_b:
        raise RuntimeError(
            f"fitted decay rate {rate:.6e} deviates more than 2% from sqrt(b) = {sqrt_b:.6e}"
        )
    return float(math.exp(log_c)), rate, (float(r[0]), float(r[-1]))


def _handoff_radius(traj: Trajectory, u_switch: float) -> float:
    """Radius where the profile first drops below u_switch, located by
    log-linear interpolation between the enclosing accepted steps."""
    below = traj.u < u_switch
    if not bool(below.any()) or bool(below[0]):
        raise RuntimeError("trajectory never hands off cleanly to the decay law")
    i = int(np.argmax(below))
    r1, r2 = float(traj.r[i - 1]), float(traj.r[i])
    z1, z2 = math.log(traj.u[i - 1]), math.log(traj.u[i])
    return r1 + (z1 - math.log(u_switch)) / (z1 - z2) * (r2 - r1)


def _pinned_amplitude(traj: Trajectory, p: Params, r_pin: float) -> float:
    """Amplitude of the decay law with the rate pinned to sqrt(b) exactly,
    matched to the dense output at the handoff radius.

    Pinning at a single early radius instead of averaging over the far
    window matters: the integrated profile rides a residual growing mode
    whose relative size doubles every half unit of radius, so far-window
    samples would bias the amplitude and open a gap where the resampled
    profile switches from dense output to the decay law.
    """
    u_pin = float(traj.interp(r_pin)[0])
    if u_pin <= 0.0:
        raise RuntimeError(f"profile not positive at the handoff radius {r_pin:.3f}")
    return u_pin * math.exp(math.sqrt(p.b) * r_pin) * r_pin ** (0.5 * (p.d - 1))


def _smootherstep(t: np.ndarray) -> np.ndarray:
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def _dsmootherstep(t: np.ndarray) -> np.ndarray:
    return 30.0 * t * t * (t - 1.0) ** 2


@dataclass
class ProfileEvaluator:
    """Piecewise profile: series at the origin, dense ODE output in the body,
    rate-pinned decay law in the far field, smoothly blended in between."""

    y: float
    c2: float
    c4: float
    r_start: float
    interp: object
    blend_lo: float
    blend_hi: float
    amplitude: float
    sqrt_b: float
    half_power: float  # (d-1)/2

    @classmethod
    def build(cls, y: float, p: Params, traj: Trajectory, amplitude: float,
              u_switch: float = U_SWITCH, half_width: float | None = None):
        sqrt_b = math.sqrt(p.b)
        if half_width is None:
            half_width = 0.5 / sqrt_b
        r_switch = _handoff_radius(traj, u_switch)
        blend_lo, blend_hi = r_switch - half_width, r_switch + half_width
        if not (traj.r[0] < blend_lo and blend_hi < traj.r[-1]):
            raise RuntimeError("blend window leaves the dense-output domain")
        c2, c4 = taylor_coefficients(y, p)
        return cls(
            y=y, c2=c2, c4=c4, r_start=float(traj.r[0]), interp=traj.interp,
            blend_lo=blend_lo, blend_hi=blend_hi, amplitude=amplitude,
            sqrt_b=sqrt_b, half_power=0.5 * (getattr(p, "d") - 1),
        )

    def _tail(self, r):
        v = self.amplitude * np.exp(-self.sqrt_b * r) * r ** (-self.half_power)
        dv = v * (-self.sqrt_b - self.half_power / r)
        return v, dv

    def evaluate(self, r):
        """Vectorized (u, du) at arbitrary radii in [0, inf)."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        u = np.empty_like(r)
        du = np.empty_like(r)

        m0 = r < self.r_start
        if m0.any():
            rr = r[m0]
            u[m0] = self.y + self.c2 * rr**2 + self.c4 * rr**4
            du[m0] = 2.0 * self.c2 * rr + 4.0 * self.c4 * rr**3
        m1 = (~m0) & (r <= self.blend_lo)
        if m1.any():
            vals = self.interp(r[m1])
            u[m1], du[m1] = vals[0], vals[1]
        mb = (r > self.blend_lo) & (r < self.blend_hi)
        if mb.any():
            rr = r[mb]
            vals = self.interp(rr)
            td, dtd = self._tail(rr)
            t = (rr - self.blend_lo) / (self.blend_hi - self.blend_lo)
            s = 1.0 - _smootherstep(t)
            ds = -_dsmootherstep(t) / (self.blend_hi - self.blend_lo)
            u[mb] = s * vals[0] + (1.0 - s) * td
            du[mb] = s * vals[1] + (1.0 - s) * dtd + ds * (vals[0] - td)
        m2 = r >= self.blend_hi
        if m2.any():
            u[m2], du[m2] = self._tail(r[m2])

        if scalar:
            return float(u[0]), float(du[0])
        return u, du

    def value(self, r):
        return self.evaluate(r)[0]

    def deriv(self, r):
        return self.evaluate(r)[1]


@dataclass
class DilatedEvaluator:
    """Profile u(scale * r), which solves the equation with couplings scaled
    by scale^2."""

    base: object
    scale: float

    def evaluate(self, r):
        u, du = self.base.evaluate(np.asarray(r, dtype=float) * self.scale)
        return u, du * self.scale

    def value(self, r):
        return self.evaluate(r)[0]

    def deriv(self, r):
        return self.evaluate(r)[1]


@dataclass
class GroundState:
    """Certified decaying profile with its bisection bracket and decay fit."""

    params: Params
    y_bar: float
    traj: Trajectory
    decay_C: float
    decay_rate: float
    grid: np.ndarray
    Q: np.ndarray
    dQ: np.ndarray
    y_lo: float
    y_hi: float
    lo_certificate: Classification
    hi_certificate: Classification
    decay_window: tuple
    decay_C_free: float
    evaluator: object = field(default=None, repr=False)
    mid_classification: Classification | None = field(default=None, repr=False)

    @property
    def bracket_width(self) -> float:
        return self.y_hi - self.y_lo

    def profile(self, r):
        if self.evaluator is None:
            raise ValueError("this state carries no profile evaluator")
        return self.evaluator.value(r)

    def dprofile(self, r):
        if self.evaluator is None:
            raise ValueError("this state carries no profile evaluator")
        return self.evaluator.deriv(r)


def find_ground_state(p: Params, c: ShootControls | None = None) -> GroundState:
    """Bisect the initial angle to the decaying profile and certify it.

    The lower endpoint starts at the zero-energy angle arcsin(sqrt(2b/a))
    (0.95 of it for d = 1, where that angle is the answer itself) and the
    upper endpoint just below pi/2.  The final profile is re-integrated at
    tightened tolerances before resampling.
    """
    if c is None:
        c = ShootControls()
    if not p.ground_state_regime:
        raise RegimeError(
            f"no nontrivial decaying solution for a <= 2b (a={p.a}, b={p.b})"
        )
    thr = p.threshold_angle
    lo = thr if p.d >= 2 else 0.95 * thr
    hi = math.pi / 2 - 1e-3

    _, lo_cls = shoot(lo, p, c)
    _, hi_cls = shoot(hi, p, c)
    if _steer(lo_cls) <= 0:
        raise BracketError(f"lower endpoint y={lo!r} not on the trapped side: {lo_cls.tag}")
    if _steer(hi_cls) >= 0:
        raise BracketError(f"upper endpoint y={hi!r} not on the crossing side: {hi_cls.tag}")

    while hi - lo > c.bisect_tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break  # hit floating-point resolution
        _, cls = shoot(mid, p, c)
        s = _steer(cls)
        if s > 0:
            lo, lo_cls = mid, cls
        elif s < 0:
            hi, hi_cls = mid, cls
        elif cls.tag == SZERO:
            # the candidate marks the transition itself; keep it as the
            # trapped-side endpoint so the bracket still encloses it
            lo, lo_cls = mid, cls
        else:
            raise BracketError(f"unresolved verdict at y={mid!r}: {cls.certificate}")

    y_bar = 0.5 * (lo + hi)
    tight = replace(c, rel_tol=min(c.rel_tol, 1e-12), abs_tol=min(c.abs_tol, 1e-14))
    traj, mid_cls = shoot(y_bar, p, tight)

    decay_C_free, rate, window = decay_fit(traj, p)
    amplitude = _pinned_amplitude(traj, p, _handoff_radius(traj, U_SWITCH))
    evaluator = ProfileEvaluator.build(y_bar, p, traj, amplitude)

    grid = np.linspace(0.0, c.resolved_r_max(p), c.grid_n)
    Q, dQ = evaluator.evaluate(grid)

    return GroundState(
        params=p,
        y_bar=y_bar,
        traj=traj,
        decay_C=amplitude,
        decay_rate=rate,
        grid=grid,
        Q=Q,
        dQ=dQ,
        y_lo=lo,
        y_hi=hi,
        lo_certificate=lo_cls,
        hi_certificate=hi_cls,
        decay_window=window,
        decay_C_free=decay_C_free,
        evaluator=evaluator,
        mid_classification=mid_cls,
    )


def mass_and_energy(gs: GroundState) -> tuple[float, float]:
    """Mass and energy of phi = sin(Q) by quadrature on the resampled grid.

    Mass is |S^{d-1}| int sin^2(Q) r^{d-1} dr.  Energy uses the transformed
    gradient, (1/2) int (Q')^2 r^{d-1} dr - (a/4) int sin^4(Q) r^{d-1} dr,
    both scaled by the sphere measure.  Quadratic tail contributions beyond
    the grid come from the fitted decay law; quartic tails are below double
    precision and omitted.
    """
    p = gs.params
    w = surface_measure(p.d)
    rw = gs.grid ** (p.d - 1)
    s = np.sin(gs.Q)
    mass = w * float(simpson(s**2 * rw, x=gs.grid))
    kinetic = 0.5 * w * float(simpson(gs.dQ**2 * rw, x=gs.grid))
    quartic = 0.25 * p.a * w * float(simpson(s**4 * rw, x=gs.grid))

    sqrt_b = math.sqrt(p.b)
    r_end = float(gs.grid[-1])
    tail2 = w * gs.decay_C**2 * math.exp(-2.0 * sqrt_b * r_end) / (2.0 * sqrt_b)
    mass += tail2
    kinetic += 0.5 * p.b * tail2  # (Q')^2 ~ b Q^2 in the far field

    return float(mass), float(kinetic - quartic)


def energy_via_gradient_quotient(gs: GroundState) -> float:
    """Energy evaluated directly on phi = sin(Q) with the constrained-gradient
    quotient |phi'|^2 / (1 - phi^2); cross-checks the transformed formula."""
    p = gs.params
    w = surface_measure(p.d)
    rw = gs.grid ** (p.d - 1)
    phi = np.sin(gs.Q)
    dphi = np.cos(gs.Q) * gs.dQ
    denom = np.maximum(1.0 - phi**2, 1e-300)
    kinetic = 0.5 * w * float(simpson(dphi**2 / denom * rw, x=gs.grid))
    quartic = 0.25 * p.a * w * float(simpson(phi**4 * rw, x=gs.grid))

    sqrt_b = math.sqrt(p.b)
    r_end = float(gs.grid[-1])
    tail2 = w * gs.decay_C**2 * math.exp(-2.0 * sqrt_b * r_end) / (2.0 * sqrt_b)
    return float(kinetic + 0.5 * p.b * tail2 - quartic)


def rescale_to_unit_mass(gs: GroundState) -> tuple[GroundState, Params]:
    """Dilate the profile to unit mass.

    u(lam r) solves the equation with couplings (lam^2 a, lam^2 b) and carries
    mass lam^{-d} times the original, so lam = mass^{1/d}.  The a/b ratio is
    preserved.
    """
    mass, _ = mass_and_energy(gs)
    if not mass > 0:
        raise ValueError("mass must be positive to rescale")
    lam = mass ** (1.0 / gs.params.d)
    p2 = Params(lam**2 * gs.params.a, lam**2 * gs.params.b, gs.params.d)

    traj2 = Trajectory(
        r=gs.traj.r / lam,
        u=gs.traj.u.copy(),
        du=gs.traj.du * lam,
        H=gs.traj.H * lam**2,
        y=gs.traj.y,
        interp=None,
    )
    ev2 = DilatedEvaluator(gs.evaluator, lam) if gs.evaluator is not None else None
    prefac = lam ** (-0.5 * (gs.params.d - 1))
    gs2 = GroundState(
        params=p2,
        y_bar=gs.y_bar,
        traj=traj2,
        decay_C=gs.decay_C * prefac,
        decay_rate=gs.decay_rate * lam,
        grid=gs.grid / lam,
        Q=gs.Q.copy(),
        dQ=gs.dQ * lam,
        y_lo=gs.y_lo,
        y_hi=gs.y_hi,
        lo_certificate=gs.lo_certificate,
        hi_certificate=gs.hi_certificate,
        decay_window=(gs.decay_window[0] / lam, gs.decay_window[1] / lam),
        decay_C_free=gs.decay_C_free * prefac,
        evaluator=ev2,
        mid_classification=gs.mid_classification,
    )
    return gs2, p2

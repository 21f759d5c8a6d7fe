"""Command-line front end: validated configs in, deterministic artifacts out.

Each subcommand maps onto one solver operation, validates its resolved
configuration against a JSON schema before any compute, writes the
artifacts listed in its help text plus a run manifest, and exits 0 on
success, 2 on a validation problem, 3 on a numerical failure.  Values
resolve as: built-in defaults, then the config file, then command-line
flags; the output directory additionally honors the NUCLEON_NLS_OUT
environment variable (flag beats environment beats config).
"""

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import artifacts, spectra
from .linearization import solve_linearized, wronskian_checks
from .scalar_model import Params, eval_F, eval_Fprime
from .shooting import (
    BracketError,
    RegimeError,
    ShootControls,
    classify_portrait,
    energy_via_gradient_quotient,
    find_ground_state,
    mass_and_energy,
    shoot,
)
from .sigma_omega import (
    ContinuationError,
    ContinuationParams,
    NewtonError,
    RadialGrid,
    continue_branch,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}

_SCALAR_PROPS = {
    "a": _POS,
    "b": _POS,
    "d": {"type": "integer", "minimum": 1, "maximum": 3},
    "output_dir": {"type": "string"},
}


def _schema(extra=None):
    props = dict(_SCALAR_PROPS)
    if extra:
        props.update(extra)
    return {"type": "object", "properties": props, "additionalProperties": False}


SCHEMAS = {
    "shoot": _schema({
        "y": {"type": "number", "exclusiveMinimum": 0,
              "exclusiveMaximum": math.pi / 2},
        "r_max": _POS,
        "rel_tol": _POS,
        "abs_tol": _POS,
    }),
    "ground-state": _schema({"grid_n": {"type": "integer", "minimum": 9}}),
    "portrait": _schema({
        "samples": {"type": "integer", "minimum": 2},
        "y_min": _POS,
        "y_max": {"type": "number", "exclusiveMinimum": 0,
                  "exclusiveMaximum": math.pi / 2},
    }),
    "linearize": _schema({"y": {"type": ["number", "null"]}}),
    "wronskian": _schema(),
    "spectrum": _schema({
        "ells": {"type": "array", "items": {"type": "integer", "minimum": 0},
                 "minItems": 1},
        "k": {"type": "integer", "minimum": 1},
        "grid_n": {"type": "integer", "minimum": 64},
        "with_vectors": {"type": "boolean"},
    }),
    "energy": _schema(),
    "check-F": _schema({"samples": {"type": "integer", "minimum": 10}}),
    "continue": {
        "type": "object",
        "properties": {
            "C": _POS,
            "D": _POS,
            "theta": _POS,
            "lambda": _POS,
            "mu": _POS,
            "eps_list": {"type": "array", "items": _NONNEG, "minItems": 1},
            "grid": {
                "type": "object",
                "properties": {
                    "N": {"type": "integer", "minimum": 8},
                    "R": _POS,
                },
                "additionalProperties": False,
            },
            "tolerances": {
                "type": "object",
                "properties": {
                    "newton_tol": _POS,
                    "max_iter": {"type": "integer", "minimum": 1},
                },
                "additionalProperties": False,
            },
            "output_dir": {"type": "string"},
        },
        "additionalProperties": False,
    },
}

_SCALAR_DEFAULTS = {"a": 4.0, "b": 1.0, "d": 3}

DEFAULTS = {
    "shoot": {**_SCALAR_DEFAULTS, "y": 1.0},
    "ground-state": _SCALAR_DEFAULTS,
    "portrait": {**_SCALAR_DEFAULTS, "samples": 50, "y_min": 0.05,
                 "y_max": math.pi / 2 - 1e-3},
    "linearize": {**_SCALAR_DEFAULTS, "y": None},
    "wronskian": _SCALAR_DEFAULTS,
    "spectrum": {**_SCALAR_DEFAULTS, "ells": [0, 1, 2, 3], "k": 4,
                 "grid_n": spectra.DEFAULT_N, "with_vectors": False},
    "energy": _SCALAR_DEFAULTS,
    "check-F": {**_SCALAR_DEFAULTS, "samples": 201},
    "continue": {
        "C": 1.0, "D": 1.0, "theta": 1.0, "lambda": 2.0, "mu": 0.5,
        "eps_list": [0.0, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1],
        "grid": {}, "tolerances": {},
    },
}


class ValidationFailure(Exception):
    pass


def _diagnostic(kind: str, detail: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "detail": detail}) + "\n")


def _load_config_file(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationFailure(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationFailure(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationFailure(f"config file {path} must hold a JSON object")
    return data


def _resolve_config(command, args):
    cfg = {k: (dict(v) if isinstance(v, dict) else list(v) if isinstance(v, list) else v)
           for k, v in DEFAULTS[command].items()}
    if args.config is not None:
        cfg.update(_load_config_file(args.config))
    for key, value in vars(args).items():
        if key in ("command", "config", "out_dir") or value is None:
            continue
        name = key
        if name == "lam":
            cfg["lambda"] = value
        elif name == "grid_n" and command == "continue":
            cfg.setdefault("grid", {})["N"] = value
        elif name == "grid_r":
            cfg.setdefault("grid", {})["R"] = value
        elif name == "newton_tol":
            cfg.setdefault("tolerances", {})["newton_tol"] = value
        elif name == "max_iter":
            cfg.setdefault("tolerances", {})["max_iter"] = value
        elif name == "eps_list":
            cfg["eps_list"] = value
        else:
            cfg[name] = value
    out_dir = args.out_dir or os.environ.get("NUCLEON_NLS_OUT") \
        or cfg.get("output_dir") or "out"
    cfg["output_dir"] = str(out_dir)

    import jsonschema

    try:
        jsonschema.validate(cfg, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        raise ValidationFailure(f"config rejected: {exc.message}") from exc
    return cfg


def _params(cfg) -> Params:
    return Params(a=float(cfg["a"]), b=float(cfg["b"]), d=int(cfg["d"]))


def _controls(cfg) -> ShootControls:
    kwargs = {}
    for key in ("r_max", "rel_tol", "abs_tol", "grid_n"):
        if cfg.get(key) is not None:
            kwargs[key] = cfg[key]
    return ShootControls(**kwargs)


# ---------------------------------------------------------------------------
# command implementations: each returns (artifact names, result summary)

def _cmd_shoot(cfg, out_dir, h):
    p = _params(cfg)
    traj, cls = shoot(float(cfg["y"]), p, _controls(cfg))
    rows = zip(traj.r, traj.u, traj.du, traj.H)
    artifacts.write_csv_artifact(out_dir / "trajectory.csv",
                                 ["r", "u", "du", "H"], rows, h)
    cert = {k: v for k, v in cls.certificate.items()}
    result = {
        "tag": cls.tag,
        "r_event": cls.r_event if cls.r_event is not None else float("nan"),
        "certificate": cert,
        "steps": int(traj.r.size),
    }
    return ["trajectory.csv"], result


def _cmd_ground_state(cfg, out_dir, h):
    p = _params(cfg)
    gs = find_ground_state(p, _controls(cfg))
    body = {
        "params": {"a": p.a, "b": p.b, "d": p.d},
        "y_bar": gs.y_bar,
        "bracket": {"lo": gs.y_lo, "hi": gs.y_hi, "width": gs.bracket_width},
        "certificates": {"lo_tag": gs.lo_certificate.tag,
                         "hi_tag": gs.hi_certificate.tag},
        "decay": {
            "amplitude": gs.decay_C,
            "amplitude_free_fit": gs.decay_C_free,
            "rate": gs.decay_rate,
            "window_lo": gs.decay_window[0],
            "window_hi": gs.decay_window[1],
        },
        "grid": {"r": gs.grid, "u": gs.Q, "du": gs.dQ},
    }
    artifacts.write_json_artifact(out_dir / "ground_state.json", body, h)
    artifacts.write_csv_artifact(
        out_dir / "decay_fit.csv",
        ["d", "rate", "amplitude", "window_lo", "window_hi"],
        [(p.d, gs.decay_rate, gs.decay_C_free,
          gs.decay_window[0], gs.decay_window[1])], h)
    result = {"y_bar": gs.y_bar, "bracket_width": gs.bracket_width}
    return ["ground_state.json", "decay_fit.csv"], result


def _cmd_portrait(cfg, out_dir, h):
    p = _params(cfg)
    y_min, y_max = float(cfg["y_min"]), float(cfg["y_max"])
    if not y_min < y_max:
        raise ValidationFailure(f"need y_min < y_max, got [{y_min}, {y_max}]")
    ys = np.linspace(y_min, y_max, int(cfg["samples"]))
    rows = []
    tags = {}
    for y, cls in classify_portrait(p, ys):
        rows.append((y, cls.tag,
                     cls.r_event if cls.r_event is not None else float("nan")))
        tags[cls.tag] = tags.get(cls.tag, 0) + 1
    artifacts.write_csv_artifact(out_dir / "portrait.csv",
                                 ["y", "tag", "r_event"], rows, h)
    return ["portrait.csv"], {"tag_counts": dict(sorted(tags.items()))}


def _cmd_linearize(cfg, out_dir, h):
    p = _params(cfg)
    c = _controls(cfg)
    y = cfg.get("y")
    if y is None:
        y = find_ground_state(p, c).y_bar
    traj, _ = shoot(float(y), p, c)
    lin = solve_linearized(traj, p, c)
    rows = zip(lin.r, lin.v, lin.dv, (int(k) for k in lin.rescale_count))
    artifacts.write_csv_artifact(out_dir / "linearized.csv",
                                 ["r", "v", "dv", "rescale_count"], rows, h)
    result = {
        "y": float(y),
        "sign_changes": [float(x) for x in lin.sign_change_radii],
        "divergence_flag": bool(lin.divergence_flag),
        "growth_rate": lin.growth_rate if lin.growth_rate is not None
        else float("nan"),
    }
    return ["linearized.csv"], result


def _cmd_wronskian(cfg, out_dir, h):
    p = _params(cfg)
    gs = find_ground_state(p, _controls(cfg))
    rep = wronskian_checks(gs, p)
    body = {
        "params": {"a": p.a, "b": p.b, "d": p.d},
        "y_bar": gs.y_bar,
        "h": rep["h"],
        "window": {"lo": rep["window"][0], "hi": rep["window"][1]},
        "residuals": {k: v for k, v in rep.items()
                      if k not in ("h", "window")},
    }
    artifacts.write_json_artifact(out_dir / "wronskian.json", body, h)
    return ["wronskian.json"], {"residuals": body["residuals"]}


def _cmd_spectrum(cfg, out_dir, h):
    p = _params(cfg)
    gs = find_ground_state(p, _controls({**cfg, "grid_n": None}))
    n = int(cfg["grid_n"])
    k = int(cfg["k"])
    ops = []
    for ell in cfg["ells"]:
        ops.append(("A", spectra.assemble_sector_A(gs, int(ell), N=n)))
    ops.append(("L1", spectra.assemble_L1_direct(gs, N=n)))
    ops.append(("L2", spectra.assemble_L2_direct(gs, N=n)))
    rows = []
    names = ["spectrum.csv"]
    kernel_dim_A = 0
    kernel_dim_L2 = 0
    for label, op in ops:
        rep = spectra.lowest_eigenpairs(op, k)
        for idx, lam in enumerate(rep.eigenvalues):
            rows.append((label, int(op.ell), int(idx), float(lam)))
        if label == "A":
            kernel_dim_A += len(rep.kernel_candidates) * \
                spectra.harmonic_dimension(op.ell, p.d)
        if label == "L2":
            kernel_dim_L2 += len(rep.kernel_candidates)
        if cfg["with_vectors"]:
            for idx in range(len(rep.eigenvalues)):
                name = f"eigenvector_{label}_{op.ell}_{idx}.csv"
                artifacts.write_csv_artifact(
                    out_dir / name, ["r", "value"],
                    zip(op.grid, rep.eigenvectors[idx]), h)
                names.append(name)
    artifacts.write_csv_artifact(out_dir / "spectrum.csv",
                                 ["operator", "ell", "index", "eigenvalue"],
                                 rows, h)
    result = {"kernel_dim_A": kernel_dim_A, "kernel_dim_L2": kernel_dim_L2}
    return names, result


def _cmd_continue(cfg, out_dir, h):
    cp = ContinuationParams(
        C=float(cfg["C"]), D=float(cfg["D"]), theta=float(cfg["theta"]),
        lam=float(cfg["lambda"]), mu=float(cfg["mu"]),
    )
    grid_cfg = cfg.get("grid") or {}
    if grid_cfg.get("N") is not None or grid_cfg.get("R") is not None:
        n = int(grid_cfg.get("N", 4000))
        radius = float(grid_cfg.get("R", 30.0 / math.sqrt(cp.b)))
        grid = RadialGrid.make(n, radius)
    else:
        grid = RadialGrid.default(cp)
    tol_cfg = cfg.get("tolerances") or {}
    kwargs = {}
    if tol_cfg.get("newton_tol") is not None:
        kwargs["newton_tol"] = float(tol_cfg["newton_tol"])
    if tol_cfg.get("max_iter") is not None:
        kwargs["max_iter"] = int(tol_cfg["max_iter"])
    gs = find_ground_state(cp.nls_params())

    eps_list = [float(e) for e in cfg["eps_list"]]
    truncation = None
    try:
        branch = continue_branch(eps_list, cp, grid=grid, gs=gs, **kwargs)
    except ContinuationError as exc:
        branch = exc.points
        truncation = exc

    names = []
    rows = []
    for i, pt in enumerate(branch):
        st = pt.state
        rows.append((pt.eps, int(pt.newton_iters), st.residual_norm,
                     pt.distance_to_limit, float(st.phi[0]),
                     float(np.max(np.abs(st.chi)))))
        snap = f"state_{i:02d}.json"
        artifacts.write_json_artifact(out_dir / snap, {
            "eps": pt.eps,
            "residual_norm": st.residual_norm,
            "grid": {"n": st.grid.n, "radius": st.grid.radius,
                     "h": st.grid.h},
            "phi": st.phi,
            "chi": st.chi,
            "wplus": st.wplus,
            "wminus": st.wminus,
        }, h)
        names.append(snap)
    artifacts.write_csv_artifact(
        out_dir / "branch.csv",
        ["eps", "newton_iters", "residual", "distance_to_limit",
         "phi_at_0", "chi_peak"],
        rows, h)
    names.insert(0, "branch.csv")
    if truncation is not None:
        raise ContinuationError(
            str(truncation) + f" (partial artifacts in {out_dir})",
            points=truncation.points, eps_failed=truncation.eps_failed,
            cause=truncation.cause)
    result = {
        "points": len(branch),
        "final_eps": branch[-1].eps,
        "final_residual": branch[-1].state.residual_norm,
    }
    return names, result


def _cmd_energy(cfg, out_dir, h):
    p = _params(cfg)
    gs = find_ground_state(p, _controls(cfg))
    mass, energy = mass_and_energy(gs)
    e2 = energy_via_gradient_quotient(gs)
    body = {
        "params": {"a": p.a, "b": p.b, "d": p.d},
        "y_bar": gs.y_bar,
        "mass": mass,
        "energy": energy,
        "energy_gradient_route": e2,
        "route_gap": abs(energy - e2),
    }
    artifacts.write_json_artifact(out_dir / "energy.json", body, h)
    return ["energy.json"], {"mass": mass, "energy": energy}


def _cmd_check_F(cfg, out_dir, h):
    p = _params(cfg)
    x = np.linspace(0.01, math.pi / 2 - 0.01, int(cfg["samples"]))
    fp = eval_Fprime(x, p)
    errs = []
    for step in (1e-4, 1e-5):
        fd = (eval_F(x + step, p) - eval_F(x - step, p)) / (2.0 * step)
        errs.append(float(np.max(np.abs(fd - fp))))
    order = math.log(errs[0] / errs[1]) / math.log(10.0)
    ok = order >= 1.9
    body = {
        "params": {"a": p.a, "b": p.b, "d": p.d},
        "fd_steps": [1e-4, 1e-5],
        "max_derivative_errors": errs,
        "observed_order": order,
        "endpoints": {"F_at_0": float(eval_F(0.0, p)),
                      "F_at_half_pi": float(eval_F(math.pi / 2, p))},
        "ok": ok,
    }
    artifacts.write_json_artifact(out_dir / "check_F.json", body, h)
    if not ok:
        raise RuntimeError(
            f"derivative consistency failed: observed order {order:.3f} < 1.9")
    return ["check_F.json"], {"observed_order": order}


_COMMANDS = {
    "shoot": _cmd_shoot,
    "ground-state": _cmd_ground_state,
    "portrait": _cmd_portrait,
    "linearize": _cmd_linearize,
    "wronskian": _cmd_wronskian,
    "spectrum": _cmd_spectrum,
    "continue": _cmd_continue,
    "energy": _cmd_energy,
    "check-F": _cmd_check_F,
}


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="nucleon-nls",
        description="radial ground states, their spectra, and the "
                    "relativistic continuation, with reproducible artifacts",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--out-dir", help="artifact directory "
                        "(beats NUCLEON_NLS_OUT and config)")

    def scalar(sp):
        common(sp)
        sp.add_argument("--a", type=float)
        sp.add_argument("--b", type=float)
        sp.add_argument("--d", type=int)

    sp = sub.add_parser("shoot", help="one shot at a fixed initial angle")
    scalar(sp)
    sp.add_argument("--y", type=float)
    sp.add_argument("--r-max", dest="r_max", type=float)
    sp.add_argument("--rel-tol", dest="rel_tol", type=float)
    sp.add_argument("--abs-tol", dest="abs_tol", type=float)

    sp = sub.add_parser("ground-state", help="bisect to the decaying profile")
    scalar(sp)
    sp.add_argument("--grid-n", dest="grid_n", type=int)

    sp = sub.add_parser("portrait", help="classify a sweep of initial angles")
    scalar(sp)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--y-min", dest="y_min", type=float)
    sp.add_argument("--y-max", dest="y_max", type=float)

    sp = sub.add_parser("linearize", help="variation with respect to the "
                        "initial angle along one shot")
    scalar(sp)
    sp.add_argument("--y", type=float)

    sp = sub.add_parser("wronskian", help="closed-form identity residuals "
                        "on the certified profile")
    scalar(sp)

    sp = sub.add_parser("spectrum", help="sector spectra of the linearized "
                        "operators")
    scalar(sp)
    sp.add_argument("--ells", type=lambda s: [int(t) for t in s.split(",")])
    sp.add_argument("--k", type=int)
    sp.add_argument("--grid-n", dest="grid_n", type=int)
    sp.add_argument("--with-vectors", dest="with_vectors",
                    action="store_const", const=True)

    sp = sub.add_parser("continue", help="Newton branch in the inverse mass")
    common(sp)
    sp.add_argument("--C", dest="C", type=float)
    sp.add_argument("--D", dest="D", type=float)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--eps-list", dest="eps_list",
                    type=lambda s: [float(t) for t in s.split(",")])
    sp.add_argument("--grid-n", dest="grid_n", type=int)
    sp.add_argument("--grid-r", dest="grid_r", type=float)
    sp.add_argument("--newton-tol", dest="newton_tol", type=float)
    sp.add_argument("--max-iter", dest="max_iter", type=int)

    sp = sub.add_parser("energy", help="mass and energy of the profile")
    scalar(sp)

    sp = sub.add_parser("check-F", help="scalar-model derivative consistency")
    scalar(sp)
    sp.add_argument("--samples", type=int)

    return ap


def run(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else 0

    start = time.perf_counter()
    try:
        cfg = _resolve_config(args.command, args)
    except ValidationFailure as exc:
        _diagnostic("validation", str(exc))
        return EXIT_VALIDATION

    out_dir = Path(cfg["output_dir"])
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        _diagnostic("validation", f"cannot create output dir {out_dir}: {exc}")
        return EXIT_VALIDATION

    cfg_hash = artifacts.config_hash(cfg)
    try:
        names, result = _COMMANDS[args.command](cfg, out_dir, cfg_hash)
    except ValidationFailure as exc:
        _diagnostic("validation", str(exc))
        return EXIT_VALIDATION
    except (RegimeError, BracketError, NewtonError, ContinuationError,
            RuntimeError, ArithmeticError) as exc:
        _diagnostic("numerical", str(exc))
        return EXIT_NUMERICAL
    except ValueError as exc:
        # bad numerics domain (couplings, grids) discovered past the schema
        _diagnostic("validation", str(exc))
        return EXIT_VALIDATION

    wall = time.perf_counter() - start
    artifacts.write_manifest(out_dir, args.command, cfg, cfg_hash, names,
                             wall, result)
    sys.stdout.write(json.dumps({
        "command": args.command,
        "output_dir": str(out_dir),
        "config_hash": cfg_hash,
        "artifacts": names + ["run_manifest.json"],
    }) + "\n")
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

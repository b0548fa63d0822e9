"""Command-line front end: sweeps, figure data, trajectories and checks.

Every command writes a CSV table (to ``--out`` or stdout) and, when an output
path is given, a sidecar ``<out>.json`` manifest holding the full
configuration, the package version and the wall-clock time.  Passing that
manifest back through ``--config`` reproduces the CSV byte for byte.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import json
import logging
import math
import os
import subprocess
import sys
import time

import numpy as np

from . import __version__
from .cascaded import (CascadedParams, entanglement_criterion, epr_transform,
                       make_cascaded_rwa_spec, make_cascaded_spec, make_rwa_epr_specs)
from .engine import GaussianState, steady_covariance, simulate_trajectory
from .errors import GaussSqueezeError, NumericalFailure
from .feedback import FeedbackGains, feedback_spec, feedback_steady, optimal_gains
from .figures import FIGURES, make_figure
from .optimize import (critical_occupation, d_star, theta_critical, theta_opt_conditional,
                       theta_opt_unconditional)
from .single_mode import (InteractionParams, conditional_steady, make_spec,
                          unconditional_steady, variance_curves)
from .table import SweepTable

log = logging.getLogger("gaussqueeze")

COMMANDS = ("steady", "sweep-theta", "sweep-depth", "optimize", "trajectory",
            "cascaded-check", "feedback-check", "figures")

DEFAULTS = {
    "command": None, "theta": 0.0, "epsilon": 0.0, "phi": 0.0, "d": 5.0, "n": 0.0,
    "gamma": 1.0, "conditional": True, "omega": 0.0, "rwa": True, "xi1": None,
    "xi2": None, "grid": None, "log_grid": False, "seed": None, "dt": 1e-3,
    "duration": 10.0, "out": None, "tol": 1e-12, "match_tol": 1e-8, "which": "all",
}

_MANIFEST_ONLY = ("version", "elapsed_seconds")


class ConfigError(Exception):
    """Invalid or inconsistent configuration (exit code 2)."""


def parse_grid(text):
    """``"start:stop:count"`` -> ``(start, stop, count)`` with ``count >= 2``."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from None
    if count < 2:
        raise ConfigError("grid count must be at least 2")
    return start, stop, count


def build_parser():
    p = argparse.ArgumentParser(prog="gaussqueeze", description=__doc__.splitlines()[0])
    p.add_argument("command", nargs="?", choices=COMMANDS,
                   help="what to compute (may come from --config instead)")
    p.add_argument("--config", help="flat JSON file; explicit flags override it")
    p.add_argument("--theta", type=float, help="interaction angle [rad]")
    p.add_argument("--epsilon", type=float, help="beamsplitter reflectivity")
    p.add_argument("--phi", type=float, help="local-oscillator phase [rad]")
    p.add_argument("--d", type=float, help="optical depth g/gamma")
    p.add_argument("--n", type=float, help="thermal occupation")
    p.add_argument("--gamma", type=float, help="decay rate [Hz]")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--conditional", dest="conditional", action="store_const", const=True)
    mode.add_argument("--unconditional", dest="conditional", action="store_const", const=False)
    p.add_argument("--omega", type=float, help="counter-rotation frequency [Hz]")
    rwa = p.add_mutually_exclusive_group()
    rwa.add_argument("--rwa", dest="rwa", action="store_const", const=True,
                     help="use the rotating-wave EPR model (default)")
    rwa.add_argument("--no-rwa", dest="rwa", action="store_const", const=False,
                     help="use the full lab-frame model at --omega")
    p.add_argument("--xi1", type=float, help="feedback gain on P (default: optimal)")
    p.add_argument("--xi2", type=float, help="feedback gain on X (default: optimal)")
    p.add_argument("--grid", help="start:stop:count for the swept variable")
    p.add_argument("--log-grid", dest="log_grid", action="store_const", const=True,
                   help="space a depth grid logarithmically")
    p.add_argument("--seed", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--duration", type=float)
    p.add_argument("--out", help="CSV path (directory for 'figures')")
    p.add_argument("--tol", type=float, help="steady-state tolerance")
    p.add_argument("--match-tol", dest="match_tol", type=float,
                   help="tolerance for closed-form/engine agreement checks")
    p.add_argument("--which", choices=sorted(FIGURES) + ["all"], help="figure key")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args):
    """Merge defaults < config file < explicit flags into a plain dict."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - set(DEFAULTS) - set(_MANIFEST_ONLY)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update({k: v for k, v in loaded.items() if k in DEFAULTS})
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["command"] not in COMMANDS:
        raise ConfigError("no command given (positional argument or 'command' in --config)")
    return cfg


def _params(cfg):
    try:
        return InteractionParams(cfg["theta"], cfg["d"], cfg["n"], cfg["epsilon"],
                                 cfg["phi"], cfg["gamma"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _grid(cfg, default):
    start, stop, count = parse_grid(cfg["grid"]) if cfg["grid"] else default
    if cfg["log_grid"]:
        if start <= 0 or stop <= 0:
            raise ConfigError("logarithmic grid needs positive bounds")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def _engine_variances(spec, conditional, tol):
    cov = steady_covariance(spec, conditional, tol).covariance
    return float(cov[0, 0]), float(cov[1, 1]), float(cov[0, 1])


def cmd_steady(cfg):
    p = _params(cfg)
    if p.phi != 0.0:
        v, u, c = _engine_variances(make_spec(p, cfg["conditional"]), cfg["conditional"], cfg["tol"])
        res, method = (v, u, c, True), "engine"
    elif cfg["conditional"]:
        r = conditional_steady(p, strict=False)
        res, method = (r.v_squeezed, r.u_antisqueezed, r.c_cov, r.stable), "closed_form"
    else:
        r = unconditional_steady(p)
        res, method = (r.v_squeezed, r.u_antisqueezed, r.c_cov, r.stable), "closed_form"
    v, u, c, stable = res
    log.info("V=%.9g U=%.9g stable=%s", v, u, stable)
    return SweepTable({"theta": [p.theta], "d": [p.d], "n": [p.n], "epsilon": [p.epsilon],
                       "phi": [p.phi], "conditional": [int(cfg["conditional"])],
                       "V": [v], "U": [u], "C": [c], "stable": [int(stable)],
                       "method": [method]})


def cmd_sweep_theta(cfg):
    p = _params(cfg)
    if p.phi != 0.0:
        raise ConfigError("theta sweeps use the closed forms, which require phi=0")
    return variance_curves(_grid(cfg, (-math.pi / 2 + 1e-4, math.pi / 2 - 1e-4, 2001)), p)


def cmd_sweep_depth(cfg):
    depth = _grid(cfg, (2.5, 1e4, 200))
    if np.any(depth <= 0):
        raise ConfigError("optical depths must be positive")
    n, eps = cfg["n"], cfg["epsilon"]
    rows = {k: [] for k in ("theta_u_opt", "V_u_opt", "U_u_opt",
                            "theta_c_opt", "V_c_opt", "U_c_opt", "method")}
    for d in depth:
        u = theta_opt_unconditional(d, n)
        c = theta_opt_conditional(d, n, eps)
        for key, val in zip(rows, (u.theta_opt, u.v_opt, u.u_at_opt,
                                   c.theta_opt, c.v_opt, c.u_at_opt, c.method)):
            rows[key].append(val)
    return SweepTable({"d": depth, **rows}, {"n": n, "epsilon": eps})


def cmd_optimize(cfg):
    d, n, eps = cfg["d"], cfg["n"], cfg["epsilon"]
    if d <= 0:
        raise ConfigError("optical depth must be positive")
    u = theta_opt_unconditional(d, n)
    c = theta_opt_conditional(d, n, eps)
    tc = theta_critical(d)
    return SweepTable({
        "d": [d], "n": [n], "epsilon": [eps],
        "theta_critical": [math.nan if tc is None else tc],
        "theta_u_opt": [u.theta_opt], "V_u_opt": [u.v_opt], "U_u_opt": [u.u_at_opt],
        "theta_c_opt": [c.theta_opt], "V_c_opt": [c.v_opt], "U_c_opt": [c.u_at_opt],
        "method_c": [c.method], "residual_c": [c.residual],
        "n_c": [critical_occupation(d).n],
        "d_star": [d_star(n, eps) if eps > 0 else math.inf],
    })


def cmd_trajectory(cfg):
    if cfg["seed"] is None:
        raise ConfigError("trajectory needs --seed")
    p = _params(cfg)
    spec = make_spec(p, conditional=True)
    traj = simulate_trajectory(spec, GaussianState.vacuum(1), cfg["duration"], cfg["dt"],
                               seed=cfg["seed"])
    cov = traj.covariances
    return SweepTable({"t": traj.times, "s_x": traj.displacements[:, 0],
                       "s_p": traj.displacements[:, 1], "gamma_xx": cov[:, 0, 0],
                       "gamma_xp": cov[:, 0, 1], "gamma_pp": cov[:, 1, 1]},
                      {"seed": cfg["seed"]})


def cmd_cascaded_check(cfg):
    p = _params(cfg)
    try:
        cp = CascadedParams.symmetric(p.theta, p.d, p.n, p.epsilon, p.gamma,
                                      cfg["omega"], p.phi, cfg["rwa"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cond = cfg["conditional"]
    if cfg["rwa"]:
        joint = make_cascaded_rwa_spec(cp)
    else:
        if cfg["omega"] <= 0:
            raise ConfigError("the lab-frame model needs --omega > 0")
        joint = make_cascaded_spec(cp)
    plus, minus, cross = epr_transform(steady_covariance(joint, cond, cfg["tol"]).covariance)
    total, entangled = entanglement_criterion(plus, minus)
    spec_p, spec_m = make_rwa_epr_specs(cp)
    v_plus, _, _ = _engine_variances(spec_p, cond, cfg["tol"])
    _, v_minus, _ = _engine_variances(spec_m, cond, cfg["tol"])
    if cond:
        ref = conditional_steady(p, strict=False)
    else:
        ref = unconditional_steady(p)
    return SweepTable({
        "var_X_plus": [plus[0, 0]], "var_P_plus": [plus[1, 1]],
        "var_X_minus": [minus[0, 0]], "var_P_minus": [minus[1, 1]],
        "cross_max": [float(np.max(np.abs(cross)))],
        "epr_sum": [total], "entangled": [int(entangled)],
        "epr_spec_V_plus": [v_plus], "epr_spec_V_minus": [v_minus],
        "single_mode_V": [ref.v_squeezed], "single_mode_U": [ref.u_antisqueezed],
    }, {"rwa": cfg["rwa"], "conditional": cond})


def cmd_feedback_check(cfg):
    p = _params(cfg)
    if p.phi != 0.0:
        raise ConfigError("feedback formulas require phi=0")
    if cfg["xi1"] is None and cfg["xi2"] is None:
        gains = optimal_gains(p, check_tol=cfg["match_tol"])
    else:
        gains = FeedbackGains(cfg["xi1"] or 0.0, cfg["xi2"] or 0.0)
    fb = feedback_steady(p, gains)
    v_eng, u_eng, _ = _engine_variances(feedback_spec(p, gains), False, cfg["tol"])
    cond = conditional_steady(p, strict=False)
    return SweepTable({
        "xi1": [gains.xi1], "xi2": [gains.xi2],
        "V_fb": [fb.v_squeezed], "U_fb": [fb.u_antisqueezed],
        "V_engine": [v_eng], "U_engine": [u_eng],
        "V_c": [cond.v_squeezed], "U_c": [cond.u_antisqueezed],
    })


_HANDLERS = {
    "steady": cmd_steady, "sweep-theta": cmd_sweep_theta, "sweep-depth": cmd_sweep_depth,
    "optimize": cmd_optimize, "trajectory": cmd_trajectory,
    "cascaded-check": cmd_cascaded_check, "feedback-check": cmd_feedback_check,
}


def _figure_tables(cfg):
    keys = sorted(FIGURES) if cfg["which"] == "all" else [cfg["which"]]
    points = parse_grid(cfg["grid"])[2] if cfg["grid"] else None
    out = {}
    for key in keys:
        kwargs = {"epsilon": cfg["epsilon"]} if key == "varOD" and cfg["epsilon"] > 0 else {}
        out[key] = make_figure(key, points, **kwargs)
    return out


def version_string():
    """Package version, extended by ``git describe`` when run from a checkout."""
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        desc = subprocess.run(["git", "describe", "--always", "--dirty"], cwd=here,
                              capture_output=True, text=True, timeout=5, check=True).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        desc = ""
    return f"{__version__}+{desc}" if desc else __version__


def write_manifest(path, cfg, elapsed):
    manifest = {**cfg, "version": version_string(), "elapsed_seconds": elapsed}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(cfg, stdout=None):
    """Execute a resolved configuration; returns the produced tables by name."""
    stdout = sys.stdout if stdout is None else stdout
    start = time.perf_counter()
    if cfg["command"] == "figures":
        tables = _figure_tables(cfg)
        if cfg["out"]:
            os.makedirs(cfg["out"], exist_ok=True)
            for key, table in tables.items():
                table.to_csv(os.path.join(cfg["out"], f"{key}.csv"))
            write_manifest(os.path.join(cfg["out"], "manifest.json"), cfg,
                           time.perf_counter() - start)
        else:
            for key, table in tables.items():
                stdout.write(f"# {key}\n{table.to_csv()}")
        return tables
    table = _HANDLERS[cfg["command"]](cfg)
    if cfg["out"]:
        table.to_csv(cfg["out"])
        write_manifest(cfg["out"] + ".json", cfg, time.perf_counter() - start)
    else:
        stdout.write(table.to_csv())
    return {cfg["command"]: table}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        run(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3
    except GaussSqueezeError as exc:
        print(f"configuration error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

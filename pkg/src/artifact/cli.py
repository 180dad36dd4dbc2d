"""Command-line front end.

Subcommands expose the recursion engine (``threshold``, ``curves``,
``ancilla``, ``overhead``), the Monte Carlo simulator (``simulate``) and
the recursive decoder (``decode``), emitting plot-ready CSV.

Exit codes: 0 success, 1 usage/input error, 2 non-convergence,
3 dominance-check failure (simulation exceeded an analytic bound).
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from .c4 import MeasurementBasis
from .decoder import decode_leaves
from .engine import (
    EngineError,
    NoiseModel,
    NoiseParams,
    NoiseProfile,
    OverheadParams,
    ancilla_bounds,
    build_profile,
    css_curve,
    gadget_noise,
    measurement_error_bound,
    overhead,
    parallel_multipliers,
    threshold_scan,
)
from .sim import (
    Mode,
    SimStats,
    build_bp_circuit,
    build_cnot_gadget,
    build_purification_circuit,
    run_trials,
)

PREP_MEAS_FACTOR = 8.0 / 15.0
ANCILLA_LIMIT = 0.141

MODELS = {
    "local-stochastic": NoiseModel.LocalStochastic,
    "depolarizing": NoiseModel.IndependentDepolarizing,
}
BASES = {"z": MeasurementBasis.ZBasis, "x": MeasurementBasis.XBasis}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems via exit code 1."""

    def error(self, message: str):  # noqa: D401 - argparse hook
        raise UsageError(message)


def sci(value: float) -> str:
    """Scientific notation, 6 significant digits."""
    return f"{value:.5e}"


# ---------------------------------------------------------------------------
# Configuration


def parse_config(path: str) -> Dict[str, str]:
    """Plain ``key=value`` lines; '#' starts a comment; blanks ignored."""
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


# Per-command parameter tables: name -> (type constructor, default).
_EPS_GRID_DEFAULT = "2e-4,4e-4,6e-4,8e-4,1e-3,1.2e-3,1.4e-3,1.6e-3,1.8e-3,2e-3"

PARAMS: Dict[str, Dict[str, Tuple]] = {
    "threshold": {
        "model": (str, "local-stochastic"),
        "j_max": (int, 10),
        "tolerance": (float, 1e-5),
    },
    "curves": {
        "model": (str, "local-stochastic"),
        "eps_list": (str, _EPS_GRID_DEFAULT),
        "j_max": (int, 5),
    },
    "simulate": {
        "circuit": (str, "bp"),
        "j": (int, 1),
        "epsilon": (float, 1e-3),
        "trials": (int, 100_000),
        "mode": (str, Mode.PostselectBP),
    },
    "ancilla": {
        "model": (str, "local-stochastic"),
        "j": (int, 10),
    },
    "overhead": {
        "r": (int, 20),
        "s": (int, 28),
        "t": (int, 32),
        "n": (int, 4),
        "ell": (float, 2.0),
        "j": (int, 3),
        "big_l": (float, None),
        "epsilon": (float, None),
    },
    "decode": {
        "file": (str, None),
        "level": (int, 1),
        "basis": (str, "z"),
    },
}
GLOBAL_KEYS = {"seed"}


def merge_config(args: argparse.Namespace, command: str) -> Dict[str, object]:
    """Resolve each parameter: explicit flag > config file > default."""
    table = PARAMS[command]
    config: Dict[str, str] = {}
    if args.config is not None:
        config = parse_config(args.config)
    for key in config:
        if key not in table and key not in GLOBAL_KEYS:
            raise UsageError(f"unknown config key {key!r} for command {command!r}")
    resolved: Dict[str, object] = {}
    for name, (ctor, default) in table.items():
        flag_value = getattr(args, name)
        if flag_value is not None:
            resolved[name] = flag_value
        elif name in config:
            try:
                resolved[name] = ctor(config[name])
            except ValueError as exc:
                raise UsageError(f"config key {name!r}: {exc}") from exc
        else:
            resolved[name] = default
    if args.seed is not None:
        resolved["seed"] = args.seed
    elif "seed" in config:
        resolved["seed"] = int(config["seed"])
    else:
        resolved["seed"] = 0
    return resolved


def _model(name: str) -> NoiseModel:
    if name not in MODELS:
        raise UsageError(f"unknown model {name!r}; choose from {sorted(MODELS)}")
    return MODELS[name]


# ---------------------------------------------------------------------------
# Commands


def cmd_threshold(cfg: Dict[str, object], out: List[str]) -> int:
    model = _model(cfg["model"])
    result = threshold_scan(model, j_max=cfg["j_max"], tolerance=cfg["tolerance"])
    out.append("name,j,value")
    out.append(f"certified-lo,,{sci(result.lo)}")
    out.append(f"certified-hi,,{sci(result.hi)}")
    out.append(f"certified-midpoint,,{sci(result.midpoint)}")
    out.append(f"strict-lo,,{sci(result.strict_lo)}")
    out.append(f"strict-hi,,{sci(result.strict_hi)}")
    out.append(f"strict-midpoint,,{sci(result.strict_midpoint)}")
    params = NoiseParams(epsilon=result.midpoint, model=model)
    for j, eps_css, acceptance in css_curve(params, cfg["j_max"]):
        out.append(f"eps-css,{j},{sci(eps_css)}")
        out.append(f"acceptance,{j},{sci(acceptance)}")
    return 0


def cmd_curves(cfg: Dict[str, object], out: List[str]) -> int:
    model = _model(cfg["model"])
    try:
        eps_values = [float(tok) for tok in str(cfg["eps_list"]).split(",") if tok]
    except ValueError as exc:
        raise UsageError(f"bad eps-list: {exc}") from exc
    if not eps_values:
        raise UsageError("eps-list is empty")
    out.append("epsilon,j,eps_css,acceptance")
    for eps in eps_values:
        params = NoiseParams(epsilon=eps, model=model)
        for j, eps_css, acceptance in css_curve(params, cfg["j_max"]):
            out.append(f"{sci(eps)},{j},{sci(eps_css)},{sci(acceptance)}")
    return 0


def _bp_bounds(j: int, epsilon: float) -> Dict[str, Tuple[str, float]]:
    """Analytic comparisons for the Bell-pair circuit's rates.

    Returns rate-name -> (direction, bound) where direction is 'upper'
    (rate must not exceed bound) or 'lower' (acceptance floor).
    """
    eps1 = PREP_MEAS_FACTOR * epsilon
    if j == 0:
        return {
            "acceptance": ("lower", 1.0),
            "bell_err_x": ("upper", 2.0 * eps1),
            "bell_err_z": ("upper", 2.0 * eps1),
        }
    params = NoiseParams(epsilon=epsilon, model=NoiseModel.IndependentDepolarizing)
    profiles = build_profile(params, j)
    profile, acceptance = profiles[j]
    meas = measurement_error_bound(profile)
    lower_profile = NoiseProfile(
        level_j=j,
        strengths={m: profile.strengths[m][:-1] + [0.0] for m in ("x", "z")},
    )
    meas_lower = measurement_error_bound(lower_profile)
    # A level-1 preparation postselects 72 physical operations, so the bare
    # product is the valid circuit-facing floor; deeper levels are floored
    # by the engine's conditional acceptance.
    floor = (1.0 - epsilon) ** 72 if j == 1 else acceptance
    bounds: Dict[str, Tuple[str, float]] = {"acceptance": ("lower", floor)}
    for m in ("x", "z"):
        bounds[f"bell_err_{m}"] = ("upper", 2.0 * meas[m])
        bounds[f"joint_{m}"] = (
            "upper",
            meas_lower[m] * 2.0 * profile.strengths[m][-1],
        )
    return bounds


def _gadget_bounds(j: int, epsilon: float) -> Dict[str, Tuple[str, float]]:
    params = NoiseParams(epsilon=epsilon, model=NoiseModel.IndependentDepolarizing)
    profile, _ = build_profile(params, j)[j]
    eps_css, _ = gadget_noise(profile, params)
    return {
        "acceptance": ("lower", 1.0),
        "gadget_fail": ("upper", min(eps_css, 1.0)),
    }


def _purify_bounds(epsilon: float) -> Dict[str, Tuple[str, float]]:
    return {
        "acceptance": ("lower", 1.0 - 3.0 * epsilon),
        "cond_x_rate": ("upper", PREP_MEAS_FACTOR * epsilon + 5.0 * epsilon ** 2),
    }


def simulate_report(stats: SimStats, bounds: Dict[str, Tuple[str, float]]
                    ) -> Tuple[List[str], bool]:
    """SimStats CSV extended with analytic-bound and verdict columns."""
    lines = ["circuit,j,epsilon,trials,accepted,rate-name,rate,halfwidth,bound,verdict"]
    any_fail = False
    for name, (rate, halfwidth) in stats.rates.items():
        prefix = (
            f"{stats.circuit},{stats.j},{sci(stats.epsilon)},{stats.trials},"
            f"{stats.accepted},{name},{sci(rate)},{sci(halfwidth)}"
        )
        if name not in bounds:
            lines.append(f"{prefix},,diagnostic")
            continue
        direction, bound = bounds[name]
        three_sigma = 3.0 * halfwidth / 1.96
        if direction == "upper":
            ok = rate <= bound + three_sigma
        else:
            ok = rate >= bound - three_sigma
        any_fail |= not ok
        lines.append(f"{prefix},{sci(bound)},{'ok' if ok else 'fail'}")
    return lines, any_fail


def cmd_simulate(cfg: Dict[str, object], out: List[str]) -> int:
    name = cfg["circuit"]
    j, epsilon = cfg["j"], cfg["epsilon"]
    if epsilon < 0 or epsilon > 1:
        raise UsageError("epsilon must be in [0, 1]")
    if cfg["mode"] not in (Mode.PostselectBP, Mode.GadgetAccept):
        raise UsageError(f"unknown mode {cfg['mode']!r}")
    if name == "bp":
        circuit = build_bp_circuit(j)
        bounds = _bp_bounds(j, epsilon)
    elif name == "gadget":
        circuit = build_cnot_gadget(j)
        bounds = _gadget_bounds(j, epsilon)
    elif name == "purify":
        circuit = build_purification_circuit()
        bounds = _purify_bounds(epsilon)
    else:
        raise UsageError(f"unknown circuit {name!r}; choose bp, gadget or purify")
    params = NoiseParams(epsilon=epsilon, model=NoiseModel.IndependentDepolarizing)
    stats = run_trials(circuit, params, cfg["trials"], cfg["seed"], cfg["mode"])
    if epsilon == 0.0:
        bounds = {"acceptance": ("lower", 1.0)}
    lines, any_fail = simulate_report(stats, bounds)
    out.extend(lines)
    return 3 if any_fail else 0


def cmd_ancilla(cfg: Dict[str, object], out: List[str]) -> int:
    model = _model(cfg["model"])
    eps0 = 1.25e-3 if model is NoiseModel.IndependentDepolarizing else 0.67e-3
    params = NoiseParams(epsilon=eps0, model=model)
    f_dec, eps_dec, eps_anc = ancilla_bounds(params, cfg["j"])
    out.append("name,value")
    out.append(f"epsilon,{sci(eps0)}")
    out.append(f"f-dec,{sci(f_dec)}")
    out.append(f"eps-dec,{sci(eps_dec)}")
    out.append(f"eps-anc,{sci(eps_anc)}")
    out.append(f"limit,{sci(ANCILLA_LIMIT)}")
    out.append(f"verdict,{'ok' if eps_anc <= ANCILLA_LIMIT else 'fail'}")
    return 0


def cmd_overhead(cfg: Dict[str, object], out: List[str]) -> int:
    params = OverheadParams(
        r_count=cfg["r"], s_count=cfg["s"], t_count=cfg["t"],
        n=cfg["n"], ell=cfg["ell"],
    )
    B, C, M, factor = overhead(
        params, cfg["j"], L=cfg["big_l"], epsilon=cfg["epsilon"]
    )
    phi, phi_sq = parallel_multipliers()
    out.append("name,value")
    out.append(f"bell-pairs,{B}")
    out.append(f"logical-cnots,{C}")
    out.append(f"logical-measurements,{M}")
    if factor is not None:
        out.append(f"overhead-factor,{sci(factor)}")
    out.append(f"parallel-one-level,{sci(phi)}")
    out.append(f"parallel-two-level,{sci(phi_sq)}")
    return 0


def cmd_decode(cfg: Dict[str, object], out: List[str]) -> int:
    if cfg["file"] is None:
        raise UsageError("decode requires --file")
    basis_name = str(cfg["basis"]).lower()
    if basis_name not in BASES:
        raise UsageError(f"unknown basis {cfg['basis']!r}; choose z or x")
    basis = BASES[basis_name]
    level = cfg["level"]
    try:
        with open(cfg["file"], "r", encoding="utf-8") as fh:
            lines = [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise UsageError(f"cannot read {cfg['file']!r}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if set(line) - {"0", "1"} or len(line) != 4 ** level:
            raise UsageError(
                f"{cfg['file']}:{lineno}: expected {4 ** level} characters of 0/1"
            )
        result = decode_leaves(level, basis, [int(c) for c in line])
        out.append(f"{result.value} {'true' if result.flagged else 'false'}")
    return 0


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> _Parser:
    parser = _Parser(prog="artifact", description=__doc__)
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--config", default=None,
                        help="key=value config file; flags override")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    # The same flags are accepted after the subcommand; SUPPRESS keeps the
    # subparser from clobbering values given before it.
    common = _Parser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS)
    common.add_argument("--config", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("threshold", help="bisect the accuracy threshold",
                       parents=[common])
    p.add_argument("--model", choices=sorted(MODELS))
    p.add_argument("--j-max", dest="j_max", type=int)
    p.add_argument("--tolerance", type=float)

    p = sub.add_parser("curves", help="effective-noise and acceptance curves", parents=[common])
    p.add_argument("--model", choices=sorted(MODELS))
    p.add_argument("--eps-list", dest="eps_list", help="comma-separated strengths")
    p.add_argument("--j-max", dest="j_max", type=int)

    p = sub.add_parser("simulate", help="Monte Carlo with bound comparison", parents=[common])
    p.add_argument("--circuit", choices=("bp", "gadget", "purify"))
    p.add_argument("--j", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--mode", choices=(Mode.PostselectBP, Mode.GadgetAccept))

    p = sub.add_parser("ancilla", help="ancilla decoding-error bounds", parents=[common])
    p.add_argument("--model", choices=sorted(MODELS))
    p.add_argument("--j", type=int)

    p = sub.add_parser("overhead", help="resource counts and overhead factor", parents=[common])
    for flag in ("--r", "--s", "--t", "--n", "--j"):
        p.add_argument(flag, type=int)
    p.add_argument("--ell", type=float)
    p.add_argument("--L", dest="big_l", type=float)
    p.add_argument("--epsilon", type=float)

    p = sub.add_parser("decode", help="decode leaf bitstrings from a file", parents=[common])
    p.add_argument("--file")
    p.add_argument("--level", type=int)
    p.add_argument("--basis", choices=("z", "x"))

    return parser


COMMANDS = {
    "threshold": cmd_threshold,
    "curves": cmd_curves,
    "simulate": cmd_simulate,
    "ancilla": cmd_ancilla,
    "overhead": cmd_overhead,
    "decode": cmd_decode,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    out_lines: List[str] = []
    try:
        args = parser.parse_args(argv)
        cfg = merge_config(args, args.command)
        code = COMMANDS[args.command](cfg, out_lines)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = "\n".join(out_lines) + ("\n" if out_lines else "")
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.out!r}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

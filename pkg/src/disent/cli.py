"""Command-line front end: ``disent {phase-map,classify,times,verify}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any

from . import __version__
from .channels import ChannelKind, DecaySchedule
from .concurrence import MatrixType, classify, q_phi, q_psi
from .critical import (
    CriticalError,
    UnphysicalSlice,
    ad_cd_time_symmetric,
    critical_set,
    pd_threshold_time,
    slice_from_state,
)
from .density import DensityError, decompose, state_from_json
from .oracle import onset_time
from .sweep import PRESETS, ConfigError, SweepConfig, preset_config, run_sweep, write_outputs
from .verify import run_suite

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2


class SeparableInput(ValueError):
    pass


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in str(text).replace(";", ",").split(",") if v.strip())


def _range(text: str) -> tuple[float, float]:
    vals = _floats(text.replace(":", ","))
    if len(vals) != 2:
        raise ConfigError(f"expected 'lo,hi', got {text!r}")
    return vals


def read_config(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment; keys use - or _."""
    out: dict[str, str] = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


# flag / config key -> (SweepConfig field, parser)
_SWEEP_KEYS = {
    "channel": ("channel", str),
    "type": ("mtype", str),
    "gamma_a": ("gamma_a", float),
    "gamma_b": ("gamma_b", float),
    "tau": ("taus", _floats),
    "ctv": ("c_tv", float),
    "seed": ("seed", int),
    "q_range": ("q_range", _range),
    "coord_range": ("coord_range", _range),
}
_FIXED_KEYS = ("d11", "d22", "d33", "d44")


def _grid(text: str) -> tuple[int, int]:
    parts = str(text).lower().split("x")
    vals = [int(p) for p in parts]
    return (vals[0], vals[0]) if len(vals) == 1 else (vals[0], vals[1])


def sweep_config_from(settings: dict[str, Any]) -> SweepConfig:
    """Build a SweepConfig from merged settings (preset < config file < flags)."""
    kw: dict[str, Any] = {}
    fixed: dict[str, float] = {}
    for key, val in settings.items():
        if val is None or key in ("preset", "out", "config"):
            continue
        try:
            if key in _SWEEP_KEYS:
                field, parse = _SWEEP_KEYS[key]
                kw[field] = parse(val)
            elif key in _FIXED_KEYS:
                fixed[key] = float(val)
            elif key == "grid":
                kw["q_steps"], kw["coord_steps"] = _grid(val)
            else:
                raise ConfigError(f"{key}: unknown setting")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{key}: cannot parse {val!r}") from None
    if fixed:
        kw["fixed"] = fixed
    preset = settings.get("preset")
    if preset:
        return preset_config(preset, **kw)
    for need in ("channel", "mtype"):
        if need not in kw:
            raise ConfigError(f"{'type' if need == 'mtype' else need}: required without --preset")
    kw.setdefault("taus", (1.0,))
    return SweepConfig(**kw)


def _merged(args: argparse.Namespace, keys) -> dict[str, Any]:
    settings: dict[str, Any] = {}
    if getattr(args, "config", None):
        settings.update(read_config(args.config))
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            settings[k] = v
    return settings


def cmd_phase_map(args) -> int:
    keys = ["preset", "grid", *_SWEEP_KEYS, *_FIXED_KEYS]
    cfg = sweep_config_from(_merged(args, keys))
    res = run_sweep(cfg)
    manifest = write_outputs(res, args.out, __version__)
    print(json.dumps({"out": str(args.out), "files": manifest["files"],
                      "robust_cells": manifest["robust_cells"]}, indent=2))
    return EXIT_OK


def _load_state(path):
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"state: cannot read {path}: {exc}") from None
    return state_from_json(obj)


def _num(v):
    if v is None:
        return None
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _state_settings(args) -> dict[str, Any]:
    s = _merged(args, ["channel", "gamma_a", "gamma_b", "tau", "ctv"])
    try:
        return {
            "channel": ChannelKind.parse(s.get("channel", "amplitude")),
            "sched": DecaySchedule(float(s.get("gamma_a", 1.0)), float(s.get("gamma_b", 1.0))),
            "tau": float(s["tau"]) if s.get("tau") is not None else None,
            "ctv": float(s.get("ctv", 0.1)),
        }
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_classify(args) -> int:
    st = _state_settings(args)
    if st["tau"] is None or st["tau"] <= 0:
        raise ConfigError("tau: a positive deadline is required")
    rho = _load_state(args.state)
    x, o = decompose(rho)
    mt = classify(x)
    if mt is MatrixType.SEPARABLE:
        raise SeparableInput(f"X part is separable (Q_Phi={q_phi(x):.6g}, Q_Psi={q_psi(x):.6g})")
    spec = st["sched"].spec_at(st["channel"], st["tau"])
    sl, coord = slice_from_state(x, spec, st["ctv"])
    try:
        cs = critical_set(sl)
        label = cs.label(coord)
        cs_json = cs.to_json()
    except UnphysicalSlice as exc:
        cs_json, label = {"error": str(exc)}, None
    caveat = not o.is_zero()
    out = {
        "matrix_type": mt.value,
        "Q_phi": q_phi(x),
        "Q_psi": q_psi(x),
        "slice": sl.to_json(),
        "coord_name": sl.coord_name,
        "coord": coord,
        "critical_set": cs_json,
        "label": label.to_json() if label else None,
        "o_part_nonzero": caveat,
    }
    if caveat:
        out["caveat"] = ("state has coherences outside the X pattern; the label is that of its "
                         "X part, which bounds the state's concurrence from below")
    _emit(out, args.out)
    return EXIT_OK


def _time_entry(rho, x, o, st, target: float) -> tuple[float | None, str]:
    ch, sched = st["channel"], st["sched"]
    mt = classify(x)
    if o.is_zero():
        if mt is MatrixType.SEPARABLE:
            return 0.0, "analytic"
        if ch is ChannelKind.PHASE:
            return pd_threshold_time(x, sched, target), "analytic"
        if (ch is ChannelKind.AMPLITUDE and target == 0 and mt is MatrixType.PHI
                and sched.gamma_a == sched.gamma_b):
            return ad_cd_time_symmetric(x, sched.gamma_a), "analytic"
    return onset_time(rho, ch, sched, target).time, "oracle"


def cmd_times(args) -> int:
    st = _state_settings(args)
    rho = _load_state(args.state)
    x, o = decompose(rho)
    t_cd, m_cd = _time_entry(rho, x, o, st, 0.0)
    t_tv, m_tv = _time_entry(rho, x, o, st, st["ctv"])
    out = {
        "channel": st["channel"].value,
        "schedule": st["sched"].to_json(),
        "C_tv": st["ctv"],
        "t_cd": t_cd, "method_cd": m_cd,
        "t_tv": t_tv, "method_tv": m_tv,
    }
    _emit(out, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, n=args.n, seed=args.seed if args.seed is not None else 0,
                       tol_scale=args.tol_scale)
    report["version"] = __version__
    for c in report["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: max_err={c['max_err']:.3e} "
              f"tol={c['tol']:.1e} n={c['n']}", file=sys.stderr)
    _emit(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def _emit(obj: dict[str, Any], out) -> None:
    text = json.dumps(obj, indent=2, default=_num) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


class _Parser(argparse.ArgumentParser):
    """Usage errors are invalid input (exit 1); 2 is reserved for failed verification."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="disent", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, state: bool):
        sp.add_argument("--config", help="key = value settings file (flags win)")
        sp.add_argument("--channel", help="amplitude | phase | depolarizing")
        sp.add_argument("--gamma-a", dest="gamma_a", type=float)
        sp.add_argument("--gamma-b", dest="gamma_b", type=float)
        sp.add_argument("--ctv", type=float, help="threshold concurrence C_tv")
        if state:
            sp.add_argument("state", help="state JSON (X fields or full re/im matrix)")

    pm = sub.add_parser("phase-map", help="sweep a (Q, coordinate) grid")
    common(pm, state=False)
    pm.add_argument("--preset", help=f"one of {', '.join(PRESETS)} (case-insensitive)")
    pm.add_argument("--type", help="Phi | Psi")
    pm.add_argument("--tau", help="deadline(s), comma separated")
    pm.add_argument("--grid", help="N or NxM grid points (Q x coordinate)")
    pm.add_argument("--q-range", dest="q_range")
    pm.add_argument("--coord-range", dest="coord_range")
    for k in _FIXED_KEYS:
        pm.add_argument(f"--{k}", type=float, help=f"fixed rho_{k[1:]} of the slice")
    pm.add_argument("--seed", type=int)
    pm.add_argument("--out", default=".", help="output directory")
    pm.set_defaults(func=cmd_phase_map)

    cl = sub.add_parser("classify", help="phase label of one state")
    common(cl, state=True)
    cl.add_argument("--tau", type=float)
    cl.add_argument("--out")
    cl.set_defaults(func=cmd_classify)

    tm = sub.add_parser("times", help="CD and threshold times of one state")
    common(tm, state=True)
    tm.add_argument("--out")
    tm.set_defaults(func=cmd_times)

    vf = sub.add_parser("verify", help="run the randomized self-checks")
    vf.add_argument("--suite", default="all", choices=["all", "channels", "concurrence", "critical", "oracle"])
    vf.add_argument("--n", type=int, default=100)
    vf.add_argument("--seed", type=int)
    vf.add_argument("--tol-scale", dest="tol_scale", type=float, default=1.0)
    vf.add_argument("--out")
    vf.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CriticalError, DensityError, SeparableInput, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

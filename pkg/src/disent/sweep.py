"""Phase-map sweeps over (Q, coordinate) grids and the canned figure presets."""

from __future__ import annotations

import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from .channels import ChannelKind, DecaySchedule
from .concurrence import MatrixType
from .critical import CriticalSet, SliceParams, UnphysicalSlice, critical_set, _FIXED

FIXED_DEFAULT = 0.05


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    channel: ChannelKind
    mtype: MatrixType
    fixed: dict[str, float] = field(default_factory=dict)
    q_range: tuple[float, float] = (0.0, 1.0)
    coord_range: tuple[float, float] = (0.0, 1.0)
    q_steps: int = 201
    coord_steps: int = 201
    gamma_a: float = 1.0
    gamma_b: float = 1.0
    taus: tuple[float, ...] = (1.0,)
    c_tv: float = 0.1
    seed: int = 0
    preset: str | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "channel", ChannelKind.parse(self.channel))
        except ValueError as exc:
            raise ConfigError(f"channel: {exc}") from None
        try:
            mt = MatrixType(self.mtype)
        except ValueError:
            raise ConfigError(f"type: expected Phi or Psi, got {self.mtype!r}") from None
        if mt is MatrixType.SEPARABLE:
            raise ConfigError("type: expected Phi or Psi")
        object.__setattr__(self, "mtype", mt)
        object.__setattr__(self, "q_range", tuple(float(v) for v in self.q_range))
        object.__setattr__(self, "coord_range", tuple(float(v) for v in self.coord_range))
        object.__setattr__(self, "taus", tuple(float(t) for t in self.taus))
        need = _FIXED[(self.channel, mt)]
        fixed = {k: float(v) for k, v in self.fixed.items() if k in need}
        for k in need:
            fixed.setdefault(k, FIXED_DEFAULT)
        object.__setattr__(self, "fixed", fixed)
        self.validate()

    def validate(self) -> None:
        for name in ("q_steps", "coord_steps"):
            if int(getattr(self, name)) < 2:
                raise ConfigError(f"{name}: need at least 2 steps, got {getattr(self, name)}")
        for name in ("q_range", "coord_range"):
            lo, hi = getattr(self, name)
            if not (0.0 <= lo < hi <= 1.0):
                raise ConfigError(f"{name}: need 0 <= lo < hi <= 1, got ({lo}, {hi})")
        if not self.taus or min(self.taus) <= 0:
            raise ConfigError(f"taus: every tau must be positive, got {self.taus}")
        if not 0.0 <= self.c_tv < 1.0:
            raise ConfigError(f"c_tv: must lie in [0, 1), got {self.c_tv}")
        for k, v in self.fixed.items():
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{k}: must lie in [0, 1], got {v}")
        try:
            DecaySchedule(self.gamma_a, self.gamma_b)
        except ValueError as exc:
            raise ConfigError(f"gamma: {exc}") from None

    @property
    def schedule(self) -> DecaySchedule:
        return DecaySchedule(self.gamma_a, self.gamma_b)

    def q_values(self) -> np.ndarray:
        return np.linspace(*self.q_range, self.q_steps)

    def coord_values(self) -> np.ndarray:
        return np.linspace(*self.coord_range, self.coord_steps)

    def slice_at(self, q: float, tau: float) -> SliceParams:
        return SliceParams.from_schedule(
            self.channel, self.mtype, float(q), self.schedule, tau, self.c_tv, **self.fixed
        )

    def with_grid(self, n: int) -> "SweepConfig":
        return replace(self, q_steps=n, coord_steps=n)

    def to_json(self) -> dict[str, Any]:
        d = asdict(self)
        d["channel"] = self.channel.value
        d["mtype"] = self.mtype.value
        d["q_range"], d["coord_range"], d["taus"] = list(self.q_range), list(self.coord_range), list(self.taus)
        return d


def _preset(channel, mtype, coord_hi, taus, gamma_b=1.0) -> dict[str, Any]:
    return dict(channel=channel, mtype=mtype, coord_range=(0.0, coord_hi), taus=taus,
                gamma_a=1.0, gamma_b=gamma_b, c_tv=0.1)


# gamma = 1 throughout: tau is in units of 1/gamma
PRESETS: dict[str, dict[str, Any]] = {
    "Fig2": _preset("amplitude", "Phi", 1.0, (2 / 3,)),
    "Fig4": _preset("amplitude", "Psi", 0.5, (2 / 3,)),
    "Fig5": _preset("phase", "Phi", 0.25, (1.0, 2.0)),
    "Fig6": _preset("phase", "Psi", 1.0, (2 / 3, 8 / 7)),
    "Fig7": _preset("depolarizing", "Phi", 1.0, (1 / 5, 11 / 36), gamma_b=0.2),
    "Fig8": _preset("depolarizing", "Psi", 0.5, (1 / 9, 1 / 6)),
}


def preset_config(name: str, **overrides) -> SweepConfig:
    key = {k.lower(): k for k in PRESETS}.get(name.lower())
    if key is None:
        raise ConfigError(f"preset: unknown {name!r}; choose from {', '.join(PRESETS)}")
    kw = dict(PRESETS[key], preset=key)
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return SweepConfig(**kw)


def fmt(v) -> str:
    """CSV cell: 17 significant digits, NA for undefined, inf/-inf spelled out."""
    if v is None:
        return "NA"
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "NA"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _fmt_intervals(ivals) -> str:
    return ";".join(f"{fmt(a)}:{fmt(b)}" for a, b in ivals) or "empty"


def _threads() -> int:
    env = os.environ.get("DISENT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"DISENT_THREADS must be an integer, got {env!r}") from None
    return min(8, os.cpu_count() or 1)


def _sets_for_q(cfg: SweepConfig, q: float) -> list[CriticalSet | None]:
    out = []
    for tau in cfg.taus:
        try:
            out.append(critical_set(cfg.slice_at(q, tau)))
        except UnphysicalSlice:
            out.append(None)
    return out


@dataclass
class SweepResult:
    config: SweepConfig
    q_values: np.ndarray
    coord_values: np.ndarray
    sets: list[list[CriticalSet | None]]  # [q index][tau index]

    def phase_map_csv(self) -> str:
        ntau = len(self.config.taus)
        head = ["Q", "coord", "physical", "phys_lo", "phys_hi", "cd_free"]
        for k in range(1, ntau + 1):
            head += [f"cd_tol_{k}", f"td_tol_{k}", f"label_{k}", f"robust_{k}"]
        buf = io.StringIO()
        buf.write(",".join(head) + "\n")
        for q, sets in zip(self.q_values, self.sets):
            first = sets[0]
            for c in self.coord_values:
                if first is None:
                    row = [fmt(q), fmt(c), "0", "NA", "NA", "NA"]
                    row += ["NA", "NA", "unphysical", "0"] * ntau
                else:
                    lab0 = first.label(c)
                    row = [fmt(q), fmt(c), fmt(lab0.physical), fmt(first.phys_lo),
                           fmt(first.phys_hi), fmt(first.cd_free)]
                    for cs in sets:
                        lab = cs.label(c)
                        row += [fmt(cs.cd_tol), fmt(cs.td_tol), lab.code, fmt(lab.optimal_robust)]
                buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def boundaries_csv(self) -> str:
        head = ["tau_index", "tau", "Q", "phys_lo", "phys_hi", "cd_free", "cd_tol", "td_tol",
                "cd_tol_clamped", "td_tol_clamped", "cd_intervals", "td_intervals"]
        buf = io.StringIO()
        buf.write(",".join(head) + "\n")
        for k, tau in enumerate(self.config.taus):
            for q, sets in zip(self.q_values, self.sets):
                cs = sets[k]
                row = [str(k + 1), fmt(tau), fmt(q)]
                if cs is None:
                    row += ["NA"] * 7 + ["empty", "empty"]
                else:
                    row += [fmt(cs.phys_lo), fmt(cs.phys_hi), fmt(cs.cd_free), fmt(cs.cd_tol),
                            fmt(cs.td_tol), fmt(cs.clamped("cd_tol")), fmt(cs.clamped("td_tol")),
                            _fmt_intervals(cs.cd_intervals), _fmt_intervals(cs.td_intervals)]
                buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def robust_count(self, tau_index: int = 0) -> int:
        n = 0
        for sets in self.sets:
            cs = sets[tau_index]
            if cs is not None:
                n += sum(cs.label(c).optimal_robust for c in self.coord_values)
        return n


def run_sweep(cfg: SweepConfig, threads: int | None = None) -> SweepResult:
    qs, cs = cfg.q_values(), cfg.coord_values()
    threads = _threads() if threads is None else max(1, threads)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            sets = list(pool.map(lambda q: _sets_for_q(cfg, q), qs))
    else:
        sets = [_sets_for_q(cfg, q) for q in qs]
    return SweepResult(cfg, qs, cs, sets)


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def write_outputs(res: SweepResult, out_dir: str | os.PathLike, version: str) -> dict[str, Any]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {"phase_map.csv": res.phase_map_csv(), "boundaries.csv": res.boundaries_csv()}
    for name, text in files.items():
        with open(out / name, "w", newline="\n") as fh:
            fh.write(text)
    manifest = {
        "config": res.config.to_json(),
        "version": version,
        "files": {name: {"sha256": sha256(text), "bytes": len(text.encode())}
                  for name, text in files.items()},
        "robust_cells": [res.robust_count(k) for k in range(len(res.config.taus))],
    }
    with open(out / "manifest.json", "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest

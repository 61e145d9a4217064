"""Randomized self-checks shared by the ``verify`` command and the test suite."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .channels import ChannelKind, ChannelSpec, DecaySchedule, apply_joint, evolve_o, evolve_x
from .concurrence import MatrixType, concurrence_x, q_phi_t, q_psi_t, wootters
from .critical import SliceParams, critical_set, slice_state
from .density import decompose, embed, random_density, random_x_state, werner_state
from .oracle import boundary_bisect, lower_bound_audit

SLICE_KINDS = [(ch, mt) for ch in ChannelKind for mt in (MatrixType.PHI, MatrixType.PSI)]
# (gamma_a, gamma_b) choices; the second is the asymmetric schedule of the Fig7 preset
RATES = ((1.0, 1.0), (1.0, 0.2))


def random_slice(rng: np.random.Generator, channel, mtype, c_tv: float | None = None) -> SliceParams:
    """A physical slice with a random Q, fixed elements, deadline and threshold."""
    channel, mtype = ChannelKind.parse(channel), MatrixType(mtype)
    ga, gb = RATES[int(rng.integers(len(RATES)))]
    tau = float(rng.uniform(0.05, 2.0))
    c_tv = float(rng.uniform(0.0, 0.3)) if c_tv is None else c_tv
    if mtype is MatrixType.PHI and channel is not ChannelKind.PHASE:
        d22, d33 = rng.uniform(0.0, 0.2, 2)
        qmax = 1 - d22 - d33 - 2 * math.sqrt(d22 * d33)
        fixed = {"d22": float(d22), "d33": float(d33)}
    elif mtype is MatrixType.PSI and channel is not ChannelKind.PHASE:
        d11 = float(rng.uniform(0.0, 0.3))
        qmax, fixed = 1 - d11, {"d11": d11}
    elif mtype is MatrixType.PHI:
        qmax, fixed = 1.0, {}
    else:
        d44 = float(rng.uniform(0.0, 0.3))
        qmax, fixed = 1 - d44, {"d44": d44}
    q = float(rng.uniform(0.02, 0.98) * qmax)
    return SliceParams.from_schedule(channel, mtype, q, DecaySchedule(ga, gb), tau, c_tv, **fixed)


def q_tau(sl: SliceParams, coord: float) -> float:
    fn = q_phi_t if sl.mtype is MatrixType.PHI else q_psi_t
    return fn(slice_state(sl, coord), sl.spec)


def interior_boundaries(sl: SliceParams):
    """Yield (target, coord, bracket) for every boundary strictly inside the slice.

    The bracket runs between midpoints to the neighbouring boundaries, so it
    holds exactly one crossing.
    """
    cs = critical_set(sl)
    lo, hi = cs.phys_lo, cs.phys_hi
    for target, ivals in ((0.0, cs.cd_intervals), (sl.c_tv, cs.td_intervals)):
        pts = sorted({e for iv in ivals for e in iv if lo < e < hi})
        full = [lo, *pts, hi]
        for i, e in enumerate(pts, start=1):
            yield target, e, ((full[i - 1] + e) / 2, (e + full[i + 1]) / 2)


@dataclass
class Check:
    name: str
    n: int
    max_err: float
    tol: float
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.max_err, self.tol = float(self.max_err), float(self.tol)

    @property
    def passed(self) -> bool:
        return self.max_err <= self.tol

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "n": self.n, "max_err": self.max_err, "tol": self.tol,
                "passed": self.passed, **self.extra}


def check_closed_form_evolution(n: int, seed: int, tol: float = 1e-12) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        rho = random_density(rng)
        x, o = decompose(rho)
        spec = ChannelSpec(list(ChannelKind)[int(rng.integers(3))], rng.uniform(), rng.uniform())
        xk, ok = decompose(apply_joint(rho, spec))
        xc, oc = evolve_x(x, spec), evolve_o(o, spec)
        worst = max(worst, float(np.max(np.abs(xk.matrix() + ok.matrix() - xc.matrix() - oc.matrix()))))
    return Check("closed_form_evolution", n, worst, tol)


def check_concurrence_agreement(n: int, seed: int, tol: float = 1e-10) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n):
        x = random_x_state(rng, kind="Phi" if i % 2 else "Psi")
        worst = max(worst, abs(concurrence_x(x) - wootters(embed(x))))
    return Check("concurrence_x_vs_wootters", n, worst, tol)


def check_werner(n: int = 101, tol: float = 1e-12) -> Check:
    worst = 0.0
    for w in np.linspace(0.0, 1.0, n):
        expect = max(0.0, (3 * w - 1) / 2)
        worst = max(worst, abs(wootters(embed(werner_state(w))) - expect))
    return Check("werner_family", n, worst, tol)


def _per_slice(n: int, seed: int, body: Callable[[SliceParams], float]) -> tuple[float, int]:
    rng = np.random.default_rng(seed)
    worst, count = 0.0, 0
    for ch, mt in SLICE_KINDS:
        for _ in range(n):
            sl = random_slice(rng, ch, mt)
            e, k = body(sl)
            worst, count = max(worst, e), count + k
    return worst, count


def check_boundary_consistency(n: int, seed: int, tol: float = 1e-9) -> Check:
    def body(sl):
        errs = [abs(q_tau(sl, e) - tgt) for tgt, e, _ in interior_boundaries(sl)]
        cs = critical_set(sl)
        for tgt, v in ((0.0, cs.cd_tol), (sl.c_tv, cs.td_tol)):
            if cs.phys_lo <= v <= cs.phys_hi:
                errs.append(abs(q_tau(sl, v) - tgt))
        return max(errs, default=0.0), len(errs)

    worst, count = _per_slice(n, seed, body)
    return Check("boundary_self_consistency", count, worst, tol)


def check_shift_degeneracy(n: int, seed: int, tol: float = 1e-12) -> Check:
    def body(sl):
        cs = critical_set(sl.with_target(0.0))
        if cs.cd_tol == cs.td_tol:
            return 0.0, 1
        return abs(cs.cd_tol - cs.td_tol), 1

    worst, count = _per_slice(n, seed, body)
    return Check("td_equals_cd_at_zero_threshold", count, worst, tol)


def check_oracle_boundaries(n: int, seed: int, tol: float = 1e-6) -> Check:
    def body(sl):
        errs = [abs(boundary_bisect(sl, tgt, a, b) - e) for tgt, e, (a, b) in interior_boundaries(sl)]
        return max(errs, default=0.0), len(errs)

    worst, count = _per_slice(n, seed, body)
    return Check("analytic_vs_bisection", count, worst, tol)


def check_lower_bound(n: int, seed: int, tol: float = 1e-9) -> Check:
    rep = lower_bound_audit(n, seed)
    err = 0.0 if rep.min_margin is None else max(0.0, -rep.min_margin)
    return Check("lower_bound_audit", rep.samples, err, tol,
                 {"violations": len(rep.violations), "max_x_leak": rep.max_x_leak})


SUITES: dict[str, list[Callable[[int, int, float], Check]]] = {
    "channels": [lambda n, s, k: check_closed_form_evolution(n, s, 1e-12 * k)],
    "concurrence": [
        lambda n, s, k: check_concurrence_agreement(n, s, 1e-10 * k),
        lambda n, s, k: check_werner(min(n, 101), 1e-12 * k),
    ],
    "critical": [
        lambda n, s, k: check_boundary_consistency(n, s, 1e-9 * k),
        lambda n, s, k: check_shift_degeneracy(n, s, 1e-12 * k),
    ],
    "oracle": [
        lambda n, s, k: check_oracle_boundaries(n, s, 1e-6 * k),
        lambda n, s, k: check_lower_bound(n, s, 1e-9 * k),
    ],
}


def run_suite(suite: str = "all", n: int = 100, seed: int = 0, tol_scale: float = 1.0) -> dict[str, Any]:
    """Run one suite (or all); returns a JSON-ready report with a ``passed`` flag.

    ``tol_scale`` multiplies every tolerance; 0 demands exact agreement and
    is a quick way to see the checks fail.
    """
    names = list(SUITES) if suite == "all" else [suite]
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite {unknown[0]!r}; choose from all, {', '.join(SUITES)}")
    checks: list[Check] = []
    if n > 0:
        for s in names:
            checks += [fn(n, seed, tol_scale) for fn in SUITES[s]]
    return {
        "suite": suite, "n": n, "seed": seed, "tol_scale": tol_scale,
        "passed": all(c.passed for c in checks),
        "checks": [c.to_json() for c in checks],
    }

"""Brute-force cross-checks built only on Kraus sums and the Wootters formula.

Nothing here uses the closed-form boundaries of :mod:`disent.critical`; the
point is to verify them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .channels import ChannelKind, ChannelSpec, DecaySchedule, kraus_ops, kraus_sum
from .concurrence import MatrixType, concurrence_x, wootters, wootters_signed
from .critical import SliceParams, slice_state
from .density import DensityMatrix4, XState, decompose, embed, make_density, random_density

GRID = 256


class OracleError(RuntimeError):
    pass


class BracketFailure(OracleError):
    pass


class NoSignChange(OracleError):
    pass


@dataclass(frozen=True)
class OnsetResult:
    time: float | None
    bracket: tuple[float, float]
    evaluations: int

    def to_json(self) -> dict[str, Any]:
        return {"time": self.time, "bracket": list(self.bracket), "evaluations": self.evaluations}


# a crossing must exceed this fraction of the size of the terms being compared
NOISE_REL = 1e-12


def _x_signed(m: np.ndarray) -> tuple[float, float]:
    """max(Q_Phi, Q_Psi) from the elements of an X matrix, with its scale."""
    d = m.diagonal().real
    a, b = abs(m[0, 3]), math.sqrt(max(d[1] * d[2], 0.0))
    c, e = abs(m[1, 2]), math.sqrt(max(d[0] * d[3], 0.0))
    return 2 * max(a - b, c - e), 2 * max(a, b, c, e)


def _w_signed(m: np.ndarray) -> tuple[float, float]:
    return wootters_signed(m), float(np.trace(m).real)


def _is_x(m: np.ndarray) -> bool:
    mask = np.ones((4, 4), dtype=bool)
    mask[np.diag_indices(4)] = False
    mask[[0, 1, 2, 3], [3, 2, 1, 0]] = False
    return not np.any(m[mask])


def concurrence_measure(rho: DensityMatrix4, kind,
                        sched: DecaySchedule) -> Callable[[float], tuple[float, float]]:
    """Signed concurrence of the evolved state and its rounding scale, vs time.

    X inputs stay X under all three channels, so their signed value comes
    from the matrix elements; anything else goes through Wootters.
    """
    m0 = np.asarray(rho, dtype=complex)
    kind = ChannelKind.parse(kind)
    signed = _x_signed if _is_x(m0) else _w_signed

    def measure(t: float) -> tuple[float, float]:
        return signed(kraus_sum(m0, sched.spec_at(kind, t)))

    return measure


def _hidden_dip(vals: np.ndarray, scales: np.ndarray, target: float, upto: int) -> bool:
    """Does a parabola through some interior local minimum dip below target?"""
    for j in range(1, min(upto, len(vals) - 1)):
        a, b, c = vals[j - 1], vals[j], vals[j + 1]
        if not (b <= a and b <= c):
            continue
        curv = a - 2 * b + c
        if curv <= 0:
            continue
        # vertex of the parabola through the three equally spaced samples
        vmin = b - (c - a) ** 2 / (8 * curv)
        if vmin <= target - NOISE_REL * scales[j]:
            return True
    return False


def onset_time(rho0: DensityMatrix4, kind, sched: DecaySchedule, target: float = 0.0,
               t_max: float | None = None, time_tol: float | None = None,
               grid: int = GRID) -> OnsetResult:
    """First time the concurrence drops to ``target``; None if not within t_max.

    Coarse grid scan followed by bisection on the signed concurrence. A grid
    point counts as crossed only when it sits below target by more than
    rounding noise, so states that approach zero asymptotically (Bell states
    under amplitude damping) are not reported as crossing.
    """
    if target < 0:
        raise ValueError(f"target must be non-negative, got {target}")
    g_min = min(sched.gamma_a, sched.gamma_b)
    t_max = 50.0 / g_min if t_max is None else float(t_max)
    time_tol = 1e-9 / g_min if time_tol is None else float(time_tol)
    f = concurrence_measure(rho0, kind, sched)
    evals = 0

    def scan(n: int):
        nonlocal evals
        ts = np.linspace(0.0, t_max, n)
        vals, scales = np.array([f(t) for t in ts]).T
        evals += n
        hit = np.flatnonzero(vals <= target - NOISE_REL * scales)
        first = int(hit[0]) if hit.size else None
        return ts, vals, scales, first

    ts, vals, scales, first = scan(grid)
    if first == 0:
        return OnsetResult(0.0, (0.0, 0.0), evals)
    upto = first if first is not None else len(ts)
    if _hidden_dip(vals, scales, target, upto):
        ts, vals, scales, first = scan(4 * (grid - 1) + 1)
        upto = first if first is not None else len(ts)
        if _hidden_dip(vals, scales, target, upto):
            raise BracketFailure(
                f"concurrence dips toward {target} between grid points on [0, {t_max}]"
            )
    if first is None:
        return OnsetResult(None, (0.0, t_max), evals)
    lo, hi = float(ts[first - 1]), float(ts[first])
    while hi - lo > time_tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        evals += 1
        if f(mid)[0] > target:
            lo = mid
        else:
            hi = mid
    return OnsetResult(hi, (lo, hi), evals)


def slice_q_kraus(sl: SliceParams, coord: float) -> float:
    """Q_Phi or Q_Psi at tau on the slice, via the Kraus sum."""
    m = kraus_sum(slice_state(sl, coord).matrix(), sl.spec)
    d = m.diagonal().real
    if sl.mtype is MatrixType.PHI:
        return 2 * (abs(m[0, 3]) - math.sqrt(max(d[1] * d[2], 0.0)))
    return 2 * (abs(m[1, 2]) - math.sqrt(max(d[0] * d[3], 0.0)))


def boundary_bisect(sl: SliceParams, target: float, coord_lo: float, coord_hi: float,
                    coord_tol: float = 1e-13) -> float:
    """Coordinate where Q(tau) crosses ``target`` inside [coord_lo, coord_hi]."""
    lo, hi = float(coord_lo), float(coord_hi)
    flo = slice_q_kraus(sl, lo) - target
    fhi = slice_q_kraus(sl, hi) - target
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoSignChange(
            f"Q(tau) - target has the same sign at {lo} ({flo:.3e}) and {hi} ({fhi:.3e})"
        )
    while hi - lo > coord_tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = slice_q_kraus(sl, mid) - target
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class CdFreeScan:
    free: bool
    min_q: float
    already_separable: bool = False

    def __bool__(self) -> bool:
        return self.free


def _local_stack(kind: ChannelKind, ps: np.ndarray) -> np.ndarray:
    """Single-qubit Kraus operators for every p: shape (n_p, n_ops, 2, 2)."""
    return np.array([kraus_ops(kind, p) for p in ps])


def evolve_grid(m: np.ndarray, kind, pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    """Kraus evolution of one 4x4 matrix over a (pa, pb) grid: (na, nb, 4, 4)."""
    kind = ChannelKind.parse(kind)
    ka, kb = _local_stack(kind, pa), _local_stack(kind, pb)
    t = m.reshape(2, 2, 2, 2)  # (a, b, a', b')
    # qubit A: sum_k K[a, x] T[x, b, y, c] conj(K[z, y])
    ta = np.einsum("pkax,xbyc,pkzy->pabzc", ka, t, ka.conj())
    # qubit B: sum_l K[b, x] T[a, x, z, y] conj(K[w, y])
    full = np.einsum("qlbx,paxzy,qlwy->pqabzw", kb, ta, kb.conj())
    return full.reshape(len(pa), len(pb), 4, 4)


def scan_grid(n: int) -> np.ndarray:
    """Channel strengths in [0, 1]: half uniform, half clustered toward p = 1.

    Under amplitude damping a state just past the CD-free boundary only goes
    negative for p within ~1e-4 of 1, which a uniform grid never samples.
    """
    n_uni = max(n // 2, 2)
    near_one = 1.0 - np.geomspace(1e-1, 1e-9, max(n - n_uni, 1))
    return np.unique(np.concatenate([np.linspace(0.0, 1.0, n_uni), near_one]))


def cd_free_scan(builder: Callable[[float], XState], coord: float, grid_n: int = 101,
                 kind="amplitude", floor: float = -1e-12) -> CdFreeScan:
    """Check Q >= floor for every channel strength on a grid_n x grid_n grid."""
    kind = ChannelKind.parse(kind)
    if kind is ChannelKind.DEPOLARIZING:
        raise ValueError("CD-free scan applies to amplitude or phase damping")
    x = builder(coord)
    q0f = 2 * (abs(x.c14) - math.sqrt(x.d22 * x.d33))
    q0s = 2 * (abs(x.c23) - math.sqrt(x.d11 * x.d44))
    if max(q0f, q0s) <= 0:
        return CdFreeScan(False, max(q0f, q0s), already_separable=True)
    ps = scan_grid(grid_n)
    ev = evolve_grid(x.matrix(), kind, ps, ps)
    d = ev[..., [0, 1, 2, 3], [0, 1, 2, 3]].real
    if q0f >= q0s:
        q = 2 * (np.abs(ev[..., 0, 3]) - np.sqrt(np.clip(d[..., 1] * d[..., 2], 0, None)))
    else:
        q = 2 * (np.abs(ev[..., 1, 2]) - np.sqrt(np.clip(d[..., 0] * d[..., 3], 0, None)))
    qmin = float(q.min())
    return CdFreeScan(qmin >= floor, qmin)


@dataclass
class AuditReport:
    samples: int
    seed: int
    violations: list[dict[str, Any]] = field(default_factory=list)
    min_margin: float | None = None
    max_x_leak: float = 0.0

    def to_json(self) -> dict[str, Any]:
        return {
            "samples": self.samples,
            "violations": self.violations,
            "min_margin": self.min_margin,
            "max_x_leak": self.max_x_leak,
            "seed": self.seed,
        }


def _audit_one(child: np.random.SeedSequence, kind: ChannelKind, slack: float):
    rng = np.random.default_rng(child)
    rank = int(rng.integers(1, 5))
    rho = random_density(rng, rank=rank)
    spec = ChannelSpec(kind, rng.uniform(), rng.uniform())
    full = make_density(kraus_sum(rho.elems, spec))
    x0, _ = decompose(rho)
    xt_full, _ = decompose(full)
    xt_alone, _ = decompose(make_density(kraus_sum(embed(x0).elems, spec)))
    leak = float(np.max(np.abs(xt_full.matrix() - xt_alone.matrix())))
    c_full, c_x = wootters(full), concurrence_x(xt_alone)
    margin = c_full - c_x
    bad = None
    if margin < -slack:
        bad = {"kind": kind.value, "p_a": spec.p_a, "p_b": spec.p_b, "rank": rank,
               "C_full": c_full, "C_x": c_x, "margin": margin}
    return margin, leak, bad


def lower_bound_audit(n_samples: int, seed: int = 0, kinds=tuple(ChannelKind),
                      slack: float = 1e-9, workers: int = 1) -> AuditReport:
    """Check C[rho(t)] >= C[X(t)] on random generic states.

    Each kind gets ``n_samples`` states. Per-sample seeds are spawned up
    front, so the report is identical for any ``workers``.
    """
    kinds = [ChannelKind.parse(k) for k in kinds]
    jobs = []
    for k, ss in zip(kinds, np.random.SeedSequence(seed).spawn(len(kinds))):
        jobs += [(child, k) for child in ss.spawn(n_samples)]
    report = AuditReport(samples=len(jobs), seed=seed)
    if not jobs:
        return report
    run = lambda job: _audit_one(job[0], job[1], slack)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    report.min_margin = min(r[0] for r in results)
    report.max_x_leak = max(r[1] for r in results)
    report.violations = [r[2] for r in results if r[2] is not None]
    return report

"""Critical boundaries of the disentanglement phase diagrams.

Two layers live here.

* Named closed forms (``ad_*``, ``pd_*``, ``dp_*``): one function per
  boundary expression, taking the held-fixed matrix elements and the channel
  probabilities at the deadline tau.
* Slice-level evaluation (:class:`SliceParams`, :func:`critical_set`,
  :func:`classify_point`): a one-parameter family of physical X states,
  indexed by the scanned coordinate D = rho_11 or S = rho_22 = rho_33, with
  every boundary expressed on that coordinate.

On Psi-type slices under amplitude damping and depolarization the slice
holds rho_11 fixed and rho_44 = 1 - rho_11 - 2S follows from the trace, so
x14 moves with S. The named Psi formulas keep rho_44 as an explicit
argument; the slice boundary is their fixed point, solved in closed form in
the variable u = x14.

Conventions: an unbounded boundary (every coordinate passes) is ``inf``; an
empty one is ``-inf``. Slice boundaries are raw; :class:`CriticalSet`
exposes clamped copies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable

import numpy as np

from .channels import ChannelKind, ChannelSpec, DecaySchedule, depol_coeffs
from .concurrence import MatrixType, classify, q_phi, q_phi_t, q_psi, q_psi_t
from .density import XState

INF = math.inf


class CriticalError(ValueError):
    pass


class UnphysicalSlice(CriticalError):
    pass


class SingularChannel(CriticalError):
    pass


class EmptyRegion(CriticalError):
    pass


class NoSolution(CriticalError):
    pass


def shift(c_tv: float, q_a: float, q_b: float) -> float:
    """delta = C_tv / sqrt(q_a q_b), the CD -> TD offset."""
    if c_tv == 0:
        return 0.0
    r = math.sqrt(q_a * q_b)
    if r == 0:
        return INF
    return c_tv / r


def _check_q(q: float) -> None:
    if not (0.0 <= q <= 1.0):
        raise CriticalError(f"Q must lie in [0, 1], got {q}")


# --------------------------------------------------------------------------
# amplitude damping
# --------------------------------------------------------------------------


def ad_phi_bounds(q: float, d22: float, d33: float) -> tuple[float, float]:
    """Physical range of D for a Phi slice with rho_22, rho_33 held fixed."""
    y23, x23 = d22 + d33, math.sqrt(d22 * d33)
    disc = (1 - y23) ** 2 - (q + 2 * x23) ** 2
    if disc < -1e-14:
        raise UnphysicalSlice(
            f"Q={q} exceeds Q_max = 1 - y23 - 2 x23 = {1 - y23 - 2 * x23:.6g}"
        )
    root = math.sqrt(max(disc, 0.0))
    return ((1 - y23) - root) / 2, ((1 - y23) + root) / 2


def ad_phi_cd_free(q: float, d22: float, d33: float) -> float:
    y23, x23 = d22 + d33, math.sqrt(d22 * d33)
    return (math.sqrt(y23**2 + q**2 + 4 * x23 * q) - y23) / 2


def _ad_phi_formula(weight: float, d22: float, d33: float, p_a: float, p_b: float) -> float:
    if p_a == 0 or p_b == 0:
        raise SingularChannel("closed form is singular for single-qubit dissipation")
    a, b = d22 / (2 * p_b), d33 / (2 * p_a)
    return math.sqrt((a - b) ** 2 + weight**2 / (4 * p_a * p_b)) - a - b


def ad_phi_cd_tol(q, d22, d33, p_a_tau, p_b_tau) -> float:
    x23 = math.sqrt(d22 * d33)
    return _ad_phi_formula(q + 2 * x23, d22, d33, p_a_tau, p_b_tau)


def ad_phi_td_tol(q, d22, d33, p_a_tau, p_b_tau, c_tv) -> float:
    x23 = math.sqrt(d22 * d33)
    dlt = shift(c_tv, 1 - p_a_tau, 1 - p_b_tau)
    weight = q + 2 * x23 - dlt
    if weight < 0:
        raise EmptyRegion(f"Q + 2 x23 = {q + 2 * x23:.6g} is below the shift {dlt:.6g}")
    return _ad_phi_formula(weight, d22, d33, p_a_tau, p_b_tau)


def ad_cd_time_symmetric(x: XState, gamma: float) -> float | None:
    """CD time of a Phi-type state when both qubits decay at rate ``gamma``.

    With u = exp(gamma t) the CD condition is the quadratic
    L u^2 - (2 r11^2 + r11 y23) u + r11^2 = 0,
    L = r11 (1 - r44) + r22 r33 - |r14|^2. It has a root u >= 1 only when
    L > 0; otherwise the state never disentangles.
    """
    if classify(x) is not MatrixType.PHI:
        raise CriticalError("ad_cd_time_symmetric needs a Phi-type state")
    if gamma <= 0:
        raise CriticalError(f"gamma must be positive, got {gamma}")
    r11, r22, r33, r44 = x.diag
    lead = r11 * (1 - r44) + r22 * r33 - abs(x.c14) ** 2
    if lead <= 0:
        return None
    b = 2 * r11**2 + r11 * (r22 + r33)
    c = r11**2
    u = (b + math.sqrt(b * b - 4 * lead * c)) / (2 * lead)
    return math.log(u) / gamma


def ad_psi_min(q: float, d11: float, d44: float) -> float:
    s = q / 2 + math.sqrt(d11 * d44)
    if s > 0.5 + 1e-14:
        raise UnphysicalSlice(f"S_min = {s:.6g} exceeds 1/2")
    return s


def ad_psi_cd_free(q: float, d11: float) -> float:
    if d11 == 0:
        return INF
    return (4 * q * math.sqrt(d11) - q**2 - 4 * d11**2) / (8 * d11)


def _ad_psi_formula(weight, d11, d44, p_a, p_b) -> float:
    if d11 == 0 or p_a + p_b == 0:
        raise SingularChannel("closed form is singular for rho_11 = 0 or no dissipation")
    x14 = math.sqrt(d11 * d44)
    num = weight**2 - 4 * x14**2 - 4 * d11**2 * p_a * p_b
    return num / (4 * d11 * (p_a + p_b))


def ad_psi_cd_tol(q, d11, d44, p_a_tau, p_b_tau) -> float:
    return _ad_psi_formula(q + 2 * math.sqrt(d11 * d44), d11, d44, p_a_tau, p_b_tau)


def ad_psi_td_tol(q, d11, d44, p_a_tau, p_b_tau, c_tv) -> float:
    x14 = math.sqrt(d11 * d44)
    dlt = shift(c_tv, 1 - p_a_tau, 1 - p_b_tau)
    weight = q + 2 * x14 - dlt
    if weight < 0:
        raise EmptyRegion(f"Q + 2 x14 = {q + 2 * x14:.6g} is below the shift {dlt:.6g}")
    return _ad_psi_formula(weight, d11, d44, p_a_tau, p_b_tau)


# --------------------------------------------------------------------------
# phase damping
# --------------------------------------------------------------------------


def pd_phi_bounds(q: float) -> tuple[float, float]:
    _check_q(q)
    return 0.0, (1 - q) / 4


def pd_phi_cd_free() -> float:
    """CD-free set of a Phi slice under phase damping: the line S = 0."""
    return 0.0


def _pd_ratio(q_a: float, q_b: float) -> float:
    r = math.sqrt(q_a * q_b)
    if r >= 1:
        raise SingularChannel("no dissipation at tau")
    return r


def pd_phi_cd_tol(q, q_a_tau, q_b_tau) -> float:
    try:
        r = _pd_ratio(q_a_tau, q_b_tau)
    except SingularChannel:
        return INF
    return q * r / (2 * (1 - r))


def pd_phi_td_tol(q, q_a_tau, q_b_tau, c_tv) -> float:
    try:
        r = _pd_ratio(q_a_tau, q_b_tau)
    except SingularChannel:
        if q < c_tv:
            raise EmptyRegion(f"Q = {q} is below C_tv = {c_tv}") from None
        return INF
    dlt = shift(c_tv, q_a_tau, q_b_tau)
    if q < dlt:
        raise EmptyRegion(f"Q = {q:.6g} is below the shift {dlt:.6g}")
    return (q - dlt) * r / (2 * (1 - r))


def pd_threshold_time(x: XState, sched: DecaySchedule, target: float = 0.0) -> float | None:
    """First time the dominant Q of ``x`` drops to ``target`` under phase damping.

    Q(t) = 2(|c| r(t) - x) with r = sqrt(q_a q_b) = exp(-(gamma_a + gamma_b) t / 2).
    Returns 0 when Q(0) is already at or below the target.
    """
    if q_phi(x) >= q_psi(x):
        coh, pair = abs(x.c14), math.sqrt(x.d22 * x.d33)
    else:
        coh, pair = abs(x.c23), math.sqrt(x.d11 * x.d44)
    need = target / 2 + pair
    if need <= 0:
        return None
    if need >= coh:
        return 0.0
    return -2 * math.log(need / coh) / (sched.gamma_a + sched.gamma_b)


def pd_cd_time(x: XState, sched: DecaySchedule) -> float | None:
    return pd_threshold_time(x, sched, 0.0)


def pd_psi_bounds(q: float, d44: float) -> tuple[float, float]:
    _check_q(q)
    if q > 1 - d44 + 1e-14:
        raise UnphysicalSlice(f"Q={q} exceeds Q_max = 1 - rho_44 = {1 - d44}")
    return 0.0, (math.sqrt(max(1 - q, 0.0)) - math.sqrt(d44)) ** 2


def pd_psi_cd_tol(q, d44, q_a_tau, q_b_tau) -> float:
    if d44 == 0:
        return INF
    try:
        r = _pd_ratio(q_a_tau, q_b_tau)
    except SingularChannel:
        return INF
    return q**2 * r**2 / (4 * (1 - r) ** 2 * d44)


def pd_psi_td_tol(q, d44, q_a_tau, q_b_tau, c_tv) -> float:
    try:
        r = _pd_ratio(q_a_tau, q_b_tau)
    except SingularChannel:
        if q < c_tv:
            raise EmptyRegion(f"Q = {q} is below C_tv = {c_tv}") from None
        return INF
    dlt = shift(c_tv, q_a_tau, q_b_tau)
    if q < dlt:
        raise EmptyRegion(f"Q = {q:.6g} is below the shift {dlt:.6g}")
    if d44 == 0:
        return INF
    return (q - dlt) ** 2 * r**2 / (4 * (1 - r) ** 2 * d44)


# --------------------------------------------------------------------------
# depolarization
# --------------------------------------------------------------------------


def dp_cd_free_exists() -> bool:
    """Depolarization has no CD-free region for either matrix type."""
    return False


def _quadratic_roots(a: float, b: float, c: float) -> tuple[float, ...]:
    """Real roots of a x^2 + b x + c, ascending, cancellation-free."""
    if a == 0:
        if b == 0:
            return ()
        return (-c / b,)
    disc = b * b - 4 * a * c
    if disc < 0:
        return ()
    sq = math.sqrt(disc)
    qq = -(b + math.copysign(sq, b)) / 2
    if qq == 0:
        return (0.0, 0.0)
    r1, r2 = qq / a, c / qq
    return (min(r1, r2), max(r1, r2))


def dp_phi_roots(q, d22, d33, p_a_tau, p_b_tau, c_tv=0.0) -> tuple[float, ...]:
    """Roots in D of Q_Phi(tau) = C_tv on a depolarizing Phi slice.

    Q_Phi(tau) >= C_tv outside the returned pair. Returns ``()`` when the
    condition holds for every D, and raises :class:`NoSolution` when it
    holds for none.
    """
    f = depol_coeffs(p_a_tau, p_b_tau)
    y23, x23 = d22 + d33, math.sqrt(d22 * d33)
    alpha = d22 * f.f4 + d33 * f.f1 + f.f2 * (1 - y23)
    beta = d22 * f.f1 + d33 * f.f4 + f.f3 * (1 - y23)
    amp = (q / 2 + x23) * abs(f.f0) - c_tv / 2
    if amp < 0:
        raise EmptyRegion("coherence at tau cannot reach the threshold")
    eta = amp**2
    g = f.f2 - f.f3
    # rho22(tau) = beta + g D, rho33(tau) = alpha - g D
    if g == 0:
        if alpha * beta <= eta:
            return ()
        raise NoSolution("Q_Phi(tau) is independent of D and below target")
    if (alpha + beta) ** 2 - 4 * eta < 0:
        return ()
    return _quadratic_roots(g * g, -g * (alpha - beta), eta - alpha * beta)


def _dp_phi_tol(q, d22, d33, p_a_tau, p_b_tau, c_tv) -> float:
    roots = dp_phi_roots(q, d22, d33, p_a_tau, p_b_tau, c_tv)
    if not roots:
        return INF
    lo, hi = ad_phi_bounds(q, d22, d33)
    if roots[0] <= lo and roots[-1] >= hi:
        raise NoSolution("Q_Phi(tau) is below target on the whole physical range")
    return roots[0]


def dp_phi_cd_tol(q, d22, d33, p_a_tau, p_b_tau) -> float:
    """Lower critical D; for p_a != p_b tolerability resumes above the
    companion root returned by :func:`dp_phi_roots`."""
    return _dp_phi_tol(q, d22, d33, p_a_tau, p_b_tau, 0.0)


def dp_phi_td_tol(q, d22, d33, p_a_tau, p_b_tau, c_tv) -> float:
    return _dp_phi_tol(q, d22, d33, p_a_tau, p_b_tau, c_tv)


def _dp_psi_tol(q, d11, d44, p_a, p_b, c_tv) -> float:
    f = depol_coeffs(p_a, p_b)
    h = f.f2 + f.f3
    lam = h * h
    if lam == 0:
        return INF
    x14, y14 = math.sqrt(d11 * d44), d11 + d44
    mu = y14 * (f.f1 + f.f4) * h
    xi = (d11 * f.f1 + d44 * f.f4) * (d11 * f.f4 + d44 * f.f1)
    amp = (q / 2 + x14) * abs(f.f0) - c_tv / 2
    if amp < 0:
        raise EmptyRegion("coherence at tau cannot reach the threshold")
    nu = xi - amp**2
    disc = mu * mu - 4 * lam * nu
    if disc < 0:
        raise NoSolution("Q_Psi(tau) is below target for every S")
    # (-mu + sqrt(disc)) / (2 lam), rearranged for mu >= 0
    return -2 * nu / (mu + math.sqrt(disc))


def dp_psi_cd_tol(q, d11, d44, p_a_tau, p_b_tau) -> float:
    return _dp_psi_tol(q, d11, d44, p_a_tau, p_b_tau, 0.0)


def dp_psi_td_tol(q, d11, d44, p_a_tau, p_b_tau, c_tv) -> float:
    return _dp_psi_tol(q, d11, d44, p_a_tau, p_b_tau, c_tv)


# --------------------------------------------------------------------------
# slices
# --------------------------------------------------------------------------

_FIXED = {
    (ChannelKind.AMPLITUDE, MatrixType.PHI): ("d22", "d33"),
    (ChannelKind.AMPLITUDE, MatrixType.PSI): ("d11",),
    (ChannelKind.PHASE, MatrixType.PHI): (),
    (ChannelKind.PHASE, MatrixType.PSI): ("d44",),
    (ChannelKind.DEPOLARIZING, MatrixType.PHI): ("d22", "d33"),
    (ChannelKind.DEPOLARIZING, MatrixType.PSI): ("d11",),
}


@dataclass(frozen=True)
class SliceParams:
    """One row of a phase diagram: fixed Q and fixed matrix elements.

    ``p_a``/``p_b`` are the channel probabilities reached at the deadline
    tau (rescaled for depolarization, as in :class:`ChannelSpec`).
    """

    channel: ChannelKind
    mtype: MatrixType
    q: float
    p_a: float
    p_b: float
    c_tv: float = 0.0
    d11: float | None = None
    d22: float | None = None
    d33: float | None = None
    d44: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "channel", ChannelKind.parse(self.channel))
        object.__setattr__(self, "mtype", MatrixType(self.mtype))
        if self.mtype is MatrixType.SEPARABLE:
            raise CriticalError("slices are defined for Phi or Psi types only")
        if self.q < 0:
            raise CriticalError(f"Q must be non-negative, got {self.q}")
        if not 0 <= self.c_tv < 1:
            raise CriticalError(f"C_tv must lie in [0, 1), got {self.c_tv}")
        ChannelSpec(self.channel, self.p_a, self.p_b)
        need = _FIXED[(self.channel, self.mtype)]
        for name in ("d11", "d22", "d33", "d44"):
            v = getattr(self, name)
            if name in need:
                if v is None or not 0 <= v <= 1:
                    raise CriticalError(f"{self.channel.value}-{self.mtype.value} slice needs {name} in [0, 1]")
            elif v is not None:
                raise CriticalError(f"{name} is not a fixed parameter of a {self.channel.value}-{self.mtype.value} slice")

    @classmethod
    def from_schedule(cls, channel, mtype, q, sched: DecaySchedule, tau: float,
                      c_tv: float = 0.0, **fixed) -> "SliceParams":
        if tau <= 0:
            raise CriticalError(f"tau must be positive, got {tau}")
        spec = sched.spec_at(channel, tau)
        return cls(channel, mtype, q, spec.p_a, spec.p_b, c_tv, **fixed)

    @property
    def spec(self) -> ChannelSpec:
        return ChannelSpec(self.channel, self.p_a, self.p_b)

    @property
    def coord_name(self) -> str:
        scans_d = (self.mtype is MatrixType.PHI) != (self.channel is ChannelKind.PHASE)
        return "D" if scans_d else "S"

    @property
    def fixed(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in _FIXED[(self.channel, self.mtype)]}

    def with_target(self, c_tv: float) -> "SliceParams":
        return SliceParams(self.channel, self.mtype, self.q, self.p_a, self.p_b, c_tv, **self.fixed)

    def to_json(self) -> dict[str, Any]:
        return {
            "channel": self.channel.value, "type": self.mtype.value, "Q": self.q,
            "p_a_tau": self.p_a, "p_b_tau": self.p_b, "C_tv": self.c_tv,
            "fixed": self.fixed, "coord": self.coord_name,
        }


def slice_state(sl: SliceParams, coord: float) -> XState:
    """The X state at ``coord`` on the slice (validated)."""
    q = sl.q
    if sl.mtype is MatrixType.PHI:
        if sl.channel is ChannelKind.PHASE:
            s = coord
            d = (1 - 2 * s) / 2
            return XState(d, s, s, d, c14=q / 2 + s)
        d22, d33 = sl.d22, sl.d33
        return XState(coord, d22, d33, 1 - coord - d22 - d33, c14=q / 2 + math.sqrt(d22 * d33))
    if sl.channel is ChannelKind.PHASE:
        d44 = sl.d44
        s = (1 - coord - d44) / 2
        return XState(coord, s, s, d44, c23=q / 2 + math.sqrt(max(coord * d44, 0.0)))
    d11 = sl.d11
    d44 = 1 - d11 - 2 * coord
    return XState(d11, coord, coord, d44, c23=q / 2 + math.sqrt(max(d11 * d44, 0.0)))


def slice_bounds(sl: SliceParams) -> tuple[float, float]:
    """Physical range of the scanned coordinate."""
    q = sl.q
    if sl.channel is ChannelKind.PHASE:
        return pd_phi_bounds(q) if sl.mtype is MatrixType.PHI else pd_psi_bounds(q, sl.d44)
    if sl.mtype is MatrixType.PHI:
        return ad_phi_bounds(q, sl.d22, sl.d33)
    d11 = sl.d11
    if q > 1 - d11 + 1e-14:
        raise UnphysicalSlice(f"Q={q} exceeds Q_max = 1 - rho_11 = {1 - d11}")
    hi = (1 - d11) / 2
    lo = q / 2 - d11 + math.sqrt(max(d11 * (1 - q), 0.0))
    return min(lo, hi), hi


def slice_q_tau(sl: SliceParams, coord: float) -> float:
    """Closed-form Q_Phi or Q_Psi at tau for the state at ``coord``."""
    x = slice_state(sl, coord)
    fn = q_phi_t if sl.mtype is MatrixType.PHI else q_psi_t
    return fn(x, sl.spec)


def _ad_psi_slice(sl: SliceParams, target: float) -> float:
    d11, pa, pb = sl.d11, sl.p_a, sl.p_b
    qp = sl.q - shift(target, 1 - pa, 1 - pb)
    if qp < 0:
        return -INF
    sig, prod = pa + pb, pa * pb
    e = d11 * d11 * prod + d11 * sig * (1 - d11) / 2
    den = qp + math.sqrt(qp * qp * (1 - sig / 2) + 2 * sig * e)
    if den == 0:
        return INF
    u = (2 * e - qp * qp / 2) / den
    if u <= 0:
        return INF
    return (1 - d11 - u * u / d11) / 2


def _dp_psi_slice_roots(sl: SliceParams, target: float) -> list[float]:
    """Candidate S values where Q_Psi(tau) = target on a depolarizing slice."""
    f = depol_coeffs(sl.p_a, sl.p_b)
    d11, h, f0 = sl.d11, f.f2 + f.f3, abs(f.f0)
    k = f0 * sl.q / 2 - target / 2
    if d11 == 0:
        # x14 = 0; rho11(tau), rho44(tau) are linear in S
        a0, a1 = f.f4, h - 2 * f.f4
        b0, b1 = f.f1, h - 2 * f.f1
        if k < 0:
            return []
        return list(_quadratic_roots(a1 * b1, a0 * b1 + a1 * b0, a0 * b0 - k * k))
    # S = (1 - d11)/2 - u^2 / (2 d11), u = x14 >= 0
    s0 = (1 - d11) / 2
    a0 = f.f1 * d11 + h * s0
    a2 = (f.f4 - h / 2) / d11
    b0 = f.f4 * d11 + h * s0
    b2 = (f.f1 - h / 2) / d11
    poly = np.array([
        -a2 * b2,
        0.0,
        f0 * f0 - a0 * b2 - a2 * b0,
        2 * f0 * k,
        k * k - a0 * b0,
    ])
    while len(poly) > 1 and poly[0] == 0:
        poly = poly[1:]
    us = []
    for z in np.roots(poly) if len(poly) > 1 else []:
        if abs(z.imag) > 1e-7 * max(1.0, abs(z)):
            continue
        u = z.real
        dpoly = np.polyder(poly)
        for _ in range(3):
            d = np.polyval(dpoly, u)
            if d == 0:
                break
            u -= np.polyval(poly, u) / d
        if u >= 0:
            us.append(u)
    if f0 > 0:
        u_k = -k / f0
        if u_k >= 0:
            us.append(u_k)
    return [s0 - u * u / (2 * d11) for u in us]


def _tolerable_intervals(lo, hi, cuts, qfun: Callable[[float], float], target) -> tuple:
    pts = sorted({lo, hi, *(c for c in cuts if lo < c < hi)})
    if len(pts) == 1:
        return ((lo, hi),) if qfun(lo) >= target else ()
    out: list[list[float]] = []
    for a, b in zip(pts[:-1], pts[1:]):
        if qfun((a + b) / 2) >= target:
            if out and out[-1][1] == a:
                out[-1][1] = b
            else:
                out.append([a, b])
    return tuple((a, b) for a, b in out)


def _lower_run(lo, intervals) -> float:
    if not intervals or intervals[0][0] > lo:
        return -INF
    return intervals[0][1]


def _boundary(sl: SliceParams, target: float, lo: float, hi: float):
    """(raw critical value, tolerable intervals) for Q(tau) >= target."""
    qfun = lambda c: slice_q_tau(sl, c)  # noqa: E731
    ch, mt = sl.channel, sl.mtype
    pa, pb = sl.p_a, sl.p_b

    if ch is ChannelKind.DEPOLARIZING and mt is MatrixType.PHI:
        try:
            roots = dp_phi_roots(sl.q, sl.d22, sl.d33, pa, pb, target)
        except (EmptyRegion, NoSolution):
            return -INF, ()
        if not roots:
            return INF, ((lo, hi),)
        return roots[0], _tolerable_intervals(lo, hi, roots, qfun, target)

    if ch is ChannelKind.DEPOLARIZING:
        cuts = _dp_psi_slice_roots(sl, target)
        ivals = _tolerable_intervals(lo, hi, cuts, qfun, target)
        if ivals == ((lo, hi),):
            return INF, ivals
        return _lower_run(lo, ivals), ivals

    if ch is ChannelKind.AMPLITUDE and mt is MatrixType.PHI:
        x23 = math.sqrt(sl.d22 * sl.d33)
        amp = sl.q / 2 + x23 - shift(target, 1 - pa, 1 - pb) / 2
        if amp < 0:
            crit = -INF
        else:
            a, b, c = pa * pb, sl.d22 * pa + sl.d33 * pb, x23 * x23 - amp * amp
            if a == 0 and b == 0:
                crit = INF if c <= 0 else -INF
            elif a == 0:
                crit = -c / b
            else:
                disc = b * b - 4 * a * c
                if disc < 0:
                    crit = -INF
                else:
                    den = b + math.sqrt(disc)
                    crit = -2 * c / den if den > 0 else 0.0
    elif ch is ChannelKind.AMPLITUDE:
        crit = _ad_psi_slice(sl, target)
    else:
        r = math.sqrt((1 - pa) * (1 - pb))
        if r >= 1:
            crit = INF if sl.q >= target else -INF
        else:
            reach = (sl.q * r - target) / (2 * (1 - r))
            if mt is MatrixType.PHI:
                crit = reach
            elif reach < 0:
                crit = -INF
            elif sl.d44 == 0:
                crit = INF
            else:
                crit = reach * reach / sl.d44

    if crit < lo:
        return crit, ()
    return crit, ((lo, min(crit, hi)),)


def slice_cd_free(sl: SliceParams) -> float | None:
    if sl.channel is ChannelKind.DEPOLARIZING:
        return None
    if sl.channel is ChannelKind.AMPLITUDE:
        if sl.mtype is MatrixType.PHI:
            return ad_phi_cd_free(sl.q, sl.d22, sl.d33)
        return ad_psi_cd_free(sl.q, sl.d11)
    if sl.mtype is MatrixType.PSI and sl.d44 == 0:
        return INF
    return pd_phi_cd_free()


class CDPhase(str, Enum):
    FREE = "free"
    TOLERABLE = "tolerable"
    NOGO = "nogo"


class TDPhase(str, Enum):
    TOLERABLE = "tolerable"
    NOGO = "nogo"


@dataclass(frozen=True)
class PhaseLabel:
    cd: CDPhase | None
    td: TDPhase | None
    physical: bool = True

    @property
    def optimal_robust(self) -> bool:
        return self.physical and self.cd in (CDPhase.FREE, CDPhase.TOLERABLE) and self.td is TDPhase.TOLERABLE

    @property
    def code(self) -> str:
        if not self.physical:
            return "unphysical"
        return f"cd-{self.cd.value}/td-{self.td.value}"

    def to_json(self) -> dict[str, Any]:
        return {
            "physical": self.physical,
            "cd": self.cd.value if self.cd else None,
            "td": self.td.value if self.td else None,
            "optimal_robust": self.optimal_robust,
            "code": self.code,
        }


UNPHYSICAL = PhaseLabel(None, None, physical=False)


def _clamp(v: float | None, lo: float, hi: float) -> float | None:
    # below the physical range the region is empty; there is nothing to clamp to
    if v is None or v < lo:
        return None
    return min(v, hi)


def _num_json(v: float | None):
    if v is None:
        return None
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


@dataclass(frozen=True)
class CriticalSet:
    """Boundaries of one slice.

    ``cd_tol``/``td_tol`` are the raw critical values: every physical
    coordinate at or below them is tolerable. ``cd_intervals`` and
    ``td_intervals`` list the complete tolerable sets inside the physical
    range; they differ from ``[phys_lo, cd_tol]`` only under
    depolarization, where tolerability can return at larger coordinates.
    """

    phys_lo: float
    phys_hi: float
    cd_free: float | None
    cd_tol: float
    td_tol: float
    cd_intervals: tuple[tuple[float, float], ...]
    td_intervals: tuple[tuple[float, float], ...]

    def clamped(self, name: str) -> float | None:
        return _clamp(getattr(self, name), self.phys_lo, self.phys_hi)

    def label(self, coord: float, tol: float = 1e-12) -> PhaseLabel:
        if not (self.phys_lo - tol <= coord <= self.phys_hi + tol):
            return UNPHYSICAL
        if self.cd_free is not None and coord <= self.cd_free:
            cd = CDPhase.FREE
        elif _inside(coord, self.cd_intervals):
            cd = CDPhase.TOLERABLE
        else:
            cd = CDPhase.NOGO
        td = TDPhase.TOLERABLE if _inside(coord, self.td_intervals) else TDPhase.NOGO
        return PhaseLabel(cd, td)

    def to_json(self) -> dict[str, Any]:
        return {
            "phys_lo": self.phys_lo,
            "phys_hi": self.phys_hi,
            "cd_free": _num_json(self.cd_free),
            "cd_tol": _num_json(self.cd_tol),
            "td_tol": _num_json(self.td_tol),
            "cd_tol_clamped": _num_json(self.clamped("cd_tol")),
            "td_tol_clamped": _num_json(self.clamped("td_tol")),
            "cd_intervals": [list(iv) for iv in self.cd_intervals],
            "td_intervals": [list(iv) for iv in self.td_intervals],
        }


def _inside(c: float, intervals) -> bool:
    return any(a <= c <= b for a, b in intervals)


def critical_set(sl: SliceParams) -> CriticalSet:
    lo, hi = slice_bounds(sl)
    cd, cd_iv = _boundary(sl, 0.0, lo, hi)
    if sl.c_tv == 0:
        td, td_iv = cd, cd_iv
    else:
        td, td_iv = _boundary(sl, sl.c_tv, lo, hi)
    return CriticalSet(lo, hi, slice_cd_free(sl), cd, td, cd_iv, td_iv)


def classify_point(sl: SliceParams, coord: float) -> PhaseLabel:
    try:
        cs = critical_set(sl)
    except UnphysicalSlice:
        return UNPHYSICAL
    return cs.label(coord)


def slice_from_state(x: XState, spec: ChannelSpec, c_tv: float = 0.0,
                     sym_tol: float = 1e-12) -> tuple[SliceParams, float]:
    """Place an X state on the slice through it; returns (slice, coord)."""
    mt = classify(x)
    if mt is MatrixType.SEPARABLE:
        raise CriticalError("state is separable (Q_Phi, Q_Psi <= 0)")
    ch = spec.kind
    if mt is MatrixType.PHI:
        q = 2 * (abs(x.c14) - math.sqrt(x.d22 * x.d33))
        if ch is ChannelKind.PHASE:
            fixed, coord = {}, math.sqrt(x.d22 * x.d33)
        else:
            fixed, coord = {"d22": x.d22, "d33": x.d33}, x.d11
    else:
        q = 2 * (abs(x.c23) - math.sqrt(x.d11 * x.d44))
        if ch is ChannelKind.PHASE:
            fixed, coord = {"d44": x.d44}, x.d11
        else:
            if abs(x.d22 - x.d33) > sym_tol:
                raise CriticalError(
                    "Psi slices assume rho_22 = rho_33; use the oracle for asymmetric states"
                )
            fixed, coord = {"d11": x.d11}, (x.d22 + x.d33) / 2
    return SliceParams(ch, mt, q, spec.p_a, spec.p_b, c_tv, **fixed), coord

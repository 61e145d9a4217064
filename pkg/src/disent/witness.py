"""Counter-intuitive pairs on the amplitude-damping Phi phase diagram.

Two kinds of pair are searched for on a family of slices (fixed rho_22,
rho_33, deadline tau, threshold C_tv), and each is confirmed with the
onset-time oracle rather than the closed forms:

* CD pair: Q1 < Q2, yet the less entangled state disentangles later.
* region pair: a CD-free state that crosses C_tv before tau (region i)
  next to a CD-tolerable state that stays above C_tv until tau (region ii).
  The first never disentangles but loses useful entanglement first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .channels import DecaySchedule
from .critical import CDPhase, SliceParams, TDPhase, critical_set, slice_state
from .density import XState, embed
from .oracle import onset_time


@dataclass(frozen=True)
class WitnessState:
    q: float
    coord: float
    state: XState
    t_cd: float | None
    t_tv: float | None

    def to_json(self) -> dict[str, Any]:
        return {"Q": self.q, "D": self.coord, "t_cd": self.t_cd, "t_tv": self.t_tv}


def _later(a: float | None, b: float | None) -> bool:
    """a > b with None meaning 'never'."""
    if a is None:
        return b is not None
    return b is not None and a > b


@dataclass(frozen=True)
class Family:
    d22: float = 0.05
    d33: float = 0.05
    tau: float = 2 / 3
    c_tv: float = 0.1
    gamma: float = 1.0

    @property
    def sched(self) -> DecaySchedule:
        return DecaySchedule(self.gamma, self.gamma)

    def slice(self, q: float) -> SliceParams:
        return SliceParams.from_schedule("amplitude", "Phi", q, self.sched, self.tau, self.c_tv,
                                         d22=self.d22, d33=self.d33)

    def measure(self, q: float, coord: float) -> WitnessState:
        x = slice_state(self.slice(q), coord)
        rho = embed(x)
        t_cd = onset_time(rho, "amplitude", self.sched, 0.0).time
        t_tv = onset_time(rho, "amplitude", self.sched, self.c_tv).time
        return WitnessState(q, coord, x, t_cd, t_tv)

    def points(self, qs, n_coord: int = 41):
        """Yield (q, coord, label) over physical points of the family."""
        for q in qs:
            try:
                cs = critical_set(self.slice(float(q)))
            except ValueError:
                continue
            for c in np.linspace(cs.phys_lo, cs.phys_hi, n_coord)[1:-1]:
                yield float(q), float(c), cs.label(float(c))


def cd_pair(fam: Family = Family(), qs=np.linspace(0.05, 0.75, 15)):
    """(low-Q state, high-Q state) with t_CD(low) > t_CD(high) >= 0, finite low."""
    tolerable = [(q, c) for q, c, lab in fam.points(qs) if lab.cd is CDPhase.TOLERABLE]
    nogo = [(q, c) for q, c, lab in fam.points(qs) if lab.cd is CDPhase.NOGO]
    for q1, c1 in tolerable:
        for q2, c2 in nogo:
            if q1 < q2:
                a, b = fam.measure(q1, c1), fam.measure(q2, c2)
                if a.t_cd is not None and _later(a.t_cd, b.t_cd):
                    return a, b
    return None


def region_pair(fam: Family = Family(), qs=np.linspace(0.05, 0.75, 29)):
    """(region i state, region ii state): later CD but earlier TD for region i.

    Only states starting well above C_tv qualify, so the threshold crossing
    is a genuine decay rather than an initial condition.
    """
    region_i = region_ii = None
    for q, c, lab in fam.points(qs):
        if q < 2 * fam.c_tv:
            continue
        if region_i is None and lab.cd is CDPhase.FREE and lab.td is TDPhase.NOGO:
            region_i = (q, c)
        if region_ii is None and lab.cd is CDPhase.TOLERABLE and lab.td is TDPhase.TOLERABLE:
            region_ii = (q, c)
    if region_i is None or region_ii is None:
        return None
    a, b = fam.measure(*region_i), fam.measure(*region_ii)
    if _later(a.t_cd, b.t_cd) and _later(b.t_tv, a.t_tv):
        return a, b
    return None

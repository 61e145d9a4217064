"""Local Kraus channels on two qubits and their closed-form X/O updates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .density import DensityMatrix4, OState, XState, make_density

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


class ChannelKind(str, Enum):
    AMPLITUDE = "amplitude"
    PHASE = "phase"
    DEPOLARIZING = "depolarizing"

    @classmethod
    def parse(cls, value: "str | ChannelKind") -> "ChannelKind":
        if isinstance(value, cls):
            return value
        aliases = {
            "amplitude": cls.AMPLITUDE, "ad": cls.AMPLITUDE, "amp": cls.AMPLITUDE,
            "phase": cls.PHASE, "pd": cls.PHASE,
            "depolarizing": cls.DEPOLARIZING, "depolarization": cls.DEPOLARIZING,
            "dp": cls.DEPOLARIZING, "depol": cls.DEPOLARIZING,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown channel kind {value!r}") from None


def _check_prob(name: str, p: float) -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


@dataclass(frozen=True)
class ChannelSpec:
    """Same channel kind on both qubits, independent strengths.

    For the depolarizing channel ``p_a``/``p_b`` are the rescaled
    probabilities (3/4 of the raw depolarizing probability).

    ``q_a``/``q_b`` default to ``1 - p``; :meth:`from_survival` sets them
    directly, which keeps full relative precision for long times.
    """

    kind: ChannelKind
    p_a: float
    p_b: float
    q_a: float = field(default=None, compare=False)  # type: ignore[assignment]
    q_b: float = field(default=None, compare=False)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind.parse(self.kind))
        object.__setattr__(self, "p_a", _check_prob("p_a", self.p_a))
        object.__setattr__(self, "p_b", _check_prob("p_b", self.p_b))
        if self.q_a is None:
            object.__setattr__(self, "q_a", 1.0 - self.p_a)
        if self.q_b is None:
            object.__setattr__(self, "q_b", 1.0 - self.p_b)

    @classmethod
    def from_survival(cls, kind, q_a: float, q_b: float) -> "ChannelSpec":
        q_a, q_b = _check_prob("q_a", q_a), _check_prob("q_b", q_b)
        return cls(kind, 1.0 - q_a, 1.0 - q_b, q_a=q_a, q_b=q_b)

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "p_a": self.p_a, "p_b": self.p_b}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "ChannelSpec":
        return cls(obj["kind"], obj["p_a"], obj["p_b"])


@dataclass(frozen=True)
class DecaySchedule:
    """Exponential single-qubit decay, p_k(t) = 1 - exp(-gamma_k t)."""

    gamma_a: float
    gamma_b: float

    def __post_init__(self):
        for name in ("gamma_a", "gamma_b"):
            g = float(getattr(self, name))
            if not (g > 0 and math.isfinite(g)):
                raise ValueError(f"{name} must be a positive finite rate, got {g}")
            object.__setattr__(self, name, g)

    def spec_at(self, kind, t: float) -> ChannelSpec:
        """Channel parameters reached at time ``t`` (rescaled for depolarization)."""
        kind = ChannelKind.parse(kind)
        if t < 0:
            raise ValueError(f"time must be non-negative, got {t}")
        sa, sb = math.exp(-self.gamma_a * t), math.exp(-self.gamma_b * t)
        if kind is ChannelKind.DEPOLARIZING:
            return ChannelSpec.from_survival(kind, 0.25 + 0.75 * sa, 0.25 + 0.75 * sb)
        return ChannelSpec.from_survival(kind, sa, sb)

    def to_json(self) -> dict[str, Any]:
        return {"gamma_a": self.gamma_a, "gamma_b": self.gamma_b}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "DecaySchedule":
        return cls(obj["gamma_a"], obj["gamma_b"])


def p_of_t(sched: DecaySchedule, t: float) -> tuple[float, float]:
    """Raw decay probabilities at time ``t``.

    Depolarizing channels need the 3/4 rescaling on top of this; use
    :meth:`DecaySchedule.spec_at` to get a ready ChannelSpec.
    """
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    return (-math.expm1(-sched.gamma_a * t), -math.expm1(-sched.gamma_b * t))


def kraus_ops(kind, p: float, q: float | None = None) -> list[np.ndarray]:
    """Single-qubit Kraus operators in the (|e>, |g>) basis."""
    kind = ChannelKind.parse(kind)
    p = _check_prob("p", p)
    q = 1.0 - p if q is None else q
    if kind is ChannelKind.AMPLITUDE:
        return [
            np.array([[math.sqrt(q), 0], [0, 1]], dtype=complex),
            np.array([[0, 0], [math.sqrt(p), 0]], dtype=complex),
        ]
    if kind is ChannelKind.PHASE:
        return [
            np.array([[1, 0], [0, math.sqrt(q)]], dtype=complex),
            np.array([[0, 0], [0, math.sqrt(p)]], dtype=complex),
        ]
    s = math.sqrt(p / 3)
    return [math.sqrt(q) * I2, s * SX, s * SY, s * SZ]


def joint_kraus(spec: ChannelSpec) -> np.ndarray:
    """All products K_m^A (x) K_n^B, stacked as an (n, 4, 4) array."""
    ka = kraus_ops(spec.kind, spec.p_a, spec.q_a)
    kb = kraus_ops(spec.kind, spec.p_b, spec.q_b)
    return np.array([np.kron(a, b) for a in ka for b in kb])


def kraus_sum(m: np.ndarray, spec: ChannelSpec) -> np.ndarray:
    """Sum_i K_i m K_i^H on a raw 4x4 array (no validation)."""
    k = joint_kraus(spec)
    return np.einsum("kij,jl,kml->im", k, m, k.conj())


def apply_joint(rho: DensityMatrix4, spec: ChannelSpec) -> DensityMatrix4:
    return make_density(kraus_sum(rho.elems, spec))


@dataclass(frozen=True)
class DepolCoeffs:
    f0: float
    f1: float
    f2: float
    f3: float
    f4: float
    f5: float
    f6: float
    f7: float
    f8: float

    def population_matrix(self) -> np.ndarray:
        f1, f2, f3, f4 = self.f1, self.f2, self.f3, self.f4
        return np.array([
            [f1, f2, f3, f4],
            [f2, f1, f4, f3],
            [f3, f4, f1, f2],
            [f4, f3, f2, f1],
        ])


def depol_coeffs(p_a: float, p_b: float, q_a: float | None = None,
                 q_b: float | None = None) -> DepolCoeffs:
    """Mixing coefficients of the two-qubit depolarizing map.

    f3 carries the 1/9 normalization; without it the populations would not
    sum to one.
    """
    q_a = 1.0 - p_a if q_a is None else q_a
    q_b = 1.0 - p_b if q_b is None else q_b
    return DepolCoeffs(
        f0=(q_a - p_a / 3) * (q_b - p_b / 3),
        f1=(1 + 2 * q_a + 2 * q_b + 4 * q_a * q_b) / 9,
        f2=(2 * p_b + 4 * q_a * p_b) / 9,
        f3=(2 * p_a + 4 * p_a * q_b) / 9,
        f4=4 * p_a * p_b / 9,
        f5=q_a * q_b - q_a * p_b / 3 + p_a * q_b / 3 - p_a * p_b / 9,
        f6=2 * p_a * q_b / 3 - 2 * p_a * p_b / 9,
        f7=q_a * q_b + q_a * p_b / 3 - p_a * q_b / 3 - p_a * p_b / 9,
        f8=2 * q_a * p_b / 3 - 2 * p_a * p_b / 9,
    )


def spec_coeffs(spec: ChannelSpec) -> DepolCoeffs:
    return depol_coeffs(spec.p_a, spec.p_b, spec.q_a, spec.q_b)


def evolve_x(x: XState, spec: ChannelSpec) -> XState:
    pa, pb, qa, qb = spec.p_a, spec.p_b, spec.q_a, spec.q_b
    r11, r22, r33, r44 = x.diag
    if spec.kind is ChannelKind.AMPLITUDE:
        s = math.sqrt(qa * qb)
        return XState(
            r11 * qa * qb,
            r11 * qa * pb + r22 * qa,
            r11 * pa * qb + r33 * qb,
            r11 * pa * pb + r22 * pa + r33 * pb + r44,
            c14=x.c14 * s,
            c23=x.c23 * s,
        )
    if spec.kind is ChannelKind.PHASE:
        s = math.sqrt(qa * qb)
        return XState(r11, r22, r33, r44, c14=x.c14 * s, c23=x.c23 * s)
    f = spec_coeffs(spec)
    d = f.population_matrix() @ np.array(x.diag)
    return XState(*d, c14=x.c14 * f.f0, c23=x.c23 * f.f0)


def evolve_o(o: OState, spec: ChannelSpec) -> OState:
    pa, pb, qa, qb = spec.p_a, spec.p_b, spec.q_a, spec.q_b
    if spec.kind is ChannelKind.AMPLITUDE:
        sa, sb = math.sqrt(qa), math.sqrt(qb)
        return OState(
            c12=qa * sb * o.c12,
            c13=qb * sa * o.c13,
            c24=sa * o.c24 + pb * sa * o.c13,
            c34=sb * o.c34 + pa * sb * o.c12,
        )
    if spec.kind is ChannelKind.PHASE:
        sa, sb = math.sqrt(qa), math.sqrt(qb)
        return OState(c12=sb * o.c12, c13=sa * o.c13, c24=sa * o.c24, c34=sb * o.c34)
    f = spec_coeffs(spec)
    return OState(
        c12=f.f5 * o.c12 + f.f6 * o.c34,
        c13=f.f7 * o.c13 + f.f8 * o.c24,
        c24=f.f8 * o.c13 + f.f7 * o.c24,
        c34=f.f6 * o.c12 + f.f5 * o.c34,
    )

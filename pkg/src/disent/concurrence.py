"""Concurrence: Wootters' general formula and the closed X-state forms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channels import ChannelKind, ChannelSpec, spec_coeffs
from .density import DensityMatrix4, XState

YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))

# eigenvalues of rho*rho_tilde below this fraction of the largest are noise
_EIG_FLOOR = 64 * np.finfo(float).eps


class ConcurrenceError(ArithmeticError):
    pass


class MatrixType(str, Enum):
    PHI = "Phi"
    PSI = "Psi"
    SEPARABLE = "Separable"


@dataclass(frozen=True)
class XDerived:
    x14: float
    x23: float
    y14: float
    y23: float


def x_derived(x: XState) -> XDerived:
    return XDerived(
        x14=math.sqrt(max(x.d11 * x.d44, 0.0)),
        x23=math.sqrt(max(x.d22 * x.d33, 0.0)),
        y14=x.d11 + x.d44,
        y23=x.d22 + x.d33,
    )


def q_phi(x: XState) -> float:
    return 2 * (abs(x.c14) - math.sqrt(max(x.d22 * x.d33, 0.0)))


def q_psi(x: XState) -> float:
    return 2 * (abs(x.c23) - math.sqrt(max(x.d11 * x.d44, 0.0)))


def concurrence_x(x: XState) -> float:
    return max(q_phi(x), q_psi(x), 0.0)


def classify(x: XState) -> MatrixType:
    qf, qs = q_phi(x), q_psi(x)
    if qf >= qs and qf > 0:
        return MatrixType.PHI
    if qs > qf and qs > 0:
        return MatrixType.PSI
    return MatrixType.SEPARABLE


def _lambdas(m: np.ndarray) -> np.ndarray:
    r = m @ YY @ m.conj() @ YY
    try:
        ev = np.linalg.eigvals(r)
    except np.linalg.LinAlgError as exc:
        raise ConcurrenceError(f"eigen-solve failed for\n{m}") from exc
    mu = np.sort(ev.real)[::-1]
    floor = _EIG_FLOOR * max(1.0, abs(mu[0]))
    if mu[-1] < -max(1e-12, floor):
        raise ConcurrenceError(f"negative eigenvalue {mu[-1]:.3e} of rho*rho_tilde for\n{m}")
    mu = np.where(np.abs(mu) <= floor, 0.0, np.maximum(mu, 0.0))
    return np.sqrt(mu)


def wootters_signed(rho: DensityMatrix4 | np.ndarray) -> float:
    """lambda_1 - lambda_2 - lambda_3 - lambda_4 before clamping at zero."""
    lam = _lambdas(np.asarray(rho, dtype=complex))
    return float(lam[0] - lam[1] - lam[2] - lam[3])


def wootters(rho: DensityMatrix4 | np.ndarray) -> float:
    """Concurrence of an arbitrary two-qubit state, clamped to [0, 1]."""
    return min(max(wootters_signed(rho), 0.0), 1.0)


def delta(x: XState, p_a: float, p_b: float) -> float:
    """Population term that grows under amplitude damping."""
    return x.d11 * (x.d11 * p_a * p_b + x.d22 * p_a + x.d33 * p_b)


def _q_t(x: XState, spec: ChannelSpec, which: str) -> float:
    qa, qb = spec.q_a, spec.q_b
    if which == "phi":
        coh, pair = abs(x.c14), x.d22 * x.d33
        idx = (1, 2)
    else:
        coh, pair = abs(x.c23), x.d11 * x.d44
        idx = (0, 3)
    if spec.kind is ChannelKind.AMPLITUDE:
        s = math.sqrt(qa * qb)
        return 2 * s * (coh - math.sqrt(max(delta(x, spec.p_a, spec.p_b) + pair, 0.0)))
    if spec.kind is ChannelKind.PHASE:
        return 2 * (coh * math.sqrt(qa * qb) - math.sqrt(max(pair, 0.0)))
    f = spec_coeffs(spec)
    d = f.population_matrix() @ np.array(x.diag)
    return 2 * (abs(coh * f.f0) - math.sqrt(max(d[idx[0]] * d[idx[1]], 0.0)))


def q_phi_t(x: XState, spec: ChannelSpec) -> float:
    """Q_Phi of the state after the channel, from the per-channel closed form."""
    return _q_t(x, spec, "phi")


def q_psi_t(x: XState, spec: ChannelSpec) -> float:
    return _q_t(x, spec, "psi")

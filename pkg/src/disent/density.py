"""Two-qubit density matrices and their X/O decomposition.

Basis order is |ee>, |eg>, |ge>, |gg> throughout; index 0 is |ee>.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-9

# (row, col) slots of the O-form entries, upper triangle only
O_SLOTS = {"c12": (0, 1), "c13": (0, 2), "c24": (1, 3), "c34": (2, 3)}


class DensityError(ValueError):
    """Base class for validation failures of a state."""


class NotHermitian(DensityError):
    pass


class TraceNotOne(DensityError):
    pass


class NotPositive(DensityError):
    pass


@dataclass(frozen=True)
class Tolerances:
    herm: float = TOL_HERM
    trace: float = TOL_TRACE
    psd: float = TOL_PSD


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True, eq=False)
class DensityMatrix4:
    """Validated 4x4 density matrix. Build through :func:`make_density`."""

    elems: np.ndarray = field(repr=False)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.elems, dtype=dtype)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DensityMatrix4):
            return NotImplemented
        return bool(np.array_equal(self.elems, other.elems))

    __hash__ = None  # type: ignore[assignment]

    @property
    def trace(self) -> float:
        return float(np.trace(self.elems).real)

    def purity(self) -> float:
        return float(np.trace(self.elems @ self.elems).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.elems)[0])

    def to_json(self) -> dict[str, Any]:
        return {"re": self.elems.real.tolist(), "im": self.elems.imag.tolist()}


def _hermitian_part(m: np.ndarray) -> np.ndarray:
    # (m + m^H)/2 is exactly Hermitian in IEEE arithmetic
    return (m + m.conj().T) / 2


def make_density(elems, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix4:
    """Validate ``elems`` and wrap it as a :class:`DensityMatrix4`.

    The stored matrix is the Hermitian part of the input, so entries that
    pass the Hermiticity check are symmetrized exactly.

    Raises
    ------
    NotHermitian, TraceNotOne, NotPositive
        With the size of the violation in the message.
    """
    m = np.array(elems, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    herm_err = float(np.max(np.abs(m - m.conj().T)))
    if herm_err > tol.herm:
        raise NotHermitian(f"max |rho_ij - conj(rho_ji)| = {herm_err:.3e} > {tol.herm:.1e}")
    h = _hermitian_part(m)
    tr_err = abs(float(np.trace(h).real) - 1.0)
    if tr_err > tol.trace:
        raise TraceNotOne(f"|trace - 1| = {tr_err:.3e} > {tol.trace:.1e}")
    lam_min = float(np.linalg.eigvalsh(h)[0])
    if lam_min < -tol.psd:
        raise NotPositive(f"min eigenvalue {lam_min:.3e} < -{tol.psd:.1e}")
    h.setflags(write=False)
    return DensityMatrix4(h)


@dataclass(frozen=True)
class XState:
    """Diagonal plus anti-diagonal part of a two-qubit state."""

    d11: float
    d22: float
    d33: float
    d44: float
    c14: complex = 0j
    c23: complex = 0j

    def __post_init__(self):
        for name in ("d11", "d22", "d33", "d44"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("c14", "c23"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        self.check()

    def check(self, tol: Tolerances = DEFAULT_TOL) -> None:
        vals = (self.d11, self.d22, self.d33, self.d44, self.c14, self.c23)
        if not all(cmath.isfinite(v) for v in vals):
            raise ValueError("XState has non-finite entries")
        d = self.diag
        if min(d) < -tol.psd:
            raise NotPositive(f"negative population {min(d):.3e}")
        tr_err = abs(sum(d) - 1.0)
        if tr_err > tol.trace:
            raise TraceNotOne(f"|trace - 1| = {tr_err:.3e}")
        v14 = abs(self.c14) ** 2 - self.d11 * self.d44
        v23 = abs(self.c23) ** 2 - self.d22 * self.d33
        if max(v14, v23) > tol.psd:
            raise NotPositive(
                f"X block positivity violated: |c14|^2-d11*d44={v14:.3e}, "
                f"|c23|^2-d22*d33={v23:.3e}"
            )

    @property
    def diag(self) -> tuple[float, float, float, float]:
        return (self.d11, self.d22, self.d33, self.d44)

    def matrix(self) -> np.ndarray:
        m = np.diag(np.array(self.diag, dtype=complex))
        m[0, 3] = self.c14
        m[3, 0] = self.c14.conjugate()
        m[1, 2] = self.c23
        m[2, 1] = self.c23.conjugate()
        return m

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {k: getattr(self, k) for k in ("d11", "d22", "d33", "d44")}
        for k in ("c14", "c23"):
            z = getattr(self, k)
            out[k] = {"re": z.real, "im": z.imag}
        return out


@dataclass(frozen=True)
class OState:
    """Upper-triangle O-form entries. Not a state on its own."""

    c12: complex = 0j
    c13: complex = 0j
    c24: complex = 0j
    c34: complex = 0j

    def __post_init__(self):
        for name in O_SLOTS:
            z = complex(getattr(self, name))
            if not cmath.isfinite(z):
                raise ValueError(f"OState.{name} is not finite")
            object.__setattr__(self, name, z)

    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        for name, (i, j) in O_SLOTS.items():
            z = getattr(self, name)
            m[i, j] = z
            m[j, i] = z.conjugate()
        return m

    def is_zero(self) -> bool:
        return all(getattr(self, k) == 0 for k in O_SLOTS)

    def max_abs(self) -> float:
        return max(abs(getattr(self, k)) for k in O_SLOTS)


def decompose(rho: DensityMatrix4) -> tuple[XState, OState]:
    m = rho.elems
    x = XState(
        m[0, 0].real, m[1, 1].real, m[2, 2].real, m[3, 3].real, c14=m[0, 3], c23=m[1, 2]
    )
    o = OState(**{k: m[i, j] for k, (i, j) in O_SLOTS.items()})
    return x, o


def recompose(x: XState, o: OState | None = None, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix4:
    m = x.matrix()
    if o is not None:
        m = m + o.matrix()
    return make_density(m, tol)


def embed(x: XState) -> DensityMatrix4:
    """X state as a full matrix (zero O part)."""
    return recompose(x, None)


def random_density(seed, rank: int = 4) -> DensityMatrix4:
    """Random state from the induced (Ginibre) measure, ``G G^H / tr``."""
    if not 1 <= rank <= 4:
        raise ValueError(f"rank must be in 1..4, got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
    m = g @ g.conj().T
    return make_density(m / np.trace(m).real)


def random_x_state(seed, kind: str = "Phi", entangled: bool = False) -> XState:
    """Random X state of the requested type, by rejection sampling.

    Populations are uniform on the simplex; each coherence gets a uniform
    phase and a modulus drawn uniformly in [0, sqrt(d_ii d_jj)].
    With ``entangled`` the dominant Q must also be positive.
    """
    if kind not in ("Phi", "Psi"):
        raise ValueError(f"kind must be 'Phi' or 'Psi', got {kind!r}")
    rng = np.random.default_rng(seed)
    while True:
        d = rng.dirichlet(np.ones(4))
        u = rng.uniform(size=2)
        ph = rng.uniform(0, 2 * math.pi, size=2)
        x14 = math.sqrt(d[0] * d[3])
        x23 = math.sqrt(d[1] * d[2])
        c14 = u[0] * x14 * cmath.exp(1j * ph[0])
        c23 = u[1] * x23 * cmath.exp(1j * ph[1])
        q_phi = 2 * (abs(c14) - x23)
        q_psi = 2 * (abs(c23) - x14)
        if kind == "Phi":
            ok = q_phi >= q_psi and (q_phi > 0 or not entangled)
        else:
            ok = q_psi > q_phi and (q_psi > 0 or not entangled)
        if ok:
            return XState(*d, c14=c14, c23=c23)


def werner_state(w: float) -> XState:
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"Werner weight must lie in [0, 1], got {w}")
    return XState((1 + w) / 4, (1 - w) / 4, (1 - w) / 4, (1 + w) / 4, c14=w / 2)


def bell_phi() -> XState:
    return XState(0.5, 0.0, 0.0, 0.5, c14=0.5)


def bell_psi() -> XState:
    return XState(0.0, 0.5, 0.5, 0.0, c23=0.5)


def maximally_mixed() -> XState:
    return XState(0.25, 0.25, 0.25, 0.25)


def _complex_from_json(v) -> complex:
    if isinstance(v, dict):
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def x_state_from_json(obj: dict[str, Any]) -> XState:
    return XState(
        obj["d11"], obj["d22"], obj["d33"], obj["d44"],
        c14=_complex_from_json(obj.get("c14", 0.0)),
        c23=_complex_from_json(obj.get("c23", 0.0)),
    )


def density_from_json(obj: dict[str, Any], tol: Tolerances = DEFAULT_TOL) -> DensityMatrix4:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    return make_density(re + 1j * im, tol)


def state_from_json(obj: dict[str, Any]) -> DensityMatrix4:
    """Read either serialized form; both are re-validated."""
    if "re" in obj:
        return density_from_json(obj)
    if "d11" in obj:
        return embed(x_state_from_json(obj))
    raise ValueError("state JSON needs either 're'/'im' arrays or X fields d11..d44")

"""Domain types and state-space geometry for the spin-dimer pseudospin.

The zero-magnetization sector of two coupled spins-1/2 is a two-level
system spanned by the product states |dn,up> and |up,dn>.  A normalized
amplitude pair (n1, n2) on that sector maps to a unit Bloch vector n via
the pseudospin operators T = (T_x, T_y, T_z).  Conventions used
throughout this package:

* ordered pseudospin basis: (|dn,up>, |up,dn>), so |up,dn> sits at the
  south pole (n_z = -1) and |dn,up> at the north pole (n_z = +1);
* T_x, T_y, T_z are the standard Pauli matrices in that basis, with
  eigenvalues +-1 and [T_x, T_y] = 2i T_z cyclically;
* mixed (noise-averaged) states live inside the unit ball and are
  written as d * n with radial purity d in [0, 1] and unit n;
* the stereographic chart is w = (n_x + i n_y) / (1 + n_z), sending the
  south pole to the point at infinity.

All states are plain numpy arrays (complex amplitudes, real 3-vectors);
configuration objects are frozen dataclasses.  Everything here is a pure
function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "T_X",
    "T_Y",
    "T_Z",
    "TAU4_X",
    "TAU4_Y",
    "TAU4_Z",
    "TWO_SPIN_BASIS",
    "STEREO_INFINITY",
    "NormalizationError",
    "ProjectionError",
    "ModelParams",
    "FieldSchedule",
    "BallState",
    "EntanglementReport",
    "spinor_to_bloch",
    "bloch_to_spinor",
    "embed_two_spin",
    "project_two_spin",
    "entanglement_measures",
    "stereo_project",
    "stereo_unproject",
    "is_point_at_infinity",
    "south_pole",
    "north_pole",
]

# Pseudospin matrices in the ordered basis (|dn,up>, |up,dn>).
T_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
T_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
T_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Full two-spin basis order used for 4-amplitude states.
TWO_SPIN_BASIS = ("up,up", "up,dn", "dn,up", "dn,dn")

# Canonical stereographic image of the south pole.
STEREO_INFINITY = complex(math.inf, math.inf)

_NORM_ATOL = 1e-9


def _tau4() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pseudospin operators embedded in the 4-dimensional two-spin space.

    Built by placing T_k on the (|dn,up>, |up,dn>) block; T_z coincides
    with (sigma2_z - sigma1_z)/2 while T_y carries the sign required for
    su(2) closure with T_z = diag(+1, -1).
    """
    ops = []
    for block in (T_X, T_Y, T_Z):
        m = np.zeros((4, 4), dtype=complex)
        # basis indices: |dn,up> = 2, |up,dn> = 1
        idx = (2, 1)
        for a in range(2):
            for b in range(2):
                m[idx[a], idx[b]] = block[a, b]
        ops.append(m)
    return ops[0], ops[1], ops[2]


TAU4_X, TAU4_Y, TAU4_Z = _tau4()


class NormalizationError(ValueError):
    """Raised when a state that must be normalized is not."""


class ProjectionError(ValueError):
    """Raised when a two-spin state has no zero-magnetization content."""


@dataclass(frozen=True)
class ModelParams:
    """Dimer coupling J, dephasing rate gamma, and bias strengths.

    All rates are in units of inverse time; J sets the time scale
    (1/J is the natural time unit for every data product).
    """

    J: float = 1.0
    gamma: float = 0.0
    s1: float = 0.0
    s2: float = 0.0

    def __post_init__(self) -> None:
        if not self.J > 0:
            raise ValueError(f"coupling J must be positive, got {self.J}")
        for name in ("gamma", "s1", "s2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")


@dataclass(frozen=True)
class FieldSchedule:
    """Staggered-field protocol h(t) on [0, T].

    kinds:
      constant    -- h(t) = h0 for all t
      linear_ramp -- straight line from h0 to h1 over [0, T]
      tanh_ramp   -- smooth ramp hitting h0 and h1 exactly at the ends,
                     steepness fixed so most of the change happens in the
                     middle half of the protocol

    Evaluation clamps t to [0, T], so schedules are safe to query
    slightly outside the protocol window.
    """

    kind: str = "constant"
    h0: float = 0.0
    h1: float = 0.0
    T: float = 1.0

    _KINDS = ("constant", "linear_ramp", "tanh_ramp")
    _TANH_STEEPNESS = 3.0

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}; expected one of {self._KINDS}")
        if self.kind != "constant" and not self.T > 0:
            raise ValueError(f"ramp horizon T must be positive, got {self.T}")

    def __call__(self, t):
        if self.kind == "constant":
            return self.h0 + 0.0 * np.asarray(t)
        x = np.clip(np.asarray(t, dtype=float) / self.T, 0.0, 1.0)
        if self.kind == "linear_ramp":
            return self.h0 + (self.h1 - self.h0) * x
        a = self._TANH_STEEPNESS
        ramp = np.tanh(a * (2.0 * x - 1.0)) / math.tanh(a)
        return 0.5 * (self.h0 + self.h1) + 0.5 * (self.h1 - self.h0) * ramp


@dataclass(frozen=True)
class BallState:
    """Interior Bloch-ball state: unit direction n and radial purity d.

    The averaged vector is nbar = d * n, so d = 1 is a pure state and
    d = 0 the fully mixed state.
    """

    d: float
    n: np.ndarray

    def __post_init__(self) -> None:
        if not 0.0 <= self.d <= 1.0 + 1e-12:
            raise ValueError(f"radial coordinate d must lie in [0, 1], got {self.d}")
        n = np.asarray(self.n, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > _NORM_ATOL:
            raise NormalizationError(f"direction must be a unit vector, |n| = {np.linalg.norm(n)}")
        object.__setattr__(self, "n", n)

    @property
    def nbar(self) -> np.ndarray:
        return self.d * self.n

    @staticmethod
    def from_nbar(nbar: np.ndarray) -> "BallState":
        nbar = np.asarray(nbar, dtype=float)
        d = float(np.linalg.norm(nbar))
        if d > 1.0 + _NORM_ATOL:
            raise ValueError(f"averaged vector must lie inside the unit ball, |nbar| = {d}")
        if d == 0.0:
            raise ValueError("fully mixed state has no direction; split is undefined at d = 0")
        return BallState(d=min(d, 1.0), n=nbar / d)


@dataclass(frozen=True)
class EntanglementReport:
    """Entanglement summary of a pure pseudospin state at Bloch vector n.

    schmidt_gap  -- lambda1^2 - lambda2^2 = n_z across the dimer cut
    concurrence  -- 4 lambda1^2 lambda2^2 = 1 - n_z^2
    lambda1/2    -- Schmidt coefficients in basis order (not sorted)
    """

    schmidt_gap: float
    concurrence: float
    lambda1: float
    lambda2: float


def south_pole() -> np.ndarray:
    """Bloch vector of |up,dn>."""
    return np.array([0.0, 0.0, -1.0])


def north_pole() -> np.ndarray:
    """Bloch vector of |dn,up>."""
    return np.array([0.0, 0.0, 1.0])


def _check_unit3(n: np.ndarray, what: str = "Bloch vector") -> np.ndarray:
    n = np.asarray(n, dtype=float)
    if n.shape != (3,):
        raise ValueError(f"{what} must be a 3-vector, got shape {n.shape}")
    if abs(np.linalg.norm(n) - 1.0) > _NORM_ATOL:
        raise NormalizationError(f"{what} must be unit length, |n| = {np.linalg.norm(n)!r}")
    return n


def spinor_to_bloch(psi: np.ndarray) -> np.ndarray:
    """Pseudospin expectation vector <T> of a normalized amplitude pair."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2,):
        raise ValueError(f"pseudospin state must have 2 amplitudes, got shape {psi.shape}")
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > _NORM_ATOL:
        raise NormalizationError(f"pseudospin state must be normalized, |psi|^2 = {norm2}")
    a, b = psi
    cross = np.conj(a) * b
    return np.array([2.0 * cross.real, 2.0 * cross.imag, abs(a) ** 2 - abs(b) ** 2])


def bloch_to_spinor(n: np.ndarray) -> np.ndarray:
    """Amplitude pair on the Bloch vector n, gauge-fixed to n1 real >= 0.

    Branches on the hemisphere so that the half-angle square roots never
    cancel; tiny transverse components survive the round trip even at
    the poles.
    """
    n = _check_unit3(n)
    if n[2] >= 0.0:
        a = math.sqrt((1.0 + n[2]) / 2.0)
        b = (n[0] + 1j * n[1]) / (2.0 * a)
        return np.array([a, b])
    babs = math.sqrt((1.0 - n[2]) / 2.0)
    a = (n[0] - 1j * n[1]) / (2.0 * babs)
    phase = np.exp(-1j * np.angle(a)) if a != 0 else 1.0
    return np.array([abs(a), babs * phase])


def embed_two_spin(psi: np.ndarray) -> np.ndarray:
    """Lift a pseudospin pair into the 4-amplitude two-spin space."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2,):
        raise ValueError(f"pseudospin state must have 2 amplitudes, got shape {psi.shape}")
    out = np.zeros(4, dtype=complex)
    out[2] = psi[0]  # |dn,up>
    out[1] = psi[1]  # |up,dn>
    return out


def project_two_spin(Psi: np.ndarray) -> tuple[np.ndarray, float]:
    """Split a two-spin state into its zero-magnetization part and residual.

    Returns the normalized in-sector amplitude pair and the probability
    weight outside the sector.  A state with essentially no sector
    content (residual > 1 - 1e-12) cannot be projected and raises
    ProjectionError.
    """
    Psi = np.asarray(Psi, dtype=complex)
    if Psi.shape != (4,):
        raise ValueError(f"two-spin state must have 4 amplitudes, got shape {Psi.shape}")
    total = float(np.vdot(Psi, Psi).real)
    if total == 0.0:
        raise ProjectionError("cannot project the zero vector")
    inside = np.array([Psi[2], Psi[1]])
    weight = float(np.vdot(inside, inside).real) / total
    residual = 1.0 - weight
    if residual > 1.0 - 1e-12:
        raise ProjectionError(
            f"state has no zero-magnetization content (residual = {residual})"
        )
    return inside / math.sqrt(weight * total), residual


def entanglement_measures(n: np.ndarray) -> EntanglementReport:
    """Schmidt data of the pure dimer state at Bloch vector n.

    The dimer cut has Schmidt coefficients (lambda1, lambda2) =
    (sqrt((1+n_z)/2), sqrt((1-n_z)/2)); their squared difference is n_z
    and the concurrence is 1 - n_z^2.
    """
    n = _check_unit3(n)
    nz = min(1.0, max(-1.0, float(n[2])))
    lam1 = math.sqrt((1.0 + nz) / 2.0)
    lam2 = math.sqrt((1.0 - nz) / 2.0)
    return EntanglementReport(
        schmidt_gap=nz,
        concurrence=1.0 - nz * nz,
        lambda1=lam1,
        lambda2=lam2,
    )


def is_point_at_infinity(w: complex) -> bool:
    return not (math.isfinite(w.real) and math.isfinite(w.imag))


def stereo_project(n: np.ndarray) -> complex:
    """Stereographic chart w = (n_x + i n_y) / (1 + n_z); south pole -> infinity."""
    n = _check_unit3(n)
    denom = 1.0 + n[2]
    if denom <= 0.0:
        return STEREO_INFINITY
    return complex(n[0] / denom, n[1] / denom)


def stereo_unproject(w: complex) -> np.ndarray:
    """Inverse stereographic chart; the point at infinity maps to the south pole."""
    w = complex(w)
    if is_point_at_infinity(w):
        return south_pole()
    r2 = w.real * w.real + w.imag * w.imag
    return np.array([2.0 * w.real, 2.0 * w.imag, 1.0 - r2]) / (1.0 + r2)

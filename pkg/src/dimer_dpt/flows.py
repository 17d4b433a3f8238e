"""Right-hand-side vector fields for every dynamical regime of the dimer.

This module is the one place where the equations of motion are written
down; integrators, oracles and analysis all consume these functions.
With x = (1,0,0) and z = (0,0,1):

unitary      ndot  = [J x + h z] x n                              (sphere)
noisy        ndot  = [J x + (h + eta) z] x n,   <eta eta'> = 2 gamma delta
             (Stratonovich; drift/diffusion split via sde_terms)
averaged     nbdot = J x x nb - gamma z x (nb x z)                (ball)
angular      ndot  = J x x n + gamma n_z (z - n_z n)              (sphere)
radial       ddot  = -gamma d (1 - n_z^2)
biased       linear:   ndot = J x x n + s1 (n_z n - z)
             variance: ndot = J x x n + s2 n_z (z - n_z n)

The angular/radial pair is the exact polar split of the averaged flow
(nb = d n), and the variance-biased flow coincides with the angular flow
under s2 -> gamma.  The noise intensity 2*gamma is fixed so that the
Stratonovich-to-Ito correction of the noisy flow reproduces the averaged
flow identically.

All sphere fields are tangent (f . n = 0 analytically).  A few
historical non-tangent variants of the angular, radial and linear-biased
forms are kept behind ``as_printed=True``; they are not used by any
dynamics and exist only so the calibration report can document how far
they deviate from the canonical tangent forms.

Every function broadcasts over leading axes: n may be shape (3,) or
(..., 3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ModelParams

__all__ = [
    "NoiseSpec",
    "BiasSpec",
    "unitary_field",
    "lindblad_field",
    "angular_field",
    "radial_rate",
    "biased_field",
    "sde_terms",
]

_Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class NoiseSpec:
    """White dephasing field along z.

    variance_rate is the intensity of the effective staggered noise,
    <eta(t) eta(t')> = variance_rate * delta(t - t'); building it from
    ModelParams fixes variance_rate = 2 * gamma, which is exactly the
    calibration that makes the noise average reproduce the damped ball
    flow.  master_seed roots every derived random stream.
    """

    variance_rate: float
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.variance_rate < 0:
            raise ValueError(f"variance_rate must be non-negative, got {self.variance_rate}")

    @staticmethod
    def from_params(params: ModelParams, master_seed: int = 0) -> "NoiseSpec":
        return NoiseSpec(variance_rate=2.0 * params.gamma, master_seed=master_seed)

    @property
    def amplitude(self) -> float:
        """Stratonovich diffusion amplitude sqrt(variance_rate)."""
        return float(np.sqrt(self.variance_rate))


@dataclass(frozen=True)
class BiasSpec:
    """Trajectory-ensemble bias: kind 'linear' (weights n_z) or
    'variance' (weights the concurrence 1 - n_z^2), strength s >= 0."""

    kind: str
    s: float

    _KINDS = ("linear", "variance")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown bias kind {self.kind!r}; expected one of {self._KINDS}")
        if self.s < 0:
            raise ValueError(f"bias strength must be non-negative, got {self.s}")


def _cross_x(n: np.ndarray) -> np.ndarray:
    """x_hat cross n, broadcasting over leading axes."""
    out = np.empty_like(n)
    out[..., 0] = 0.0
    out[..., 1] = -n[..., 2]
    out[..., 2] = n[..., 1]
    return out


def _cross_z(n: np.ndarray) -> np.ndarray:
    """z_hat cross n, broadcasting over leading axes."""
    out = np.empty_like(n)
    out[..., 0] = -n[..., 1]
    out[..., 1] = n[..., 0]
    out[..., 2] = 0.0
    return out


def unitary_field(n: np.ndarray, J: float, h: float = 0.0) -> np.ndarray:
    """Coherent precession [J x + h z] x n."""
    n = np.asarray(n, dtype=float)
    out = _cross_x(n) * J
    if h != 0.0:
        out += h * _cross_z(n)
    return out


def lindblad_field(nbar: np.ndarray, J: float, gamma: float) -> np.ndarray:
    """Noise-averaged ball flow: precession plus transverse damping.

    The damping term -gamma z x (nbar x z) = -gamma (nbar_x, nbar_y, 0)
    contracts the transverse components, so d|nbar|^2/dt =
    -2 gamma (nbar_x^2 + nbar_y^2) <= 0 and the ball is invariant.
    """
    nbar = np.asarray(nbar, dtype=float)
    out = _cross_x(nbar) * J
    out[..., 0] -= gamma * nbar[..., 0]
    out[..., 1] -= gamma * nbar[..., 1]
    return out


def angular_field(
    n: np.ndarray, J: float, gamma: float, as_printed: bool = False
) -> np.ndarray:
    """Angular part of the averaged flow on the unit sphere.

    Canonical tangent form J x x n + gamma n_z (z - n_z n); this is the
    projective dynamics of the averaged (linear) ball flow restricted to
    directions, and also describes the variance-biased pure-state
    evolution with gamma playing the role of the bias strength.

    as_printed selects the non-tangent variant
    -gamma n_z n x (z x n) (documentation only, see module docstring).
    """
    n = np.asarray(n, dtype=float)
    nz = n[..., 2:3]
    out = _cross_x(n) * J
    sign = -1.0 if as_printed else 1.0
    out += sign * gamma * nz * (_Z - nz * n)
    return out


def radial_rate(
    n_z: float | np.ndarray,
    d: float | np.ndarray,
    gamma: float,
    as_printed: bool = False,
) -> float | np.ndarray:
    """Radial purity decay ddot = -gamma d (1 - n_z^2).

    Zero exactly at the poles and at the fully mixed center; this is the
    unique radial law for which d(t) n(t) reproduces the averaged ball
    flow.  The as_printed variant drops the factor of d (documentation
    only).
    """
    n_z = np.asarray(n_z, dtype=float)
    shrink = -gamma * (1.0 - n_z**2)
    if as_printed:
        return shrink + 0.0 * np.asarray(d, dtype=float)
    return np.asarray(d, dtype=float) * shrink


def biased_field(
    n: np.ndarray, J: float, bias: BiasSpec, as_printed: bool = False
) -> np.ndarray:
    """Deterministic flow of the normalized bias-weighted pure state.

    linear   : J x x n + s (n_z n - z)
    variance : J x x n + s n_z (z - n_z n)   (identical to angular_field
               with gamma -> s)

    Both follow from weighting trajectories by the accumulated n_z
    (linear) or concurrence (variance) and renormalizing; the generator
    coefficient that realizes them in the two-level evolution is
    kappa = s/2 resp. s/4 (see oracle.calibrate).

    as_printed selects the non-tangent linear variant
    -s n_z z x (z x n) (documentation only).
    """
    n = np.asarray(n, dtype=float)
    if bias.kind == "variance":
        return angular_field(n, J, bias.s, as_printed=as_printed)
    nz = n[..., 2:3]
    out = _cross_x(n) * J
    if as_printed:
        # -s n_z z x (z x n) = -s n_z (n - n_z z)
        out -= bias.s * nz * (n - nz * _Z)
    else:
        out += bias.s * (nz * n - _Z)
    return out


def sde_terms(
    n: np.ndarray, J: float, h: float, noise: NoiseSpec
) -> tuple[np.ndarray, np.ndarray, float]:
    """Stratonovich drift, diffusion direction, and amplitude of the noisy flow.

    dn = [J x + h z] x n dt + amplitude * (z x n) o dW, with amplitude
    sqrt(variance_rate).  Poles are noise-insensitive (z x n = 0 there).
    """
    n = np.asarray(n, dtype=float)
    return unitary_field(n, J, h), _cross_z(n), noise.amplitude

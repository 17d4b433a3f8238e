"""Phase-structure extraction for the dimer flows.

Covers the spectral analysis of the averaged (linear) ball flow, the
fixed-point skeleton of the sphere flows with tangent-plane stability
classification, the pole-to-pole connectivity test, flow-field sampling
for plots, and the dynamical free energy of biased trajectory
ensembles,

    phi(s) = -s * <O>_infinity,

estimated from the long-time window average of the bias observable
(n_z for the linear bias, 1 - n_z^2 for the variance bias) along the
canonical biased flow started just off the south pole.

The free-energy estimator integrates millions of small steps per sweep,
so its inner loop is a compiled (numba) embedded Runge-Kutta stepper
specialized to the biased fields; it is cross-checked against the
generic integrator in the test suite.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import south_pole, stereo_project
from .flows import BiasSpec
from .integrate import IntegratorConfig, integrate_ode

try:  # pragma: no cover - exercised implicitly everywhere
    from numba import njit

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


__all__ = [
    "SpectrumRecord",
    "FixedPointRecord",
    "FreeEnergyPoint",
    "FreeEnergyCurve",
    "TransitionPoint",
    "linear_spectrum",
    "find_fixed_points",
    "classify_fixed_point",
    "classify_fixed_point_3d",
    "disconnection_test",
    "free_energy",
    "phi_sweep",
    "flow_field_grid",
]


# --------------------------------------------------------------------------
# spectral transition of the averaged flow


@dataclass(frozen=True)
class SpectrumRecord:
    """Eigenvalues of the linear generator of the averaged ball flow."""

    J: float
    gamma: float
    eigenvalues: tuple[complex, complex, complex]
    regime: str  # underdamped | critical | overdamped


def linear_generator(J: float, gamma: float) -> np.ndarray:
    """Matrix A with nbar' = A nbar for the averaged flow."""
    return np.array([[-gamma, 0.0, 0.0], [0.0, -gamma, -J], [0.0, J, 0.0]])


def linear_spectrum(J: float, gamma: float) -> SpectrumRecord:
    """Closed-form spectrum {-gamma, (-gamma +- sqrt(gamma^2 - 4 J^2))/2}.

    The transverse pair collides at gamma = 2 J, separating underdamped
    (complex pair) from overdamped (two real rates) relaxation toward
    the origin.
    """
    if not J > 0:
        raise ValueError("J must be positive")
    disc = complex(gamma * gamma - 4.0 * J * J)
    root = np.sqrt(disc)
    eigs = (complex(-gamma), (-gamma + root) / 2.0, (-gamma - root) / 2.0)
    tol = 1e-12 * max(J, gamma)
    if abs(gamma - 2.0 * J) <= tol:
        regime = "critical"
    elif gamma < 2.0 * J:
        regime = "underdamped"
    else:
        regime = "overdamped"
    return SpectrumRecord(J=J, gamma=gamma, eigenvalues=eigs, regime=regime)


# --------------------------------------------------------------------------
# fixed points of sphere flows


@dataclass(frozen=True)
class FixedPointRecord:
    """A located fixed point of a sphere flow with its stability data."""

    location: np.ndarray
    w: complex
    classification: str  # repeller | attractor | saddle | center
    eigenvalues: tuple[complex, complex]
    residual: float


def _tangent_basis(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two orthonormal directions spanning the tangent plane at n."""
    ref = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(n, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2


def _tangent_jacobian(field, n_star: np.ndarray, eps: float) -> np.ndarray:
    """Central-difference Jacobian restricted to the tangent plane.

    Displacements are renormalized back onto the sphere before
    evaluating the field, so the derivative follows the on-manifold
    variation.
    """
    e1, e2 = _tangent_basis(n_star)
    jac = np.empty((2, 2))
    for j, e in enumerate((e1, e2)):
        plus = n_star + eps * e
        plus /= np.linalg.norm(plus)
        minus = n_star - eps * e
        minus /= np.linalg.norm(minus)
        df = (field(plus) - field(minus)) / (2.0 * eps)
        jac[0, j] = e1 @ df
        jac[1, j] = e2 @ df
    return jac


def _eig2(jac: np.ndarray) -> tuple[complex, complex]:
    tr = jac[0, 0] + jac[1, 1]
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    disc = complex(tr * tr - 4.0 * det)
    root = np.sqrt(disc)
    pair = ((tr + root) / 2.0, (tr - root) / 2.0)
    return tuple(sorted(pair, key=lambda z: (-z.real, -z.imag)))


def classify_fixed_point(
    field,
    n_star: np.ndarray,
    eps: float = 1e-5,
    eps_check: float = 1e-6,
    zero_tol: float = 1e-10,
) -> tuple[str, tuple[complex, complex], bool]:
    """Stability of a sphere-flow fixed point from its tangent Jacobian.

    Uses central differences at step eps, cross-validated at eps_check
    (eigenvalues must agree within 1e-4; the returned flag is False when
    they do not).  Real parts within +-zero_tol of zero classify as
    'center'; otherwise both-positive / both-negative / mixed real
    parts give repeller / attractor / saddle.
    """
    n_star = np.asarray(n_star, dtype=float)
    res = float(np.linalg.norm(field(n_star)))
    if res > 1e-8:
        raise ValueError(f"not a fixed point: |f(n*)| = {res:.3e}")
    eigs = _eig2(_tangent_jacobian(field, n_star, eps))
    check = _eig2(_tangent_jacobian(field, n_star, eps_check))
    stable_fd = all(abs(a - b) <= 1e-4 for a, b in zip(eigs, check))
    re = [z.real for z in eigs]
    if all(abs(r) <= zero_tol for r in re):
        cls = "center"
    elif all(r > zero_tol for r in re):
        cls = "repeller"
    elif all(r < -zero_tol for r in re):
        cls = "attractor"
    else:
        cls = "saddle"
    return cls, eigs, stable_fd


def classify_fixed_point_3d(field, x_star: np.ndarray, eps: float = 1e-6):
    """Full 3x3 Jacobian eigenvalues for interior (ball-flow) fixed points."""
    x_star = np.asarray(x_star, dtype=float)
    jac = np.empty((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = eps
        jac[:, j] = (field(x_star + e) - field(x_star - e)) / (2.0 * eps)
    eigs = np.linalg.eigvals(jac)
    if np.all(eigs.real < 0):
        cls = "attractor"
    elif np.all(eigs.real > 0):
        cls = "repeller"
    else:
        cls = "saddle"
    return cls, tuple(sorted(eigs, key=lambda z: (-z.real, -z.imag)))


def _chart_velocity(field, w: np.ndarray, south: bool) -> np.ndarray:
    """Velocity of the flow pushed to a stereographic chart.

    south=False uses w = (n_x + i n_y)/(1 + n_z) (south pole at
    infinity); south=True uses the opposite chart v = (n_x - i n_y)/
    (1 - n_z) covering the south pole.
    """
    r2 = w.real**2 + w.imag**2
    denom = 1.0 + r2
    if not south:
        n = np.stack([2.0 * w.real, 2.0 * w.imag, 1.0 - r2], axis=-1) / denom[..., None]
    else:
        n = np.stack([2.0 * w.real, -2.0 * w.imag, r2 - 1.0], axis=-1) / denom[..., None]
    f = field(n)
    if not south:
        scale = 1.0 + n[..., 2]
        return (f[..., 0] + 1j * f[..., 1]) / scale - w * f[..., 2] / scale
    scale = 1.0 - n[..., 2]
    return (f[..., 0] - 1j * f[..., 1]) / scale + w * f[..., 2] / scale


def _newton_chart(field, seeds: np.ndarray, south: bool, max_iter: int = 80) -> np.ndarray:
    """Vectorized damped Newton iteration in one stereographic chart."""
    w = seeds.astype(complex).copy()
    active = np.ones(w.shape, dtype=bool)
    fw = _chart_velocity(field, w, south)
    for _ in range(max_iter):
        speed = np.abs(fw)
        active &= np.isfinite(speed) & (np.abs(w) < 1e6)
        active &= speed > 1e-14
        if not active.any():
            break
        eps = 1e-7 * np.maximum(1.0, np.abs(w))
        d_re = (_chart_velocity(field, w + eps, south) - _chart_velocity(field, w - eps, south)) / (
            2.0 * eps
        )
        d_im = (
            _chart_velocity(field, w + 1j * eps, south)
            - _chart_velocity(field, w - 1j * eps, south)
        ) / (2.0 * eps)
        # real 2x2 system for (d Re w, d Im w)
        a, b = d_re.real, d_im.real
        c, d = d_re.imag, d_im.imag
        det = a * d - b * c
        bad = np.abs(det) < 1e-300
        det = np.where(bad, 1.0, det)
        rhs_re, rhs_im = -fw.real, -fw.imag
        dx = (rhs_re * d - rhs_im * b) / det
        dy = (rhs_im * a - rhs_re * c) / det
        step = dx + 1j * dy
        step = np.where(bad | ~active, 0.0, step)
        # damped update: halve until the residual does not grow
        w_new = w + step
        f_new = _chart_velocity(field, w_new, south)
        for _ in range(8):
            worse = active & (np.abs(f_new) > np.abs(fw)) & (np.abs(step) > 1e-15)
            if not worse.any():
                break
            step = np.where(worse, step / 2.0, step)
            w_new = w + step
            f_new = _chart_velocity(field, w_new, south)
        w = np.where(active, w_new, w)
        fw = np.where(active, f_new, fw)
    converged = np.abs(fw) <= 1e-12
    return w[converged & np.isfinite(w)]


def find_fixed_points(
    field,
    seed_grid: int = 24,
    extent: float = 2.4,
    dedupe_tol: float = 1e-6,
    residual_tol: float = 1e-8,
) -> list[FixedPointRecord]:
    """Locate and classify all fixed points of a sphere-tangent flow.

    Newton iteration runs in both stereographic charts from a
    seed_grid x seed_grid lattice over [-extent, extent]^2, roots are
    mapped back to the sphere, verified against residual_tol, and
    deduplicated at 3-space distance dedupe_tol.  Records are returned
    in a deterministic order (sorted by n_z, n_y, n_x).

    Roots that fail the residual check are dropped rather than patched;
    if Newton finds nothing, the returned list is simply empty.
    """
    axis = np.linspace(-extent, extent, seed_grid)
    re, im = np.meshgrid(axis, axis)
    seeds = (re + 1j * im).ravel()

    roots: list[np.ndarray] = []
    for south in (False, True):
        ws = _newton_chart(field, seeds, south)
        for w in ws:
            r2 = w.real**2 + w.imag**2
            if not south:
                n = np.array([2.0 * w.real, 2.0 * w.imag, 1.0 - r2]) / (1.0 + r2)
            else:
                n = np.array([2.0 * w.real, -2.0 * w.imag, r2 - 1.0]) / (1.0 + r2)
            n /= np.linalg.norm(n)
            if float(np.linalg.norm(field(n))) <= residual_tol:
                roots.append(n)

    roots.sort(key=lambda n: (round(n[2], 9), round(n[1], 9), round(n[0], 9)))
    unique: list[np.ndarray] = []
    for n in roots:
        if all(np.linalg.norm(n - u) > dedupe_tol for u in unique):
            unique.append(n)

    records = []
    for n in unique:
        cls, eigs, _ = classify_fixed_point(field, n)
        records.append(
            FixedPointRecord(
                location=n,
                w=stereo_project(n),
                classification=cls,
                eigenvalues=eigs,
                residual=float(np.linalg.norm(field(n))),
            )
        )
    return records


# --------------------------------------------------------------------------
# pole-to-pole connectivity


def displaced_south_pole(delta: float = 1e-6) -> np.ndarray:
    """South pole nudged along +y; the pole itself is a measure-zero
    start for the biased flows, so every trajectory-based estimate uses
    this fixed displaced state."""
    n = south_pole()
    n[1] = delta
    return n / np.linalg.norm(n)


def disconnection_test(
    field,
    horizon: float,
    threshold: float = 0.5,
    cfg: IntegratorConfig | None = None,
) -> tuple[str, float]:
    """Classify whether the flow carries the south pole into the north region.

    Integrates from the displaced south pole and reports 'connected'
    when n_z exceeds threshold within the horizon, else 'disconnected';
    also returns the maximum n_z reached.  Any positive threshold
    separates the two phases; 0.5 is robust against transients.
    """
    if cfg is None:
        cfg = IntegratorConfig(rel_tol=1e-9, abs_tol=1e-12, dt_max=0.25)
    traj = integrate_ode(
        lambda t, n: field(n),
        displaced_south_pole(),
        (0.0, horizon),
        cfg,
        stop_when=lambda t, y: y[2] > threshold,
    )
    max_nz = float(np.max(traj.states[:, 2]))
    return ("connected" if max_nz > threshold else "disconnected"), max_nz


# --------------------------------------------------------------------------
# dynamical free energy


@dataclass(frozen=True)
class FreeEnergyPoint:
    """phi estimate at one bias strength with estimator metadata."""

    s: float
    phi: float
    converged: bool
    burn_in: float
    window: tuple[float, float]


@dataclass(frozen=True)
class TransitionPoint:
    s: float
    kind: str  # kink | jump
    strength: float  # detector statistic over its threshold


@dataclass
class FreeEnergyCurve:
    bias_kind: str
    J: float
    s_grid: np.ndarray
    phi: np.ndarray
    converged: np.ndarray
    points: list[FreeEnergyPoint] = field(default_factory=list)
    transitions: list[TransitionPoint] = field(default_factory=list)


# Compiled embedded RK stepper for the augmented biased system
# y = (n_x, n_y, n_z, int <O> dt).  kind_code: 0 linear, 1 variance.


@njit(cache=True)
def _biased_rhs(kind_code: int, J: float, s: float, y: np.ndarray) -> np.ndarray:
    nx, ny, nz = y[0], y[1], y[2]
    out = np.empty(4)
    out[0] = 0.0
    out[1] = -J * nz
    out[2] = J * ny
    if kind_code == 0:
        out[0] += s * nz * nx
        out[1] += s * nz * ny
        out[2] += s * (nz * nz - 1.0)
        out[3] = nz
    else:
        out[0] += -s * nz * nz * nx
        out[1] += -s * nz * nz * ny
        out[2] += s * nz * (1.0 - nz * nz)
        out[3] = 1.0 - nz * nz
    return out


@njit(cache=True)
def _phi_segment(
    kind_code: int,
    J: float,
    s: float,
    y: np.ndarray,
    t0: float,
    t1: float,
    rel_tol: float,
    abs_tol: float,
    dt_init: float,
    dt_max: float,
    max_steps: int,
):
    """Integrate the augmented biased system over [t0, t1].

    Same Dormand-Prince 5(4) pair and error control as the generic
    integrator, with the unit-sphere projection applied to the first
    three components after every accepted step.  Returns the final
    state, a suggested next step, and a success flag.
    """
    c2, c3, c4, c5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
    a21 = 1.0 / 5.0
    a31, a32 = 3.0 / 40.0, 9.0 / 40.0
    a41, a42, a43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
    a51, a52, a53, a54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
    a61, a62, a63, a64, a65 = (
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    )
    b1, b3, b4, b5, b6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
    e1, e3, e4, e5, e6, e7 = (
        35.0 / 384.0 - 5179.0 / 57600.0,
        500.0 / 1113.0 - 7571.0 / 16695.0,
        125.0 / 192.0 - 393.0 / 640.0,
        -2187.0 / 6784.0 + 92097.0 / 339200.0,
        11.0 / 84.0 - 187.0 / 2100.0,
        -1.0 / 40.0,
    )

    t = t0
    dt = min(dt_init, dt_max, t1 - t0)
    y = y.copy()
    steps = 0
    while t < t1:
        if steps >= max_steps or dt < 1e-14 * max(1.0, abs(t)):
            return y, dt, False
        if t + dt > t1:
            dt = t1 - t
        k1 = _biased_rhs(kind_code, J, s, y)
        k2 = _biased_rhs(kind_code, J, s, y + dt * a21 * k1)
        k3 = _biased_rhs(kind_code, J, s, y + dt * (a31 * k1 + a32 * k2))
        k4 = _biased_rhs(kind_code, J, s, y + dt * (a41 * k1 + a42 * k2 + a43 * k3))
        k5 = _biased_rhs(kind_code, J, s, y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4))
        k6 = _biased_rhs(
            kind_code, J, s, y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)
        )
        y5 = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6)
        k7 = _biased_rhs(kind_code, J, s, y5)
        err = 0.0
        for i in range(4):
            ev = dt * (
                e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]
            )
            sc = abs_tol + rel_tol * max(abs(y[i]), abs(y5[i]))
            err += (ev / sc) ** 2
        err = math.sqrt(err / 4.0)
        steps += 1
        if err <= 1.0:
            t += dt
            r = math.sqrt(y5[0] * y5[0] + y5[1] * y5[1] + y5[2] * y5[2])
            y5[0] /= r
            y5[1] /= r
            y5[2] /= r
            y = y5
            fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
        else:
            fac = max(0.2, 0.9 * err ** -0.2)
        dt = min(dt * min(5.0, max(0.2, fac)), dt_max)
    return y, dt, True


_KIND_CODE = {"linear": 0, "variance": 1}


def free_energy(
    bias: BiasSpec,
    J: float,
    t_first: float = 32.0,
    horizon: float = 1e4,
    agree_tol: float = 1e-3,
    rel_tol: float = 1e-7,
    abs_tol: float = 1e-10,
) -> FreeEnergyPoint:
    """Estimate phi(s) = -s <O>_infinity from the biased flow.

    The estimator averages the bias observable over the window
    [t/2, t], doubling t (the window is exactly the latest doubling
    segment) until two successive estimates agree within agree_tol or
    the horizon (in units of 1/J) is reached, in which case the point
    is flagged unconverged and the last estimate returned.
    """
    s = bias.s
    if s == 0.0:
        return FreeEnergyPoint(s=0.0, phi=0.0, converged=True, burn_in=0.0, window=(0.0, 0.0))
    kind_code = _KIND_CODE[bias.kind]
    n0 = displaced_south_pole()
    y = np.array([n0[0], n0[1], n0[2], 0.0])
    t_prev = 0.0
    t = t_first / J
    est_prev: float | None = None
    est = 0.0
    dt = 1e-3
    while True:
        y_new, dt, ok = _phi_segment(
            kind_code, J, s, y, t_prev, t, rel_tol, abs_tol, dt, 0.5 / J, 50_000_000
        )
        seg_avg = (y_new[3] - y[3]) / (t - t_prev)
        est = -s * seg_avg
        if not ok:
            return FreeEnergyPoint(
                s=s, phi=est, converged=False, burn_in=t_prev, window=(t_prev, t)
            )
        if est_prev is not None and abs(est - est_prev) <= agree_tol:
            return FreeEnergyPoint(s=s, phi=est, converged=True, burn_in=t_prev, window=(t_prev, t))
        if 2.0 * t > horizon / J:
            return FreeEnergyPoint(
                s=s, phi=est, converged=False, burn_in=t_prev, window=(t_prev, t)
            )
        est_prev = est
        y = y_new
        t_prev = t
        t *= 2.0


def _detect_transitions(
    s_grid: np.ndarray, phi: np.ndarray, floor_scale: float = 10.0
) -> list[TransitionPoint]:
    """Locate non-analytic points of a sampled phi curve.

    jump rule: the largest adjacent-point gap must exceed floor_scale
    times the local noise floor (median absolute gap over a surrounding
    window, excluding the candidate and its immediate neighbors), and
    the curve must reverse direction across it -- the value drops into
    the candidate from the left and recovers after it (or vice versa)
    by at least a quarter of the gap on both sides.  This is the
    discontinuity-like signature of the variance-biased ensemble.

    kink rule: peak of absolute second differences exceeding
    floor_scale times their median -- the one-sided-onset signature of
    the linear-biased ensemble.

    A reversal-type point is reported as the single jump; otherwise a
    significant curvature peak is reported as the single kink.
    """
    gaps = np.diff(phi)
    n = len(gaps)
    if n < 5:
        return []
    out: list[TransitionPoint] = []

    i_max = int(np.argmax(np.abs(gaps)))
    lo, hi = max(0, i_max - 15), min(n, i_max + 16)
    window = [abs(g) for j, g in enumerate(gaps[lo:hi], start=lo) if abs(j - i_max) > 2]
    floor = max(float(np.median(window)) if window else 0.0, 1e-12)
    jump_stat = float(abs(gaps[i_max]) / floor)

    d2 = np.abs(np.diff(phi, 2))
    k_max = int(np.argmax(d2))
    d2_floor = max(float(np.median(d2)), 1e-12)
    kink_stat = float(d2[k_max] / d2_floor)

    # direction reversal across the candidate gap, in units of the gap
    gap = gaps[i_max]
    k = 5
    i_lo = max(0, i_max - k)
    i_hi = min(len(phi) - 1, i_max + 1 + k)
    drop = (phi[i_lo] - phi[i_max]) * np.sign(gap)
    rise = (phi[i_hi] - phi[i_max + 1]) * np.sign(gap)
    reversal = min(drop, rise) > 0.25 * abs(gap)

    if jump_stat >= floor_scale and reversal:
        s_at = 0.5 * (s_grid[i_max] + s_grid[i_max + 1])
        out.append(TransitionPoint(s=float(s_at), kind="jump", strength=jump_stat))
    elif kink_stat >= floor_scale:
        out.append(TransitionPoint(s=float(s_grid[k_max + 1]), kind="kink", strength=kink_stat))
    return out


def _phi_point(args) -> FreeEnergyPoint:
    kind, s, J = args
    return free_energy(BiasSpec(kind=kind, s=s), J)


def phi_sweep(
    bias_kind: str,
    J: float,
    s_grid: np.ndarray,
    workers: int = 1,
) -> FreeEnergyCurve:
    """phi(s) over a monotone grid with transition detection."""
    s_grid = np.asarray(s_grid, dtype=float)
    if np.any(np.diff(s_grid) <= 0):
        raise ValueError("s_grid must be strictly increasing")
    jobs = [(bias_kind, float(s), J) for s in s_grid]
    if workers <= 1:
        points = [_phi_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_phi_point, jobs))
    phi = np.array([p.phi for p in points])
    conv = np.array([p.converged for p in points])
    curve = FreeEnergyCurve(
        bias_kind=bias_kind, J=J, s_grid=s_grid, phi=phi, converged=conv, points=points
    )
    curve.transitions = _detect_transitions(s_grid, phi)
    return curve


# --------------------------------------------------------------------------
# flow-field sampling for plots


def flow_field_grid(
    field,
    chart: str = "stereo",
    resolution: int = 24,
    extent: float = 2.5,
) -> np.ndarray:
    """Sample a flow on a plotting grid.

    chart 'stereo': rows (w_re, w_im, nx, ny, nz, vx, vy, vz, dw_re,
    dw_im) on a resolution^2 lattice over [-extent, extent]^2 in the
    w-plane.  chart 'yz': rows (ny, nz, vx, vy, vz) over the unit disk
    of the x = 0 cut (lattice points outside the disk are dropped);
    intended for ball flows.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if chart == "stereo":
        axis = np.linspace(-extent, extent, resolution)
        re, im = np.meshgrid(axis, axis)
        w = (re + 1j * im).ravel()
        r2 = w.real**2 + w.imag**2
        n = np.stack([2.0 * w.real, 2.0 * w.imag, 1.0 - r2], axis=-1) / (1.0 + r2)[:, None]
        f = field(n)
        scale = 1.0 + n[:, 2]
        dw = (f[:, 0] + 1j * f[:, 1]) / scale - w * f[:, 2] / scale
        return np.column_stack([w.real, w.imag, n, f, dw.real, dw.imag])
    if chart == "yz":
        axis = np.linspace(-1.0, 1.0, resolution)
        yy, zz = np.meshgrid(axis, axis)
        pts = np.stack([np.zeros_like(yy).ravel(), yy.ravel(), zz.ravel()], axis=-1)
        keep = np.einsum("ij,ij->i", pts, pts) <= 1.0
        pts = pts[keep]
        f = field(pts)
        return np.column_stack([pts[:, 1], pts[:, 2], f])
    raise ValueError(f"unknown chart {chart!r}; expected 'stereo' or 'yz'")

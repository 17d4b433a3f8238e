import numpy as np
import pytest

from dimer_dpt.core import ModelParams
from dimer_dpt.flows import (
    BiasSpec,
    NoiseSpec,
    angular_field,
    biased_field,
    lindblad_field,
    radial_rate,
    sde_terms,
    unitary_field,
)

from conftest import random_unit_array


class TestUnitaryField:
    def test_south_pole(self):
        assert np.allclose(unitary_field(np.array([0, 0, -1.0]), 1.0, 0.0), [0, 1, 0])

    def test_x_axis_fixed_point(self):
        assert np.allclose(unitary_field(np.array([1.0, 0, 0]), 1.0, 0.0), [0, 0, 0])

    def test_with_field(self):
        # (J x + h z) x n at n = x, h = 2: 2 z x x = 2 y
        assert np.allclose(unitary_field(np.array([1.0, 0, 0]), 1.0, 2.0), [0, 2, 0])

    def test_matches_cross_product(self, rng):
        ns = random_unit_array(rng, 64)
        J, h = 1.3, -0.7
        expect = np.cross(np.array([J, 0.0, h]), ns)
        assert np.allclose(unitary_field(ns, J, h), expect, atol=1e-15)


class TestLindbladField:
    def test_pole_value(self):
        assert np.allclose(lindblad_field(np.array([0, 0, -1.0]), 1.0, 5.0), [0, 1, 0])

    def test_transverse_damping(self):
        assert np.allclose(lindblad_field(np.array([1.0, 0, 0]), 1.0, 2.0), [-2, 0, 0])

    def test_direct_evaluation(self):
        assert np.allclose(lindblad_field(np.array([0, 1.0, 0]), 1.0, 0.5), [0, -0.5, 1])

    def test_contraction(self, rng):
        # radial derivative is -gamma (nx^2 + ny^2) <= 0 on the ball
        pts = rng.uniform(-1, 1, size=(10_000, 3))
        pts = pts[np.linalg.norm(pts, axis=1) <= 1.0]
        gamma = 1.7
        f = lindblad_field(pts, 1.0, gamma)
        radial = np.einsum("ij,ij->i", pts, f)
        expect = -gamma * (pts[:, 0] ** 2 + pts[:, 1] ** 2)
        assert np.allclose(radial, expect, atol=1e-13)
        assert np.all(radial <= 1e-13)


class TestAngularField:
    def test_x_axis_fixed_points(self):
        for sign in (1.0, -1.0):
            n = np.array([sign, 0.0, 0.0])
            assert np.allclose(angular_field(n, 1.0, 2.7), 0.0, atol=1e-15)

    def test_overdamped_fixed_point(self):
        # at gamma = 2J the four extra zeros merge pairwise at n_z^2 = 1/2
        n = np.array([0.0, -1.0, 1.0]) / np.sqrt(2)
        assert np.allclose(angular_field(n, 1.0, 2.0), 0.0, atol=1e-15)

    def test_pole_term_vanishes(self):
        assert np.allclose(angular_field(np.array([0, 0, -1.0]), 1.0, 3.0), [0, 1, 0])

    def test_reflection_equivariance(self, rng):
        # (nx, ny, nz) -> (nx, -ny, -nz) maps the field the same way
        ns = random_unit_array(rng, 512)
        J, gamma = 1.0, 1.9
        flipped = ns * np.array([1.0, -1.0, -1.0])
        f = angular_field(ns, J, gamma)
        g = angular_field(flipped, J, gamma)
        assert np.allclose(g, f * np.array([1.0, -1.0, -1.0]), atol=1e-14)

    def test_projective_consistency(self, rng):
        """The angular flow is the sphere projection of the averaged flow:
        f_ang = f_lin - (n . f_lin) n on unit vectors."""
        ns = random_unit_array(rng, 256)
        J, gamma = 1.0, 2.3
        f_lin = lindblad_field(ns, J, gamma)
        radial = np.einsum("ij,ij->i", ns, f_lin)[:, None]
        assert np.allclose(angular_field(ns, J, gamma), f_lin - radial * ns, atol=1e-13)


class TestRadialRate:
    @pytest.mark.parametrize("nz", [1.0, -1.0])
    def test_poles(self, nz):
        assert radial_rate(nz, 0.7, 2.0) == pytest.approx(0.0)

    def test_mixed_center(self):
        assert radial_rate(0.3, 0.0, 2.0) == pytest.approx(0.0)

    def test_equator_value(self):
        assert radial_rate(0.0, 1.0, 2.0) == pytest.approx(-2.0)

    def test_never_positive(self, rng):
        nz = rng.uniform(-1, 1, 1000)
        d = rng.uniform(0, 1, 1000)
        assert np.all(radial_rate(nz, d, 1.3) <= 0.0)


class TestBiasedField:
    def test_linear_fixed_points_small_s(self):
        bias = BiasSpec("linear", 0.6)
        for sx in (0.8, -0.8):
            n = np.array([sx, 0.6, 0.0])
            assert np.allclose(biased_field(n, 1.0, bias), 0.0, atol=1e-15)

    def test_linear_fixed_points_large_s(self):
        bias = BiasSpec("linear", 2.0)
        root = np.sqrt(0.75)
        for sz in (root, -root):
            n = np.array([0.0, 0.5, sz])
            assert np.allclose(biased_field(n, 1.0, bias), 0.0, atol=1e-15)

    def test_variance_identification(self, rng):
        ns = random_unit_array(rng, 1000)
        s2 = 1.7
        f_bias = biased_field(ns, 1.0, BiasSpec("variance", s2))
        f_ang = angular_field(ns, 1.0, s2)
        assert np.array_equal(f_bias, f_ang)


class TestTangency:
    def test_sphere_fields_tangent(self, rng):
        ns = random_unit_array(rng, 10_000)
        fields = [
            unitary_field(ns, 1.0, 0.8),
            angular_field(ns, 1.0, 2.4),
            biased_field(ns, 1.0, BiasSpec("linear", 1.3)),
            biased_field(ns, 1.0, BiasSpec("variance", 2.9)),
        ]
        for f in fields:
            assert np.max(np.abs(np.einsum("ij,ij->i", f, ns))) <= 1e-14

    def test_printed_variants_break_tangency(self, rng):
        ns = random_unit_array(rng, 5000)
        s1 = 1.0
        f = biased_field(ns, 1.0, BiasSpec("linear", s1), as_printed=True)
        violation = np.max(np.abs(np.einsum("ij,ij->i", f, ns)))
        bound = s1 * 2.0 / (3.0 * np.sqrt(3.0))
        assert violation > 0.9 * bound
        assert violation <= bound + 1e-12


class TestSdeTerms:
    def test_zero_noise(self):
        n = np.array([0.3, 0.9, np.sqrt(1 - 0.09 - 0.81)])
        drift, direction, amp = sde_terms(n, 1.0, 0.0, NoiseSpec(variance_rate=0.0))
        assert amp == 0.0
        assert np.allclose(drift, unitary_field(n, 1.0, 0.0))

    def test_poles_noise_insensitive(self):
        _, direction, _ = sde_terms(np.array([0, 0, 1.0]), 1.0, 0.0, NoiseSpec(variance_rate=2.0))
        assert np.allclose(direction, 0.0)

    def test_amplitude_calibration(self):
        spec = NoiseSpec.from_params(ModelParams(J=1.0, gamma=2.0))
        assert spec.variance_rate == pytest.approx(4.0)
        assert spec.amplitude == pytest.approx(2.0)

    def test_ito_correction_matches_damping(self, rng):
        """The Stratonovich-to-Ito drift correction of the noise term,
        (1/2) * variance_rate * (dg/dn) g with g = z x n, must equal the
        damping term of the averaged flow."""
        ns = random_unit_array(rng, 200)
        gamma = 1.3
        jac = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        g = ns @ jac.T  # z x n
        correction = 0.5 * (2.0 * gamma) * g @ jac.T
        damping = lindblad_field(ns, 1.0, gamma) - unitary_field(ns, 1.0, 0.0)
        assert np.allclose(correction, damping, atol=1e-14)

    def test_rejects_negative_variance(self):
        with pytest.raises(ValueError):
            NoiseSpec(variance_rate=-1.0)


class TestBiasSpec:
    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            BiasSpec("quadratic", 1.0)

    def test_rejects_negative_strength(self):
        with pytest.raises(ValueError):
            BiasSpec("linear", -0.5)

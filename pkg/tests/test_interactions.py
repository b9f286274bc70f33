"""Interaction tensor construction and Hamiltonian assembly."""

import math

import numpy as np
import pytest

from spinmultipoles.errors import PhysicsWarning, RankError
from spinmultipoles.interactions import (
    EfgSpec,
    InteractionTensor,
    MagneticSpec,
    hamiltonian_matrix,
    omega_from_efg,
    omega_from_magnetic,
)
from spinmultipoles.tensors import (
    basis_for,
    jx_matrix,
    jy_matrix,
    jz_matrix,
    norm_constants,
)


class TestMagnetic:
    def test_field_along_z(self):
        spin = 0.5
        gamma, bz = 2.0, 1.5
        tensor = omega_from_magnetic(MagneticSpec(gamma, (0, 0, bz)), spin)
        _, a1, _ = norm_constants(spin)
        assert tensor.component(1, 0) == pytest.approx(gamma * bz / a1)
        assert tensor.component(1, 1) == 0 and tensor.component(1, -1) == 0
        H = hamiltonian_matrix(tensor, basis_for(spin))
        assert np.allclose(H, gamma * bz * jz_matrix(spin), atol=1e-12)

    def test_zero_field(self):
        tensor = omega_from_magnetic(MagneticSpec(3.0, (0, 0, 0)), 1)
        assert all(v == 0 for v in tensor.omega.values())
        assert np.max(np.abs(hamiltonian_matrix(tensor, basis_for(1)))) == 0

    def test_transverse_field_spin_half(self):
        gamma, bx = 1.7, 0.8
        tensor = omega_from_magnetic(MagneticSpec(gamma, (bx, 0, 0)), 0.5)
        H = hamiltonian_matrix(tensor, basis_for(0.5))
        expected = (gamma * bx / 2.0) * np.array([[0, 1], [1, 0]], dtype=complex)
        assert np.max(np.abs(H - expected)) <= 1e-12

    @pytest.mark.parametrize("tj", [1, 2, 3, 4, 5])
    def test_assembly_identity_random_fields(self, rng, tj):
        j = tj / 2.0
        basis = basis_for(j)
        for _ in range(5):
            gamma = rng.normal()
            B = rng.normal(size=3)
            H = hamiltonian_matrix(omega_from_magnetic(MagneticSpec(gamma, tuple(B)), j), basis)
            ref = gamma * (B[0] * jx_matrix(j) + B[1] * jy_matrix(j) + B[2] * jz_matrix(j))
            assert np.max(np.abs(H - ref)) <= 1e-12
            assert np.max(np.abs(H - H.conj().T)) <= 1e-12

    def test_z_rotation_covariance(self, rng):
        # rotating B about z by alpha multiplies Omega_1M by exp(+i M alpha)
        gamma = 1.3
        B = np.array([0.4, -0.7, 0.2])
        base = omega_from_magnetic(MagneticSpec(gamma, tuple(B)), 1)
        for alpha in rng.uniform(-np.pi, np.pi, size=5):
            c, s = np.cos(alpha), np.sin(alpha)
            rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
            rotated = omega_from_magnetic(MagneticSpec(gamma, tuple(rot @ B)), 1)
            for M in (-1, 0, 1):
                expected = np.exp(1j * M * alpha) * base.component(1, M)
                assert rotated.component(1, M) == pytest.approx(expected, abs=1e-12)


class TestEfg:
    def test_axial_traceless(self):
        spec = EfgSpec.axial(0.7)
        tensor = omega_from_efg(spec, 1)
        _, _, a2 = norm_constants(1)
        assert tensor.component(2, 0) == pytest.approx(0.7 / a2, abs=1e-12)
        for M in (-2, -1, 1, 2):
            assert tensor.component(2, M) == 0

    def test_pure_xy_offdiagonal(self):
        phi = np.zeros((3, 3))
        phi[0, 1] = phi[1, 0] = 0.4
        phi[2, 2] = 1.0
        _, _, a2 = norm_constants(1)
        with pytest.warns(PhysicsWarning):  # trace = phi_zz != 0 here
            tensor = omega_from_efg(EfgSpec(phi, 0.7), 1)
        scale = 0.7 / a2
        assert tensor.component(2, 2) == pytest.approx(2j * 0.4 * scale / math.sqrt(6), abs=1e-12)
        assert tensor.component(2, -2) == pytest.approx(-2j * 0.4 * scale / math.sqrt(6), abs=1e-12)
        assert tensor.component(2, 1) == 0 and tensor.component(2, -1) == 0
        assert tensor.component(2, 0) == pytest.approx(scale * 2.0 / 3.0, abs=1e-12)

    def test_hermiticity_by_construction(self, rng):
        phi = rng.normal(size=(3, 3))
        phi = phi + phi.T
        phi -= np.eye(3) * np.trace(phi) / 3
        if abs(phi[2, 2]) < 0.1:
            phi += np.diag([-0.25, -0.25, 0.5])
        tensor = omega_from_efg(EfgSpec(phi, 1.3), 1.5)
        for M in (1, 2):
            assert tensor.component(2, -M) == pytest.approx(
                (-1) ** M * np.conj(tensor.component(2, M)), abs=1e-12
            )

    def test_spin_half_rejected(self):
        with pytest.raises(RankError):
            omega_from_efg(EfgSpec.axial(0.7), 0.5)

    def test_zero_phi_zz_rejected(self):
        phi = np.diag([1.0, -1.0, 0.0])
        with pytest.raises(ValueError):
            omega_from_efg(EfgSpec(phi, 0.7), 1)

    def test_laplace_violation_warns_but_computes(self):
        phi = np.diag([1.0, 1.0, 1.0])
        with pytest.warns(PhysicsWarning):
            tensor = omega_from_efg(EfgSpec(phi, 0.7), 1)
        assert tensor.component(2, 0) == pytest.approx(0.0, abs=1e-12)

    def test_from_quadrupole_moment(self):
        phi = np.diag([-0.5, -0.5, 1.0])
        spec = EfgSpec.from_quadrupole_moment(phi, eQ=6.0, j=1.5)
        # omega_Q = eQ phi_zz / (4 j (2j-1)) = 6 / (4 * 1.5 * 2) = 0.5
        assert spec.quadrupole_frequency == pytest.approx(0.5)

    def test_eta_constructor_ordering(self):
        spec = EfgSpec.axial(1.0, eta=0.6)
        diag = np.diag(spec.phi)
        assert abs(diag[2]) >= abs(diag[1]) >= abs(diag[0])
        assert np.trace(spec.phi) == pytest.approx(0.0, abs=1e-15)
        with pytest.raises(ValueError):
            EfgSpec.axial(1.0, eta=1.5)


class TestHamiltonian:
    def test_axial_quadrupole_spin1_diagonal(self):
        tensor = omega_from_efg(EfgSpec.axial(0.7), 1)
        H = hamiltonian_matrix(tensor, basis_for(1))
        assert np.allclose(H, 0.7 * np.diag([1.0, -2.0, 1.0]), atol=1e-12)

    def test_quadrupole_gap_is_integer_multiple_of_omega_q(self):
        for tj in (2, 3, 4):
            tensor = omega_from_efg(EfgSpec.axial(0.3), tj / 2.0)
            H = hamiltonian_matrix(tensor, basis_for(tj / 2.0))
            gaps = np.diff(np.unique(np.round(np.diag(H).real / 0.3, 9)))
            assert np.allclose(gaps, np.round(gaps), atol=1e-9)

    def test_empty_tensor_is_zero_matrix(self):
        H = hamiltonian_matrix(InteractionTensor.empty(1), basis_for(1))
        assert np.max(np.abs(H)) == 0

    def test_rank_exceeding_basis_rejected(self):
        tensor = omega_from_efg(EfgSpec.axial(0.7), 1)
        with pytest.raises(ValueError):
            hamiltonian_matrix(tensor, basis_for(0.5))

    def test_combined_interaction_is_sum(self):
        j = 1.5
        basis = basis_for(j)
        mag = omega_from_magnetic(MagneticSpec(1.0, (0.1, 0.2, 0.3)), j)
        quad = omega_from_efg(EfgSpec.axial(0.5, 0.2), j)
        combined = hamiltonian_matrix(mag + quad, basis)
        separate = hamiltonian_matrix(mag, basis) + hamiltonian_matrix(quad, basis)
        assert np.max(np.abs(combined - separate)) <= 1e-12


class TestInteractionTensor:
    def test_rank0_silently_dropped(self):
        tensor = InteractionTensor(basis_for(1).spin, {(0, 0): 5.0, (1, 0): 1.0})
        assert (0, 0) not in tensor.omega
        assert tensor.component(1, 0) == 1.0

    def test_nonhermitian_rejected(self):
        spin = basis_for(1).spin
        with pytest.raises(ValueError):
            InteractionTensor(spin, {(1, 1): 1.0, (1, -1): 1.0})

    def test_rank_above_two_rejected(self):
        with pytest.raises(ValueError):
            InteractionTensor(basis_for(2).spin, {(3, 0): 1.0})

    def test_mismatched_spins_cannot_combine(self):
        a = omega_from_magnetic(MagneticSpec(1.0, (0, 0, 1)), 1)
        b = omega_from_magnetic(MagneticSpec(1.0, (0, 0, 1)), 0.5)
        with pytest.raises(ValueError):
            a + b

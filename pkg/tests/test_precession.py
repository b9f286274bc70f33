"""Structure constants, generator assembly and multipole evolution."""

import math

import numpy as np
import pytest

from spinmultipoles.errors import RankError
from spinmultipoles.interactions import (
    EfgSpec,
    InteractionTensor,
    MagneticSpec,
    omega_from_efg,
    omega_from_magnetic,
)
from spinmultipoles.multipoles import StateMultipoles, decompose, multipole_norm
from spinmultipoles.precession import (
    MultipoleGenerator,
    RelaxationSpec,
    StructureConstants,
    apply_relaxation,
    build_generator,
    evolve,
    reduced_matrix_element,
    reduced_matrix_element_exact,
    structure_constant,
    structure_constant_exact,
)
from spinmultipoles.tensors import basis_for, commutator, flat_index, lm_pairs
from spinmultipoles.wigner import clebsch_gordan

from conftest import random_density_matrix


def random_interaction(rng, tj):
    j = tj / 2.0
    tensor = omega_from_magnetic(MagneticSpec(rng.normal(), tuple(rng.normal(size=3))), j)
    if tj >= 2:
        phi = rng.normal(size=(3, 3))
        phi = phi + phi.T
        phi -= np.eye(3) * np.trace(phi) / 3
        if abs(phi[2, 2]) < 0.1:
            phi += np.diag([-0.25, -0.25, 0.5])
        tensor = tensor + omega_from_efg(EfgSpec(phi, rng.normal()), j)
    return tensor


def rme_from_traces(basis, L1, L2, L):
    """Independent reduced matrix element: invert the Wigner-Eckart factorization
    of the commutator-trace elements (LM|T_L1M1|L2M2)."""
    values = []
    for M in range(-L, L + 1):
        for M1 in range(-L1, L1 + 1):
            M2 = M - M1
            if abs(M2) > L2:
                continue
            cg = float(clebsch_gordan(L2, M2, L1, M1, L, M))
            if abs(cg) < 1e-14:
                continue
            t_bra = basis.operator(L, M)
            elem = np.trace(
                t_bra.conj().T
                @ commutator(basis.operator(L1, M1), basis.operator(L2, M2))
            )
            values.append(elem * math.sqrt(2 * L + 1) / cg)
    if not values:
        return 0.0
    values = np.array(values)
    assert np.max(np.abs(values - values[0])) <= 1e-10  # Wigner-Eckart itself
    assert np.max(np.abs(values.imag)) <= 1e-10
    return float(values[0].real)


class TestReducedMatrixElement:
    def test_spin_half_dipole_value(self):
        assert reduced_matrix_element(0.5, 1, 1, 1) == pytest.approx(2 * math.sqrt(3))

    def test_parity_zeros_for_magnetic_rank_change(self):
        for tj in (1, 2, 3):
            for L in range(1, tj + 1):
                for L2 in (L - 1, L + 1):
                    if 0 <= L2 <= tj:
                        assert reduced_matrix_element_exact(tj / 2.0, 1, L2, L).is_zero

    def test_parity_zeros_for_even_quadrupole(self):
        for tj in (2, 3, 4):
            for L in range(0, tj + 1):
                assert reduced_matrix_element_exact(tj / 2.0, 2, L, L).is_zero

    @pytest.mark.parametrize("tj", [1, 2, 3, 4])
    def test_against_commutator_trace_oracle(self, tj):
        basis = basis_for(tj / 2.0)
        top = min(tj, 3)
        for L1 in range(0, top + 1):
            for L2 in range(0, top + 1):
                for L in range(0, top + 1):
                    direct = reduced_matrix_element(tj / 2.0, L1, L2, L)
                    oracle = rme_from_traces(basis, L1, L2, L)
                    assert direct == pytest.approx(oracle, abs=1e-10)

    def test_rank_above_2j_is_zero(self):
        assert reduced_matrix_element_exact(0.5, 1, 2, 1).is_zero
        assert reduced_matrix_element_exact(0.5, 2, 1, 1).is_zero


class TestStructureConstants:
    def test_spin_half_larmor_constant(self):
        assert structure_constant(0.5, 1, 1, 1) == pytest.approx(-2.0)

    def test_exact_parity_zeros_exhaustive(self):
        for tj in range(0, 9):
            for L1 in range(tj + 1):
                for L2 in range(tj + 1):
                    for L in range(tj + 1):
                        if (L1 + L2 + L) % 2 == 0:
                            assert structure_constant_exact(tj / 2.0, L1, L2, L).is_zero

    def test_table_contains_only_nonzero(self):
        table = StructureConstants.build(1.5)
        assert all(v != 0 for v in table.c.values())
        assert table.value(1, 1, 1) == pytest.approx(structure_constant(1.5, 1, 1, 1))
        assert table.value(1, 2, 1) == 0.0

    def test_values_are_real(self):
        for args in [(1, 1, 1), (1, 2, 2), (2, 1, 2), (2, 2, 1), (2, 3, 2)]:
            value = structure_constant_exact(2.0, *args)
            assert isinstance(float(value), float)


class TestBuildGenerator:
    def test_field_along_z_is_diagonal(self):
        gamma, bz = 2.0, 1.5
        basis = basis_for(1.5)
        gen = build_generator(omega_from_magnetic(MagneticSpec(gamma, (0, 0, bz)), 1.5), basis)
        for L, M in lm_pairs(3):
            r = flat_index(L, M)
            assert gen.matrix[r, r] == pytest.approx(1j * M * gamma * bz, abs=1e-12)
        off = gen.matrix - np.diag(np.diag(gen.matrix))
        assert np.max(np.abs(off)) <= 1e-12

    def test_zero_interaction(self):
        gen = build_generator(InteractionTensor.empty(1), basis_for(1))
        assert np.max(np.abs(gen.matrix)) == 0

    def test_axial_quadrupole_block_structure(self):
        basis = basis_for(1)
        gen = build_generator(omega_from_efg(EfgSpec.axial(0.7), 1), basis)
        pairs = lm_pairs(2)
        coupled = {(r, c) for r in range(9) for c in range(9) if abs(gen.matrix[r, c]) > 1e-12}
        expected = {
            (flat_index(1, 1), flat_index(2, 1)),
            (flat_index(2, 1), flat_index(1, 1)),
            (flat_index(1, -1), flat_index(2, -1)),
            (flat_index(2, -1), flat_index(1, -1)),
        }
        assert coupled == expected
        block = gen.matrix[
            np.ix_([flat_index(1, 1), flat_index(2, 1)], [flat_index(1, 1), flat_index(2, 1)])
        ]
        eigs = np.linalg.eigvals(block)
        eigs = eigs[np.argsort(eigs.imag)]
        assert np.allclose(eigs, [-2.1j, 2.1j], atol=1e-12)  # +-3 omega_Q

    @pytest.mark.parametrize("tj", [1, 2, 3, 4, 5])
    def test_dual_construction_agreement(self, rng, tj):
        basis = basis_for(tj / 2.0)
        for _ in range(4):
            tensor = random_interaction(rng, tj)
            g1 = build_generator(tensor, basis, method="structure_constants")
            g2 = build_generator(tensor, basis, method="commutator_trace")
            assert np.max(np.abs(g1.matrix - g2.matrix)) <= 1e-10

    def test_magnetic_only_is_block_diagonal_in_rank(self, rng):
        basis = basis_for(2)
        tensor = omega_from_magnetic(MagneticSpec(1.0, tuple(rng.normal(size=3))), 2)
        gen = build_generator(tensor, basis)
        for (L1, _), row in zip(lm_pairs(4), gen.matrix):
            for (L2, _), entry in zip(lm_pairs(4), row):
                if L1 != L2:
                    assert abs(entry) <= 1e-12

    def test_quadrupole_only_changes_rank_by_one(self, rng):
        basis = basis_for(2)
        tensor = omega_from_efg(EfgSpec.axial(0.9, 0.4), 2)
        gen = build_generator(tensor, basis)
        for (L1, _), row in zip(lm_pairs(4), gen.matrix):
            for (L2, _), entry in zip(lm_pairs(4), row):
                if abs(L1 - L2) != 1:
                    assert abs(entry) <= 1e-12

    def test_trace_row_and_column_vanish(self, rng):
        basis = basis_for(1.5)
        gen = build_generator(random_interaction(rng, 3), basis)
        assert np.max(np.abs(gen.matrix[0, :])) <= 1e-12
        assert np.max(np.abs(gen.matrix[:, 0])) <= 1e-12

    def test_rank_out_of_range(self):
        tensor = omega_from_efg(EfgSpec.axial(0.7), 1)
        with pytest.raises((RankError, ValueError)):
            build_generator(tensor, basis_for(0.5))


class TestRelaxationSpec:
    def test_bloch_rates(self):
        spec = RelaxationSpec.from_T1_T2(2.0, 0.5)
        assert spec.rate(1, 0) == 0.5
        assert spec.rate(1, 1) == 2.0 and spec.rate(1, -1) == 2.0
        assert spec.rate(2, 0) == 0.0

    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            RelaxationSpec({(1, 0): -1.0})

    def test_m_asymmetric_rates_rejected(self):
        with pytest.raises(ValueError, match="hermiticity"):
            RelaxationSpec({(1, 1): 0.5})
        with pytest.raises(ValueError, match="hermiticity"):
            RelaxationSpec({(2, 1): 0.5, (2, -1): 0.6})

    def test_from_symmetric_mirrors(self):
        spec = RelaxationSpec.from_symmetric({(2, 1): 0.3})
        assert spec.rate(2, -1) == 0.3


class TestApplyRelaxation:
    def test_zero_rates_leave_generator_unchanged(self, rng):
        basis = basis_for(1)
        gen = build_generator(random_interaction(rng, 2), basis)
        damped = apply_relaxation(gen, RelaxationSpec({}))
        assert np.array_equal(damped.matrix, gen.matrix)
        assert damped.relaxation_applied

    def test_pure_decay(self):
        basis = basis_for(0.5)
        gen = build_generator(InteractionTensor.empty(0.5), basis)
        damped = apply_relaxation(gen, RelaxationSpec({(1, 0): 0.5}))
        initial = StateMultipoles.from_components(0.5, {(1, 0): 0.8})
        times = np.linspace(0, 6.0, 25)
        traj = evolve(damped, initial, times)
        expect = 0.8 * np.exp(-0.5 * times)
        got = traj.coefficients()[:, flat_index(1, 0)]
        assert np.max(np.abs(got - expect)) <= 1e-12

    def test_bloch_equation_recovered(self):
        # B along z plus (1/T1, 1/T2): the damped-precession closed form
        gamma, bz, T1, T2 = 1.0, 3.0, 2.0, 0.7
        basis = basis_for(0.5)
        gen = build_generator(omega_from_magnetic(MagneticSpec(gamma, (0, 0, bz)), 0.5), basis)
        gen = apply_relaxation(gen, RelaxationSpec.from_T1_T2(T1, T2))
        initial = StateMultipoles.from_components(
            0.5, {(0, 0): 1 / math.sqrt(2), (1, 0): 0.4, (1, 1): -0.3 + 0.2j, (1, -1): 0.3 + 0.2j}
        )
        times = np.linspace(0, 5 * T2, 200)
        traj = evolve(gen, initial, times)
        coeffs = traj.coefficients()
        w0 = gamma * bz
        assert np.max(np.abs(coeffs[:, flat_index(1, 0)] - 0.4 * np.exp(-times / T1))) <= 1e-8
        expect_p1 = (-0.3 + 0.2j) * np.exp((1j * w0 - 1 / T2) * times)
        assert np.max(np.abs(coeffs[:, flat_index(1, 1)] - expect_p1)) <= 1e-8

    def test_rate_rank_above_2j_rejected(self):
        basis = basis_for(0.5)
        gen = build_generator(InteractionTensor.empty(0.5), basis)
        with pytest.raises(RankError):
            apply_relaxation(gen, RelaxationSpec.from_symmetric({(2, 0): 0.1}))


class TestEvolve:
    def test_zero_generator_constant_trajectory(self, rng):
        basis = basis_for(1)
        gen = build_generator(InteractionTensor.empty(1), basis)
        initial = decompose(random_density_matrix(rng, 3), basis)
        traj = evolve(gen, initial, np.linspace(0, 5, 7))
        for state in traj.states:
            assert np.array_equal(state.coeffs, initial.coeffs)

    def test_larmor_phase_evolution(self):
        gamma, bz = 1.0, 2.0
        basis = basis_for(0.5)
        gen = build_generator(omega_from_magnetic(MagneticSpec(gamma, (0, 0, bz)), 0.5), basis)
        c = 0.37 - 0.11j
        initial = StateMultipoles.from_components(
            0.5, {(0, 0): 1 / math.sqrt(2), (1, 1): c, (1, -1): -np.conj(c), (1, 0): 0.2}
        )
        times = np.linspace(0, 10, 300)
        traj = evolve(gen, initial, times)
        coeffs = traj.coefficients()
        assert np.max(np.abs(coeffs[:, flat_index(1, 1)] - c * np.exp(1j * gamma * bz * times))) <= 1e-10
        assert np.max(np.abs(coeffs[:, flat_index(1, 0)] - 0.2)) <= 1e-12

    def test_quadrupole_beat_power_conserved(self):
        basis = basis_for(1)
        gen = build_generator(omega_from_efg(EfgSpec.axial(0.7), 1), basis)
        initial = StateMultipoles.from_components(
            1, {(0, 0): 1 / math.sqrt(3), (1, 1): 0.5, (1, -1): -0.5}
        )
        times = np.linspace(0, 40.0, 500)
        traj = evolve(gen, initial, times)
        coeffs = traj.coefficients()
        power = (
            np.abs(coeffs[:, flat_index(1, 1)]) ** 2
            + np.abs(coeffs[:, flat_index(2, 1)]) ** 2
        )
        assert np.max(np.abs(power - power[0])) <= 1e-10

    def test_rk4_matches_eigendecomposition(self, rng):
        basis = basis_for(1.5)
        gen = build_generator(random_interaction(rng, 3), basis)
        initial = decompose(random_density_matrix(rng, 4), basis)
        times = np.linspace(0, 50.0 / gen.norm(), 40)
        exact = evolve(gen, initial, times, method="eig")
        rk4 = evolve(gen, initial, times, method="rk4")
        assert np.max(np.abs(exact.coefficients() - rk4.coefficients())) <= 1e-8

    def test_conservation_along_coherent_flow(self, rng):
        basis = basis_for(2)
        gen = build_generator(random_interaction(rng, 4), basis)
        initial = decompose(random_density_matrix(rng, 5), basis)
        traj = evolve(gen, initial, np.linspace(0, 50.0 / gen.norm(), 60))
        coeffs = traj.coefficients()
        assert np.max(np.abs(coeffs[:, 0] - coeffs[0, 0])) <= 1e-12
        norms = [multipole_norm(s) for s in traj.states]
        assert np.max(np.abs(np.array(norms) - norms[0])) <= 1e-10
        assert max(s.hermiticity_defect() for s in traj.states) <= 1e-10

    def test_purity_strictly_nonincreasing_with_damping(self, rng):
        basis = basis_for(1)
        gen = build_generator(random_interaction(rng, 2), basis)
        gen = apply_relaxation(gen, RelaxationSpec.from_symmetric({(1, 0): 0.2, (1, 1): 0.3, (2, 0): 0.1, (2, 1): 0.1, (2, 2): 0.4}))
        initial = decompose(random_density_matrix(rng, 3), basis)
        traj = evolve(gen, initial, np.linspace(0, 8, 50))
        norms = np.array([multipole_norm(s) for s in traj.states])
        assert np.all(np.diff(norms) <= 1e-12)

    def test_invalid_times(self, rng):
        basis = basis_for(0.5)
        gen = build_generator(InteractionTensor.empty(0.5), basis)
        initial = StateMultipoles.maximally_mixed(0.5)
        with pytest.raises(ValueError):
            evolve(gen, initial, [0.0, 2.0, 1.0])
        with pytest.raises(ValueError):
            evolve(gen, initial, [-1.0, 1.0])
        with pytest.raises(ValueError):
            evolve(gen, initial, [])

    def test_defective_generator_falls_back_to_expm(self):
        # a Jordan-block generator has a degenerate eigenbasis
        spin_half = basis_for(0.5).spin
        matrix = np.zeros((4, 4), dtype=complex)
        matrix[1, 2] = 1.0  # nilpotent coupling
        gen = MultipoleGenerator(spin_half, matrix)
        initial = StateMultipoles.from_components(0.5, {(1, 0): 1.0})
        traj = evolve(gen, initial, np.linspace(0, 2, 5))
        assert traj.metadata.get("fallback") == "expm"
        # solution of ydot = N y with N nilpotent: linear growth
        expect = 1.0 * traj.times
        assert np.max(np.abs(traj.coefficients()[:, 1] - expect)) <= 1e-10

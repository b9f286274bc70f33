"""Second-order rate quadrature against closed forms, a spectral oracle,
and the stochastic Monte Carlo ground truth."""

import math

import numpy as np
import pytest

from spinmultipoles.errors import PhysicsWarning
from spinmultipoles.interactions import InteractionTensor, MagneticSpec, omega_from_magnetic
from spinmultipoles.liouville import FluctuationModel, stochastic_evolve
from spinmultipoles.relaxation import rate_report, relaxation_rate
from spinmultipoles.tensors import angular_momentum_matrices, basis_for, lm_pairs


def spectral_rate(model, basis, L, M):
    """Analytic eigenbasis evaluation of the same integral (no quadrature).

    Every integrand frequency component integrates to
    (1 - exp(-U(1/tau_c + i gap))) / (1/tau_c + i gap) exactly.
    """
    H_S = model.static_hamiltonian(basis)
    w, V = np.linalg.eigh(H_S)
    gaps = w[:, None] - w[None, :]
    tau_c = model.correlation_time
    U = 40.0 * tau_c
    s = 1.0 / tau_c + 1j * gaps
    weights = (1.0 - np.exp(-U * s)) / s
    T = V.conj().T @ basis.operator(L, M) @ V
    total = 0.0 + 0.0j
    for J in angular_momentum_matrices(basis.spin):
        Jt = V.conj().T @ J @ V
        C = Jt @ T - T @ Jt
        JW = Jt * weights
        total += np.vdot(T, JW @ C - C @ JW)
    return model.fluctuation_amplitude**2 * total.real


class TestIsotropicRates:
    def test_zero_amplitude_is_zero(self):
        model = FluctuationModel(InteractionTensor.empty(1), 0.0, 0.3)
        rate, diag = relaxation_rate(model, basis_for(1), 2, 1)
        assert rate == 0.0
        assert diag["neval"] == 0

    @pytest.mark.parametrize("tj", [1, 2, 3])
    def test_white_noise_casimir_scaling(self, tj):
        omega_f, tau_c = 0.4, 0.05
        model = FluctuationModel(InteractionTensor.empty(tj / 2.0), omega_f, tau_c)
        basis = basis_for(tj / 2.0)
        for L, M in lm_pairs(basis.max_rank):
            rate, _ = relaxation_rate(model, basis, L, M)
            assert rate == pytest.approx(omega_f**2 * tau_c * L * (L + 1), rel=1e-7)

    def test_m_independence(self):
        model = FluctuationModel(InteractionTensor.empty(1.5), 0.3, 0.2)
        basis = basis_for(1.5)
        for L in (1, 2, 3):
            rates = [relaxation_rate(model, basis, L, M)[0] for M in range(-L, L + 1)]
            assert max(rates) - min(rates) <= 1e-9 * max(rates)

    def test_quadratic_in_amplitude(self):
        basis = basis_for(1)
        r1, _ = relaxation_rate(FluctuationModel(InteractionTensor.empty(1), 0.3, 0.1), basis, 2, 0)
        r2, _ = relaxation_rate(FluctuationModel(InteractionTensor.empty(1), 0.6, 0.1), basis, 2, 0)
        assert r2 == pytest.approx(4.0 * r1, rel=1e-7)

    def test_white_noise_limit_sequence(self):
        # tau_c -> 0 at fixed omega_f^2 tau_c: rates converge to the white-noise value
        basis = basis_for(1)
        power = 0.01  # omega_f^2 tau_c
        deviations = []
        for tau_c in (0.4, 0.2, 0.1, 0.05):
            omega_f = math.sqrt(power / tau_c)
            model = FluctuationModel(InteractionTensor.empty(1), omega_f, tau_c)
            rate, _ = relaxation_rate(model, basis, 1, 0)
            deviations.append(abs(rate - power * 2.0))
        assert deviations[-1] <= 1e-7
        assert all(d <= 1e-7 for d in deviations)


class TestStaticFieldRates:
    @pytest.mark.parametrize("tj", [1, 3])
    def test_longitudinal_lorentzian_closed_form(self, tj):
        omega0, omega_f, tau_c = 2.0, 0.5, 0.1
        tensor = omega_from_magnetic(MagneticSpec(omega0, (0, 0, 1.0)), tj / 2.0)
        model = FluctuationModel(tensor, omega_f, tau_c)
        rate, _ = relaxation_rate(model, basis_for(tj / 2.0), 1, 0)
        expected = 2.0 * omega_f**2 * tau_c / (1.0 + (omega0 * tau_c) ** 2)
        assert rate == pytest.approx(expected, rel=1e-6)

    def test_transverse_closed_form(self):
        omega0, omega_f, tau_c = 2.0, 0.5, 0.1
        tensor = omega_from_magnetic(MagneticSpec(omega0, (0, 0, 1.0)), 0.5)
        model = FluctuationModel(tensor, omega_f, tau_c)
        rate, _ = relaxation_rate(model, basis_for(0.5), 1, 1)
        expected = omega_f**2 * tau_c * (1.0 + 1.0 / (1.0 + (omega0 * tau_c) ** 2))
        assert rate == pytest.approx(expected, rel=1e-6)

    @pytest.mark.parametrize("tj", [1, 2])
    def test_quadrature_matches_spectral_oracle(self, rng, tj):
        basis = basis_for(tj / 2.0)
        for _ in range(3):
            tensor = omega_from_magnetic(
                MagneticSpec(rng.normal(), tuple(rng.normal(size=3))), tj / 2.0
            )
            model = FluctuationModel(tensor, 0.4, 0.15)
            for L, M in lm_pairs(basis.max_rank):
                if L == 0:
                    continue
                quad, _ = relaxation_rate(model, basis, L, M)
                assert quad >= -1e-12  # diagonal rates are nonnegative
                assert quad == pytest.approx(spectral_rate(model, basis, L, M), rel=1e-6, abs=1e-12)

    def test_m_symmetry_for_axial_static_field(self):
        tensor = omega_from_magnetic(MagneticSpec(1.7, (0.0, 0.0, 1.0)), 1.5)
        model = FluctuationModel(tensor, 0.4, 0.2)
        basis = basis_for(1.5)
        for L in (1, 2, 3):
            for M in range(1, L + 1):
                plus, _ = relaxation_rate(model, basis, L, M)
                minus, _ = relaxation_rate(model, basis, L, -M)
                assert plus == pytest.approx(minus, rel=1e-7)


class TestRateReport:
    def test_isotropic_report_table_and_flags(self):
        omega_f, tau_c = 0.5, 0.1
        model = FluctuationModel(InteractionTensor.empty(1), omega_f, tau_c)
        report = rate_report(model, basis_for(1))
        assert report.regime["motional_narrowing"] is True
        assert report.regime["omega_f_tau_c"] == pytest.approx(0.05)
        for (L, M), rate in report.rates.items():
            assert rate == pytest.approx(omega_f**2 * tau_c * L * (L + 1), rel=1e-7)
        assert report.cross_terms == {}

    def test_outside_narrowing_flag_and_warning(self):
        model = FluctuationModel(InteractionTensor.empty(0.5), 2.0, 0.5)
        report = rate_report(model, basis_for(0.5))
        assert report.regime["motional_narrowing"] is False
        assert report.rates  # report still produced
        with pytest.warns(PhysicsWarning):
            report.to_relaxation_spec()

    def test_rates_feed_relaxation_spec(self):
        model = FluctuationModel(InteractionTensor.empty(1), 0.5, 0.1)
        spec = rate_report(model, basis_for(1)).to_relaxation_spec()
        assert spec.rate(1, 0) == pytest.approx(0.05, rel=1e-6)
        assert spec.rate(2, 2) == pytest.approx(0.15, rel=1e-6)

    def test_tilted_field_produces_m_mixing_cross_terms(self):
        # H_S along x breaks the z-quantized M labels: same-L cross terms appear
        tensor = omega_from_magnetic(MagneticSpec(2.0, (1.0, 0.0, 0.0)), 1)
        model = FluctuationModel(tensor, 0.4, 0.2)
        report = rate_report(model, basis_for(1))
        same_l = {k: v for k, v in report.cross_terms.items() if k[0][0] == k[1][0]}
        assert same_l, "expected same-rank cross terms for a tilted static field"
        # the fluctuating field is rank 1: it can never mix different ranks
        cross_l = {k: v for k, v in report.cross_terms.items() if k[0][0] != k[1][0]}
        assert not cross_l


class TestQuadratureFailure:
    def test_nonconvergence_raises_numeric_error(self, monkeypatch):
        import scipy.integrate

        from spinmultipoles.errors import NumericError

        def fake_quad(*args, **kwargs):
            return 1.0, 0.5, {"neval": 10}, "roundoff error was detected"

        monkeypatch.setattr(scipy.integrate, "quad", fake_quad)
        model = FluctuationModel(InteractionTensor.empty(1), 0.5, 0.1)
        with pytest.raises(NumericError, match="residual estimate"):
            relaxation_rate(model, basis_for(1), 1, 0)


class TestMonteCarloValidation:
    def test_isotropic_rates_match_benchmark_within_ten_percent(self):
        from spinmultipoles.acceptance import ensemble_decay_rate, mc_relaxation_benchmark

        model, basis, traj = mc_relaxation_benchmark()
        coeffs = traj.coefficients()
        se = traj.standard_errors
        report = rate_report(model, basis)
        for L, M in lm_pairs(2):
            if L == 0:
                continue
            idx = L * L + L + M
            fitted = ensemble_decay_rate(traj.times, coeffs[:, idx], se[:, idx], skip_time=0.5)
            assert fitted == pytest.approx(report.rates[(L, M)], rel=0.10)

    def test_static_field_rates_match_monte_carlo(self):
        # spin 1/2 with a static z field: T1 and T2 against the bath simulation
        from spinmultipoles.acceptance import ensemble_decay_rate

        omega0, omega_f, tau_c = 1.0, 0.5, 0.1
        basis = basis_for(0.5)
        tensor = omega_from_magnetic(MagneticSpec(omega0, (0, 0, 1.0)), 0.5)
        model = FluctuationModel(tensor, omega_f, tau_c)
        # tilted pure state: sizable longitudinal and transverse polarization
        psi = np.array([math.cos(0.5), math.sin(0.5) * np.exp(0.7j)])
        rho0 = np.outer(psi, psi.conj())
        h = tau_c / 20.0
        times = np.arange(0.0, 30.0 + h / 2, h)
        traj = stochastic_evolve(model, rho0, times, n_traj=2000, seed=21, basis=basis)
        coeffs = traj.coefficients()
        se = traj.standard_errors
        for L, M in ((1, 0), (1, 1), (1, -1)):
            idx = L * L + L + M
            fitted = ensemble_decay_rate(traj.times, coeffs[:, idx], se[:, idx], skip_time=0.5)
            quad, _ = relaxation_rate(model, basis, L, M)
            assert fitted == pytest.approx(quad, rel=0.10)

"""The package's runnable acceptance suite.

Ten criteria, each a self-contained check with a frozen tolerance.  They
are exposed both to pytest (tests/test_acceptance.py) and to the CLI
``selftest`` subcommand, and they print one pass/fail line each.

The expensive artifacts (the random interaction suite and the Monte Carlo
relaxation benchmark) are computed once per process and shared between the
criteria that need them.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from decimal import Decimal, getcontext
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .fitting import fit_frequency
from .interactions import (
    EfgSpec,
    InteractionTensor,
    MagneticSpec,
    hamiltonian_matrix,
    omega_from_efg,
    omega_from_magnetic,
)
from .liouville import FluctuationModel, evolve_liouville, stochastic_evolve
from .multipoles import (
    StateMultipoles,
    decompose,
    multipole_norm,
    oriented_state,
    polarization_vector,
)
from .precession import (
    RelaxationSpec,
    apply_relaxation,
    build_generator,
    evolve,
    structure_constant_exact,
)
from .relaxation import relaxation_rate
from .tensors import (
    basis_for,
    commutator,
    flat_index,
    jplus_matrix,
    jz_matrix,
    lm_pairs,
    tensor_operator_closed_form,
)
from .wigner import ExactCoeff, HalfInt, SurdSum, clebsch_gordan, six_j, triangle_ok

__all__ = ["CriterionResult", "run_all", "CRITERIA", "format_line"]

_SUITE_JS = (1, 2, 3, 4, 5)  # doubled j: 1/2 ... 5/2
_SUITE_PER_J = 20
_SUITE_SEED = 2024


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: str
    seconds: float


def format_line(result: CriterionResult) -> str:
    status = "PASS" if result.passed else "FAIL"
    return (
        f"{status}  {result.number:2d}. {result.name}: "
        f"{result.details} [{result.seconds:.1f}s]"
    )


def _random_interaction(rng, twice_j: int) -> InteractionTensor:
    j = twice_j / 2.0
    tensor = omega_from_magnetic(
        MagneticSpec(rng.normal(), tuple(rng.normal(size=3))), j
    )
    if twice_j >= 2:
        phi = rng.normal(size=(3, 3))
        phi = phi + phi.T
        phi -= np.eye(3) * np.trace(phi) / 3.0
        if abs(phi[2, 2]) < 0.1:
            # keep phi_zz away from zero without reintroducing a trace
            phi += np.diag([-0.25, -0.25, 0.5])
        tensor = tensor + omega_from_efg(EfgSpec(phi, rng.normal()), j)
    return tensor


def _random_density_matrix(rng, dim: int) -> np.ndarray:
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


@lru_cache(maxsize=1)
def _random_suite():
    """Shared random dipole+quadrupole cases: generators and trajectories."""
    rng = np.random.default_rng(_SUITE_SEED)
    cases = []
    for twice_j in _SUITE_JS:
        basis = basis_for(twice_j / 2.0)
        for _ in range(_SUITE_PER_J):
            tensor = _random_interaction(rng, twice_j)
            rho0 = _random_density_matrix(rng, basis.dim)
            g_sc = build_generator(tensor, basis, method="structure_constants")
            g_ct = build_generator(tensor, basis, method="commutator_trace")
            t_max = 50.0 / g_sc.norm()
            times = np.linspace(0.0, t_max, 51)
            engine = evolve(g_sc, decompose(rho0, basis), times)
            oracle = evolve_liouville(hamiltonian_matrix(tensor, basis), rho0, times)
            oracle_coeffs = np.array(
                [decompose(m, basis).coeffs for m in oracle.states]
            )
            cases.append(
                {
                    "twice_j": twice_j,
                    "basis": basis,
                    "g_sc": g_sc,
                    "g_ct": g_ct,
                    "engine": engine,
                    "oracle_coeffs": oracle_coeffs,
                }
            )
    return cases


def criterion_1_oracle_equivalence() -> tuple[bool, str]:
    """Multipole evolution equals the direct Liouville oracle, <= 1e-8."""
    worst = 0.0
    for case in _random_suite():
        dev = float(
            np.max(np.abs(case["engine"].coefficients() - case["oracle_coeffs"]))
        )
        worst = max(worst, dev)
    return worst <= 1e-8, f"max deviation {worst:.2e} (tol 1e-8, 100 random cases)"


def criterion_2_dual_generator() -> tuple[bool, str]:
    """Structure-constant and commutator-trace generators agree, <= 1e-10."""
    worst = 0.0
    for case in _random_suite():
        dev = float(np.max(np.abs(case["g_sc"].matrix - case["g_ct"].matrix)))
        worst = max(worst, dev)
    return worst <= 1e-10, f"max entrywise deviation {worst:.2e} (tol 1e-10)"


def criterion_3_bloch_reduction() -> tuple[bool, str]:
    """Pure magnetic field: |P| conserved, frequency gamma|B|, rank-1 decoupled."""
    rng = np.random.default_rng(7)
    worst_p = 0.0
    worst_freq = 0.0
    worst_coupling = 0.0
    for twice_j in _SUITE_JS:
        j = twice_j / 2.0
        basis = basis_for(j)
        gamma = 1.3
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        B = tuple(0.9 * direction)
        spec = MagneticSpec(gamma, B)
        gen = build_generator(omega_from_magnetic(spec, j), basis)

        # rank-1 block decoupled from every other rank
        pairs = lm_pairs(basis.max_rank)
        for (L1, _), row in zip(pairs, gen.matrix):
            for (L2, _), entry in zip(pairs, row):
                if (L1 == 1) != (L2 == 1) and abs(entry) > worst_coupling:
                    worst_coupling = abs(entry)

        omega_l = gamma * np.linalg.norm(B)
        # polarization tilted away from B so it precesses on a wide cone
        p0 = np.cross(direction, [0.0, 0.0, 1.0])
        p0 = 0.8 * p0 / np.linalg.norm(p0) + 0.3 * direction
        initial = oriented_state(basis.spin, p0)
        n_per_period = 2.0 * math.pi / 0.05
        times = np.linspace(0.0, 30.0 * 2.0 * math.pi / omega_l, int(30 * n_per_period))
        traj = evolve(gen, initial, times)
        pvecs = np.array([polarization_vector(s) for s in traj.states])
        norms = np.linalg.norm(pvecs, axis=1)
        worst_p = max(worst_p, float(np.max(np.abs(norms - norms[0]))))
        e1 = np.cross(direction, [0.0, 0.0, 1.0])
        e1 /= np.linalg.norm(e1)
        fitted = fit_frequency(times, pvecs @ e1)
        worst_freq = max(worst_freq, abs(fitted - omega_l) / omega_l)
    passed = worst_p <= 1e-10 and worst_freq <= 1e-6 and worst_coupling <= 1e-12
    return passed, (
        f"|P| drift {worst_p:.2e} (tol 1e-10), freq rel err {worst_freq:.2e} "
        f"(tol 1e-6), rank-1 coupling {worst_coupling:.2e} (tol 1e-12)"
    )


def criterion_4_bloch_relaxation() -> tuple[bool, str]:
    """B along z with 1/T1, 1/T2 damping matches the closed-form solution."""
    worst = 0.0
    for twice_j in (1, 3):
        j = twice_j / 2.0
        basis = basis_for(j)
        gamma, bz = 1.1, 2.0
        T1, T2 = 4.0, 2.5
        gen = build_generator(omega_from_magnetic(MagneticSpec(gamma, (0, 0, bz)), j), basis)
        gen = apply_relaxation(gen, RelaxationSpec.from_T1_T2(T1, T2))
        initial = oriented_state(basis.spin, (0.6, 0.2, 0.7))
        times = np.linspace(0.0, 5.0 * T2, 400)
        traj = evolve(gen, initial, times)
        coeffs = traj.coefficients()
        w0 = gamma * bz
        expect = np.zeros_like(coeffs)
        expect[:, 0] = initial.coeffs[0]
        expect[:, flat_index(1, 0)] = initial.coeffs[flat_index(1, 0)] * np.exp(-times / T1)
        for M in (-1, 1):
            expect[:, flat_index(1, M)] = initial.coeffs[flat_index(1, M)] * np.exp(
                (1j * M * w0 - 1.0 / T2) * times
            )
        worst = max(worst, float(np.max(np.abs(coeffs - expect))))
    return worst <= 1e-8, f"max deviation from closed form {worst:.2e} (tol 1e-8, 5*T2)"


def criterion_5_selection_rules() -> tuple[bool, str]:
    """c_j parity/triangle zeros are exact; L1=1 preserves rank, L1=2 shifts by 1."""
    checked = 0
    for twice_j in range(0, 9):
        spin = twice_j / 2.0
        top = twice_j
        for L1, L2, L in itertools.product(range(top + 1), repeat=3):
            c = structure_constant_exact(spin, L1, L2, L)
            checked += 1
            if (L1 + L2 + L) % 2 == 0 and not c.is_zero:
                return False, f"nonzero c_j at even L1+L2+L: j={spin}, {(L1, L2, L)}"
            if not triangle_ok(L1, L2, L) and not c.is_zero:
                return False, f"nonzero c_j outside triangle: j={spin}, {(L1, L2, L)}"
            if L1 == 1 and L2 != L and not c.is_zero:
                return False, f"magnetic coupling changed rank: j={spin}, {(L1, L2, L)}"
            if L1 == 2 and abs(L2 - L) != 1 and not c.is_zero:
                return False, f"quadrupole coupling rank step != 1: j={spin}, {(L1, L2, L)}"
    return True, f"{checked} exact structure constants obey all selection rules (j <= 4)"


def criterion_6_basis_integrity() -> tuple[bool, str]:
    """Orthonormality, commutation relations and closed forms, up to j = 25/2."""
    worst_gram = 0.0
    worst_comm = 0.0
    worst_closed = 0.0
    for twice_j in range(1, 26):
        j = twice_j / 2.0
        basis = basis_for(j)
        worst_gram = max(worst_gram, basis.gram_defect())
        jz = jz_matrix(j)
        jp = jplus_matrix(j)
        stack = basis.stack()
        pairs = basis.pairs()
        comm_z = np.einsum("ab,lbc->lac", jz, stack) - np.einsum("lab,bc->lac", stack, jz)
        comm_p = np.einsum("ab,lbc->lac", jp, stack) - np.einsum("lab,bc->lac", stack, jp)
        for i, (L, M) in enumerate(pairs):
            worst_comm = max(worst_comm, float(np.max(np.abs(comm_z[i] - M * stack[i]))))
            if abs(M + 1) <= L:
                target = math.sqrt(L * (L + 1) - M * (M + 1)) * stack[flat_index(L, M + 1)]
            else:
                target = np.zeros_like(stack[i])
            worst_comm = max(worst_comm, float(np.max(np.abs(comm_p[i] - target))))
        for L in range(0, min(2, basis.max_rank) + 1):
            for M in range(-L, L + 1):
                dev = float(
                    np.max(
                        np.abs(
                            basis.operator(L, M) - tensor_operator_closed_form(j, L, M)
                        )
                    )
                )
                worst_closed = max(worst_closed, dev)
    passed = worst_gram <= 1e-12 and worst_comm <= 1e-12 and worst_closed <= 1e-12
    return passed, (
        f"gram {worst_gram:.2e}, commutation {worst_comm:.2e}, "
        f"closed-form {worst_closed:.2e} (tol 1e-12, j up to 25/2)"
    )


def criterion_7_conservation() -> tuple[bool, str]:
    """rho_00, hermiticity and purity constant along the criterion-1 runs."""
    worst_rho00 = 0.0
    worst_herm = 0.0
    worst_purity = 0.0
    for case in _random_suite():
        traj = case["engine"]
        coeffs = traj.coefficients()
        worst_rho00 = max(worst_rho00, float(np.max(np.abs(coeffs[:, 0] - coeffs[0, 0]))))
        worst_herm = max(worst_herm, max(s.hermiticity_defect() for s in traj.states))
        norms = np.array([multipole_norm(s) for s in traj.states])
        worst_purity = max(worst_purity, float(np.max(np.abs(norms - norms[0]))))
    passed = max(worst_rho00, worst_herm, worst_purity) <= 1e-10
    return passed, (
        f"rho00 drift {worst_rho00:.2e}, hermiticity {worst_herm:.2e}, "
        f"purity drift {worst_purity:.2e} (tol 1e-10)"
    )


def criterion_8_quadrupole_beating() -> tuple[bool, str]:
    """j=1 axial EFG: rho_11/rho_21 beat at 3 omega_Q, power conserved."""
    omega_q = 0.7
    basis = basis_for(1)
    gen = build_generator(omega_from_efg(EfgSpec.axial(omega_q), 1), basis)
    initial = StateMultipoles.from_components(
        1, {(0, 0): 1.0 / math.sqrt(3.0), (1, 1): 0.5, (1, -1): -0.5}
    )
    beat = 3.0 * omega_q
    times = np.linspace(0.0, 25.0 * 2.0 * math.pi / beat, 30000)
    traj = evolve(gen, initial, times)
    coeffs = traj.coefficients()
    r11 = coeffs[:, flat_index(1, 1)]
    r21 = coeffs[:, flat_index(2, 1)]
    power = np.abs(r11) ** 2 + np.abs(r21) ** 2
    power_drift = float(np.max(np.abs(power - power[0])))
    f11 = fit_frequency(times, r11.real)
    f21 = fit_frequency(times, r21.imag)
    freq_err = max(abs(f11 - beat), abs(f21 - beat)) / beat
    passed = power_drift <= 1e-10 and freq_err <= 1e-6
    return passed, (
        f"|rho11|^2+|rho21|^2 drift {power_drift:.2e} (tol 1e-10), "
        f"beat frequency rel err {freq_err:.2e} (tol 1e-6)"
    )


_MC_TAU_C = 0.1
_MC_OMEGA_F = 0.5  # omega_f * tau_c = 0.05: motional narrowing
_MC_T_MAX = 30.0
_MC_N_TRAJ = 2000
_MC_SEED = 5


@lru_cache(maxsize=1)
def mc_relaxation_benchmark():
    """The criterion-9 Monte Carlo run (shared with the module tests)."""
    basis = basis_for(1)
    psi = np.array(
        [0.85567112 + 0.19046683j, 0.35200243 - 0.08954566j, -0.21077735 - 0.23494277j]
    )
    psi /= np.linalg.norm(psi)
    rho0 = np.outer(psi, psi.conj())
    model = FluctuationModel(InteractionTensor.empty(1), _MC_OMEGA_F, _MC_TAU_C)
    h = _MC_TAU_C / 20.0
    times = np.arange(0.0, _MC_T_MAX + h / 2.0, h)
    traj = stochastic_evolve(model, rho0, times, n_traj=_MC_N_TRAJ, seed=_MC_SEED, basis=basis)
    return model, basis, traj


def ensemble_decay_rate(times, mean, se, skip_time: float) -> float:
    """Weighted log-linear decay fit of a noisy ensemble-mean component.

    Debiases |mean|^2 by the squared standard error and weights each sample
    by its squared signal-to-noise ratio, so the noise-dominated tail
    neither biases nor dominates the slope.
    """
    times = np.asarray(times, dtype=float)
    mag2 = np.abs(mean) ** 2 - (se.real**2 + se.imag**2)
    sig2 = se.real**2 + se.imag**2
    mask = (times >= skip_time) & (mag2 > 4.0 * sig2) & (sig2 > 0)
    t = times[mask]
    y = 0.5 * np.log(mag2[mask])
    w = mag2[mask] / sig2[mask]
    total = w.sum()
    tbar = (w * t).sum() / total
    ybar = (w * y).sum() / total
    slope = (w * (t - tbar) * (y - ybar)).sum() / (w * (t - tbar) ** 2).sum()
    return float(-slope)


def criterion_9_relaxation_rates() -> tuple[bool, str]:
    """Quadrature rates match the Monte Carlo bath simulation within 10%."""
    model, basis, traj = mc_relaxation_benchmark()
    coeffs = traj.coefficients()
    se = traj.standard_errors

    # the Casimir anchor: sum_q [J_q, [J_q, T_LM]] = L(L+1) T_LM
    from .tensors import angular_momentum_matrices

    jmats = angular_momentum_matrices(1)
    worst_casimir = 0.0
    for L, M in lm_pairs(2):
        T = basis.operator(L, M)
        cas = sum(commutator(Q, commutator(Q, T)) for Q in jmats)
        worst_casimir = max(worst_casimir, float(np.max(np.abs(cas - L * (L + 1) * T))))

    worst_rel = 0.0
    fitted = {}
    for L, M in lm_pairs(2):
        if L == 0:
            continue
        idx = flat_index(L, M)
        rate_quad, _ = relaxation_rate(model, basis, L, M)
        rate_mc = ensemble_decay_rate(
            traj.times, coeffs[:, idx], se[:, idx], skip_time=5.0 * _MC_TAU_C
        )
        fitted[(L, M)] = rate_mc
        worst_rel = max(worst_rel, abs(rate_mc - rate_quad) / rate_quad)

    r1 = np.mean([fitted[(1, M)] for M in (-1, 0, 1)])
    r2 = np.mean([fitted[(2, M)] for M in (-2, -1, 0, 1, 2)])
    ratio = r2 / r1
    passed = worst_rel <= 0.10 and abs(ratio - 3.0) <= 0.3 and worst_casimir <= 1e-10
    return passed, (
        f"MC vs quadrature worst rel dev {worst_rel * 100:.1f}% (tol 10%), "
        f"rank2/rank1 ratio {ratio:.2f} (3.0 +- 0.3), Casimir {worst_casimir:.2e} "
        f"(tol 1e-10, n_traj={_MC_N_TRAJ})"
    )


getcontext().prec = 60


def _sqrt_fraction(frac: Fraction) -> Decimal:
    return (Decimal(frac.numerator) / Decimal(frac.denominator)).sqrt()


def _float_boundary_error(coeff: ExactCoeff) -> float:
    """Relative error of float(coeff) against 60-digit decimal arithmetic."""
    if coeff.is_zero:
        return 0.0
    hp = coeff.sign * _sqrt_fraction(coeff.rational)
    return float(abs((Decimal(float(coeff)) - hp) / hp))


def _valid_triads_ok(tj: tuple[int, ...]) -> bool:
    a, b, c, d, e, f = tj
    return (
        abs(a - b) <= c <= a + b and (a + b + c) % 2 == 0
        and abs(a - e) <= f <= a + e and (a + e + f) % 2 == 0
        and abs(d - b) <= f <= d + b and (d + b + f) % 2 == 0
        and abs(d - e) <= c <= d + e and (d + e + c) % 2 == 0
    )


def _six_j_orbit(tj: tuple[int, ...]):
    """The 24 argument tuples related by column permutation and row swaps."""
    a, b, c, d, e, f = tj
    columns = ((a, d), (b, e), (c, f))
    for perm in itertools.permutations(columns):
        for swap_pair in ((0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)):
            cols = [
                (col[1], col[0]) if s else col for col, s in zip(perm, swap_pair)
            ]
            yield (cols[0][0], cols[1][0], cols[2][0], cols[0][1], cols[1][1], cols[2][1])


def _recoupling_contraction(tj: tuple[int, ...]) -> SurdSum:
    """Quadruple Clebsch-Gordan contraction whose value is the scaled 6j."""
    ta, tb, tc, td, te, tf = tj
    tM = te  # top projection of the total angular momentum
    total = SurdSum.zero()
    for tm1 in range(-ta, ta + 1, 2):
        for tm2 in range(-tb, tb + 1, 2):
            tm12 = tm1 + tm2
            if abs(tm12) > tc:
                continue
            tm3 = tM - tm12
            if abs(tm3) > td:
                continue
            tm23 = tm2 + tm3
            if abs(tm23) > tf:
                continue
            args = [
                (ta, tm1, tb, tm2, tc, tm12),
                (tc, tm12, td, tm3, te, tM),
                (tb, tm2, td, tm3, tf, tm23),
                (ta, tm1, tf, tm23, te, tM),
            ]
            term = ExactCoeff(1, Fraction(1))
            for a1, m1, a2, m2, a3, m3 in args:
                term = term * clebsch_gordan(
                    HalfInt(a1), HalfInt(m1), HalfInt(a2), HalfInt(m2),
                    HalfInt(a3), HalfInt(m3),
                )
                if term.is_zero:
                    break
            if not term.is_zero:
                total = total + SurdSum.from_coeff(term)
    return total


def criterion_10_exact_algebra() -> tuple[bool, str]:
    """CG orthogonality and 6j recoupling hold exactly; float boundary <= 1e-15."""
    halves = range(0, 7)  # doubled values 0..6: all arguments <= 3

    # Clebsch-Gordan orthogonality, exact in surd arithmetic
    n_orth = 0
    worst_float = 0.0
    for tj1, tj2 in itertools.product(halves, repeat=2):
        j_range = range(abs(tj1 - tj2), tj1 + tj2 + 1, 2)
        for tJ, tJp in itertools.product(j_range, repeat=2):
            for tM in range(-min(tJ, tJp), min(tJ, tJp) + 1, 2):
                total = SurdSum.zero()
                for tm1 in range(-tj1, tj1 + 1, 2):
                    tm2 = tM - tm1
                    if abs(tm2) > tj2:
                        continue
                    c1 = clebsch_gordan(
                        HalfInt(tj1), HalfInt(tm1), HalfInt(tj2), HalfInt(tm2),
                        HalfInt(tJ), HalfInt(tM),
                    )
                    c2 = clebsch_gordan(
                        HalfInt(tj1), HalfInt(tm1), HalfInt(tj2), HalfInt(tm2),
                        HalfInt(tJp), HalfInt(tM),
                    )
                    worst_float = max(worst_float, _float_boundary_error(c1))
                    if not (c1.is_zero or c2.is_zero):
                        total = total + SurdSum.from_coeff(c1 * c2)
                expected = (
                    SurdSum.from_coeff(ExactCoeff.from_rational(1))
                    if tJ == tJp
                    else SurdSum.zero()
                )
                if total != expected:
                    return False, f"CG orthogonality failed at 2j=({tj1},{tj2},{tJ},{tJp}), 2M={tM}"
                n_orth += 1

    # 6j against the quadruple-CG recoupling contraction, exact
    n_sixj = 0
    n_orbit = 0
    checked_canonical: dict[tuple[int, ...], None] = {}
    for tj in itertools.product(halves, repeat=6):
        if not _valid_triads_ok(tj):
            if not six_j(*(HalfInt(t) for t in tj)).is_zero:
                return False, f"6j nonzero despite invalid triad: 2j = {tj}"
            continue
        value = six_j(*(HalfInt(t) for t in tj))
        worst_float = max(worst_float, _float_boundary_error(value))
        canonical = min(_six_j_orbit(tj))
        canonical_value = six_j(*(HalfInt(t) for t in canonical))
        if value != canonical_value:
            return False, f"6j not invariant over its symmetry orbit: 2j = {tj}"
        n_orbit += 1
        if tj != canonical or canonical in checked_canonical:
            continue
        checked_canonical[canonical] = None
        ta, tb, tc, td, te, tf = tj
        phase_exp = (ta + tb + td + te) // 2
        phase = -1 if phase_exp % 2 else 1
        scale = ExactCoeff(phase, Fraction((tc + 1) * (tf + 1)))
        lhs = _recoupling_contraction(tj)
        rhs = SurdSum.from_coeff(value * scale)
        if lhs != rhs:
            return False, f"6j-CG contraction mismatch at 2j = {tj}"
        n_sixj += 1

    passed = worst_float <= 1e-15
    return passed, (
        f"{n_orth} orthogonality sums and {n_sixj} recoupling contractions exact "
        f"({n_orbit} orbit checks); float boundary {worst_float:.2e} (tol 1e-15)"
    )


CRITERIA = [
    (1, "oracle equivalence", criterion_1_oracle_equivalence),
    (2, "dual generator construction", criterion_2_dual_generator),
    (3, "Bloch reduction", criterion_3_bloch_reduction),
    (4, "Bloch relaxation", criterion_4_bloch_relaxation),
    (5, "selection rules", criterion_5_selection_rules),
    (6, "basis integrity", criterion_6_basis_integrity),
    (7, "conservation suite", criterion_7_conservation),
    (8, "quadrupole beating", criterion_8_quadrupole_beating),
    (9, "relaxation-rate validation", criterion_9_relaxation_rates),
    (10, "exact algebra", criterion_10_exact_algebra),
]


def run_all(echo=print) -> list[CriterionResult]:
    """Run every acceptance criterion, printing one line per criterion."""
    results = []
    for number, name, func in CRITERIA:
        t0 = time.perf_counter()
        try:
            passed, details = func()
        except Exception as err:  # a crash is a failure, not an abort
            passed, details = False, f"raised {type(err).__name__}: {err}"
        result = CriterionResult(number, name, passed, details, time.perf_counter() - t0)
        results.append(result)
        if echo is not None:
            echo(format_line(result))
    return results

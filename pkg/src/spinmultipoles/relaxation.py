"""Second-order relaxation rates for the fluctuating-field bath model.

Each multipole component acquires an exponential decay constant

    1/tau_LM = Re integral_0^inf d tau C(tau)
               sum_q Tr{T_LM^dag [J_q^I(-tau), [J_q, T_LM]]},

where C(tau) = omega_f^2 exp(-tau/tau_c) is the bath autocorrelation and
J_q^I(-tau) is the interaction-picture image of J_q under the static
Hamiltonian H_S.  The double commutator is the operator-product convention
of the tensor bra-ket calculus; the (L'M') sum of the exact second-order
equation is restricted to the diagonal term, and the neglected off-diagonal
couplings are reported separately as cross terms so their size can be
inspected.

The integral is evaluated by adaptive quadrature on [0, 40 tau_c], where
the correlation factor has decayed to ~4e-18.  For H_S = 0 the rates reduce
to the white-noise form omega_f^2 tau_c L(L+1) because
sum_q [J_q, [J_q, T_LM]] = L(L+1) T_LM.

Validity: the exponential per-component decay assumes motional narrowing,
omega_f tau_c << 1.  The report carries a flag (threshold 0.1) and
converting a report into damping terms outside that regime warns.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from .errors import NumericError, PhysicsWarning
from .liouville import FluctuationModel
from .precession import RelaxationSpec
from .tensors import SpinSystem, TensorBasis, angular_momentum_matrices, lm_pairs

__all__ = ["RateReport", "relaxation_rate", "rate_report"]

_UPPER_LIMIT_TAUS = 40.0
_NARROWING_THRESHOLD = 0.1
_QUAD_LIMIT = 200


class _RateEvaluator:
    """Shared precomputation for all (L, M) rate integrals of one model."""

    def __init__(self, model: FluctuationModel, basis: TensorBasis):
        self.model = model
        self.basis = basis
        H_S = model.static_hamiltonian(basis)
        self.w, self.V = np.linalg.eigh(H_S)
        self.gaps = self.w[:, None] - self.w[None, :]
        jmats = angular_momentum_matrices(basis.spin)
        # everything in the H_S eigenbasis
        self.j_tilde = [self.V.conj().T @ J @ self.V for J in jmats]
        stack = basis.stack()
        self.t_tilde = np.einsum("ab,lbc,cd->lad", self.V.conj().T, stack, self.V)

    def inner_commutators(self, idx: int) -> list[np.ndarray]:
        """[J_q, T_LM] in the eigenbasis, for the flattened component idx."""
        T = self.t_tilde[idx]
        return [Jq @ T - T @ Jq for Jq in self.j_tilde]

    def correlation(self, tau: float) -> float:
        m = self.model
        return m.fluctuation_amplitude**2 * math.exp(-tau / m.correlation_time)

    def double_commutator_trace(self, bra_idx: int, inner: list[np.ndarray], tau: float) -> complex:
        """sum_q Tr{T_bra^dag [J_q^I(-tau), [J_q, T_ket]]} at one lag tau."""
        phases = np.exp(-1j * self.gaps * tau)
        bra = self.t_tilde[bra_idx]
        total = 0.0 + 0.0j
        for Jq, Cq in zip(self.j_tilde, inner):
            Jq_tau = Jq * phases
            outer = Jq_tau @ Cq - Cq @ Jq_tau
            total += np.vdot(bra, outer)
        return complex(total)


def _integrate(func, upper: float, quad_tol: float, scale: float) -> tuple[float, dict]:
    """Adaptive quadrature with a convergence check."""
    epsabs = max(quad_tol * scale, 1e-300)
    result = scipy.integrate.quad(
        func, 0.0, upper, epsabs=epsabs, epsrel=quad_tol,
        limit=_QUAD_LIMIT, full_output=1,
    )
    value, abserr, info = result[0], result[1], result[2]
    diagnostics = {
        "abserr": float(abserr),
        "neval": int(info["neval"]),
        "upper_limit": upper,
    }
    if len(result) > 3:
        raise NumericError(
            f"rate quadrature did not converge: {result[3]} "
            f"(residual estimate {abserr:.3e})"
        )
    return float(value), diagnostics


def relaxation_rate(
    model: FluctuationModel,
    basis: TensorBasis,
    L: int,
    M: int,
    quad_tol: float = 1e-8,
) -> tuple[float, dict]:
    """Decay rate 1/tau_LM of one multipole component, with diagnostics.

    Returns ``(rate, diagnostics)``; the diagnostics carry the quadrature
    residual estimate, the number of integrand evaluations and the regime
    numbers omega_f*tau_c and ||H_S||*tau_c.
    """
    ev = _RateEvaluator(model, basis)
    return _rate_from_evaluator(ev, L, M, quad_tol)


def _rate_from_evaluator(ev: _RateEvaluator, L: int, M: int, quad_tol: float) -> tuple[float, dict]:
    basis = ev.basis
    idx = basis.pairs().index((L, M))
    model = ev.model
    tau_c = model.correlation_time
    omega_f = model.fluctuation_amplitude
    hs_norm = float(np.max(np.abs(ev.w))) if ev.w.size else 0.0
    regime = {
        "omega_f_tau_c": omega_f * tau_c,
        "hs_norm_tau_c": hs_norm * tau_c,
        "motional_narrowing": omega_f * tau_c <= _NARROWING_THRESHOLD,
    }
    if omega_f == 0.0:
        return 0.0, {"abserr": 0.0, "neval": 0, "upper_limit": 0.0, **regime}

    inner = ev.inner_commutators(idx)

    def integrand(tau: float) -> float:
        return ev.correlation(tau) * ev.double_commutator_trace(idx, inner, tau).real

    scale = omega_f**2 * tau_c * max(1.0, L * (L + 1))
    value, diagnostics = _integrate(integrand, _UPPER_LIMIT_TAUS * tau_c, quad_tol, scale)
    diagnostics.update(regime)
    return value, diagnostics


@dataclass(frozen=True)
class RateReport:
    """Full table of per-component rates plus regime and cross-term data."""

    spin: SpinSystem
    rates: dict[tuple[int, int], float]
    regime: dict
    cross_terms: dict[tuple[tuple[int, int], tuple[int, int]], complex] = field(
        default_factory=dict
    )

    def to_relaxation_spec(self) -> RelaxationSpec:
        """Rates as damping terms for the precession engine.

        Exponential per-component damping of lab-frame multipoles is only
        justified in the motional-narrowing regime; outside it the spec is
        still returned but a PhysicsWarning is emitted.
        """
        if not self.regime.get("motional_narrowing", False):
            warnings.warn(
                "relaxation rates were computed outside the motional-narrowing "
                f"regime (omega_f tau_c = {self.regime.get('omega_f_tau_c'):.3g}); "
                "per-component exponential damping may be inaccurate",
                PhysicsWarning,
                stacklevel=2,
            )
        return RelaxationSpec({lm: rate for lm, rate in self.rates.items() if rate > 0})


def rate_report(
    model: FluctuationModel,
    basis: TensorBasis,
    quad_tol: float = 1e-8,
) -> RateReport:
    """Rates for every (L, M) of the basis, with cross-term diagnostics.

    Cross terms are the off-diagonal second-order couplings
    (L'M'| ... |LM) that the single-exponential treatment drops; they are
    reported so the quality of the diagonal approximation can be judged,
    but they never feed the engine.
    """
    ev = _RateEvaluator(model, basis)
    pairs = lm_pairs(basis.max_rank)
    rates: dict[tuple[int, int], float] = {}
    regime: dict = {}
    for L, M in pairs:
        rate, diag = _rate_from_evaluator(ev, L, M, quad_tol)
        rates[(L, M)] = rate
        if not regime:
            regime = {
                "omega_f_tau_c": diag["omega_f_tau_c"],
                "hs_norm_tau_c": diag["hs_norm_tau_c"],
                "motional_narrowing": diag["motional_narrowing"],
            }

    cross: dict[tuple[tuple[int, int], tuple[int, int]], complex] = {}
    omega_f = model.fluctuation_amplitude
    tau_c = model.correlation_time
    if omega_f > 0.0:
        scale = omega_f**2 * tau_c
        upper = _UPPER_LIMIT_TAUS * tau_c
        probe_taus = np.linspace(0.0, 3.0 * tau_c, 7)
        for ket_i, ket in enumerate(pairs):
            inner = ev.inner_commutators(ket_i)
            for bra_i, bra in enumerate(pairs):
                if bra_i == ket_i:
                    continue
                # cheap screen: an identically-zero integrand needs no quadrature
                samples = [
                    ev.correlation(t) * ev.double_commutator_trace(bra_i, inner, t)
                    for t in probe_taus
                ]
                if max(abs(s) for s in samples) < 1e-13 * scale:
                    continue
                re, _ = _integrate(
                    lambda t: ev.correlation(t)
                    * ev.double_commutator_trace(bra_i, inner, t).real,
                    upper, quad_tol, scale,
                )
                im, _ = _integrate(
                    lambda t: ev.correlation(t)
                    * ev.double_commutator_trace(bra_i, inner, t).imag,
                    upper, quad_tol, scale,
                )
                cross[(bra, ket)] = re + 1j * im
    return RateReport(spin=basis.spin, rates=rates, regime=regime, cross_terms=cross)

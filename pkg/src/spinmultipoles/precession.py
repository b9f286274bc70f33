"""The generalized precession engine in multipole space.

The equation of motion of the state multipoles,

    d/dt rho_LM = i sum_{L1 L2} c_j(L1, L2, L) [Omega_L1 x rho_L2]_LM
                  - rho_LM / tau_LM,

is a linear system on the flattened coefficient vector.  This module builds
its generator matrix G by two independent routes and integrates it.

Route "commutator_trace" evaluates the coupling matrix elements directly as
traces, G[(L,M),(L2,M2)] = i Tr{T_L2M2^dag [H, T_LM]}.  This construction is
the normative one: it has no convention freedom once the T_LM are fixed.

Route "structure_constants" uses the recoupling coefficients

    c_j(L1, L2, L) = -(L||T_L1||L2) / sqrt(2L+1),
    (L||T_L1||L2) = (-1)^(2j+L) [(-1)^(L1+L2-L) - 1]
                    * sqrt((2L1+1)(2L2+1)(2L+1)) {L1 L2 L; j j j},

together with Clebsch-Gordan coefficients.  The two routes agreeing
entrywise is the keystone consistency check of the whole package.

Selection rules built into c_j: it vanishes unless L1 + L2 + L is odd and
the triangle rule holds, so a magnetic interaction (L1 = 1) never changes
the rank while a quadrupole interaction (L1 = 2) changes it by exactly +-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import RankError
from .interactions import InteractionTensor, hamiltonian_matrix
from .multipoles import StateMultipoles
from .tensors import SpinSystem, TensorBasis, flat_index, lm_pairs
from .trajectory import Trajectory
from .wigner import ExactCoeff, HalfInt, clebsch_gordan, six_j

__all__ = [
    "reduced_matrix_element",
    "reduced_matrix_element_exact",
    "structure_constant",
    "structure_constant_exact",
    "StructureConstants",
    "MultipoleGenerator",
    "RelaxationSpec",
    "build_generator",
    "apply_relaxation",
    "evolve",
]


@lru_cache(maxsize=None)
def _rme_exact_core(twice_j: int, L1: int, L2: int, L: int) -> ExactCoeff:
    if (L1 + L2 - L) % 2 == 0:
        return ExactCoeff.zero()  # the [(-1)^(L1+L2-L) - 1] bracket vanishes
    j = HalfInt(twice_j)
    sj = six_j(L1, L2, L, j, j, j)
    if sj.is_zero:
        return ExactCoeff.zero()
    # (-1)^(2j+L) times the bracket value -2, times
    # sqrt((2L1+1)(2L2+1)(2L+1)): fold 2*sqrt(n) = sqrt(4n) in exactly.
    sign = sj.sign if (twice_j + L) % 2 == 0 else -sj.sign
    radicand = sj.rational * (4 * (2 * L1 + 1) * (2 * L2 + 1) * (2 * L + 1))
    return ExactCoeff(-sign, radicand)


def reduced_matrix_element_exact(spin, L1: int, L2: int, L: int) -> ExactCoeff:
    """(L || T_L1 || L2) for tensor bra-kets, exact.

    Zero whenever L1 + L2 + L is even, any rank exceeds 2j, or the triangle
    rule fails (all through exact selection rules, no tolerances).
    """
    spin = SpinSystem.of(spin)
    for name, rank in (("L1", L1), ("L2", L2), ("L", L)):
        if not isinstance(rank, int) or rank < 0:
            raise ValueError(f"{name} must be a nonnegative integer")
    return _rme_exact_core(spin.j.twice, L1, L2, L)


def reduced_matrix_element(spin, L1: int, L2: int, L: int) -> float:
    return float(reduced_matrix_element_exact(spin, L1, L2, L))


def structure_constant_exact(spin, L1: int, L2: int, L: int) -> ExactCoeff:
    """c_j(L1, L2, L) = -(L||T_L1||L2)/sqrt(2L+1), exact."""
    rme = reduced_matrix_element_exact(spin, L1, L2, L)
    if rme.is_zero:
        return rme
    return ExactCoeff(-rme.sign, rme.rational / (2 * L + 1))


def structure_constant(spin, L1: int, L2: int, L: int) -> float:
    return float(structure_constant_exact(spin, L1, L2, L))


@dataclass(frozen=True)
class StructureConstants:
    """Table of c_j(L1, L2, L) for one spin, ranks limited to 2j."""

    spin: SpinSystem
    c: dict[tuple[int, int, int], float]

    @classmethod
    def build(cls, spin, max_source_rank: int | None = None) -> "StructureConstants":
        spin = SpinSystem.of(spin)
        top = spin.max_rank
        src = top if max_source_rank is None else min(max_source_rank, top)
        table = {}
        for L1 in range(src + 1):
            for L2 in range(top + 1):
                for L in range(top + 1):
                    value = structure_constant(spin, L1, L2, L)
                    if value != 0.0:
                        table[(L1, L2, L)] = value
        return cls(spin, table)

    def value(self, L1: int, L2: int, L: int) -> float:
        return self.c.get((L1, L2, L), 0.0)


@dataclass(frozen=True)
class MultipoleGenerator:
    """Generator matrix G with d/dt rho = G rho on flattened multipoles."""

    spin: SpinSystem
    matrix: np.ndarray
    relaxation_applied: bool = False

    def __post_init__(self):
        size = self.spin.dim**2
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (size, size):
            raise ValueError(f"generator must be {size}x{size}")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    def norm(self) -> float:
        """Spectral norm of G; sets the natural frequency/time scale."""
        return float(np.linalg.norm(self.matrix, 2))


@dataclass(frozen=True)
class RelaxationSpec:
    """Per-component decay rates 1/tau_LM >= 0 (1/s).

    Rates must satisfy rate(L, M) = rate(L, -M): an M-asymmetric choice
    would destroy the hermiticity constraint rho_{L,-M} = (-1)^M rho_LM^*
    along the flow, i.e. evolve a physical state into an unphysical one.
    Components not listed do not decay.
    """

    rates: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for (L, M), rate in self.rates.items():
            rate = float(rate)
            if not math.isfinite(rate) or rate < 0.0:
                raise ValueError(f"rate for (L={L}, M={M}) must be finite and >= 0")
            if L < 0 or abs(M) > L:
                raise ValueError(f"invalid component (L, M) = ({L}, {M})")
            cleaned[(L, M)] = rate
        for (L, M), rate in cleaned.items():
            if M != 0 and cleaned.get((L, -M)) != rate:
                raise ValueError(
                    f"rate(L={L}, M={M}) = {rate} has no equal partner at M = {-M}; "
                    "M-asymmetric rates would break the hermiticity of rho. "
                    "Specify both signs with the same value."
                )
        object.__setattr__(self, "rates", cleaned)

    @classmethod
    def from_T1_T2(cls, T1: float, T2: float) -> "RelaxationSpec":
        """Bloch rates: 1/T1 on the longitudinal (1,0), 1/T2 on (1,+-1)."""
        return cls({(1, 0): 1.0 / T1, (1, 1): 1.0 / T2, (1, -1): 1.0 / T2})

    @classmethod
    def from_symmetric(cls, half_table: dict[tuple[int, int], float]) -> "RelaxationSpec":
        """Build from rates given for M >= 0 only, mirroring to -M."""
        rates = {}
        for (L, M), rate in half_table.items():
            rates[(L, M)] = rate
            rates[(L, -M)] = rate
        return cls(rates)

    def rate(self, L: int, M: int) -> float:
        return self.rates.get((L, M), 0.0)


def build_generator(
    tensor: InteractionTensor,
    basis: TensorBasis,
    method: str = "structure_constants",
) -> MultipoleGenerator:
    """Assemble the coherent generator for a static interaction tensor.

    method "structure_constants" combines c_j(L1, L2, L) with Clebsch-Gordan
    coefficients; method "commutator_trace" computes the same matrix from
    commutator traces against the assembled Hamiltonian.
    """
    if tensor.spin != basis.spin:
        raise ValueError("interaction tensor and basis belong to different spins")
    for L in tensor.ranks():
        if L > basis.max_rank:
            raise RankError(f"interaction rank L = {L} exceeds 2j = {basis.max_rank}")
    if method == "commutator_trace":
        matrix = _generator_commutator_trace(tensor, basis)
    elif method == "structure_constants":
        matrix = _generator_structure_constants(tensor, basis)
    else:
        raise ValueError(f"unknown method {method!r}")
    return MultipoleGenerator(basis.spin, matrix)


def _generator_commutator_trace(tensor: InteractionTensor, basis: TensorBasis) -> np.ndarray:
    H = hamiltonian_matrix(tensor, basis)
    stack = basis.stack()
    size = basis.size
    # G[(L,M),(L2,M2)] = i Tr{T_L2M2^dag [H, T_LM]}, with the trace written
    # as sum_ab conj(T_L2M2)[a,b] * [H, T_LM][a,b].
    comm = np.einsum("ab,lbc->lac", H, stack) - np.einsum("lab,bc->lac", stack, H)
    flat_basis = stack.reshape(size, -1)
    flat_comm = comm.reshape(size, -1)
    return 1j * (flat_comm @ flat_basis.conj().T)


def _generator_structure_constants(tensor: InteractionTensor, basis: TensorBasis) -> np.ndarray:
    spin = basis.spin
    pairs = lm_pairs(spin.max_rank)
    size = basis.size
    out = np.zeros((size, size), dtype=complex)
    for (L1, M1), om in tensor.omega.items():
        if om == 0:
            continue
        for L, M in pairs:
            M2 = M - M1
            row = flat_index(L, M)
            for L2 in range(abs(L - L1), min(spin.max_rank, L + L1) + 1):
                if abs(M2) > L2:
                    continue
                c = structure_constant(spin, L1, L2, L)
                if c == 0.0:
                    continue
                cg = clebsch_gordan(L1, M1, L2, M2, L, M)
                if cg.is_zero:
                    continue
                out[row, flat_index(L2, M2)] += 1j * c * float(cg) * om
    return out


def apply_relaxation(gen: MultipoleGenerator, relax: RelaxationSpec) -> MultipoleGenerator:
    """G' = G - diag(1/tau_LM): per-component exponential damping."""
    size = gen.spin.dim**2
    damping = np.zeros(size)
    for (L, M), rate in relax.rates.items():
        if L > gen.spin.max_rank:
            raise RankError(f"relaxation rank L = {L} exceeds 2j = {gen.spin.max_rank}")
        damping[flat_index(L, M)] = rate
    return MultipoleGenerator(
        gen.spin, gen.matrix - np.diag(damping), relaxation_applied=True
    )


_COND_LIMIT = 1e8


def evolve(
    gen: MultipoleGenerator,
    initial: StateMultipoles,
    times,
    method: str = "eig",
) -> Trajectory:
    """Integrate d/dt rho = G rho from t = 0 through the requested times.

    method "eig" (default) propagates exactly through the eigendecomposition
    of the time-independent G; if the eigenvector matrix is ill conditioned
    (cond > 1e8) it falls back to scaling-and-squaring matrix exponentials
    and records that in the trajectory metadata.  method "rk4" is a fixed-step
    classical Runge-Kutta integrator with step h <= 0.05/||G||.
    """
    if initial.spin != gen.spin:
        raise ValueError("initial state and generator belong to different spins")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a nonempty 1-d sequence")
    if times[0] < 0:
        raise ValueError("times must start at t >= 0")
    if times.size > 1 and not np.all(np.diff(times) > 0):
        raise ValueError("times must be strictly increasing")

    metadata = {"method": method, "relaxation": gen.relaxation_applied}
    if method == "eig":
        coeffs = _evolve_eig(gen.matrix, initial.coeffs, times, metadata)
    elif method == "rk4":
        coeffs = _evolve_rk4(gen.matrix, initial.coeffs, times)
    else:
        raise ValueError(f"unknown method {method!r}")
    states = [StateMultipoles(gen.spin, c) for c in coeffs]
    return Trajectory(times=times, states=states, metadata=metadata)


def _evolve_eig(G: np.ndarray, y0: np.ndarray, times: np.ndarray, metadata: dict) -> np.ndarray:
    eigvals, S = np.linalg.eig(G)
    cond = np.linalg.cond(S)
    metadata["eig_condition"] = float(cond)
    if cond > _COND_LIMIT:
        # Near-defective generator: fall back to explicit matrix exponentials.
        metadata["fallback"] = "expm"
        return np.array([scipy.linalg.expm(G * t) @ y0 for t in times])
    c0 = np.linalg.solve(S, y0)
    phases = np.exp(np.outer(times, eigvals))
    return (phases * c0) @ S.T


def _evolve_rk4(G: np.ndarray, y0: np.ndarray, times: np.ndarray) -> np.ndarray:
    gnorm = np.linalg.norm(G, 2)
    # 0.0125/||G|| keeps the accumulated O(h^4) error near 1e-9 out to
    # ||G|| t ~ 50 (the documented bound is h <= 0.05/||G||).
    h_max = 0.0125 / gnorm if gnorm > 0 else np.inf
    out = np.empty((times.size, y0.size), dtype=complex)
    y = y0.astype(complex)
    t_prev = 0.0
    for i, t in enumerate(times):
        span = t - t_prev
        if span > 0:
            n_steps = max(1, int(math.ceil(span / h_max))) if np.isfinite(h_max) else 1
            h = span / n_steps
            for _ in range(n_steps):
                k1 = G @ y
                k2 = G @ (y + 0.5 * h * k1)
                k3 = G @ (y + 0.5 * h * k2)
                k4 = G @ (y + h * k3)
                y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i] = y
        t_prev = t
    return out

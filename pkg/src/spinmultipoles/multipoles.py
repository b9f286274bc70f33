"""State multipoles: density matrices as irreducible tensor coefficients.

A density matrix rho of a spin-j system is equivalent to the (2j+1)^2
complex coefficients rho_LM = Tr(rho T_LM), the state multipoles, with
rho = sum_LM rho_LM T_LM^dag.  Rank 1 is the orientation (polarization),
rank 2 the alignment.  Coefficients are stored flattened in the order
L^2 + L + M.

For a physical (hermitian, unit-trace) rho the coefficients satisfy
rho_{L,-M} = (-1)^M rho_LM^* and rho_00 = 1/sqrt(2j+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tensors import SpinSystem, TensorBasis, flat_index, lm_pairs, norm_constants
from .wigner import HalfInt, clebsch_gordan

__all__ = [
    "StateMultipoles",
    "AngularDistributionSpec",
    "AngularDistribution",
    "decompose",
    "reconstruct",
    "clebsch_equivalence_check",
    "tensor_product",
    "angular_distribution",
    "multipole_norm",
    "oriented_state",
    "polarization_vector",
]


@dataclass(frozen=True)
class StateMultipoles:
    """Immutable snapshot of multipole coefficients rho_LM for one spin."""

    spin: SpinSystem
    coeffs: np.ndarray

    def __post_init__(self):
        expected = self.spin.dim**2
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.shape != (expected,):
            raise ValueError(
                f"need {expected} coefficients for j = {self.spin.j}, got {arr.shape}"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def zeros(cls, spin) -> "StateMultipoles":
        spin = SpinSystem.of(spin)
        return cls(spin, np.zeros(spin.dim**2, dtype=complex))

    @classmethod
    def from_components(cls, spin, components: dict[tuple[int, int], complex]) -> "StateMultipoles":
        spin = SpinSystem.of(spin)
        coeffs = np.zeros(spin.dim**2, dtype=complex)
        for (L, M), value in components.items():
            if L < 0 or L > spin.max_rank or abs(M) > L:
                raise ValueError(f"(L, M) = ({L}, {M}) invalid for j = {spin.j}")
            coeffs[flat_index(L, M)] = value
        return cls(spin, coeffs)

    @classmethod
    def maximally_mixed(cls, spin) -> "StateMultipoles":
        spin = SpinSystem.of(spin)
        return cls.from_components(spin, {(0, 0): 1.0 / math.sqrt(spin.dim)})

    def __getitem__(self, lm: tuple[int, int]) -> complex:
        L, M = lm
        if L < 0 or L > self.spin.max_rank or abs(M) > L:
            raise KeyError(f"(L, M) = ({L}, {M}) invalid for j = {self.spin.j}")
        return complex(self.coeffs[flat_index(L, M)])

    def pairs(self) -> list[tuple[int, int]]:
        return lm_pairs(self.spin.max_rank)

    def hermiticity_defect(self) -> float:
        """Max |rho_{L,-M} - (-1)^M rho_LM^*| over all components."""
        worst = 0.0
        for L, M in self.pairs():
            if M < 0:
                continue
            a = self.coeffs[flat_index(L, -M)]
            b = (-1) ** M * np.conj(self.coeffs[flat_index(L, M)])
            worst = max(worst, abs(a - b))
        return worst

    def trace_defect(self) -> float:
        """|rho_00 - 1/sqrt(2j+1)|, zero for a unit-trace state."""
        return abs(self.coeffs[0] - 1.0 / math.sqrt(self.spin.dim))


def decompose(rho: np.ndarray, basis: TensorBasis) -> StateMultipoles:
    """State multipoles of a density matrix: rho_LM = Tr(rho T_LM)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (basis.dim, basis.dim):
        raise ValueError(f"rho has shape {rho.shape}, expected {(basis.dim, basis.dim)}")
    coeffs = np.einsum("ab,lba->l", rho, basis.stack())
    return StateMultipoles(basis.spin, coeffs)


def reconstruct(mult: StateMultipoles, basis: TensorBasis) -> np.ndarray:
    """Density matrix from multipoles: rho = sum_LM rho_LM T_LM^dag."""
    if mult.spin != basis.spin:
        raise ValueError("multipoles and basis belong to different spins")
    return np.einsum("l,lba->ab", mult.coeffs, basis.stack().conj())


def clebsch_equivalence_check(rho: np.ndarray, basis: TensorBasis) -> float:
    """Max deviation between the trace form and the double Clebsch-Gordan sum.

    Evaluates rho_LM = sum_{m m'} sqrt((2L+1)/(2j+1)) <j m L M|j m'> <jm|rho|jm'>
    directly and returns the largest difference from :func:`decompose`.
    """
    rho = np.asarray(rho, dtype=complex)
    reference = decompose(rho, basis).coeffs
    spin = basis.spin
    tj = spin.j.twice
    worst = 0.0
    for L, M in lm_pairs(spin.max_rank):
        scale = math.sqrt((2 * L + 1) / spin.dim)
        total = 0.0 + 0.0j
        for col, tm in enumerate(range(-tj, tj + 1, 2)):
            tmp = tm + 2 * M
            if abs(tmp) > tj:
                continue
            row = (tmp + tj) // 2
            cg = clebsch_gordan(
                spin.j, HalfInt(tm), HalfInt(2 * L), HalfInt(2 * M), spin.j, HalfInt(tmp)
            )
            total += scale * float(cg) * rho[col, row]
        worst = max(worst, abs(total - reference[flat_index(L, M)]))
    return worst


def tensor_product(omega, L1: int, mult: StateMultipoles, L2: int, L: int, M: int) -> complex:
    """Rank-L component of the bilinear tensor product of Omega_L1 with rho_L2.

    [Omega_L1 x rho_L2]_LM = sum_{M1+M2=M} <L1 M1 L2 M2|L M> Omega_L1M1 rho_L2M2.

    ``omega`` is anything with component access by (L, M): an
    InteractionTensor, or a plain mapping.  Outside the triangle range
    |L1-L2| <= L <= L1+L2 the result is exactly zero.
    """
    components = getattr(omega, "omega", omega)
    if abs(M) > L:
        return 0.0 + 0.0j
    total = 0.0 + 0.0j
    for M1 in range(-L1, L1 + 1):
        M2 = M - M1
        if abs(M2) > L2:
            continue
        om = complex(components.get((L1, M1), 0.0))
        if om == 0:
            continue
        rho = mult.coeffs[flat_index(L2, M2)]
        if rho == 0:
            continue
        cg = clebsch_gordan(L1, M1, L2, M2, L, M)
        if cg.is_zero:
            continue
        total += float(cg) * om * rho
    return total


@dataclass(frozen=True)
class AngularDistributionSpec:
    """Angular-distribution weights r_L and evaluation grid (radians).

    Coefficients not listed in ``r`` default to 1; their physical values
    depend on the reaction and detector and are supplied by the user.
    """

    theta_grid: np.ndarray
    r: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.theta_grid, dtype=float)
        if grid.ndim != 1:
            raise ValueError("theta_grid must be one-dimensional")
        if not np.all(np.isfinite(grid)):
            raise ValueError("theta_grid must be finite")
        if not all(np.isfinite(v) for v in self.r.values()):
            raise ValueError("r coefficients must be finite")
        grid = grid.copy()
        grid.flags.writeable = False
        object.__setattr__(self, "theta_grid", grid)

    def coefficient(self, L: int) -> float:
        return float(self.r.get(L, 1.0))


@dataclass(frozen=True)
class AngularDistribution:
    """W(theta) samples plus a flag for non-negligible Im(rho_L0)."""

    theta: np.ndarray
    values: np.ndarray
    max_imag: float
    imag_warning: bool


def angular_distribution(mult: StateMultipoles, spec: AngularDistributionSpec) -> AngularDistribution:
    """Axially symmetric angular distribution W(theta) = sum_L r_L rho_L0 P_L(cos theta).

    Only the M = 0 multipoles enter; for a hermitian state they are real and
    the real part is used.  If any |Im rho_L0| exceeds 1e-9 the result is
    still computed but flagged.
    """
    max_rank = mult.spin.max_rank
    c = np.zeros(max_rank + 1)
    max_imag = 0.0
    for L in range(max_rank + 1):
        rho_l0 = mult.coeffs[flat_index(L, 0)]
        max_imag = max(max_imag, abs(rho_l0.imag))
        c[L] = spec.coefficient(L) * rho_l0.real
    values = np.polynomial.legendre.legval(np.cos(spec.theta_grid), c)
    return AngularDistribution(
        theta=spec.theta_grid,
        values=values,
        max_imag=max_imag,
        imag_warning=max_imag > 1e-9,
    )


def multipole_norm(mult: StateMultipoles) -> float:
    """Sum of |rho_LM|^2, equal to Tr(rho^2) of the reconstructed matrix."""
    return float(np.vdot(mult.coeffs, mult.coeffs).real)


def oriented_state(spin, p) -> StateMultipoles:
    """Unit-trace state with vector polarization P = p and no higher multipoles.

    Inverse of :func:`polarization_vector` on the rank-1 sector.  For j >= 1
    and |p| close to 1 the reconstructed matrix need not be positive
    semidefinite (a spin with large j cannot be fully polarized without
    alignment), but as an initial condition of the linear evolution it is
    well defined either way.
    """
    spin = SpinSystem.of(spin)
    p = np.asarray(p, dtype=float)
    if p.shape != (3,):
        raise ValueError("p must be a 3-vector")
    if spin.j.twice == 0:
        raise ValueError("j = 0 cannot be polarized")
    a0, a1, _ = norm_constants(spin)
    jp = float(spin.j) * (p[0] + 1j * p[1])
    components = {
        (0, 0): complex(a0),
        (1, 0): complex(a1 * float(spin.j) * p[2]),
        (1, 1): -a1 * jp / math.sqrt(2.0),
        (1, -1): a1 * np.conj(jp) / math.sqrt(2.0),
    }
    return StateMultipoles.from_components(spin, components)


def polarization_vector(mult: StateMultipoles) -> np.ndarray:
    """Vector polarization P = <J>/j from the rank-1 multipoles."""
    spin = mult.spin
    if spin.j.twice == 0:
        raise ValueError("j = 0 has no polarization vector")
    _, a1, _ = norm_constants(spin)
    j = float(spin.j)
    p10 = mult.coeffs[flat_index(1, 0)]
    p11 = mult.coeffs[flat_index(1, 1)]
    p1m1 = mult.coeffs[flat_index(1, -1)]
    jz = p10 / a1
    jplus = -math.sqrt(2.0) * p11 / a1
    jminus = math.sqrt(2.0) * p1m1 / a1
    jx = (jplus + jminus) / 2.0
    jy = (jplus - jminus) / 2.0j
    return np.array([jx.real, jy.real, jz.real]) / j

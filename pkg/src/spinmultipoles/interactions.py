"""Interaction tensors: magnetic dipole and electric quadrupole couplings.

The Hamiltonian is expanded in normalized irreducible tensor operators,
H = sum_{L M} Omega_LM T_LM^dag, with complex interaction frequencies
Omega_LM in angular-frequency units (rad/s).  A uniform magnetic field
contributes the rank-1 components

    Omega_10   = gamma B_z / a1,
    Omega_1+-1 = -+ gamma (B_x +- i B_y) / (sqrt(2) a1),

and an electric-field-gradient tensor phi_ab the rank-2 components

    Omega_20   = (omega_Q / a2) (2 phi_zz - phi_xx - phi_yy) / (3 phi_zz),
    Omega_2+-1 = -+ (omega_Q / a2) (phi_zx +- i phi_zy) / (sqrt(6) phi_zz),
    Omega_2+-2 = (omega_Q / a2) (phi_xx - phi_yy +- 2 i phi_xy) / (sqrt(6) phi_zz),

with the quadrupole frequency omega_Q = e phi_zz Q / (4 j (2j-1)).

Hermiticity of H corresponds to Omega_{L,-M} = (-1)^M Omega_LM^*, which both
constructors guarantee and the InteractionTensor constructor checks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import PhysicsWarning, RankError
from .tensors import SpinSystem, TensorBasis, norm_constants

__all__ = [
    "MagneticSpec",
    "EfgSpec",
    "InteractionTensor",
    "omega_from_magnetic",
    "omega_from_efg",
    "hamiltonian_matrix",
]

_HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class MagneticSpec:
    """A uniform magnetic field: gyromagnetic ratio (rad/s/T) and B (T)."""

    gamma: float
    B: tuple[float, float, float]

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        if B.shape != (3,):
            raise ValueError("B must be a 3-vector")
        if not (np.isfinite(self.gamma) and np.all(np.isfinite(B))):
            raise ValueError("gamma and B must be finite")
        object.__setattr__(self, "B", (float(B[0]), float(B[1]), float(B[2])))

    @property
    def larmor_frequency(self) -> float:
        """gamma |B| (rad/s)."""
        return abs(self.gamma) * float(np.linalg.norm(self.B))


@dataclass(frozen=True)
class EfgSpec:
    """An electric-field-gradient tensor and its quadrupole frequency.

    ``phi`` is the symmetric 3x3 matrix of second derivatives of the
    electric potential (V/m^2); it is symmetrized on input.
    ``quadrupole_frequency`` is omega_Q = e phi_zz Q / (4 j (2j-1)) in rad/s,
    quoted directly the way experiments report it.  Use
    :meth:`from_quadrupole_moment` to compute it from eQ instead.
    """

    phi: np.ndarray
    quadrupole_frequency: float

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if phi.shape != (3, 3):
            raise ValueError("phi must be a 3x3 matrix")
        if not np.all(np.isfinite(phi)):
            raise ValueError("phi must be finite")
        if not np.isfinite(self.quadrupole_frequency):
            raise ValueError("quadrupole_frequency must be finite")
        phi = (phi + phi.T) / 2.0
        phi.flags.writeable = False
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_quadrupole_moment(cls, phi, eQ: float, j) -> "EfgSpec":
        """Build from the EFG and eQ, computing omega_Q = eQ phi_zz / (4j(2j-1))."""
        spin = SpinSystem.of(j)
        tj = spin.j.twice
        if tj < 2:
            raise RankError("quadrupole coupling needs j >= 1 (L = 2 <= 2j)")
        phi = np.asarray(phi, dtype=float)
        denom = 4.0 * (tj / 2.0) * (tj - 1.0)
        return cls(phi, eQ * phi[2, 2] / denom)

    @classmethod
    def axial(cls, omega_q: float, eta: float = 0.0) -> "EfgSpec":
        """Principal-axis EFG with asymmetry eta, standard ordering assumed.

        phi = phi_zz * diag(-(1-eta)/2, -(1+eta)/2, 1) is traceless with
        |phi_zz| >= |phi_yy| >= |phi_xx| for 0 <= eta <= 1.
        """
        if not 0.0 <= eta <= 1.0:
            raise ValueError("eta must lie in [0, 1] for the standard ordering")
        phi = np.diag([-(1.0 - eta) / 2.0, -(1.0 + eta) / 2.0, 1.0])
        return cls(phi, omega_q)


@dataclass(frozen=True)
class InteractionTensor:
    """Complex interaction frequencies Omega_LM defining the Hamiltonian.

    Only ranks 1 (magnetic dipole) and 2 (electric quadrupole) occur here.
    A rank-0 component would only shift the Hamiltonian by a multiple of the
    identity, which leaves the dynamics unchanged, so it is dropped silently
    if supplied.
    """

    spin: SpinSystem
    omega: dict[tuple[int, int], complex] = field(default_factory=dict)

    def __post_init__(self):
        cleaned: dict[tuple[int, int], complex] = {}
        for (L, M), value in self.omega.items():
            if L == 0:
                continue  # pure phase, physically irrelevant
            if L < 0 or abs(M) > L:
                raise ValueError(f"invalid component (L, M) = ({L}, {M})")
            if L > 2:
                raise ValueError("interaction ranks are limited to L <= 2")
            cleaned[(L, M)] = complex(value)
        for (L, M), value in cleaned.items():
            partner = cleaned.get((L, -M), 0.0)
            if abs(partner - (-1) ** M * value.conjugate()) > _HERMITICITY_TOL * max(
                1.0, abs(value)
            ):
                raise ValueError(
                    f"Omega_({L},{-M}) != (-1)^M conj(Omega_({L},{M})): "
                    "the Hamiltonian would not be hermitian"
                )
        object.__setattr__(self, "omega", cleaned)

    @classmethod
    def empty(cls, spin) -> "InteractionTensor":
        return cls(SpinSystem.of(spin), {})

    def ranks(self) -> set[int]:
        return {L for (L, _) in self.omega}

    def component(self, L: int, M: int) -> complex:
        return self.omega.get((L, M), 0.0 + 0.0j)

    def __add__(self, other: "InteractionTensor") -> "InteractionTensor":
        if self.spin != other.spin:
            raise ValueError("cannot combine interactions of different spins")
        combined = dict(self.omega)
        for key, value in other.omega.items():
            combined[key] = combined.get(key, 0.0) + value
        return InteractionTensor(self.spin, combined)


def omega_from_magnetic(spec: MagneticSpec, spin) -> InteractionTensor:
    """Rank-1 interaction tensor of a uniform magnetic field.

    Assembling the Hamiltonian from the result gives exactly
    gamma (B_x J_x + B_y J_y + B_z J_z).
    """
    spin = SpinSystem.of(spin)
    if spin.j.twice < 1:
        raise RankError("magnetic coupling needs j >= 1/2")
    _, a1, _ = norm_constants(spin)
    bx, by, bz = spec.B
    g = spec.gamma
    omega = {
        (1, 0): complex(g * bz / a1),
        (1, 1): -g * (bx + 1j * by) / (math.sqrt(2.0) * a1),
        (1, -1): g * (bx - 1j * by) / (math.sqrt(2.0) * a1),
    }
    return InteractionTensor(spin, omega)


def omega_from_efg(spec: EfgSpec, spin) -> InteractionTensor:
    """Rank-2 interaction tensor of an electric field gradient.

    The EFG of a charge-free region is traceless (Laplace); a trace is
    accepted with a warning since the expressions stay well defined.
    """
    spin = SpinSystem.of(spin)
    if spin.j.twice < 2:
        raise RankError("quadrupole coupling needs j >= 1 (L = 2 <= 2j)")
    phi = spec.phi
    if phi[2, 2] == 0.0:
        raise ValueError("phi_zz must be nonzero (omega_Q is defined from it)")
    trace = abs(phi[0, 0] + phi[1, 1] + phi[2, 2])
    if trace > 1e-9 * np.linalg.norm(phi):
        warnings.warn(
            "EFG tensor has a nonzero trace (Laplace condition violated); "
            "proceeding with phi as given",
            PhysicsWarning,
            stacklevel=2,
        )
    scale = spec.quadrupole_frequency / spin_a2(spin)
    pzz = phi[2, 2]
    omega = {
        (2, 0): complex(scale * (2.0 * pzz - phi[0, 0] - phi[1, 1]) / (3.0 * pzz)),
        (2, 1): -scale * (phi[2, 0] + 1j * phi[2, 1]) / (math.sqrt(6.0) * pzz),
        (2, -1): scale * (phi[2, 0] - 1j * phi[2, 1]) / (math.sqrt(6.0) * pzz),
        (2, 2): scale * (phi[0, 0] - phi[1, 1] + 2j * phi[0, 1]) / (math.sqrt(6.0) * pzz),
        (2, -2): scale * (phi[0, 0] - phi[1, 1] - 2j * phi[0, 1]) / (math.sqrt(6.0) * pzz),
    }
    return InteractionTensor(spin, omega)


def spin_a2(spin) -> float:
    """a2 normalization constant; RankError below j = 1."""
    spin = SpinSystem.of(spin)
    _, _, a2 = norm_constants(spin)
    if a2 is None:
        raise RankError("a2 is undefined below j = 1")
    return a2


def hamiltonian_matrix(tensor: InteractionTensor, basis: TensorBasis) -> np.ndarray:
    """Assemble H = sum_LM Omega_LM T_LM^dag as a dense hermitian matrix."""
    if tensor.spin != basis.spin:
        raise ValueError("interaction tensor and basis belong to different spins")
    for L in tensor.ranks():
        if L > basis.max_rank:
            raise RankError(f"rank L = {L} exceeds 2j = {basis.max_rank}")
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for (L, M), value in tensor.omega.items():
        out += value * basis.operator(L, M).conj().T
    return out

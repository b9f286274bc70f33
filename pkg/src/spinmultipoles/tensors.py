"""Normalized irreducible tensor operators and their commutator calculus.

For a spin quantum number j the (2j+1)^2 operators T_LM, 0 <= L <= 2j,
|M| <= L, form an orthonormal basis of the operator space under the
trace inner product Tr(X^dag Y).  They are constructed from the
Wigner-Eckart theorem with reduced matrix element sqrt(2L+1),

    <j m'| T_LM |j m> = sqrt((2L+1)/(2j+1)) <j m L M | j m'>,

which reproduces the familiar closed forms in J_z, J_+- for L <= 2.

Conventions used throughout the package:

* matrices are indexed with m' as the row and m as the column, m ordered
  -j, -j+1, ..., +j;
* T_LM^dag = (-1)^M T_{L,-M};
* the flattened multipole/operator ordering is L^2 + (L + M).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import RankError
from .wigner import HalfInt, clebsch_gordan

__all__ = [
    "SpinSystem",
    "TensorBasis",
    "basis_for",
    "flat_index",
    "lm_pairs",
    "norm_constants",
    "jz_matrix",
    "jplus_matrix",
    "jminus_matrix",
    "jx_matrix",
    "jy_matrix",
    "angular_momentum_matrices",
    "tensor_operator",
    "tensor_operator_closed_form",
    "tensor_matrix_element",
    "tensor_product_element",
    "commutator",
]


@dataclass(frozen=True)
class SpinSystem:
    """An angular momentum multiplet of quantum number j and dimension 2j+1."""

    j: HalfInt

    def __post_init__(self):
        if self.j.twice < 0:
            raise ValueError(f"j = {self.j} must be >= 0")

    @classmethod
    def of(cls, j) -> "SpinSystem":
        if isinstance(j, SpinSystem):
            return j
        return cls(HalfInt.of(j))

    @property
    def dim(self) -> int:
        return self.j.twice + 1

    @property
    def max_rank(self) -> int:
        """Largest tensor rank supported: L <= 2j."""
        return self.j.twice

    def m_values(self) -> list[HalfInt]:
        """Projections -j ... +j in the matrix ordering."""
        return [HalfInt(t) for t in range(-self.j.twice, self.j.twice + 1, 2)]


def flat_index(L: int, M: int) -> int:
    """Position of the (L, M) component in the flattened ordering L^2 + L + M."""
    return L * L + L + M


def lm_pairs(max_rank: int) -> list[tuple[int, int]]:
    """All (L, M) pairs with 0 <= L <= max_rank in flattened order."""
    return [(L, M) for L in range(max_rank + 1) for M in range(-L, L + 1)]


def _check_rank(spin: SpinSystem, L: int, M: int) -> None:
    if not isinstance(L, int) or not isinstance(M, int):
        raise TypeError("tensor rank L and projection M must be integers")
    if L < 0 or L > spin.max_rank:
        raise RankError(f"rank L = {L} outside 0 <= L <= 2j = {spin.max_rank}")
    if abs(M) > L:
        raise ValueError(f"|M| = {abs(M)} exceeds L = {L}")


def jz_matrix(spin) -> np.ndarray:
    spin = SpinSystem.of(spin)
    return np.diag([m.twice / 2.0 for m in spin.m_values()]).astype(complex)


def jplus_matrix(spin) -> np.ndarray:
    spin = SpinSystem.of(spin)
    j = spin.j.twice / 2.0
    out = np.zeros((spin.dim, spin.dim), dtype=complex)
    for col, m in enumerate(spin.m_values()[:-1]):
        mv = m.twice / 2.0
        out[col + 1, col] = math.sqrt(j * (j + 1) - mv * (mv + 1))
    return out


def jminus_matrix(spin) -> np.ndarray:
    return jplus_matrix(spin).conj().T


def jx_matrix(spin) -> np.ndarray:
    jp = jplus_matrix(spin)
    return (jp + jp.conj().T) / 2.0


def jy_matrix(spin) -> np.ndarray:
    jp = jplus_matrix(spin)
    return (jp - jp.conj().T) / 2.0j


def angular_momentum_matrices(spin) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(J_x, J_y, J_z) as dense complex matrices."""
    return jx_matrix(spin), jy_matrix(spin), jz_matrix(spin)


def norm_constants(spin) -> tuple[float, float | None, float | None]:
    """Normalization constants (a0, a1, a2) of the L <= 2 closed forms.

    a1 is None for j = 0 and a2 is None for j < 1, where the corresponding
    tensor ranks do not exist.
    """
    spin = SpinSystem.of(spin)
    tj = spin.j.twice
    a0 = math.sqrt(1.0 / (tj + 1))
    a1 = None
    a2 = None
    if tj >= 1:
        # j(j+1)(2j+1) = tj(tj+2)(tj+1)/4
        a1 = math.sqrt(float(Fraction(3 * 4, tj * (tj + 2) * (tj + 1))))
    if tj >= 2:
        # (2j-1)2j(2j+1)(2j+2)(2j+3) written directly in terms of tj = 2j
        a2 = math.sqrt(
            float(Fraction(20, (tj - 1) * tj * (tj + 1) * (tj + 2) * (tj + 3)))
        )
    return a0, a1, a2


def tensor_operator(spin, L: int, M: int) -> np.ndarray:
    """Matrix of the normalized irreducible tensor operator T_LM.

    Built entry by entry from the Wigner-Eckart theorem with exact
    Clebsch-Gordan coefficients; unit trace norm Tr(T^dag T) = 1.
    """
    spin = SpinSystem.of(spin)
    _check_rank(spin, L, M)
    dim = spin.dim
    out = np.zeros((dim, dim), dtype=complex)
    scale = math.sqrt((2 * L + 1) / dim)
    tL, tM = 2 * L, 2 * M
    for col in range(dim):
        tm = -spin.j.twice + 2 * col
        tmp = tm + tM
        if abs(tmp) > spin.j.twice:
            continue
        row = (tmp + spin.j.twice) // 2
        cg = clebsch_gordan(
            spin.j, HalfInt(tm), HalfInt(tL), HalfInt(tM), spin.j, HalfInt(tmp)
        )
        out[row, col] = scale * float(cg)
    return out


def tensor_operator_closed_form(spin, L: int, M: int) -> np.ndarray:
    """T_LM for L <= 2 from the explicit polynomial expressions in J_z, J_+-."""
    spin = SpinSystem.of(spin)
    _check_rank(spin, L, M)
    if L > 2:
        raise ValueError("closed forms exist for L <= 2 only")
    a0, a1, a2 = norm_constants(spin)
    dim = spin.dim
    if L == 0:
        return a0 * np.eye(dim, dtype=complex)
    jz = jz_matrix(spin)
    jp = jplus_matrix(spin)
    jm = jminus_matrix(spin)
    if L == 1:
        if M == 0:
            return a1 * jz
        if M == 1:
            return -math.sqrt(0.5) * a1 * jp
        return math.sqrt(0.5) * a1 * jm
    jj = float(spin.j) * (float(spin.j) + 1.0)
    if M == 0:
        return a2 * (3.0 * jz @ jz - jj * np.eye(dim))
    if M == 1:
        return -0.5 * math.sqrt(6.0) * a2 * (jp @ jz + jz @ jp)
    if M == -1:
        return 0.5 * math.sqrt(6.0) * a2 * (jm @ jz + jz @ jm)
    if M == 2:
        return 0.5 * math.sqrt(6.0) * a2 * (jp @ jp)
    return 0.5 * math.sqrt(6.0) * a2 * (jm @ jm)


class TensorBasis:
    """The full set of normalized tensor operators for one spin system.

    Immutable after construction; operators are exposed as read-only
    arrays.  Use :func:`basis_for` to get a cached instance.
    """

    def __init__(self, spin):
        self.spin = SpinSystem.of(spin)
        self.norm_constants = norm_constants(self.spin)
        pairs = lm_pairs(self.spin.max_rank)
        stack = np.empty((len(pairs), self.spin.dim, self.spin.dim), dtype=complex)
        for i, (L, M) in enumerate(pairs):
            stack[i] = tensor_operator(self.spin, L, M)
        stack.flags.writeable = False
        self._stack = stack
        self._pairs = pairs

    @property
    def dim(self) -> int:
        return self.spin.dim

    @property
    def size(self) -> int:
        """Number of basis operators, (2j+1)^2."""
        return len(self._pairs)

    @property
    def max_rank(self) -> int:
        return self.spin.max_rank

    def pairs(self) -> list[tuple[int, int]]:
        return list(self._pairs)

    def operator(self, L: int, M: int) -> np.ndarray:
        _check_rank(self.spin, L, M)
        return self._stack[flat_index(L, M)]

    def stack(self) -> np.ndarray:
        """All operators as a read-only (size, dim, dim) array in flat order."""
        return self._stack

    def gram_defect(self) -> float:
        """Max deviation of the Tr(T^dag T') Gram matrix from the identity."""
        flat = self._stack.reshape(self.size, -1)
        gram = flat.conj() @ flat.T
        return float(np.max(np.abs(gram - np.eye(self.size))))


@lru_cache(maxsize=None)
def _basis_cache(twice_j: int) -> TensorBasis:
    return TensorBasis(SpinSystem(HalfInt(twice_j)))


def basis_for(j) -> TensorBasis:
    """Cached TensorBasis for the given j (HalfInt, int, float or SpinSystem)."""
    return _basis_cache(SpinSystem.of(j).j.twice)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def _check_same_dim(a: np.ndarray, basis: TensorBasis, name: str) -> None:
    if a.shape != (basis.dim, basis.dim):
        raise ValueError(
            f"{name} has shape {a.shape}, expected {(basis.dim, basis.dim)}"
        )


def tensor_matrix_element(
    A: np.ndarray, Lp: int, Mp: int, L: int, M: int, basis: TensorBasis
) -> complex:
    """Tensor bra-ket matrix element (L'M'| A |LM) = Tr{T_L'M'^dag [A, T_LM]}.

    By cyclicity of the trace this equals Tr{[T_L'M'^dag, A] T_LM}: it does
    not matter whether A acts on the bra or on the ket.
    """
    A = np.asarray(A, dtype=complex)
    _check_same_dim(A, basis, "A")
    t_ket = basis.operator(L, M)
    t_bra = basis.operator(Lp, Mp)
    return complex(np.trace(t_bra.conj().T @ commutator(A, t_ket)))


def tensor_product_element(
    A: np.ndarray, B: np.ndarray, Lp: int, Mp: int, L: int, M: int, basis: TensorBasis
) -> complex:
    """Matrix element of an operator product, (L'M'| AB |LM).

    The product acts by nested commutators, AB|LM) = [A, [B, T_LM]], and by
    completeness equals the sum over intermediate (L''M'') of
    (L'M'|A|L''M'')(L''M''|B|LM).
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    _check_same_dim(A, basis, "A")
    _check_same_dim(B, basis, "B")
    t_ket = basis.operator(L, M)
    t_bra = basis.operator(Lp, Mp)
    nested = commutator(A, commutator(B, t_ket))
    return complex(np.trace(t_bra.conj().T @ nested))

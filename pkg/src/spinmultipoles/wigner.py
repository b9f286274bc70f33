"""Exact angular-momentum coupling algebra.

Clebsch-Gordan coefficients and Wigner 6j symbols evaluated with Racah's
single-sum formulas in arbitrary-precision rational arithmetic.  Every
coefficient is carried exactly as ``sign * sqrt(rational)`` (:class:`ExactCoeff`)
and converted to floating point only when the caller asks for it, so there is
no cancellation error even for large quantum numbers.

Quantum numbers are half-integers stored as doubled integers
(:class:`HalfInt`), so ``j = 3/2`` is ``HalfInt(3)`` and no floating-point
comparison of quantum numbers happens anywhere.

Phase convention: Condon-Shortley throughout; all Clebsch-Gordan coefficients
are real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

__all__ = [
    "HalfInt",
    "ExactCoeff",
    "SurdSum",
    "clebsch_gordan",
    "six_j",
    "triangle_ok",
]

# Thread-safe lazily populated factorial cache.  lru_cache guarantees
# each value is computed once and then read concurrently.
_fact = lru_cache(maxsize=None)(math.factorial)


@dataclass(frozen=True, order=True)
class HalfInt:
    """A half-integer stored as twice its value, so it is always exact.

    ``HalfInt(3)`` is 3/2; ``HalfInt(4)`` is 2.
    """

    twice: int

    @classmethod
    def of(cls, value) -> "HalfInt":
        """Coerce an int, Fraction, float or HalfInt to a HalfInt.

        Raises ValueError if the value is not a multiple of 1/2.
        """
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise ValueError("bool is not a quantum number")
        if isinstance(value, int):
            return cls(2 * value)
        if isinstance(value, Rational):
            doubled = 2 * Fraction(value)
            if doubled.denominator != 1:
                raise ValueError(f"{value} is not a half-integer")
            return cls(int(doubled))
        if isinstance(value, float):
            doubled = 2.0 * value
            if not doubled.is_integer():
                raise ValueError(f"{value} is not a half-integer")
            return cls(int(doubled))
        raise TypeError(f"cannot interpret {value!r} as a half-integer")

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __float__(self) -> float:
        return self.twice / 2.0

    def __add__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice + other.twice)

    def __sub__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice - other.twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice))

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


def _check_quantum_number(j: HalfInt, name: str = "j") -> None:
    if j.twice < 0:
        raise ValueError(f"{name} = {j} must be >= 0")


def _check_projection(j: HalfInt, m: HalfInt, name: str = "j") -> None:
    _check_quantum_number(j, name)
    if abs(m.twice) > j.twice or (j.twice - m.twice) % 2 != 0:
        raise ValueError(f"m = {m} is not a valid projection of {name} = {j}")


@dataclass(frozen=True)
class ExactCoeff:
    """An exact value of the form ``sign * sqrt(rational)``.

    ``sign`` is -1, 0 or +1 and ``rational`` is a nonnegative Fraction;
    ``sign == 0`` iff ``rational == 0``.  This closed form is enough to carry
    any single Clebsch-Gordan coefficient or 6j symbol exactly.
    """

    sign: int
    rational: Fraction

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.rational < 0:
            raise ValueError("rational part must be >= 0")
        if (self.sign == 0) != (self.rational == 0):
            raise ValueError("sign is 0 exactly when the value is 0")

    @classmethod
    def zero(cls) -> "ExactCoeff":
        return cls(0, Fraction(0))

    @classmethod
    def from_rational(cls, value) -> "ExactCoeff":
        """Exact rational value ``q`` represented as ``sign(q) * sqrt(q**2)``."""
        q = Fraction(value)
        if q == 0:
            return cls.zero()
        return cls(1 if q > 0 else -1, q * q)

    @classmethod
    def sqrt(cls, value) -> "ExactCoeff":
        """Positive square root of a nonnegative rational."""
        q = Fraction(value)
        if q < 0:
            raise ValueError("sqrt of a negative rational")
        return cls(0, Fraction(0)) if q == 0 else cls(1, q)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    @property
    def signed_square(self) -> Fraction:
        """``sign * rational``; exact and handy for sign-aware comparisons."""
        return self.sign * self.rational

    def __float__(self) -> float:
        # Fraction -> float is correctly rounded and math.sqrt is exact to
        # 1/2 ulp, so the result is within ~2 ulp of the true value.
        return self.sign * math.sqrt(float(self.rational))

    def __neg__(self) -> "ExactCoeff":
        return ExactCoeff(-self.sign, self.rational)

    def __mul__(self, other):
        if isinstance(other, ExactCoeff):
            s = self.sign * other.sign
            return ExactCoeff(s, self.rational * other.rational if s else Fraction(0))
        q = Fraction(other)
        if q == 0 or self.sign == 0:
            return ExactCoeff.zero()
        sign = self.sign if q > 0 else -self.sign
        return ExactCoeff(sign, self.rational * q * q)

    __rmul__ = __mul__


def _squarefree(n: int) -> tuple[int, int]:
    """Split ``n > 0`` as ``outer**2 * radical`` with squarefree ``radical``."""
    outer, radical = 1, 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            outer *= p ** (e // 2)
            if e % 2:
                radical *= p
        p += 1 if p == 2 else 2
    return outer, radical * n


class SurdSum:
    """An exact finite sum ``sum_d c_d * sqrt(d)`` over squarefree integers d.

    Closed under addition and multiplication, which is all the exact
    orthogonality and recoupling identities need.  Zero is the empty sum.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[int, Fraction] | None = None):
        self._terms = {d: c for d, c in (terms or {}).items() if c != 0}

    @classmethod
    def zero(cls) -> "SurdSum":
        return cls()

    @classmethod
    def from_coeff(cls, coeff: ExactCoeff) -> "SurdSum":
        if coeff.is_zero:
            return cls()
        num, den = coeff.rational.numerator, coeff.rational.denominator
        outer, radical = _squarefree(num * den)
        return cls({radical: Fraction(coeff.sign * outer, den)})

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: "SurdSum") -> "SurdSum":
        terms = dict(self._terms)
        for d, c in other._terms.items():
            terms[d] = terms.get(d, Fraction(0)) + c
        return SurdSum(terms)

    def __sub__(self, other: "SurdSum") -> "SurdSum":
        terms = dict(self._terms)
        for d, c in other._terms.items():
            terms[d] = terms.get(d, Fraction(0)) - c
        return SurdSum(terms)

    def __mul__(self, other):
        if isinstance(other, ExactCoeff):
            other = SurdSum.from_coeff(other)
        if isinstance(other, SurdSum):
            terms: dict[int, Fraction] = {}
            for d1, c1 in self._terms.items():
                for d2, c2 in other._terms.items():
                    g = math.gcd(d1, d2)
                    d = (d1 // g) * (d2 // g)
                    c = c1 * c2 * g
                    terms[d] = terms.get(d, Fraction(0)) + c
            return SurdSum(terms)
        q = Fraction(other)
        return SurdSum({d: c * q for d, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, SurdSum) and (self - other).is_zero

    def __float__(self) -> float:
        return sum(float(c) * math.sqrt(d) for d, c in self._terms.items())

    def __repr__(self) -> str:
        if self.is_zero:
            return "SurdSum(0)"
        parts = [f"{c}*sqrt({d})" for d, c in sorted(self._terms.items())]
        return "SurdSum(" + " + ".join(parts) + ")"


def _triangle_twice(ta: int, tb: int, tc: int) -> bool:
    return abs(ta - tb) <= tc <= ta + tb and (ta + tb + tc) % 2 == 0


def triangle_ok(a, b, c) -> bool:
    """Triangle rule: |a-b| <= c <= a+b with integer perimeter a+b+c."""
    ta, tb, tc = (HalfInt.of(x) for x in (a, b, c))
    for x, name in ((ta, "a"), (tb, "b"), (tc, "c")):
        _check_quantum_number(x, name)
    return _triangle_twice(ta.twice, tb.twice, tc.twice)


def _delta_sq(ta: int, tb: int, tc: int) -> Fraction:
    """Squared triangle coefficient of a valid triad, as an exact Fraction."""
    return Fraction(
        _fact((ta + tb - tc) // 2)
        * _fact((ta - tb + tc) // 2)
        * _fact((-ta + tb + tc) // 2),
        _fact((ta + tb + tc) // 2 + 1),
    )


@lru_cache(maxsize=None)
def _cg_core(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> ExactCoeff:
    if tM != tm1 + tm2:
        return ExactCoeff.zero()
    if not _triangle_twice(tj1, tj2, tJ):
        return ExactCoeff.zero()
    if abs(tM) > tJ:
        return ExactCoeff.zero()

    # Racah's single-sum formula.  With the selection rules above satisfied
    # every doubled argument below is even and nonnegative.
    prefactor = (
        Fraction(tJ + 1)
        * _delta_sq(tj1, tj2, tJ)
        * _fact((tJ + tM) // 2)
        * _fact((tJ - tM) // 2)
        * _fact((tj1 - tm1) // 2)
        * _fact((tj1 + tm1) // 2)
        * _fact((tj2 - tm2) // 2)
        * _fact((tj2 + tm2) // 2)
    )

    a = (tj1 + tj2 - tJ) // 2
    b = (tj1 - tm1) // 2
    c = (tj2 + tm2) // 2
    d = (tJ - tj2 + tm1) // 2
    e = (tJ - tj1 - tm2) // 2
    total = Fraction(0)
    for k in range(max(0, -d, -e), min(a, b, c) + 1):
        term = Fraction(
            1,
            _fact(k) * _fact(a - k) * _fact(b - k) * _fact(c - k)
            * _fact(d + k) * _fact(e + k),
        )
        total += -term if k % 2 else term
    if total == 0:
        return ExactCoeff.zero()
    return ExactCoeff(1 if total > 0 else -1, total * total * prefactor)


def clebsch_gordan(j1, m1, j2, m2, J, M) -> ExactCoeff:
    """Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M>, Condon-Shortley phase.

    Returns exact zero when M != m1 + m2 or the triangle rule fails, and also
    when |M| > J (the target state does not exist).  Malformed input states,
    i.e. a projection that exceeds its own j or has the wrong parity, raise
    ValueError.
    """
    j1, m1 = HalfInt.of(j1), HalfInt.of(m1)
    j2, m2 = HalfInt.of(j2), HalfInt.of(m2)
    J, M = HalfInt.of(J), HalfInt.of(M)
    _check_projection(j1, m1, "j1")
    _check_projection(j2, m2, "j2")
    _check_quantum_number(J, "J")
    if (J.twice - M.twice) % 2 != 0:
        return ExactCoeff.zero()
    return _cg_core(j1.twice, m1.twice, j2.twice, m2.twice, J.twice, M.twice)


@lru_cache(maxsize=None)
def _six_j_core(tj1: int, tj2: int, tj3: int, tj4: int, tj5: int, tj6: int) -> ExactCoeff:
    triads = (
        (tj1, tj2, tj3),
        (tj1, tj5, tj6),
        (tj4, tj2, tj6),
        (tj4, tj5, tj3),
    )
    for ta, tb, tc in triads:
        if not _triangle_twice(ta, tb, tc):
            return ExactCoeff.zero()

    prefactor = Fraction(1)
    for ta, tb, tc in triads:
        prefactor *= _delta_sq(ta, tb, tc)

    # All S_i and Q_i below are integers for valid triads.
    s1 = (tj1 + tj2 + tj3) // 2
    s2 = (tj1 + tj5 + tj6) // 2
    s3 = (tj4 + tj2 + tj6) // 2
    s4 = (tj4 + tj5 + tj3) // 2
    q1 = (tj1 + tj2 + tj4 + tj5) // 2
    q2 = (tj2 + tj3 + tj5 + tj6) // 2
    q3 = (tj3 + tj1 + tj6 + tj4) // 2

    total = Fraction(0)
    for t in range(max(s1, s2, s3, s4), min(q1, q2, q3) + 1):
        term = Fraction(
            _fact(t + 1),
            _fact(t - s1) * _fact(t - s2) * _fact(t - s3) * _fact(t - s4)
            * _fact(q1 - t) * _fact(q2 - t) * _fact(q3 - t),
        )
        total += -term if t % 2 else term
    if total == 0:
        return ExactCoeff.zero()
    return ExactCoeff(1 if total > 0 else -1, total * total * prefactor)


def six_j(j1, j2, j3, j4, j5, j6) -> ExactCoeff:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.

    Exact zero when any of the four triads (j1 j2 j3), (j1 j5 j6),
    (j4 j2 j6), (j4 j5 j3) violates the triangle rule or its integer-sum
    condition.
    """
    js = tuple(HalfInt.of(j) for j in (j1, j2, j3, j4, j5, j6))
    for i, j in enumerate(js, start=1):
        _check_quantum_number(j, f"j{i}")
    return _six_j_core(*(j.twice for j in js))

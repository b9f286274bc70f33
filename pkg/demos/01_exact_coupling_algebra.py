"""Exact angular-momentum coupling coefficients.

Every Clebsch-Gordan coefficient and 6j symbol in the package is carried
as sign * sqrt(rational) with arbitrary-precision integers, so selection
rules are exact zeros and orthogonality sums cancel to literally nothing.
This script prints a few values in exact and floating-point form and then
verifies an orthogonality relation in pure surd arithmetic.
"""

from fractions import Fraction

from spinmultipoles import ExactCoeff, HalfInt, SurdSum, clebsch_gordan, six_j

half = HalfInt.of

print("Some exact Clebsch-Gordan coefficients:")
for args in [
    (0.5, 0.5, 0.5, -0.5, 0, 0),
    (0.5, 0.5, 0.5, -0.5, 1, 0),
    (1, 1, 1, -1, 2, 0),
    (1.5, 0.5, 1, 0, 1.5, 0.5),
]:
    c = clebsch_gordan(*args)
    j1, m1, j2, m2, J, M = (half(a) for a in args)
    print(f"  <{j1} {m1} {j2} {m2}|{J} {M}> = {c.sign:+d} * sqrt({c.rational}) = {float(c):+.12f}")

print("\nA 6j symbol with half-integer arguments:")
v = six_j(1, 1, 1, 0.5, 0.5, 0.5)
print(f"  {{1 1 1; 1/2 1/2 1/2}} = {v.sign:+d} * sqrt({v.rational}) = {float(v):+.12f}")

print("\nOrthogonality sum_m1m2 <j1 m1 j2 m2|J M><j1 m1 j2 m2|J' M> in exact arithmetic:")
tj1 = tj2 = 3  # j1 = j2 = 3/2
for tJ, tJp in [(2, 2), (2, 4), (0, 6)]:
    total = SurdSum.zero()
    tM = 0
    for tm1 in range(-tj1, tj1 + 1, 2):
        tm2 = tM - tm1
        if abs(tm2) > tj2:
            continue
        c1 = clebsch_gordan(half(tj1 / 2), half(tm1 / 2), half(tj2 / 2), half(tm2 / 2),
                            half(tJ / 2), half(tM / 2))
        c2 = clebsch_gordan(half(tj1 / 2), half(tm1 / 2), half(tj2 / 2), half(tm2 / 2),
                            half(tJp / 2), half(tM / 2))
        total = total + SurdSum.from_coeff(c1 * c2)
    kind = "delta_JJ' = 1" if tJ == tJp else "delta_JJ' = 0"
    residual = total - SurdSum.from_coeff(ExactCoeff.from_rational(Fraction(int(tJ == tJp))))
    print(f"  J = {tJ//2}, J' = {tJp//2}: sum = {total!r}  ({kind}, residual zero: {residual.is_zero})")

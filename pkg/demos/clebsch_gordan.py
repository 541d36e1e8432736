"""Clebsch-Gordan coefficients of Verma modules as q-Hahn polynomials.

Prints a CGC block exactly, checks the closed form against the direct sum,
and shows the q -> 1 limit of a q-3j symbol approaching the classical value.
"""

from fractions import Fraction

from uqsl2 import EvalContext, NUMERIC, cgc, q3j
from uqsl2.intertwine import check_orthogonality

mu, gamma, N = -5, -6, 2
print(f"CGC block for mu={mu}, gamma={gamma}, N={N} (rows l, columns m):")
for l in range(N + 1):
    print("  ", [str(cgc(mu, gamma, N, l, m)) for m in range(N + 1)])

agree = all(cgc(mu, gamma, 4, l, m) == cgc(mu, gamma, 4, l, m, method="direct")
            for l in range(5) for m in range(5))
print("closed form equals direct sum for N=4:", agree)

res = check_orthogonality(-4, -7, 5)
print(f"orthogonality N=5: {res.count} entries, exact zero residual: {res.ok}")

half = Fraction(1, 2)
for q in (0.3, 0.9, 0.999):
    val = q3j(half, half, 0, half, -half, EvalContext("numeric", q=q)).real
    print(f"q={q}: 3j(1/2,1/2,0; 1/2,-1/2) = {val:.6f}")
print(f"classical value 1/sqrt(2) = {2 ** -0.5:.6f}")
print("numeric 3j at q=0.3:", q3j(half, half, 1, half, half, NUMERIC))

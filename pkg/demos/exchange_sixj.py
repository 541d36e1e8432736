"""Exchange matrices, q-6j symbols and the dynamical Yang-Baxter equation."""

from fractions import Fraction

from uqsl2 import NUMERIC, SixJLabel, check_qdybe, exchange_elem, racah_W, sixj
from uqsl2.exchange import admissible_labels, check_er5, exchange_findim

g, d, lam = -3, -4, -25
print(f"exchange block gamma={g}, delta={d}, s=1, lam={lam}:")
for m in range(2):
    print("  ", [str(exchange_elem(g, d, 1, m, n, lam)) for n in range(2)])
print("closed form equals definition:",
      all(exchange_elem(g, d, 2, m, n, lam) == exchange_elem(g, d, 2, m, n, lam, method="definition")
          for m in range(3) for n in range(3)))

h = Fraction(1, 2)
L = SixJLabel(h, h, h, h, 1, 1)
print("6j symbol", L, "=", sixj(L, NUMERIC))
print("Racah coefficient =", racah_W(L, NUMERIC))
print("exchange entry at the matching labels =", exchange_findim(L, NUMERIC))

labels = list(admissible_labels(1))
print(f"exchange/6j relation on {len(labels)} label sets:",
      all(check_er5(x.j1, x.j2, x.j3, x.j, x.j12, x.j13).ok for x in labels))

res = check_qdybe(-31, (-3, -4, -5), depth=2)
print(f"dynamical Yang-Baxter on Verma modules, depth 2: {res.count} coefficients, exact zero = {res.ok}")

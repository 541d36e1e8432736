"""Fusion matrix blocks, their inverse, and the shifted 2-cocycle on Verma modules."""

from uqsl2.qfield import QError
from uqsl2.fusion import check_abrr, check_cocycle, check_fusion_inverse, fusion_block
from uqsl2.repsl2 import ModuleId

delta, gamma, s, lam = -4, -3, 2, -25
print(f"fusion block delta={delta}, gamma={gamma}, s={s}, lam={lam}:")
for row in fusion_block(delta, gamma, s, lam):
    print("  ", [str(x) for x in row])

print("inverse relation for s <= 6:",
      all(check_fusion_inverse(delta, gamma, k, lam).ok for k in range(7)))

M = ModuleId.verma
res = check_cocycle(-31, (M(-3), M(-4), M(-5)), depth=3)
print(f"cocycle on {res.count} coefficients up to depth 3: exact zero = {res.ok}")
res = check_abrr(-31, (M(-3), M(-4)), depth=4)
print(f"ABRR equation on {res.count} coefficients up to depth 4: exact zero = {res.ok}")

try:
    check_cocycle(-11, (M(-3), M(-4), M(-5)), depth=4)
except QError as exc:  # lam = -11 meets a vanishing denominator
    print("lam=-11 is rejected:", exc)

"""Sign bookkeeping in a finite exterior algebra with involution.

    python demos/grassmann_signs.py
"""
import numpy as np

from hidaqft.grassmann import (ExteriorAlgebra, block_rule, block_swap_sign, involute,
                               pair_with_distribution)

alg = ExteriorAlgebra(4)
i1, i2 = alg.gen(0), alg.gen(1)
b1, b2 = alg.cgen(0), alg.cgen(1)

print("i1^i2 + i2^i1 =", (i1 ^ i2) + (i2 ^ i1))
print("involute(i1^b2) =", involute(i1 ^ b2))

# the involution reverses products; the literal block exchange does so only for blocks of size <= 1
f = i1 ^ i2
print("\ninvolute(i1^i2) =", involute(f), "   block rule:", block_rule(f))
print("reverses products:", involute(i1 ^ i2).close(involute(i2) ^ involute(i1)),
      "  block rule:", block_rule(i1 ^ i2).close(block_rule(i2) ^ block_rule(i1)))

print("\nblock swap signs (-1)^(pq):")
for p in range(4):
    print("  ", [block_swap_sign(p, q) for q in range(4)])

K = np.random.default_rng(0).normal(size=(4, 4))
K = K - K.T
phi = np.array([1.0, 0.5, -0.3, 2.0])
h = pair_with_distribution(K, phi, alg)
print("\n<kappa, h^2> coefficient of i1^i2:", h.data[(0, 1)], " 2 kappa12 phi1 phi2 =", 2 * K[0, 1] * phi[0] * phi[1])

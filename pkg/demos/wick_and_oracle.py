"""Expand a product of Wick monomials symbolically, then check it on a truncated Fock grid.

    python demos/wick_and_oracle.py
"""
import numpy as np

from hidaqft.fields import fermion, scalar
from hidaqft.fock import ModeGrid, subcutoff_mask
from hidaqft.oracle import evaluate_expression, product_oracle
from hidaqft.testfn import gaussian
from hidaqft.wick import factor, multi_product, wick_monomial

A = lambda s: factor("A", 0, s)
chi = lambda s, conj=False: factor("chi", 0, s, conj=conj, fermi=True)

# :A(x)chi(x): times :chi*(y)A(y):, one Bose and one Fermi field
blocks = [[A("x"), chi("x")], [chi("y", conj=True), A("y")]]
E = multi_product([wick_monomial(b) for b in blocks]).simplify()
print("Fock expansion (l,m); sign; pairings; remaining kernels")
print(E.serialize())
print("terms per sector:", E.sector_counts())

# one grid point, cutoff raised by the total degree so the sub-cutoff block is exact
grid = ModeGrid([[0.3, -0.1, 0.2]], 0.7, [scalar(1.0, "A"), fermion(1.3, "chi")], nmax=2)
big = grid.with_cutoff(2 + 4)
mask = subcutoff_mask(big, 2)
tf = {"x": gaussian([0, 0, 0, 0], 1.0), "y": gaussian([0.4, 0.1, 0, 0], 0.8, mod=[0.2, 0, 0, 0])}
rows = np.flatnonzero(mask)
M = evaluate_expression(E, tf, big, cols=mask)[rows]
O = product_oracle(big, [(blocks[0], 1.0, tf["x"]), (blocks[1], 1.0, tf["y"])], cols=mask)[rows]
err = np.linalg.norm((M - O).toarray()) / np.linalg.norm(O.toarray())
print(f"\nsymbolic expansion vs direct matrix product: relative error {err:.2e}")

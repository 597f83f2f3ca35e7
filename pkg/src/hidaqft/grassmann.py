"""Finite-rank exterior algebra with a conjugate-linear involution.

Generators are n plain iota_0..iota_{n-1} and n conjugates ibar_0..ibar_{n-1},
numbered 0..n-1 and n..2n-1.  A basis word is a strictly increasing tuple of
generator numbers, so plain generators come first, each block ascending.
"""
from itertools import combinations, permutations
from math import comb

import numpy as np

from .wick import fermi_sign, inversion_count


def _merge_sign(u, v):
    """Sign of sorting the concatenation u + v of two increasing words (0 if they overlap)."""
    if set(u) & set(v):
        return 0
    n = sum(1 for a in u for b in v if a > b)
    return -1 if n % 2 else 1


def _sort_word(w):
    """(sign, sorted word), sign 0 on a repeated generator."""
    if len(set(w)) != len(w):
        return 0, ()
    order = sorted(range(len(w)), key=lambda i: w[i])
    e = inversion_count(order, [True] * len(w))
    return (-1 if e % 2 else 1), tuple(w[i] for i in order)


class ExteriorAlgebra:
    def __init__(self, rank=4):
        if rank < 1:
            raise ValueError("rank must be positive")
        self.rank = rank

    def __eq__(self, other):
        return isinstance(other, ExteriorAlgebra) and other.rank == self.rank

    def __hash__(self):
        return hash(("ext", self.rank))

    @property
    def ngen(self):
        return 2 * self.rank

    def scalar(self, z=1.0):
        return GrassmannElement(self, {(): complex(z)})

    def gen(self, i):
        """Plain generator iota_i (0-based)."""
        if not 0 <= i < self.rank:
            raise IndexError("generator index out of range")
        return GrassmannElement(self, {(i,): 1.0})

    def cgen(self, i):
        """Conjugate generator ibar_i."""
        if not 0 <= i < self.rank:
            raise IndexError("generator index out of range")
        return GrassmannElement(self, {(self.rank + i,): 1.0})

    def basis(self, degree):
        return list(combinations(range(self.ngen), degree))

    def graded_dim(self, degree):
        return comb(self.ngen, degree)

    def word(self, w):
        s, w = _sort_word(tuple(w))
        return GrassmannElement(self, {w: s} if s else {})

    def conj_index(self, g):
        return g + self.rank if g < self.rank else g - self.rank

    def random(self, rng, max_degree=4, density=0.3):
        data = {}
        for k in range(max_degree + 1):
            for w in self.basis(k):
                if rng.random() < density:
                    data[w] = complex(rng.normal(), rng.normal())
        return GrassmannElement(self, data)


class GrassmannElement:
    """Finitely supported map canonical word -> complex coefficient."""

    def __init__(self, algebra, data=None):
        self.algebra = algebra
        self.data = {}
        for w, c in (data or {}).items():
            if c != 0:
                self.data[tuple(w)] = complex(c)

    def _check(self, other):
        if not isinstance(other, GrassmannElement) or other.algebra != self.algebra:
            raise ValueError("elements belong to different algebras")

    def __add__(self, other):
        self._check(other)
        out = dict(self.data)
        for w, c in other.data.items():
            out[w] = out.get(w, 0) + c
        return GrassmannElement(self.algebra, out)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, z):
        if isinstance(z, GrassmannElement):
            return wedge(self, z)
        return GrassmannElement(self.algebra, {w: z * c for w, c in self.data.items()})

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __repr__(self):
        if not self.data:
            return "0"
        return " + ".join(f"({c:.6g})*{w}" for w, c in sorted(self.data.items()))

    def degree_part(self, k):
        return GrassmannElement(self.algebra, {w: c for w, c in self.data.items() if len(w) == k})

    def degrees(self):
        return sorted({len(w) for w in self.data})

    def is_homogeneous(self):
        return len(self.degrees()) <= 1

    def norm(self):
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.data.values())))

    def close(self, other, tol=1e-12):
        return (self - other).norm() <= tol


def wedge(f, g):
    f._check(g)
    out = {}
    for u, a in f.data.items():
        for v, b in g.data.items():
            s = _merge_sign(u, v)
            if s:
                w = tuple(sorted(u + v))
                out[w] = out.get(w, 0) + s * a * b
    return GrassmannElement(f.algebra, out)


def involute(f):
    """Conjugate-linear anti-automorphism: conj coefficients, swap iota <-> ibar, reverse words."""
    alg = f.algebra
    out = {}
    for w, c in f.data.items():
        img = [alg.conj_index(g) for g in reversed(w)]
        s, sw = _sort_word(tuple(img))
        out[sw] = out.get(sw, 0) + s * np.conj(c)
    return GrassmannElement(alg, out)


def block_rule(f):
    """Literal block exchange on canonical words: the plain block and the conjugate
    block trade places and types, each keeping its internal order.

    Agrees with `involute` on words whose blocks have at most one generator.
    """
    alg = f.algebra
    out = {}
    for w, c in f.data.items():
        plain = [g for g in w if g < alg.rank]
        bar = [g for g in w if g >= alg.rank]
        img = [alg.conj_index(g) for g in bar] + [alg.conj_index(g) for g in plain]
        s, sw = _sort_word(tuple(img))
        out[sw] = out.get(sw, 0) + s * np.conj(c)
    return GrassmannElement(alg, out)


def inner(f, g):
    """(f, g) with orthonormal canonical words, antilinear in f."""
    f._check(g)
    return complex(sum(np.conj(c) * g.data.get(w, 0) for w, c in f.data.items()))


def block_swap_sign(p, q):
    """Sign of moving a block of q odd elements past a block of p."""
    if p < 0 or q < 0:
        raise ValueError("block sizes must be nonnegative")
    return -1 if (p * q) % 2 else 1


def block_swap_permutation(p, q):
    """The permutation (as target-order list of sources) taking A B to B A, |A| = p, |B| = q."""
    return list(range(p, p + q)) + list(range(p))


def block_swap_sign_bruteforce(p, q):
    return fermi_sign(block_swap_permutation(p, q), [True] * (p + q))


def _antisymmetry_residual(kappa):
    p = kappa.ndim
    res = 0.0
    for perm in permutations(range(p)):
        s = fermi_sign(list(perm), [True] * p)
        res = max(res, float(np.max(np.abs(kappa - s * np.transpose(kappa, perm)))))
    return res


def pair_with_distribution(kappa, phi, algebra, conj=False, check=True, tol=1e-12):
    """sum over a_1..a_p of kappa(a) phi_1^{a_1} ... phi_p^{a_p} iota_{a_1} ^ ... ^ iota_{a_p}.

    kappa has p axes of length rank; phi is one sample vector (used in every
    slot) or one vector per slot.  With check=True a kappa that is not
    totally antisymmetric is rejected.
    """
    kappa = np.asarray(kappa, dtype=complex)
    p = kappa.ndim
    n = algebra.rank
    if any(s != n for s in kappa.shape):
        raise ValueError("kappa axes must have the algebra rank as length")
    phi = np.asarray(phi, dtype=complex)
    phis = np.broadcast_to(phi, (p, n)) if phi.ndim == 1 else phi
    if phis.shape != (p, n):
        raise ValueError("need one sample vector per slot")
    if check and p > 1:
        r = _antisymmetry_residual(kappa)
        if r > tol * max(1.0, float(np.max(np.abs(kappa)))):
            raise ValueError(f"kappa is not antisymmetric (residual {r:.3g})")
    off = n if conj else 0
    out = {}
    for idx in np.ndindex(*kappa.shape):
        c = kappa[idx]
        if c == 0 or len(set(idx)) < p:
            continue
        for i, a in enumerate(idx):
            c = c * phis[i, a]
        s, w = _sort_word(tuple(a + off for a in idx))
        out[w] = out.get(w, 0) + s * c
    return GrassmannElement(algebra, out)

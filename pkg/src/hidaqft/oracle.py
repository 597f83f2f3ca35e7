"""Grid evaluation of symbolic expansions and the brute-force matrix oracle.

`evaluate_expression` turns every half factor of a ContractionTerm into its
grid matrix and every pairing into its dV-weighted mode sum.  The oracle
side, `smeared_monomial`, never looks at ContractionTerms: it builds full
field matrices as trigonometric polynomials in x, normal orders them with
the recursive Wick rule using vacuum expectation values read off the
matrices, and smears the result.
"""
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .fields import ANNIHILATION, CREATION
from .fock import half_multiplier, mode_momentum, mode_operator, smearing


def _add(key, i, item):
    key = list(key)
    key[i] = tuple(sorted(key[i] + (item,)))
    return tuple(key)


def _freqs(grid, part_key, eps=0.0):
    q = np.zeros(4)
    for idx, sgn in part_key:
        q += sgn * mode_momentum(grid, grid.modes[idx], eps)
    return q


def term_states(term, grid, eps=0.0, cols=None):
    """Dynamic-programming expansion of one term over grid modes.

    Returns (slots, {(pair_key, op_key): matrix}) where the keys record, per
    slot, the (mode, +-1) frequencies contributed by pairings and by operator
    halves.  The term's sign and coefficient are included.  Halves are
    applied right to left to a start block (identity columns `cols`).
    """
    slots = sorted({f.slot for f in term.factors}
                   | {s for p in term.pairs for s in (p.ann.slot, p.cre.slot)})
    si = {s: i for i, s in enumerate(slots)}
    empty = tuple(() for _ in slots)
    scal = {empty: complex(term.sign * term.coeff)}
    for pr in term.pairs:
        fld = grid.field(pr.ann.field)
        new = {}
        for m in grid.field_modes(fld.name):
            mu = (half_multiplier(grid, m, ANNIHILATION, pr.ann.comp, pr.ann.conj)
                  * half_multiplier(grid, m, CREATION, pr.cre.comp, pr.cre.conj))
            if mu == 0:
                continue
            v = grid.dV * mu * fld.krein_sign(m.label)
            for key, w in scal.items():
                k = _add(key, si[pr.ann.slot], (m.index, -1))
                k = _add(k, si[pr.cre.slot], (m.index, +1))
                new[k] = new.get(k, 0) + w * v
        scal = new
    start = _start(grid, cols)
    states = {(k, empty): w * start for k, w in scal.items()}
    for h in reversed(term.cre + term.ann):
        sgn = +1 if h.part == CREATION else -1
        opts = []
        for m in grid.field_modes(h.field):
            mu = half_multiplier(grid, m, h.part, h.comp, h.conj)
            if mu == 0:
                continue
            opts.append((m.index, grid.dV * mu * mode_operator(grid, m, h.part)))
        new = {}
        for (pk, ok), M in states.items():
            for idx, op in opts:
                k2 = (pk, _add(ok, si[h.slot], (idx, sgn)))
                prod = op @ M
                new[k2] = new[k2] + prod if k2 in new else prod
        states = new
    return slots, states


def _start(grid, cols):
    ident = sp.identity(grid.dim, dtype=complex, format="csr")
    return ident if cols is None else ident[:, np.flatnonzero(cols)].tocsr()


def evaluate_term(term, grid, testfns, eps=0.0, weight=None, cols=None):
    """Matrix of one term.

    By default each slot is smeared with its test function.  A custom
    `weight(slots, pair_keys, op_keys)` replaces that smearing; the keys are
    per-slot tuples of (mode index, +-1) as produced by `term_states`.
    """
    slots, states = term_states(term, grid, eps, cols)
    out = 0 * _start(grid, cols)
    if not slots:
        for M in states.values():
            out = out + M
        return out
    for s in slots:
        if s not in testfns:
            raise KeyError(f"no test function for slot {s!r}")
    for (pk, ok), M in states.items():
        if weight is None:
            w = 1.0 + 0j
            for i, s in enumerate(slots):
                q = _freqs(grid, pk[i] + ok[i], eps)
                w *= smearing(testfns[s], q, +1)
        else:
            w = weight(slots, pk, ok)
        out = out + w * M
    return out


def evaluate_expression(expansion, testfns, grid, eps=0.0, cols=None, weight=None):
    """Matrix of a FockExpansion on the grid; testfns maps slot -> test function.

    With a boolean mask `cols` only those columns are computed; `weight` is
    passed on to `evaluate_term`.
    """
    slots = expansion.slots()
    missing = [s for s in slots if s not in testfns]
    if missing:
        raise ValueError(f"slot/test-function mismatch: missing {missing}")
    out = 0 * _start(grid, cols)
    for t in expansion.terms():
        out = out + evaluate_term(t, grid, testfns, eps, weight, cols)
    return out


# --- independent oracle route ----------------------------------------

def _full_field_trig(grid, f, eps):
    """Full field A(x) as {frequency key: matrix}."""
    out = {}
    for part, sgn in ((ANNIHILATION, -1), (CREATION, +1)):
        for m in grid.field_modes(f.field):
            mu = half_multiplier(grid, m, part, f.comp, f.conj)
            if mu == 0:
                continue
            k = ((m.index, sgn),)
            out[k] = out.get(k, 0) + grid.dV * mu * mode_operator(grid, m, part)
    return out


def _trig_mul(A, B):
    out = {}
    for ka, Ma in A.items():
        for kb, Mb in B.items():
            k = tuple(sorted(ka + kb))
            P = Ma @ Mb
            out[k] = out[k] + P if k in out else P
    return out


def _trig_add(A, B, scale=1.0):
    out = dict(A)
    for k, M in B.items():
        out[k] = out[k] + scale * M if k in out else scale * M
    return out


def normal_ordered_trig(grid, factors, eps=0.0):
    """:F1 ... Fk:(x) as a trigonometric matrix polynomial, by Wick recursion."""
    fields = [_full_field_trig(grid, f, eps) for f in factors]
    ident = sp.identity(grid.dim, dtype=complex, format="csr")

    def vev(A, B):
        out = {}
        for k, M in _trig_mul(A, B).items():
            v = M[0, 0]
            if v != 0:
                out[k] = v * ident
        return out

    @lru_cache(maxsize=None)
    def N(idx):
        if not idx:
            return {(): ident}
        first, rest = idx[0], idx[1:]
        out = _trig_mul(fields[first], N(rest))
        nferm = 0
        for pos, j in enumerate(rest):
            c = vev(fields[first], fields[j])
            if c:
                sgn = -1 if (factors[first].fermi and factors[j].fermi and nferm % 2) else 1
                sub = N(rest[:pos] + rest[pos + 1:])
                out = _trig_add(out, _trig_mul(c, sub), -sgn)
            if factors[j].fermi:
                nferm += 1
        return out

    return N(tuple(range(len(factors))))


def smeared_monomial(grid, factors, phi, coeff=1.0, eps=0.0):
    """coeff * int phi(x) :F1...Fk:(x) dx on the grid (independent route).

    The empty monomial is the identity operator (no smearing).
    """
    if not factors:
        return coeff * sp.identity(grid.dim, dtype=complex, format="csr")
    trig = normal_ordered_trig(grid, factors, eps)
    out = sp.csr_matrix((grid.dim, grid.dim), dtype=complex)
    for k, M in trig.items():
        q = _freqs(grid, k, eps)
        out = out + smearing(phi, q, +1) * M
    return coeff * out


def product_oracle(grid, blocks, eps=0.0, cols=None):
    """Direct matrix product of smeared monomials; blocks = [(factors, coeff, phi)]."""
    out = _start(grid, cols)
    for factors, coeff, phi in reversed(blocks):
        out = smeared_monomial(grid, factors, phi, coeff, eps) @ out
    return out


def slot_frequency(grid, key, eps=0.0):
    """Minkowski 4-frequency q of a per-slot key: the slot carries exp(i q.x)."""
    return _freqs(grid, key, eps)

"""Verification suites shared by the command line and the test-suite.

Each suite returns a list of records {suite, check, residual, tolerance, pass}.
"""
from dataclasses import replace

import numpy as np
import scipy.sparse as sp

from .fields import (MINKOWSKI, dirac_residuals, dirac_u, dirac_v, fermion,
                     gamma_matrices, scalar)
from .fock import ModeGrid, assemble_field, subcutoff_mask
from .oracle import evaluate_expression, product_oracle
from .quad import PairSpec, mode_sum_contraction
from .testfn import gaussian
from .wick import FockExpansion, factor, multi_product, normal_product, wick_monomial


def record(suite, check, residual, tol):
    residual = float(residual)
    return {"suite": suite, "check": check, "residual": residual,
            "tolerance": tol, "pass": bool(residual <= tol)}


def _dense(M):
    return M.toarray() if sp.issparse(M) else np.asarray(M)


def rel_error(M, ref):
    M, ref = _dense(M), _dense(ref)
    return float(np.linalg.norm(M - ref) / max(np.linalg.norm(ref), 1e-300))


# --- oracle equivalence ----------------------------------------------------

def mixed_grid():
    """Three modes: a neutral scalar A and the two labels of the Fermi model field chi."""
    return ModeGrid([[0.3, -0.1, 0.2]], 0.7, [scalar(1.0, "A"), fermion(1.3, "chi")], nmax=2)


def _random_factor(rng, slot):
    k = rng.integers(3)
    if k == 0:
        return factor("A", 0, slot)
    return factor("chi", 0, slot, conj=bool(k == 2), fermi=True)


def random_blocks(rng, max_factors=3, max_degree=3):
    """A random product: list of (factors, coefficient, test function), one slot per block."""
    blocks = []
    for b in range(int(rng.integers(1, max_factors + 1))):
        slot = "xyz"[b]
        fs = [_random_factor(rng, slot) for _ in range(int(rng.integers(0, max_degree + 1)))]
        phi = gaussian(rng.normal(size=4) * 0.5, rng.uniform(0.6, 1.2),
                       mod=rng.normal(size=4) * 0.3)
        blocks.append((fs, complex(rng.normal(), rng.normal()), phi))
    return blocks


def corrupt_sign(E, rng):
    """Negative control: flip the sign of one term that carries a Fermi reordering."""
    terms = E.terms()
    idx = [i for i, t in enumerate(terms) if any(f.fermi for f in t.factors)] or list(range(len(terms)))
    i = idx[int(rng.integers(len(idx)))]
    terms[i] = replace(terms[i], sign_exp=terms[i].sign_exp + 1)
    return type(E)(terms)


def oracle_case(grid, blocks, nmax=2, inject=None, rng=None):
    """Relative error between the symbolic expansion and the direct matrix product."""
    deg = sum(len(b[0]) for b in blocks)
    big = grid.with_cutoff(nmax + deg)
    mask = subcutoff_mask(big, nmax)
    E = multi_product([(c, wick_monomial(fs)) for fs, c, _ in blocks])
    if inject == "sign":
        E = corrupt_sign(E, rng)
    tfs = {"xyz"[i]: b[2] for i, b in enumerate(blocks)}
    rows = np.flatnonzero(mask)
    M = evaluate_expression(E, tfs, big, cols=mask)[rows]
    O = product_oracle(big, blocks, cols=mask)[rows]
    return rel_error(M, O), float(np.linalg.norm(_dense(O)))


def oracle_suite(n=25, seed=0, inject=None, tol=1e-10):
    """Randomized products of Wick monomials; products with a vanishing matrix are redrawn."""
    rng = np.random.default_rng(seed)
    grid = mixed_grid()
    out = []
    while len(out) < n:
        blocks = random_blocks(rng)
        err, size = oracle_case(grid, blocks, inject=inject, rng=rng)
        if size == 0:
            continue
        degs = "x".join(str(len(b[0])) for b in blocks)
        out.append(record("oracle", f"product {len(out)} degrees {degs}", err, tol))
    return out


# --- CCR / CAR ---------------------------------------------------------------

def ccr_suite(grid=None):
    """(Anti)commutators of all mode pairs; Fermi exactly, Bose on the sub-cutoff block."""
    grid = grid or mixed_grid()
    ops = grid.ops()
    dim = grid.dim
    mask = subcutoff_mask(grid, grid.nmax - 1)
    rows = np.flatnonzero(mask)
    unit = (1.0 / np.sqrt(grid.dV)) ** 2
    I = sp.identity(dim, format="csr")
    worst_f, worst_b = 0.0, 0.0
    for mi in grid.modes:
        for mj in grid.modes:
            ci, ai = ops[mi.index]
            cj, aj = ops[mj.index]
            fi = grid.field(mi.field).fermi
            fj = grid.field(mj.field).fermi
            d = unit if mi.index == mj.index else 0.0
            if fi and fj:
                r1 = ai @ cj + cj @ ai - d * I
                r2 = ai @ aj + aj @ ai
                worst_f = max(worst_f, abs(r1).max() if r1.nnz else 0.0,
                              abs(r2).max() if r2.nnz else 0.0)
            else:
                r1 = (ai @ cj - cj @ ai - d * I)[rows][:, rows]
                r2 = ai @ aj - aj @ ai
                worst_b = max(worst_b, abs(r1).max() if r1.nnz else 0.0,
                              abs(r2).max() if r2.nnz else 0.0)
    # sqrt(n) entries do not square back exactly, so Bose gets a few ulp of 1/dV
    bose_tol = 8 * np.finfo(float).eps * unit
    return [record("ccr", "fermi anticommutators (exact)", worst_f, 0.0),
            record("ccr", "bose/mixed commutators below cutoff", worst_b, bose_tol)]


# --- spinors -------------------------------------------------------------------

def spinor_suite(n=1000, seed=0, mass=1.0):
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(n, 3)) * rng.uniform(0.1, 5.0, size=(n, 1))
    g = gamma_matrices()
    cliff = 0.0
    I4 = np.eye(4)
    for mu in range(4):
        for nu in range(4):
            cliff = max(cliff, np.abs(g[mu] @ g[nu] + g[nu] @ g[mu] - 2 * MINKOWSKI[mu, nu] * I4).max())
    norm = 0.0
    for s in (1, 2):
        u, v = dirac_u(s, P, mass), dirac_v(s, P, mass)
        norm = max(norm, np.abs(np.sum(np.abs(u) ** 2, -1) - 1).max(),
                   np.abs(np.sum(np.abs(v) ** 2, -1) - 1).max())
    dres = 0.0
    for p in P:
        r = dirac_residuals(p, mass)
        dres = max(dres, r["u1_minus"], r["u2_minus"], r["v1_plus"], r["v2_plus"])
    return [record("spinor", "clifford relations", cliff, 1e-12),
            record("spinor", "u^dag u = v^dag v = 1", norm, 1e-12),
            record("spinor", "dirac equation residual", dres, 1e-10)]


# --- pairing identity -------------------------------------------------------------

def pairing_suite(grid=None, phi=None, chi=None, tol=1e-10):
    """(0,0) term of :A(x)::A(y): on the grid against the dV-weighted mode sum."""
    grid = grid or ModeGrid([[0.3, 0.0, 0.1], [-0.2, 0.4, 0.0], [0.1, -0.3, 0.25]], 0.5,
                            [scalar(1.0, "A")], nmax=2)
    phi = phi or gaussian(np.zeros(4), 1.0)
    chi = chi or gaussian([0.3, 0.1, 0, 0.2], 0.8, mod=[0.2, 0, 0.1, 0])
    E = normal_product(wick_monomial([factor("A", 0, "x")]), wick_monomial([factor("A", 0, "y")]))
    scal = [t for t in E.terms() if t.lm == (0, 0)]
    M = evaluate_expression(FockExpansion(scal), {"x": phi, "y": chi}, grid)
    value = complex(M[0, 0])
    ref = mode_sum_contraction(grid.points, grid.dV, [PairSpec(grid.field("A"))], phi, chi)
    # the same scalar read off the direct product: <0| A(phi) A(chi) |0>
    direct = complex((assemble_field(grid, "A", 0, phi) @ assemble_field(grid, "A", 0, chi))[0, 0])
    return [record("pairing", "(0,0) term vs mode sum", abs(value - ref) / abs(ref), tol),
            record("pairing", "(0,0) term vs vacuum expectation", abs(value - direct) / abs(ref), tol)]

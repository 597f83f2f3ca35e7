import warnings

import numpy as np
import pytest
import scipy.sparse as sp

from hidaqft.fields import PHOTON_METRIC, dirac, fermion, photon, scalar
from hidaqft.fock import (DimensionGuard, ModeGrid, assemble_field, build_mode_ops, krein_metric,
                          project, subcutoff_mask, translation_operator)
from hidaqft.oracle import evaluate_expression
from hidaqft.suites import ccr_suite
from hidaqft.testfn import gaussian
from hidaqft.wick import FockExpansion, factor, normal_product, wick_monomial


def dense(M):
    return M.toarray() if sp.issparse(M) else np.asarray(M)


def test_fermi_nilpotent():
    g = ModeGrid([[0, 0, 1.0]], 0.3, [fermion()])
    for cre, ann in build_mode_ops(g, "chi").values():
        assert (ann @ ann).nnz == 0 and (cre @ cre).nnz == 0


@pytest.mark.parametrize("dV,unit", [(1.0, 1.0), (0.5, 2.0)])
def test_bose_commutator_on_safe_subspace(dV, unit):
    g = ModeGrid([[0, 0, 1.0]], dV, [scalar()], nmax=2)
    (cre, ann), = build_mode_ops(g, "phi").values()
    C = dense(ann @ cre - cre @ ann)
    assert np.allclose(C[:2, :2], unit * np.eye(2), atol=1e-14)


def test_ccr_car_three_modes():
    recs = ccr_suite()
    assert all(r["pass"] for r in recs), recs
    assert recs[0]["residual"] == 0.0


def test_dirac_modes_anticommute():
    g = ModeGrid([[0.1, 0, 0.2]], 0.5, [dirac()])
    ops = g.ops()
    (c0, a0), (c1, a1) = ops[0], ops[3]
    assert abs(a0 @ c1 + c1 @ a0).max() == 0
    assert np.allclose(dense(a0 @ c0 + c0 @ a0), 2 * np.eye(g.dim))


def test_grid_validation():
    with pytest.raises(ValueError):
        ModeGrid([[0, 0, 0], [0, 0, 0]], 1.0, [scalar()])
    with pytest.raises(ValueError):
        ModeGrid([[0, 0, 0]], 1.0, [scalar()], nmax=0)
    with pytest.raises(ValueError):
        ModeGrid([[0, 0, 0]], -1.0, [scalar()])
    with pytest.raises(KeyError):
        build_mode_ops(ModeGrid([[0, 0, 0]], 1.0, [scalar()]), "psi")


def test_dimension_and_guard():
    g = ModeGrid([[0, 0, 1.0], [1, 0, 0]], 0.5, [scalar(), fermion()], nmax=2)
    assert g.dim == 3 ** 2 * 2 ** 4
    big = ModeGrid(np.eye(3) * np.arange(1, 4)[:, None], 1.0, [photon()], nmax=3)
    with pytest.raises(DimensionGuard):
        big.ops()


def test_zero_test_function_gives_zero():
    g = ModeGrid([[0.2, 0, 0.1]], 0.5, [scalar()])
    M = assemble_field(g, "phi", 0, gaussian(np.zeros(4), 1.0, amp=0.0))
    assert abs(M).max() == 0


def test_real_scalar_field_is_self_adjoint():
    g = ModeGrid([[0.2, 0, 0.1], [-0.3, 0.4, 0]], 0.5, [scalar()])
    M = dense(assemble_field(g, "phi", 0, gaussian(np.zeros(4), 0.9)))
    assert np.allclose(M, M.conj().T, atol=1e-15)


def test_photon_field_matches_hand_mode_sum():
    pts = np.array([[0.3, 0.1, -0.2], [-0.1, 0.5, 0.4]])
    dV, c, s = 0.4, np.array([0.2, -0.1, 0.3, 0.05]), 0.8
    g = ModeGrid(pts, dV, [photon()], nmax=1)
    phi = gaussian(c, s)
    occ = g.occupations()
    for mu in range(4):
        M = dense(assemble_field(g, "A", mu, phi))
        for m in g.modes:
            p = pts[m.point]
            p4 = np.array([np.linalg.norm(p), *p])
            k = p4 * np.array([1, -1, -1, -1])          # exp(+i p.x) as a Euclidean wave
            smear = (2 * np.pi * s * s) ** 2 * np.exp(1j * k @ c - s * s * k @ k / 2)
            mult = PHOTON_METRIC[m.label, mu] / ((2 * np.pi) ** 1.5 * np.sqrt(2 * p4[0]))
            krein = -1.0 if m.label == 0 else 1.0
            want = dV * mult * smear * krein / np.sqrt(dV)
            one = int(np.flatnonzero((occ.sum(1) == 1) & (occ[:, m.index] == 1))[0])
            assert abs(M[one, 0] - want) < 1e-12


def test_krein_metric():
    g = ModeGrid([[0.3, 0, 0.4]], 0.5, [photon(), scalar()], nmax=1)
    eta, ok = krein_metric(g)
    eta = dense(eta)
    assert ok
    assert eta[0, 0] == 1
    occ = g.occupations()
    temporal = g.field_modes("A")[0].index
    one = int(np.flatnonzero((occ.sum(1) == 1) & (occ[:, temporal] == 1))[0])
    assert eta[one, one] == -1
    assert np.array_equal(eta @ eta, np.eye(g.dim))
    for m in g.field_modes("phi"):
        cre, ann = g.ops()[m.index]
        assert abs(dense(eta @ ann - ann @ eta)).max() == 0


def test_krein_without_photon_warns():
    g = ModeGrid([[0, 0, 1.0]], 1.0, [scalar()])
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        eta, ok = krein_metric(g)
    assert not ok and w
    assert np.array_equal(dense(eta), np.eye(g.dim))


def test_translation_operator_moves_fields():
    g = ModeGrid([[0.2, 0, 0.1], [-0.3, 0.4, 0]], 0.5, [scalar()])
    phi = gaussian([0.1, 0.2, 0, -0.1], 0.8)
    b = np.array([0.4, -0.2, 0.3, 0.1])
    U = translation_operator(g, b)
    lhs = U @ assemble_field(g, "phi", 0, phi) @ U.conj().T
    assert np.allclose(dense(lhs), dense(assemble_field(g, "phi", 0, phi.translate(b))), atol=1e-14)


def test_projection_helpers():
    g = ModeGrid([[0, 0, 1.0]], 1.0, [scalar(), fermion()], nmax=3)
    mask = subcutoff_mask(g, 1)
    assert mask.sum() == 2 * 4
    assert project(sp.identity(g.dim), mask).shape == (8, 8)


# --- evaluate_expression -----------------------------------------------------

def test_scalar_expansion_is_multiple_of_identity():
    g = ModeGrid([[0, 0, 1.0]], 1.0, [scalar(), fermion()])
    M = evaluate_expression(FockExpansion.scalar(2.5 - 1j), {}, g)
    assert np.allclose(dense(M), (2.5 - 1j) * np.eye(g.dim))


def test_single_field_expansion_equals_assemble_field():
    g = ModeGrid([[0.2, 0, 0.1], [-0.3, 0.4, 0]], 0.5, [scalar()])
    phi = gaussian([0.1, 0.2, 0, -0.1], 0.8, mod=[0.2, 0, 0, 0.1])
    E = wick_monomial([factor("phi", 0, "x")])
    assert np.allclose(dense(evaluate_expression(E, {"x": phi}, g)),
                       dense(assemble_field(g, "phi", 0, phi)), atol=1e-15)


def test_two_point_product_matches_matrix_product():
    g = ModeGrid([[0.2, 0, 0.1], [-0.3, 0.4, 0]], 0.5, [scalar()], nmax=2)
    big = g.with_cutoff(4)
    mask = subcutoff_mask(big, 2)
    phi, chi = gaussian([0, 0, 0, 0], 1.0), gaussian([0.3, 0, 0.2, 0], 0.7)
    E = normal_product(wick_monomial([factor("phi", 0, "x")]), wick_monomial([factor("phi", 0, "y")]))
    M = project(evaluate_expression(E, {"x": phi, "y": chi}, big), mask)
    O = project(assemble_field(big, "phi", 0, phi) @ assemble_field(big, "phi", 0, chi), mask)
    assert np.linalg.norm(M - O) / np.linalg.norm(O) < 1e-10


def test_linear_in_each_slot():
    g = ModeGrid([[0.2, 0, 0.1]], 0.5, [scalar()], nmax=2)
    phi, chi = gaussian([0, 0, 0, 0], 1.0), gaussian([0.3, 0, 0.2, 0], 0.7)
    E = normal_product(wick_monomial([factor("phi", 0, "x")] * 2), wick_monomial([factor("phi", 0, "y")]))
    a = dense(evaluate_expression(E, {"x": phi, "y": chi}, g))
    b = dense(evaluate_expression(E, {"x": phi * 3.0, "y": chi}, g))
    assert np.allclose(b, 3 * a, atol=1e-13)


def test_slot_mismatch_is_rejected():
    g = ModeGrid([[0.2, 0, 0.1]], 0.5, [scalar()])
    E = wick_monomial([factor("phi", 0, "x")])
    with pytest.raises(ValueError):
        evaluate_expression(E, {"y": gaussian(np.zeros(4))}, g)

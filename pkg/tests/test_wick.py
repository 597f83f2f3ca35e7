import re
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hidaqft.suites import mixed_grid, oracle_case, random_blocks
from hidaqft.wick import (ANN, CRE, FockExpansion, enumerate_matchings, factor, fermi_sign,
                          inversion_count, multi_product, normal_monomial, normal_product,
                          pairing_form, term_count, wick_monomial)

A = lambda slot, tag=0: factor("A", 0, slot, tag=tag)
LINE = re.compile(r"^\(\d+,\d+\); [+-]1; [^;]*; .+$")


def brute_sign(perm, mask):
    """Parity by bubble sort, counting only swaps of two Fermi entries."""
    items = [(p, mask[p]) for p in perm]
    e = 0
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j][0] > items[j + 1][0]:
                if items[j][1] and items[j + 1][1]:
                    e += 1
                items[j], items[j + 1] = items[j + 1], items[j]
    return -1 if e % 2 else 1


def test_two_scalar_fields_full_view():
    forms = pairing_form([[A("x")], [A("y")]])
    assert len(forms) == 2
    assert sorted(len(p) for p, _, _ in forms) == [0, 1]
    assert all(s == 1 for _, _, s in forms)


def test_two_scalar_fields_half_view():
    E = normal_product(wick_monomial([A("x")]), wick_monomial([A("y")]))
    assert E.sector_counts() == {(0, 0): 1, (0, 2): 1, (1, 1): 2, (2, 0): 1}
    (t,) = E.sectors[(0, 0)]
    assert len(t.pairs) == 1 and t.pairs[0].ann.slot == "x" and t.pairs[0].cre.slot == "y"


def test_empty_monomial_is_identity():
    W2 = wick_monomial([A("y"), A("y")])
    E = normal_product(FockExpansion.scalar(1.0), W2)
    assert E.multiset() == W2.multiset()


def test_single_fermi_swap_signs():
    psi = factor("psi", 0, "x", fermi=True)
    psib = factor("psi", 1, "y", conj=True, fermi=True)
    E = normal_product(normal_monomial(ann=[psi.half(ANN)]), normal_monomial(cre=[psib.half(CRE)]))
    signs = {t.lm: t.canonical().sign for t in E.terms()}
    assert signs == {(1, 1): -1, (0, 0): 1}


def test_bose_version_has_no_sign():
    a = factor("B", 0, "x")
    b = factor("B", 0, "y")
    E = normal_product(normal_monomial(ann=[a.half(ANN)]), normal_monomial(cre=[b.half(CRE)]))
    assert all(t.canonical().sign == 1 for t in E.terms())


def test_three_empty_monomials():
    E = multi_product([FockExpansion.scalar(1.0)] * 3)
    assert len(E) == 1 and E.terms()[0].lm == (0, 0) and E.terms()[0].coeff == 1


def test_three_single_fields_give_four_terms():
    forms = pairing_form([[A("x")], [A("y")], [A("z")]])
    assert len(forms) == 4
    assert sorted(len(p) for p, _, _ in forms) == [0, 1, 1, 1]


def test_empty_factor_list_rejected():
    with pytest.raises(ValueError):
        multi_product([])


def test_associativity_witness():
    fs = [wick_monomial([A("x", 1), A("x", 2)]), wick_monomial([A("y")]), wick_monomial([A("z")])]
    assert multi_product(fs, "left").multiset() == multi_product(fs, "right").multiset()


def _monomial(draw_kinds, slot):
    fs = []
    for i, k in enumerate(draw_kinds):
        if k == 0:
            fs.append(factor("A", 0, slot, tag=i + 1))
        else:
            fs.append(factor("chi", 0, slot, conj=(k == 2), fermi=True, tag=i + 1))
    return wick_monomial(fs, 1.0)


kinds = st.lists(st.integers(0, 2), max_size=3)


@given(kinds, kinds, kinds)
def test_associativity_property(a, b, c):
    Ws = [_monomial(a, "x"), _monomial(b, "y"), _monomial(c, "z")]
    left = multi_product(Ws, "left").simplify()
    right = multi_product(Ws, "right").simplify()
    assert left.multiset(10) == right.multiset(10)


@given(kinds, kinds)
def test_exclusion_rule(a, b):
    E = normal_product(_monomial(a, "x"), _monomial(b, "y"))
    for t in E.terms():
        for p in t.pairs:
            assert p.ann.slot != p.cre.slot


@given(kinds, kinds)
def test_sign_consistency(a, b):
    # replacing Fermi factors by Bose ones changes signs only, never the term list
    E = normal_product(_monomial(a, "x"), _monomial(b, "y"))
    bose = [t.with_fermi_replaced() for t in E.terms()]
    assert [t.key() for t in bose] == [t.with_fermi_replaced().key() for t in E.terms()]
    assert all(t.sign == 1 for t in bose)
    assert len(bose) == len(E)


def test_fermi_sign_examples():
    assert fermi_sign([0, 1, 2], [True] * 3) == 1
    assert fermi_sign([1, 0], [True, True]) == -1
    assert fermi_sign([1, 0], [True, False]) == 1
    for p in range(4):
        for q in range(4):
            perm = list(range(p, p + q)) + list(range(p))
            assert fermi_sign(perm, [True] * (p + q)) == (-1) ** (p * q)


@given(st.permutations(list(range(6))), st.lists(st.booleans(), min_size=6, max_size=6))
def test_fermi_sign_matches_transposition_count(perm, mask):
    assert fermi_sign(perm, mask) == brute_sign(perm, mask)


def test_fermi_sign_rejects_non_permutation():
    with pytest.raises(ValueError):
        fermi_sign([0, 0, 1], [True] * 3)


def test_term_count_examples():
    assert term_count(1, 1) == 2
    assert term_count(2, 2) == 7
    assert all(term_count(0, k) == 1 for k in range(5))


@pytest.mark.parametrize("N", range(5))
@pytest.mark.parametrize("K", range(5))
def test_term_count_matches_engine(N, K):
    ann = [factor("A", 0, "x", tag=i + 1).half(ANN) for i in range(N)]
    cre = [factor("A", 0, "y", tag=i + 1).half(CRE) for i in range(K)]
    E = normal_product(normal_monomial(ann=ann), normal_monomial(cre=cre))
    assert len(E) == term_count(N, K) == enumerate_matchings(N, K)


def test_serialize_format():
    E = normal_product(wick_monomial([A("x")]), wick_monomial([A("y")]))
    lines = E.serialize().splitlines()
    assert len(lines) == len(E)
    assert all(LINE.match(ln) for ln in lines)
    assert FockExpansion.scalar(1.0).serialize() == "(0,0); +1; ; 1"


def test_term_multiset_independent_of_enumeration_order():
    E = normal_product(_monomial([0, 1, 2], "x"), _monomial([2, 0], "y"))
    terms = E.terms()
    rng = np.random.default_rng(0)
    shuffled = FockExpansion([terms[i] for i in rng.permutation(len(terms))])
    assert shuffled.simplify().serialize() == E.simplify().serialize()


def test_wick_monomial_rejects_halves():
    with pytest.raises(ValueError):
        wick_monomial([A("x").half(CRE)])
    with pytest.raises(ValueError):
        normal_monomial(cre=[A("x").half(ANN)])


@settings(max_examples=6)
@given(st.integers(0, 10_000))
def test_oracle_equivalence_property(seed):
    rng = np.random.default_rng(seed)
    err, _ = oracle_case(mixed_grid(), random_blocks(rng, max_factors=2, max_degree=2))
    assert err < 1e-10

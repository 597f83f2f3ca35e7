from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad
from scipy.special import erfc

from hidaqft.causal import (MAX_OMEGA, PlaneWaveSum, SubtractedTestFn, SupportBox, TaylorWindow,
                            ambiguity_dim, axiom_causality, axiom_first_order, axiom_krein,
                            axiom_translation, axiom_vanishing, check_axiom, eg_inductive_step,
                            fd_derivative, first_order, kernel_pairing, model_lagrangian,
                            omega_prime, pairing_function, partitions, precedes, qed_lagrangian,
                            reconstruct_pairing, retarded_pairing, scaling_degree,
                            singularity_check, singularity_order, vanishing_test_function)
from hidaqft.fields import dirac, photon, scalar
from hidaqft.fock import ModeGrid, assemble_field, subcutoff_mask
from hidaqft.oracle import evaluate_expression
from hidaqft.quad import PairSpec, contract_integral
from hidaqft.testfn import TestFunction, gaussian, multi_indices
from hidaqft.wick import factor, normal_product, wick_monomial

W = TaylorWindow()
KERN = PlaneWaveSum.from_minkowski([[1.3, 0.2, -0.4, 0.5], [0.5, 0.1, 0.1, 0.0]], [1.0, 0.5j])


def random_fn(seed, d=4):
    rng = np.random.default_rng(seed)
    coef = rng.normal(size=(2,) * d) + 1j * rng.normal(size=(2,) * d)
    return TestFunction(rng.normal(size=d) * 0.3, rng.uniform(0.6, 1.0, d), coef,
                        rng.normal(size=d) * 0.3)


# --- window and Omega' ----------------------------------------------------------

def test_window_is_flat_near_zero():
    x = np.random.default_rng(0).uniform(-1, 1, (50, 4)) * W.flat_radius
    assert np.abs(1 - W(x)).max() < 1e-15


def test_generator_derivatives_are_kronecker():
    idx = multi_indices(4, 3)
    for a in idx:
        for b in idx:
            assert W.generator_derivative(a, b) == (1.0 if a == b else 0.0)
    assert W.generator_derivative((0, 0, 0, 0), (8, 0, 0, 0)) != 0


def test_generator_derivatives_by_finite_differences():
    w1 = TaylorWindow(dim=1)
    for a in range(3):
        for b in range(3):
            fd = fd_derivative(lambda x: w1.generator((a,), x), (b,))
            assert abs(fd - (a == b)) < 1e-8


def test_window_validation():
    with pytest.raises(ValueError):
        TaylorWindow(radius=0)
    with pytest.raises(ValueError):
        TaylorWindow(power=3)


def test_singularity_order_helpers():
    assert singularity_check(-1) == -1
    with pytest.raises(ValueError):
        singularity_check(-2)
    with pytest.raises(ValueError):
        singularity_check(MAX_OMEGA + 1)
    assert [ambiguity_dim(w) for w in (-1, 0, 1, 2)] == [0, 1, 5, 15]
    assert singularity_order(["scalar"]) == -1
    assert singularity_order(["scalar", "scalar"]) == 0
    assert singularity_order(["photon", "photon"]) == 0
    assert singularity_order(["dirac", "dirac"]) == 2


def test_omega_prime_kills_generators():
    for a in multi_indices(4, 1):
        gen = SubtractedTestFn(gaussian(np.zeros(4), amp=0.0), W, [(a, -1.0)])
        out = omega_prime(gen, 1, W)
        x = np.random.default_rng(1).normal(size=(20, 4))
        assert np.abs(out(x)).max() < 1e-14


def test_omega_prime_order_zero():
    g = gaussian([0.3, -0.2, 0.1, 0.4], 0.8)
    out = omega_prime(g, 0, W)
    x = np.random.default_rng(2).normal(size=(20, 4))
    assert np.allclose(out(x), g(x) - g(np.zeros(4)) * W(x), atol=1e-15)
    assert abs(out(np.zeros(4))[0]) < 1e-15
    assert omega_prime(g, -1, W) is g


@given(st.integers(0, 10_000), st.integers(0, 3))
def test_omega_prime_is_idempotent(seed, omega):
    f = random_fn(seed)
    once = omega_prime(f, omega, W)
    twice = omega_prime(once, omega, W)
    x = np.random.default_rng(seed).normal(size=(30, 4)) * 0.8
    assert np.abs(once(x) - twice(x)).max() < 1e-10


@pytest.mark.parametrize("omega", [1, 2, 3])
def test_omega_prime_taylor_jet_vanishes(omega):
    psi = omega_prime(random_fn(3), omega, W)
    for a in multi_indices(4, omega):
        assert abs(psi.taylor_derivative(a)) < 1e-13
        assert abs(fd_derivative(psi, a)) < 1e-8


# --- splitting ----------------------------------------------------------------------

def test_smooth_kernel_without_subtraction_is_a_theta_integral():
    q = np.array([0.9, 0.3, -0.2, 0.4])
    k = q * np.array([1, -1, -1, -1])
    c, s = np.array([0.2, 0.1, -0.3, 0.0]), 0.7
    phi = gaussian(c, s)
    t_re = quad(lambda t: np.cos(k[0] * t) * np.exp(-(t - c[0]) ** 2 / (2 * s * s)), 0, 30)[0]
    t_im = quad(lambda t: np.sin(k[0] * t) * np.exp(-(t - c[0]) ** 2 / (2 * s * s)), 0, 30)[0]
    space = np.prod(np.sqrt(2 * np.pi) * s * np.exp(1j * k[1:] * c[1:] - s * s * k[1:] ** 2 / 2))
    want = (t_re + 1j * t_im) * space
    got = retarded_pairing(PlaneWaveSum.from_minkowski([q], [1.0]), phi, -1, W)
    assert abs(got - want) < 1e-10


def half_line_cubic(c, s):
    """int_0^inf t^3 exp(-(t - c)^2 / 2 s^2) dt."""
    u0 = -c / s
    g = np.exp(-u0 ** 2 / 2)
    I0 = np.sqrt(np.pi / 2) * erfc(u0 / np.sqrt(2))
    I = [I0, g, u0 * g + I0, (u0 ** 2 + 2) * g]
    return s * (c ** 3 * I[0] + 3 * c ** 2 * s * I[1] + 3 * c * s ** 2 * I[2] + s ** 3 * I[3])


@pytest.mark.parametrize("c,s", [(0.3, 0.7), (-0.5, 1.1), (1.2, 0.4)])
def test_cubic_kernel_closed_form(c, s):
    kern = lambda x: x[:, 0] ** 3 * np.sign(x[:, 0])
    got = retarded_pairing(kern, gaussian([c], s), -1, TaylorWindow(dim=1))
    assert abs(got - half_line_cubic(c, s)) < 1e-10 * max(1, abs(got))


def test_vanishing_test_function_needs_no_subtraction():
    phi = vanishing_test_function((1, 1, 0, 0), center=[0.3, -0.2, 0.1, 0.2])
    a = retarded_pairing(KERN, phi, 1, W)
    b = retarded_pairing(KERN, phi, -1, W)
    assert abs(a - b) < 1e-10 * abs(b)


def test_window_independence_and_ambiguity():
    w2 = TaylorWindow(radius=1.7)
    van = vanishing_test_function((1, 0, 1, 0), center=[0.3, -0.2, 0.1, 0.2])
    assert abs(retarded_pairing(KERN, van, 1, W) - retarded_pairing(KERN, van, 1, w2)) < 1e-10
    # on a generic test function the windows differ by a local term
    f = random_fn(4)
    assert abs(retarded_pairing(KERN, f, 1, W) - retarded_pairing(KERN, f, 1, w2)) > 1e-4


@pytest.mark.parametrize("omega", [-1, 0, 1, 2])
def test_ret_plus_adv_reconstructs_the_pairing(omega):
    f = random_fn(5)
    assert abs(reconstruct_pairing(KERN, f, omega, W) - kernel_pairing(KERN, f)) < 1e-12


def test_splitting_constants():
    f = random_fn(6)
    base = retarded_pairing(KERN, f, 1, W)
    c = {(0, 0, 0, 0): 0.3, (0, 1, 0, 0): -0.2j}
    want = base + 0.3 * f.taylor_derivative((0, 0, 0, 0)) + 0.2j * f.taylor_derivative((0, 1, 0, 0))
    assert abs(retarded_pairing(KERN, f, 1, W, constants=c) - want) < 1e-14
    with pytest.raises(ValueError):
        retarded_pairing(KERN, f, 0, W, constants={(1, 0, 0, 0): 1.0})


# --- supports ---------------------------------------------------------------------

def test_precedence_examples():
    Y = SupportBox((-2, -50, -50, -50), (-1, 50, 50, 50))
    X = SupportBox((1, -50, -50, -50), (2, 50, 50, 50))
    assert precedes(Y, X) and not precedes(X, Y)
    a = SupportBox((0, 0, 0, 0), (1, 1, 1, 1))
    b = SupportBox((0, 10, 0, 0), (1, 11, 1, 1))
    assert precedes(a, b) and precedes(b, a)
    inner = SupportBox((5, 0, 0, 0), (6, 0.5, 0.5, 0.5))
    assert not precedes(inner, a)


def test_precedence_is_exact_at_the_cone():
    y = SupportBox((0, 0, 0, 0), (0, 0, 0, 0))
    on_cone = SupportBox((1, 1, 0, 0), (1, 1, 0, 0))
    outside = SupportBox((1, 1.001, 0, 0), (1, 1.001, 0, 0))
    assert not precedes(on_cone, y)
    assert precedes(outside, y)


def test_support_box_validation():
    with pytest.raises(ValueError):
        SupportBox((0, 0, 0, 0), (-1, 1, 1, 1))
    with pytest.raises(ValueError):
        SupportBox((0, 0, 0), (1, 1, 1))
    with pytest.raises(ValueError):
        SupportBox((0, 0, 0, 0), (np.inf, 1, 1, 1))


# --- partitions and the inductive step ------------------------------------------

def transposition_parity(order, mask):
    e = 0
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j] and mask[order[i]] and mask[order[j]]:
                e += 1
    return e % 2


@pytest.mark.parametrize("n", range(1, 7))
def test_partition_count(n):
    assert len(partitions([f"x{i}" for i in range(n)])) == 2 ** n - 1


@pytest.mark.parametrize("fermi", [(True, False, False), (False, True, False), (True, True, False)])
@pytest.mark.parametrize("last", [False, True])
def test_partition_signs_match_brute_force(fermi, last):
    Z = ("a", "b", "c")
    mask = list(fermi) + [last]
    for d in partitions(Z, fermi, last):
        xs = [Z.index(s) for s in d.X]
        ys = [Z.index(s) for s in d.Y]
        assert d.sign_xyn % 2 == transposition_parity(xs + ys + [3], mask)
        assert d.sign_ynx % 2 == transposition_parity(ys + [3] + xs, mask)


def test_inductive_step_counts():
    S1 = first_order(model_lagrangian(2))
    step = eg_inductive_step({1: S1}, 2)
    assert len(step.divisions) == 1
    assert step.D.sector_counts() == {(0, 0): 4, (0, 2): 8, (1, 1): 16, (2, 0): 8}
    assert step.ambiguity == {1: (-1, 0), 2: (0, 1)}
    S2 = normal_product(S1, S1.relabel({"x1": "x2"}))
    step3 = eg_inductive_step({1: S1, 2: S2}, 3)
    assert len(step3.divisions) == 3


def test_inductive_step_errors():
    with pytest.raises(KeyError):
        eg_inductive_step({1: first_order(model_lagrangian(1))}, 3)
    with pytest.raises(ValueError):
        eg_inductive_step({}, 1)


def test_degree_one_model_gives_the_commutator():
    L = model_lagrangian(1)
    step = eg_inductive_step({1: first_order(L)}, 2)
    # D_2 = R' - A' = [S_1(x1), S_1(x2)] = [L(x2), L(x1)]
    Lx1, Lx2 = L, L.relabel({"x1": "x2"})
    comm = (normal_product(Lx2, Lx1) - normal_product(Lx1, Lx2)).simplify()
    assert step.D.serialize() == comm.serialize()
    # oracle: D is the c-number [A(phi2), A(phi1)]
    g = ModeGrid([[0.2, 0.1, -0.3], [-0.4, 0.3, 0.2]], 0.3, [scalar(1.0, "phi")], nmax=2)
    p1, p2 = gaussian([0, 0, 0, 0], 0.6), gaussian([0.8, 0.3, 0, 0], 0.6)
    mask = subcutoff_mask(g, 1)
    D = evaluate_expression(step.D, {"x1": p1, "x2": p2}, g).toarray()[np.ix_(mask, mask)]
    A1, A2 = assemble_field(g, "phi", 0, p1), assemble_field(g, "phi", 0, p2)
    C = (A2 @ A1 - A1 @ A2).toarray()[np.ix_(mask, mask)]
    assert np.linalg.norm(D - C) / np.linalg.norm(C) < 1e-12


def test_commutator_support():
    pr = [PairSpec(scalar(1.0))]
    e = gaussian([0, 0, 0, 0], 0.4)
    spacelike, timelike = gaussian([0, 6, 0, 0], 0.4), gaussian([6, 0, 0, 0], 0.4)
    a = contract_integral(pr, e, spacelike).value - contract_integral(pr, spacelike, e).value
    b = contract_integral(pr, e, timelike).value - contract_integral(pr, timelike, e).value
    assert abs(a) < 1e-15 and abs(b) > 1e-3


def test_scaling_degree_cross_check():
    x = np.array([0.1, 0.5, -0.3, 0.4])
    assert scaling_degree(pairing_function(0.0), x) == pytest.approx(2.0, abs=1e-9)
    assert scaling_degree(pairing_function(1.0), x) == pytest.approx(2.0, abs=0.01)
    with pytest.raises(ValueError):
        pairing_function(0.0)(np.array([1.0, 0, 0, 0]))


# --- axioms ------------------------------------------------------------------------------

def _scalar_grid():
    return ModeGrid([[0.2, 0.1, -0.3], [-0.4, 0.3, 0.2]], 0.3, [scalar(1.0, "phi")], nmax=2)


A2 = [factor("phi", 0, "x"), factor("phi", 0, "x")]
EARLY, LATE = gaussian([0, 0, 0, 0], 0.4), gaussian([6, 0.3, 0, 0], 0.4)
QED_GRID = ModeGrid([[0.3, -0.2, 0.5]], 0.7, [dirac(1.0), photon()], nmax=1)
QPHI = gaussian([0.1, 0.2, -0.1, 0.3], 0.9, mod=[0.3, 0.1, 0, 0.2])


def test_axiom_causality():
    r = axiom_causality(_scalar_grid(), A2, EARLY, LATE)
    assert r["pass"] and r["residual"] < 1e-6
    with pytest.raises(ValueError):
        axiom_causality(_scalar_grid(), A2, LATE, EARLY)


def test_axiom_translation():
    r = axiom_translation(_scalar_grid(), A2, LATE, EARLY, [0.3, 0.1, 0.2, -0.5])
    assert r["pass"] and r["residual"] < 1e-8


def test_axiom_krein():
    r = axiom_krein(QED_GRID, QPHI)
    assert r["pass"] and r["residual"] < 1e-10


def test_axiom_first_order_qed_and_model():
    assert axiom_first_order(QED_GRID, qed_lagrangian(), QPHI)["pass"]
    g = ModeGrid([[0.2, 0.1, -0.3]], 0.5, [scalar(1.0, "phi")], nmax=4)
    r = axiom_first_order(g, [(A2, 0.5)], QPHI)
    S1 = 1j * evaluate_expression(model_lagrangian(2), {"x1": QPHI}, g)
    assert r["pass"]
    assert np.allclose(S1.toarray(), evaluate_expression(first_order(model_lagrangian(2)),
                                                         {"x1": QPHI}, g).toarray())


def test_axiom_vanishing():
    phi = vanishing_test_function((1, 1, 1, 0), center=[0.3, -0.2, 0.1, 0.2])
    r = check_axiom("V", kernel=KERN, phi=phi, omega=2)
    assert r["pass"] and r["residual"] < 1e-9
    with pytest.raises(ValueError):
        axiom_vanishing(KERN, gaussian([0.1, 0, 0, 0], 0.7), 1)


def test_unknown_axiom():
    with pytest.raises(ValueError):
        check_axiom("VI")


def test_qed_lagrangian_has_sixteen_monomials():
    mons = qed_lagrangian()
    assert len(mons) == 16
    assert all(len(fs) == 3 for fs, _ in mons)

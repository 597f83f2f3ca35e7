"""Causal splitting: Taylor subtraction, theta-splitting, partitions and axiom checks.

The splitting of a causally supported kernel kappa of singularity order
omega is

    ret kappa (phi) = < kappa, theta(t) * Omega' phi >,
    Omega' phi = phi - sum_{|alpha| <= omega} D^alpha phi(0) omega_alpha,
    omega_alpha(x) = x^alpha / alpha! * w(x),

with a window w equal to 1 near the origin.  The window used here is the
separable super-Gaussian w(x) = prod_j exp(-(x_j / R)^8), whose Taylor
series at 0 starts at order 8, so D^beta omega_alpha(0) = delta for all
|alpha|, |beta| <= 7 exactly.

Kernels are either plane-wave sums (the form every grid kernel takes) or
plain callables.  Plane-wave sums are paired with separable test functions
through one-dimensional integrals; callables use tensor Gauss-Legendre
quadrature.
"""
from dataclasses import dataclass
from itertools import combinations
from math import comb, factorial

import numpy as np
from scipy.special import k1

from .fock import subcutoff_mask, translation_operator
from .oracle import evaluate_expression, product_oracle, slot_frequency, smeared_monomial
from .testfn import TestFunction, correlate, multi_indices
from .wick import (FockExpansion, factor, inversion_count, multi_product,
                   normal_product, wick_monomial)

MAX_OMEGA = 7


# --- Taylor window and Omega' -----------------------------------------

@dataclass(frozen=True)
class TaylorWindow:
    """w(x) = prod_j exp(-(x_j / R)^power); equal to 1 to double precision for |x_j| < R/100."""
    radius: float = 1.0
    dim: int = 4
    power: int = 8

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("window radius must be positive")
        if self.power < 2 or self.power % 2:
            raise ValueError("window power must be even and >= 2")

    @property
    def flat_radius(self):
        # 1 - w < 1e-16 inside this cube
        return self.radius * 1e-16 ** (1.0 / self.power)

    @property
    def max_order(self):
        return self.power - 1

    def axis_factor(self, a, t):
        t = np.asarray(t, dtype=float)
        return t ** a / factorial(a) * np.exp(-(t / self.radius) ** self.power)

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.exp(-np.sum((x / self.radius) ** self.power, axis=-1))

    def generator(self, alpha, x):
        """omega_alpha(x) = x^alpha / alpha! * w(x) at points x (N, d)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.ones(len(x))
        for j, a in enumerate(alpha):
            out = out * self.axis_factor(a, x[:, j])
        return out

    def generator_derivative(self, alpha, beta):
        """Exact D^beta omega_alpha(0) from the Taylor series of the window."""
        out = 1.0
        for a, b in zip(alpha, beta):
            d = b - a
            if d < 0 or d % self.power:
                return 0.0
            k = d // self.power
            out *= (-1) ** k / (self.radius ** (self.power * k) * factorial(k)) \
                * factorial(b) / factorial(a)
        return out

    def extent(self):
        # exp(-(t/R)^8) < 1e-30 beyond this
        return self.radius * 69.1 ** (1.0 / self.power)


def singularity_check(omega):
    if int(omega) != omega or omega < -1:
        raise ValueError("singularity order must be an integer >= -1")
    if omega > MAX_OMEGA:
        raise ValueError(f"orders above {MAX_OMEGA} are not supported by the window")
    return int(omega)


def ambiguity_dim(omega, dim=4):
    """Number of free constants C^alpha in the splitting: #{|alpha| <= omega}."""
    omega = singularity_check(omega)
    return 0 if omega < 0 else comb(omega + dim, dim)


class SubtractedTestFn:
    """base - sum_i c_i omega_{alpha_i} (window generators)."""

    def __init__(self, base, window, terms=()):
        if window.dim != base.dim:
            raise ValueError("window dimension mismatch")
        self.base = base
        self.window = window
        self.terms = tuple(terms)   # (alpha, c)

    @property
    def dim(self):
        return self.base.dim

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.asarray(self.base(x), dtype=complex)
        for alpha, c in self.terms:
            out = out - c * self.window.generator(alpha, x)
        return out

    def taylor_derivative(self, beta):
        v = self.base.taylor_derivative(beta)
        for alpha, c in self.terms:
            v -= c * self.window.generator_derivative(alpha, beta)
        return v


def omega_prime(phi, omega, window=None):
    """Omega' phi: subtract the order-omega Taylor jet at 0 using window generators.

    omega = -1 returns phi unchanged.
    """
    omega = singularity_check(omega)
    if omega < 0:
        return phi
    window = window or TaylorWindow(dim=phi.dim)
    if isinstance(phi, SubtractedTestFn):
        if phi.window != window:
            raise ValueError("nested subtraction needs the same window")
        base, old = phi.base, list(phi.terms)
    else:
        base, old = phi, []
    new = [(a, phi.taylor_derivative(a)) for a in multi_indices(phi.dim, omega)]
    return SubtractedTestFn(base, window, old + new)


def fd_derivative(f, alpha, h=0.02, half=5):
    """Central finite-difference D^alpha f(0) with a (2 half + 1)-point stencil per axis."""
    offs = np.arange(-half, half + 1)
    stencils = []
    for a in alpha:
        if a == 0:
            stencils.append((np.zeros(1), np.ones(1)))
            continue
        V = np.vander(offs.astype(float), increasing=True).T   # rows: powers
        rhs = np.zeros(len(offs))
        rhs[a] = factorial(a)
        w = np.linalg.solve(V, rhs) / h ** a
        stencils.append((offs * h, w))
    grids = np.meshgrid(*[s[0] for s in stencils], indexing="ij")
    wts = np.ones_like(grids[0])
    for j, g in enumerate(np.meshgrid(*[s[1] for s in stencils], indexing="ij")):
        wts = wts * g
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    return complex(np.sum(wts.ravel() * f(pts)))


# --- kernels and pairings -----------------------------------------------

@dataclass
class PlaneWaveSum:
    """kappa(x) = sum_k c_k exp(i k_k . x) with Euclidean frequencies k_k."""
    freqs: np.ndarray
    coefs: np.ndarray

    def __post_init__(self):
        self.freqs = np.atleast_2d(np.asarray(self.freqs, dtype=float))
        self.coefs = np.atleast_1d(np.asarray(self.coefs, dtype=complex))
        if len(self.freqs) != len(self.coefs):
            raise ValueError("one coefficient per frequency")

    @classmethod
    def from_minkowski(cls, q, coefs):
        """exp(i q.x) with the (+,-,-,-) product."""
        return cls(euclidean(q), coefs)

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.exp(1j * x @ self.freqs.T) @ self.coefs


def euclidean(q):
    """Euclidean frequency k with exp(i k.x) = exp(i q.x) Minkowski."""
    k = np.array(q, dtype=float)
    k[..., 1:] *= -1
    return k


def _line_rule(lo, hi, panel, n=16):
    if hi <= lo:
        return np.zeros(0), np.zeros(0)
    m = max(1, int(np.ceil((hi - lo) / panel)))
    x, w = np.polynomial.legendre.leggauss(n)
    edges = np.linspace(lo, hi, m + 1)
    a, b = edges[:-1, None], edges[1:, None]
    return (0.5 * (b - a) * x + 0.5 * (b + a)).ravel(), (0.5 * (b - a) * w).ravel()


def _clip(lo, hi, theta):
    if theta == 1:
        return max(lo, 0.0), max(hi, 0.0)
    if theta == -1:
        return min(lo, 0.0), min(hi, 0.0)
    return lo, hi


def _axis_integrals(fun, lo, hi, k, theta, panel):
    x, w = _line_rule(*_clip(lo, hi, theta), panel)
    if x.size == 0:
        return np.zeros(len(k), dtype=complex)
    return np.exp(1j * np.outer(k, x)) @ (w * fun(x))


def _testfn_axis(part, k, theta, panel):
    # part: 1D TestFunction
    if theta is None:
        from .testfn import fourier
        return np.sqrt(2 * np.pi) * fourier(part)(k[:, None])
    c, s = part.center[0], part.width[0]
    return _axis_integrals(lambda t: part(t[:, None]), c - 14 * s, c + 14 * s, k, theta, panel)


def _panel(width, k):
    kmax = float(np.max(np.abs(k))) if k.size else 0.0
    return min(0.5 * width, 1.0 / (kmax + 1e-12) if kmax > 0 else np.inf)


def _plane_wave_pair(kernel, f, theta):
    """< kernel, theta(+-t) f > for a plane-wave sum and a (subtracted) test function."""
    base = f.base if isinstance(f, SubtractedTestFn) else f
    d = base.dim
    K = kernel.freqs
    if K.shape[1] != d:
        raise ValueError("kernel and test function dimensions differ")
    total = np.zeros(len(K), dtype=complex)
    for coef, parts in base.separable_terms():
        val = np.full(len(K), coef, dtype=complex)
        for j, part in enumerate(parts):
            th = theta if j == 0 else None
            val *= _testfn_axis(part, K[:, j], th, _panel(part.width[0], K[:, j]))
        total += val
    if isinstance(f, SubtractedTestFn):
        win = f.window
        E = win.extent()
        for alpha, c in f.terms:
            val = np.full(len(K), c, dtype=complex)
            for j, a in enumerate(alpha):
                th = theta if j == 0 else None
                val *= _axis_integrals(lambda t, a=a: win.axis_factor(a, t), -E, E,
                                       K[:, j], th, _panel(win.radius / 4, K[:, j]))
            total -= val
    return complex(total @ kernel.coefs)


def _box(f):
    base = f.base if isinstance(f, SubtractedTestFn) else f
    lo = base.center - 12 * base.width
    hi = base.center + 12 * base.width
    if isinstance(f, SubtractedTestFn):
        E = f.window.extent()
        lo, hi = np.minimum(lo, -E), np.maximum(hi, E)
    return lo, hi, base.width


def _callable_pair(kernel, f, theta, n=16, max_nodes=2_000_000):
    lo, hi, width = _box(f)
    rules = []
    for j in range(len(lo)):
        a, b = (_clip(lo[j], hi[j], theta) if j == 0 else (lo[j], hi[j]))
        rules.append(_line_rule(a, b, 0.5 * width[j], n))
    size = np.prod([len(r[0]) for r in rules])
    if size == 0:
        return 0j
    if size > max_nodes:
        raise RuntimeError("tensor quadrature too large; use a plane-wave kernel")
    X = np.stack(np.meshgrid(*[r[0] for r in rules], indexing="ij"), -1).reshape(-1, len(lo))
    W = np.ones(1)
    for r in rules:
        W = np.outer(W, r[1]).ravel()
    return complex(np.sum(W * kernel(X) * f(X)))


def _pair(kernel, f, theta):
    if isinstance(kernel, PlaneWaveSum):
        return _plane_wave_pair(kernel, f, theta)
    return _callable_pair(kernel, f, theta)


def kernel_pairing(kernel, f):
    """< kernel, f > over all of space-time."""
    return _pair(kernel, f, None)


def retarded_pairing(kernel, phi, omega=-1, window=None, adv=False, constants=None):
    """< kernel, theta(+-t) Omega' phi >; adv selects theta(-t).

    `constants` maps multi-indices alpha (|alpha| <= omega) to C^alpha and
    adds sum C^alpha < delta^(alpha), phi > = sum C^alpha (-1)^|alpha| D^alpha phi(0).
    """
    psi = omega_prime(phi, omega, window)
    val = _pair(kernel, psi, -1 if adv else 1)
    for alpha, c in (constants or {}).items():
        if sum(alpha) > omega:
            raise ValueError("splitting constants only exist for |alpha| <= omega")
        val += c * (-1) ** sum(alpha) * phi.taylor_derivative(alpha)
    return val


def reconstruct_pairing(kernel, phi, omega, window=None):
    """ret + adv plus the Taylor terms removed by Omega'; equals < kernel, phi >."""
    window = window or TaylorWindow(dim=phi.dim)
    ret = retarded_pairing(kernel, phi, omega, window)
    adv = retarded_pairing(kernel, phi, omega, window, adv=True)
    back = 0j
    if singularity_check(omega) >= 0:
        for a in multi_indices(phi.dim, omega):
            gen = SubtractedTestFn(phi.copy(amp=0.0), window, [(a, -1.0)])
            back += phi.taylor_derivative(a) * kernel_pairing(kernel, gen)
    return ret + adv + back


# --- singularity order ---------------------------------------------------

SCALING_DEGREE = {"scalar": 2, "photon": 2, "fermion": 3, "dirac": 3}


def singularity_order(kinds, dim=4):
    """omega = sum of the scaling degrees of the contracted pairings - dim (at least -1)."""
    sd = sum(SCALING_DEGREE[k] for k in kinds)
    return singularity_check(max(-1, sd - dim))


def pairing_function(mass=0.0):
    """Scalar two-point function at spacelike separation, as a function of x (..., 4)."""
    def D(x):
        x = np.asarray(x, dtype=float)
        s2 = np.sum(x[..., 1:] ** 2, axis=-1) - x[..., 0] ** 2
        if np.any(s2 <= 0):
            raise ValueError("pairing_function is only given at spacelike points")
        r = np.sqrt(s2)
        if mass == 0:
            return 1 / (4 * np.pi ** 2 * s2)
        return mass * k1(mass * r) / (4 * np.pi ** 2 * r)
    return D


def scaling_degree(kernel, x, lambdas=(1e-2, 1e-3, 1e-4)):
    """Estimate sd from |kernel(lambda x)| ~ lambda^-sd as lambda -> 0."""
    lam = np.asarray(lambdas, dtype=float)
    vals = np.array([abs(kernel(l * np.asarray(x, dtype=float))) for l in lam])
    return float(-np.polyfit(np.log(lam), np.log(vals), 1)[0])


# --- supports and precedence ---------------------------------------------

@dataclass(frozen=True)
class SupportBox:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo, hi = np.asarray(self.lo, float), np.asarray(self.hi, float)
        if lo.shape != (4,) or hi.shape != (4,):
            raise ValueError("support boxes are 4-dimensional")
        if not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)):
            raise ValueError("support boxes must be finite")
        if np.any(hi < lo):
            raise ValueError("empty support box")

    @classmethod
    def around(cls, phi, k=6.0):
        """Effective support of a Gaussian-type test function: center +- k widths."""
        return cls(tuple(phi.center - k * phi.width), tuple(phi.center + k * phi.width))


def _box_gap(a, b):
    lo1, hi1 = np.asarray(a.lo)[1:], np.asarray(a.hi)[1:]
    lo2, hi2 = np.asarray(b.lo)[1:], np.asarray(b.hi)[1:]
    gap = np.maximum(0.0, np.maximum(lo1 - hi2, lo2 - hi1))
    return float(np.sqrt(np.sum(gap ** 2)))


def in_past_shadow(x_box, y_box):
    """Does x_box meet y_box + closed backward cone, i.e. y - x in closed V+ for some x, y?"""
    reach = y_box.hi[0] - x_box.lo[0] - _box_gap(x_box, y_box)
    return reach >= 0


def precedes(Y, X):
    """Y precedes X: no point of X lies in the past causal shadow of Y."""
    Y = [Y] if isinstance(Y, SupportBox) else list(Y)
    X = [X] if isinstance(X, SupportBox) else list(X)
    return not any(in_past_shadow(xb, yb) for xb in X for yb in Y)


# --- partitions and the inductive step -------------------------------------

@dataclass(frozen=True)
class Division:
    X: tuple
    Y: tuple
    sign_xyn: int      # Fermi transpositions taking (Z, x_n) to (X, Y, x_n)
    sign_ynx: int      # ... to (Y, x_n, X)


def partitions(Z, fermi=None, last_fermi=False):
    """All divisions Z = X u Y with X nonempty, with their Fermi sign exponents."""
    Z = tuple(Z)
    if not Z:
        raise ValueError("need at least one slot")
    fermi = tuple(fermi) if fermi is not None else (False,) * len(Z)
    mask = list(fermi) + [last_fermi]
    n = len(Z)
    out = []
    for r in range(1, n + 1):
        for xs in combinations(range(n), r):
            ys = tuple(i for i in range(n) if i not in xs)
            e1 = inversion_count(list(xs) + list(ys) + [n], mask)
            e2 = inversion_count(list(ys) + [n] + list(xs), mask)
            out.append(Division(tuple(Z[i] for i in xs), tuple(Z[i] for i in ys), e1, e2))
    return out


def _ordered_set_partitions(items):
    items = tuple(items)
    if not items:
        yield ()
        return
    n = len(items)
    for r in range(1, n + 1):
        for first in combinations(range(n), r):
            rest = tuple(items[i] for i in range(n) if i not in first)
            for tail in _ordered_set_partitions(rest):
                yield (tuple(items[i] for i in first),) + tail


def _at(S, k, slots):
    """S_k relabelled to the given slots (generic slots are x1..xk)."""
    if k not in S:
        raise KeyError(f"order {k} is missing from the lower orders")
    return S[k].relabel({f"x{i + 1}": s for i, s in enumerate(slots)})


def s_of(S, slots):
    if not slots:
        return FockExpansion.scalar(1.0)
    return _at(S, len(slots), slots)


def s_bar(S, slots):
    """Inverse series: sum over ordered set partitions of (-1)^r S(P1)...S(Pr)."""
    if not slots:
        return FockExpansion.scalar(1.0)
    total = None
    for parts in _ordered_set_partitions(slots):
        term = multi_product([s_of(S, p) for p in parts])
        term = term.scaled((-1) ** len(parts))
        total = term if total is None else total + term
    return total


@dataclass
class CausalStep:
    n: int
    divisions: list
    A_prime: FockExpansion
    R_prime: FockExpansion
    D: FockExpansion
    ambiguity: dict     # q -> (omega, number of free constants)


def eg_inductive_step(S_lower, n, fermi=None, kinds=("scalar",)):
    """A'_n, R'_n and D_n = R'_n - A'_n from the lower orders S_1 .. S_{n-1}.

    S_lower maps k -> FockExpansion in slots x1..xk.  Every division
    X u Y = {x1..x_{n-1}} contributes Sbar(X) S(Y, x_n) to A' and
    S(Y, x_n) Sbar(X) to R', with the block signs of the division.
    """
    if n < 2:
        raise ValueError("the inductive step starts at n = 2")
    for k in range(1, n):
        if k not in S_lower:
            raise KeyError(f"order {k} is missing from the lower orders")
    Z = [f"x{i + 1}" for i in range(n - 1)]
    xn = f"x{n}"
    divs = partitions(Z, fermi)
    A = FockExpansion()
    R = FockExpansion()
    for dv in divs:
        sy = s_of(S_lower, dv.Y + (xn,))
        sb = s_bar(S_lower, dv.X)
        A = A + normal_product(sb, sy).scaled((-1) ** dv.sign_xyn)
        R = R + normal_product(sy, sb).scaled((-1) ** dv.sign_ynx)
    A, R = A.simplify(), R.simplify()
    D = (R - A).simplify()
    amb = {}
    for t in D.terms():
        q = len(t.pairs)
        if q and q not in amb:
            om = singularity_order([kinds[0]] * q)
            amb[q] = (om, ambiguity_dim(om))
    return CausalStep(n, divs, A, R, D, amb)


# --- grid realisation of the second order --------------------------------

def split_weight(grid, testfns, window=None, kinds=("scalar",), adv=False, omega=None):
    """Weight hook smearing a two-slot term with its retarded (or advanced) splitting.

    For a term with pair frequency q_p at x1 and operator frequencies
    q1, q2 the value is < exp(i q_p . r), theta(r0) Omega' psi > with
    psi(r) = exp(i q1.r) int phi1(r + y) phi2(y) exp(i (q1 + q2).y) dy.
    """
    window = window or TaylorWindow()
    phi1, phi2 = testfns["x1"], testfns["x2"]
    cache = {}

    def weight(slots, pk, ok):
        if list(slots) != ["x1", "x2"]:
            raise ValueError("the split weight needs exactly the slots x1, x2")
        q = len(pk[0])
        om = omega if omega is not None else singularity_order([kinds[0]] * q) if q else -1
        qp = slot_frequency(grid, pk[0])
        q1 = slot_frequency(grid, ok[0])
        q2 = slot_frequency(grid, ok[1])
        key = (tuple(np.round(qp, 14)), tuple(np.round(q1, 14)), tuple(np.round(q2, 14)), om)
        if key not in cache:
            psi = correlate(phi1, phi2.modulate(euclidean(q1 + q2))).modulate(euclidean(q1))
            kern = PlaneWaveSum.from_minkowski(qp, [1.0])
            cache[key] = retarded_pairing(kern, psi, om, window, adv)
        return cache[key]

    return weight


def model_lagrangian(degree=2, field="phi", coupling=None):
    """:A^k:/k! for a neutral scalar field, in slot x1."""
    c = coupling if coupling is not None else 1.0 / factorial(degree)
    return wick_monomial([factor(field, 0, "x1") for _ in range(degree)], c)


def first_order(L):
    """S_1 = i L."""
    return L.scaled(1j)


def second_order_matrix(step, grid, phi1, phi2, window=None, kinds=("scalar",), cols=None,
                        omega=None):
    """S_2(phi1 x phi2) = ret D_2 - R'_2 on the grid."""
    tf = {"x1": phi1, "x2": phi2}
    w = split_weight(grid, tf, window, kinds, omega=omega)
    ret = evaluate_expression(step.D, tf, grid, cols=cols, weight=w)
    rp = evaluate_expression(step.R_prime, tf, grid, cols=cols)
    return ret - rp


# --- axioms --------------------------------------------------------------

def _report(axiom, order, residual, tol):
    return {"axiom": axiom, "order": order, "residual": float(residual),
            "tolerance": tol, "pass": bool(residual < tol)}


def _norm(M):
    M = M.toarray() if hasattr(M, "toarray") else np.asarray(M)
    return float(np.linalg.norm(M))


def axiom_causality(grid, L_factors, phi_early, phi_late, nmax=2, window=None, tol=1e-6):
    """(I) at order 2 in both slot orders: S_2 = S_1(later) S_1(earlier).

    The right-hand side comes from the independent oracle route.
    """
    if not precedes(SupportBox.around(phi_early), SupportBox.around(phi_late)):
        raise ValueError("test functions are not causally ordered")
    L = wick_monomial(_slot(L_factors, "x1"), 1.0 / factorial(len(L_factors)))
    step = eg_inductive_step({1: first_order(L)}, 2)
    big = grid.with_cutoff(nmax + 2 * len(L_factors))
    mask = subcutoff_mask(big, nmax)
    c = 1j / factorial(len(L_factors))
    res = 0.0
    for phi1, phi2 in ((phi_late, phi_early), (phi_early, phi_late)):
        S2 = second_order_matrix(step, big, phi1, phi2, window, cols=mask)
        later, earlier = (phi1, phi2) if phi1 is phi_late else (phi2, phi1)
        ref = product_oracle(big, [(list(_slot(L_factors, "x")), c, later),
                                   (list(_slot(L_factors, "x")), c, earlier)], cols=mask)
        diff = (S2 - ref)[np.flatnonzero(mask)]
        scale = max(_norm(ref[np.flatnonzero(mask)]), 1e-300)
        res = max(res, _norm(diff) / scale)
    return _report("I", 2, res, tol)


def _slot(factors, slot):
    from dataclasses import replace
    return [replace(f, slot=slot) for f in factors]


def axiom_translation(grid, L_factors, phi1, phi2, b, window=None, tol=1e-8):
    """(II) translations at orders 1 and 2: U S(phi) U^+ = S(phi(. - b))."""
    L = wick_monomial(_slot(L_factors, "x1"), 1.0 / factorial(len(L_factors)))
    S1 = first_order(L)
    step = eg_inductive_step({1: S1}, 2)
    U = translation_operator(grid, b)
    Ud = U.conj().T
    res = 0.0
    m1 = evaluate_expression(S1, {"x1": phi1}, grid)
    m1b = evaluate_expression(S1, {"x1": phi1.translate(b)}, grid)
    res = max(res, _norm(U @ m1 @ Ud - m1b) / max(_norm(m1), 1e-300))
    m2 = second_order_matrix(step, grid, phi1, phi2, window)
    m2b = second_order_matrix(step, grid, phi1.translate(b), phi2.translate(b), window)
    res = max(res, _norm(U @ m2 @ Ud - m2b) / max(_norm(m2), 1e-300))
    return _report("II-translations", 2, res, tol)


def qed_lagrangian(psi="psi", A="A", slot="x1"):
    """L = sum_mu (gamma^0 gamma^mu)_ab :psi*_a psi_b A_mu: as (factors, coeff) monomials."""
    from .fields import gamma_matrices
    g = gamma_matrices()
    out = []
    for mu in range(4):
        M = g[0] @ g[mu]
        for a in range(4):
            for b in range(4):
                if abs(M[a, b]) > 1e-15:
                    fs = [factor(psi, a, slot, conj=True, fermi=True),
                          factor(psi, b, slot, fermi=True),
                          factor(A, mu, slot)]
                    out.append((fs, complex(M[a, b])))
    return out


def qed_expansion(monomials):
    total = FockExpansion()
    for fs, c in monomials:
        total = total + wick_monomial(fs, c)
    return total


def axiom_krein(grid, phi, tol=1e-10):
    """(III) at first order: eta S_1(phi)^+ eta = -S_1(conj phi) for the QED density."""
    from .fock import krein_metric
    L = qed_expansion(qed_lagrangian())
    eta, _ = krein_metric(grid)
    S = 1j * evaluate_expression(L, {"x1": phi}, grid)
    Sbar = 1j * evaluate_expression(L, {"x1": phi.conj()}, grid)
    lhs = eta @ S.conj().T @ eta
    res = _norm(lhs + Sbar) / max(_norm(S), 1e-300)
    return _report("III", 1, res, tol)


def axiom_first_order(grid, monomials, phi, tol=1e-12):
    """(IV) S_1 = i L: the symbolic expansion against the oracle's smeared monomials."""
    L = qed_expansion([(_slot(fs, "x1"), c) for fs, c in monomials])
    S = 1j * evaluate_expression(L, {"x1": phi}, grid)
    ref = 0
    for fs, c in monomials:
        ref = ref + smeared_monomial(grid, fs, phi, 1j * c)
    # the oracle normal-orders truncated ladders: with k >= 2 Bose factors only
    # columns at least k - 1 below the cutoff are exact
    k = max((sum(not f.fermi for f in fs) for fs, _ in monomials), default=0)
    if k >= 2:
        cols = np.flatnonzero(subcutoff_mask(grid, grid.nmax - k + 1))
        S, ref = S[:, cols], ref[:, cols]
    res = _norm(S - ref) / max(_norm(ref), 1e-300)
    return _report("IV", 1, res, tol)


def axiom_vanishing(kernel, phi, omega, window=None, tol=1e-9):
    """(V) for phi vanishing to order omega at 0 the split equals plain theta multiplication."""
    for a in multi_indices(phi.dim, omega):
        if abs(phi.taylor_derivative(a)) > 1e-12:
            raise ValueError("test function does not vanish to the requested order")
    v1 = retarded_pairing(kernel, phi, omega, window)
    v0 = retarded_pairing(kernel, phi, -1, window)
    res = abs(v1 - v0) / max(abs(v0), 1e-300)
    return _report("V", omega, res, tol)


AXIOMS = {"I": axiom_causality, "II-translations": axiom_translation,
          "III": axiom_krein, "IV": axiom_first_order, "V": axiom_vanishing}


def check_axiom(axiom, **config):
    if axiom not in AXIOMS:
        raise ValueError(f"unchecked axiom {axiom!r}")
    return AXIOMS[axiom](**config)


def vanishing_test_function(orders, width=0.7, dim=4, center=None):
    """x^orders * Gaussian: vanishes at 0 to order |orders| - 1 wherever the Gaussian sits."""
    center = np.zeros(dim) if center is None else center
    f = TestFunction(center, width)
    for j, k in enumerate(orders):
        f = f.times_coordinate(j, k)
    return f

"""Momentum-space contraction integrals and the massless eps-limit.

A q-fold contraction of the annihilation halves at slot x with the creation
halves at slot y is

    I = int prod_i d^3p_i w_i(p_i) * S_x(-P) * S_y(P),   P = sum_i (p0_i, p_i)

with w_i = sum_s mult_ann(s,p) mult_cre(s,p) krein(s) and
S(q) = int phi(x) exp(i q.x) d^4x (Minkowski product).  For q = 1 this is the
pairing <k01(phi), k10(chi)>; on a grid the same integrand summed with dV
weights is the mode sum.  For massless fields the energies in the
exponents are deformed to sqrt(|p|^2 + eps^2); multipliers are not.
"""
from dataclasses import dataclass

import numpy as np

from .fields import ANNIHILATION, CREATION, energy, multiplier
from .fock import smearing


@dataclass(frozen=True)
class PairSpec:
    """One contracted pair: annihilation half at x, creation half at y."""
    field: object
    ann_comp: int = 0
    cre_comp: int = 0
    ann_conj: bool = False
    cre_conj: bool = False

    def _half(self, part, s, p, comp, conj):
        if conj:
            other = CREATION if part == ANNIHILATION else ANNIHILATION
            return np.conj(multiplier(self.field, other, s, p, comp))
        return multiplier(self.field, part, s, p, comp)

    def weight(self, p):
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape[:-1], dtype=complex)
        for s in self.field.labels:
            out = out + (self._half(ANNIHILATION, s, p, self.ann_comp, self.ann_conj)
                         * self._half(CREATION, s, p, self.cre_comp, self.cre_conj)
                         * self.field.krein_sign(s))
        return out

    @property
    def isotropic(self):
        return self.field.kind in ("scalar", "photon", "fermion")


@dataclass(frozen=True)
class QuadratureSpec:
    radius: float = 0.0     # 0 -> chosen from the test functions
    points: int = 24        # radial nodes per panel set (>= 8)
    angular: int = 12
    rule: str = "gauss-legendre"

    def __post_init__(self):
        if self.points < 8:
            raise ValueError("need at least 8 points per axis")
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    def refined(self, factor=1.5):
        return QuadratureSpec(self.radius, int(round(self.points * factor)),
                              int(round(self.angular * factor)), self.rule)


@dataclass(frozen=True)
class ContractionValue:
    value: complex
    error: float
    converged: bool = True


class QuadratureError(RuntimeError):
    pass


def _panels(R, eps, graded=True):
    if not graded:
        return np.array(sorted({0.0, min(max(2 * eps, 0.5), R), R}))
    edges = [0.0]
    for b in (0.5 * eps, eps, 2 * eps, 4 * eps, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0):
        if edges[-1] < b < R:
            edges.append(b)
    edges.append(R)
    return np.array(sorted(set(edges)))


def radial_rule(R, n, eps=0.0, graded=True):
    """Composite Gauss-Legendre nodes/weights on [0, R], graded towards 0."""
    x, w = np.polynomial.legendre.leggauss(n)
    edges = _panels(R, eps, graded)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (b + a))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def sphere_rule(n_r, n_ang, R, eps=0.0, graded=True):
    """Nodes (N,3) and weights for int_{|p|<R} d^3p in spherical coordinates."""
    r, wr = radial_rule(R, n_r, eps, graded)
    ct, wct = np.polynomial.legendre.leggauss(n_ang)
    ph = 2 * np.pi * np.arange(2 * n_ang) / (2 * n_ang)
    wph = np.full(ph.size, 2 * np.pi / ph.size)
    st = np.sqrt(1 - ct ** 2)
    dirs = np.stack([np.outer(st, np.cos(ph)), np.outer(st, np.sin(ph)),
                     np.outer(ct, np.ones_like(ph))], axis=-1).reshape(-1, 3)
    wdir = np.outer(wct, wph).ravel()
    P = (r[:, None, None] * dirs[None]).reshape(-1, 3)
    W = (wr[:, None] * r[:, None] ** 2 * wdir[None]).ravel()
    return P, W


def _auto_radius(phi, chi):
    wmin = min(phi.width.min(), chi.width.min())
    shift = max(np.linalg.norm(phi.mod), np.linalg.norm(chi.mod))
    return 9.0 / wmin + shift


def _four(field, p, eps):
    return np.concatenate([energy(field, p, eps)[..., None], p], axis=-1)


def _is_isotropic(phi):
    if phi.dim != 4:
        return False
    return (np.allclose(phi.center[1:], 0) and np.allclose(phi.mod[1:], 0)
            and np.allclose(phi.width[1:], phi.width[1])
            and all(n == 1 for n in phi.coef.shape[1:]))


def contract_integral(pairs, phi, chi, eps=0.0, spec=None, tol=1e-6):
    """Continuum contraction integral with a one-level refinement error estimate."""
    spec = spec or QuadratureSpec()
    v1 = _contract(pairs, phi, chi, eps, spec)
    v2 = _contract(pairs, phi, chi, eps, spec.refined())
    err = abs(v2 - v1)
    scale = max(abs(v2), 1e-300)
    converged = err <= 10 * tol * scale or err < 1e-14
    return ContractionValue(v2, err, converged)


def _contract(pairs, phi, chi, eps, spec):
    if phi.amp == 0 or chi.amp == 0:
        return 0j
    R = spec.radius or _auto_radius(phi, chi)
    q = len(pairs)
    if q == 0:
        return smearing(phi, np.zeros(4), 1) * smearing(chi, np.zeros(4), 1)
    if q == 1:
        P, W = sphere_rule(spec.points, spec.angular, R, eps)
        pr = pairs[0]
        p4 = _four(pr.field, P, eps)
        vals = pr.weight(P) * smearing(phi, -p4, 1) * smearing(chi, p4, 1)
        return complex(np.sum(W * vals))
    if q == 2:
        if all(p.isotropic for p in pairs) and _is_isotropic(phi) and _is_isotropic(chi):
            return _contract2_iso(pairs, phi, chi, eps, spec, R)
        return _contract2_general(pairs, phi, chi, eps, spec, R)
    raise NotImplementedError("contractions with q > 2 are not supported")


def _contract2_general(pairs, phi, chi, eps, spec, R, chunk=400):
    # coarse panels: the full 6D product rule grows as (nodes per variable)^2
    P, W = sphere_rule(spec.points, spec.angular, R, eps, graded=False)
    a, b = pairs
    pa = _four(a.field, P, eps)
    pb = _four(b.field, P, eps)
    wa = a.weight(P) * W
    wb = b.weight(P) * W
    total = 0j
    for i in range(0, len(P), chunk):
        Q = pa[i:i + chunk, None, :] + pb[None, :, :]
        Sx = smearing(phi, -Q, 1)
        Sy = smearing(chi, Q, 1)
        total += np.einsum("i,ij,j->", wa[i:i + chunk], Sx * Sy, wb)
    return complex(total)


def _contract2_iso(pairs, phi, chi, eps, spec, R):
    # integrand depends on |p'|, |p''| and the angle between them only
    a, b = pairs
    r, wr = radial_rule(R, spec.points, eps)
    c, wc = np.polynomial.legendre.leggauss(4 * spec.angular)
    z = np.array([[0, 0, 1.0]])
    wa = a.weight(r[:, None] * z) * wr * r ** 2 * 4 * np.pi
    wb = b.weight(r[:, None] * z) * wr * r ** 2 * 2 * np.pi
    E1 = energy(a.field, r[:, None] * z, eps)
    E2 = energy(b.field, r[:, None] * z, eps)
    P0 = E1[:, None, None] + E2[None, :, None]
    Pn = np.sqrt(np.maximum(r[:, None, None] ** 2 + r[None, :, None] ** 2
                            + 2 * r[:, None, None] * r[None, :, None] * c[None, None, :], 0))
    Q = np.stack([P0 + 0 * Pn, np.zeros_like(Pn), np.zeros_like(Pn), Pn], axis=-1)
    S = smearing(phi, -Q, 1) * smearing(chi, Q, 1)
    return complex(np.einsum("i,ijk,k,j->", wa, S, wc, wb))


def mode_sum_contraction(grid_points, dV, pairs, phi, chi, eps=0.0):
    """dV-weighted Riemann sum of the contraction integrand over grid points."""
    pts = np.atleast_2d(np.asarray(grid_points, dtype=float))
    q = len(pairs)
    if q == 1:
        pr = pairs[0]
        p4 = _four(pr.field, pts, eps)
        vals = pr.weight(pts) * smearing(phi, -p4, 1) * smearing(chi, p4, 1)
        return complex(dV * np.sum(vals))
    if q == 2:
        a, b = pairs
        pa, pb = _four(a.field, pts, eps), _four(b.field, pts, eps)
        wa, wb = a.weight(pts), b.weight(pts)
        total = 0j
        for i in range(len(pts)):
            Q = pa[i] + pb
            total += wa[i] * np.sum(wb * smearing(phi, -Q, 1) * smearing(chi, Q, 1))
        return complex(dV * dV * total)
    raise NotImplementedError("mode sums with q > 2 are not supported")


def cubic_grid(half_width, n, offset=0.5):
    """Midpoint grid on [-L, L]^3 with n cells per axis; returns (points, dV)."""
    h = 2 * half_width / n
    ax = -half_width + h * (np.arange(n) + offset)
    g = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 3)
    return g, h ** 3


def limit_contraction(pairs, phi, chi, eps_list, spec=None):
    """eps -> 0 procedure: returns dict with the eps = 0 value, scan table and slope.

    The slope is the least-squares exponent of |I_eps - I_0| against eps.
    A kernel product without massless fields is reported as eps-inert.
    """
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 3:
        raise ValueError("need at least three eps values")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])) or eps_list[-1] < 0:
        raise ValueError("eps list must be strictly decreasing and nonnegative")
    spec = spec or QuadratureSpec()
    I0 = contract_integral(pairs, phi, chi, 0.0, spec)
    massless = any(p.field.massless for p in pairs)
    table = []
    for e in eps_list:
        v = contract_integral(pairs, phi, chi, e, spec) if massless else I0
        table.append({"eps": e, "value": v.value, "err": v.error,
                      "diff": abs(v.value - I0.value)})
    if not massless:
        return {"value": I0.value, "slope": None, "table": table,
                "note": "massive: eps inert"}
    eps = np.array([t["eps"] for t in table if t["eps"] > 0])
    diff = np.array([t["diff"] for t in table if t["eps"] > 0])
    slope = float(np.polyfit(np.log(eps), np.log(diff), 1)[0])
    C = float(np.max(diff / eps))
    return {"value": I0.value, "error": I0.error, "slope": slope, "table": table,
            "envelope_C": C, "note": "linear envelope |I_eps - I_0| <= C eps"}


def weight_decay_exponent(pair, lam=(1e3, 1e4)):
    """Large-|p| power of |w(p)|, estimated from two radii along a fixed direction."""
    d = np.array([0.36, 0.48, 0.8])
    v = [abs(pair.weight(l * d[None])[0]) for l in lam]
    if min(v) == 0:
        return -np.inf
    return float(np.log(v[1] / v[0]) / np.log(lam[1] / lam[0]))


def minimal_multiplier_order(pairs):
    """Smallest n with prod |w_i| V4(P)^-n absolutely integrable at large momenta.

    Radial power counting: sum_i (3 + e_i) - 2n < 0 where e_i are the fitted
    decay exponents of the weights.
    """
    deg = sum(3 + round(weight_decay_exponent(p), 1) for p in pairs)
    return int(np.floor(deg / 2 + 1e-9)) + 1


def v4(P):
    P = np.asarray(P)
    return 1 + P[..., 0] ** 2 + np.sum(P[..., 1:] ** 2, axis=-1)


def weighted_sup(phi, n, sign=1, points=17):
    """sup over 4-momenta q of |V4(q)^n S(q)| with S(q) = int phi e^{i q.x}."""
    from scipy.optimize import minimize
    half = 9.0 / phi.width
    centre = np.concatenate([[-phi.mod[0]], phi.mod[1:]]) * sign
    axes = [np.linspace(c - h, c + h, points) for c, h in zip(centre, half)]
    G = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 4)
    vals = np.abs(v4(G) ** n * smearing(phi, sign * G, 1))
    i = int(np.argmax(vals))

    def neg(q):
        return -abs(v4(q) ** n * smearing(phi, sign * q[None], 1)[0])

    res = minimize(neg, G[i], method="Nelder-Mead", options={"xatol": 1e-9, "fatol": 1e-14})
    return float(max(vals[i], -res.fun))


def absolute_weight_integral(pairs, n, spec=None, R=60.0):
    """c1 = int prod |w_i| V4(P)^-n over the momenta (ball of radius R), at eps = 0."""
    spec = spec or QuadratureSpec()
    if len(pairs) == 1:
        P, W = sphere_rule(spec.points, spec.angular, R)
        p4 = _four(pairs[0].field, P, 0.0)
        return float(np.sum(W * np.abs(pairs[0].weight(P)) * v4(p4) ** -n))
    a, b = pairs
    r, wr = radial_rule(R, spec.points)
    c, wc = np.polynomial.legendre.leggauss(4 * spec.angular)
    z = np.array([[0, 0, 1.0]])
    wa = np.abs(a.weight(r[:, None] * z)) * wr * r ** 2 * 4 * np.pi
    wb = np.abs(b.weight(r[:, None] * z)) * wr * r ** 2 * 2 * np.pi
    E1 = energy(a.field, r[:, None] * z)
    E2 = energy(b.field, r[:, None] * z)
    P0 = E1[:, None, None] + E2[None, :, None]
    Pn2 = (r[:, None, None] ** 2 + r[None, :, None] ** 2
           + 2 * r[:, None, None] * r[None, :, None] * c[None, None, :])
    V = (1 + P0 ** 2 + Pn2) ** -n
    return float(np.einsum("i,ijk,k,j->", wa, V, wc, wb))

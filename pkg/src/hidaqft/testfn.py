"""Gaussian-polynomial test functions with exact Fourier transforms.

A family member on R^d is

    phi(x) = amp * exp(i k.x) * P(x - c) * exp(-sum_j (x_j - c_j)^2 / (2 s_j^2))

with P a polynomial stored as a dense coefficient tensor in the shifted
variable u = x - c.  The family is closed under Fourier transform,
differentiation, multiplication by coordinates, translation, products and
cross-correlation, so every integral of a Gaussian against a plane wave is
available in closed form.

Fourier convention (Euclidean, used by every module):

    F[phi](k) = (2 pi)^(-d/2) * integral phi(x) exp(+i k.x) dx

so that F[F[phi]](x) = phi(-x).  On R^4 with Minkowski product
p.x = p0 x0 - p.x the convention  phi~(p) = (2 pi)^-2 int phi(x) e^{i p.x} d^4x
is F[phi](p0, -p_vec); see `minkowski_transform`.
"""
from itertools import product as iproduct

import numpy as np
from numpy.polynomial import hermite as H
from scipy.signal import convolve


def _binom_shift_matrix(deg, delta):
    """Matrix T with (T q)_m = coefficients of sum_n q_n (u + delta)^n in u^m."""
    T = np.zeros((deg + 1, deg + 1), dtype=complex)
    for n in range(deg + 1):
        for m in range(n + 1):
            T[m, n] = _comb(n, m) * delta ** (n - m)
    return T


def _comb(n, m):
    from math import comb
    return comb(n, m)


def _apply_axis(coef, mat, axis):
    out = np.tensordot(mat, coef, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def _fourier_matrix(deg, s):
    """1D map: power series in u (width s) -> power series in u' (width 1/s)."""
    M = np.zeros((deg + 1, deg + 1), dtype=complex)
    for n in range(deg + 1):
        e = np.zeros(deg + 1)
        e[n] = s ** n                      # u^n = s^n v^n
        h = H.poly2herm(e)                 # Hermite series in v
        h = h * (1j) ** np.arange(len(h))  # F[H_n(v) e^{-v^2/2}] = i^n H_n e^{-v^2/2}
        pv = H.herm2poly(h)                # power series in v'
        pv = np.concatenate([pv, np.zeros(deg + 1 - len(pv))])[: deg + 1]
        pu = pv * s ** np.arange(deg + 1)  # v' = s u'
        M[:, n] = pu
    return M


class TestFunction:
    """Member of the Gaussian-polynomial family on R^d."""

    __test__ = False  # keep pytest from collecting this class

    def __init__(self, center, width, coef=None, mod=None, amp=1.0):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        d = self.center.size
        w = np.asarray(width, dtype=float)
        self.width = np.full(d, float(w)) if w.ndim == 0 else w.copy()
        if np.any(self.width <= 0):
            raise ValueError("widths must be positive")
        self.mod = np.zeros(d) if mod is None else np.asarray(mod, dtype=float).reshape(d)
        if coef is None:
            coef = np.ones((1,) * d, dtype=complex)
        self.coef = np.asarray(coef, dtype=complex)
        if self.coef.ndim != d:
            raise ValueError("coefficient tensor must have one axis per dimension")
        self.amp = complex(amp)

    @property
    def dim(self):
        return self.center.size

    @property
    def degree(self):
        return tuple(n - 1 for n in self.coef.shape)

    def copy(self, **kw):
        args = dict(center=self.center, width=self.width, coef=self.coef,
                    mod=self.mod, amp=self.amp)
        args.update(kw)
        return TestFunction(**args)

    def __repr__(self):
        return (f"TestFunction(dim={self.dim}, center={self.center.tolist()}, "
                f"width={self.width.tolist()}, degree={self.degree})")

    # -- evaluation ---------------------------------------------------
    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        if X.shape[-1] != self.dim:
            raise ValueError("point dimension mismatch")
        U = X - self.center
        gauss = np.exp(-0.5 * np.sum((U / self.width) ** 2, axis=1))
        phase = np.exp(1j * X @ self.mod)
        poly = self._poly_points(U)
        out = self.amp * phase * poly * gauss
        return out[0] if single else out

    def _poly_points(self, U):
        if self.coef.size == 1:
            return np.full(U.shape[0], self.coef.flat[0])
        out = np.zeros(U.shape[0], dtype=complex)
        for idx in zip(*np.nonzero(self.coef)):
            out += self.coef[idx] * np.prod(U ** np.array(idx), axis=1)
        return out

    def on_grid(self, axes):
        """Values on the tensor grid built from one 1D array per axis."""
        vals = self.coef
        for j, a in enumerate(axes):
            a = np.asarray(a, dtype=float)
            u = a - self.center[j]
            V = u[:, None] ** np.arange(self.coef.shape[j])[None, :]
            vals = _apply_axis(vals, V, j)
        for j, a in enumerate(axes):
            a = np.asarray(a, dtype=float)
            u = a - self.center[j]
            f = np.exp(-0.5 * (u / self.width[j]) ** 2 + 1j * self.mod[j] * a)
            shape = [1] * self.dim
            shape[j] = a.size
            vals = vals * f.reshape(shape)
        return self.amp * vals

    # -- algebra --------------------------------------------------------
    def __mul__(self, other):
        if np.isscalar(other):
            return self.copy(amp=self.amp * other)
        return product(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.copy(amp=-self.amp)

    def conj(self):
        return self.copy(coef=np.conj(self.coef), mod=-self.mod, amp=np.conj(self.amp))

    def translate(self, b):
        """x -> phi(x - b)."""
        b = np.asarray(b, dtype=float)
        return self.copy(center=self.center + b, amp=self.amp * np.exp(-1j * self.mod @ b))

    def reflect(self):
        """x -> phi(-x)."""
        d = self.dim
        c = self.coef.copy()
        for j in range(d):
            sgn = (-1.0) ** np.arange(c.shape[j])
            shape = [1] * d
            shape[j] = c.shape[j]
            c = c * sgn.reshape(shape)
        return self.copy(center=-self.center, mod=-self.mod, coef=c)

    def modulate(self, w):
        """x -> exp(i w.x) phi(x)."""
        return self.copy(mod=self.mod + np.asarray(w, dtype=float))

    def derivative(self, axis, order=1):
        f = self
        for _ in range(order):
            f = f._d(axis)
        return f

    def _d(self, j):
        c = _pad_axis(self.coef, j, 1)
        n = c.shape[j]
        D = np.zeros((n, n), dtype=complex)          # d/du
        for m in range(1, n):
            D[m - 1, m] = m
        X = np.zeros((n, n), dtype=complex)          # multiplication by u
        for m in range(n - 1):
            X[m + 1, m] = 1.0
        M = 1j * self.mod[j] * np.eye(n) + D - X / self.width[j] ** 2
        return self.copy(coef=_trim(_apply_axis(c, M, j)))

    def times_coordinate(self, axis, power=1):
        f = self
        for _ in range(power):
            c = _pad_axis(f.coef, axis, 1)
            n = c.shape[axis]
            X = np.zeros((n, n), dtype=complex)
            for m in range(n - 1):
                X[m + 1, m] = 1.0
            M = X + f.center[axis] * np.eye(n)
            f = f.copy(coef=_trim(_apply_axis(c, M, axis)))
        return f

    def taylor_derivative(self, alpha):
        """Exact D^alpha phi(0)."""
        f = self
        for j, a in enumerate(alpha):
            f = f.derivative(j, a)
        return f(np.zeros(self.dim))

    def recenter(self, c_new):
        """Same function written with polynomial centred at c_new (Gaussian unchanged)."""
        c_new = np.asarray(c_new, dtype=float)
        coef = self.coef
        # P(x - c) = P((x - c') + (c' - c))
        for j in range(self.dim):
            T = _binom_shift_matrix(coef.shape[j] - 1, c_new[j] - self.center[j])
            coef = _apply_axis(coef, T, j)
        return coef

    def full_integral(self):
        """integral over R^d, via F[phi](0)."""
        return (2 * np.pi) ** (self.dim / 2) * fourier(self)(np.zeros(self.dim))

    def separable_terms(self):
        """Yield (coefficient, [per-axis TestFunction in 1D]) monomial by monomial."""
        for idx in zip(*np.nonzero(self.coef)):
            parts = []
            for j, n in enumerate(idx):
                c = np.zeros(n + 1, dtype=complex)
                c[n] = 1.0
                parts.append(TestFunction([self.center[j]], [self.width[j]], c,
                                          [self.mod[j]], 1.0))
            yield self.amp * self.coef[idx], parts


def _pad_axis(c, axis, k):
    pad = [(0, 0)] * c.ndim
    pad[axis] = (0, k)
    return np.pad(c, pad)


def _trim(c, tol=0.0):
    # drop trailing all-zero slices so degrees stay minimal
    for j in range(c.ndim):
        while c.shape[j] > 1:
            last = np.take(c, [c.shape[j] - 1], axis=j)
            if np.all(np.abs(last) <= tol):
                c = np.take(c, range(c.shape[j] - 1), axis=j)
            else:
                break
    return c


def gaussian(center, width=1.0, amp=1.0, mod=None):
    center = np.atleast_1d(np.asarray(center, dtype=float))
    return TestFunction(center, width, None, mod, amp)


def hermite_function(orders, center, width=1.0, amp=1.0):
    """Product of physicists' Hermite functions H_n((x-c)/s) exp(-(x-c)^2/2s^2)."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    w = np.broadcast_to(np.asarray(width, dtype=float), center.shape)
    coef = np.ones((1,) * len(orders), dtype=complex)
    for j, n in enumerate(orders):
        e = np.zeros(n + 1)
        e[n] = 1.0
        p = H.herm2poly(e) / w[j] ** np.arange(n + 1)
        shape = [1] * len(orders)
        shape[j] = n + 1
        coef = coef * p.reshape(shape)
    return TestFunction(center, w, coef, None, amp)


def fourier(phi):
    """Exact transform F[phi](k) = (2 pi)^(-d/2) int phi(x) e^{i k.x} dx."""
    coef = phi.coef
    for j in range(phi.dim):
        M = _fourier_matrix(coef.shape[j] - 1, phi.width[j])
        coef = _apply_axis(coef, M, j)
    amp = phi.amp * np.prod(phi.width) * np.exp(1j * phi.mod @ phi.center)
    return TestFunction(-phi.mod, 1.0 / phi.width, coef, phi.center, amp)


def inverse_fourier(phi):
    return fourier(phi).reflect()


def product(f, g):
    """Pointwise product, again a family member."""
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    s1, s2 = f.width ** 2, g.width ** 2
    s2new = 1.0 / (1.0 / s1 + 1.0 / s2)
    c = s2new * (f.center / s1 + g.center / s2)
    const = np.exp(-0.5 * np.sum((f.center - g.center) ** 2 / (s1 + s2)))
    cf = f.recenter(c)
    cg = g.recenter(c)
    coef = convolve(cf, cg, method="direct")
    return TestFunction(c, np.sqrt(s2new), coef, f.mod + g.mod, f.amp * g.amp * const)


def correlate(f, g):
    """C(r) = int f(r + y) g(y) dy, closed form."""
    d = f.dim
    h = product(fourier(f), fourier(g).reflect())
    return inverse_fourier(h * (2 * np.pi) ** (d / 2))


def minkowski_transform(phi, p):
    """phi~(p) = (2 pi)^-2 int phi(x) exp(i (p0 x0 - p_vec.x_vec)) d^4x for p of shape (..., 4)."""
    p = np.asarray(p, dtype=float)
    k = p.copy()
    k[..., 1:] *= -1
    shp = k.shape[:-1]
    return fourier(phi)(k.reshape(-1, 4)).reshape(shp)


def multi_indices(d, order):
    """All alpha in N^d with |alpha| <= order, sorted by total degree."""
    out = [a for a in iproduct(range(order + 1), repeat=d) if sum(a) <= order]
    return sorted(out, key=lambda a: (sum(a), tuple(-x for x in a)))


def seminorm(phi, k, points=None, box=None):
    """|phi|_k = sup over |alpha|,|beta| <= k of |x^beta D^alpha phi(x)|.

    Uses sup_{|beta|<=k} |x^beta| = max(1, |x|_inf)^k, so only the
    derivatives are enumerated.  The sup is taken on a tensor grid covering
    the bulk of the Gaussian and polished by a local search.
    """
    if k < 0 or k > 6:
        raise ValueError("seminorm order must be in 0..6")
    if np.all(phi.coef == 0) or phi.amp == 0:
        return 0.0
    d = phi.dim
    if points is None:
        points = {1: 241, 2: 81, 3: 31, 4: 17}.get(d, 11)
    if box is None:
        half = phi.width * (4.0 + np.sqrt(k + max(phi.degree) + 1.0))
        box = [(c - h, c + h) for c, h in zip(phi.center, half)]
    axes = [np.concatenate([np.linspace(a, b, points), [0.0]]) for a, b in box]
    axes = [np.unique(a) for a in axes]
    mesh = np.meshgrid(*axes, indexing="ij")
    xinf = np.max(np.abs(np.stack(mesh)), axis=0)
    weight = np.maximum(1.0, xinf) ** k
    best, best_f, best_w = -1.0, None, None
    for alpha in multi_indices(d, k):
        f = phi
        for j, a in enumerate(alpha):
            f = f.derivative(j, a)
        vals = np.abs(f.on_grid(axes)) * weight
        m = vals.max()
        if m > best:
            best, best_f = m, f
            best_w = np.unravel_index(np.argmax(vals), vals.shape)
    # local polish around the grid maximiser
    from scipy.optimize import minimize
    x0 = np.array([axes[j][i] for j, i in enumerate(best_w)])

    def neg(x):
        return -abs(best_f(x)) * max(1.0, np.max(np.abs(x))) ** k

    res = minimize(neg, x0, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    return float(max(best, -res.fun))

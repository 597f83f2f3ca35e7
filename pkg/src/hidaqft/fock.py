"""Truncated Fock space on a finite momentum grid.

Each mode (field, label, grid point) carries a ladder pair with
[a, a^+] = 1/dV (Bose, below the occupation cutoff) or {a, a^+} = 1/dV
(Fermi, via a Jordan-Wigner string).  Basis order is lexicographic in
(field, label, grid index).  Matrices are scipy sparse CSR.
"""
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.sparse as sp

from .fields import ANNIHILATION, CREATION, energy, multiplier
from .testfn import fourier

MAX_DIM = 2 ** 16


class DimensionGuard(RuntimeError):
    pass


@dataclass(frozen=True)
class Mode:
    index: int
    field: str
    label: object
    point: int


@dataclass
class ModeGrid:
    points: np.ndarray
    dV: float
    fields: list
    nmax: int = 2
    modes: list = dc_field(init=False)

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[1] != 3:
            raise ValueError("grid points must be 3-vectors")
        if self.dV <= 0:
            raise ValueError("dV must be positive")
        if self.nmax < 1:
            raise ValueError("Bose cutoff nmax must be >= 1")
        n = len(self.points)
        for i in range(n):
            for j in range(i + 1, n):
                if np.allclose(self.points[i], self.points[j]):
                    raise ValueError("grid points must be distinct")
        names = [f.name for f in self.fields]
        if len(set(names)) != len(names):
            raise ValueError("field names must be unique")
        self.modes = []
        for f in self.fields:
            for lab in f.labels:
                for k in range(n):
                    self.modes.append(Mode(len(self.modes), f.name, lab, k))
        self._ops = None

    def field(self, name):
        for f in self.fields:
            if f.name == name:
                return f
        raise KeyError(f"unknown field {name!r}")

    def mode_dims(self):
        return [2 if self.field(m.field).fermi else self.nmax + 1 for m in self.modes]

    @property
    def dim(self):
        return int(np.prod(self.mode_dims()))

    def field_modes(self, name):
        return [m for m in self.modes if m.field == name]

    def momentum(self, m):
        return self.points[m.point]

    def with_cutoff(self, nmax):
        return ModeGrid(self.points, self.dV, list(self.fields), nmax)

    def occupations(self):
        """Array (dim, n_modes) of occupation numbers of every basis state."""
        dims = self.mode_dims()
        return np.array(np.unravel_index(np.arange(self.dim), dims)).T

    def ops(self):
        if self._ops is None:
            self._ops = _build_all(self)
        return self._ops


def _build_all(grid):
    dims = grid.mode_dims()
    total = int(np.prod(dims))
    if total > MAX_DIM:
        raise DimensionGuard(f"basis dimension {total} exceeds {MAX_DIM}")
    scale = 1.0 / np.sqrt(grid.dV)
    fermi = [grid.field(m.field).fermi for m in grid.modes]
    Zf = sp.diags([1.0, -1.0])
    out = {}
    for i, m in enumerate(grid.modes):
        d = dims[i]
        lower = sp.diags(np.sqrt(np.arange(1, d)), 1)  # <n-1|a|n> = sqrt(n)
        mats = []
        for j in range(len(grid.modes)):
            if j == i:
                mats.append(lower)
            elif j < i and fermi[i] and fermi[j]:
                mats.append(Zf)
            else:
                mats.append(sp.identity(dims[j]))
        a = mats[0]
        for M in mats[1:]:
            a = sp.kron(a, M)
        a = sp.csr_matrix(a * scale, dtype=complex)
        out[m.index] = (sp.csr_matrix(a.conj().T), a)
    return out


def build_mode_ops(grid, field_name):
    """Map mode -> (creation, annihilation) matrices for one field."""
    grid.field(field_name)
    ops = grid.ops()
    return {m: ops[m.index] for m in grid.field_modes(field_name)}


def subcutoff_mask(grid, nmax=None):
    """Boolean mask of basis states whose Bose occupations are all <= nmax."""
    nmax = grid.nmax - 1 if nmax is None else nmax
    occ = grid.occupations()
    bose = np.array([not grid.field(m.field).fermi for m in grid.modes])
    if not bose.any():
        return np.ones(grid.dim, dtype=bool)
    return np.all(occ[:, bose] <= nmax, axis=1)


def project(M, mask):
    M = M.toarray() if sp.issparse(M) else np.asarray(M)
    return M[np.ix_(mask, mask)]


def krein_metric(grid):
    """eta = (-1)^(number of temporal photons); returns (matrix, flag).

    flag is False (with a warning) when no photon field is registered, in
    which case eta is the identity.
    """
    photons = [f for f in grid.fields if f.kind == "photon"]
    if not photons:
        warnings.warn("no gauge field on the grid; Krein metric is the identity")
        return sp.identity(grid.dim, dtype=complex, format="csr"), False
    occ = grid.occupations()
    cols = [m.index for m in grid.modes
            if grid.field(m.field).kind == "photon" and m.label == 0]
    n0 = occ[:, cols].sum(axis=1)
    return sp.diags((-1.0) ** n0).astype(complex).tocsr(), True


def smearing(phi, p4, sign):
    """int phi(x) exp(sign * i p.x) d^4x for on-shell 4-momenta p4 (..., 4)."""
    k = np.array(p4, dtype=float) * sign
    k[..., 1:] *= -1  # Minkowski -> Euclidean pairing
    shp = k.shape[:-1]
    return (2 * np.pi) ** 2 * fourier(phi)(k.reshape(-1, 4)).reshape(shp)


def mode_momentum(grid, m, eps=0.0):
    f = grid.field(m.field)
    p = grid.momentum(m)
    return np.concatenate([[energy(f, p, eps)], p])


def half_multiplier(grid, m, part, comp, conj):
    """Multiplier for the given half of a field factor (conj for the adjoint field)."""
    f = grid.field(m.field)
    p = grid.momentum(m)
    if conj:
        other = CREATION if part == ANNIHILATION else ANNIHILATION
        return np.conj(multiplier(f, other, m.label, p, comp))
    return multiplier(f, part, m.label, p, comp)


def mode_operator(grid, m, part):
    """a_m for '-', Krein-signed a_m^+ for '+'."""
    cre, ann = grid.ops()[m.index]
    if part == ANNIHILATION:
        return ann
    return grid.field(m.field).krein_sign(m.label) * cre


def half_field(grid, field_name, comp, part, phi, conj=False, eps=0.0):
    dim = grid.dim
    out = sp.csr_matrix((dim, dim), dtype=complex)
    sign = -1 if part == ANNIHILATION else 1
    for m in grid.field_modes(field_name):
        mu = half_multiplier(grid, m, part, comp, conj)
        if mu == 0:
            continue
        w = grid.dV * mu * smearing(phi, mode_momentum(grid, m, eps), sign)
        out = out + w * mode_operator(grid, m, part)
    return out


def assemble_field(grid, field_name, comp, phi, conj=False, eps=0.0):
    """Smeared field: sum_modes dV [k01(phi) a + k10(phi) a^+]."""
    grid.field(field_name)
    return (half_field(grid, field_name, comp, ANNIHILATION, phi, conj, eps)
            + half_field(grid, field_name, comp, CREATION, phi, conj, eps))


def translation_operator(grid, b):
    """Diagonal U(b) = prod_m exp(i p_m.b N_m), so U A(phi) U^+ = A(phi(. - b))."""
    b = np.asarray(b, dtype=float)
    occ = grid.occupations()
    phases = np.zeros(grid.dim)
    for m in grid.modes:
        p = mode_momentum(grid, m)
        pb = p[0] * b[0] - p[1:] @ b[1:]
        phases += pb * occ[:, m.index]
    return sp.diags(np.exp(1j * phases)).tocsr()


def vacuum_index():
    return 0

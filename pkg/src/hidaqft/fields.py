"""Free fields and their plane-wave kernels.

Each field is a sum of an annihilation part with kernel
multiplier(s, p, a) * exp(-i p.x) and a creation part with
multiplier(s, p, a) * exp(+i p.x), p = (p0(p_vec), p_vec) on shell.
Minkowski products use signature (+,-,-,-).
"""
from dataclasses import dataclass

import numpy as np

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])
# metric entering the photon multiplier, diagonal (-1, 1, 1, 1)
PHOTON_METRIC = np.diag([-1.0, 1.0, 1.0, 1.0])

BOSE, FERMI = "bose", "fermi"


@dataclass(frozen=True)
class FieldSpec:
    name: str
    statistics: str
    mass: float
    components: int
    labels: tuple
    kind: str
    charged: bool = False

    def __post_init__(self):
        if self.statistics not in (BOSE, FERMI):
            raise ValueError(f"unknown statistics {self.statistics!r}")
        if self.mass < 0:
            raise ValueError("mass must be nonnegative")
        if self.kind == "photon":
            ok = (self.statistics == BOSE and self.mass == 0 and self.components == 4
                  and tuple(self.labels) == (0, 1, 2, 3))
        elif self.kind == "dirac":
            ok = (self.statistics == FERMI and self.mass > 0 and self.components == 4
                  and tuple(self.labels) == (1, 2, 3, 4))
        elif self.kind == "scalar":
            ok = self.statistics == BOSE and self.components == 1
        elif self.kind == "fermion":
            ok = (self.statistics == FERMI and self.mass > 0 and self.components == 1
                  and tuple(self.labels) == (1, 2))
        else:
            ok = False
        if not ok:
            raise ValueError(f"inconsistent field specification for {self.name!r}")

    @property
    def fermi(self):
        return self.statistics == FERMI

    @property
    def massless(self):
        return self.mass == 0

    def krein_sign(self, label):
        """Sign relating creation operators to Hilbert adjoints: a^dag = sign * a^+.

        Temporal photons (label 0) are created by the Krein adjoint
        eta a^+ eta = -a^+; everything else by the plain adjoint.
        """
        return -1.0 if (self.kind == "photon" and label == 0) else 1.0


def photon(name="A"):
    return FieldSpec(name, BOSE, 0.0, 4, (0, 1, 2, 3), "photon")


def dirac(mass=1.0, name="psi"):
    return FieldSpec(name, FERMI, float(mass), 4, (1, 2, 3, 4), "dirac", charged=True)


def scalar(mass=1.0, name="phi"):
    return FieldSpec(name, BOSE, float(mass), 1, (1,), "scalar")


def fermion(mass=1.0, name="chi"):
    """One-component charged Fermi model field: label 1 annihilated, label 2 created."""
    return FieldSpec(name, FERMI, float(mass), 1, (1, 2), "fermion", charged=True)


def energy(field, p, eps=0.0):
    """p0 = sqrt(|p|^2 + m_eff^2), m_eff = eps for massless fields, else the mass."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    p = np.asarray(p, dtype=float)
    m = field.mass if field.mass > 0 else eps
    return np.sqrt(np.sum(p * p, axis=-1) + m * m)


def gamma_matrices():
    """Chiral gamma matrices gamma^0 .. gamma^3."""
    Z = np.zeros((2, 2), dtype=complex)
    I2 = np.eye(2, dtype=complex)
    g0 = np.block([[Z, I2], [I2, Z]])
    gs = [np.block([[Z, -s], [s, Z]]) for s in PAULI]
    return np.array([g0] + gs)


def _spinor(s, p, m, lower_sign):
    if s not in (1, 2):
        raise ValueError("spin index must be 1 or 2")
    if m <= 0:
        raise ValueError("Dirac spinors need m > 0")
    p = np.asarray(p, dtype=float)
    E = np.sqrt(np.sum(p * p, axis=-1) + m * m)
    chi = np.array([1.0, 0.0]) if s == 1 else np.array([0.0, 1.0])
    X = np.einsum("...k,kab->...ab", p, PAULI) / (E + m)[..., None, None]
    Xchi = X @ chi
    up = chi + Xchi
    lo = lower_sign * (chi - Xchi)
    norm = np.sqrt((E + m) / (2 * E)) / np.sqrt(2)
    return norm[..., None] * np.concatenate([up, lo], axis=-1)


def dirac_u(s, p, mass=1.0):
    return _spinor(s, p, mass, +1.0)


def dirac_v(s, p, mass=1.0):
    return _spinor(s, p, mass, -1.0)


def slash(p4):
    """gamma^mu p_mu for a 4-vector p with upper indices."""
    g = gamma_matrices()
    p_lower = np.asarray(p4) @ MINKOWSKI
    return np.einsum("...m,mab->...ab", p_lower, g)


def dirac_residuals(p, mass=1.0):
    """Norms of (pslash - m)u_s and (pslash + m)v_s, (pslash - m)v_s at on-shell p."""
    E = np.sqrt(np.sum(np.asarray(p) ** 2) + mass ** 2)
    ps = slash(np.concatenate([[E], p]))
    I4 = np.eye(4)
    out = {}
    for s in (1, 2):
        u, v = dirac_u(s, p, mass), dirac_v(s, p, mass)
        out[f"u{s}_minus"] = np.linalg.norm((ps - mass * I4) @ u)
        out[f"v{s}_plus"] = np.linalg.norm((ps + mass * I4) @ v)
        out[f"v{s}_minus"] = np.linalg.norm((ps - mass * I4) @ v)
    return out


ANNIHILATION, CREATION = "-", "+"


def multiplier(field, part, s, p, a):
    """Kernel multiplier of the annihilation ('-') or creation ('+') part.

    Vectorised over p of shape (..., 3).
    """
    if s not in field.labels:
        raise ValueError(f"label {s!r} invalid for {field.name}")
    if not (0 <= a < field.components):
        raise ValueError(f"component {a!r} invalid for {field.name}")
    if part not in (ANNIHILATION, CREATION):
        raise ValueError("part must be '-' or '+'")
    p = np.asarray(p, dtype=float)
    c = (2 * np.pi) ** -1.5
    if field.kind == "scalar":
        return c / np.sqrt(2 * energy(field, p)) + 0j
    if field.kind == "photon":
        return c * PHOTON_METRIC[s, a] / np.sqrt(2 * energy(field, p)) + 0j
    if field.kind == "fermion":
        live = 1 if part == ANNIHILATION else 2
        if s == live:
            return c / np.sqrt(2 * energy(field, p)) + 0j
        return np.zeros(p.shape[:-1], dtype=complex)
    # Dirac: electrons s = 1, 2 annihilated, positrons s = 3, 4 created
    if part == ANNIHILATION:
        if s in (1, 2):
            return c * dirac_u(s, p, field.mass)[..., a]
        return np.zeros(p.shape[:-1], dtype=complex)
    if s in (3, 4):
        return c * dirac_v(s - 2, p, field.mass)[..., a]
    return np.zeros(p.shape[:-1], dtype=complex)


@dataclass(frozen=True)
class PlaneWaveKernel:
    field: FieldSpec
    part: str  # '-' annihilation (exp(-ip.x)) or '+' creation (exp(+ip.x))

    def multiplier(self, s, p, a):
        return multiplier(self.field, self.part, s, p, a)

    def __call__(self, s, p, a, x, eps=0.0):
        return kernel_eval(self, s, p, a, x, eps)


def kernel_eval(k, s, p, a, x, eps=0.0):
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    p0 = energy(k.field, p, eps)
    phase = p0 * x[..., 0] - np.sum(p * x[..., 1:], axis=-1)
    sign = -1.0 if k.part == ANNIHILATION else 1.0
    return k.multiplier(s, p, a) * np.exp(1j * sign * phase)

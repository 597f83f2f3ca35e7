"""Plain-text key = value run configuration and the monomial expression parser.

Repeated keys build lists; '#' starts a comment.  Example:

    field = scalar A 1.0
    grid.point = 0.3 -0.1 0.2
    grid.dV = 0.7
    product = :A(x)A(x): 0.5*:A(y):
    eps = 0.4 0.2 0.1 0.05
"""
import re

import numpy as np

from .fields import dirac, fermion, photon, scalar
from .fock import ModeGrid
from .testfn import gaussian
from .wick import factor


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (usage error)."""


class RunConfig:
    def __init__(self, entries=None):
        self.entries = {}
        for k, v in entries or []:
            self.entries.setdefault(k, []).append(v)

    @classmethod
    def parse(cls, text):
        entries = []
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {n}: expected key = value")
            k, v = line.split("=", 1)
            k, v = k.strip(), v.strip()
            if not k:
                raise ConfigError(f"line {n}: empty key")
            entries.append((k, v))
        return cls(entries)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                return cls.parse(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None

    def __contains__(self, key):
        return key in self.entries

    def values(self, key):
        return list(self.entries.get(key, []))

    def get(self, key, default=None, cast=str):
        vals = self.entries.get(key)
        if not vals:
            return default
        if len(vals) > 1:
            raise ConfigError(f"key {key!r} given more than once")
        try:
            return cast(vals[-1])
        except ValueError:
            raise ConfigError(f"bad value for {key!r}: {vals[-1]!r}") from None

    def floats(self, key, default=None):
        """All numbers under a key, whether repeated or space-separated."""
        vals = self.entries.get(key)
        if not vals:
            return default
        try:
            return [float(x) for v in vals for x in v.split()]
        except ValueError:
            raise ConfigError(f"bad number under {key!r}") from None

    # -- derived objects ------------------------------------------------
    def roster(self):
        lines = self.values("field")
        if not lines:
            return {f.name: f for f in (scalar(1.0, "A"), dirac(1.0, "psi"), fermion(1.0, "chi"))}
        out = {}
        for line in lines:
            f = parse_field(line)
            if f.name in out:
                raise ConfigError(f"field {f.name!r} registered twice")
            out[f.name] = f
        return out

    def grid(self, roster=None, names=None):
        roster = roster or self.roster()
        pts = [self._vector(v, 3, "grid.point") for v in self.values("grid.point")] or [[0.3, -0.1, 0.2]]
        dV = self.get("grid.dV", 0.7, float)
        nmax = self.get("grid.nmax", 2, int)
        names = names or self.values("grid.field") or list(roster)
        for n in names:
            if n not in roster:
                raise ConfigError(f"field {n!r} is not in the roster")
        try:
            return ModeGrid(pts, dV, [roster[n] for n in names], nmax)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def testfns(self, defaults):
        """slot -> Gaussian from lines 'slot c0 .. c_{d-1} width'."""
        out = dict(defaults)
        for line in self.values("testfn"):
            parts = line.split()
            try:
                nums = [float(x) for x in parts[1:]]
            except ValueError:
                raise ConfigError(f"bad test function line {line!r}") from None
            if len(parts) < 3:
                raise ConfigError(f"bad test function line {line!r}")
            out[parts[0]] = gaussian(nums[:-1], nums[-1])
        return out

    def eps_list(self, default=(0.4, 0.2, 0.1, 0.05)):
        eps = self.floats("eps", list(default))
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigError("eps list must be strictly decreasing")
        if any(e < 0 for e in eps):
            raise ConfigError("eps values must be nonnegative")
        return eps

    @staticmethod
    def _vector(text, n, key):
        try:
            v = [float(x) for x in text.split()]
        except ValueError:
            raise ConfigError(f"bad vector under {key!r}") from None
        if len(v) != n:
            raise ConfigError(f"{key} needs {n} numbers")
        return v


def parse_field(line):
    parts = line.split()
    if not parts:
        raise ConfigError("empty field line")
    kind = parts[0]
    try:
        if kind == "photon":
            return photon(*parts[1:2])
        mass = float(parts[2]) if len(parts) > 2 else 1.0
        name = parts[1] if len(parts) > 1 else None
        ctor = {"scalar": scalar, "dirac": dirac, "fermion": fermion}[kind]
        return ctor(mass, name) if name else ctor(mass)
    except KeyError:
        raise ConfigError(f"unknown field kind {kind!r}") from None
    except ValueError as exc:
        raise ConfigError(f"bad field line {line!r}: {exc}") from None


_BLOCK = re.compile(r"\s*(?:([-+]?[0-9.eEj+()-]+)\s*\*\s*)?:([^:]*):\s*")
_FACTOR = re.compile(r"\s*([A-Za-z_]\w*)(\*?)(?:\[(\d+)\])?\((\w+)\)\s*")


def parse_product(text, roster):
    """':A(x)psi*[2](x): 0.5*:A(y):' -> list of (factors, coefficient)."""
    blocks, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _BLOCK.match(text, pos)
        if not m:
            raise ConfigError(f"cannot parse product near {text[pos:pos + 20]!r}")
        try:
            coeff = complex(m.group(1)) if m.group(1) else 1.0
        except ValueError:
            raise ConfigError(f"bad coefficient {m.group(1)!r}") from None
        blocks.append((parse_monomial(m.group(2), roster), coeff))
        pos = m.end()
    return blocks


def parse_monomial(body, roster):
    out, pos = [], 0
    while pos < len(body):
        if body[pos:].strip() == "":
            break
        m = _FACTOR.match(body, pos)
        if not m:
            raise ConfigError(f"cannot parse factor near {body[pos:pos + 20]!r}")
        name, star, comp, slot = m.groups()
        if name not in roster:
            raise ConfigError(f"field {name!r} is not in the roster")
        f = roster[name]
        comp = int(comp) if comp else 0
        if comp >= f.components:
            raise ConfigError(f"component {comp} out of range for {name}")
        if star and not f.charged:
            raise ConfigError(f"{name} is neutral; it has no separate conjugate")
        out.append(factor(name, comp, slot, conj=bool(star), fermi=f.fermi, charged=f.charged))
        pos = m.end()
    return out


def default_slots_testfns(slots):
    """Deterministic default Gaussians, one per slot."""
    out = {}
    for i, s in enumerate(sorted(slots)):
        out[s] = gaussian(np.array([0.4 * i, 0.1 * i, -0.05 * i, 0.0]), 1.0)
    return out

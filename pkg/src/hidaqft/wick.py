"""Symbolic Wick/Fock expansions with exact Fermi signs.

A full field factor A = A(-) + A(+) is split into its annihilation and
creation halves.  A normal monomial is an ordered list of creation halves
followed by annihilation halves; a product of two normal monomials is
rewritten by contracting annihilation halves of the left factor with
creation halves of the right factor, each contraction becoming a symbolic
pairing (a c-number) and every reordering of Fermi halves contributing a
sign.
"""
from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from itertools import combinations, permutations
from math import comb, factorial

FULL, CRE, ANN = "full", "+", "-"


@dataclass(frozen=True, order=True)
class FieldFactor:
    field: str
    comp: object = 0
    slot: str = "x"
    conj: bool = False
    part: str = FULL
    fermi: bool = False
    charged: bool = False
    tag: int = 0  # distinguishes otherwise identical factors

    def key(self):
        return (self.field, self.conj, str(self.comp), self.slot, self.tag)

    def half(self, part):
        return replace(self, part=part)

    def symbol(self):
        star = "*" if self.conj else ""
        part = "" if self.part == FULL else self.part
        return f"{self.field}{star}{part}[{self.comp}]({self.slot})"


def factor(field, comp=0, slot="x", conj=False, fermi=False, charged=None, tag=0):
    """Convenience constructor; charged defaults to fermi (Dirac-like)."""
    if charged is None:
        charged = fermi
    return FieldFactor(field, comp, slot, conj, FULL, fermi, charged, tag)


def contractible(ann, cre):
    """Can the annihilation half `ann` pair with the creation half `cre`?"""
    if ann.field != cre.field:
        return False
    if ann.charged:
        return ann.conj != cre.conj
    return True


@dataclass(frozen=True)
class Pairing:
    """c-number [ann(-)(x), cre(+)(y)] of two halves of the same field."""
    ann: FieldFactor
    cre: FieldFactor

    def key(self):
        return (self.ann.key(), self.cre.key())

    def symbol(self):
        return f"<{self.ann.symbol()}|{self.cre.symbol()}>"


@dataclass(frozen=True)
class ContractionTerm:
    cre: tuple
    ann: tuple
    pairs: tuple = ()
    sign_exp: int = 0
    coeff: complex = 1.0

    @property
    def lm(self):
        return (len(self.cre), len(self.ann))

    @property
    def sign(self):
        return -1 if self.sign_exp % 2 else 1

    @property
    def factors(self):
        return self.cre + self.ann

    def canonical(self):
        """Sort halves inside each block, absorbing the Fermi parity."""
        cre, e1 = _sorted_with_parity(self.cre)
        ann, e2 = _sorted_with_parity(self.ann)
        pairs = tuple(sorted(self.pairs, key=lambda p: p.key()))
        return ContractionTerm(cre, ann, pairs, self.sign_exp + e1 + e2, self.coeff)

    def key(self):
        t = self.canonical()
        return (tuple(f.key() for f in t.cre), tuple(f.key() for f in t.ann),
                tuple(p.key() for p in t.pairs))

    def value_coeff(self):
        t = self.canonical()
        return t.sign * t.coeff

    def serialize(self):
        t = self.canonical()
        pairs = " ".join(p.symbol() for p in t.pairs)
        kern = " ".join(f.symbol() for f in t.cre + t.ann)
        c = complex(t.coeff)
        if kern == "":
            kern = _fmt_coeff(c) if c != 1 else "1"
        elif c != 1:
            kern = f"{_fmt_coeff(c)}*{kern}"
        return f"({t.lm[0]},{t.lm[1]}); {'+1' if t.sign > 0 else '-1'}; {pairs}; {kern}"

    def with_fermi_replaced(self):
        def b(f):
            return replace(f, fermi=False)
        return ContractionTerm(tuple(map(b, self.cre)), tuple(map(b, self.ann)),
                               tuple(Pairing(b(p.ann), b(p.cre)) for p in self.pairs),
                               0, self.coeff)


def _fmt_coeff(c):
    if c.imag == 0:
        return repr(float(c.real))
    return f"({c.real!r}{c.imag:+}j)"


def _sorted_with_parity(halves):
    order = sorted(range(len(halves)), key=lambda i: halves[i].key())
    mask = [h.fermi for h in halves]
    return tuple(halves[i] for i in order), inversion_count(order, mask)


def inversion_count(perm, mask):
    """Transpositions among Fermi-flagged items needed to realise perm.

    perm lists source positions in target order; mask flags source positions.
    """
    seq = [p for p in perm if mask[p]]
    n = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                n += 1
    return n


def fermi_sign(perm, mask):
    """Parity of perm restricted to Fermi positions, as +1 / -1."""
    if sorted(perm) != list(range(len(perm))):
        raise ValueError("not a permutation")
    if len(mask) != len(perm):
        raise ValueError("mask length mismatch")
    return -1 if inversion_count(perm, mask) % 2 else 1


class FockExpansion:
    """Finite map (l, m) -> list of ContractionTerm."""

    def __init__(self, terms=()):
        self.sectors = defaultdict(list)
        for t in terms:
            self.sectors[t.lm].append(t)

    @classmethod
    def scalar(cls, z=1.0):
        return cls([ContractionTerm((), (), (), 0, complex(z))])

    def terms(self):
        out = []
        for lm in sorted(self.sectors):
            out.extend(self.sectors[lm])
        return out

    def __len__(self):
        return sum(len(v) for v in self.sectors.values())

    def __iter__(self):
        return iter(self.terms())

    def scaled(self, z):
        return FockExpansion([replace(t, coeff=t.coeff * z) for t in self.terms()])

    def __add__(self, other):
        return FockExpansion(self.terms() + other.terms())

    def __sub__(self, other):
        return self + other.scaled(-1)

    def slots(self):
        s = set()
        for t in self.terms():
            s.update(f.slot for f in t.factors)
            for p in t.pairs:
                s.update((p.ann.slot, p.cre.slot))
        return sorted(s)

    def relabel(self, mapping):
        """Rename slots; tags are offset so factors of different copies stay distinct."""
        def r(f):
            return replace(f, slot=mapping.get(f.slot, f.slot))
        out = []
        for t in self.terms():
            out.append(ContractionTerm(tuple(map(r, t.cre)), tuple(map(r, t.ann)),
                                       tuple(Pairing(r(p.ann), r(p.cre)) for p in t.pairs),
                                       t.sign_exp, t.coeff))
        return FockExpansion(out)

    def simplify(self, tol=1e-14):
        """Merge terms with identical canonical structure, drop zeros."""
        acc = {}
        rep = {}
        for t in self.terms():
            c = t.canonical()
            k = t.key()
            acc[k] = acc.get(k, 0) + c.sign * c.coeff
            rep.setdefault(k, c)
        out = []
        for k, v in acc.items():
            if abs(v) > tol:
                c = rep[k]
                out.append(ContractionTerm(c.cre, c.ann, c.pairs, 0, v))
        out.sort(key=lambda t: (t.lm, t.key()))
        return FockExpansion(out)

    def multiset(self, digits=12):
        return Counter((t.key(), _round(t.value_coeff(), digits)) for t in self.terms())

    def serialize(self):
        lines = [t.serialize() for t in self.terms()]
        return "\n".join(sorted(lines, key=_line_order))

    def sector_counts(self):
        return {lm: len(v) for lm, v in sorted(self.sectors.items())}


def _line_order(line):
    head = line.split(";")[0]
    l, m = head.strip("()").split(",")
    return (-(int(l) + int(m)), int(l), line)


def _round(z, digits):
    z = complex(z)
    return (round(z.real, digits) + 0.0, round(z.imag, digits) + 0.0)


def normal_monomial(cre=(), ann=(), coeff=1.0):
    """A single normal-ordered term from explicit half factors."""
    for f in cre:
        if f.part != CRE:
            raise ValueError("creation block may only hold creation halves")
    for f in ann:
        if f.part != ANN:
            raise ValueError("annihilation block may only hold annihilation halves")
    return FockExpansion([ContractionTerm(tuple(cre), tuple(ann), (), 0, complex(coeff))])


def wick_monomial(factors, coeff=1.0):
    """Fock expansion of :F1 ... Fk: for full field factors.

    Every factor is split into halves; for each choice the creation halves
    are moved left (keeping relative order) with the Fermi sign of the move.
    Identical factors get distinct tags automatically.
    """
    factors = [replace(f, tag=i) if f.tag == 0 else f for i, f in enumerate(factors)]
    for f in factors:
        if f.part != FULL:
            raise ValueError("wick_monomial expects full factors")
    k = len(factors)
    terms = []
    for mask in range(2 ** k):
        parts = [CRE if (mask >> i) & 1 else ANN for i in range(k)]
        halves = [f.half(p) for f, p in zip(factors, parts)]
        order = ([i for i in range(k) if parts[i] == CRE]
                 + [i for i in range(k) if parts[i] == ANN])
        e = inversion_count(order, [h.fermi for h in halves])
        cre = tuple(halves[i] for i in order if parts[i] == CRE)
        ann = tuple(halves[i] for i in order if parts[i] == ANN)
        terms.append(ContractionTerm(cre, ann, (), e, complex(coeff)))
    return FockExpansion(terms)


def _contract_blocks(A, C):
    """Expand A C (A annihilation halves, C creation halves) by Wick's theorem.

    Yields (pairs, C_rest, A_rest, sign_exp).
    """
    nA, nC = len(A), len(C)
    seq = list(A) + list(C)
    mask = [h.fermi for h in seq]
    for q in range(min(nA, nC) + 1):
        for ia in combinations(range(nA), q):
            for jc in permutations(range(nC), q):
                if not all(contractible(A[i], C[j]) for i, j in zip(ia, jc)):
                    continue
                order = []
                for i, j in zip(ia, jc):
                    order += [i, nA + j]
                c_rest = [nA + j for j in range(nC) if j not in jc]
                a_rest = [i for i in range(nA) if i not in ia]
                order += c_rest + a_rest
                e = inversion_count(order, mask)
                pairs = tuple(Pairing(A[i], C[j]) for i, j in zip(ia, jc))
                yield pairs, tuple(seq[i] for i in c_rest), tuple(seq[i] for i in a_rest), e


def _term_product(t1, t2):
    for pairs, c_rest, a_rest, e in _contract_blocks(t1.ann, t2.cre):
        yield ContractionTerm(t1.cre + c_rest, a_rest + t2.ann,
                              t1.pairs + t2.pairs + pairs,
                              t1.sign_exp + t2.sign_exp + e, t1.coeff * t2.coeff)


def normal_product(E1, E2):
    """Fock expansion of the operator product E1 E2."""
    E1, E2 = _as_expansion(E1), _as_expansion(E2)
    out = []
    for t1 in E1.terms():
        for t2 in E2.terms():
            out.extend(_term_product(t1, t2))
    return FockExpansion(out)


def _as_expansion(x):
    if isinstance(x, FockExpansion):
        return x
    if isinstance(x, ContractionTerm):
        return FockExpansion([x])
    if isinstance(x, (int, float, complex)):
        return FockExpansion.scalar(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as an expansion")


def multi_product(factors, fold="left"):
    """Product of a list of expansions (or (tag, expansion) pairs), folded left or right.

    A tag is a c-number coefficient multiplying its factor.
    """
    if len(factors) == 0:
        raise ValueError("empty factor list")
    exps = []
    for f in factors:
        if isinstance(f, tuple):
            tag, W = f
            exps.append(_as_expansion(W).scaled(tag))
        else:
            exps.append(_as_expansion(f))
    if fold == "left":
        acc = exps[0]
        for E in exps[1:]:
            acc = normal_product(acc, E)
        return acc
    acc = exps[-1]
    for E in reversed(exps[:-1]):
        acc = normal_product(E, acc)
    return acc


def term_count(N, K):
    """Number of terms in the product of a degree-N annihilation block with a degree-K creation block."""
    if N < 0 or K < 0:
        raise ValueError("degrees must be nonnegative")
    return sum(comb(N, q) * comb(K, q) * factorial(q) for q in range(min(N, K) + 1))


def enumerate_matchings(N, K):
    """Brute force: all partial injections of an N-set into a K-set."""
    count = 0
    for q in range(min(N, K) + 1):
        for sub in combinations(range(N), q):
            for img in permutations(range(K), q):
                count += 1
    return count


def pairing_form(blocks):
    """Conventional full-field Wick expansion of a product of normal blocks.

    blocks: list of lists of full FieldFactors (each block a Wick monomial).
    Pairs connect factors of different blocks only, left factor first.
    Returns a list of (pairs, remaining factors, sign).
    """
    flat, owner = [], []
    for b, blk in enumerate(blocks):
        for f in blk:
            flat.append(f)
            owner.append(b)
    n = len(flat)
    mask = [f.fermi for f in flat]
    out = []

    def ok(i, j):
        if owner[i] == owner[j]:
            return False
        a, c = flat[i], flat[j]
        if a.field != c.field:
            return False
        return (a.conj != c.conj) if a.charged else True

    def rec(start, used, pairs):
        # find next unused index that could start a new pair, or stop
        out.append(list(pairs))
        for i in range(start, n):
            if i in used:
                continue
            for j in range(i + 1, n):
                if j in used or not ok(i, j):
                    continue
                rec(i + 1, used | {i, j}, pairs + [(i, j)])

    rec(0, frozenset(), [])
    result = []
    for pairs in out:
        used = {k for p in pairs for k in p}
        order = [k for p in pairs for k in p] + [k for k in range(n) if k not in used]
        e = inversion_count(order, mask)
        rest = tuple(flat[k] for k in range(n) if k not in used)
        result.append((tuple((flat[i], flat[j]) for i, j in pairs), rest, -1 if e % 2 else 1))
    return result

"""Command-line front end.

    hidaqft wick-expand [EXPR] [--config PATH] [--out PATH]
    hidaqft verify      [--config PATH] [--seed N]
    hidaqft eps-scan    [--config PATH]
    hidaqft split       [--config PATH]
    hidaqft axioms      [--config PATH]

Exit codes: 0 ok, 1 check failed, 2 usage, 3 resource guard, 4 numeric failure.
Reports are JSON lines (wick-expand prints the text form of the expansion).
"""
import argparse
import json
import sys

import numpy as np

from .causal import (PlaneWaveSum, TaylorWindow, ambiguity_dim, check_axiom, eg_inductive_step,
                     first_order, model_lagrangian, qed_lagrangian,
                     retarded_pairing, vanishing_test_function)
from .config import ConfigError, RunConfig, default_slots_testfns, parse_product
from .fields import dirac, photon, scalar
from .fock import DimensionGuard, MAX_DIM, ModeGrid
from .quad import PairSpec, QuadratureError, QuadratureSpec, limit_contraction
from .suites import (ccr_suite, oracle_case, oracle_suite, pairing_suite, record,
                     spinor_suite)
from .testfn import gaussian
from .wick import FockExpansion, multi_product, pairing_form, wick_monomial

OK, FAILED, USAGE, RESOURCE, NUMERIC = 0, 1, 2, 3, 4


class Report:
    def __init__(self, stream):
        self.stream = stream
        self.failed = False

    def line(self, text):
        self.stream.write(text + "\n")

    def emit(self, rec):
        if rec.get("pass") is False:
            self.failed = True
        self.line(json.dumps(rec, default=_json_default))


def _json_default(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(type(x).__name__)


# --- wick-expand ------------------------------------------------------------

def _full_line(pairs, rest, sign, coeff):
    ps = " ".join(f"<{a.symbol()}|{b.symbol()}>" for a, b in pairs)
    kern = " ".join(f.symbol() for f in rest)
    c = complex(coeff)
    cs = repr(c.real) if c.imag == 0 else f"({c.real!r}{c.imag:+}j)"
    if not kern:
        kern = "1" if c == 1 else cs
    elif c != 1:
        kern = f"{cs}*{kern}"
    return f"({len(rest)},{len(pairs)}); {'+1' if sign > 0 else '-1'}; {ps}; {kern}"


def _qed_blocks():
    return [[(fs, c) for fs, c in qed_lagrangian(slot=s)] for s in ("x", "y")]


def cmd_wick_expand(cfg, args, out):
    roster = cfg.roster()
    view = cfg.get("view", "full")
    if view not in ("full", "hida", "sectors"):
        raise ConfigError(f"unknown view {view!r}")
    if cfg.get("model") == "qed":
        # L(x) L(y): each factor is a sum of monomials
        sums = _qed_blocks()
    else:
        text = args.expr if args.expr is not None else cfg.get("product", "")
        sums = [[blk] for blk in parse_product(text, roster)]
    if view == "full":
        lines = []
        if not sums:
            lines.append(_full_line((), (), 1, 1.0))
        else:
            for combo in _combinations(sums):
                coeff = np.prod([c for _, c in combo])
                for pairs, rest, sign in pairing_form([fs for fs, _ in combo]):
                    lines.append(_full_line(pairs, rest, sign, coeff))
        for ln in sorted(lines, key=lambda s: (s.split(";")[0], s)):
            out.line(ln)
        return OK
    exps = [_sum_expansion(s) for s in sums] or [FockExpansion.scalar(1.0)]
    E = exps[0] if len(exps) == 1 else multi_product(exps)
    if view == "hida":
        out.line(E.serialize())
    else:
        for (l, m), n in E.sector_counts().items():
            out.line(f"({l},{m}); {n}")
    return OK


def _combinations(sums):
    if not sums:
        yield ()
        return
    for head in sums[0]:
        for tail in _combinations(sums[1:]):
            yield (head,) + tail


def _sum_expansion(terms):
    total = FockExpansion()
    for fs, c in terms:
        total = total + wick_monomial(fs, c)
    return total


# --- verify -------------------------------------------------------------------

def _guard(grid):
    if grid.dim > MAX_DIM:
        raise DimensionGuard(f"basis dimension {grid.dim} exceeds {MAX_DIM}")


def cmd_verify(cfg, args, out):
    roster = cfg.roster()
    n = cfg.get("products", 25, int)
    inject = cfg.get("inject")
    if inject not in (None, "sign"):
        raise ConfigError(f"unknown injection {inject!r}")
    ccr_grid = None
    if any(k.startswith("grid.") for k in cfg.entries):
        ccr_grid = cfg.grid(roster)
        _guard(ccr_grid)
    if "product" in cfg:
        # a user product on the configured grid, against the direct matrix product
        blocks = parse_product(cfg.get("product"), roster)
        slots = {f.slot for fs, _ in blocks for f in fs}
        names = sorted({f.field for fs, _ in blocks for f in fs}) or list(roster)
        grid = cfg.grid(roster, names)
        _guard(grid.with_cutoff(grid.nmax + sum(len(fs) for fs, _ in blocks)))
        tfs = cfg.testfns(default_slots_testfns(slots | set("xyz"[:len(blocks)])))
        # blocks are smeared in their order with slots x, y, z
        bl = []
        for i, (fs, c) in enumerate(blocks):
            slot_names = {f.slot for f in fs}
            if len(slot_names) > 1:
                raise ConfigError("each block must sit at a single slot")
            s = slot_names.pop() if slot_names else "xyz"[i]
            bl.append(([_reslot(f, "xyz"[i]) for f in fs], c, tfs.get(s, tfs["xyz"[i]])))
        rng = np.random.default_rng(args.seed)
        err, _ = oracle_case(grid, bl, grid.nmax, inject, rng)
        out.emit(record("oracle", "configured product", err, 1e-10))
    else:
        for r in oracle_suite(n, args.seed, inject):
            out.emit(r)
    for r in ccr_suite(ccr_grid):
        out.emit(r)
    for r in spinor_suite(seed=args.seed):
        out.emit(r)
    for r in pairing_suite():
        out.emit(r)
    q = _qed_grid()
    phi = gaussian([0.1, 0.2, -0.1, 0.3], 0.9, mod=[0.3, 0.1, 0, 0.2])
    for ax, kw in (("III", {"grid": q, "phi": phi}),
                   ("IV", {"grid": q, "monomials": qed_lagrangian(), "phi": phi})):
        r = check_axiom(ax, **kw)
        out.emit(record("axiom", ax, r["residual"], r["tolerance"]))
    return FAILED if out.failed else OK


def _reslot(f, slot):
    from dataclasses import replace
    return replace(f, slot=slot)


def _qed_grid():
    return ModeGrid([[0.3, -0.2, 0.5]], 0.7, [dirac(1.0), photon()], nmax=1)


# --- eps-scan -------------------------------------------------------------------

KERNELS = {
    "photon2": lambda m: [PairSpec(photon(), 1, 1), PairSpec(photon(), 1, 1)],
    "photon1": lambda m: [PairSpec(photon(), 1, 1)],
    "scalar2": lambda m: [PairSpec(scalar(m)), PairSpec(scalar(m))],
    "scalar1": lambda m: [PairSpec(scalar(m))],
}


def cmd_eps_scan(cfg, args, out):
    eps = cfg.eps_list()
    if len(eps) < 3:
        raise ConfigError("an eps scan needs at least three values")
    name = cfg.get("kernel", "photon2")
    if name not in KERNELS:
        raise ConfigError(f"unknown kernel {name!r}; choose from {sorted(KERNELS)}")
    pairs = KERNELS[name](cfg.get("mass", 1.0, float))
    tf = cfg.testfns({"x": gaussian([0, 0, 0, 0], 1.0), "y": gaussian([0.5, 0, 0, 0], 1.0)})
    spec = QuadratureSpec(points=cfg.get("quad.points", 24, int),
                          angular=cfg.get("quad.angular", 12, int))
    res = limit_contraction(pairs, tf["x"], tf["y"], eps, spec)
    vals = [res["value"]] + [t["value"] for t in res["table"]]
    if not all(np.isfinite(v) for v in vals):
        raise QuadratureError("non-finite contraction value")
    for t in res["table"]:
        out.emit({"kernel": name, "eps": t["eps"], "value": complex(t["value"]),
                  "diff": t["diff"], "quad_error": t["err"]})
    summary = {"kernel": name, "value": complex(res["value"]), "slope": res["slope"],
               "note": res["note"]}
    if res["slope"] is not None:
        summary["envelope_C"] = res["envelope_C"]
        summary["slope_in_0.8_1.5"] = bool(0.8 <= res["slope"] <= 1.5)
        summary["pass"] = bool(res["slope"] >= 0.8)
    out.emit(summary)
    return FAILED if out.failed else OK


# --- split -----------------------------------------------------------------------------

def _cubic(x):
    t = x[:, 0]
    return t ** 3 * np.sign(t)


def cmd_split(cfg, args, out):
    order = cfg.get("order", 2, int)
    if order >= 3:
        out.line(json.dumps({"error": "symbolic only", "order": order}))
        return USAGE
    if order < 2:
        raise ConfigError("splitting starts at order 2")
    kname = cfg.get("kernel", "cubic1d")
    omega = cfg.get("omega", -1, int)
    windows = cfg.floats("window", [1.0])
    consts = {}
    for line in cfg.values("constant"):
        *alpha, c = line.split()
        consts[tuple(int(a) for a in alpha)] = float(c)
    if kname == "model":
        deg = cfg.get("degree", 2, int)
        step = eg_inductive_step({1: first_order(model_lagrangian(deg))}, 2)
        for q, (om, dim) in sorted(step.ambiguity.items()):
            out.emit({"kernel": f"kappa_{q}", "q": q, "omega": om, "ambiguity_dim": dim})
        out.emit({"kernel": "D_2", "sectors": {f"{l},{m}": n for (l, m), n in
                                               step.D.sector_counts().items()},
                  "divisions": len(step.divisions)})
        return OK
    if kname == "cubic1d":
        kern, dim = _cubic, 1
        default = gaussian([0.3], 0.7)
    elif kname == "planewave":
        q = cfg.floats("frequency", [1.0, 0.3, -0.2, 0.1])
        if len(q) != 4:
            raise ConfigError("frequency needs four numbers")
        kern, dim = PlaneWaveSum.from_minkowski([q], [1.0]), 4
        default = gaussian([0.2, 0.1, 0.0, -0.1], 0.8)
    else:
        raise ConfigError(f"unknown kernel {kname!r}")
    phi = cfg.testfns({"x": default})["x"]
    if cfg.get("vanishing"):
        orders = [int(a) for a in cfg.get("vanishing").split()]
        phi = vanishing_test_function(orders, dim=dim)
    if phi.dim != dim:
        raise ConfigError("test function dimension does not match the kernel")
    for R in windows:
        w = TaylorWindow(R, dim)
        val = retarded_pairing(kern, phi, omega, w, constants=consts)
        if not np.isfinite(val):
            raise QuadratureError("non-finite splitting value")
        out.emit({"kernel": kname, "omega": omega, "window": R, "value": complex(val),
                  "ambiguity_dim": ambiguity_dim(omega, dim)})
    return OK


# --- axioms -----------------------------------------------------------------------------

def _axiom_configs(cfg):
    from .wick import factor
    g = ModeGrid([[0.2, 0.1, -0.3], [-0.4, 0.3, 0.2]], 0.3, [scalar(1.0, "phi")], nmax=2)
    A2 = [factor("phi", 0, "x"), factor("phi", 0, "x")]
    early = gaussian([0, 0, 0, 0], 0.4)
    late = gaussian([6, 0.3, 0, 0], 0.4)
    q = _qed_grid()
    phi = gaussian([0.1, 0.2, -0.1, 0.3], 0.9, mod=[0.3, 0.1, 0, 0.2])
    kern = PlaneWaveSum.from_minkowski([[1.3, 0.2, -0.4, 0.5], [0.5, 0.1, 0.1, 0.0]], [1.0, 0.5j])
    return {
        "I": dict(grid=g, L_factors=A2, phi_early=early, phi_late=late),
        "II-translations": dict(grid=g, L_factors=A2, phi1=late, phi2=early,
                                b=[0.3, 0.1, 0.2, -0.5]),
        "III": dict(grid=q, phi=phi),
        "IV": dict(grid=q, monomials=qed_lagrangian(), phi=phi),
        "V": dict(kernel=kern, phi=vanishing_test_function((1, 1, 1, 0), center=[0.3, -0.2, 0.1, 0.2]),
                  omega=2),
    }


def cmd_axioms(cfg, args, out):
    confs = _axiom_configs(cfg)
    wanted = cfg.values("axiom") or list(confs)
    for a in wanted:
        if a not in confs:
            raise ConfigError(f"unchecked axiom {a!r}")
    for a in wanted:
        out.emit(check_axiom(a, **confs[a]))
    return FAILED if out.failed else OK


COMMANDS = {"wick-expand": cmd_wick_expand, "verify": cmd_verify, "eps-scan": cmd_eps_scan,
            "split": cmd_split, "axioms": cmd_axioms}


def build_parser():
    p = argparse.ArgumentParser(prog="hidaqft", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("expr", nargs="?", default=None,
                   help="product of Wick monomials (wick-expand only)")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
    except ConfigError as exc:
        print(f"hidaqft: {exc}", file=sys.stderr)
        return USAGE
    stream = open(args.out, "w") if args.out else sys.stdout
    try:
        return COMMANDS[args.command](cfg, args, Report(stream))
    except ConfigError as exc:
        print(f"hidaqft: {exc}", file=sys.stderr)
        return USAGE
    except DimensionGuard as exc:
        print(f"hidaqft: {exc}", file=sys.stderr)
        return RESOURCE
    except (QuadratureError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"hidaqft: numeric failure: {exc}", file=sys.stderr)
        return NUMERIC
    finally:
        if args.out:
            stream.close()


if __name__ == "__main__":
    sys.exit(main())

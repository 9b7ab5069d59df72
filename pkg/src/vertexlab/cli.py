"""Command-line front end: ``vertexlab <group> <command> [options]``.

Exit status is 0 on success, 2 on usage errors and 1 when the computation
itself is rejected (for instance a Gram matrix that is not positive definite).
Failed checks are results, not errors, and still exit 0.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
import time
from fractions import Fraction
from typing import Sequence

from . import __version__
from .exact_algebra import QQ, CoefficientRing, TruncSeries
from .fgl import (
    FormalGroupLaw,
    builtin_fgl,
    check_fgl_axioms,
    fgl_from_log,
    formal_inverse,
)
from .hs_vertex import (
    PolyCarrier,
    VertexStructure,
    check_f_derivation,
    check_f_weak_associativity_all,
    check_iterative,
    check_multiplied_associativity,
    translation_derivation,
)
from .lattice_theta import (
    Lattice,
    builtin_lattice,
    compare_lattices,
    lattice_character,
    load_lattice,
    short_vectors,
    theta_genus1,
    theta_genus2,
    theta_genus2_specialize,
)
from .mlde import (
    MonicMLDE,
    ScanCriteria,
    frobenius_solve,
    indicial_polynomial,
    residual,
    scan_characters,
    scan_to_csv,
    scan_to_jsonl,
)
from .modular_forms import (
    QExpansion,
    eisenstein,
    eta_power,
    evaluate,
    j_invariant,
    serre_derivative,
)
from .pierce import analyze, load_table_ring, parse_ring, sweep, sweep_summary


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _int_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two integers a,b")
    return int(parts[0]), int(parts[1])


def _series_dict(s: TruncSeries) -> dict:
    return {"ring": s.ring.name, "order": s.order, "coefficients": [s.ring.format(c) for c in s.coeffs]}


# ---------------------------------------------------------------- fgl


def _coeff_ring(args) -> CoefficientRing:
    try:
        return CoefficientRing.parse(args.ring)
    except ValueError as exc:
        raise UsageError(str(exc))


def _load_fgl(args, order: int | None = None) -> FormalGroupLaw:
    order = order or args.order or 8
    ring = _coeff_ring(args)
    if args.file:
        with open(args.file) as fh:
            return FormalGroupLaw.from_json(fh.read())
    if args.log:
        coeffs = _rational_list(args.log)
        if ring != QQ:
            raise UsageError("logarithms need --ring Q")
        log = TruncSeries(QQ, coeffs + [0] * max(0, order + 1 - len(coeffs)), order)
        return fgl_from_log(log)
    return builtin_fgl(args.builtin, ring, order)


def _fgl_source(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--builtin", choices=["additive", "multiplicative"], default="multiplicative")
    src.add_argument("--file", help="formal group law JSON {ring, order, monomials}")
    src.add_argument("--log", help="logarithm coefficients c0,c1,c2,... (c0 = 0, c1 = 1)")


def cmd_fgl_verify(args):
    F = _load_fgl(args)
    rep = check_fgl_axioms(F.body)
    out = rep.to_dict()
    out["order"] = F.order
    out["ring"] = F.ring.name
    return out


def cmd_fgl_inverse(args):
    F = _load_fgl(args)
    return {"check": "formal_inverse", "order": F.order, "inverse": _series_dict(formal_inverse(F))}


def cmd_fgl_from_log(args):
    if not args.log:
        raise UsageError("from-log needs --log")
    return _load_fgl(args).to_dict()


# ---------------------------------------------------------------- hs


def _hs_setup(args):
    ring = _coeff_ring(args)
    carrier = PolyCarrier(ring, args.carrier_degree)
    order = args.order or 12
    FD = builtin_fgl(args.translation, ring, order)
    D = translation_derivation(FD, carrier, args.depth)
    if args.mutate:
        m, delta = args.mutate.split(":")
        coeffs = [ring(c) for c in delta.split(",")]
        D = D.mutated(int(m), TruncSeries(ring, coeffs, D.generators[int(m) - 1].order))
    F = builtin_fgl(args.fgl or args.translation, ring, order)
    return carrier, D, F


def _hs_common(p):
    p.add_argument("--translation", choices=["additive", "multiplicative"], default="additive",
                   help="law whose translation defines D")
    p.add_argument("--fgl", choices=["additive", "multiplicative"], help="law F to test against")
    p.add_argument("--carrier-degree", type=int, default=12)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--mutate", help="m:c0,c1,... adds the polynomial to D_m(t)")


def cmd_hs_iterative(args):
    _, D, _ = _hs_setup(args)
    return check_iterative(D, samples=2, seed=args.seed).to_dict()


def cmd_hs_fder(args):
    _, D, F = _hs_setup(args)
    return check_f_derivation(D, F, samples=2, seed=args.seed).to_dict()


def cmd_hs_assoc(args):
    carrier, D, F = _hs_setup(args)
    return check_f_weak_associativity_all(VertexStructure(carrier, D, F), samples=2, seed=args.seed).to_dict()


def cmd_hs_conj(args):
    carrier, D, F = _hs_setup(args)
    t, one = carrier.t(), carrier.one()
    return check_multiplied_associativity(VertexStructure(carrier, D, F), t, one, one, args.n_max).to_dict()


# ---------------------------------------------------------------- mf


def _named_form(name: str, N: int) -> QExpansion:
    key = name.upper()
    if key in ("E2", "E4", "E6"):
        return eisenstein(int(key[1]), N)
    if key == "J":
        return j_invariant(N - 1)
    if key == "DELTA":
        return eta_power(24, N)
    if key.startswith("ETA"):
        return eta_power(int(key[3:] or 1), N)
    raise UsageError(f"unknown form {name!r}; use E2, E4, E6, j, Delta or etaR")


def cmd_mf_eisenstein(args):
    return eisenstein(args.weight, _terms(args)).to_dict()


def cmd_mf_eta(args):
    return eta_power(args.power, _terms(args)).to_dict()


def cmd_mf_j(args):
    return j_invariant(_terms(args)).to_dict()


def cmd_mf_serre(args):
    f = _named_form(args.form, _terms(args))
    k = f.weight if args.weight is None else args.weight
    if k is None:
        raise UsageError("--weight is required for forms without a weight tag")
    return serre_derivative(f, k).to_dict()


def cmd_mf_eval(args):
    f = _named_form(args.form, _terms(args))
    ev = evaluate(f, complex(args.tau_re, args.tau_im))
    return {"form": args.form, "tau": [args.tau_re, args.tau_im], "terms": ev.terms,
            "value": [ev.value.real, ev.value.imag], "tail_estimate": ev.tail_estimate}


# ---------------------------------------------------------------- mlde


def _mlde(args) -> MonicMLDE:
    return MonicMLDE(args.order or 2, args.kappa, args.lam, truncation=_terms(args))


def _mlde_common(p):
    p.add_argument("--kappa", type=_rational, default=Fraction(0))
    p.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(0))


def cmd_mlde_indicial(args):
    P = indicial_polynomial(_mlde(args))
    return {"polynomial": P.to_str(), "coefficients": [str(c) for c in P.coeffs],
            "rational_roots": [str(r) for r in P.rational_roots()]}


def cmd_mlde_solve(args):
    return frobenius_solve(_mlde(args), args.exponent).to_dict()


def cmd_mlde_residual(args):
    m = _mlde(args)
    if args.coefficients:
        coeffs = _rational_list(args.coefficients)
        u = QExpansion(args.exponent, coeffs + [0] * (m.truncation + 1 - len(coeffs)), m.truncation)
    else:
        u = frobenius_solve(m, args.exponent).series
    r = residual(m, u)
    return {"residual": r.to_dict(), "zero": r.is_zero()}


def cmd_mlde_scan(args):
    crit = ScanCriteria(terms=args.terms or 40, max_multiplier=args.max_multiplier,
                        integral_modules=args.integral_modules)
    grid = None
    if args.point:
        grid = [_rational_list(p) for p in args.point]
    cands = scan_characters(args.order or 2, grid, Dmax=args.dmax, criteria=crit,
                            lower=args.lower, upper=args.upper, jobs=args.jobs)
    if not args.all:
        cands = [c for c in cands if c.accepted]
    if args.csv:
        return _Raw(scan_to_csv(cands))
    return _Raw(scan_to_jsonl(cands))


# ---------------------------------------------------------------- pierce


def cmd_pierce_analyze(args):
    if args.table:
        R = load_table_ring(args.table, seed=args.seed)
    else:
        R = parse_ring("Z/12" if args.ring == "Q" else args.ring)
    return analyze(R)


def cmd_pierce_sweep(args):
    rows = sweep(args.max, jobs=args.jobs)
    if args.csv:
        keys = ["n", "idempotent_count", "stalks", "local", "vnr", "exchange", "monk_agree", "pierce_ok"]
        lines = [",".join(keys)]
        for r in rows:
            lines.append(",".join(" ".join(r[k]) if isinstance(r[k], list) else str(r[k]) for k in keys))
        return _Raw("\n".join(lines) + "\n")
    return {"summary": sweep_summary(rows), "rows": rows}


# ---------------------------------------------------------------- theta


def _lattice(name: str | None, path: str | None) -> Lattice:
    if path:
        return load_lattice(path)
    return builtin_lattice(name or "E8")


def cmd_theta_genus1(args):
    L = _lattice(args.lattice, args.lattice_file)
    N = _terms(args)
    if not L.is_even:
        sv = short_vectors(L, N)
        return {"lattice": L.name, "odd": True, "norm_counts": {str(k): v for k, v in sv.counts.items()}}
    return {"lattice": L.name, "odd": False, "theta": theta_genus1(L, N).to_dict()}


def cmd_theta_genus2(args):
    L = _lattice(args.lattice, args.lattice_file)
    T = theta_genus2(L, *args.bounds)
    if args.csv:
        return _Raw(T.to_csv())
    out = T.to_dict()
    out["symmetry"] = T.check_symmetries().to_dict()
    out["diagonal"] = theta_genus2_specialize(T, theta_genus1(L, max(args.bounds))).to_dict()
    return out


def cmd_theta_character(args):
    L = _lattice(args.lattice, args.lattice_file)
    return {"lattice": L.name, "character": lattice_character(L, _terms(args)).to_dict()}


def cmd_theta_compare(args):
    L1 = _lattice(args.lattice, args.lattice_file)
    L2 = _lattice(args.other, args.other_file)
    return compare_lattices(L1, L2, _terms(args), args.bounds)


# ---------------------------------------------------------------- plumbing


class _Raw(str):
    """Pre-formatted output (JSON lines or CSV)."""


def _terms(args) -> int:
    return args.terms if args.terms is not None else 10


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--order", type=int, default=None, help="truncation order (fgl, hs) or MLDE order (mlde)")
    g.add_argument("--terms", type=int, default=None, help="number of q-expansion terms")
    g.add_argument("--ring", default="Q", help="coefficient ring Q, Z or Z/n; for pierce, the finite ring")
    fmt = g.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit JSON (default)")
    fmt.add_argument("--csv", action="store_true", help="emit CSV where supported")
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--seed", type=int, default=0, help="sampling seed for property checks")
    g.add_argument("--manifest", help="write a run manifest to this path")
    g.add_argument("--config", help="JSON file whose keys override the options")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="vertexlab", description="Exact computations for vertex rings.")
    parser.add_argument("--version", action="version", version=f"vertexlab {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)

    def add(group_parser, name, func, help_text, setup=None):
        sp = group_parser.add_parser(name, parents=[common], help=help_text)
        if setup:
            setup(sp)
        sp.set_defaults(func=func)
        return sp

    fgl = groups.add_parser("fgl", help="formal group laws").add_subparsers(dest="command", required=True)
    add(fgl, "verify", cmd_fgl_verify, "check the formal group law axioms", _fgl_source)
    add(fgl, "inverse", cmd_fgl_inverse, "formal inverse series", _fgl_source)
    add(fgl, "from-log", cmd_fgl_from_log, "law from a logarithm", _fgl_source)

    hs = groups.add_parser("hs", help="Hasse-Schmidt derivations").add_subparsers(dest="command", required=True)
    add(hs, "check-iterative", cmd_hs_iterative, "iterativity", _hs_common)
    add(hs, "check-f-derivation", cmd_hs_fder, "F-derivation identity", _hs_common)
    add(hs, "check-assoc", cmd_hs_assoc, "F-weak associativity", _hs_common)

    def conj(p):
        _hs_common(p)
        p.add_argument("--n-max", type=int, default=10)

    add(hs, "conjecture34", cmd_hs_conj, "multiplied weak associativity (exploratory)", conj)

    mf = groups.add_parser("mf", help="q-expansions").add_subparsers(dest="command", required=True)
    add(mf, "eisenstein", cmd_mf_eisenstein, "E2, E4 or E6",
        lambda p: p.add_argument("--weight", type=int, required=True, choices=[2, 4, 6]))
    add(mf, "eta", cmd_mf_eta, "eta^r", lambda p: p.add_argument("--power", type=int, default=1))
    add(mf, "j", cmd_mf_j, "the j-invariant")

    def serre(p):
        p.add_argument("--form", default="E4")
        p.add_argument("--weight", type=int, default=None)

    add(mf, "serre", cmd_mf_serre, "modular derivative", serre)

    def ev(p):
        p.add_argument("--form", default="E4")
        p.add_argument("--tau-re", type=float, default=0.0)
        p.add_argument("--tau-im", type=float, default=1.0)

    add(mf, "eval", cmd_mf_eval, "numeric evaluation", ev)

    ml = groups.add_parser("mlde", help="modular linear differential equations").add_subparsers(
        dest="command", required=True)
    add(ml, "indicial", cmd_mlde_indicial, "indicial polynomial", _mlde_common)

    def solve(p):
        _mlde_common(p)
        p.add_argument("--exponent", type=_rational, required=True)

    add(ml, "solve", cmd_mlde_solve, "Frobenius solution", solve)

    def resid(p):
        solve(p)
        p.add_argument("--coefficients", help="a0,a1,... of the trial series (default: the Frobenius solution)")

    add(ml, "residual", cmd_mlde_residual, "apply the operator", resid)

    def scan(p):
        p.add_argument("--dmax", type=int, default=60)
        p.add_argument("--lower", type=_rational, default=Fraction(-1, 2))
        p.add_argument("--upper", type=_rational, default=Fraction(1, 2))
        p.add_argument("--point", action="append", help="explicit grid point x1[,x2]; repeatable")
        p.add_argument("--max-multiplier", type=int, default=1000)
        p.add_argument("--integral-modules", action="store_true")
        p.add_argument("--all", action="store_true", help="also list rejected grid points")

    add(ml, "scan", cmd_mlde_scan, "character scan", scan)

    pr = groups.add_parser("pierce", help="finite rings").add_subparsers(dest="command", required=True)

    add(pr, "analyze", cmd_pierce_analyze, "Pierce analysis of --ring (Z/n, Z/2xZ/3, poly:p:c0,c1,...)",
        lambda p: p.add_argument("--table", help="JSON {size, add, mul}; overrides --ring"))
    add(pr, "sweep", cmd_pierce_sweep, "sweep over Z/n", lambda p: p.add_argument("--max", type=int, default=500))

    th = groups.add_parser("theta", help="lattice theta series").add_subparsers(dest="command", required=True)

    def lat(p):
        p.add_argument("--lattice", default="E8", help="A1, Z, E8, D16plus, E8_plus_E8, sqrt2_E8")
        p.add_argument("--lattice-file", help="JSON {rank, gram} or {builtin}")

    add(th, "genus1", cmd_theta_genus1, "theta series", lat)
    add(th, "character", cmd_theta_character, "theta / eta^rank", lat)

    def g2(p):
        lat(p)
        p.add_argument("--bounds", type=_int_pair, default=(1, 1))

    add(th, "genus2", cmd_theta_genus2, "genus-2 pair counts", g2)

    def cmp_(p):
        lat(p)
        p.add_argument("--other", default="D16plus")
        p.add_argument("--other-file")
        p.add_argument("--bounds", type=_int_pair, default=None)

    add(th, "compare", cmd_theta_compare, "compare two lattices", cmp_)
    return parser


def _apply_config(args, parser):
    with open(args.config) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(getattr(args, dest), Fraction):
            value = _rational(str(value))
        setattr(args, dest, value)
    return cfg


def _render(result) -> str:
    if isinstance(result, _Raw):
        return str(result)
    return json.dumps(result, sort_keys=True, indent=2) + "\n"


_NEGATIVE_VALUE = re.compile(r"^-\d[\d/,.-]*$")


def _attach_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-11/3600" as an option flag; glue it to the preceding option
    out: list[str] = []
    for tok in argv:
        if out and _NEGATIVE_VALUE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        cfg = _apply_config(args, parser) if args.config else {}
        text = _render(args.func(args))
    except UsageError as exc:
        print(f"vertexlab: usage error: {exc}", file=stderr)
        return 2
    except (ValueError, ArithmeticError, OSError, KeyError) as exc:
        print(f"vertexlab: error: {exc}", file=stderr)
        return 1
    stdout.write(text)
    if args.manifest:
        manifest = {
            "argv": argv,
            "config": cfg,
            "version": __version__,
            "elapsed_seconds": round(time.perf_counter() - start, 6),
            "output_sha256": hashlib.sha256(text.encode()).hexdigest(),
        }
        with open(args.manifest, "w") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return 0


def main() -> None:
    sys.exit(run())

"""Command-line front end.

Exit codes: 0 everything checked passed, 1 an identity or accuracy check
failed, 2 bad usage, configuration or input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from fractions import Fraction

import numpy as np

from .algebra import AlgebraConfig, ConfigurationError, blade_name, multivector_to_json
from .basisfun import NotHolomorphicError, expand_in_p_basis, multi_indices, p_alpha, s_beta
from .linalg import InconsistentSystemError
from .polynomial import DegreeLimitError, MvPolynomial, poly_from_json, poly_to_json
from .quadrature import DEFAULT_ORDER, ResourceLimitError, reconstruction_rows, sphere_rule
from .verify import VerifyConfig, random_polynomial, run_suite, suite_passed

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MAX_BASIS_ROWS = 20_000
DEFAULT_FAULT = (1, 2)


class UsageError(Exception):
    pass


def _fault(text: str):
    try:
        a, b = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected two blade masks like 1,2")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, default=1, help="algebra R_{0,2m+1} (default 1)")
    common.add_argument("--max-degree", type=int, default=None, help="degree / |alpha| bound")
    common.add_argument("--truncation", type=int, default=3, help="series truncation N (default 3)")
    common.add_argument("--rule-order", type=int, default=DEFAULT_ORDER, help="quadrature exactness order")
    common.add_argument("--format", choices=["json", "csv", "text"], default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="holcliff", description="Holomorphic Cliffordian function toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run the identity suite")
    v.add_argument("--samples", type=int, default=50, help="random polynomials per property")
    v.add_argument("--fault-inject", nargs="?", const=DEFAULT_FAULT, type=_fault, default=None,
                   help=argparse.SUPPRESS)

    b = sub.add_parser("basis", parents=[common], help="tabulate P_alpha (and S_beta)")
    b.add_argument("--kind", choices=["P", "S", "both"], default="P")

    e = sub.add_parser("expand", parents=[common], help="expand a polynomial in the P_alpha")
    e.add_argument("input", help="polynomial JSON file ('-' for stdin)")

    c = sub.add_parser("cauchy", parents=[common], help="boundary reconstruction experiment")
    c.add_argument("--points", type=int, default=5, help="interior sample points")
    c.add_argument("--tolerance", type=float, default=1e-3)
    c.add_argument("--timing", action="store_true", help="fill the wall_time_ms column")

    sub.add_parser("kernels", parents=[common], help="kernel chain and series identities")
    return parser


# -- output helpers ------------------------------------------------------------------

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _floats(v) -> str:
    return ";".join(repr(float(x)) for x in v)


def _frac(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _monomial(exps) -> str:
    parts = [f"x{i}^{k}" if k > 1 else f"x{i}" for i, k in enumerate(exps) if k]
    return "*".join(parts) or "1"


# -- verify --------------------------------------------------------------------------

def cmd_verify(args) -> tuple[str, int]:
    vc = VerifyConfig(
        m=args.m,
        max_degree=5 if args.max_degree is None else args.max_degree,
        samples=args.samples,
        truncation=args.truncation,
        seed=args.seed,
        fault=args.fault_inject,
    )
    if vc.max_degree < 0 or vc.samples < 1 or vc.truncation < 1:
        raise UsageError("max-degree must be >= 0, samples and truncation >= 1")
    results = run_suite(vc)
    ok = suite_passed(results)
    if args.format == "json":
        text = _json({
            "command": "verify",
            "config": {"m": vc.m, "max_degree": vc.max_degree, "samples": vc.samples,
                       "truncation": vc.truncation, "seed": vc.seed, "fault_injected": vc.fault is not None},
            "passed": ok,
            "results": [r.to_dict() for r in results],
        })
    elif args.format == "csv":
        text = _csv(["identity", "group", "status", "cases", "statement", "detail", "counterexample"],
                    [[r.name, r.group, r.status, r.cases, r.statement, r.detail,
                      "" if r.counterexample is None else json.dumps(r.counterexample)] for r in results])
    else:
        lines = [f"{r.status.upper():8s} {r.group}/{r.name} ({r.cases} cases): {r.statement}"
                 + (f"\n         {r.detail}" if r.detail else "")
                 + (f"\n         counterexample: {json.dumps(r.counterexample)}" if r.failed else "")
                 for r in results]
        lines.append("ALL PASS" if ok else "FAILURES PRESENT")
        text = "\n".join(lines) + "\n"
    return text, EXIT_OK if ok else EXIT_FAIL


# -- basis ---------------------------------------------------------------------------

def basis_row_count(cfg: AlgebraConfig, top: int) -> int:
    return sum(math.comb(t + cfg.dim - 1, cfg.dim - 1) for t in range(1, top + 1))


def basis_entries(cfg: AlgebraConfig, top: int, kind: str) -> list[dict]:
    entries = []
    if kind in ("P", "both"):
        for t in range(1, top + 1):
            for alpha in multi_indices(cfg, t):
                entries.append({"kind": "P", "alpha": list(alpha), "degree": t - 1, "rho_power": 0,
                                "poly": p_alpha(cfg, alpha)})
    if kind in ("S", "both"):
        for t in range(0, top + 1):
            for beta in multi_indices(cfg, t):
                r = s_beta(cfg, beta)
                entries.append({"kind": "S", "alpha": list(beta), "degree": r.num.degree(), "rho_power": r.k,
                                "poly": r.num})
    return entries


def cmd_basis(args) -> tuple[str, int]:
    cfg = AlgebraConfig(args.m)
    top = 2 if args.max_degree is None else args.max_degree
    if top < 1:
        raise UsageError("basis needs --max-degree >= 1 (it bounds |alpha|)")
    count = basis_row_count(cfg, top) * (2 if args.kind == "both" else 1)
    if count > MAX_BASIS_ROWS:
        raise ResourceLimitError(f"{count} basis functions requested, cap is {MAX_BASIS_ROWS}")
    entries = basis_entries(cfg, top, args.kind)
    if args.format == "json":
        text = _json({"command": "basis", "m": cfg.m, "max_total": top, "entries": [
            {"kind": e["kind"], "alpha": e["alpha"], "degree": e["degree"], "rho_power": e["rho_power"],
             "terms": poly_to_json(e["poly"])} for e in entries]})
    else:
        rows = []
        for e in entries:
            alpha = "(" + ",".join(map(str, e["alpha"])) + ")"
            for (exps, blade), c in sorted(e["poly"].terms.items()):
                rows.append([e["kind"], alpha, e["degree"], _monomial(exps), blade_name(blade), _frac(c),
                             e["rho_power"]])
        header = ["kind", "alpha", "degree", "monomial", "blade", "coefficient", "rho_power"]
        if args.format == "csv":
            text = _csv(header, rows)
        else:
            text = "".join(f"{e['kind']}{tuple(e['alpha'])} = {e['poly']}"
                           + (f" / rho^{2 * e['rho_power']}" if e["rho_power"] else "") + "\n" for e in entries)
    return text, EXIT_OK


# -- expand --------------------------------------------------------------------------

def _read_poly(cfg: AlgebraConfig, path: str) -> MvPolynomial:
    try:
        raw = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
        data = json.loads(raw)
        return poly_from_json(cfg, data)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path} is not a polynomial JSON file: {exc}")


def certificate(p: MvPolynomial) -> dict:
    cfg = p.cfg
    exp = expand_in_p_basis(p)
    resum = exp.resum(cfg)
    return {
        "command": "expand",
        "m": cfg.m,
        "input": poly_to_json(p),
        "coefficients": [{"alpha": list(a), "coeff": multivector_to_json(c)}
                         for a, c in sorted(exp.coefficients.items())],
        "rank_by_degree": {str(d): {"rank": r, "unknowns": n} for d, (r, n) in sorted(exp.rank_by_degree.items())},
        "proof": {
            "statement": "sum over alpha of P_alpha(x) * coeff_alpha, expanded exactly, equals input",
            "resummed": poly_to_json(resum),
            "difference": poly_to_json(resum - p),
            "exact_match": resum == p,
        },
    }


def check_certificate(cfg: AlgebraConfig, cert: dict) -> bool:
    """Independent re-substitution of a certificate: rebuild P_alpha and re-sum."""
    from .algebra import multivector_from_json

    p = poly_from_json(cfg, cert["input"])
    acc = MvPolynomial.zero(cfg)
    for item in cert["coefficients"]:
        acc = acc + p_alpha(cfg, item["alpha"]) * multivector_from_json(cfg, item["coeff"])
    return acc == p


def cmd_expand(args) -> tuple[str, int]:
    cfg = AlgebraConfig(args.m)
    p = _read_poly(cfg, args.input)
    try:
        cert = certificate(p)
    except NotHolomorphicError as exc:
        raise UsageError(
            "rejected: input is not holomorphic Cliffordian, so it has no expansion in the P_alpha.\n"
            f"D Delta^{cfg.m} p = {exc.residual}\n"
            f"residual JSON: {json.dumps(poly_to_json(exc.residual))}"
        )
    if args.format == "json":
        text = _json(cert)
    elif args.format == "csv":
        rows = [["(" + ",".join(map(str, c["alpha"])) + ")", blade_name(_blade_mask(t["blade"])),
                 f"{t['num']}/{t['den']}" if t["den"] != "1" else t["num"]]
                for c in cert["coefficients"] for t in c["coeff"]]
        text = _csv(["alpha", "blade", "coefficient"], rows)
    else:
        lines = [f"C{tuple(c['alpha'])} = " + " + ".join(
            f"{t['num']}/{t['den']}*{blade_name(_blade_mask(t['blade']))}" for t in c["coeff"])
            for c in cert["coefficients"]]
        lines.append(f"re-evaluation exact: {cert['proof']['exact_match']}")
        text = "\n".join(lines) + "\n"
    return text, EXIT_OK if cert["proof"]["exact_match"] else EXIT_FAIL


def _blade_mask(indices) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << (i - 1)
    return mask


# -- cauchy --------------------------------------------------------------------------

def cauchy_family(cfg: AlgebraConfig, rng: random.Random) -> list[tuple[str, MvPolynomial]]:
    x = MvPolynomial.paravector_var(cfg)
    fam = [(f"x^{n}", x ** n) for n in range(0, 2 * cfg.m + 2)]
    alphas = [(0, 1, 1) + (0,) * (cfg.dim - 3), (1, 1) + (0,) * (cfg.dim - 2), (2,) + (0,) * (cfg.dim - 1)]
    fam += [(f"P({','.join(map(str, a))})", p_alpha(cfg, a)) for a in alphas]
    fam += [(f"random-{i}", random_polynomial(cfg, rng, 2 * cfg.m, 4)) for i in range(2)]
    return fam


def sample_points(cfg: AlgebraConfig, rng: random.Random, count: int, r_lo: float, r_hi: float) -> list[np.ndarray]:
    pts = []
    for _ in range(count):
        d = np.array([rng.gauss(0, 1) for _ in range(cfg.dim)])
        pts.append(d / np.linalg.norm(d) * rng.uniform(r_lo, r_hi))
    return pts


def cmd_cauchy(args) -> tuple[str, int]:
    cfg = AlgebraConfig(args.m)
    if args.rule_order < 2:
        raise UsageError("--rule-order must be >= 2")
    rng = random.Random(args.seed)
    family = cauchy_family(cfg, rng)
    interior = sample_points(cfg, rng, args.points, 0.0, 0.5)
    exterior = sample_points(cfg, rng, 3, 1.5, 3.0)
    orders = [args.rule_order // 2, args.rule_order]
    rules = {q: sphere_rule(cfg.m, q) for q in orders}
    rows = []
    for q in orders:
        for fid, f in family:
            rows += reconstruction_rows(fid, f, interior, rules[q])
            rows += [_tag(r, "/exterior") for r in reconstruction_rows(fid, f, exterior, rules[q], exterior=True)]

    def worst(order, ext):
        return max(r.abs_error for r in rows if r.rule_order == order and r.function_id.endswith("/exterior") == ext)

    coarse, fine = worst(orders[0], False), worst(orders[1], False)
    ext_err = worst(orders[1], True)
    ok_interior = fine <= args.tolerance
    ok_exterior = ext_err <= args.tolerance
    ok_conv = fine < coarse or fine <= 1e-12
    ok = ok_interior and ok_exterior and ok_conv
    summary = {
        "max_interior_error": fine, "max_exterior_value": ext_err,
        "coarse_order": orders[0], "coarse_max_interior_error": coarse,
        "interior_within_tolerance": ok_interior, "exterior_within_tolerance": ok_exterior,
        "error_decreases_with_order": ok_conv, "tolerance": args.tolerance,
    }
    header = ["function_id", "point", "reconstructed", "exact", "abs_error", "rule_order", "node_count",
              "wall_time_ms"]
    table = [[r.function_id, _floats(r.point), _floats(r.reconstructed), _floats(r.exact), repr(r.abs_error),
              r.rule_order, r.node_count, f"{r.wall_time_ms:.3f}" if args.timing else ""] for r in rows]
    if args.format == "csv":
        text = _csv(header, table)
    elif args.format == "json":
        text = _json({"command": "cauchy", "m": cfg.m, "summary": summary,
                      "rows": [dict(zip(header, row)) for row in table]})
    else:
        lines = [f"{r.function_id:24s} order {r.rule_order:3d}  abs_error {r.abs_error:.3e}" for r in rows]
        lines += [f"{k}: {v}" for k, v in summary.items()]
        text = "\n".join(lines) + "\n"
    return text, EXIT_OK if ok else EXIT_FAIL


def _tag(row, suffix):
    row.function_id += suffix
    return row


# -- kernels -------------------------------------------------------------------------

def cmd_kernels(args) -> tuple[str, int]:
    if args.truncation < 1:
        raise UsageError("--truncation must be >= 1")
    vc = VerifyConfig(m=args.m, truncation=args.truncation, seed=args.seed,
                      max_degree=5 if args.max_degree is None else args.max_degree)
    results = run_suite(vc, groups=("kernels",))
    ok = suite_passed(results)
    entries = [{"identity": r.name, "m": vc.m, "truncation": vc.truncation, "status": r.status,
                "statement": r.statement, "detail": r.detail} for r in results]
    if args.format == "json":
        text = _json(entries)
    elif args.format == "csv":
        text = _csv(["identity", "m", "truncation", "status", "statement", "detail"],
                    [list(e.values()) for e in entries])
    else:
        text = "".join(f"{e['status'].upper():8s} {e['identity']}: {e['statement']}"
                       + (f" [{e['detail']}]" if e["detail"] else "") + "\n" for e in entries)
    return text, EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "basis": cmd_basis, "expand": cmd_expand, "cauchy": cmd_cauchy,
            "kernels": cmd_kernels}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        text, code = COMMANDS[args.command](args)
    except (UsageError, ConfigurationError, DegreeLimitError, ResourceLimitError) as exc:
        print(f"holcliff {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconsistentSystemError as exc:
        print(f"holcliff {args.command}: identity failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())

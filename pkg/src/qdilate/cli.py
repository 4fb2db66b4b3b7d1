"""Command-line front end: pair generation, verification suites, lifts,
characteristic-function grids, demos.

Exit codes: 0 all checks pass, 1 a check or pair validation failed,
2 unreadable or malformed input.  Reports are JSON with sorted keys so a
fixed (input, seed, trunc, tol) always produces identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import ando, hardy, lifts, matcore, model, pseudolift, qpair
from .errors import NotCnuError, ParseError, QDilateError
from .report import Report

SUITES = ("ando", "schaffer", "douglas", "fundamental", "canonical",
          "triple", "pseudo", "model")


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        print(text)


def _load_pair(path: str, tol: float):
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read pair file {path}: {exc}", file=sys.stderr)
        return None, 2
    try:
        return qpair.pair_from_json(raw, tol=tol), 0
    except QDilateError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return None, 1


def cmd_gen(args) -> int:
    try:
        pair = qpair.from_spec(args.spec, seed=args.seed)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except QDilateError as exc:
        print(f"generator error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(qpair.pair_to_json(pair), indent=2, sort_keys=True)
    _write_or_print(text, args.out)
    print(f"generated {args.spec}: dim {pair.dim}, q = {pair.q:.6f}, "
          f"||T1 T2 - q T2 T1|| = "
          f"{matcore.frob(pair.t1 @ pair.t2 - pair.q * pair.t2 @ pair.t1):.3e}",
          file=sys.stderr)
    return 0


def _suite_ando(pair, n, tol):
    rep = Report("ando", {"tol": tol})
    tup = ando.special_ando_tuple(pair)
    star = ando.star_ando_tuple(pair)
    rep.merge(ando.verify_tuple_invariants(tup, pair))
    rep.merge(ando.verify_prop1(tup, pair, tol), prefix="fwd-")
    rep.merge(ando.verify_prop2(star, pair, tol), prefix="star-")
    return rep


def _suite_schaffer(pair, n, tol):
    tup = ando.special_ando_tuple(pair)
    lift = lifts.schaffer_lift(pair, tup, n)
    rep = lifts.verify_lift(lift, pair)
    rep.merge(lifts.minimality_check(lift, pair))
    _, ext = lifts.extract_ando_from_lift(lift, pair)
    rep.merge(ext, prefix="extract-")
    return rep


def _suite_douglas(pair, n, tol):
    star = ando.star_ando_tuple(pair)
    lift = lifts.douglas_lift(pair, star, n)
    rep = lifts.verify_lift(lift, pair)
    rep.merge(lifts.minimality_check(lift, pair))
    return rep


def _suite_fundamental(pair, n, tol):
    rep = Report("fundamental", {"tol": tol})
    fund = model.fundamental_ops(pair)
    rep.check("fundamental-equations",
              "D_{T*} G_i D_{T*} matches the defining right-hand sides",
              fund.funeq_residual, 1e-10)
    rep.check("pseudoinverse-oracle",
              "tuple formula agrees with the least-squares solution",
              fund.oracle_gap, 1e-9)
    rep.check("contractive", "||G_i|| <= 1",
              max(0.0, max(matcore.opnorm(fund.g1), matcore.opnorm(fund.g2)) - 1.0),
              1e-9)
    return rep


def _suite_canonical(pair, n, tol):
    cp = model.canonical_unitary_pair(pair)
    return model.verify_canonical_pair(cp, pair)


def _suite_triple(pair, n, tol):
    rep = Report("triple", {"tol": tol})
    try:
        triple = model.char_triple(pair)
    except NotCnuError as exc:
        rep.skip("not-cnu", "characteristic triple needs a cnu product",
                 note=str(exc))
        return rep
    rep.check("theta-at-zero", "Theta(0) = -T restricted to ran D_T",
              matcore.frob(triple.theta(0.0)
                           + _compressed_product(triple)), 1e-13)
    worst = 0.0
    for r in np.linspace(0.1, 0.9, 8):
        for k in range(16):
            z = r * np.exp(2j * np.pi * k / 16)
            worst = max(worst, max(0.0, matcore.opnorm(triple.theta(z)) - 1.0))
    rep.check("theta-contractive", "||Theta(z)|| <= 1 on the disk grid", worst, 1e-9)
    rep.check("unitary-part-collapse", "||Q_{T*}|| vanishes for cnu products",
              triple.q_residual, 1e-6)
    if triple.dt.dim:
        theta0 = triple.theta(0.0)
        slack = 1.0 - max(np.linalg.norm(theta0[:, j]) for j in range(triple.dt.dim))
        rep.require("purely-contractive",
                    "||Theta(0) f|| < ||f|| strictly on unit defect vectors",
                    slack > 1e-12, note=f"slack {slack:.3e}")
    boundary = 0.0
    for k in range(64):
        zeta = np.exp(2j * np.pi * k / 64)
        th = triple.theta(zeta)
        boundary = max(boundary, matcore.frob(
            matcore.adj(th) @ th - matcore.eye(triple.dt.dim)))
    rep.check("two-sided-inner", "I - Theta(zeta)*Theta(zeta) = 0 on the circle",
              boundary, 1e-8)
    return rep


def _compressed_product(triple):
    """T compressed between the triple's defect bases."""
    return (matcore.adj(triple.dstar.basis.columns) @ triple.product
            @ triple.dt.basis.columns)


def _suite_pseudo(pair, n, tol):
    pi, triple = pseudolift.douglas_pseudo_lift(pair, n)
    rep = pseudolift.is_pseudo_triple(triple, tol)
    rep.merge(pseudolift.is_pseudo_lift(pi, triple, pair, tol), prefix="lift-")
    rep.merge(pseudolift.taylor_rigidity(triple, pair, tol), prefix="taylor-")
    return rep


def _suite_model(pair, n, tol):
    rep = Report("model", {"tol": tol})
    try:
        comp = model.model_compress(pair)
    except NotCnuError as exc:
        rep.skip("not-cnu", "functional model needs a cnu product", note=str(exc))
        return rep
    rep.merge(comp.report)
    return rep


_SUITE_FNS = {
    "ando": _suite_ando,
    "schaffer": _suite_schaffer,
    "douglas": _suite_douglas,
    "fundamental": _suite_fundamental,
    "canonical": _suite_canonical,
    "triple": _suite_triple,
    "pseudo": _suite_pseudo,
    "model": _suite_model,
}


def cmd_verify(args) -> int:
    pair, rc = _load_pair(args.pair, args.tol)
    if pair is None:
        return rc
    suites = args.suites.split(",") if args.suites else list(SUITES)
    for s in suites:
        if s not in _SUITE_FNS:
            print(f"error: unknown suite {s!r}; choose from {','.join(SUITES)}",
                  file=sys.stderr)
            return 2
    master = Report("verify", {"trunc": args.trunc, "tol": args.tol,
                               "seed": args.seed, "suites": suites})
    for s in suites:
        try:
            rep = _SUITE_FNS[s](pair, args.trunc, args.tol)
            master.merge(rep, prefix=f"{s}/")
        except QDilateError as exc:
            master.require(f"{s}/error", f"suite {s} raised", False, note=str(exc))
    _write_or_print(master.to_json(), args.out)
    for line in master.summary_lines():
        print(line, file=sys.stderr)
    return 0 if master.overall else 1


def cmd_charfn(args) -> int:
    pair, rc = _load_pair(args.pair, args.tol)
    if pair is None:
        return rc
    try:
        radii_n, angles_n = (int(x) for x in args.grid.split("x"))
    except ValueError:
        print(f"error: bad grid spec {args.grid!r}, expected RxA", file=sys.stderr)
        return 2
    t = pair.product()
    dt = ando.DefectData(*matcore.defect(t))
    dstar = ando.DefectData(*matcore.defect(matcore.adj(t)))
    lines = ["re_z,im_z,singular_values,delta_norm"]
    if dt.dim == 0:
        lines.append("# empty defect: product is unitary, Theta lives on {0}")
        _write_or_print("\n".join(lines) + "\n", args.out)
        return 0
    boundary_ok = all(abs(ev) < 1.0 - 1e-12 for ev in np.linalg.eigvals(t))
    radii = list(np.linspace(0.1, 0.9, radii_n))
    if boundary_ok:
        radii.append(1.0)
    for r in radii:
        for k in range(angles_n):
            z = r * np.exp(2j * np.pi * k / angles_n)
            theta = model.char_fn(t, z, dt, dstar)
            svals = np.linalg.svd(theta, compute_uv=False)
            sv_text = ";".join(f"{s:.12e}" for s in svals)
            if r == 1.0:
                delta = model.delta_fn(t, z, dt=dt, dstar=dstar)
                d_text = f"{matcore.opnorm(delta):.12e}"
            else:
                d_text = ""
            lines.append(f"{z.real:.12e},{z.imag:.12e},{sv_text},{d_text}")
    _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


def cmd_triple(args) -> int:
    pair, rc = _load_pair(args.pair, args.tol)
    if pair is None:
        return rc
    try:
        triple = model.char_triple(pair)
    except NotCnuError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 1
    samples = []
    for r in (0.0, 0.3, 0.6, 0.9):
        z = complex(r, 0.0)
        samples.append({"z": [z.real, z.imag],
                        "theta": matcore.matrix_to_json(triple.theta(z))})
    obj = {
        "q": [float(pair.q.real), float(pair.q.imag)],
        "G1": matcore.matrix_to_json(triple.fundamental.g1),
        "G2": matcore.matrix_to_json(triple.fundamental.g2),
        "unitary_part_dim": triple.unitary_dim,
        "q_norm": triple.q_residual,
        "defect_dims": {"dt": triple.dt.dim, "dstar": triple.dstar.dim},
        "theta_samples": samples,
    }
    _write_or_print(json.dumps(obj, indent=2, sort_keys=True), args.out)
    return 0


def cmd_lift(args) -> int:
    pair, rc = _load_pair(args.pair, args.tol)
    if pair is None:
        return rc
    if args.kind == "schaffer":
        tup = ando.special_ando_tuple(pair)
        rep = _suite_schaffer(pair, args.trunc, args.tol)
    else:
        tup = ando.star_ando_tuple(pair)
        rep = _suite_douglas(pair, args.trunc, args.tol)
    if args.dump_ando:
        Path(args.dump_ando).write_text(
            json.dumps(tup.to_json(), indent=2, sort_keys=True), encoding="utf-8")
    _write_or_print(rep.to_json(), args.report)
    for line in rep.summary_lines():
        print(line, file=sys.stderr)
    return 0 if rep.overall else 1


def cmd_pseudo(args) -> int:
    pair, rc = _load_pair(args.pair, args.tol)
    if pair is None:
        return rc
    pi, triple = pseudolift.douglas_pseudo_lift(pair, args.trunc)
    rep = pseudolift.is_pseudo_triple(triple)
    rep.merge(pseudolift.is_pseudo_lift(pi, triple, pair), prefix="lift-")
    if args.perturb:
        bad = pseudolift.perturbed_triple(triple, args.perturb, seed=args.seed)
        bad_rep = pseudolift.is_pseudo_triple(bad)
        rep.require("perturbation-rejected",
                    f"off-diagonal perturbation of norm {args.perturb} violates "
                    "the axioms",
                    not bad_rep.overall and bad_rep.worst() >= 0.9 * args.perturb,
                    note=f"worst residual {bad_rep.worst():.3e}")
    _write_or_print(rep.to_json(), args.out)
    for line in rep.summary_lines():
        print(line, file=sys.stderr)
    return 0 if rep.overall else 1


def cmd_demo(args) -> int:
    if args.trunc < 2:
        print("error: the demo needs --trunc >= 2", file=sys.stderr)
        return 2
    rep = lifts.nonisolifts_fixture(args.trunc)
    _write_or_print(rep.to_json(), args.out)
    for line in rep.summary_lines():
        print(line, file=sys.stderr)
    return 0 if rep.overall else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdilate",
        description="Construct and verify dilation/model objects for "
                    "q-commuting contraction pairs at finite truncation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pair_arg=True):
        p.add_argument("--trunc", type=int, default=hardy.DEFAULT_TRUNC,
                       help="Hardy truncation degree (default 24)")
        p.add_argument("--tol", type=float, default=1e-9,
                       help="verification tolerance (default 1e-9)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if pair_arg:
            p.add_argument("--pair", required=True, help="pair JSON file")

    p = sub.add_parser("gen", help="generate a pair from a spec string")
    p.add_argument("spec", help='e.g. "clock-shift:n=4,scale=0.9" or '
                                '"nilpotent:n=3,q=0.5403+0.8415i,c=0.9,d=0.9"')
    common(p, pair_arg=False)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="run verification suites on a pair")
    common(p)
    p.add_argument("--suites", default=None,
                   help=f"comma-separated subset of {','.join(SUITES)}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lift", help="build a lift and verify its axioms")
    common(p)
    p.add_argument("--kind", choices=("schaffer", "douglas"), required=True)
    p.add_argument("--report", default=None, help="report path (default stdout)")
    p.add_argument("--dump-ando", default=None,
                   help="also write the defect tuple (Lambda, P, U) as JSON")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("charfn", help="export a characteristic-function grid")
    common(p)
    p.add_argument("--grid", default="8x16", help="radii x angles (default 8x16)")
    p.set_defaults(func=cmd_charfn)

    p = sub.add_parser("triple", help="emit the characteristic triple as JSON")
    common(p)
    p.set_defaults(func=cmd_triple)

    p = sub.add_parser("pseudo", help="pseudo-lift axiom report")
    common(p)
    p.add_argument("--perturb", type=float, default=None,
                   help="also inject an off-diagonal perturbation of this norm")
    p.set_defaults(func=cmd_pseudo)

    p = sub.add_parser("demo", help="two non-equivalent minimal lifts of (0,0)")
    common(p, pair_arg=False)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QDilateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Subcommands: decompose, ieuler, residual, split, splitlike, alpha, pc, kb,
el, verify.  Dimensions and the working order come from flags only; exit
status is 0 on success or PASS, 1 when a verify identity fails, and 2 on
usage or parse errors.  The expression argument reads stdin when given
as "-".
"""

from __future__ import annotations

import argparse
import json
import sys

from .forms import Context, p_k
from .interior_euler import (ExpansionMismatch, RecompositionFailure,
                             residual_lower, residual_top)
from .lepage import (UnsupportedOrder, euler_lagrange, kb_second_order,
                     krupka_betounes_first, poincare_cartan, rossi_recurrence)
from .parser import (InputSyntaxError, OrderViolation, UnknownIdentifier,
                     default_fields, parse_form, parse_lagrangian)
from .printers import form_json, form_json_doc, form_latex, form_text
from .varmorph import (DegreeTooHigh, NotOneContact, UnsupportedCase,
                       alpha_discrepancy, from_contact_form,
                       split_canonical_codegree_s, split_codegree0, split_like,
                       to_contact_form)
from .verify import CHECKS, run_identity


def _common(sub):
    sub.add_argument("--base-dim", "-n", type=int, default=2,
                     help="base dimension n (default 2)")
    sub.add_argument("--fiber-dim", "-m", type=int, default=1,
                     help="fiber dimension m (default 1)")
    sub.add_argument("--order", "-r", type=int, default=1,
                     help="declared jet order of the input (default 1)")
    sub.add_argument("--format", choices=("text", "latex", "json"),
                     default="text", help="output format")
    sub.add_argument("--fields", default=None,
                     help="comma-separated fiber field names (default u,v,w,...)")


def _expr_arg(sub):
    sub.add_argument("expr", help="expression, or - to read stdin")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="jetform",
        description="symbolic contact-form calculus on jet bundles")
    subs = ap.add_subparsers(dest="command", required=True)

    for name, doc in [
            ("decompose", "contact components p_0..p_q of a form"),
            ("ieuler", "interior Euler operator of a form"),
            ("residual", "residual operator (codegree 0 or lower-degree)"),
            ("split", "canonical splitting of the associated morphism"),
            ("splitlike", "split-like decomposition of the associated morphism"),
            ("alpha", "boundary discrepancy of the two splittings (rank 2)"),
            ("pc", "Poincare-Cartan form of a Lagrangian"),
            ("kb", "Krupka-Betounes equivalent of a Lagrangian"),
            ("el", "Euler-Lagrange source form of a Lagrangian")]:
        sub = subs.add_parser(name, help=doc)
        _common(sub)
        _expr_arg(sub)
        if name == "ieuler":
            sub.add_argument("--contact", type=int, default=None,
                             help="contact degree k (default: degree of the form)")
        if name == "residual":
            sub.add_argument("--contact", type=int, default=None)
            sub.add_argument("--codegree", type=int, default=0,
                             help="codegree s; 0 selects the top-form operator")
        if name == "kb":
            sub.add_argument("--variant", choices=("plain", "generalized"),
                             default="plain", help="second-order variant")

    sub = subs.add_parser("verify", help="run a named identity on seeded data")
    _common(sub)
    sub.add_argument("--identity", required=True,
                     choices=sorted(CHECKS) + ["all"])
    sub.add_argument("--seed", type=int, default=0)
    return ap


def _read_expr(args) -> str:
    if args.expr == "-":
        return sys.stdin.read()
    return args.expr


def _fields(args, m: int):
    if args.fields:
        names = tuple(s.strip() for s in args.fields.split(","))
        if len(names) != m:
            raise ValueError(f"--fields needs {m} names, got {len(names)}")
        return names
    return default_fields(m)


def _emit_form(rho, args, fields) -> str:
    if args.format == "text":
        return form_text(rho, fields)
    if args.format == "latex":
        return form_latex(rho, fields)
    return form_json(rho, fields)


def _emit_parts(parts, args, fields) -> str:
    if args.format == "json":
        doc = {name: form_json_doc(rho, fields) for name, rho in parts}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))
    render = form_text if args.format == "text" else form_latex
    return "\n".join(f"{name}: {render(rho, fields)}" for name, rho in parts)


def _run(args) -> int:
    ctx = Context(n=args.base_dim, m=args.fiber_dim, r=args.order)
    fields = _fields(args, ctx.m)
    cmd = args.command

    if cmd == "verify":
        names = sorted(CHECKS) if args.identity == "all" else [args.identity]
        status = 0
        for name in names:
            ok, detail = run_identity(name, args.seed,
                                      n=args.base_dim, m=args.fiber_dim)
            print(f"{'PASS' if ok else 'FAIL'} {name} (seed {args.seed}): {detail}")
            status = status or (0 if ok else 1)
        return status

    text = _read_expr(args)
    if cmd in ("pc", "kb", "el"):
        lam = parse_lagrangian(text, ctx, args.order, fields)
        if cmd == "pc":
            print(_emit_form(poincare_cartan(lam), args, fields))
        elif cmd == "el":
            print(_emit_form(euler_lagrange(lam), args, fields))
        else:
            if lam.order == 1:
                rho = krupka_betounes_first(lam)
            else:
                rho = kb_second_order(lam, args.variant)
            chain = rossi_recurrence(lam)
            if not (chain.terminal - rho).is_zero() and (
                    lam.order == 1 or args.variant == "plain"):
                print("warning: recurrence and closed form disagree", file=sys.stderr)
            print(_emit_form(rho, args, fields))
        return 0

    rho = parse_form(text, ctx, args.order, fields)
    if cmd == "decompose":
        top = max((len(w) for w in rho.terms), default=0)
        parts = [(f"p_{k}", p_k(rho, k)) for k in range(top + 1)]
        parts = [(name, part) for name, part in parts if not part.is_zero()] \
            or [("p_0", p_k(rho, 0))]
        print(_emit_parts(parts, args, fields))
        return 0
    if cmd == "ieuler":
        from .interior_euler import interior_euler
        k = args.contact if args.contact is not None else max(rho.contact_degree(), 1)
        print(_emit_form(interior_euler(rho, k), args, fields))
        return 0
    if cmd == "residual":
        k = args.contact if args.contact is not None else max(rho.contact_degree(), 1)
        if args.codegree == 0:
            out = residual_top(rho, k)
        else:
            out = residual_lower(rho, k, args.codegree)
        print(_emit_form(out, args, fields))
        return 0

    V = from_contact_form(rho)
    if cmd == "split":
        res = split_codegree0(V) if V.s == 0 else split_canonical_codegree_s(V)
    elif cmd == "splitlike":
        res = split_like(V)
    else:
        a, da = alpha_discrepancy(V)
        print(_emit_parts([("alpha", to_contact_form(a)),
                           ("Div(alpha)", to_contact_form(da))], args, fields))
        return 0
    print(_emit_parts([("volume", to_contact_form(res.volume)),
                       ("boundary", to_contact_form(res.boundary))], args, fields))
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _run(args)
    except (InputSyntaxError, OrderViolation, UnknownIdentifier, NotOneContact,
            DegreeTooHigh, UnsupportedCase, UnsupportedOrder, ExpansionMismatch,
            RecompositionFailure, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

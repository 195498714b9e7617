"""Command line front end: JSON in, JSON reports out.

    surgobs ci invariants N DEGREES
    surgobs ci compare N DEGREES DEGREES' [--variant prop12|intro]
    surgobs odd check FILE [--depth D] [--stabilizations S]
    surgobs seven check FILE
    surgobs form verify FILE

FILE may be '-' for stdin.  Exit codes: 0 positive verdict, 1 negative,
2 indeterminate or inconclusive, 3 input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import complete_intersection as ci
from . import even_l, forms, odd_l
from .group_ring import GroupContext, Variant

SCHEMA = 1
EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass
class Report:
    command: list[str]
    verdict: str
    exit_code: int
    body: dict = field(default_factory=dict)
    caveats: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        d = dict(self.body)
        d.update({"schema": SCHEMA, "command": list(self.command), "verdict": self.verdict,
                  "exit_code": self.exit_code, "caveats": list(self.caveats)})
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def max_search_ms() -> int:
    raw = os.environ.get("SOC_MAX_SEARCH_MS", "10000")
    try:
        return max(0, int(raw))
    except ValueError:
        raise InputError(f"SOC_MAX_SEARCH_MS must be an integer, got {raw!r}")


def _read_json(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {path}: {exc}")


def _context(d: dict) -> GroupContext:
    g = d.get("group")
    try:
        return GroupContext.integers() if g is None else GroupContext.from_json(g)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"not a valid group: {exc}")


def parse_degrees(s: str) -> tuple[int, ...]:
    s = s.strip()
    if s in ("", "[]"):
        return ()
    try:
        return tuple(int(x) for x in s.split(","))
    except ValueError:
        raise InputError(f"degrees must be a comma separated list of integers, got {s!r}")


# ------------------------------------------------------------ commands

def run_ci_invariants(n: int, degrees: Sequence[int], command: list[str]) -> Report:
    m = ci.canonicalize(ci.MultiDegree(n, tuple(degrees)))
    body = {"multidegree": m.to_json(), "invariants": ci.invariants(m).to_json(),
            "predicates": {v.value: ci.traving_predicate(m, v).to_json() for v in ci.PredicateVariant},
            "splits_hyperbolic_plane": ci.splits_hyperbolic_plane(m)}
    rep = Report(command, "computed", EXIT_POSITIVE, body)
    if ci.normal_type_caveat(n):
        rep.caveats.append("normal bundle comparison not certified for floor(n/2) = 2, 3 mod 8")
    return rep


def run_ci_compare(n: int, degrees: Sequence[int], degrees2: Sequence[int], variant: str,
                   command: list[str]) -> Report:
    a = ci.MultiDegree(n, tuple(degrees))
    b = ci.MultiDegree(n, tuple(degrees2))
    v = ci.theorem_a_decide(a, b, ci.PredicateVariant(variant), invariant_fn=ci.invariants)
    code = {ci.Verdict.DIFFEOMORPHIC: EXIT_POSITIVE, ci.Verdict.NOT_DIFFEOMORPHIC: EXIT_NEGATIVE,
            ci.Verdict.INDETERMINATE: EXIT_INCONCLUSIVE}[v.verdict]
    body = v.to_json()
    caveats = body.pop("caveats")
    body.pop("verdict")
    body["multidegrees"] = [ci.canonicalize(a).to_json(), ci.canonicalize(b).to_json()]
    return Report(command, v.verdict.value, code, body, caveats)


def run_odd_check(path: str, depth: int, stabilizations: int, command: list[str]) -> Report:
    d = _read_json(path)
    ctx = _context(d)
    try:
        P = odd_l.OddObstruction.from_json(d, ctx)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"not a valid pair: {exc}")
    body = {"pair": P.to_json()}
    if odd_l.is_elementary_rep(P):
        body["word"] = []
        return Report(command, "elementary", EXIT_POSITIVE, body)
    if not ctx.is_trivial():
        body["word"] = None
        return Report(command, "inconclusive", EXIT_INCONCLUSIVE, body,
                      ["orbit search is only implemented over Z"])
    word = odd_l.decide_elementary_orbit(P, depth, stabilizations, max_ms=max_search_ms())
    if word is None:
        body["word"] = None
        return Report(command, "inconclusive", EXIT_INCONCLUSIVE, body,
                      ["bounded search found no word; this is not a disproof"])
    body["word"] = odd_l.word_to_json(word)
    body["representative"] = odd_l.apply_word(P, word).to_json()
    return Report(command, "elementary-after-word", EXIT_POSITIVE, body)


def run_seven_check(path: str, command: list[str]) -> Report:
    d = _read_json(path)
    try:
        sign_W = int(d["sign_W"])
        chars = [int(c) for c in d.get("char_numbers", [])]
        datum = even_l.SurgeryDatum.from_json(d.get("datum", d))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"not a valid datum: {exc}")
    try:
        rep = even_l.theorem6_check(sign_W, chars, datum)
    except even_l.OddDiagonalOnKernel as exc:
        body = {"diagnostics": [str(exc)], "witness": None}
        return Report(command, "conditions-not-met", EXIT_NEGATIVE, body)
    except (even_l.SearchExhausted, even_l.ConditionsNotMet) as exc:
        body = {"diagnostics": [str(exc)], "witness": None}
        return Report(command, "inconclusive", EXIT_INCONCLUSIVE, body)
    body = rep.to_json()
    if rep.ok:
        return Report(command, "elementary", EXIT_POSITIVE, body)
    if not (rep.conditions_ok and rep.sign_vanishes and rep.char_numbers_vanish):
        return Report(command, "conditions-not-met", EXIT_NEGATIVE, body)
    return Report(command, "inconclusive", EXIT_INCONCLUSIVE, body)


def _form_axioms(d: dict, ctx: GroupContext) -> tuple[dict, Optional[forms.EpsQuadraticForm]]:
    """Check the axioms one by one on raw form data."""
    out = {}
    try:
        eps = int(d["epsilon"])
        variant = Variant(d.get("variant", "mu"))
        n = int(d["rank"])
        lam = [[ctx.from_coeffs(forms._as_coeffs(x, ctx)) for x in row] for row in d["lambda"]]
        Q = ctx.quotient(eps, variant)
        mu = [Q.element(forms._as_list(m)) for m in d["mu"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"not a valid form: {exc}")
    if eps not in (1, -1):
        raise InputError("epsilon must be +-1")
    shape_ok = len(lam) == n and all(len(r) == n for r in lam) and len(mu) == n
    out["i"] = shape_ok
    if not shape_ok:
        return out, None
    out["ii"] = all(lam[i][j] == eps * lam[j][i].bar() for i in range(n) for j in range(n))
    out["iii"] = all(Q.compatible(lam[i][i], mu[i]) for i in range(n))
    if not (out["ii"] and out["iii"]):
        return out, None
    F = forms.make_form(ctx, eps, variant, lam, mu, rank=n)
    ok = True
    for i in range(n):
        for j in range(n):
            v, w = F.basis_vector(i), F.basis_vector(j)
            s = [a + b for a, b in zip(v, w)]
            lhs = forms.eval_mu(F, s)
            rhs = F.quotient.add(F.quotient.add(forms.eval_mu(F, v), forms.eval_mu(F, w)),
                                 F.quotient.canonicalize(forms.eval_lambda(F, v, w)))
            ok = ok and lhs == rhs
    out["iv"] = ok
    return out, F


def run_form_verify(path: str, command: list[str]) -> Report:
    d = _read_json(path)
    ctx = _context(d)
    body: dict = {}
    failed: list[str] = []
    if "form" in d:
        axioms, _ = _form_axioms(d["form"], ctx)
        body["axioms"] = axioms
        failed += [f"axiom {k})" for k, v in axioms.items() if not v]
    if "triple" in d:
        try:
            theta = even_l.EvenObstruction.from_json(d["triple"], ctx)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"not a valid triple: {exc}")
        if "witness" in d:
            try:
                basis = [[ctx.scalar(x) if isinstance(x, int) else ctx.from_coeffs(x) for x in v]
                         for v in d["witness"]]
                chk = even_l.check_witness(theta, even_l.ElementaryWitness(basis))
            except (TypeError, ValueError) as exc:
                raise InputError(f"not a valid witness: {exc}")
            body["witness"] = {"isotropic": chk.isotropic, "injective_summands": chk.injective_summands,
                               "pairing_isomorphism": chk.pairing_isomorphism,
                               "simple": chk.simple.value, "ok": chk.ok}
            if not chk.ok:
                failed.append("witness")
    if not body:
        raise InputError("nothing to verify: expected 'form' and/or 'triple' + 'witness'")
    body["failed"] = failed
    if failed:
        return Report(command, "invalid", EXIT_NEGATIVE, body)
    return Report(command, "valid", EXIT_POSITIVE, body)


# --------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="surgobs", description="Surgery obstruction and complete intersection checks")
    sub = p.add_subparsers(dest="group", required=True)

    cp = sub.add_parser("ci", help="complete intersections")
    csub = cp.add_subparsers(dest="cmd", required=True)
    inv = csub.add_parser("invariants")
    inv.add_argument("n", type=int)
    inv.add_argument("degrees")
    cmp_ = csub.add_parser("compare")
    cmp_.add_argument("n", type=int)
    cmp_.add_argument("degrees")
    cmp_.add_argument("degrees2")
    cmp_.add_argument("--variant", choices=[v.value for v in ci.PredicateVariant], default="prop12")

    op = sub.add_parser("odd", help="odd-dimensional obstructions")
    osub = op.add_subparsers(dest="cmd", required=True)
    oc = osub.add_parser("check")
    oc.add_argument("file")
    oc.add_argument("--depth", type=int, default=4)
    oc.add_argument("--stabilizations", type=int, default=0)

    sp = sub.add_parser("seven", help="surgery data for 7-manifolds")
    ssub = sp.add_subparsers(dest="cmd", required=True)
    sc = ssub.add_parser("check")
    sc.add_argument("file")

    fp = sub.add_parser("form", help="quadratic forms and witnesses")
    fsub = fp.add_subparsers(dest="cmd", required=True)
    fv = fsub.add_parser("verify")
    fv.add_argument("file")
    return p


def dispatch(argv: Sequence[str]) -> Report:
    command = list(argv)
    args = build_parser().parse_args(command)
    if args.group == "ci" and args.cmd == "invariants":
        return run_ci_invariants(args.n, parse_degrees(args.degrees), command)
    if args.group == "ci":
        return run_ci_compare(args.n, parse_degrees(args.degrees), parse_degrees(args.degrees2),
                              args.variant, command)
    if args.group == "odd":
        if args.depth < 0 or args.stabilizations < 0:
            raise InputError("depth and stabilizations must be nonnegative")
        return run_odd_check(args.file, args.depth, args.stabilizations, command)
    if args.group == "seven":
        return run_seven_check(args.file, command)
    return run_form_verify(args.file, command)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        rep = dispatch(argv)
    except (InputError, ci.InvalidDegree, ci.DimensionTooSmall, forms.DimensionMismatch,
            even_l.MalformedDatum, ValueError) as exc:
        rep = Report(argv, "input-error", EXIT_INPUT, {"error": str(exc)})
    print(rep.dumps())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())

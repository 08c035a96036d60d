"""Batch JSON command-line front end.

One command per invocation, JSON in, JSON out (canonical term order, exact
rational strings), meaningful exit codes: 0 success, 1 failed --assert,
2 malformed input. The environment variable JETPHASE_MAX_DEGREE caps every
--order value as a safety limit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import io as jio
from .distributions import (beta_form, is_oscillatory, pushforward_diffeo)
from .errors import JetPhaseError
from .filtered import (DELTAKER_VS_CONST, DIV_VS_MULT, MULT_VS_ANNIH,
                       FiltrationSpec, factorize, op_exp, op_log)
from .foi import (check_foi_axiom, check_strong, foi_distribution, recover_phase)
from .jets import AUX, NU, TruncationSpec
from .distributions import apply_distribution
from .operators import classify, full_symbol, op_compose
from .scalars import format_scalar
from .star import (is_natural_star, left_mult_symbol, moyal_star,
                   star_exponential, star_multiply, two_point_distribution)

SPLIT_FLAGS = {"ab": MULT_VS_ANNIH, "bc": DELTAKER_VS_CONST, "ef": DIV_VS_MULT}


class _CliInputError(Exception):
    def __init__(self, kind, detail):
        super().__init__(detail)
        self.kind = kind
        self.detail = detail


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise _CliInputError("io", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _CliInputError("json", f"{path}: {exc}") from exc


def _order(args):
    n = args.order
    if n is None:
        raise _CliInputError("schema", "this command requires --order")
    if n < 0:
        raise _CliInputError("schema", "--order must be nonnegative")
    cap = os.environ.get("JETPHASE_MAX_DEGREE")
    if cap is not None and n > int(cap):
        raise _CliInputError(
            "limit", f"--order {n} exceeds JETPHASE_MAX_DEGREE={cap}")
    return n


def _nu_trunc(args):
    return TruncationSpec(NU, _order(args))


# -- handlers: each returns (payload, verdict-or-None) -----------------------

def _cmd_op_compose(args):
    lhs = jio.operator_from_json(_load_json(args.paths[0]))
    rhs = jio.operator_from_json(_load_json(args.paths[1]))
    trunc = _nu_trunc(args) if args.order is not None else None
    return jio.operator_to_json(op_compose(lhs, rhs, trunc)), None


def _cmd_op_exp(args):
    op = jio.operator_from_json(_load_json(args.paths[0]))
    return jio.operator_to_json(
        op_exp(op, FiltrationSpec(NU, 1), _nu_trunc(args))), None


def _cmd_op_log(args):
    op = jio.operator_from_json(_load_json(args.paths[0]))
    return jio.operator_to_json(
        op_log(op, FiltrationSpec(NU, 1), _nu_trunc(args))), None


def _cmd_op_symbol(args):
    op = jio.operator_from_json(_load_json(args.paths[0]))
    return jio.jet_to_json(full_symbol(op)), None


def _cmd_op_natural(args):
    report = classify(jio.operator_from_json(_load_json(args.paths[0])))
    payload = {"natural": report.is_natural, "in_g_nu": report.in_g_nu}
    if report.standard_degree is not None:
        payload["standard_degree"] = report.standard_degree
    return payload, report.is_natural


def _cmd_factor(args):
    g = jio.operator_from_json(_load_json(args.paths[0]))
    split = SPLIT_FLAGS[args.split]
    a, b = factorize(g, split, FiltrationSpec(NU, 1), _nu_trunc(args))
    return {"a": jio.operator_to_json(a), "b": jio.operator_to_json(b)}, None


def _cmd_osc_check(args):
    dist = jio.distribution_from_json(_load_json(args.distribution))
    verdict, x_op = is_oscillatory(dist, _order(args))
    payload = {"oscillatory": verdict}
    if x_op is not None:
        payload["x"] = jio.operator_to_json(x_op)
    return payload, verdict


def _cmd_osc_beta(args):
    dist = jio.distribution_from_json(_load_json(args.distribution))
    form = beta_form(dist)
    nondeg = bool(form.det())
    matrix = [[format_scalar(v) for v in row] for row in form.matrix]
    return {"beta": matrix, "nondegenerate": nondeg}, nondeg


def _cmd_osc_push(args):
    dist = jio.distribution_from_json(_load_json(args.distribution))
    phi = jio.diffeo_from_json(_load_json(args.map))
    return jio.distribution_to_json(
        pushforward_diffeo(dist, phi, _nu_trunc(args))), None


def _cmd_foi_eval(args):
    dist = jio.distribution_from_json(_load_json(args.distribution))
    amp = jio.jet_from_json(_load_json(args.amplitude))
    return jio.jet_to_json(apply_distribution(dist, amp, _order(args))), None


def _cmd_foi_distribution(args):
    pair = jio.pair_from_json(_load_json(args.pair))
    return jio.distribution_to_json(foi_distribution(pair, _order(args))), None


def _cmd_foi_recover(args):
    dist = jio.distribution_from_json(_load_json(args.distribution))
    return jio.pair_to_json(recover_phase(dist, _order(args))), None


def _cmd_foi_check_axiom(args):
    pair = jio.pair_from_json(_load_json(args.pair))
    dist = jio.distribution_from_json(_load_json(args.distribution))
    field = jio.vector_field_from_json(_load_json(args.field))
    amp = jio.jet_from_json(_load_json(args.amplitude))
    defect = check_foi_axiom(dist, pair, field, amp, _order(args))
    return {"defect": jio.jet_to_json(defect), "zero": not defect}, not defect


def _cmd_foi_check_strong(args):
    pair = jio.pair_from_json(_load_json(args.pair))
    dist = jio.distribution_from_json(_load_json(args.distribution))
    amp = jio.jet_from_json(_load_json(args.amplitude))
    defect = check_strong(dist, pair, amp, _order(args))
    return {"defect": jio.jet_to_json(defect), "zero": not defect}, not defect


def _cmd_star_moyal(args):
    pi = jio.pi_matrix_from_json(_load_json(args.pi))
    return jio.star_to_json(moyal_star(pi, _order(args))), None


def _cmd_star_mul(args):
    star = jio.star_from_json(_load_json(args.star), args.order)
    lhs = jio.jet_from_json(_load_json(args.lhs))
    rhs = jio.jet_from_json(_load_json(args.rhs))
    return jio.jet_to_json(star_multiply(star, lhs, rhs, _order(args))), None


def _cmd_star_natural(args):
    star = jio.star_from_json(_load_json(args.star), args.order)
    verdict = is_natural_star(star, _order(args))
    return {"natural": verdict}, verdict


def _cmd_star_two_point(args):
    star = jio.star_from_json(_load_json(args.star), args.order)
    return jio.distribution_to_json(
        two_point_distribution(star, _order(args))), None


def _cmd_star_exp(args):
    star = jio.star_from_json(_load_json(args.star), args.order)
    amp = jio.jet_from_json(_load_json(args.amplitude))
    trunc = TruncationSpec(AUX, _order(args))
    return jio.jet_to_json(star_exponential(star, amp, trunc)), None


def _cmd_star_symbol(args):
    star = jio.star_from_json(_load_json(args.star), args.order)
    amp = jio.jet_from_json(_load_json(args.amplitude))
    return jio.jet_to_json(left_mult_symbol(star, amp, _order(args))), None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jetphase",
        description="Exact stationary-phase and star-product calculus on JSON data.")
    top = parser.add_subparsers(dest="group", required=True)

    def common(p, order_required=True):
        p.add_argument("--order", "-N", type=int, default=None,
                       help="truncation order" + ("" if order_required else " (optional)"))
        p.add_argument("--assert", dest="assert_verdict", action="store_true",
                       help="exit 1 when the boolean verdict is false")
        p.add_argument("--output", help="write the result JSON to a file")

    op = top.add_parser("op", help="operator algebra").add_subparsers(
        dest="verb", required=True)
    p = op.add_parser("compose", help="normal-ordered product of two operators")
    p.add_argument("paths", nargs=2, metavar="OPERATOR")
    common(p, order_required=False)
    p.set_defaults(func=_cmd_op_compose)
    for verb, func in (("exp", _cmd_op_exp), ("log", _cmd_op_log)):
        p = op.add_parser(verb, help=f"group {verb} under the nu filtration")
        p.add_argument("paths", nargs=1, metavar="OPERATOR")
        common(p)
        p.set_defaults(func=func)
    for verb, func in (("symbol", _cmd_op_symbol), ("natural", _cmd_op_natural)):
        p = op.add_parser(verb)
        p.add_argument("paths", nargs=1, metavar="OPERATOR")
        common(p, order_required=False)
        p.set_defaults(func=func)

    p = top.add_parser("factor", help="pronilpotent factorization g = a b")
    p.add_argument("paths", nargs=1, metavar="OPERATOR")
    p.add_argument("--split", choices=sorted(SPLIT_FLAGS), required=True)
    common(p)
    p.set_defaults(func=_cmd_factor)

    osc = top.add_parser("osc", help="point-supported distributions").add_subparsers(
        dest="verb", required=True)
    p = osc.add_parser("check", help="oscillatory test")
    p.add_argument("--distribution", required=True)
    common(p)
    p.set_defaults(func=_cmd_osc_check)
    p = osc.add_parser("beta", help="the bilinear form and nondegeneracy")
    p.add_argument("--distribution", required=True)
    common(p, order_required=False)
    p.set_defaults(func=_cmd_osc_beta)
    p = osc.add_parser("push", help="pushforward along a coordinate change")
    p.add_argument("--distribution", required=True)
    p.add_argument("--map", required=True)
    common(p)
    p.set_defaults(func=_cmd_osc_push)

    foi = top.add_parser("foi", help="formal oscillatory integrals").add_subparsers(
        dest="verb", required=True)
    p = foi.add_parser("eval", help="evaluate a distribution on an amplitude")
    p.add_argument("--distribution", required=True)
    p.add_argument("--amplitude", required=True)
    common(p)
    p.set_defaults(func=_cmd_foi_eval)
    p = foi.add_parser("distribution", help="stationary-phase distribution of a pair")
    p.add_argument("--pair", required=True)
    common(p)
    p.set_defaults(func=_cmd_foi_distribution)
    p = foi.add_parser("recover", help="recover the phase jet from a distribution")
    p.add_argument("--distribution", required=True)
    common(p)
    p.set_defaults(func=_cmd_foi_recover)
    p = foi.add_parser("check-axiom", help="integral-axiom defect")
    p.add_argument("--pair", required=True)
    p.add_argument("--distribution", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--amplitude", required=True)
    common(p)
    p.set_defaults(func=_cmd_foi_check_axiom)
    p = foi.add_parser("check-strong", help="strong-association defect")
    p.add_argument("--pair", required=True)
    p.add_argument("--distribution", required=True)
    p.add_argument("--amplitude", required=True)
    common(p)
    p.set_defaults(func=_cmd_foi_check_strong)

    star = top.add_parser("star", help="star products").add_subparsers(
        dest="verb", required=True)
    p = star.add_parser("moyal", help="constant-Poisson star product")
    p.add_argument("--pi", required=True)
    common(p)
    p.set_defaults(func=_cmd_star_moyal)
    p = star.add_parser("mul", help="star multiply two jets")
    p.add_argument("--star", required=True)
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    common(p)
    p.set_defaults(func=_cmd_star_mul)
    p = star.add_parser("natural", help="per-order naturalness check")
    p.add_argument("--star", required=True)
    common(p)
    p.set_defaults(func=_cmd_star_natural)
    p = star.add_parser("two-point", help="the diagonal two-point distribution")
    p.add_argument("--star", required=True)
    common(p)
    p.set_defaults(func=_cmd_star_two_point)
    p = star.add_parser("exp", help="star exponential (aux-degree truncation)")
    p.add_argument("--star", required=True)
    p.add_argument("--amplitude", required=True)
    common(p)
    p.set_defaults(func=_cmd_star_exp)
    p = star.add_parser("symbol", help="full symbol of left star multiplication")
    p.add_argument("--star", required=True)
    p.add_argument("--amplitude", required=True)
    common(p)
    p.set_defaults(func=_cmd_star_symbol)
    return parser


def _emit_error(kind: str, detail: str):
    sys.stderr.write(json.dumps({"error": {"kind": kind, "detail": detail}}) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, verdict = args.func(args)
    except _CliInputError as exc:
        _emit_error(exc.kind, exc.detail)
        return 2
    except JetPhaseError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 2
    text = json.dumps(payload, separators=(",", ":"))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    if args.assert_verdict and verdict is False:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

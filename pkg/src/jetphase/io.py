"""JSON schemas for every value type, with canonical deterministic ordering.

All coefficients travel as exact rational strings; terms are emitted in
(nu, graded-lex x, graded-lex aux/dx) order so identical values serialize to
identical bytes.
"""

from __future__ import annotations

from .distributions import PointDistribution
from .errors import InputShapeError
from .foi import PhaseDensityPair, VectorField
from .jets import Jet, canonical_terms, grlex_key
from .operators import ANTI, NORMAL, FormalOperator, canonical_op_terms
from .scalars import format_scalar, parse_scalar
from .star import StarProduct, moyal_star


def jet_to_json(f: Jet) -> dict:
    payload = {"num_vars": f.num_vars}
    if f.aux_names:
        payload["aux"] = list(f.aux_names)
    terms = []
    for (nu, alpha, aux), c in canonical_terms(f):
        entry = {"nu": nu, "x": list(alpha)}
        if f.aux_names:
            entry["aux"] = list(aux)
        entry["c"] = format_scalar(c)
        terms.append(entry)
    payload["terms"] = terms
    return payload


def jet_from_json(payload: dict) -> Jet:
    try:
        num_vars = int(payload["num_vars"])
        aux_names = tuple(payload.get("aux", ()))
        terms = {}
        for entry in payload.get("terms", ()):
            key = (int(entry["nu"]),
                   tuple(int(v) for v in entry["x"]),
                   tuple(int(v) for v in entry.get("aux", (0,) * len(aux_names))))
            terms[key] = terms.get(key, 0) + parse_scalar(entry["c"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputShapeError(f"malformed jet JSON: {exc}") from exc
    return Jet(num_vars, terms, aux_names)


def operator_to_json(A: FormalOperator) -> dict:
    payload = {"num_vars": A.num_vars, "ordering": "normal" if A.ordering == NORMAL else "anti"}
    terms = []
    for (nu, alpha, beta), c in canonical_op_terms(A):
        terms.append({"nu": nu, "x": list(alpha), "dx": list(beta),
                      "c": format_scalar(c)})
    payload["terms"] = terms
    return payload


def operator_from_json(payload: dict) -> FormalOperator:
    try:
        num_vars = int(payload["num_vars"])
        ordering = payload.get("ordering", "normal")
        if ordering not in ("normal", "anti"):
            raise ValueError(f"unknown ordering {ordering!r}")
        terms = {}
        for entry in payload.get("terms", ()):
            key = (int(entry["nu"]),
                   tuple(int(v) for v in entry["x"]),
                   tuple(int(v) for v in entry["dx"]))
            terms[key] = terms.get(key, 0) + parse_scalar(entry["c"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputShapeError(f"malformed operator JSON: {exc}") from exc
    return FormalOperator(num_vars, terms, NORMAL if ordering == "normal" else ANTI)


def distribution_to_json(L: PointDistribution) -> dict:
    terms = []
    for (r, beta) in sorted(L.terms, key=lambda k: (k[0], grlex_key(k[1]))):
        terms.append({"nu": r, "dx": list(beta), "c": format_scalar(L.terms[(r, beta)])})
    return {"num_vars": L.num_vars, "terms": terms}


def distribution_from_json(payload: dict) -> PointDistribution:
    try:
        num_vars = int(payload["num_vars"])
        terms = {}
        for entry in payload.get("terms", ()):
            key = (int(entry["nu"]), tuple(int(v) for v in entry["dx"]))
            terms[key] = terms.get(key, 0) + parse_scalar(entry["c"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputShapeError(f"malformed distribution JSON: {exc}") from exc
    return PointDistribution(num_vars, terms)


def pair_to_json(pair: PhaseDensityPair) -> dict:
    return {"num_vars": pair.num_vars,
            "phase": jet_to_json(pair.phase),
            "u": jet_to_json(pair.density_exponent)}


def pair_from_json(payload: dict) -> PhaseDensityPair:
    try:
        phase = jet_from_json(payload["phase"])
        u = jet_from_json(payload["u"])
    except KeyError as exc:
        raise InputShapeError(f"malformed pair JSON: missing {exc}") from exc
    if "num_vars" in payload and int(payload["num_vars"]) != phase.num_vars:
        raise InputShapeError("pair num_vars disagrees with the phase jet")
    return PhaseDensityPair(phase, u)


def vector_field_from_json(payload: dict) -> VectorField:
    try:
        comps = tuple(jet_from_json(entry) for entry in payload["components"])
    except (KeyError, TypeError) as exc:
        raise InputShapeError(f"malformed vector field JSON: {exc}") from exc
    return VectorField(comps)


def vector_field_to_json(v: VectorField) -> dict:
    return {"components": [jet_to_json(c) for c in v.components]}


def diffeo_from_json(payload: dict):
    try:
        return tuple(jet_from_json(entry) for entry in payload["components"])
    except (KeyError, TypeError) as exc:
        raise InputShapeError(f"malformed coordinate map JSON: {exc}") from exc


def pi_matrix_from_json(payload):
    """Accept {"pi": [[...]]} or a bare matrix; entries are rational strings."""
    matrix = payload.get("pi", payload) if isinstance(payload, dict) else payload
    try:
        return [[parse_scalar(str(v)) for v in row] for row in matrix]
    except (TypeError, ValueError) as exc:
        raise InputShapeError(f"malformed pi matrix JSON: {exc}") from exc


def star_to_json(S: StarProduct) -> dict:
    return {"num_vars": S.num_vars,
            "C": [operator_to_json(op) for op in S.c_ops]}


def star_from_json(payload: dict, order=None) -> StarProduct:
    if "moyal_pi" in payload:
        pi = pi_matrix_from_json(payload["moyal_pi"])
        return moyal_star(pi, order if order is not None else len(pi) * 4)
    try:
        num_vars = int(payload["num_vars"])
        ops = tuple(operator_from_json(entry) for entry in payload["C"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputShapeError(f"malformed star product JSON: {exc}") from exc
    return StarProduct(num_vars, ops)

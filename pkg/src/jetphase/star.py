"""Star products as bidifferential series on a doubled chart.

The order-r term of a star product is stored as a formal operator on 2n
variables (y = x^1..x^n, z = x^(n+1)..x^(2n)): it acts on f(y) g(z) and the
diagonal restriction y = z = x yields C_r(f, g). Unitality forces every term
to differentiate both halves at least once, which the constructor enforces.
"""

from __future__ import annotations

import math

from .distributions import PointDistribution
from .errors import ConvergenceError, InputShapeError
from .jets import Jet, TruncationSpec, index_add, index_falling, index_le, jet_mul, truncate
from .operators import (NORMAL, FormalOperator, aux_xi_names, constant_part,
                        op_apply, op_compose)
from .scalars import Scalar, as_scalar


class StarProduct:
    """Bidifferential series f * g = fg + sum_r nu^r C_r(f, g)."""

    __slots__ = ("num_vars", "c_ops")

    def __init__(self, num_vars: int, c_ops):
        c_ops = tuple(c_ops)
        for r, op in enumerate(c_ops, start=1):
            if op.num_vars != 2 * num_vars:
                raise InputShapeError(
                    f"C_{r} must act on {2 * num_vars} doubled-chart variables")
            if op.ordering != NORMAL:
                raise InputShapeError(f"C_{r} must be given in normal ordering")
            for (a, _alpha, beta) in op.terms:
                if a != 0:
                    raise InputShapeError(f"C_{r} must be nu-free")
                if not any(beta[:num_vars]) or not any(beta[num_vars:]):
                    raise InputShapeError(
                        f"C_{r} has a term not differentiating both arguments; "
                        "the star product would not be unital")
        self.num_vars = num_vars
        self.c_ops = c_ops

    def order(self) -> int:
        """Highest r for which C_r data is available."""
        return len(self.c_ops)


def moyal_star(pi, N: int) -> StarProduct:
    """The constant-Poisson star product with C_r = P^r / r!.

    ``pi`` is the n x n coefficient matrix; P is the doubled-chart operator
    sum pi^{ij} d_{y_i} d_{z_j}. Skew nondegenerate pi yields the Moyal-Weyl
    product; any constant matrix is accepted.
    """
    pi = [[as_scalar(v) for v in row] for row in pi]
    n = len(pi)
    if any(len(row) != n for row in pi):
        raise InputShapeError("pi must be a square matrix")
    zeros = (0,) * (2 * n)
    p_terms = {}
    for i in range(n):
        for j in range(n):
            if pi[i][j]:
                beta = [0] * (2 * n)
                beta[i] += 1
                beta[n + j] += 1
                p_terms[(0, zeros, tuple(beta))] = pi[i][j]
    p_op = FormalOperator(2 * n, p_terms)
    c_ops = []
    power = FormalOperator.identity(2 * n)
    for r in range(1, N + 1):
        power = op_compose(power, p_op) / r
        c_ops.append(power)
    return StarProduct(n, c_ops)


def _tensor(f: Jet, g: Jet) -> Jet:
    """f(y) g(z) on the doubled chart, sharing aux parameters."""
    n = f.num_vars
    out = {}
    for (a, alpha, mu), cf in f.terms.items():
        for (b, gamma, eta), cg in g.terms.items():
            key = (a + b, alpha + gamma, index_add(mu, eta))
            contrib = cf * cg
            prev = out.get(key)
            out[key] = contrib if prev is None else prev + contrib
    return Jet(2 * n, out, f.aux_names)


def _diagonal(f2: Jet, n: int) -> Jet:
    """Restrict a doubled-chart jet to the diagonal y = z = x."""
    out = {}
    for (a, alpha, mu), c in f2.terms.items():
        key = (a, index_add(alpha[:n], alpha[n:]), mu)
        prev = out.get(key)
        out[key] = c if prev is None else prev + c
    return Jet(n, out, f2.aux_names)


def _star_terms(S: StarProduct, f: Jet, g: Jet, orders) -> Jet:
    if f.num_vars != S.num_vars or g.num_vars != S.num_vars:
        raise InputShapeError("jets do not live on the star product's chart")
    if f.aux_names != g.aux_names:
        raise InputShapeError("star factors must carry identical aux parameters")
    n = S.num_vars
    f2 = _tensor(f, g)
    result = _diagonal(f2, n)
    for r in orders:
        applied = op_apply(S.c_ops[r - 1], f2)
        if applied:
            shifted = Jet(n * 2, {(a + r, alpha, mu): c
                                  for (a, alpha, mu), c in applied.terms.items()},
                          applied.aux_names)
            result = result + _diagonal(shifted, n)
    return result


def star_multiply(S: StarProduct, f: Jet, g: Jet, N: int) -> Jet:
    """fg + sum_{r<=N} nu^r C_r(f, g), exact modulo nu^(N+1) for regular jets."""
    return _star_terms(S, f, g, range(1, min(N, S.order()) + 1))


def star_multiply_full(S: StarProduct, f: Jet, g: Jet) -> Jet:
    """Star product using every available C_r."""
    return _star_terms(S, f, g, range(1, S.order() + 1))


def is_natural_star(S: StarProduct, N: int) -> bool:
    """True when every C_r with r <= N has order <= r in both arguments."""
    n = S.num_vars
    for r in range(1, min(N, S.order()) + 1):
        for (_a, _alpha, beta) in S.c_ops[r - 1].terms:
            if sum(beta[:n]) > r or sum(beta[n:]) > r:
                return False
    return True


def two_point_distribution(S: StarProduct, N: int) -> PointDistribution:
    """The distribution (f tensor g) -> (f * g)(0) on the doubled chart.

    Coefficients of each C_r are frozen at the origin; feeding the result to
    the oscillatory test realizes the naturalness criterion.
    """
    n2 = 2 * S.num_vars
    terms = {(0, (0,) * n2): Scalar(1)}
    for r in range(1, min(N, S.order()) + 1):
        frozen = constant_part(S.c_ops[r - 1])
        for (_a, _alpha, beta), c in frozen.terms.items():
            key = (r, beta)
            terms[key] = terms.get(key, Scalar(0)) + c
    return PointDistribution(n2, terms)


def star_exponential(S: StarProduct, f: Jet, trunc: TruncationSpec) -> Jet:
    """exp_* f = 1 + f + (f * f)/2 + ... for f in the pronilpotent class.

    Every term of f must have nu exponent >= -1 and positive degree under the
    truncation grading (in practice: positive aux degree), so the star powers
    escape to high degree and the series is finite modulo the truncation.
    """
    low = f.lowest_nu()
    if low is not None and low < -1:
        raise ConvergenceError("star_exponential needs nu exponents >= -1")
    g = trunc.grading
    for (nu, alpha, mu) in f.terms:
        if g.jet_degree(nu, alpha, f.aux_names, mu) < 1:
            raise ConvergenceError(
                "star_exponential needs every term of positive filtration degree")
    acc = Jet.one(f.num_vars, f.aux_names)
    power = acc
    for k in range(1, trunc.max_degree + 1):
        power = truncate(star_multiply_full(S, power, f), trunc) / k
        if not power:
            break
        acc = acc + power
    return acc


def left_mult_symbol(S: StarProduct, f: Jet, N: int) -> Jet:
    """Full symbol of the left star multiplication operator L_f.

    Each C_r term differentiating the right slot k times contributes
    nu^(r-k) xi^k against the derivatives it takes of f; a natural star
    product at orders <= N therefore produces no negative powers of nu.
    """
    if f.aux_names:
        raise InputShapeError("left_mult_symbol expects an aux-free jet")
    low = f.lowest_nu()
    if low is not None and low < 0:
        raise InputShapeError("left_mult_symbol expects a nu-regular jet")
    n = S.num_vars
    xi = aux_xi_names(n)
    out = {}
    for (a, alpha, _aux), c in f.terms.items():
        out[(a, alpha, (0,) * n)] = c
    for r in range(1, min(N, S.order()) + 1):
        for (_a, alpha2, beta2), c in S.c_ops[r - 1].terms.items():
            beta_y, beta_z = beta2[:n], beta2[n:]
            x_part = index_add(alpha2[:n], alpha2[n:])
            for (af, gamma, _aux), cf in f.terms.items():
                if not index_le(beta_y, gamma):
                    continue
                weight = index_falling(gamma, beta_y)
                nu = af + r - sum(beta_z)
                key = (nu,
                       index_add(x_part, tuple(ge - be for ge, be in zip(gamma, beta_y))),
                       beta_z)
                contrib = c * cf * weight
                prev = out.get(key)
                out[key] = contrib if prev is None else prev + contrib
    return Jet(n, out, xi)

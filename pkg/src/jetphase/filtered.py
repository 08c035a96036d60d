"""Pronilpotent group calculus on formal operators.

Exponentials and logarithms converge filtration-adically once every term has
positive degree, and any group element factors uniquely through a pair of
complementary subalgebras. The three splits used downstream are all diagonal
on single terms in the right ordering:

* multiplication vs. annihilating-constants (normal form),
* vanishing-at-0 coefficients vs. constant coefficients (normal form),
* derivative-led vs. multiplication (anti-normal form).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import ConvergenceError, InputShapeError, SplitOrderingError
from .jets import GradingContext, TruncationSpec
from .operators import ANTI, NORMAL, FormalOperator, op_compose, reorder
from .scalars import Scalar


@dataclass(frozen=True)
class SplitSpec:
    """Complementary term-level projections g = a + b, diagonal in `ordering`.

    ``left_selector`` picks the a-part (the left factor of the factorization)
    from a term key ``(nu, alpha, beta)`` expressed in ``ordering``.
    """

    name: str
    ordering: str
    left_selector: Callable[[tuple], bool]

    def project(self, A: FormalOperator):
        """Split A into (a_part, b_part), both returned in normal ordering."""
        if self.ordering not in (NORMAL, ANTI):
            raise SplitOrderingError(f"split {self.name} uses unknown ordering")
        w = reorder(A, self.ordering)
        left = {}
        right = {}
        for key, c in w.terms.items():
            (left if self.left_selector(key) else right)[key] = c
        a_part = FormalOperator(A.num_vars, left, self.ordering)
        b_part = FormalOperator(A.num_vars, right, self.ordering)
        return reorder(a_part, NORMAL), reorder(b_part, NORMAL)


#: multiplication operators (left) vs. operators annihilating constants (right)
MULT_VS_ANNIH = SplitSpec("mult_vs_annih", NORMAL, lambda key: sum(key[2]) == 0)

#: coefficients vanishing at 0 (left) vs. constant coefficients (right)
DELTAKER_VS_CONST = SplitSpec("deltaker_vs_const", NORMAL, lambda key: sum(key[1]) >= 1)

#: derivative-led operators (left) vs. multiplication operators (right)
DIV_VS_MULT = SplitSpec("div_vs_mult", ANTI, lambda key: sum(key[2]) >= 1)

SPLITS = {s.name: s for s in (MULT_VS_ANNIH, DELTAKER_VS_CONST, DIV_VS_MULT)}


@dataclass(frozen=True)
class FiltrationSpec:
    """Admissibility filter for Lie-algebra elements: degree >= floor."""

    grading: GradingContext
    floor: int = 1


def _min_op_degree(A: FormalOperator, grading: GradingContext):
    return min((grading.op_degree(*key) for key in A.terms), default=None)


def _check_admissible(G: FormalOperator, filt: FiltrationSpec, what: str):
    floor = max(filt.floor, 1)
    for key in G.terms:
        if filt.grading.op_degree(*key) < floor:
            raise ConvergenceError(
                f"{what}: term of degree {filt.grading.op_degree(*key)} below "
                f"filtration floor {floor}")


def op_exp(G: FormalOperator, filt: FiltrationSpec, trunc: TruncationSpec) -> FormalOperator:
    """Group exponential 1 + G + G^2/2 + ..., exact modulo the truncation."""
    if G.ordering != NORMAL:
        raise InputShapeError("op_exp needs a normal-ordered operator")
    _check_admissible(G, filt, "op_exp")
    acc = FormalOperator.identity(G.num_vars)
    power = acc
    for k in range(1, trunc.max_degree + 1):
        power = op_compose(power, G, trunc) / k
        if not power:
            break
        acc = acc + power
    if power and op_compose(power, G, trunc):
        # only reachable when the filtration grading disagrees with trunc
        raise ConvergenceError("op_exp series did not terminate at the truncation order")
    return acc


def op_log(g: FormalOperator, filt: FiltrationSpec, trunc: TruncationSpec) -> FormalOperator:
    """Group logarithm, inverse to op_exp; requires g = 1 + (degree >= 1)."""
    if g.ordering != NORMAL:
        raise InputShapeError("op_log needs a normal-ordered operator")
    h = g - FormalOperator.identity(g.num_vars)
    for key in h.terms:
        if filt.grading.op_degree(*key) < 1:
            raise ConvergenceError(
                "op_log needs leading part 1 and all other terms of degree >= 1")
    acc = FormalOperator.zero(g.num_vars)
    power = FormalOperator.identity(g.num_vars)
    for k in range(1, trunc.max_degree + 1):
        power = op_compose(power, h, trunc)
        if not power:
            break
        acc = acc + power * Scalar(Fraction((-1) ** (k + 1), k))
    if power and op_compose(power, h, trunc):
        raise ConvergenceError("op_log series did not terminate at the truncation order")
    return acc


def factorize(g: FormalOperator, split: SplitSpec, filt: FiltrationSpec,
              trunc: TruncationSpec, on_iteration=None):
    """Factor a group element uniquely as g = a o b along a split.

    Iterates gamma_{i+1} = log(exp(-alpha_i) exp(gamma_i) exp(-beta_i)) where
    gamma_i = alpha_i + beta_i is the split of the current residual. Each pass
    at least doubles the residual's filtration degree, which is checked and,
    combined with truncation, bounds the loop structurally. ``on_iteration``
    (if given) receives (i, degree of gamma_i) per pass.

    Returns (a, b) with a in exp of the split's left part and b in exp of the
    right part; op_compose(a, b) reproduces g modulo the truncation.
    """
    a_factors = []
    b_factors = []
    g_i = g
    i = 0
    while True:
        gamma_i = op_log(g_i, filt, trunc)
        if not gamma_i:
            break
        degree = _min_op_degree(gamma_i, filt.grading)
        if degree < 2 ** i:
            raise ConvergenceError(
                f"factorize: residual degree {degree} at pass {i} violates the "
                f"doubling invariant (expected >= {2 ** i})")
        if on_iteration is not None:
            on_iteration(i, degree)
        alpha_i, beta_i = split.project(gamma_i)
        if alpha_i:
            a_factors.append(op_exp(alpha_i, filt, trunc))
        if beta_i:
            b_factors.insert(0, op_exp(beta_i, filt, trunc))
        if not alpha_i or not beta_i:
            break  # the residual sits entirely in one side; nothing left to peel
        g_i = op_compose(op_exp(-alpha_i, filt, trunc), g_i, trunc)
        g_i = op_compose(g_i, op_exp(-beta_i, filt, trunc), trunc)
        i += 1
    a = FormalOperator.identity(g.num_vars)
    for factor in a_factors:
        a = op_compose(a, factor, trunc)
    b = FormalOperator.identity(g.num_vars)
    for factor in b_factors:
        b = op_compose(b, factor, trunc)
    return a, b


#: termination measures for conjugate: the named index norm must strictly drop
MEASURE_DX = "dx"
MEASURE_X = "x"


def conjugate(P: FormalOperator, A: FormalOperator, trunc=None,
              measure: str = MEASURE_DX) -> FormalOperator:
    """The automorphism e^{ad P} applied to A as a locally finite sum.

    Termination is not a truncation effect: each application of ad(P) must
    strictly lower the chosen per-term measure (max |beta| for ``"dx"``, the
    right choice for quadratic multiplication operators like nu^-1 psi; max
    |alpha| for ``"x"``, the right choice for constant-coefficient order-2
    operators like nu Delta). A non-decreasing measure raises ConvergenceError.
    """
    if measure == MEASURE_DX:
        pick = lambda key: sum(key[2])
    elif measure == MEASURE_X:
        pick = lambda key: sum(key[1])
    else:
        raise InputShapeError(f"unknown conjugation measure {measure!r}")

    def level(op):
        return max((pick(key) for key in op.terms), default=-1)

    acc = A
    term = A
    current = level(A)
    k = 0
    while term:
        k += 1
        term = (op_compose(P, term, trunc) - op_compose(term, P, trunc)) / k
        if not term:
            break
        nxt = level(term)
        if nxt >= current:
            raise ConvergenceError(
                f"conjugate: measure {measure!r} did not decrease "
                f"({current} -> {nxt}); series would not terminate")
        current = nxt
        acc = acc + term
    return acc

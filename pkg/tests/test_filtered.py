import random
from fractions import Fraction

import pytest

from jetphase.errors import ConvergenceError
from jetphase.filtered import (DELTAKER_VS_CONST, DIV_VS_MULT, MULT_VS_ANNIH,
                               FiltrationSpec, conjugate, factorize, op_exp,
                               op_log)
from jetphase.jets import NU, STANDARD, Jet, TruncationSpec
from jetphase.operators import FormalOperator, classify, op_apply, op_compose

from conftest import random_natural_operator, small_fraction

NU_FILT = FiltrationSpec(NU, 1)


def op(n, terms):
    return FormalOperator(n, terms)


# -- exp / log -----------------------------------------------------------------

def test_op_exp_basic():
    nd = FormalOperator.monomial(1, 1, nu=1, dx=(1,))
    got = op_exp(nd, NU_FILT, TruncationSpec(NU, 2))
    assert got == op(1, {(0, (0,), (0,)): 1, (1, (0,), (1,)): 1,
                         (2, (0,), (2,)): Fraction(1, 2)})


def test_op_exp_zero():
    assert op_exp(FormalOperator.zero(1), NU_FILT,
                  TruncationSpec(NU, 4)) == FormalOperator.identity(1)


def test_op_exp_rejects_degree_zero():
    d = FormalOperator.monomial(1, 1, dx=(1,))
    with pytest.raises(ConvergenceError):
        op_exp(d, NU_FILT, TruncationSpec(NU, 3))


def test_op_log_basic():
    g = op(1, {(0, (0,), (0,)): 1, (1, (0,), (1,)): 1})
    got = op_log(g, NU_FILT, TruncationSpec(NU, 2))
    assert got == op(1, {(1, (0,), (1,)): 1, (2, (0,), (2,)): Fraction(-1, 2)})


def test_op_log_inverts_exp():
    g0 = FormalOperator.monomial(1, 1, nu=2, dx=(2,))
    trunc = TruncationSpec(NU, 5)
    assert op_log(op_exp(g0, NU_FILT, trunc), NU_FILT, trunc) == g0


def test_op_log_rejects_wrong_unit():
    with pytest.raises(ConvergenceError):
        op_log(FormalOperator.identity(1) * 2, NU_FILT, TruncationSpec(NU, 3))


def test_lemma_degree_correspondence():
    # exp(gamma) - 1 sits in filtration degree i exactly when gamma does
    gamma = FormalOperator.monomial(1, 1, nu=3, dx=(1,))
    g = op_exp(gamma, NU_FILT, TruncationSpec(NU, 7))
    h = g - FormalOperator.identity(1)
    assert min(key[0] for key in h.terms) == 3


# -- factorization ---------------------------------------------------------------

def test_factorize_mult_vs_annih_example():
    # g = exp(nu x + nu d) -> a = exp(nu x + nu^2/2), b = exp(nu d);
    # the central nu^2/2 comes from [nu x, nu d] = -nu^2
    trunc = TruncationSpec(NU, 2)
    gamma = op(1, {(1, (1,), (0,)): 1, (1, (0,), (1,)): 1})
    g = op_exp(gamma, NU_FILT, trunc)
    a, b = factorize(g, MULT_VS_ANNIH, NU_FILT, trunc)
    expected_a = op_exp(op(1, {(1, (1,), (0,)): 1, (2, (0,), (0,)): Fraction(1, 2)}),
                        NU_FILT, trunc)
    expected_b = op_exp(op(1, {(1, (0,), (1,)): 1}), NU_FILT, trunc)
    assert a == expected_a
    assert b == expected_b
    assert op_compose(a, b, trunc) == g


def test_factorize_pure_sides():
    trunc = TruncationSpec(NU, 3)
    g = op_exp(op(1, {(1, (1,), (0,)): 1}), NU_FILT, trunc)
    a, b = factorize(g, MULT_VS_ANNIH, NU_FILT, trunc)
    assert a == g and b == FormalOperator.identity(1)

    g2 = op_exp(op(1, {(1, (0,), (2,)): 1}), NU_FILT, trunc)
    a2, b2 = factorize(g2, DELTAKER_VS_CONST, NU_FILT, trunc)
    assert a2 == FormalOperator.identity(1) and b2 == g2


def _random_admissible_gamma(rng, n, max_degree):
    terms = {}
    for _ in range(4):
        nu = rng.randint(1, max_degree)
        alpha = [0] * n
        beta = [0] * n
        for _ in range(rng.randint(0, 2)):
            alpha[rng.randrange(n)] += 1
        for _ in range(rng.randint(0, 2)):
            beta[rng.randrange(n)] += 1
        c = small_fraction(rng)
        if c:
            key = (nu, tuple(alpha), tuple(beta))
            terms[key] = terms.get(key, 0) + c
    return FormalOperator(n, {k: v for k, v in terms.items() if v})


@pytest.mark.parametrize("split", [MULT_VS_ANNIH, DELTAKER_VS_CONST, DIV_VS_MULT],
                         ids=lambda s: s.name)
def test_factorize_reconstruction_and_idempotence(split):
    rng = random.Random(17)
    trunc = TruncationSpec(NU, 6)
    for _ in range(12):
        n = rng.choice([1, 2])
        gamma = _random_admissible_gamma(rng, n, 6)
        g = op_exp(gamma, NU_FILT, trunc)
        degrees = []
        a, b = factorize(g, split, NU_FILT, trunc,
                         on_iteration=lambda i, d: degrees.append((i, d)))
        assert op_compose(a, b, trunc) == g
        for i, d in degrees:
            assert d >= 2 ** i
        # re-factorizing the recomposition returns the same pair
        a2, b2 = factorize(op_compose(a, b, trunc), split, NU_FILT, trunc)
        assert a2 == a and b2 == b


def test_factorize_split_membership():
    rng = random.Random(18)
    trunc = TruncationSpec(NU, 5)
    gamma = _random_admissible_gamma(rng, 2, 5)
    g = op_exp(gamma, NU_FILT, trunc)

    a, b = factorize(g, MULT_VS_ANNIH, NU_FILT, trunc)
    loga = op_log(a, NU_FILT, trunc)
    assert all(not any(key[2]) for key in loga.terms)  # multiplication side
    logb = op_log(b, NU_FILT, trunc)
    assert all(any(key[2]) for key in logb.terms)      # annihilates constants

    a, b = factorize(g, DELTAKER_VS_CONST, NU_FILT, trunc)
    logb = op_log(b, NU_FILT, trunc)
    assert all(not any(key[1]) for key in logb.terms)  # constant coefficients


# -- conjugation -----------------------------------------------------------------

def test_conjugate_gaussian_identity():
    # e^{-ad(nu Delta)}(x) = x + nu d for Delta = -d^2/2 on one variable
    delta = FormalOperator.monomial(1, Fraction(-1, 2), dx=(2,))
    p = FormalOperator(1, {(1, (0,), (2,)): Fraction(1, 2)})  # -nu Delta
    x = FormalOperator.monomial(1, 1, x=(1,))
    got = conjugate(p, x, measure="x")
    assert got == op(1, {(0, (1,), (0,)): 1, (1, (0,), (1,)): 1})


def test_conjugate_quadratic_phase():
    # ad(nu^-1 x^2/2)(d) = -nu^-1 x and the series stops there
    p = FormalOperator(1, {(-1, (2,), (0,)): Fraction(1, 2)})
    d = FormalOperator.monomial(1, 1, dx=(1,))
    got = conjugate(p, d, measure="dx")
    assert got == op(1, {(0, (0,), (1,)): 1, (-1, (1,), (0,)): -1})


def test_conjugate_fixes_unit():
    p = FormalOperator(1, {(-1, (2,), (0,)): Fraction(1, 2)})
    assert conjugate(p, FormalOperator.identity(1), measure="dx") \
        == FormalOperator.identity(1)


def test_conjugate_is_automorphism():
    rng = random.Random(19)
    p = FormalOperator(2, {(-1, (2, 0), (0, 0)): Fraction(1, 2),
                           (-1, (1, 1), (0, 0)): 1})
    trunc = TruncationSpec(STANDARD, 8)
    for _ in range(10):
        a = random_natural_operator(rng, 2)
        b = random_natural_operator(rng, 2)
        lhs = conjugate(p, op_compose(a, b, trunc), trunc, measure="dx")
        rhs = op_compose(conjugate(p, a, trunc, measure="dx"),
                         conjugate(p, b, trunc, measure="dx"), trunc)
        assert lhs == rhs


def test_conjugate_preserves_naturalness():
    rng = random.Random(20)
    psi_op = FormalOperator(1, {(-1, (2,), (0,)): Fraction(1, 2)})
    delta_op = FormalOperator(1, {(1, (0,), (2,)): Fraction(-1, 2)})
    for _ in range(10):
        a = random_natural_operator(rng, 1)
        assert classify(conjugate(psi_op, a, measure="dx")).is_natural
        assert classify(conjugate(delta_op, a, measure="x")).is_natural


def test_conjugate_rejects_nondecreasing_measure():
    # ad(d) against x never lowers the derivative order
    d = FormalOperator.monomial(1, 1, dx=(1,))
    x = FormalOperator.monomial(1, 1, x=(2,))
    with pytest.raises(ConvergenceError):
        conjugate(d, x, measure="dx")

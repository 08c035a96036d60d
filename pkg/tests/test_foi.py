import random
from fractions import Fraction

import pytest

from jetphase.distributions import (PointDistribution, apply_distribution,
                                    distribution_from_operator,
                                    is_nondegenerate, is_oscillatory)
from jetphase.errors import (DegenerateCriticalPointError, NondegeneracyError,
                             NotCriticalError, PreconditionError)
from jetphase.filtered import FiltrationSpec, op_exp
from jetphase.foi import (PhaseDensityPair, VectorField, check_foi_axiom,
                          check_strong, divergence, foi_distribution,
                          hessian_data, phase_remainder, recover_phase)
from jetphase.jets import (NU, STANDARD, Jet, TruncationSpec, graded_component,
                           jet_mul)
from jetphase.operators import FormalOperator
from jetphase.scalars import Scalar

from conftest import random_gaussian_x, random_jet


def pair_of(phase_terms, u_terms=None, n=1):
    phase = Jet(n, phase_terms)
    u = Jet(n, u_terms or {})
    return PhaseDensityPair(phase, u)


GAUSS = pair_of({(-1, (2,), ()): Fraction(1, 2)})
CUBIC = pair_of({(-1, (2,), ()): Fraction(1, 2), (-1, (3,), ()): 1})


def double_factorial(k):
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


# -- Hessian and remainder ------------------------------------------------------

def test_hessian_gaussian():
    hd = hessian_data(GAUSS)
    assert hd.h_lower == ((Scalar(1),),)
    assert hd.psi == Jet(1, {(0, (2,), ()): Fraction(1, 2)})
    assert hd.delta_op == FormalOperator(1, {(0, (0,), (2,)): Fraction(-1, 2)})


def test_hessian_mixed():
    p = pair_of({(-1, (1, 1), ()): 1}, n=2)
    hd = hessian_data(p)
    assert hd.h_lower == ((Scalar(0), Scalar(1)), (Scalar(1), Scalar(0)))
    assert hd.delta_op == FormalOperator(2, {(0, (0, 0), (1, 1)): -1})


def test_hessian_errors():
    with pytest.raises(DegenerateCriticalPointError):
        hessian_data(pair_of({(-1, (3,), ()): 1}))
    with pytest.raises(NotCriticalError):
        hessian_data(pair_of({(-1, (0,), ()): 1, (-1, (2,), ()): 1}))
    with pytest.raises(NotCriticalError):
        hessian_data(pair_of({(-1, (1,), ()): 1, (-1, (2,), ()): 1}))


def test_phase_remainder_subtracts_normalizations():
    p = pair_of({(-1, (2,), ()): Fraction(1, 2), (-1, (3,), ()): 1,
                 (0, (0,), ()): 5})
    assert phase_remainder(p) == Jet(1, {(-1, (3,), ()): 1})
    assert phase_remainder(GAUSS) == Jet.zero(1)
    withu = pair_of({(-1, (2,), ()): Fraction(1, 2)}, {(0, (1,), ()): 1})
    assert phase_remainder(withu) == Jet(1, {(0, (1,), ()): 1})


def test_phase_remainder_has_positive_standard_degree():
    p = pair_of({(-1, (2,), ()): Fraction(1, 2), (-1, (4,), ()): 2,
                 (0, (2,), ()): 1, (1, (0,), ()): 3})
    chi = phase_remainder(p)
    for (nu, alpha, _aux) in chi.terms:
        assert 2 * nu + sum(alpha) >= 1


# -- the stationary-phase distribution --------------------------------------------

def test_gaussian_moments():
    L = foi_distribution(GAUSS, 6)
    for k in range(7):
        even = apply_distribution(L, Jet(1, {(0, (2 * k,), ()): 1}), 6)
        expect = Jet(1, {(k, (0,), ()): (-1) ** k * double_factorial(2 * k - 1)}) \
            if k else Jet.one(1)
        assert even == expect
        assert not apply_distribution(L, Jet(1, {(0, (2 * k + 1,), ()): 1}), 6)


def test_cubic_phase_corrections():
    # frozen from the pre-build enumeration oracle
    L = foi_distribution(CUBIC, 3)
    got = apply_distribution(L, Jet.one(1), 3)
    assert got == Jet(1, {(0, (0,), ()): 1,
                          (1, (0,), ()): Fraction(-15, 2),
                          (2, (0,), ()): Fraction(3465, 8),
                          (3, (0,), ()): Fraction(-765765, 16)})


def test_unit_normalization():
    rng = random.Random(37)
    for _ in range(5):
        phase = {(-1, (2,), ()): Fraction(1, 2)}
        for key, c in random_jet(rng, 1, nu_range=(0, 2)).terms.items():
            if sum(key[1]) >= 1:
                phase[(key[0], key[1], ())] = c
        p = pair_of(phase)
        L = foi_distribution(p, 3)
        assert apply_distribution(L, Jet.one(1), 0) == Jet.one(1)


def test_two_variable_gaussian():
    p = pair_of({(-1, (1, 1), ()): 1}, n=2)
    L = foi_distribution(p, 2)
    # h = [[0,1],[1,0]] gives Delta = -d1 d2, so Lambda(x1 x2) = -nu
    f = Jet(2, {(0, (1, 1), ()): 1})
    assert apply_distribution(L, f, 2) == Jet(2, {(1, (0, 0), ()): -1})


# -- divergence -------------------------------------------------------------------

def test_divergence_examples():
    euler = VectorField((Jet.variable(1, 0),))
    assert divergence(euler, GAUSS) == Jet.one(1)
    const = VectorField((Jet.one(1),))
    with_u = pair_of({(-1, (2,), ()): Fraction(1, 2)}, {(0, (2,), ()): 1})
    assert divergence(const, with_u) == Jet(1, {(0, (1,), ()): 2})
    assert divergence(const, GAUSS) == Jet.zero(1)


# -- axiom defects -----------------------------------------------------------------

def test_axiom_gaussian_translation():
    L = foi_distribution(GAUSS, 4)
    v = VectorField((Jet.one(1),))
    f = Jet.variable(1, 0)
    assert not check_foi_axiom(L, GAUSS, v, f, 4)


def test_axiom_gaussian_euler():
    L = foi_distribution(GAUSS, 4)
    v = VectorField((Jet.variable(1, 0),))
    assert not check_foi_axiom(L, GAUSS, v, Jet.one(1), 4)


def test_axiom_detects_corruption():
    L = foi_distribution(CUBIC, 4)
    broken = PointDistribution(1, {k: (-c if k[0] == 1 else c)
                                   for k, c in L.terms.items()})
    v = VectorField((Jet.one(1),))
    f = Jet.variable(1, 0)
    assert check_foi_axiom(broken, CUBIC, v, f, 4)


def test_axiom_suite_random():
    rng = random.Random(41)
    pairs = [GAUSS, CUBIC,
             pair_of({(-1, (2,), ()): Fraction(1, 2)}, {(0, (1,), ()): 1}),
             pair_of({(-1, (1, 1), ()): 1, (-1, (3, 0), ()): Fraction(1, 3)}, n=2)]
    for p in pairs:
        n = p.num_vars
        L = foi_distribution(p, 4)
        for _ in range(6):
            v = VectorField(tuple(random_jet(rng, n, max_x_degree=2,
                                             nu_range=(0, 1), terms=2)
                                  for _ in range(n)))
            f = random_jet(rng, n, max_x_degree=3, nu_range=(0, 1), terms=3)
            assert not check_foi_axiom(L, p, v, f, 4)


def test_strong_gaussian():
    L = foi_distribution(GAUSS, 5)
    assert not check_strong(L, GAUSS, Jet.one(1), 5)
    assert not check_strong(L, GAUSS, Jet(1, {(0, (2,), ()): 1}), 5)


def test_strong_suite_random():
    rng = random.Random(43)
    pairs = [GAUSS, CUBIC,
             pair_of({(-1, (2,), ()): Fraction(1, 2), (1, (1,), ()): 1},
                     {(0, (1,), ()): Fraction(1, 2)})]
    for p in pairs:
        L = foi_distribution(p, 5)
        for _ in range(5):
            f = random_jet(rng, p.num_vars, max_x_degree=3, nu_range=(0, 1),
                           terms=3)
            assert not check_strong(L, p, f, 5)


def test_strong_detects_corruption():
    L = foi_distribution(GAUSS, 4)
    broken = PointDistribution(1, {k: (-c if k[0] == 1 else c)
                                   for k, c in L.terms.items()})
    assert check_strong(broken, GAUSS, Jet(1, {(0, (2,), ()): 1}), 4)


def test_gauge_invariance():
    # moving a regular w from the phase into the density exponent is invisible
    rng = random.Random(47)
    for _ in range(5):
        w = random_jet(rng, 1, max_x_degree=3, nu_range=(0, 2), terms=3)
        w = w - Jet.constant(1, w.coefficient(0, (0,)))
        base = {(-1, (2,), ()): Fraction(1, 2), (-1, (3,), ()): 1}
        p1 = pair_of(base)
        phase2 = Jet(1, base) + w
        p2 = PhaseDensityPair(phase2, -w)
        assert foi_distribution(p1, 4) == foi_distribution(p2, 4)


# -- recovery ---------------------------------------------------------------------

def test_recover_gaussian_fixed_point():
    L = foi_distribution(GAUSS, 4)
    rec = recover_phase(L, 4)
    assert rec.phase == GAUSS.phase
    assert not rec.density_exponent
    assert foi_distribution(rec, 4) == L


def test_recover_cubic():
    N = 5
    L = foi_distribution(CUBIC, N)
    rec = recover_phase(L, N)
    # the round trip is the binding contract
    assert foi_distribution(rec, N) == L
    # below the information horizon the remainder is the true nu^-1 x^3
    chi = phase_remainder(rec)
    true_chi = Jet(1, {(-1, (3,), ()): 1})
    for d in range(N):
        assert graded_component(chi, STANDARD, d) \
            == graded_component(true_chi, STANDARD, d)


def test_recover_requires_oscillatory():
    bad = PointDistribution(1, {(0, (0,)): 1, (1, (3,)): 1})
    with pytest.raises(PreconditionError):
        recover_phase(bad, 2)


def test_recover_requires_nondegenerate():
    L = PointDistribution(1, {(0, (0,)): 1, (1, (1,)): 1})
    with pytest.raises(NondegeneracyError):
        recover_phase(L, 2)


def test_recover_round_trip_random():
    rng = random.Random(53)
    filt = FiltrationSpec(NU, 1)
    for n in (1, 2):
        for _ in range(4):
            X = random_gaussian_x(rng, n, 5)
            nu_inv = FormalOperator(n, {(a - 1, al, b): c
                                        for (a, al, b), c in X.terms.items()})
            g = op_exp(nu_inv, filt, TruncationSpec(NU, 5))
            L = distribution_from_operator(g)
            rec = recover_phase(L, 5)
            assert foi_distribution(rec, 5) == L


def test_foi_output_is_nondegenerate_oscillatory():
    rng = random.Random(59)
    pairs = [GAUSS, CUBIC,
             pair_of({(-1, (1, 1), ()): 1, (0, (1, 0), ()): 1}, n=2)]
    for p in pairs:
        L = foi_distribution(p, 4)
        assert is_oscillatory(L, 4)[0]
        assert is_nondegenerate(L)

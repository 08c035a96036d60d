"""Shared builders and seeded corpora for the test suite."""

from fractions import Fraction

from jetphase import (FormalOperator, Jet, Scalar, mat_det)


def xj(n, i):
    """The coordinate jet x^(i+1) on n variables."""
    return Jet.variable(n, i)


def small_fraction(rng, span=3, max_den=4):
    num = rng.randint(-span, span)
    den = rng.randint(1, max_den)
    return Fraction(num, den)


def random_jet(rng, n, max_x_degree=3, nu_range=(0, 2), terms=4, aux_names=()):
    """A sparse random polynomial jet with small rational coefficients."""
    out = {}
    zaux = (0,) * len(aux_names)
    for _ in range(terms):
        nu = rng.randint(*nu_range)
        alpha = [0] * n
        for _ in range(rng.randint(0, max_x_degree)):
            alpha[rng.randrange(n)] += 1
        c = small_fraction(rng)
        if c:
            key = (nu, tuple(alpha), zaux)
            out[key] = out.get(key, 0) + c
    return Jet(n, {k: v for k, v in out.items() if v}, aux_names)


def random_operator(rng, n, max_x=2, max_dx=2, nu_range=(0, 2), terms=4):
    out = {}
    for _ in range(terms):
        nu = rng.randint(*nu_range)
        alpha = [0] * n
        beta = [0] * n
        for _ in range(rng.randint(0, max_x)):
            alpha[rng.randrange(n)] += 1
        for _ in range(rng.randint(0, max_dx)):
            beta[rng.randrange(n)] += 1
        c = small_fraction(rng)
        if c:
            key = (nu, tuple(alpha), tuple(beta))
            out[key] = out.get(key, 0) + c
    return FormalOperator(n, {k: v for k, v in out.items() if v})


def random_natural_operator(rng, n, max_nu=3, terms=4):
    """Random operator with every term satisfying |beta| <= nu exponent."""
    out = {}
    for _ in range(terms):
        nu = rng.randint(0, max_nu)
        alpha = [0] * n
        beta = [0] * n
        for _ in range(rng.randint(0, 2)):
            alpha[rng.randrange(n)] += 1
        for _ in range(rng.randint(0, nu)):
            beta[rng.randrange(n)] += 1
        c = small_fraction(rng)
        if c:
            key = (nu, tuple(alpha), tuple(beta))
            out[key] = out.get(key, 0) + c
    return FormalOperator(n, {k: v for k, v in out.items() if v})


def second_order_part(X, n):
    """The symmetric matrix of the nu^2 second-order terms of X."""
    zeros = (0,) * n
    b = [[Scalar(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            idx = list(zeros)
            idx[i] += 1
            idx[j] += 1
            c = X.terms.get((2, zeros, tuple(idx)))
            if c is not None:
                v = c * 2 if i == j else c
                b[i][j] = v
                b[j][i] = v
    return b


def random_gaussian_x(rng, n, N, extra_terms=3):
    """Natural constant-coefficient X = nu^2 X_2 + ... + nu^N X_N with a
    nondegenerate second-order part (resampled until nondegenerate)."""
    zeros = (0,) * n
    while True:
        terms = {}
        for i in range(n):
            idx = list(zeros)
            idx[i] += 2
            terms[(2, zeros, tuple(idx))] = small_fraction(rng) + Fraction(
                rng.choice([1, -1]), 1)
        for _ in range(extra_terms):
            s = rng.randint(2, N)
            beta = [0] * n
            for _ in range(rng.randint(1, min(s + 1, s))):
                beta[rng.randrange(n)] += 1
            c = small_fraction(rng)
            key = (s, zeros, tuple(beta))
            if c:
                terms[key] = terms.get(key, 0) + c
        X = FormalOperator(n, {k: v for k, v in terms.items() if v})
        if mat_det(second_order_part(X, n)):
            return X


def random_diffeo(rng, n, max_degree=3):
    """Polynomial coordinate jets fixing 0 with invertible linear part."""
    while True:
        comps = []
        zeros = (0,) * n
        lin = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            terms = {}
            for j in range(n):
                c = small_fraction(rng, span=2, max_den=2)
                if i == j and not c:
                    c = Fraction(1)
                lin[i][j] = c
                if c:
                    alpha = list(zeros)
                    alpha[j] = 1
                    terms[(0, tuple(alpha), ())] = c
            for _ in range(2):
                deg = rng.randint(2, max_degree)
                alpha = [0] * n
                for _ in range(deg):
                    alpha[rng.randrange(n)] += 1
                c = small_fraction(rng, span=2, max_den=2)
                if c:
                    key = (0, tuple(alpha), ())
                    terms[key] = terms.get(key, 0) + c
            comps.append(Jet(n, {k: v for k, v in terms.items() if v}))
        if mat_det([[Scalar(v) for v in row] for row in lin]):
            return tuple(comps)

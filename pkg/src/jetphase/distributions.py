"""Point-supported formal distributions and the oscillatory test.

A ``PointDistribution`` stores Lambda(f) = sum c_{r,beta} nu^r (d^beta f)(0)
as a sparse map ``(r, beta) -> c`` with r >= 0. Equivalently it is
delta o D for the constant-coefficient operator D with the same terms, and
the oscillatory test reads D off directly, takes its commutative logarithm,
and checks the per-term order bound.
"""

from __future__ import annotations

from .errors import (InputShapeError, NotNuRegularError, PreconditionError,
                     SingularJacobianError)
from .jets import (NU, GradingContext, Jet, TruncationSpec, grlex_key,
                   index_factorial, indices_up_to, jet_log, jet_mul)
from .operators import NORMAL, FormalOperator
from .scalars import Scalar, as_scalar, mat_det

_X_ONLY = GradingContext(nu_weight=0, x_weight=1, d_weight=0)


class PointDistribution:
    """Formal distribution supported at the chart origin."""

    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars: int, terms=None):
        if num_vars < 1:
            raise InputShapeError("a distribution needs at least one chart variable")
        clean = {}
        for (r, beta), coeff in (terms or {}).items():
            if r < 0:
                raise NotNuRegularError(f"distribution term with nu^{r}")
            if len(beta) != num_vars or any(e < 0 for e in beta):
                raise InputShapeError(f"bad derivative index {beta} for n={num_vars}")
            coeff = as_scalar(coeff)
            if coeff:
                clean[(r, tuple(beta))] = coeff
        self.num_vars = num_vars
        self.terms = clean

    @classmethod
    def delta(cls, num_vars: int):
        return cls(num_vars, {(0, (0,) * num_vars): Scalar(1)})

    def nu_order(self):
        """Largest nu power present, or None for the zero distribution."""
        return max((r for r, _ in self.terms), default=None)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, PointDistribution):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return f"PointDistribution<{self.num_vars}>(0)"
        bits = []
        for (r, beta) in sorted(self.terms, key=lambda k: (k[0], grlex_key(k[1]))):
            c = self.terms[(r, beta)]
            mono = [f"nu^{r}"] if r else []
            mono.extend(f"d{i + 1}^{e}" for i, e in enumerate(beta) if e)
            bits.append(f"({c}){'*'.join(mono) if mono else ''}")
        return f"PointDistribution<{self.num_vars}>({' + '.join(bits)})"


def distribution_from_operator(A: FormalOperator, trunc=None) -> PointDistribution:
    """delta o A: keep the constant-coefficient part of A, coefficients at 0.

    Terms with nonconstant coefficients die at the origin; a surviving term
    with a negative nu exponent means the composite is not nu-regular.
    """
    if A.ordering != NORMAL:
        raise InputShapeError("distribution_from_operator needs normal ordering")
    out = {}
    for (a, alpha, beta), c in A.terms.items():
        if any(alpha):
            continue
        if a < 0:
            raise NotNuRegularError(
                f"term nu^{a} d^{beta} survives at x=0; distribution is not nu-regular")
        if trunc is not None and trunc.grading.op_degree(a, alpha, beta) > trunc.max_degree:
            continue
        out[(a, beta)] = out.get((a, beta), Scalar(0)) + c
    return PointDistribution(A.num_vars, out)


def apply_distribution(L: PointDistribution, f: Jet, N: int) -> Jet:
    """Lambda(f) as a scalar nu-series (x-free jet), keeping nu powers <= N.

    The result is exact modulo nu^(N+1) whenever L itself is complete to
    every order that can reach nu^N against f's Laurent part; callers manage
    that margin.
    """
    if L.num_vars != f.num_vars:
        raise InputShapeError("distribution and jet live on different charts")
    by_x = {}
    for (a, gamma, mu), cf in f.terms.items():
        by_x.setdefault(gamma, []).append((a, mu, cf))
    zeros = (0,) * f.num_vars
    out = {}
    for (r, beta), c in L.terms.items():
        hits = by_x.get(beta)
        if not hits:
            continue
        fact = index_factorial(beta)
        for a, mu, cf in hits:
            if r + a > N:
                continue
            key = (r + a, zeros, mu)
            contrib = c * cf * fact
            prev = out.get(key)
            out[key] = contrib if prev is None else prev + contrib
    return Jet(f.num_vars, out, f.aux_names)


def is_oscillatory(L: PointDistribution, N: int):
    """Total oscillatory test through order N.

    Returns (verdict, X). On a true verdict X is the constant-coefficient
    operator with Lambda = delta o exp(nu^-1 X) modulo nu^(N+1); on false, X
    is None. A distribution whose nu^0 part is not exactly delta is never
    oscillatory.
    """
    n = L.num_vars
    zeros = (0,) * n
    level0 = {beta: c for (r, beta), c in L.terms.items() if r == 0}
    if level0 != {zeros: Scalar(1)}:
        return False, None
    d_jet = Jet(n, {(r, beta, ()): c for (r, beta), c in L.terms.items() if r <= N})
    c_jet = jet_log(d_jet, TruncationSpec(NU, N))
    for (s, beta, _aux) in c_jet.terms:
        if sum(beta) > s + 1:
            return False, None
    x_terms = {(s + 1, zeros, beta): c for (s, beta, _aux), c in c_jet.terms.items()}
    return True, FormalOperator(n, x_terms, NORMAL)


class BetaForm:
    """The symmetric bilinear form b^{ij} = Lambda_1(x^i x^j)."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        self.matrix = tuple(tuple(as_scalar(v) for v in row) for row in matrix)

    def det(self) -> Scalar:
        return mat_det([list(row) for row in self.matrix])

    def __eq__(self, other):
        if not isinstance(other, BetaForm):
            return NotImplemented
        return self.matrix == other.matrix

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(str(v) for v in row) + "]"
                         for row in self.matrix)
        return f"BetaForm([{rows}])"


def beta_form(L: PointDistribution) -> BetaForm:
    """Lambda_1 evaluated on the quadratic monomials; needs an oscillatory L."""
    order = L.nu_order() or 1
    verdict, _ = is_oscillatory(L, order)
    if not verdict:
        raise PreconditionError("beta_form is defined only for oscillatory distributions")
    n = L.num_vars
    matrix = []
    for i in range(n):
        row = []
        for j in range(n):
            xi = Jet.variable(n, i)
            xj = Jet.variable(n, j)
            val = apply_distribution(L, jet_mul(xi, xj), 1)
            row.append(val.coefficient(1, (0,) * n))
        matrix.append(row)
    return BetaForm(matrix)


def is_nondegenerate(L: PointDistribution) -> bool:
    return bool(beta_form(L).det())


def pushforward_diffeo(L: PointDistribution, phi, trunc: TruncationSpec) -> PointDistribution:
    """Materialize f -> L(f o phi) on the monomial dual basis up to trunc.

    phi is a tuple of n nu-free jets fixing the origin with invertible linear
    part. At each nu level r, only derivative indices up to the maximal |beta|
    of L at that level can receive mass, which keeps the computation finite.
    """
    n = L.num_vars
    phi = list(phi)
    if len(phi) != n:
        raise InputShapeError(f"need {n} coordinate jets, got {len(phi)}")
    zeros = (0,) * n
    jac = [[Scalar(0)] * n for _ in range(n)]
    for i, p in enumerate(phi):
        if p.num_vars != n or p.aux_names:
            raise InputShapeError("coordinate jets must live on the same chart, aux-free")
        for (nu, alpha, _aux), c in p.terms.items():
            if nu != 0:
                raise InputShapeError("coordinate jets must be nu-free")
            if not any(alpha):
                raise InputShapeError("coordinate change must fix the origin")
            if sum(alpha) == 1:
                jac[i][alpha.index(1)] = c
    if not mat_det(jac):
        raise SingularJacobianError("coordinate change has singular linear part")

    by_level = {}
    for (r, beta), c in L.terms.items():
        by_level.setdefault(r, {})[beta] = c
    max_order = {r: max(sum(beta) for beta in lvl) for r, lvl in by_level.items()}
    cap = max(max_order.values(), default=0)
    x_trunc = TruncationSpec(_X_ONLY, cap)

    pow_cache = {zeros: Jet.one(n)}

    def phi_power(gamma):
        cached = pow_cache.get(gamma)
        if cached is not None:
            return cached
        i = next(k for k, e in enumerate(gamma) if e)
        prev = gamma[:i] + (gamma[i] - 1,) + gamma[i + 1:]
        value = jet_mul(phi_power(prev), phi[i], x_trunc)
        pow_cache[gamma] = value
        return value

    out = {}
    g = trunc.grading
    for r, level in by_level.items():
        for gamma in indices_up_to(n, max_order[r]):
            if g.op_degree(r, zeros, gamma) > trunc.max_degree:
                continue
            total = Scalar(0)
            power = phi_power(gamma)
            for beta, c in level.items():
                coeff = power.terms.get((0, beta, ()))
                if coeff is not None:
                    total = total + c * coeff * index_factorial(beta)
            if total:
                out[(r, gamma)] = total / index_factorial(gamma)
    return PointDistribution(n, out)

"""Formal oscillatory integrals: evaluation, axiom defects, phase recovery.

The central objects are phase-density pairs (phi, rho = e^u dx) whose leading
phase nu^-1 phi_{-1} has a nondegenerate critical point with zero value at the
chart origin. The associated normalized distribution is

    Lambda(f) = (e^{nu Delta} e^chi f)|_{x=0},

where psi is the quadratic part of phi_{-1}, Delta = -1/2 h^{ij} d_i d_j is
built from the inverse Hessian, and chi is the phase remainder. Under the
standard grading nu Delta is homogeneous of degree 0, so e^{nu Delta} acts on
each graded component as a finite sum and every coefficient below is exact.

Recovery runs the construction backwards: read X off the distribution, split
off the Gaussian part, conjugate by nu^-1 psi, and factor the result through
derivative-led times multiplication operators; the multiplication logarithm
is the phase remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .distributions import (PointDistribution, apply_distribution, beta_form,
                            is_oscillatory)
from .errors import (DegenerateCriticalPointError, InputShapeError,
                     NondegeneracyError, NotCriticalError, PreconditionError)
from .filtered import FiltrationSpec, conjugate, op_exp
from .jets import (NU, STANDARD, Jet, TruncationSpec, index_factorial,
                   index_falling, index_sub, indices_up_to, jet_derive,
                   jet_exp, jet_log, jet_mul, truncate)
from .operators import FormalOperator, op_apply
from .scalars import Scalar, mat_det, mat_inv


@dataclass(frozen=True)
class PhaseDensityPair:
    """Phase jet phi (nu exponents >= -1) and density exponent u (rho = e^u dx)."""

    phase: Jet
    density_exponent: Jet

    def __post_init__(self):
        phi, u = self.phase, self.density_exponent
        if phi.num_vars != u.num_vars:
            raise InputShapeError("phase and density exponent live on different charts")
        if phi.aux_names or u.aux_names:
            raise InputShapeError("phase-density data cannot carry aux parameters")
        low = phi.lowest_nu()
        if low is not None and low < -1:
            raise InputShapeError("phase may contain nu exponents >= -1 only")
        low_u = u.lowest_nu()
        if low_u is not None and low_u < 0:
            raise InputShapeError("density exponent must be nu-regular")

    @property
    def num_vars(self) -> int:
        return self.phase.num_vars


@dataclass(frozen=True)
class HessianData:
    """Exact Hessian package: h_{ij}, its inverse, psi, and Delta."""

    h_lower: tuple
    h_upper: tuple
    psi: Jet
    delta_op: FormalOperator


@dataclass(frozen=True)
class VectorField:
    """Derivation v = v^i d_i with nu-regular jet components."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise InputShapeError("a vector field needs at least one component")
        n = comps[0].num_vars
        if len(comps) != n:
            raise InputShapeError(f"expected {n} components, got {len(comps)}")
        for c in comps:
            if c.num_vars != n or c.aux_names:
                raise InputShapeError("vector field components must share the chart")
        object.__setattr__(self, "components", comps)

    @property
    def num_vars(self) -> int:
        return self.components[0].num_vars

    def apply(self, f: Jet) -> Jet:
        out = Jet.zero(f.num_vars, f.aux_names)
        for i, comp in enumerate(self.components):
            if comp.aux_names != f.aux_names:
                comp = comp.with_aux(f.aux_names)
            out = out + jet_mul(comp, jet_derive(f, i))
        return out


def _leading_phase(pair: PhaseDensityPair) -> Jet:
    """phi_{-1}: the nu^-1 coefficient of the phase, as an x-jet."""
    n = pair.num_vars
    terms = {(0, alpha, ()): c
             for (nu, alpha, _aux), c in pair.phase.terms.items() if nu == -1}
    return Jet(n, terms)


def hessian_data(pair: PhaseDensityPair) -> HessianData:
    """Validate the critical point and package h, psi, Delta exactly."""
    n = pair.num_vars
    lead = _leading_phase(pair)
    zeros = (0,) * n
    if lead.coefficient(0, zeros):
        raise NotCriticalError("phi_{-1}(0) != 0: critical value must vanish")
    for (nu, alpha, _aux) in lead.terms:
        if sum(alpha) == 1:
            raise NotCriticalError("d phi_{-1}(0) != 0: origin must be critical")
    h = [[Scalar(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            idx = list(zeros)
            idx[i] += 1
            idx[j] += 1
            c = lead.coefficient(0, tuple(idx))
            value = c * 2 if i == j else c
            h[i][j] = value
            h[j][i] = value
    if not mat_det(h):
        raise DegenerateCriticalPointError("Hessian of phi_{-1} at 0 is singular")
    h_upper = mat_inv(h)
    psi_terms = {}
    delta_terms = {}
    for i in range(n):
        for j in range(i, n):
            idx = list(zeros)
            idx[i] += 1
            idx[j] += 1
            key = tuple(idx)
            psi_c = h[i][j] / 2 if i == j else h[i][j]
            if psi_c:
                psi_terms[(0, key, ())] = psi_c
            hij_up = h_upper[i][j]
            delta_c = -hij_up / 2 if i == j else -hij_up
            if delta_c:
                delta_terms[(0, zeros, key)] = delta_c
    return HessianData(
        h_lower=tuple(tuple(row) for row in h),
        h_upper=tuple(tuple(row) for row in h_upper),
        psi=Jet(n, psi_terms),
        delta_op=FormalOperator(n, delta_terms),
    )


def phase_remainder(pair: PhaseDensityPair) -> Jet:
    """chi = phi - nu^-1 psi - phi_0(0) + u - u_0(0); standard degree >= 1."""
    hd = hessian_data(pair)
    n = pair.num_vars
    zeros = (0,) * n
    nu_inv_psi = Jet(n, {(-1, key[1], ()): c for key, c in hd.psi.terms.items()})
    chi = pair.phase - nu_inv_psi
    chi = chi - Jet.constant(n, chi.coefficient(0, zeros))
    u = pair.density_exponent
    chi = chi + u - Jet.constant(n, u.coefficient(0, zeros))
    return chi


def _moment_table(delta_op: FormalOperator, cache: dict, gamma) -> Scalar:
    """(Delta^k x^gamma)(0) / k! for 2k = |gamma|; zero for odd |gamma|."""
    total = sum(gamma)
    if total % 2:
        return Scalar(0)
    cached = cache.get(gamma)
    if cached is not None:
        return cached
    n = delta_op.num_vars
    k = total // 2
    w = Jet.monomial(n, 1, x=gamma)
    for _ in range(k):
        w = op_apply(delta_op, w)
    value = w.coefficient(0, (0,) * n) / math.factorial(k)
    cache[gamma] = value
    return value


def foi_distribution(pair: PhaseDensityPair, N: int) -> PointDistribution:
    """The normalized strongly associated distribution through order nu^N.

    For each derivative index beta, the coefficient c_{r,beta} is the x-free
    nu^r part of e^{nu Delta}(e^chi x^beta), divided by beta!. Since nu Delta
    is standard-degree homogeneous of degree 0, only the components of
    e^chi x^beta of standard degree 2r contribute, each through the finite sum
    Delta^k/k! that empties the x content; everything is exact.
    """
    hd = hessian_data(pair)
    chi = phase_remainder(pair)
    n = pair.num_vars
    trunc = TruncationSpec(STANDARD, 2 * N)
    big_e = jet_exp(chi, trunc)
    moments: dict = {}
    out = {}
    for beta in indices_up_to(n, 2 * N):
        src = jet_mul(big_e, Jet.monomial(n, 1, x=beta), trunc)
        fact = index_factorial(beta)
        for (a, gamma, _aux), c in src.terms.items():
            total = sum(gamma)
            if total % 2:
                continue
            r = a + total // 2
            if r > N:
                continue
            moment = _moment_table(hd.delta_op, moments, gamma)
            if not moment:
                continue
            key = (r, beta)
            contrib = c * moment / fact
            prev = out.get(key)
            out[key] = contrib if prev is None else prev + contrib
    return PointDistribution(n, out)


def divergence(v: VectorField, pair: PhaseDensityPair) -> Jet:
    """div_rho v = sum_i d_i v^i + v(u) for rho = e^u dx."""
    n = pair.num_vars
    if v.num_vars != n:
        raise InputShapeError("vector field and pair live on different charts")
    out = Jet.zero(n)
    for i, comp in enumerate(v.components):
        out = out + jet_derive(comp, i)
    return out + v.apply(pair.density_exponent)


def _laurent_depth(f: Jet) -> int:
    low = f.lowest_nu()
    return max(0, -low) if low is not None else 0


def check_foi_axiom(L: PointDistribution, pair: PhaseDensityPair,
                    v: VectorField, f: Jet, N: int) -> Jet:
    """Defect Lambda(v f + (v phi + div_rho v) f) of the integral axiom.

    The argument jet picks up the Laurent depth of v phi, so the defect is
    exact to order N minus that depth; it vanishes identically for a true
    associated distribution. A nonzero defect is returned as data.
    """
    vphi = v.apply(pair.phase)
    g = v.apply(f) + jet_mul(vphi + divergence(v, pair), f)
    return apply_distribution(L, g, N - _laurent_depth(g))


def check_strong(L: PointDistribution, pair: PhaseDensityPair,
                 f: Jet, N: int) -> Jet:
    """Defect of the strong-association identity, exact modulo nu^(N-1).

    Compares d/dnu Lambda(f) with Lambda(df/dnu + (dphi/dnu + du/dnu
    - n/(2 nu)) f); one order is lost to the nu derivative and up to two to
    the nu^-2 part of dphi/dnu.
    """
    n = pair.num_vars
    depth_f = _laurent_depth(f)
    lam_f = apply_distribution(L, f, N - depth_f)
    lhs = jet_derive(lam_f, "nu")
    weight = (jet_derive(pair.phase, "nu")
              + jet_derive(pair.density_exponent, "nu")
              - Jet.monomial(n, Fraction(n, 2), nu=-1))
    g = jet_derive(f, "nu") + jet_mul(weight, f)
    rhs = apply_distribution(L, g, N - _laurent_depth(g))
    cutoff = min(N - depth_f - 1, N - _laurent_depth(g))
    defect = truncate(lhs - rhs, TruncationSpec(NU, cutoff))
    return defect


def multiplication_factor(G: FormalOperator) -> Jet:
    """The right factor e^chi of the unique split G = e^E e^chi, as a jet.

    E is derivative-led, so its transpose annihilates constants while
    multiplication operators are transpose-fixed; hence G^t(1) = e^chi. In
    coordinates that is one full contraction per term, a single linear pass.
    factorize(..., DIV_VS_MULT) computes the same factor (the factorization
    is unique) at far higher cost; the agreement is covered by tests.
    """
    out = {}
    for (a, alpha, beta), c in G.terms.items():
        weight = index_falling(alpha, beta)
        if not weight:
            continue
        if sum(beta) % 2:
            weight = -weight
        key = (a, index_sub(alpha, beta), ())
        contrib = c if weight == 1 else c * weight
        prev = out.get(key)
        out[key] = contrib if prev is None else prev + contrib
    return Jet(G.num_vars, out)


def recover_phase(L: PointDistribution, N: int) -> PhaseDensityPair:
    """Reconstruct the normalized phase jet of a nondegenerate oscillatory L.

    Steps: (1) X with Lambda = delta o exp(nu^-1 X); (2) h^{ij} = -beta
    entries, inverted exactly to h_{ij} and psi; (3) C = nu^-1 X
    + (nu/2) h^{ij} d_i d_j; (4) conjugate e^C by nu^-1 psi; (5) project out
    the multiplication factor of the derivative-led times multiplication
    factorization; (6) its logarithm is the phase remainder chi. Returns the
    pair (nu^-1 psi + chi, u = 0); feeding it back to foi_distribution
    reproduces L modulo nu^(N+1).
    """
    verdict, x_op = is_oscillatory(L, N)
    if not verdict:
        raise PreconditionError("recover_phase needs an oscillatory distribution")
    n = L.num_vars
    beta = beta_form(L)
    h_upper = [[-v for v in row] for row in beta.matrix]
    if not mat_det(h_upper):
        raise NondegeneracyError("beta form is degenerate; phase is not recoverable")
    h_lower = mat_inv(h_upper)
    zeros = (0,) * n

    psi_terms = {}
    gauss_terms = {}
    for i in range(n):
        for j in range(i, n):
            idx = list(zeros)
            idx[i] += 1
            idx[j] += 1
            key = tuple(idx)
            lo = h_lower[i][j]
            up = h_upper[i][j]
            psi_c = lo / 2 if i == j else lo
            gauss_c = up / 2 if i == j else up
            if psi_c:
                psi_terms[(0, key, ())] = psi_c
            if gauss_c:
                gauss_terms[(1, zeros, key)] = gauss_c
    psi = Jet(n, psi_terms)

    c_op = FormalOperator(n, {(a - 1, zeros, b): c
                              for (a, _alpha, b), c in x_op.terms.items()})
    c_op = c_op + FormalOperator(n, gauss_terms)

    filt = FiltrationSpec(STANDARD, 1)
    trunc = TruncationSpec(STANDARD, 2 * N)
    group_elt = op_exp(c_op, filt, trunc)
    p_op = FormalOperator(n, {(-1, key[1], zeros): c
                              for key, c in psi.terms.items()})
    conjugated = conjugate(p_op, group_elt, trunc, measure="dx")
    chi = jet_log(multiplication_factor(conjugated), trunc)

    nu_inv_psi = Jet(n, {(-1, key[1], ()): c for key, c in psi.terms.items()})
    return PhaseDensityPair(nu_inv_psi + chi, Jet.zero(n))

"""Formal differential operators with polynomial-jet coefficients.

An operator term ``(a, alpha, beta) -> c`` denotes ``c nu^a x^alpha d^beta``
in normal ordering (coefficients left of derivatives) or
``c nu^a d^beta x^alpha`` in anti-normal ordering. The normal form is unique,
so operator equality is decided on normal forms. Coefficients never involve
aux parameters; those enter only through symbols and star products.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import InputShapeError
from .jets import (Jet, TruncationSpec, grlex_key, index_add, index_binom,
                   index_falling, index_le, index_sub, truncate)
from .scalars import ZERO_Q, Scalar, as_scalar, scalar_from_q

NORMAL = "normal"
ANTI = "anti"


class FormalOperator:
    """Sparse formal differential operator on n chart variables."""

    __slots__ = ("num_vars", "ordering", "nu_min", "terms")

    def __init__(self, num_vars: int, terms=None, ordering: str = NORMAL, nu_min=None):
        if num_vars < 1:
            raise InputShapeError("an operator needs at least one chart variable")
        if ordering not in (NORMAL, ANTI):
            raise InputShapeError(f"unknown ordering {ordering!r}")
        clean = {}
        lowest = None
        for key, coeff in (terms or {}).items():
            nu, alpha, beta = key
            if len(alpha) != num_vars or len(beta) != num_vars:
                raise InputShapeError(f"index {key} has wrong length for n={num_vars}")
            if any(e < 0 for e in alpha) or any(e < 0 for e in beta):
                raise InputShapeError("monomial exponents must be nonnegative")
            coeff = as_scalar(coeff)
            if not coeff:
                continue
            clean[(nu, tuple(alpha), tuple(beta))] = coeff
            if lowest is None or nu < lowest:
                lowest = nu
        if nu_min is None:
            nu_min = lowest if lowest is not None else 0
        elif lowest is not None and lowest < nu_min:
            raise InputShapeError(f"term with nu^{lowest} below declared floor {nu_min}")
        self.num_vars = num_vars
        self.ordering = ordering
        self.nu_min = nu_min
        self.terms = clean

    # -- constructors ----------------------------------------------------------

    @classmethod
    def _make(cls, num_vars, terms, ordering, nu_min):
        """Trusted constructor for kernel output (terms already normalized)."""
        op = cls.__new__(cls)
        op.num_vars = num_vars
        op.ordering = ordering
        op.nu_min = nu_min
        op.terms = terms
        return op

    @classmethod
    def zero(cls, num_vars: int, ordering: str = NORMAL):
        return cls(num_vars, {}, ordering)

    @classmethod
    def identity(cls, num_vars: int, ordering: str = NORMAL):
        zeros = (0,) * num_vars
        return cls(num_vars, {(0, zeros, zeros): Scalar(1)}, ordering)

    @classmethod
    def monomial(cls, num_vars: int, coeff, nu=0, x=None, dx=None, ordering: str = NORMAL):
        x = tuple(x) if x is not None else (0,) * num_vars
        dx = tuple(dx) if dx is not None else (0,) * num_vars
        return cls(num_vars, {(nu, x, dx): as_scalar(coeff)}, ordering)

    @classmethod
    def from_multiplication_jet(cls, f: Jet):
        """The operator multiplying by an aux-free jet."""
        if f.aux_names:
            raise InputShapeError("multiplication operators cannot carry aux parameters")
        zeros = (0,) * f.num_vars
        return cls(f.num_vars,
                   {(nu, alpha, zeros): c for (nu, alpha, _), c in f.terms.items()})

    def multiplication_jet(self) -> Jet:
        """Inverse of from_multiplication_jet; requires every dx index zero."""
        out = {}
        for (nu, alpha, beta), c in self.terms.items():
            if any(beta):
                raise InputShapeError("operator is not a pure multiplication operator")
            out[(nu, alpha, ())] = c
        return Jet(self.num_vars, out)

    # -- protocol ---------------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, FormalOperator):
            return NotImplemented
        a = self if self.ordering == NORMAL else reorder(self, NORMAL)
        b = other if other.ordering == NORMAL else reorder(other, NORMAL)
        return a.num_vars == b.num_vars and a.terms == b.terms

    def __repr__(self):
        if not self.terms:
            return f"Op<{self.num_vars},{self.ordering}>(0)"
        bits = []
        for (nu, alpha, beta) in sorted(self.terms, key=_op_sort_key):
            c = self.terms[(nu, alpha, beta)]
            mono = []
            if nu:
                mono.append(f"nu^{nu}")
            mono.extend(f"x{i + 1}^{e}" for i, e in enumerate(alpha) if e)
            mono.extend(f"d{i + 1}^{e}" for i, e in enumerate(beta) if e)
            bits.append(f"({c}){'*'.join(mono) if mono else ''}")
        return f"Op<{self.num_vars},{self.ordering}>({' + '.join(bits)})"

    # -- linear structure ---------------------------------------------------------

    def _check_shape(self, other):
        if self.num_vars != other.num_vars:
            raise InputShapeError("operators act on different charts")
        if self.ordering != other.ordering:
            raise InputShapeError("mixed orderings; reorder explicitly first")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = FormalOperator.identity(self.num_vars, self.ordering) * other
        if not isinstance(other, FormalOperator):
            return NotImplemented
        self._check_shape(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, Scalar(0)) + c
        return FormalOperator(self.num_vars, out, self.ordering,
                              min(self.nu_min, other.nu_min))

    __radd__ = __add__

    def __neg__(self):
        return FormalOperator(self.num_vars, {k: -c for k, c in self.terms.items()},
                              self.ordering, self.nu_min)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = FormalOperator.identity(self.num_vars, self.ordering) * other
        if not isinstance(other, FormalOperator):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            s = as_scalar(other)
            return FormalOperator(self.num_vars,
                                  {k: c * s for k, c in self.terms.items()},
                                  self.ordering, self.nu_min)
        if isinstance(other, FormalOperator):
            return op_compose(self, other, None)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        s = as_scalar(other)
        return FormalOperator(self.num_vars, {k: c / s for k, c in self.terms.items()},
                              self.ordering, self.nu_min)


def _op_sort_key(key):
    nu, alpha, beta = key
    return (nu, grlex_key(alpha), grlex_key(beta))


def canonical_op_terms(op: FormalOperator):
    return sorted(op.terms.items(), key=lambda kv: _op_sort_key(kv[0]))


@dataclass(frozen=True)
class OperatorClassReport:
    """Per-term classification of a normal-form operator."""

    is_natural: bool
    in_g_nu: bool
    standard_degree: int | None


# ---------------------------------------------------------------------------
# operations


def truncate_operator(A: FormalOperator, trunc: TruncationSpec) -> FormalOperator:
    g = trunc.grading
    kept = {k: c for k, c in A.terms.items()
            if g.op_degree(*k) <= trunc.max_degree}
    return FormalOperator(A.num_vars, kept, A.ordering, A.nu_min)


def _require_normal(A: FormalOperator, what: str):
    if A.ordering != NORMAL:
        raise InputShapeError(f"{what} needs a normal-ordered operator")


@lru_cache(maxsize=None)
def _contraction_table(beta, gamma):
    """Precomputed reordering data for d^beta o x^gamma.

    Entries are (gamma - sigma, beta - sigma, weight) over all sigma with
    sigma <= min(beta, gamma) elementwise, where weight = binom(beta, sigma)
    * gamma!/(gamma-sigma)!. The same index pairs recur constantly in the
    composition kernels, so the table is memoized; the first entry is always
    the contraction-free one (sigma = 0, weight 1).
    """
    ranges = [range(min(b, g) + 1) for b, g in zip(beta, gamma)]
    return tuple((index_sub(gamma, sigma), index_sub(beta, sigma),
                  index_binom(beta, sigma) * index_falling(gamma, sigma))
                 for sigma in itertools.product(*ranges))


@lru_cache(maxsize=None)
def _iadd(a, b):
    """Memoized tuple addition; the index vocabulary in a run is small."""
    return tuple(x + y for x, y in zip(a, b))


@lru_cache(maxsize=None)
def _apply_weight(beta, gamma):
    """gamma!/(gamma-beta)! when beta <= gamma elementwise, else 0."""
    if not index_le(beta, gamma):
        return 0
    return index_falling(gamma, beta)


def op_compose(A: FormalOperator, B: FormalOperator, trunc=None) -> FormalOperator:
    """Normal-form product A o B.

    Uses the reordering identity
    d^beta o x^gamma = sum_sigma binom(beta, sigma) gamma!/(gamma-sigma)!
    x^(gamma-sigma) d^(beta-sigma); contractions preserve every grading used
    here, so degree-based pair skipping under truncation is exact.
    """
    if A.num_vars != B.num_vars:
        raise InputShapeError("operators act on different charts")
    _require_normal(A, "op_compose")
    _require_normal(B, "op_compose")
    # Accumulate raw (re, im) slots to keep Scalar allocation off the hot path.
    out = {}
    if trunc is not None:
        g = trunc.grading
        dmax = trunc.max_degree
        # contractions change the degree by -|sigma|*(x_weight + d_weight), so
        # skipping pairs by degree sum is exact only when that does not sink
        skip_safe = (g.x_weight + g.d_weight) <= 0
        bt = [(g.op_degree(*k), k, c) for k, c in B.terms.items()]
        bt.sort(key=lambda entry: entry[0])
    else:
        dmax = None
        skip_safe = False
        bt = [(0, k, c) for k, c in B.terms.items()]
    for (a, alpha, beta), ca in A.terms.items():
        ca_re, ca_im = ca.re, ca.im
        limit = dmax - g.op_degree(a, alpha, beta) if dmax is not None else None
        for db, (b, gamma, delta), cb in bt:
            if skip_safe and db > limit:
                break
            if ca_im or cb.im:
                cb_re, cb_im = cb.re, cb.im
                base_re = ca_re * cb_re - ca_im * cb_im
                base_im = ca_re * cb_im + ca_im * cb_re
            else:
                base_re = ca_re * cb.re
                base_im = ZERO_Q
            nu = a + b
            for gms, bms, weight in _contraction_table(beta, gamma):
                key = (nu, _iadd(alpha, gms), _iadd(bms, delta))
                v_re = base_re if weight == 1 else base_re * weight
                v_im = base_im if weight == 1 else base_im * weight
                slot = out.get(key)
                if slot is None:
                    out[key] = [v_re, v_im]
                else:
                    slot[0] += v_re
                    slot[1] += v_im
    terms = {key: scalar_from_q(re, im)
             for key, (re, im) in out.items() if re or im}
    result = FormalOperator._make(A.num_vars, terms, NORMAL, A.nu_min + B.nu_min)
    if trunc is not None and g.x_weight + g.d_weight != 0:
        # contractions moved some degrees; a final sweep restores the bound
        result = truncate_operator(result, trunc)
    return result


def op_apply(A: FormalOperator, f: Jet, trunc=None) -> Jet:
    """Apply a normal-ordered operator to a jet (aux content passes through)."""
    _require_normal(A, "op_apply")
    if A.num_vars != f.num_vars:
        raise InputShapeError("operator and jet live on different charts")
    out = {}
    ft = list(f.terms.items())
    for (a, alpha, beta), ca in A.terms.items():
        ca_re, ca_im = ca.re, ca.im
        for (b, gamma, mu), cf in ft:
            weight = _apply_weight(beta, gamma)
            if not weight:
                continue
            if ca_im or cf.im:
                v_re = (ca_re * cf.re - ca_im * cf.im) * weight
                v_im = (ca_re * cf.im + ca_im * cf.re) * weight
            else:
                v_re = ca_re * cf.re * weight
                v_im = ZERO_Q
            key = (a + b, index_add(alpha, index_sub(gamma, beta)), mu)
            slot = out.get(key)
            if slot is None:
                out[key] = [v_re, v_im]
            else:
                slot[0] += v_re
                slot[1] += v_im
    terms = {key: scalar_from_q(re, im)
             for key, (re, im) in out.items() if re or im}
    result = Jet._make(f.num_vars, terms, f.aux_names, A.nu_min + f.nu_min)
    return truncate(result, trunc) if trunc is not None else result


def _convert_terms(terms, sign):
    """Shared kernel for both reorderings; sign=-1 for normal -> anti."""
    out = {}
    for (a, alpha, beta), c in terms.items():
        total = sum(alpha)
        for ams, bms, weight in _contraction_table(beta, alpha):
            if sign < 0 and (total - sum(ams)) % 2:
                weight = -weight
            key = (a, ams, bms)
            contrib = c if weight == 1 else c * weight
            prev = out.get(key)
            out[key] = contrib if prev is None else prev + contrib
    return out


def reorder(A: FormalOperator, target: str) -> FormalOperator:
    """Re-express the same operator in the requested ordering (involutive)."""
    if target not in (NORMAL, ANTI):
        raise InputShapeError(f"unknown ordering {target!r}")
    if A.ordering == target:
        return A
    sign = -1 if target == ANTI else 1
    return FormalOperator(A.num_vars, _convert_terms(A.terms, sign), target, A.nu_min)


def op_transpose(A: FormalOperator) -> FormalOperator:
    """Standard transposition: (d_i)^t = -d_i, (x^i)^t = x^i, (AB)^t = B^t A^t.

    Transposing a term swaps its ordering and contributes (-1)^|beta|; the
    result is returned in normal form.
    """
    flipped = {}
    for (a, alpha, beta), c in A.terms.items():
        flipped[(a, alpha, beta)] = -c if sum(beta) % 2 else c
    swapped = ANTI if A.ordering == NORMAL else NORMAL
    return reorder(FormalOperator(A.num_vars, flipped, swapped, A.nu_min), NORMAL)


def constant_part(A: FormalOperator) -> FormalOperator:
    """The unique constant-coefficient operator C with delta o A = delta o C."""
    _require_normal(A, "constant_part")
    kept = {k: c for k, c in A.terms.items() if not any(k[1])}
    return FormalOperator(A.num_vars, kept, NORMAL)


def aux_xi_names(num_vars: int):
    return tuple(f"xi{i + 1}" for i in range(num_vars))


def full_symbol(A: FormalOperator) -> Jet:
    """Full symbol: nu^a x^alpha d^beta maps to nu^(a-|beta|) x^alpha xi^beta.

    The operator is natural exactly when the symbol has no negative powers
    of nu.
    """
    _require_normal(A, "full_symbol")
    out = {}
    for (a, alpha, beta), c in A.terms.items():
        out[(a - sum(beta), alpha, beta)] = c
    return Jet(A.num_vars, out, aux_xi_names(A.num_vars))


def classify(A: FormalOperator) -> OperatorClassReport:
    """Naturalness, Lie-algebra membership, and standard degree of A."""
    _require_normal(A, "classify")
    natural = True
    in_g = True
    degree = None
    for (a, alpha, beta) in A.terms:
        order = sum(beta)
        if a < 0 or order > a:
            natural = False
        if a < 1 or order > a + 1:
            in_g = False
        d = 2 * a + sum(alpha) - order
        if degree is None or d < degree:
            degree = d
    return OperatorClassReport(natural, in_g, degree)

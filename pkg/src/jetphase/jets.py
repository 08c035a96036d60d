"""Truncated formal series (jets) with exact coefficients and graded truncation.

A ``Jet`` is a sparse map from monomials ``nu^a x^alpha aux^mu`` to nonzero
``Scalar`` coefficients. The exponent ``a`` of the formal parameter nu is an
integer bounded below per object (Laurent with a floor); ``alpha`` and ``mu``
are multi-indices over the chart variables and the named auxiliary parameters.

Truncation is never ambient state: every operation that can create infinitely
many terms takes an explicit ``TruncationSpec`` and is exact modulo the graded
ideal of terms of degree greater than ``max_degree``. Two gradings matter in
practice: the plain nu-adic one and the standard one (nu weighs 2, each chart
variable weighs 1, each derivative weighs -1); both are predefined below.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConvergenceError, InputShapeError
from .scalars import ONE, ZERO_Q, Scalar, as_scalar, scalar_from_q

# ---------------------------------------------------------------------------
# multi-index helpers (multi-indices are plain tuples of nonnegative ints)


def index_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def index_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def index_le(a, b):
    return all(x <= y for x, y in zip(a, b))


def index_factorial(a) -> int:
    out = 1
    for e in a:
        out *= math.factorial(e)
    return out


def index_falling(gamma, beta) -> int:
    """Product of falling factorials gamma_i! / (gamma_i - beta_i)!."""
    out = 1
    for g, b in zip(gamma, beta):
        out *= math.perm(g, b)
    return out


def index_binom(beta, sigma) -> int:
    out = 1
    for b, s in zip(beta, sigma):
        out *= math.comb(b, s)
    return out


def grlex_key(a):
    """Graded-lexicographic sort key (total degree first)."""
    return (sum(a), a)


def indices_up_to(num_vars: int, max_total: int):
    """All multi-indices on num_vars variables with |alpha| <= max_total,
    in graded-lexicographic order."""
    out = []
    for total in range(max_total + 1):
        for alpha in itertools.product(range(total + 1), repeat=num_vars):
            if sum(alpha) == total:
                out.append(alpha)
    return out


# ---------------------------------------------------------------------------
# gradings and truncation


@dataclass(frozen=True)
class GradingContext:
    """Integer weights defining a graded degree on jet and operator terms.

    ``aux_weights`` holds per-name overrides as (name, weight) pairs; any aux
    parameter without an override weighs ``aux_default``.
    """

    nu_weight: int
    x_weight: int
    d_weight: int = 0
    aux_default: int = 0
    aux_weights: tuple = ()

    def aux_weight(self, name: str) -> int:
        for nm, w in self.aux_weights:
            if nm == name:
                return w
        return self.aux_default

    def jet_degree(self, nu: int, alpha, aux_names, aux) -> int:
        d = self.nu_weight * nu + self.x_weight * sum(alpha)
        if aux and (self.aux_default or self.aux_weights):
            for name, e in zip(aux_names, aux):
                if e:
                    d += self.aux_weight(name) * e
        return d

    def op_degree(self, nu: int, alpha, beta) -> int:
        return self.nu_weight * nu + self.x_weight * sum(alpha) + self.d_weight * sum(beta)


#: nu-adic filtration: deg(nu) = 1, everything else is flat.
NU = GradingContext(nu_weight=1, x_weight=0, d_weight=0)

#: standard filtration: deg(nu) = 2, deg(x^i) = 1, each derivative weighs -1.
STANDARD = GradingContext(nu_weight=2, x_weight=1, d_weight=-1)

#: auxiliary-parameter filtration: every named aux parameter weighs 1.
AUX = GradingContext(nu_weight=0, x_weight=0, d_weight=0, aux_default=1)


@dataclass(frozen=True)
class TruncationSpec:
    """A grading plus the highest degree retained by an operation."""

    grading: GradingContext
    max_degree: int


# ---------------------------------------------------------------------------
# the Jet value type


class Jet:
    """Sparse exact formal series in x^1..x^n, nu, and aux parameters.

    ``terms`` maps ``(nu_exponent, x_index, aux_index)`` to a nonzero Scalar.
    Instances are treated as immutable; all operations return new jets.
    """

    __slots__ = ("num_vars", "aux_names", "nu_min", "terms")

    def __init__(self, num_vars: int, terms=None, aux_names=(), nu_min=None):
        if num_vars < 1:
            raise InputShapeError("a jet needs at least one chart variable")
        aux_names = tuple(aux_names)
        clean = {}
        lowest = None
        for key, coeff in (terms or {}).items():
            nu, alpha, aux = key
            if len(alpha) != num_vars:
                raise InputShapeError(f"x index {alpha} has wrong length for n={num_vars}")
            if len(aux) != len(aux_names):
                raise InputShapeError(f"aux index {aux} does not match names {aux_names}")
            if any(e < 0 for e in alpha) or any(e < 0 for e in aux):
                raise InputShapeError("monomial exponents must be nonnegative")
            coeff = as_scalar(coeff)
            if not coeff:
                continue
            clean[(nu, tuple(alpha), tuple(aux))] = coeff
            if lowest is None or nu < lowest:
                lowest = nu
        if nu_min is None:
            nu_min = lowest if lowest is not None else 0
        elif lowest is not None and lowest < nu_min:
            raise InputShapeError(f"term with nu^{lowest} below declared floor {nu_min}")
        self.num_vars = num_vars
        self.aux_names = aux_names
        self.nu_min = nu_min
        self.terms = clean

    # -- constructors --------------------------------------------------------

    @classmethod
    def _make(cls, num_vars, terms, aux_names, nu_min):
        """Trusted constructor for kernel output (terms already normalized)."""
        jet = cls.__new__(cls)
        jet.num_vars = num_vars
        jet.aux_names = aux_names
        jet.nu_min = nu_min
        jet.terms = terms
        return jet

    @classmethod
    def zero(cls, num_vars: int, aux_names=()):
        return cls(num_vars, {}, aux_names)

    @classmethod
    def constant(cls, num_vars: int, value, aux_names=()):
        zeros = (0,) * num_vars
        zaux = (0,) * len(tuple(aux_names))
        return cls(num_vars, {(0, zeros, zaux): as_scalar(value)}, aux_names)

    @classmethod
    def one(cls, num_vars: int, aux_names=()):
        return cls.constant(num_vars, 1, aux_names)

    @classmethod
    def variable(cls, num_vars: int, i: int, aux_names=()):
        alpha = tuple(1 if j == i else 0 for j in range(num_vars))
        zaux = (0,) * len(tuple(aux_names))
        return cls(num_vars, {(0, alpha, zaux): ONE}, aux_names)

    @classmethod
    def nu_power(cls, num_vars: int, k: int = 1, aux_names=()):
        zeros = (0,) * num_vars
        zaux = (0,) * len(tuple(aux_names))
        return cls(num_vars, {(k, zeros, zaux): ONE}, aux_names)

    @classmethod
    def monomial(cls, num_vars: int, coeff, nu=0, x=None, aux=None, aux_names=()):
        aux_names = tuple(aux_names)
        x = tuple(x) if x is not None else (0,) * num_vars
        aux = tuple(aux) if aux is not None else (0,) * len(aux_names)
        return cls(num_vars, {(nu, x, aux): as_scalar(coeff)}, aux_names)

    # -- inspection -----------------------------------------------------------

    def coefficient(self, nu: int, x, aux=None) -> Scalar:
        aux = tuple(aux) if aux is not None else (0,) * len(self.aux_names)
        return self.terms.get((nu, tuple(x), aux), Scalar(0))

    def constant_term(self) -> Scalar:
        return self.coefficient(0, (0,) * self.num_vars)

    def lowest_nu(self):
        """Smallest nu exponent actually present, or None for the zero jet."""
        return min((k[0] for k in self.terms), default=None)

    def with_aux(self, aux_names):
        """The same jet viewed with additional (or reordered) aux slots."""
        aux_names = tuple(aux_names)
        if aux_names == self.aux_names:
            return self
        pos = {nm: i for i, nm in enumerate(aux_names)}
        for nm in self.aux_names:
            if nm not in pos:
                raise InputShapeError(f"aux parameter {nm!r} missing from {aux_names}")
        out = {}
        for (nu, alpha, aux), c in self.terms.items():
            new_aux = [0] * len(aux_names)
            for nm, e in zip(self.aux_names, aux):
                new_aux[pos[nm]] = e
            out[(nu, alpha, tuple(new_aux))] = c
        return Jet(self.num_vars, out, aux_names)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (self.num_vars == other.num_vars
                and self.aux_names == other.aux_names
                and self.terms == other.terms)

    def __repr__(self):
        if not self.terms:
            return f"Jet<{self.num_vars}>(0)"
        bits = []
        for (nu, alpha, aux) in sorted(self.terms, key=_term_sort_key):
            c = self.terms[(nu, alpha, aux)]
            mono = []
            if nu:
                mono.append(f"nu^{nu}")
            mono.extend(f"x{i + 1}^{e}" for i, e in enumerate(alpha) if e)
            mono.extend(f"{nm}^{e}" for nm, e in zip(self.aux_names, aux) if e)
            bits.append(f"({c}){'*'.join(mono) if mono else ''}")
        return f"Jet<{self.num_vars}>({' + '.join(bits)})"

    # -- arithmetic -----------------------------------------------------------

    def _check_shape(self, other):
        if self.num_vars != other.num_vars or self.aux_names != other.aux_names:
            raise InputShapeError(
                f"jet shapes differ: ({self.num_vars}, {self.aux_names}) vs "
                f"({other.num_vars}, {other.aux_names})")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = Jet.constant(self.num_vars, other, self.aux_names)
        if not isinstance(other, Jet):
            return NotImplemented
        self._check_shape(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, Scalar(0)) + c
        return Jet(self.num_vars, out, self.aux_names,
                   min(self.nu_min, other.nu_min))

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.num_vars, {k: -c for k, c in self.terms.items()},
                   self.aux_names, self.nu_min)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = Jet.constant(self.num_vars, other, self.aux_names)
        if not isinstance(other, Jet):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            s = as_scalar(other)
            return Jet(self.num_vars, {k: c * s for k, c in self.terms.items()},
                       self.aux_names, self.nu_min)
        if not isinstance(other, Jet):
            return NotImplemented
        return jet_mul(self, other, None)

    __rmul__ = __mul__

    def __truediv__(self, other):
        s = as_scalar(other)
        return Jet(self.num_vars, {k: c / s for k, c in self.terms.items()},
                   self.aux_names, self.nu_min)


def _term_sort_key(key):
    nu, alpha, aux = key
    return (nu, grlex_key(alpha), grlex_key(aux))


def canonical_terms(jet: Jet):
    """Terms in the canonical (nu, grlex x, grlex aux) order."""
    return sorted(jet.terms.items(), key=lambda kv: _term_sort_key(kv[0]))


# ---------------------------------------------------------------------------
# operations


def truncate(f: Jet, trunc: TruncationSpec) -> Jet:
    """Drop every term of degree greater than trunc.max_degree."""
    g = trunc.grading
    kept = {k: c for k, c in f.terms.items()
            if g.jet_degree(k[0], k[1], f.aux_names, k[2]) <= trunc.max_degree}
    return Jet(f.num_vars, kept, f.aux_names, f.nu_min)


def jet_mul(a: Jet, b: Jet, trunc=None) -> Jet:
    """Exact product, truncated if a TruncationSpec is given.

    Monomial degrees add exactly under multiplication, so pairs whose degree
    sum exceeds the bound are skipped outright; raw rational slots keep
    Scalar allocation off the hot path.
    """
    a._check_shape(b)
    out = {}
    if trunc is None:
        bt = [(0, k, c) for k, c in b.terms.items()]
        dmax = None
    else:
        g, dmax = trunc.grading, trunc.max_degree
        bt = [(g.jet_degree(k[0], k[1], b.aux_names, k[2]), k, c)
              for k, c in b.terms.items()]
        bt.sort(key=lambda entry: entry[0])
    for (n1, x1, u1), c1 in a.terms.items():
        c1_re, c1_im = c1.re, c1.im
        limit = dmax - g.jet_degree(n1, x1, a.aux_names, u1) if dmax is not None else None
        for d2, (n2, x2, u2), c2 in bt:
            if limit is not None and d2 > limit:
                break
            if c1_im or c2.im:
                v_re = c1_re * c2.re - c1_im * c2.im
                v_im = c1_re * c2.im + c1_im * c2.re
            else:
                v_re = c1_re * c2.re
                v_im = ZERO_Q
            key = (n1 + n2, index_add(x1, x2), index_add(u1, u2))
            slot = out.get(key)
            if slot is None:
                out[key] = [v_re, v_im]
            else:
                slot[0] += v_re
                slot[1] += v_im
    terms = {key: scalar_from_q(re, im)
             for key, (re, im) in out.items() if re or im}
    return Jet._make(a.num_vars, terms, a.aux_names, a.nu_min + b.nu_min)


def jet_ring_op(a: Jet, b, kind: str, trunc: TruncationSpec) -> Jet:
    """Ring operation dispatch: kind in {"add", "sub", "mul", "scale"}.

    For "scale", ``b`` is the scalar multiplier.
    """
    if kind == "add":
        return truncate(a + b, trunc)
    if kind == "sub":
        return truncate(a - b, trunc)
    if kind == "mul":
        return jet_mul(a, b, trunc)
    if kind == "scale":
        return truncate(a * as_scalar(b), trunc)
    raise InputShapeError(f"unknown ring operation {kind!r}")


def _min_term_degree(f: Jet, grading: GradingContext):
    return min((grading.jet_degree(k[0], k[1], f.aux_names, k[2])
                for k in f.terms), default=None)


def jet_exp(f: Jet, trunc: TruncationSpec) -> Jet:
    """Exponential series 1 + f + f^2/2 + ..., exact modulo the truncation.

    Requires every term of f to have positive degree, so that only finitely
    many powers reach any fixed degree.
    """
    g = trunc.grading
    for (nu, alpha, aux) in f.terms:
        if g.jet_degree(nu, alpha, f.aux_names, aux) < 1:
            raise ConvergenceError(
                "jet_exp needs all terms of degree >= 1 under the truncation grading")
    acc = Jet.one(f.num_vars, f.aux_names)
    power = acc
    for k in range(1, trunc.max_degree + 1):
        power = jet_mul(power, f, trunc) / k
        if not power:
            break
        acc = acc + power
    return acc


def jet_log(f: Jet, trunc: TruncationSpec) -> Jet:
    """Logarithm of 1 + h via the Mercator series, inverse to jet_exp."""
    h = f - Jet.one(f.num_vars, f.aux_names)
    g = trunc.grading
    for (nu, alpha, aux) in h.terms:
        if g.jet_degree(nu, alpha, h.aux_names, aux) < 1:
            raise ConvergenceError(
                "jet_log needs constant term 1 and all other degrees >= 1")
    acc = Jet.zero(f.num_vars, f.aux_names)
    power = Jet.one(f.num_vars, f.aux_names)
    for k in range(1, trunc.max_degree + 1):
        power = jet_mul(power, h, trunc)
        if not power:
            break
        acc = acc + power * Scalar(Fraction((-1) ** (k + 1), k))
    return acc


def jet_derive(f: Jet, var) -> Jet:
    """Formal partial derivative with respect to x_i (var = 0-based int)
    or the formal parameter (var = "nu")."""
    out = {}
    if var == "nu":
        for (nu, alpha, aux), c in f.terms.items():
            if nu != 0:
                key = (nu - 1, alpha, aux)
                prev = out.get(key)
                term = c * nu
                out[key] = term if prev is None else prev + term
        return Jet(f.num_vars, out, f.aux_names)
    if isinstance(var, int) and 0 <= var < f.num_vars:
        for (nu, alpha, aux), c in f.terms.items():
            e = alpha[var]
            if e:
                key = (nu, alpha[:var] + (e - 1,) + alpha[var + 1:], aux)
                prev = out.get(key)
                term = c * e
                out[key] = term if prev is None else prev + term
        return Jet(f.num_vars, out, f.aux_names)
    raise InputShapeError(f"unknown derivation variable {var!r}")


def graded_component(f: Jet, grading: GradingContext, d: int) -> Jet:
    """The sum of exactly the terms of degree d; components re-sum to f."""
    kept = {k: c for k, c in f.terms.items()
            if grading.jet_degree(k[0], k[1], f.aux_names, k[2]) == d}
    return Jet(f.num_vars, kept, f.aux_names)


def jet_substitute(f: Jet, phi, trunc=None) -> Jet:
    """Substitute the jets phi = (phi_1, ..., phi_n) for the chart variables.

    The phi_i must share a common chart and carry no aux parameters; the nu
    and aux content of f passes through unchanged.
    """
    phi = list(phi)
    if len(phi) != f.num_vars:
        raise InputShapeError(f"need {f.num_vars} substitution jets, got {len(phi)}")
    m = phi[0].num_vars
    for p in phi:
        if p.num_vars != m or p.aux_names != ():
            raise InputShapeError("substitution jets must share a chart and be aux-free")
    one = Jet.one(m)
    pow_cache = [{0: one} for _ in range(f.num_vars)]

    # powers are cached exactly; truncation happens in the running product
    def power(i, e):
        cache = pow_cache[i]
        top = max(cache)
        while top < e:
            cache[top + 1] = jet_mul(cache[top], phi[i], None)
            top += 1
        return cache[e]

    zeros_m = (0,) * m
    out = {}
    g = trunc.grading if trunc is not None else None
    for (nu, alpha, aux), c in f.terms.items():
        if trunc is not None:
            shift = g.jet_degree(nu, zeros_m, f.aux_names, aux)
            inner = TruncationSpec(g, trunc.max_degree - shift)
        else:
            inner = None
        prod = one
        for i, e in enumerate(alpha):
            if e:
                prod = jet_mul(prod, power(i, e), inner)
        for (pnu, palpha, _), pc in prod.terms.items():
            key = (nu + pnu, palpha, aux)
            prev = out.get(key)
            term = c * pc
            out[key] = term if prev is None else prev + term
    result = Jet(m, out, f.aux_names)
    return truncate(result, trunc) if trunc is not None else result

"""Exact Gaussian-rational scalars and small dense linear algebra over them.

Every coefficient in this package is a ``Scalar``: a complex number
``re + im*i`` whose parts are exact rationals. The backing representation is
``gmpy2.mpq``, which keeps values in lowest terms with positive denominators
and is an order of magnitude faster than ``fractions.Fraction`` in the
composition kernels; ``Fraction`` and ``int`` are accepted everywhere on
input. There is no floating point anywhere.
"""

from __future__ import annotations

import re as _regex
from fractions import Fraction

from gmpy2 import mpq

_RATIONAL = r"-?\d+(?:/\d+)?"
_SCALAR_RE = _regex.compile(rf"^({_RATIONAL})(?:([+-])({_RATIONAL.replace('-?', '')})i)?$")

_ZERO_Q = mpq(0)


def _to_q(value):
    if type(value) is mpq:
        return value
    if isinstance(value, (int, Fraction)):
        return mpq(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


class Scalar:
    """Gaussian rational ``re + im*i`` with exact arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _to_q(re)
        self.im = _to_q(im)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Scalar):
            return Scalar(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return Scalar(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Scalar):
            return Scalar(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return Scalar(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Scalar):
            if not self.im and not other.im:
                return Scalar(self.re * other.re)
            return Scalar(self.re * other.re - self.im * other.im,
                          self.re * other.im + self.im * other.re)
        if isinstance(other, (int, Fraction)):
            return Scalar(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        if not other.im:
            return Scalar(self.re / other.re, self.im / other.re)
        norm = other.re * other.re + other.im * other.im
        return Scalar((self.re * other.re + self.im * other.im) / norm,
                      (self.im * other.re - self.re * other.im) / norm)

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Scalar(other) / self
        return NotImplemented

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Scalar(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison / protocol ----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


ZERO = Scalar(0)
ONE = Scalar(1)
I_UNIT = Scalar(0, 1)

ZERO_Q = _ZERO_Q


def scalar_from_q(re, im=_ZERO_Q) -> Scalar:
    """Wrap already-normalized mpq parts without coercion (kernel use)."""
    s = Scalar.__new__(Scalar)
    s.re = re
    s.im = im
    return s


def as_scalar(value) -> Scalar:
    """Coerce int / Fraction / Scalar to Scalar."""
    if isinstance(value, Scalar):
        return value
    return Scalar(_to_q(value))


def format_scalar(s: Scalar) -> str:
    """Canonical string form: ``<rat>`` or ``<rat>(+|-)<rat>i``."""
    if not s.im:
        return str(s.re)
    sign = "+" if s.im > 0 else "-"
    return f"{s.re}{sign}{abs(s.im)}i"


def parse_scalar(text: str) -> Scalar:
    """Parse the exact-scalar grammar; raises ValueError on anything else."""
    m = _SCALAR_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not an exact scalar: {text!r}")
    re_part = mpq(m.group(1))
    if m.group(2) is None:
        return Scalar(re_part)
    im_part = mpq(m.group(3))
    if m.group(2) == "-":
        im_part = -im_part
    return Scalar(re_part, im_part)


# -- exact dense linear algebra (n is always tiny here) ----------------------

def mat_det(rows) -> Scalar:
    """Exact determinant by Gaussian elimination over the Scalar field."""
    n = len(rows)
    a = [[as_scalar(v) for v in row] for row in rows]
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    det = ONE
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return ZERO
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det = det * a[col][col]
        inv = ONE / a[col][col]
        for r in range(col + 1, n):
            if a[r][col]:
                factor = a[r][col] * inv
                a[r] = [a[r][c] - factor * a[col][c] for c in range(n)]
    return det


def mat_inv(rows):
    """Exact inverse via Gauss-Jordan; raises ValueError on singular input."""
    n = len(rows)
    a = [[as_scalar(v) for v in row] for row in rows]
    if any(len(row) != n for row in a):
        raise ValueError("inverse needs a square matrix")
    aug = [a[r] + [ONE if c == r else ZERO for c in range(n)] for r in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            raise ValueError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = ONE / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [aug[r][c] - factor * aug[col][c] for c in range(2 * n)]
    return [row[n:] for row in aug]

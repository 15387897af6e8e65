"""Exact scalars: Gaussian rationals, integer polynomials in q, and N^(-1/2) multiples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

Scalar = Union[Fraction, "GaussianRational"]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class GaussianRational:
    """A complex number ``re + i*im`` with rational parts.

    Arithmetic with ``int``/``Fraction`` is supported on both sides. Results
    whose imaginary part vanishes are returned as plain ``Fraction``, so
    real computations never leave the rationals.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = as_fraction(re)
        self.im = as_fraction(im)

    @staticmethod
    def make(re, im=0) -> Scalar:
        im = as_fraction(im)
        if im == 0:
            return as_fraction(re)
        return GaussianRational(re, im)

    @staticmethod
    def _parts(x):
        if isinstance(x, GaussianRational):
            return x.re, x.im
        if isinstance(x, (int, Rational)):
            return Fraction(x), Fraction(0)
        return NotImplemented

    def __add__(self, other):
        p = self._parts(other)
        if p is NotImplemented:
            return p
        return GaussianRational.make(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = self._parts(other)
        if p is NotImplemented:
            return p
        return GaussianRational.make(self.re - p[0], self.im - p[1])

    def __rsub__(self, other):
        p = self._parts(other)
        if p is NotImplemented:
            return p
        return GaussianRational.make(p[0] - self.re, p[1] - self.im)

    def __mul__(self, other):
        p = self._parts(other)
        if p is NotImplemented:
            return p
        a, b = p
        return GaussianRational.make(self.re * a - self.im * b, self.re * b + self.im * a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = self._parts(other)
        if p is NotImplemented:
            return p
        a, b = p
        den = a * a + b * b
        if den == 0:
            raise ZeroDivisionError("division by zero")
        return GaussianRational.make(
            (self.re * a + self.im * b) / den, (self.im * a - self.re * b) / den
        )

    def __rtruediv__(self, other):
        p = self._parts(other)
        if p is NotImplemented:
            return p
        return GaussianRational(*p) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return GaussianRational.make(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.sqrt(self.abs2())

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __eq__(self, other):
        p = self._parts(other)
        if p is NotImplemented:
            return p
        return self.re == p[0] and self.im == p[1]

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return format_exact(self)


I = GaussianRational(0, 1)


def gauss(re, im=0) -> Scalar:
    return GaussianRational.make(re, im)


def conj(x):
    return x.conjugate()


def abs2(x) -> Fraction:
    """Squared modulus as an exact rational."""
    if isinstance(x, GaussianRational):
        return x.abs2()
    x = as_fraction(x)
    return x * x


def exact_modulus(x):
    """``|x|`` exactly when it is rational, else as a float."""
    if not isinstance(x, GaussianRational):
        return abs(as_fraction(x))
    return sqrt_if_rational(x.abs2())


def sqrt_if_rational(r: Fraction):
    r = as_fraction(r)
    num, den = math.isqrt(r.numerator), math.isqrt(r.denominator)
    if num * num == r.numerator and den * den == r.denominator:
        return Fraction(num, den)
    return math.sqrt(r)


def parse_scalar(text) -> Scalar:
    """Parse ``"p/q"``, ``"a+bi"`` style strings (or ints/Fractions) to an exact scalar."""
    if isinstance(text, (int, Fraction, GaussianRational)):
        return text if not isinstance(text, int) else Fraction(text)
    if isinstance(text, float):
        raise TypeError("floats are not accepted as exact scalars; pass a string like '1/3'")
    s = str(text).replace(" ", "").replace("j", "i")
    if not s.endswith("i"):
        return Fraction(s)
    body = s[:-1]
    # split at the last sign that is not leading and not part of an exponent
    cut = -1
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-":
            cut = k
            break
    if cut == -1:
        im = body if body not in ("", "+", "-") else body + "1"
        return gauss(0, Fraction(im))
    re, im = body[:cut], body[cut:]
    if im in ("+", "-"):
        im += "1"
    return gauss(Fraction(re), Fraction(im))


def format_exact(x) -> str:
    if isinstance(x, GaussianRational):
        if x.re == 0:
            return f"{x.im}i"
        sign = "+" if x.im > 0 else "-"
        return f"{x.re}{sign}{abs(x.im)}i"
    return str(as_fraction(x))


def approx(x):
    """Float (or complex) rendering of an exact scalar."""
    if isinstance(x, GaussianRational):
        return [float(x.re), float(x.im)]
    return float(x)


@dataclass(frozen=True)
class RootNScaled:
    """The exact number ``coeff / sqrt(N)``; finite-N moments of odd degree take this form."""

    coeff: Fraction
    N: int

    def __float__(self):
        return float(self.coeff) / math.sqrt(self.N)

    def __eq__(self, other):
        if isinstance(other, RootNScaled):
            return self.coeff * self.coeff * other.N == other.coeff * other.coeff * self.N and (
                (self.coeff >= 0) == (other.coeff >= 0) or self.coeff == 0
            )
        if self.coeff == 0:
            return other == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.coeff, self.N))

    def __str__(self):
        return f"{format_exact(self.coeff)}/sqrt({self.N})"


class QPoly:
    """Polynomial in a formal variable ``q`` with exact coefficients.

    Stored as a tuple of coefficients, lowest degree first, trailing zeros trimmed.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def q(cls):
        return cls((0, 1))

    @classmethod
    def q_integer(cls, k: int) -> "QPoly":
        """The q-integer ``[k]_q = 1 + q + ... + q^(k-1)``."""
        return cls((1,) * k)

    @staticmethod
    def _lift(x):
        if isinstance(x, QPoly):
            return x
        if isinstance(x, (int, Rational)):
            return QPoly((x,))
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = o.coeffs + (0,) * (n - len(o.coeffs))
        return QPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return QPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if not self.coeffs or not o.coeffs:
            return QPoly()
        out = [0] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] += a * b
        return QPoly(out)

    __rmul__ = __mul__

    def __call__(self, q):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"QPoly({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
                continue
            mono = "q" if k == 1 else f"q^{k}"
            terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms)

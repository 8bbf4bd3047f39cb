"""Exact rational and cyclotomic arithmetic.

Rationals are stdlib ``fractions.Fraction`` (always in lowest terms with a
positive denominator).  Cyclotomic numbers are elements of Q[z]/(Phi_N(z))
in the power basis 1, z, ..., z^(phi(N)-1); reduction happens modulo the
N-th cyclotomic polynomial, so the representation is a field and zero
testing agrees with zero testing of the complex value z = e^(2*pi*i/N).

Internally an element is stored as an integer coordinate vector over a
single positive denominator with gcd(content, den) = 1; this keeps the
hot arithmetic in plain integers with one normalization per operation.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import FieldOrderError

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" (or "p") into a Fraction."""
    return Fraction(text.strip())


def format_rational(q: Fraction) -> str:
    return str(q)


def _poly_divmod_int(num, den):
    """Exact division of integer polynomials (coefficient lists, low first)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(num) - len(den), -1, -1):
        c = num[k + len(den) - 1]
        if c % den[-1] != 0:
            raise ArithmeticError("inexact polynomial division")
        q = c // den[-1]
        out[k] = q
        for i, d in enumerate(den):
            num[k + i] -= q * d
    if any(num):
        raise ArithmeticError("nonzero remainder in cyclotomic construction")
    return out


def _cyclotomic_poly(n: int, _memo={}) -> list[int]:
    """Coefficients of Phi_n, low degree first, computed by exact division."""
    if n in _memo:
        return _memo[n]
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divmod_int(poly, _cyclotomic_poly(d))
    _memo[n] = poly
    return poly


class CyclotomicField:
    """The field Q(zeta_N) with zeta_N = e^(2*pi*i/N), N even."""

    _instances: dict[int, "CyclotomicField"] = {}

    def __new__(cls, order: int):
        if order in cls._instances:
            return cls._instances[order]
        if order <= 0 or order % 2 != 0:
            raise FieldOrderError(f"cyclotomic order must be a positive even integer, got {order}")
        self = super().__new__(cls)
        self.order = order
        phi_poly = _cyclotomic_poly(order)
        self.degree = len(phi_poly) - 1
        # x^k mod Phi_N for k = degree .. 2*degree-2, as integer tuples
        red = {}
        cur = [-c for c in phi_poly[:-1]]  # x^degree
        red[self.degree] = tuple(cur)
        for k in range(self.degree + 1, 2 * self.degree - 1):
            nxt = [0] + cur[:-1]
            top = cur[-1]
            if top:
                base = red[self.degree]
                for i in range(self.degree):
                    nxt[i] += top * base[i]
            cur = nxt
            red[k] = tuple(cur)
        self._reduction = red
        self._zero = None
        self._one = None
        cls._instances[order] = self
        return self

    def __repr__(self):
        return f"CyclotomicField({self.order})"

    def element(self, coords) -> "Cyclotomic":
        coords = [Fraction(c) for c in coords]
        if len(coords) != self.degree:
            raise ValueError("coordinate length mismatch")
        den = 1
        for c in coords:
            den = den * c.denominator // gcd(den, c.denominator)
        num = tuple(int(c * den) for c in coords)
        return Cyclotomic(self, num, den)

    def zero(self) -> "Cyclotomic":
        if self._zero is None:
            self._zero = Cyclotomic(self, (0,) * self.degree, 1)
        return self._zero

    def one(self) -> "Cyclotomic":
        if self._one is None:
            self._one = self.from_rational(1)
        return self._one

    def from_rational(self, q) -> "Cyclotomic":
        q = Fraction(q)
        num = [0] * self.degree
        num[0] = q.numerator
        return Cyclotomic(self, tuple(num), q.denominator)

    def zeta_power(self, k: int) -> "Cyclotomic":
        k %= self.order
        if k < self.degree:
            num = [0] * self.degree
            num[k] = 1
            return Cyclotomic(self, tuple(num), 1)
        if k in self._reduction:
            return Cyclotomic(self, tuple(self._reduction[k]), 1)
        half = self.zeta_power(k // 2)
        out = half * half
        if k % 2:
            out = out * self.zeta_power(1)
        return out

    def _reduce_int(self, conv: list[int]) -> tuple[int, ...]:
        """Reduce an integer convolution (length <= 2*degree-1) modulo Phi_N."""
        deg = self.degree
        for k in range(len(conv) - 1, deg - 1, -1):
            c = conv[k]
            if c:
                row = self._reduction[k]
                for i in range(deg):
                    if row[i]:
                        conv[i] += c * row[i]
        del conv[deg:]
        while len(conv) < deg:
            conv.append(0)
        return tuple(conv)


def _normalized(num, den):
    if den < 0:
        num = tuple(-x for x in num)
        den = -den
    g = den
    for x in num:
        if x:
            g = gcd(g, x)
            if g == 1:
                break
    if g > 1:
        num = tuple(x // g for x in num)
        den //= g
    return num, den


class Cyclotomic:
    """Immutable element of a fixed CyclotomicField."""

    __slots__ = ("field", "num", "den", "_hash")

    def __init__(self, field: CyclotomicField, num: tuple[int, ...], den: int = 1):
        if den != 1:
            num, den = _normalized(num, den)
        self.field = field
        self.num = num
        self.den = den
        self._hash = None

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.den) for x in self.num)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.order, self.num, self.den))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            return (self.field is other.field and self.num == other.num
                    and self.den == other.den)
        if isinstance(other, (int, Fraction)):
            return self == self.field.from_rational(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational cyclotomic")
        return Fraction(self.num[0], self.den)

    def _coerce(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            if other.field is not self.field:
                raise ValueError("mixed cyclotomic field orders")
            return other
        return self.field.from_rational(other)

    def __add__(self, other):
        other = self._coerce(other)
        da, db = self.den, other.den
        if da == db:
            num = tuple(x + y for x, y in zip(self.num, other.num))
            den = da
        else:
            g = gcd(da, db)
            ma, mb = db // g, da // g
            num = tuple(x * ma + y * mb for x, y in zip(self.num, other.num))
            den = da * mb
        return Cyclotomic(self.field, num, den)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        da, db = self.den, other.den
        if da == db:
            num = tuple(x - y for x, y in zip(self.num, other.num))
            den = da
        else:
            g = gcd(da, db)
            ma, mb = db // g, da // g
            num = tuple(x * ma - y * mb for x, y in zip(self.num, other.num))
            den = da * mb
        return Cyclotomic(self.field, num, den)

    def __neg__(self):
        out = Cyclotomic.__new__(Cyclotomic)
        out.field = self.field
        out.num = tuple(-x for x in self.num)
        out.den = self.den
        out._hash = None
        return out

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 1:
                return self
            return Cyclotomic(self.field, tuple(x * other for x in self.num), self.den)
        if isinstance(other, Fraction):
            return Cyclotomic(self.field,
                              tuple(x * other.numerator for x in self.num),
                              self.den * other.denominator)
        other = self._coerce(other)
        deg = self.field.degree
        if not any(self.num[1:]):
            a = self.num[0]
            if a == 0:
                return self.field.zero()
            return Cyclotomic(self.field, tuple(a * y for y in other.num),
                              self.den * other.den)
        if not any(other.num[1:]):
            b = other.num[0]
            if b == 0:
                return self.field.zero()
            return Cyclotomic(self.field, tuple(b * x for x in self.num),
                              self.den * other.den)
        conv = [0] * (2 * deg - 1)
        for i, a in enumerate(self.num):
            if a:
                for j, b in enumerate(other.num):
                    if b:
                        conv[i + j] += a * b
        num = self.field._reduce_int(conv)
        return Cyclotomic(self.field, num, self.den * other.den)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "Cyclotomic":
        """Field inverse via the extended Euclidean algorithm in Q[x]."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic")
        if self.is_rational():
            return self.field.from_rational(Fraction(self.den, self.num[0]))
        modulus = [Fraction(c) for c in _cyclotomic_poly(self.field.order)]
        r0, r1 = modulus, [Fraction(x, self.den) for x in self.num]
        s0, s1 = [_ZERO], [_ONE]
        while True:
            while r1 and not r1[-1]:
                r1.pop()
            if len(r1) == 1:
                inv = 1 / r1[0]
                coords = [c * inv for c in s1]
                coords = coords[: self.field.degree]
                coords += [_ZERO] * (self.field.degree - len(coords))
                return self.field.element(coords)
            q, r = _frac_poly_divmod(r0, r1)
            s = _frac_poly_sub(s0, _frac_poly_mul(q, s1))
            r0, r1 = r1, r
            s0, s1 = s1, s

    def __repr__(self):
        parts = []
        for k, c in enumerate(self.coords):
            if c:
                parts.append(f"{c}*z^{k}" if k else f"{c}")
        return "Cyc(" + (" + ".join(parts) if parts else "0") + f"; N={self.field.order})"

    def to_json(self) -> dict:
        return {
            "N": self.field.order,
            "coords": {str(k): str(c) for k, c in enumerate(self.coords) if c},
        }

    @classmethod
    def from_json(cls, data: dict) -> "Cyclotomic":
        field = CyclotomicField(int(data["N"]))
        coords = [_ZERO] * field.degree
        for k, v in data["coords"].items():
            coords[int(k)] = parse_rational(v)
        return field.element(coords)


def _frac_poly_divmod(a, b):
    a = list(a)
    b = list(b)
    while b and not b[-1]:
        b.pop()
    q = [_ZERO] * max(1, len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] / b[-1]
        q[k] = c
        if c:
            for i, d in enumerate(b):
                a[k + i] -= c * d
    while len(a) > 1 and not a[-1]:
        a.pop()
    return q, a


def _frac_poly_mul(a, b):
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _frac_poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [_ZERO] * (n - len(a))
    for i, y in enumerate(b):
        a[i] -= y
    return a


def root_of_unity(field: CyclotomicField, r) -> Cyclotomic:
    """The element whose complex embedding is e^(2*pi*i*r), r rational.

    Requires den(r) | N for the fixed field order N.
    """
    r = Fraction(r)
    if field.order % r.denominator != 0:
        raise FieldOrderError(
            f"root of unity e^(2*pi*i*{r}) needs order divisible by {r.denominator}; "
            f"field order is {field.order}"
        )
    k = (r.numerator * (field.order // r.denominator)) % field.order
    return field.zeta_power(k)


def is_rational_integer(z: Cyclotomic) -> bool:
    """True iff z lies in Z*1 after reduction mod Phi_N."""
    return z.den == 1 and not any(z.num[1:])


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out

"""Exact substrate: rationals, Q/Z phases, CRT and 2x2 integer matrices."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Rational = Fraction


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or int")
    return Fraction(x)


@dataclass(frozen=True)
class PhaseQZ:
    """A root of unity e^{2 pi i value}, value kept in [0, 1)."""

    value: Fraction = Fraction(0)

    def __post_init__(self):
        v = as_fraction(self.value)
        object.__setattr__(self, "value", v - math.floor(v))

    # group law is written multiplicatively
    def __mul__(self, other):
        if isinstance(other, PhaseQZ):
            return PhaseQZ(self.value + other.value)
        if other is ZERO:
            return ZERO
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "PhaseQZ":
        return PhaseQZ(self.value * k)

    def inverse(self) -> "PhaseQZ":
        return PhaseQZ(-self.value)

    def is_one(self) -> bool:
        return self.value == 0

    def __complex__(self) -> complex:
        return cmath.exp(2j * math.pi * float(self.value))

    def __str__(self) -> str:
        return f"phase({self.value})"


class _Zero:
    """The value of a character at a non-unit."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __mul__(self, other):
        if isinstance(other, (PhaseQZ, _Zero)):
            return self
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k == 0:
            return PhaseQZ(0)
        if k < 0:
            raise ZeroDivisionError("Zero has no inverse")
        return self

    def inverse(self):
        raise ZeroDivisionError("Zero has no inverse")

    def __complex__(self) -> complex:
        return 0j

    def __repr__(self) -> str:
        return "Zero"

    __str__ = __repr__

    def __reduce__(self):
        return (_Zero, ())


ZERO = _Zero()
UnitValue = Union[PhaseQZ, _Zero]


def phase_of_rational(x) -> PhaseQZ:
    return PhaseQZ(as_fraction(x))


def e_inf(x) -> PhaseQZ:
    # additive character x -> e^{2 pi i x}
    return PhaseQZ(as_fraction(x))


def crt_solve(congruences: Iterable[tuple[int, int]]) -> int:
    """Least x >= 0 with x = r_i mod m_i for all i.

    Non-coprime moduli are accepted when the residues agree on the overlap.
    """
    x, mod = 0, 1
    for r, m in congruences:
        if m <= 0:
            raise ValueError("moduli must be positive")
        r %= m
        g = math.gcd(mod, m)
        if (r - x) % g:
            raise ValueError("inconsistent congruences")
        lcm = mod // g * m
        if mod == 1:
            x = r
        else:
            # x + mod*t = r (mod m)
            t = ((r - x) // g) * pow(mod // g, -1, m // g) % (m // g) if m // g > 1 else 0
            x = x + mod * t
        mod = lcm
        x %= mod
    return x


def solve_linear(a: int, r: int, n: int) -> tuple[int, int] | None:
    """Solutions of a*x = r mod n as (x0, step), x0 least nonnegative; None if unsolvable."""
    a %= n
    r %= n
    g = math.gcd(a, n)
    if r % g:
        return None
    step = n // g
    if step == 1:
        return 0, 1
    x0 = (r // g) * pow(a // g, -1, step) % step
    return x0, step


def factorize(n: int) -> dict[int, int]:
    if n <= 0:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = as_fraction(x)
    if x == 0:
        raise ValueError("valuation of 0")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def factor_rational(x) -> dict[int, int]:
    """Signed exponents of a positive rational."""
    x = as_fraction(x)
    if x <= 0:
        raise ValueError("expected a positive rational")
    out = dict(factorize(x.numerator)) if x.numerator > 1 else {}
    if x.denominator > 1:
        for p, e in factorize(x.denominator).items():
            out[p] = out.get(p, 0) - e
    return out


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n):
        out = out // p * (p - 1)
    return out


def gamma0_index(n: int) -> int:
    out = n
    for p in factorize(n):
        out = out // p * (p + 1)
    return out


@dataclass(frozen=True)
class SL2Z:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant is not 1: {self}")

    def __matmul__(self, other):
        if isinstance(other, SL2Z):
            a, b, c, d = _mul4(self.tuple(), other.tuple())
            return SL2Z(a, b, c, d)
        if isinstance(other, GL2Q):
            return GL2QPlus.of(self) @ other
        return NotImplemented

    def tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def inverse(self) -> "SL2Z":
        return SL2Z(self.d, -self.b, -self.c, self.a)

    def act(self, z):
        """Moebius action on a cusp given as Fraction or None for infinity."""
        if z is None:
            return None if self.c == 0 else Fraction(self.a, self.c)
        den = self.c * z + self.d
        if den == 0:
            return None
        return (self.a * z + self.b) / den

    def __str__(self) -> str:
        return f"({self.a},{self.b};{self.c},{self.d})"


@dataclass(frozen=True)
class GL2Q:
    """Invertible 2x2 rational matrix."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        self._check()

    def _check(self):
        if self.det() == 0:
            raise ValueError("matrix is singular")

    @classmethod
    def of(cls, m):
        return cls(*m.tuple())

    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def tuple(self):
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other):
        if isinstance(other, SL2Z):
            other = GL2QPlus.of(other)
        if not isinstance(other, GL2Q):
            return NotImplemented
        prod = _mul4(self.tuple(), other.tuple())
        if isinstance(self, GL2QPlus) and isinstance(other, GL2QPlus):
            return GL2QPlus(*prod)
        return GL2Q(*prod)

    def __rmatmul__(self, other):
        if isinstance(other, SL2Z):
            return GL2QPlus.of(other) @ self
        return NotImplemented

    def inverse(self):
        D = self.det()
        return type(self)(self.d / D, -self.b / D, -self.c / D, self.a / D)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.tuple())

    def to_sl2z(self) -> SL2Z:
        if not self.is_integral() or self.det() != 1:
            raise ValueError("not in SL2(Z)")
        return SL2Z(*(int(x) for x in self.tuple()))

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in (self.a, self.b)) + ";" + ",".join(str(x) for x in (self.c, self.d)) + ")"


@dataclass(frozen=True)
class GL2QPlus(GL2Q):
    """Rational 2x2 matrix with positive determinant."""

    def _check(self):
        if self.det() <= 0:
            raise ValueError("determinant must be positive")


def _mul4(x, y):
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def translation(j) -> SL2Z | GL2QPlus:
    if isinstance(j, int):
        return SL2Z(1, j, 0, 1)
    return GL2QPlus(1, j, 0, 1)


def diag(x, y) -> GL2QPlus:
    return GL2QPlus(x, 0, 0, y)


def complete_to_sl2(c: int, d: int) -> SL2Z:
    """SL2(Z) matrix with bottom row (c, d).

    Canonical top row: when d != 0 the top-right entry b is taken in [0, |d|);
    when d = 0 the matrix is (0, -sign(c); c, 0).
    """
    if math.gcd(c, d) != 1:
        raise ValueError("not unimodular row")
    if d == 0:
        return SL2Z(0, -c, c, 0)  # c = +-1, so -sign(c) = -c
    # a*d - b*c = 1  =>  -b*c = 1 (mod d)
    ad = abs(d)
    if ad == 1:
        b = 0
    else:
        b = (-pow(c, -1, ad)) % ad
    a = (1 + b * c) // d
    return SL2Z(a, b, c, d)


def lift_row(c: int, d: int, n: int) -> tuple[int, int]:
    """Integer pair (c', d') = (c, d) mod n with gcd(c', d') = 1."""
    c %= n
    d %= n
    if math.gcd(math.gcd(c, d), n) != 1:
        raise ValueError("row is not primitive mod n")
    if n == 1:
        return 0, 1
    if c == 0:
        c = n
    while math.gcd(c, d) != 1:
        d += n
    return c, d

"""Cusp classes of Gamma0(N): representatives, widths, cusp parameters, reduction."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .dirichlet import CharComponent, DirichletCharacter, chi_tilde
from .exactnum import (ZERO, PhaseQZ, SL2Z, UnitValue, complete_to_sl2, crt_solve, factorize,
                       is_prime, solve_linear, translation)


@dataclass(frozen=True)
class PrimeTag:
    """One prime-power representative: 'inf', 'zero', or 1/(c1 q^l)."""

    q: int
    e: int
    kind: str
    c1: int = 0
    l: int = 0

    @property
    def modulus(self) -> int:
        return self.q ** self.e

    def bottom_row(self) -> tuple[int, int]:
        if self.kind == "inf":
            return (0, 1)
        if self.kind == "zero":
            return (1, 0)
        return (self.q ** self.l * self.c1, 1)

    def gamma(self) -> SL2Z:
        return complete_to_sl2(*self.bottom_row())

    @property
    def width(self) -> int:
        if self.kind == "inf":
            return 1
        if self.kind == "zero":
            return self.modulus
        return self.q ** max(self.e - 2 * self.l, 0)

    @property
    def small(self) -> bool:
        """True for 1/(c1 q^l) with l <= e/2."""
        return self.kind == "fin" and 2 * self.l <= self.e

    @property
    def eprime(self) -> int:
        return {"inf": 0, "zero": self.e}.get(self.kind, self.e - self.l)

    def label(self) -> str:
        if self.kind == "inf":
            return "inf"
        if self.kind == "zero":
            return "0"
        return f"1/{self.c1 * self.q ** self.l}"


def enumerate_prime_power(q: int, e: int) -> list[PrimeTag]:
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if e < 1:
        raise ValueError("exponent must be positive")
    out = [PrimeTag(q, e, "inf"), PrimeTag(q, e, "zero")]
    for l in range(1, e):
        for c1 in range(1, min(q ** l, q ** (e - l))):
            if c1 % q:
                out.append(PrimeTag(q, e, "fin", c1, l))
    return out


def g_matrix(gamma: SL2Z, width: int) -> SL2Z:
    return gamma @ translation(width) @ gamma.inverse()


def cusp_parameter_prime_power(q: int, e: int, l: int, c1: int, comp: CharComponent) -> Fraction:
    """Cusp parameter of 1/(c1 q^l) for a character mod q^e, by the c0-scaling rule."""
    if not (1 <= l < e) or c1 % q == 0 or not (1 <= c1 < min(q ** l, q ** (e - l))):
        raise ValueError("cusp out of range")
    top = max(l, e - l)
    e0 = comp.conductor_exponent()
    if top >= e0:
        return Fraction(0)
    Q = q ** (e0 - top)
    target = Fraction(1, Q)
    c0 = _least_c0(q, e, top, comp, target)
    # c1 = r c0 (mod Q)
    r = c1 * pow(c0, -1, Q) % Q
    return (r * target) % 1


def _least_c0(q, e, top, comp, target) -> int:
    c = 1
    while True:
        if c % q and comp(1 + c * q ** top) == PhaseQZ(target):
            return c
        c += 1
        if c > q ** e:
            raise RuntimeError("no c0 found; character table is inconsistent")


def direct_cusp_parameter(gamma: SL2Z, width: int, chi: DirichletCharacter) -> Fraction:
    val = chi_tilde(chi, g_matrix(gamma, width))
    if val is ZERO:
        raise ValueError("g_a is not in Gamma0(N)")
    return val.value


def orbit_key(c: int, d: int, n: int) -> tuple[int, int]:
    """Lexicographically least element of the (units x Gamma_inf)-orbit of (c, d) mod n."""
    c %= n
    d %= n
    if n == 1:
        return (0, 0)
    g = math.gcd(c, n)
    if math.gcd(g, d) != 1:
        raise ValueError("row is not primitive mod n")
    h = n // g
    # unit u0 with u0 * c = g (mod n)
    u0 = pow(c // g, -1, h) if h > 1 else 1
    while math.gcd(u0, n) != 1:
        u0 += h
    d0 = u0 * d % n
    mod = g if g < n else n
    best = None
    for s in range(g):
        u = 1 + h * s
        if math.gcd(u, n) != 1:
            continue
        v = u * d0 % mod
        if best is None or v < best:
            best = v
    return (g % n, best)


@dataclass(frozen=True)
class CuspGeometry:
    id: int
    tags: tuple  # PrimeTag per prime, increasing primes
    gamma: SL2Z
    width: int

    @property
    def cusp(self) -> Fraction | None:
        return self.gamma.act(None)

    def label(self) -> str:
        return cusp_label(self.cusp)


def cusp_label(x: Fraction | None) -> str:
    if x is None:
        return "inf"
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_cusp(s: str) -> Fraction | None:
    s = s.strip()
    if s in ("inf", "oo", "infinity"):
        return None
    try:
        if "/" in s:
            a, b = s.split("/", 1)
            a, b = int(a), int(b)
            if b == 0:
                return None if abs(a) == 1 else _bad(s)
            if math.gcd(a, b) != 1:
                raise ValueError(f"cusp {s!r} is not in lowest terms")
            return Fraction(a, b)
        return Fraction(int(s))
    except ValueError as exc:
        raise ValueError(str(exc) if "lowest" in str(exc) else f"malformed cusp {s!r}") from None


def _bad(s):
    raise ValueError(f"malformed cusp {s!r}")


@dataclass(frozen=True)
class CuspLayout:
    """Character-independent part of the cusp table."""

    N: int
    classes: tuple
    lookup: dict

    def __hash__(self):
        return hash(self.N)

    def find(self, c: int, d: int) -> int:
        return self.lookup[orbit_key(c, d, self.N)]


@lru_cache(maxsize=None)
def cusp_layout(n: int) -> CuspLayout:
    if n < 1:
        raise ValueError("level must be positive")
    fac = sorted(factorize(n).items()) if n > 1 else []
    per = [enumerate_prime_power(q, e) for q, e in fac]
    classes = []
    lookup = {}
    for i, combo in enumerate(itertools.product(*per)):
        c = crt_solve([(t.bottom_row()[0], t.modulus) for t in combo]) if combo else 0
        d = crt_solve([(t.bottom_row()[1], t.modulus) for t in combo]) if combo else 1
        if c == 0:
            d = 1
        while math.gcd(c, d) != 1:
            d += n
        gamma = complete_to_sl2(c, d)
        width = math.lcm(*(t.width for t in combo)) if combo else 1
        classes.append(CuspGeometry(i, tuple(combo), gamma, width))
        key = orbit_key(c, d, n)
        if key in lookup:
            raise RuntimeError("two representatives share an orbit")
        lookup[key] = i
    return CuspLayout(n, tuple(classes), lookup)


@dataclass(frozen=True)
class CuspClass:
    id: int
    bottom_row: tuple[int, int]
    gamma: SL2Z
    m: int
    mu: Fraction
    tags: tuple
    prime_mus: tuple

    @property
    def cusp(self) -> Fraction | None:
        return self.gamma.act(None)

    def label(self) -> str:
        return cusp_label(self.cusp)

    def tag(self, q: int) -> PrimeTag:
        for t in self.tags:
            if t.q == q:
                return t
        raise KeyError(q)


@dataclass(frozen=True)
class CuspTable:
    N: int
    chi: DirichletCharacter
    classes: tuple
    layout: CuspLayout

    @property
    def lookup(self) -> dict:
        return self.layout.lookup

    def __hash__(self):
        return hash((self.N, self.chi))

    def __len__(self):
        return len(self.classes)

    def __getitem__(self, i) -> CuspClass:
        return self.classes[i]

    def find_row(self, c: int, d: int) -> int:
        return self.layout.find(c, d)

    def class_of(self, x: Fraction | None) -> int:
        return reduce_cusp(x, self).class_id

    def by_label(self, s: str) -> CuspClass:
        return self.classes[self.class_of(parse_cusp(s))]


def prime_cusp_parameter(tag: PrimeTag, chi: DirichletCharacter) -> Fraction:
    if tag.kind != "fin":
        return Fraction(0)
    return cusp_parameter_prime_power(tag.q, tag.e, tag.l, tag.c1, chi.component(tag.q))


def build_cusp_table(n: int, chi: DirichletCharacter) -> CuspTable:
    if chi.modulus != n:
        raise ValueError(f"character modulus {chi.modulus} does not match level {n}")
    return _build(n, chi)


@lru_cache(maxsize=4096)
def _build(n: int, chi: DirichletCharacter) -> CuspTable:
    layout = cusp_layout(n)
    classes = []
    for geo in layout.classes:
        mus = tuple(prime_cusp_parameter(t, chi) for t in geo.tags)
        mu = sum((Fraction(geo.width // t.width) * m for t, m in zip(geo.tags, mus)), Fraction(0)) % 1
        row = (geo.gamma.c % n, geo.gamma.d % n)
        classes.append(CuspClass(geo.id, row, geo.gamma, geo.width, mu, geo.tags, mus))
    return CuspTable(n, chi, tuple(classes), layout)


# ---- reduction -------------------------------------------------------------

def matrix_for_cusp(x: Fraction | None) -> SL2Z:
    """A fixed SL2(Z) matrix sending infinity to x."""
    if x is None:
        return SL2Z(1, 0, 0, 1)
    a, b = x.numerator, x.denominator
    s = complete_to_sl2(-b, a)  # inverse has first column (a, b)
    return s.inverse()


@dataclass(frozen=True)
class Normalized:
    """g = gamma0 * gamma_b * T^j with gamma0 in Gamma0(N) and 0 <= j < m_b."""

    class_id: int
    j: int
    gamma0: SL2Z


def normalize_matrix(g: SL2Z, layout: CuspLayout) -> Normalized:
    n = layout.N
    b = layout.find(g.c, g.d)
    geo = layout.classes[b]
    A, B, C, D = geo.gamma.tuple()
    # lower-left of g T^{-j} gamma_b^{-1} is  c*D - d*C + j*c*C
    sol = solve_linear(g.c * C, g.d * C - g.c * D, n)
    if sol is None:
        raise RuntimeError("bottom row is not in the orbit of the chosen class")
    j = sol[0] % geo.width
    gamma0 = g @ translation(-j) @ geo.gamma.inverse()
    if gamma0.c % n:
        raise RuntimeError("normalization failed")
    return Normalized(b, j, gamma0)


@dataclass(frozen=True)
class CuspReduction:
    class_id: int
    gamma0: SL2Z
    j: int
    gamma_x: SL2Z
    chi0: UnitValue
    m: int
    mu: Fraction

    def coefficient_factor(self, n: int) -> PhaseQZ:
        """A(gamma_x, n) = factor * A(gamma_a, n)."""
        return self.chi0 * PhaseQZ((n + self.mu) * self.j / self.m)


def reduce_cusp(x: Fraction | None, table: CuspTable) -> CuspReduction:
    gx = matrix_for_cusp(x)
    nm = normalize_matrix(gx, table.layout)
    cls = table.classes[nm.class_id]
    return CuspReduction(nm.class_id, nm.gamma0, nm.j, gx, chi_tilde(table.chi, nm.gamma0), cls.m, cls.mu)


def unit_action(a: int, class_id: int, table: CuspTable | CuspLayout) -> int:
    layout = table.layout if isinstance(table, CuspTable) else table
    n = layout.N
    if math.gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit mod {n}")
    g = layout.classes[class_id].gamma
    return layout.find(a * g.c, g.d)

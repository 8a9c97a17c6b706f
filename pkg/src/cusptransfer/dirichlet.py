"""Dirichlet characters as products of prime-power value tables."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exactnum import ZERO, PhaseQZ, SL2Z, UnitValue, factorize


@dataclass(frozen=True)
class CharComponent:
    q: int
    e: int
    values: dict  # unit residue mod q^e -> Fraction in [0, 1)

    @property
    def modulus(self) -> int:
        return self.q ** self.e

    def __hash__(self):
        return hash((self.q, self.e, tuple(sorted(self.values.items()))))

    def __eq__(self, other):
        return isinstance(other, CharComponent) and (self.q, self.e, self.values) == (other.q, other.e, other.values)

    def __call__(self, d: int) -> UnitValue:
        d %= self.modulus
        if d % self.q == 0:
            return ZERO
        return PhaseQZ(self.values[d])

    def conductor_exponent(self) -> int:
        """Least e0 with the component trivial on units = 1 mod q^e0."""
        Q = self.modulus
        for e0 in range(self.e + 1):
            step = self.q ** e0
            if all(self.values[u] == 0 for u in range(1, Q, step) if u % self.q):
                return e0
        return self.e  # not reached

    def is_trivial(self) -> bool:
        return all(v == 0 for v in self.values.values())


def unit_group_generators(q: int, e: int) -> list[tuple[int, int]]:
    """Generators of (Z/q^e)^x with their orders, in the order used by the grammar."""
    Q = q ** e
    if q == 2:
        if e == 1:
            return [(1, 1)]
        if e == 2:
            return [(3, 2)]
        return [(Q - 1, 2), (5, 2 ** (e - 2))]
    phi = Q // q * (q - 1)
    return [(_primitive_root(q, e), phi)]


@lru_cache(maxsize=None)
def _primitive_root(q: int, e: int) -> int:
    Q = q ** e
    phi = Q // q * (q - 1)
    primes = list(factorize(phi))
    for g in range(2, Q):
        if g % q and all(pow(g, phi // r, Q) != 1 for r in primes):
            return g
    return 1


def component_from_generators(q: int, e: int, gens: list[tuple[int, Fraction]]) -> CharComponent:
    Q = q ** e
    table: dict[int, Fraction] = {1 % Q: Fraction(0)}
    frontier = [1 % Q]
    for g, r in gens:
        g %= Q
        if g % q == 0:
            raise ValueError(f"generator {g} is not a unit mod {Q}")
        if g in table and table[g] != r % 1:
            raise ValueError(f"value order does not divide generator order for {g}")
    # breadth-first closure under multiplication by the generators
    while frontier:
        nxt = []
        for x in frontier:
            for g, r in gens:
                y = x * g % Q
                v = (table[x] + r) % 1
                if y in table:
                    if table[y] != v:
                        raise ValueError(f"value order does not divide generator order for {g % Q}")
                else:
                    table[y] = v
                    nxt.append(y)
        frontier = nxt
    phi = Q // q * (q - 1)
    if len(table) != phi:
        raise ValueError(f"generators do not generate the units mod {Q}")
    return CharComponent(q, e, table)


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    components: tuple  # CharComponent per prime power, increasing primes
    conductor: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.conductor:
            cond = 1
            for comp in self.components:
                cond *= comp.q ** comp.conductor_exponent()
            object.__setattr__(self, "conductor", cond)

    def __call__(self, d: int) -> UnitValue:
        if math.gcd(d, self.modulus) != 1:
            return ZERO
        out = PhaseQZ(0)
        for comp in self.components:
            out = out * comp(d)
        return out

    def component(self, q: int) -> CharComponent:
        for comp in self.components:
            if comp.q == q:
                return comp
        raise KeyError(q)

    def is_trivial(self) -> bool:
        return all(c.is_trivial() for c in self.components)

    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def spec(self) -> str:
        return format_character(self)

    def __str__(self) -> str:
        return self.spec()


def char_eval(chi: DirichletCharacter, d: int) -> UnitValue:
    return chi(d)


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor


def trivial_character(n: int) -> DirichletCharacter:
    comps = []
    for q, e in sorted(factorize(n).items()) if n > 1 else []:
        Q = q ** e
        comps.append(CharComponent(q, e, {u: Fraction(0) for u in range(1, Q) if u % q}))
    return DirichletCharacter(n, tuple(comps))


def make_character(n: int, gens_by_prime: dict[int, list[tuple[int, Fraction]]]) -> DirichletCharacter:
    comps = []
    fac = sorted(factorize(n).items()) if n > 1 else []
    for q, e in fac:
        gens = gens_by_prime.get(q)
        if gens is None:
            gens = [(g, Fraction(0)) for g, _ in unit_group_generators(q, e)]
        comps.append(component_from_generators(q, e, gens))
    return DirichletCharacter(n, tuple(comps))


@dataclass(frozen=True)
class PrimitiveDecomposition:
    primitive_part: DirichletCharacter
    trivial_part_modulus: int


def primitive_decomposition(chi: DirichletCharacter) -> PrimitiveDecomposition:
    f = chi.conductor
    comps = []
    for comp in chi.components:
        e0 = comp.conductor_exponent()
        if e0 == 0:
            continue
        Q0 = comp.q ** e0
        vals = {}
        for u in range(1, Q0):
            if u % comp.q:
                vals[u] = comp.values[u]  # u < Q0 <= q^e is already a residue mod q^e
        comps.append(CharComponent(comp.q, e0, vals))
    return PrimitiveDecomposition(DirichletCharacter(f, tuple(comps)), chi.modulus)


def idelic_component(comp: CharComponent, place: int, k: int, j: int = 1) -> UnitValue:
    """Local component at a place of the idelic lift of a prime-power character.

    At a place v different from q the element is v^k times a unit and the value is chi(v)^k.
    At v = q the element lies in q^k (j + q^f Z_q) and the value is chi(j)^{-1}.
    """
    if place != comp.q:
        val = comp(place)
        if val is ZERO:  # cannot happen for v != q, kept for safety
            return ZERO
        return val ** k
    if j % comp.q == 0:
        raise ValueError("j is not a unit at this place")
    return comp(j).inverse()


def chi_tilde(chi: DirichletCharacter, gamma: SL2Z) -> UnitValue:
    if gamma.c % chi.modulus:
        raise ValueError("not in Gamma0(N)")
    return chi(gamma.d)


# ---- enumeration -----------------------------------------------------------

def component_characters(q: int, e: int) -> list[CharComponent]:
    gens = unit_group_generators(q, e)
    out = []
    for ks in itertools.product(*(range(order) for _, order in gens)):
        spec = [(g, Fraction(k, order)) for (g, order), k in zip(gens, ks)]
        out.append(component_from_generators(q, e, spec))
    return out


def all_characters(n: int) -> list[DirichletCharacter]:
    if n == 1:
        return [DirichletCharacter(1, ())]
    per = [component_characters(q, e) for q, e in sorted(factorize(n).items())]
    return [DirichletCharacter(n, tuple(c)) for c in itertools.product(*per)]


# ---- grammar ---------------------------------------------------------------

def char_parse(spec: str, n: int) -> DirichletCharacter:
    """Parse `trivial` or `mod=<N>;gen=<u>:<r>[,...][;comp=<u>:<r>[,...]]...`.

    Each gen list belongs to one prime-power factor of N, in increasing prime order.
    A `comp=` section may also be written `comp=gen=...`.
    """
    spec = spec.strip()
    if spec == "trivial":
        return trivial_character(n)
    parts = spec.split(";")
    if not parts[0].startswith("mod="):
        raise ValueError(f"malformed character spec: {spec!r}")
    try:
        mod = int(parts[0][4:])
    except ValueError:
        raise ValueError(f"malformed modulus in {spec!r}") from None
    if mod != n:
        raise ValueError(f"character modulus {mod} does not match level {n}")
    lists = []
    for i, part in enumerate(parts[1:]):
        if i == 0:
            if not part.startswith("gen="):
                raise ValueError(f"expected gen= in {spec!r}")
            body = part[4:]
        else:
            if not part.startswith("comp="):
                raise ValueError(f"expected comp= in {spec!r}")
            body = part[5:]
            if body.startswith("gen="):
                body = body[4:]
        lists.append(_parse_gen_list(body, spec))
    fac = sorted(factorize(n).items()) if n > 1 else []
    if len(lists) != len(fac):
        raise ValueError(f"expected {len(fac)} generator lists, got {len(lists)}")
    comps = []
    for (q, e), gens in zip(fac, lists):
        if q == 2 and e >= 3:
            Q = 2 ** e
            if sorted(g % Q for g, _ in gens) != sorted([Q - 1, 5]) or len(gens) != 2:
                raise ValueError(f"mod {Q} needs exactly the generators {Q - 1} and 5")
        comps.append(component_from_generators(q, e, gens))
    return DirichletCharacter(n, tuple(comps))


def _parse_gen_list(body: str, spec: str) -> list[tuple[int, Fraction]]:
    out = []
    for item in body.split(","):
        if ":" not in item:
            raise ValueError(f"malformed generator {item!r} in {spec!r}")
        u, r = item.split(":", 1)
        try:
            out.append((int(u), Fraction(r) % 1))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"malformed generator {item!r} in {spec!r}") from None
    if not out:
        raise ValueError(f"empty generator list in {spec!r}")
    return out


def format_character(chi: DirichletCharacter) -> str:
    if chi.is_trivial():
        return "trivial"
    lists = []
    for comp in chi.components:
        items = []
        for g, _ in unit_group_generators(comp.q, comp.e):
            items.append(f"{g}:{comp.values[g % comp.modulus]}")
        lists.append(",".join(items))
    return f"mod={chi.modulus};gen=" + ";comp=".join(lists)

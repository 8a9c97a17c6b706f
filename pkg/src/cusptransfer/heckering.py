"""Hecke operators in the group ring, their normal forms modulo Gamma0(N), and three-term data."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .cusps import CuspClass, CuspLayout, CuspTable, cusp_layout, normalize_matrix, unit_action
from .dirichlet import DirichletCharacter
from .exactnum import (ZERO, GL2QPlus, PhaseQZ, SL2Z, UnitValue, complete_to_sl2, crt_solve, e_inf, lift_row,
                       translation)


# ---- group ring elements ---------------------------------------------------

@dataclass(frozen=True)
class Term:
    """phase * g * U with g in SL2(Z) and U upper triangular of determinant p."""

    phase: UnitValue
    g: SL2Z
    U: GL2QPlus

    @property
    def matrix(self) -> GL2QPlus:
        return self.g @ self.U


@dataclass(frozen=True)
class GroupRingElement:
    terms: tuple

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        return GroupRingElement(self.terms + other.terms)

    def __len__(self):
        return len(self.terms)

    def scaled(self, phase: UnitValue) -> "GroupRingElement":
        return GroupRingElement(tuple(Term(phase * t.phase, t.g, t.U) for t in self.terms))


def xi_diag(p: int) -> GL2QPlus:
    return GL2QPlus(p, 0, 0, 1)


def xi_upper(i: int, p: int) -> GL2QPlus:
    return GL2QPlus(1, i, 0, p)


def hecke_coset_reps(p: int) -> list[GL2QPlus]:
    return [xi_diag(p)] + [xi_upper(i, p) for i in range(p)]


def s_rep(c: int, d: int, n: int) -> SL2Z:
    """A fixed SL2(Z) matrix whose bottom row is (c, d) mod n."""
    return complete_to_sl2(*lift_row(c, d, n))


def hecke_expand(p: int, gamma: SL2Z, N: int, chi: DirichletCharacter | None = None) -> GroupRingElement:
    """T_p gamma rewritten modulo the ideal as SL2(Z) representatives times coset matrices.

    All phases are trivial: the chi(p) of the Hecke operator is absorbed by the
    choice of representative for the first term.
    """
    if N % p == 0:
        raise ValueError(f"p = {p} divides N = {N}")
    c, d = gamma.c, gamma.d
    terms = [Term(PhaseQZ(0), s_rep(c, p * d, N), xi_diag(p))]
    for i in range(p):
        terms.append(Term(PhaseQZ(0), s_rep(p * c, d - i * c, N), xi_upper(i, p)))
    return GroupRingElement(tuple(terms))


def swap_coset(xi: GL2QPlus, gamma: SL2Z, p: int) -> tuple[SL2Z, GL2QPlus]:
    """The unique (gamma', xi') with xi * gamma = gamma' * xi' and xi' a coset matrix."""
    m = xi @ gamma
    for cand in hecke_coset_reps(p):
        h = m @ cand.inverse()
        if h.is_integral():
            return h.to_sl2z(), cand
    raise RuntimeError("no coset matrix matches")


def hecke_direct(p: int, gamma: SL2Z, chi: DirichletCharacter) -> GroupRingElement:
    """T_p gamma = chi(p) diag(p,1) gamma + sum (1,b;0,p) gamma, each term moved to g * xi form."""
    terms = []
    for k, xi in enumerate(hecke_coset_reps(p)):
        g, xi2 = swap_coset(xi, gamma, p)
        ph = chi(p) if k == 0 else PhaseQZ(0)
        terms.append(Term(ph, g, xi2))
    return GroupRingElement(tuple(terms))


# ---- normal form -----------------------------------------------------------

@dataclass(frozen=True)
class NormalTerm:
    phase: UnitValue
    class_id: int
    j: int
    xi: tuple  # ("diag",) or ("upper", i)

    def key(self):
        return (self.class_id, self.j, self.xi)


@dataclass(frozen=True)
class NormalForm:
    terms: tuple

    def multiset(self) -> Counter:
        return Counter((t.key(), t.phase if t.phase is ZERO else t.phase.value) for t in self.terms)

    def __eq__(self, other):
        return isinstance(other, NormalForm) and self.multiset() == other.multiset()

    def __hash__(self):
        return hash(frozenset(self.multiset().items()))


@dataclass(frozen=True)
class _Skeleton:
    """Character-free data of one normalized term: the phase is
    base * prod chi(args) * e(wraps * mu_class)."""

    key: tuple
    base: Fraction
    args: tuple
    wraps: int


def _skeleton(g: SL2Z, U: GL2QPlus, p: int, layout: CuspLayout, base=Fraction(0), args=()) -> _Skeleton:
    if U.c != 0 or not U.is_integral():
        raise ValueError("coset part must be integral upper triangular")
    nm = normalize_matrix(g, layout)
    width = layout.classes[nm.class_id].width
    a, x, d = int(U.a), int(U.b), int(U.d)
    if (a, d) == (p, 1):
        # T^j (p, x; 0, 1) = (p, x + j; 0, 1)
        wraps, jr = divmod(x + nm.j, width)
        key = (nm.class_id, jr, ("diag",))
        xi = xi_diag(p)
    elif (a, d) == (1, p):
        wraps, r = divmod(x + nm.j * p, p * width)
        key = (nm.class_id, r // p, ("upper", r % p))
        xi = xi_upper(r % p, p)
    else:
        raise ValueError("coset part must be (p, x; 0, 1) or (1, x; 0, p)")
    rebuilt = nm.gamma0 @ layout.classes[nm.class_id].gamma @ translation(wraps * width + key[1]) @ xi
    if rebuilt.tuple() != (g @ U).tuple():
        raise RuntimeError("normal form identity failed")
    return _Skeleton(key, base, tuple(args) + (nm.gamma0.d,), wraps)


def _apply_character(sk: _Skeleton, table: CuspTable) -> NormalTerm:
    ph: UnitValue = PhaseQZ(sk.base)
    for a in sk.args:
        ph = ph * table.chi(a)
    cls = table.classes[sk.key[0]]
    ph = ph * PhaseQZ(cls.mu * sk.wraps)
    return NormalTerm(ph, sk.key[0], sk.key[1], sk.key[2])


def normalize(el: GroupRingElement, table: CuspTable) -> NormalForm:
    """Rewrite each term as phase * gamma_b * T^j * xi modulo the ideal."""
    out = []
    p = None
    for t in el.terms:
        det = t.U.det()
        p = int(det)
        sk = _skeleton(t.g, t.U, p, table.layout)
        nt = _apply_character(sk, table)
        out.append(NormalTerm(t.phase * nt.phase, nt.class_id, nt.j, nt.xi))
    return NormalForm(tuple(out))


# ---- three-term data -------------------------------------------------------

@dataclass(frozen=True)
class PrimeThreeTerm:
    q: int
    e: int
    kind: str
    lam1: int  # lambda'
    lam2: int  # lambda''
    j1: int  # j'
    j2: int  # j''
    eprime: int
    c1p: int | None = None
    c1pp: int | None = None


@dataclass(frozen=True)
class ThreeTermDatum:
    source: int
    p: int
    aprime: int
    adoubleprime: int
    jprime: int
    jdoubleprime: int
    lambdaprime: int
    lambdadoubleprime: int
    Nprime: int
    per_prime: tuple = ()

    @property
    def shift(self) -> int:
        """Residue class mod N' of the translations b in the a'-term."""
        return self.p * self.jprime % self.Nprime

    def text(self, table: CuspTable) -> str:
        lab = lambda i: table.classes[i].label()
        return (f"a'={lab(self.aprime)} a''={lab(self.adoubleprime)} j'={self.jprime} j''={self.jdoubleprime} "
                f"l'={self.lambdaprime} l''={self.lambdadoubleprime} N'={self.Nprime}")


def prime_three_term(tag, p: int) -> PrimeThreeTerm:
    q, e = tag.q, tag.e
    Q = q ** e
    if tag.kind == "inf":
        return PrimeThreeTerm(q, e, "inf", 1, p % Q, 0, 0, 0)
    if tag.kind == "zero":
        return PrimeThreeTerm(q, e, "zero", p % Q, 1, 0, 0, e)
    l, c1 = tag.l, tag.c1
    if 2 * l >= e:
        return PrimeThreeTerm(q, e, "fin", 1, p % Q, 0, 0, e - l)
    ql = q ** l
    mod = q ** (e - l)
    c1pp = c1 * pow(p, -1, ql) % ql
    c1p = c1 * p % ql
    j2 = next(j for j in range(mod) if (c1pp * (p - j * ql * c1) - c1) % Q == 0)
    j1 = next(j for j in range(mod) if ((1 - ql * c1 * j * p) * c1p - c1 * p) % Q == 0)
    lam1 = p * c1 * pow(c1p, -1, Q) % Q
    lam2 = c1 * pow(c1pp, -1, Q) % Q
    return PrimeThreeTerm(q, e, "fin", lam1, lam2, j1, j2, e - l, c1p, c1pp)


def three_term_data(cls: CuspClass, p: int, table: CuspTable) -> ThreeTermDatum:
    N = table.N
    if N % p == 0:
        raise ValueError(f"p = {p} divides N = {N}")
    per = tuple(prime_three_term(t, p) for t in cls.tags)
    Nprime = 1
    for r in per:
        Nprime *= r.q ** r.eprime
    lam1 = crt_solve([(r.lam1, r.q ** r.e) for r in per]) if per else 1
    lam2 = crt_solve([(r.lam2, r.q ** r.e) for r in per]) if per else 1
    j1 = crt_solve([(r.j1, r.q ** r.eprime) for r in per]) if per else 0
    j2 = crt_solve([(r.j2, r.q ** r.eprime) for r in per]) if per else 0
    lam1 = lam1 or N
    lam2 = lam2 or N
    aprime = unit_action(p % N if N > 1 else 1, cls.id, table)
    adouble = unit_action(pow(p, -1, N) if N > 1 else 1, cls.id, table)
    return ThreeTermDatum(cls.id, p, aprime, adouble, j1, j2, lam1, lam2, Nprime, per)


def three_term_rhs(datum: ThreeTermDatum, table: CuspTable | CuspLayout) -> list[tuple[int, SL2Z, GL2QPlus]]:
    """(character argument, g, U) for each term on the right-hand side."""
    layout = table.layout if isinstance(table, CuspTable) else table
    p = datum.p
    g2 = layout.classes[datum.adoubleprime].gamma
    g1 = layout.classes[datum.aprime].gamma
    out = [(datum.lambdadoubleprime, g2, GL2QPlus(p, datum.jdoubleprime, 0, 1))]
    b = datum.shift
    while b < datum.Nprime * p:
        out.append((datum.lambdaprime, g1, GL2QPlus(1, b, 0, p)))
        b += datum.Nprime
    return out


@lru_cache(maxsize=65536)
def _three_term_skeletons(N: int, class_id: int, p: int, datum: ThreeTermDatum):
    layout = cusp_layout(N)
    gamma = layout.classes[class_id].gamma
    lhs = [_skeleton(t.g, t.U, p, layout) for t in hecke_expand(p, gamma, N).terms]
    rhs = [_skeleton(g, U, p, layout, args=(lam,)) for lam, g, U in three_term_rhs(datum, layout)]
    return tuple(lhs), tuple(rhs)


def verify_prop75(datum: ThreeTermDatum, p: int, N: int, chi: DirichletCharacter, table: CuspTable) -> bool:
    """Exact check that T_p gamma_a agrees with the three-term right-hand side modulo the ideal."""
    if datum.p != p or table.N != N:
        raise ValueError("datum does not match p or N")
    lhs, rhs = _three_term_skeletons(N, datum.source, p, datum)
    left = NormalForm(tuple(_apply_character(s, table) for s in lhs))
    right = NormalForm(tuple(_apply_character(s, table) for s in rhs))
    return left == right


# ---- recursion and residual ------------------------------------------------

def recursion_coefficients(lam: complex, chip, p: int, kmax: int) -> list[complex]:
    """b_0..b_kmax with sqrt(p) b_k - lam b_{k-1} + chi(p)/sqrt(p) b_{k-2} = 0, b_{-1} = 0, b_0 = 1."""
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    cp = complex(chip)
    sp = math.sqrt(p)
    b = [1.0 + 0j]
    prev = 0j
    for _ in range(kmax):
        nxt = (lam * b[-1] - cp / sp * prev) / sp
        prev = b[-1]
        b.append(nxt)
    return b


def three_term_residual(view, datum: ThreeTermDatum, lam: complex, p: int, n: int,
                        chi: DirichletCharacter) -> complex:
    """Left side of the three-term identity at index n; zero for an eigenform.

    `view` is a CoefficientView; missing data raises InsufficientData.
    """
    table = view.table
    a = table.classes[datum.source]
    a1 = table.classes[datum.aprime]
    a2 = table.classes[datum.adoubleprime]
    m = a.m
    freq = n + a.mu
    sp = math.sqrt(p)
    idx2 = freq / p - a2.mu
    t1 = 0j
    if idx2.denominator == 1:
        t1 = complex(chi(datum.lambdadoubleprime)) / sp * complex(view.A(a2.id, int(idx2))) \
            * complex(e_inf(datum.jdoubleprime * freq / (p * m)))
    t2 = lam * complex(view.A(a.id, n))
    idx1 = p * freq - a1.mu
    if idx1.denominator != 1:
        raise RuntimeError("p(n + mu) - mu' is not integral")
    t3 = sp * complex(chi(datum.lambdaprime)) * complex(e_inf(datum.shift * freq / m)) \
        * complex(view.A(a1.id, int(idx1)))
    return t1 - t2 + t3


def three_term_scale(view, datum: ThreeTermDatum, lam: complex, p: int, n: int, chi) -> float:
    """Magnitude of the largest of the three terms, used for relative residuals."""
    table = view.table
    a = table.classes[datum.source]
    a1 = table.classes[datum.aprime]
    a2 = table.classes[datum.adoubleprime]
    freq = n + a.mu
    vals = [abs(lam * complex(view.A(a.id, n))), math.sqrt(p) * abs(complex(view.A(a1.id, int(p * freq - a1.mu))))]
    idx2 = freq / p - a2.mu
    if idx2.denominator == 1:
        vals.append(abs(complex(view.A(a2.id, int(idx2)))) / math.sqrt(p))
    return max(vals)


# terms below this fraction of the largest term over the range are structural zeros
TERM_FLOOR = 1e-4


def three_term_relative_residual(view, datum: ThreeTermDatum, lam: complex, p: int, ns, chi,
                                 floor: float = TERM_FLOOR) -> float:
    """max |residual(n)| / max(scale(n), floor * max scale) over n in ns."""
    ns = list(ns)
    res = [abs(three_term_residual(view, datum, lam, p, n, chi)) for n in ns]
    scl = [three_term_scale(view, datum, lam, p, n, chi) for n in ns]
    cut = floor * max(scl, default=0.0)
    out = 0.0
    for r, s in zip(res, scl):
        d = max(s, cut)
        out = max(out, r / d if d > 0 else r)
    return out

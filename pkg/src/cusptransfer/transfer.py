"""Transfer certificates: coefficients at a cusp expressed through other cusps.

A certificate is symbolic. It names the coefficients that multiply together
and carries a single exact phase, so it can be evaluated against exact
synthetic data or against numerically extracted coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .cusps import CuspClass, CuspTable
from .dirichlet import DirichletCharacter
from .exactnum import (ZERO, GL2Q, PhaseQZ, SL2Z, e_inf, factor_rational, factorize, translation,
                       valuation)


@dataclass(frozen=True)
class IndexDecomposition:
    epsilon: int
    M: int
    mu: Fraction
    t: Fraction  # (eps*M + mu) / (eps*m)
    outside: tuple  # ((p, m_p), ...) primes not dividing N, sorted
    m_by_prime: tuple  # ((q, m'_q), ...) primes dividing N, sorted

    @property
    def M0(self) -> Fraction:
        out = Fraction(1)
        for p, k in self.outside:
            out *= Fraction(p) ** k
        return out

    def m_prime(self, q: int) -> int:
        return dict(self.m_by_prime)[q]

    @property
    def negative_outside(self) -> bool:
        return any(k < 0 for _, k in self.outside)


def decompose_index(cls: CuspClass, epsilon: int, M: int, N: int, chi: DirichletCharacter | None = None) -> IndexDecomposition:
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    if M < 0:
        raise ValueError("M must be nonnegative")
    val = epsilon * M + cls.mu
    if val == 0:
        raise ValueError("eps*M + mu is zero")
    t = Fraction(val) / (epsilon * cls.m)
    if t <= 0:
        raise ValueError("eps*M + mu has the wrong sign for eps")
    fac = factor_rational(t)
    primes_N = sorted(factorize(N)) if N > 1 else []
    outside = tuple(sorted((p, k) for p, k in fac.items() if N % p))
    inside = tuple((q, fac.get(q, 0)) for q in primes_N)
    return IndexDecomposition(epsilon, M, cls.mu, t, outside, inside)


@dataclass(frozen=True)
class TargetRecord:
    q: int
    class_id: int
    j: int
    index: int | None  # None when m_b q^{m'} - mu_b is not integral


@dataclass(frozen=True)
class TransferCertificate:
    source: tuple  # (class_id, eps, M)
    source_label: str
    decomposition: IndexDecomposition
    targets: tuple  # TargetRecord per prime of N
    phase: PhaseQZ
    inf_factors: tuple  # indices n with a factor A(inf, n): eps first, then p^m
    target_labels: tuple = field(default=(), compare=False)
    zero_reason: str | None = None

    @property
    def is_zero(self) -> bool:
        return self.zero_reason is not None

    def evaluate(self, coeff: Callable[[int, int], complex], inf_id: int = 0) -> complex:
        """Value predicted for A(source) given coeff(class_id, n)."""
        if self.is_zero:
            return 0j
        val = complex(self.phase)
        for n in self.inf_factors:
            val *= coeff(inf_id, n)
        for rec in self.targets:
            val *= coeff(rec.class_id, rec.index)
        return val

    def text(self) -> str:
        cid, eps, M = self.source
        head = f"A({self.source_label}, {'+' if eps > 0 else '-'}{M})"
        if self.is_zero:
            return f"{head} = 0"
        parts = [f"phase({self.phase.value})"]
        if self.inf_factors:
            parts.append(f"A(inf,{self.inf_factors[0]:+d})")
        for p, k in self.decomposition.outside:
            parts.append(f"A(inf,{p ** k})")
        for rec, lab in zip(self.targets, self.target_labels):
            parts.append(f"A({lab}, {rec.index})")
        return head + " = " + " * ".join(parts)


def _inf_factors(dec: IndexDecomposition) -> tuple:
    return (dec.epsilon,) + tuple(p ** k for p, k in dec.outside)


# ---- prime-power level, explicit congruences -------------------------------

@dataclass(frozen=True)
class PrimePowerSolution:
    cprime: int
    j: int
    matrix: GL2Q  # the product whose membership certifies (c', j)


def solve_cprime_j(q: int, e: int, l: int, c: int, epsM0: int) -> PrimePowerSolution:
    """Unique (c', j) for the cusp 1/(c q^l) at level q^e and scaling eps*M0."""
    small = min(q ** l, q ** (e - l))
    cp = c * pow(epsM0, -1, small) % small if small > 1 else 0
    if cp == 0:
        cp = small  # only when small == 1, which cannot happen for 1 <= l < e
    j = 0
    if 2 * l <= e:
        mod = q ** (e - 2 * l)
        if mod > 1:
            rhs = (cp * epsM0 - c) // q ** l
            j = rhs * pow(c * cp, -1, mod) % mod
    mat = (SL2Z(1, 0, cp * q ** l, 1) @ translation(j)) @ GL2Q(epsM0, 0, 0, 1) @ SL2Z(1, 0, -c * q ** l, 1)
    if not mat.is_integral() or mat.c % (q ** e):
        raise RuntimeError("congruence check failed for the transfer matrix")
    return PrimePowerSolution(cp, j, mat)


def transfer_prime_power(cls: CuspClass, epsilon: int, M: int, q: int, e: int, chi: DirichletCharacter,
                         table: CuspTable) -> TransferCertificate:
    N = q ** e
    if table.N != N:
        raise ValueError("table level does not match q^e")
    dec = decompose_index(cls, epsilon, M, N, chi)
    tag = cls.tags[0]
    label = cls.label()
    src = (cls.id, epsilon, M)
    if dec.negative_outside:
        return TransferCertificate(src, label, dec, (), PhaseQZ(0), (), (), "negative exponent at a prime not dividing N")
    mq = dec.m_prime(q)
    M0 = int(dec.M0)
    epsM0 = epsilon * M0
    find = {(t.tags[0].kind, t.tags[0].c1, t.tags[0].l): t for t in table.classes}
    if tag.kind == "inf":
        target, j, index, phase = find[("inf", 0, 0)], 0, q ** mq, PhaseQZ(0)
    elif tag.kind == "zero":
        target, j, index = find[("zero", 0, 0)], 0, q ** (e + mq)
        phase = chi(epsM0).inverse()
    else:
        l = tag.l
        sol = solve_cprime_j(q, e, l, tag.c1, epsM0)
        target = find[("fin", sol.cprime, l)]
        j = sol.j
        if cls.mu != 0:
            index = 0
        elif 2 * l <= e:
            index = q ** (e - 2 * l + mq)
        else:
            index = q ** mq
        if 2 * l <= e:
            phase = e_inf(Fraction(q) ** mq * j) * chi(j * sol.cprime * q ** l + 1).inverse()
        else:
            phase = PhaseQZ(0)
        # index must agree with m_b q^m - mu_b
        if Fraction(target.m) * Fraction(q) ** mq - target.mu != index:
            raise RuntimeError("target index is inconsistent with the target cusp parameter")
    rec = TargetRecord(q, target.id, j, index)
    return TransferCertificate(src, label, dec, (rec,), phase, _inf_factors(dec), (target.label(),))


# ---- general level ---------------------------------------------------------

def transfer_general(cls: CuspClass, epsilon: int, M: int, table: CuspTable) -> TransferCertificate:
    N = table.N
    chi = table.chi
    dec = decompose_index(cls, epsilon, M, N, chi)
    label = cls.label()
    src = (cls.id, epsilon, M)
    if dec.negative_outside:
        return TransferCertificate(src, label, dec, (), PhaseQZ(0), (), (), "negative exponent at a prime not dividing N")
    primes = [q for q, _ in dec.m_by_prime]
    mp = dict(dec.m_by_prime)
    ginv = cls.gamma.inverse()
    records = []
    labels = []
    phase = PhaseQZ(0)
    zero = None
    for idx, q in enumerate(primes):
        qe = q ** table.chi.component(q).e
        Mi = dec.t / Fraction(q) ** mp[q]
        delta = 1
        for u in primes:
            if u != q:
                delta *= u ** max(0, -mp[u])
        found = []
        for b in table.classes:
            # the target must be infinity-type at every other prime
            if any(t.kind != "inf" for t in b.tags if t.q != q):
                continue
            for j in range(b.m):
                gj = b.gamma @ translation(j)
                X = gj @ GL2Q(epsilon * Mi, 0, 0, 1) @ ginv
                cq = X.c * delta
                if cq.denominator != 1:
                    raise RuntimeError("denominator not cleared by delta")
                if int(cq) % qe == 0:
                    found.append((b, j, gj, X))
        if len(found) != 1:
            raise RuntimeError(f"expected a unique target at q={q}, found {len(found)}")
        b, j, gj, X = found[0]
        index = Fraction(b.m) * Fraction(q) ** mp[q] - b.mu
        if index.denominator != 1:
            zero = zero or f"non-integral target index at q={q}"
            index_val = None
        else:
            index_val = int(index)
        records.append(TargetRecord(q, b.id, j, index_val))
        labels.append(b.label())
        ph = e_inf(Fraction(q) ** mp[q] * j)
        for u in primes:
            if u != q:
                ph = ph * chi.component(u)(gj.d).inverse()
        dq = X.d * delta
        dprime = pow(delta, -1, qe) if qe > 1 else 0
        val = chi.component(q)(int(dq) * dprime)
        if val is ZERO:
            raise RuntimeError("d_q is not a unit")
        ph = ph * val.inverse()
        phase = phase * ph
    if zero:
        return TransferCertificate(src, label, dec, tuple(records), PhaseQZ(0), (), tuple(labels), zero)
    return TransferCertificate(src, label, dec, tuple(records), phase, _inf_factors(dec), tuple(labels))


def transfer(cls: CuspClass, epsilon: int, M: int, table: CuspTable) -> TransferCertificate:
    """Prime-power formula when N is a prime power, general search otherwise."""
    fac = factorize(table.N) if table.N > 1 else {}
    if len(fac) == 1:
        (q, e), = fac.items()
        return transfer_prime_power(cls, epsilon, M, q, e, table.chi, table)
    return transfer_general(cls, epsilon, M, table)


def case_of(cls: CuspClass) -> str:
    """Which branch of the prime-power formula a cusp falls in."""
    tag = cls.tags[0]
    if tag.kind == "inf":
        return "inf"
    if tag.kind == "zero":
        return "zero"
    return "mu-nonzero" if cls.mu != 0 else "mu-zero"


# ---- B notation ------------------------------------------------------------

class InsufficientData(KeyError):
    pass


class CoefficientView:
    """Coefficient data A(class, n) with the rescaled view B(class, alpha)."""

    def __init__(self, table: CuspTable, source, exact: bool = False):
        self.table = table
        self._source = source
        self.exact = exact

    def A(self, class_id: int, n: int):
        if callable(self._source):
            try:
                return self._source(class_id, n)
            except KeyError as exc:
                raise InsufficientData(f"insufficient data for A({class_id}, {n})") from exc
        try:
            return self._source[(class_id, n)]
        except KeyError:
            raise InsufficientData(f"insufficient data for A({class_id}, {n})") from None

    def has(self, class_id: int, n: int) -> bool:
        try:
            self.A(class_id, n)
            return True
        except InsufficientData:
            return False

    def index_of(self, class_id: int, alpha) -> int | None:
        cls = self.table.classes[class_id]
        x = cls.m * Fraction(alpha) - cls.mu
        return int(x) if x.denominator == 1 else None

    def B(self, class_id: int, alpha):
        n = self.index_of(class_id, alpha)
        if n is None:
            return 0
        return self.A(class_id, n)

    def alpha_of(self, class_id: int, n: int) -> Fraction:
        cls = self.table.classes[class_id]
        return (n + cls.mu) / cls.m


# ---- multiplicativity ------------------------------------------------------

def multiplicativity_condition(N: int, a: int, b: int) -> str:
    if math.gcd(a, b) != 1:
        raise ValueError("cusp not in lowest terms")
    M = math.gcd(N, b)
    g = math.gcd(M, N // M)
    if g == 1:
        return "multiplicative-by-theorem"
    if g == 2 and (N // M) % 2 == 0 and (N // M) % 4:
        return "multiplicative-by-theorem"
    odd = N // 8 if N % 8 == 0 else 0
    if odd and odd % 2 and all(k == 1 for k in (factorize(odd).values() if odd > 1 else [])):
        if b % 2 == 0 and b % 4:
            return "eight-case"
    return "unknown"


def eight_case_phase(alpha) -> PhaseQZ:
    alpha = Fraction(alpha)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    e = valuation(alpha, 2)
    u = abs(alpha) / Fraction(2) ** e
    # residue of the 2-adic unit u modulo 4
    r = u.numerator * pow(u.denominator, -1, 4) % 4
    if alpha < 0:
        r = (-r) % 4
    j = ((r - 1) // 2) % 2
    return e_inf(Fraction(2) ** e * j)


@dataclass
class FactorizabilityReport:
    quadruples: int
    max_residual: float
    passed: bool
    tol: float
    worst: tuple | None = None

    def text(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"quadruples={self.quadruples} max_residual={self.max_residual:.3e} tol={self.tol:g} {verdict}"


# products smaller than this fraction of scale^2 count as structural zeros
ZERO_FLOOR = 1e-4


def _split(alpha: Fraction, ell: int) -> tuple[Fraction, Fraction]:
    v = valuation(alpha, ell)
    part = Fraction(ell) ** v
    return part, alpha / part


def factorizability_test(view: CoefficientView, class_id: int, support: Iterable, tol: float,
                         weight: Callable | None = None) -> FactorizabilityReport:
    """Cross-ratio test B(ab)B(a'b') = B(ab')B(a'b) over the supplied support.

    For each prime ell, a and a' run over the ell-parts of support elements and
    b, b' over their ell-free parts. A quadruple is tested only when all four
    products lie in the support. `weight`, if given, divides every B value by
    weight(alpha) first.
    """
    supp = sorted({Fraction(a) for a in support if Fraction(a) > 0})
    if not supp:
        raise ValueError("empty support")
    sset = set(supp)

    def val(alpha):
        v = complex(view.B(class_id, alpha))
        if weight is not None:
            v /= complex(weight(alpha))
        return v

    vals = {a: val(a) for a in supp}
    scale = max((abs(v) for v in vals.values()), default=0.0)
    primes = set()
    for a in supp:
        primes.update(factor_rational(a))
    count = 0
    worst = 0.0
    worst_q = None
    for ell in sorted(primes):
        parts = {}
        for a in supp:
            p, rest = _split(a, ell)
            parts.setdefault(p, set()).add(rest)
        ps = sorted(parts)
        rests = sorted(set().union(*parts.values()))
        for i, a1 in enumerate(ps):
            for a2 in ps[i + 1:]:
                common = [r for r in rests if a1 * r in sset and a2 * r in sset]
                for x, b1 in enumerate(common):
                    for b2 in common[x + 1:]:
                        lhs = vals[a1 * b1] * vals[a2 * b2]
                        rhs = vals[a1 * b2] * vals[a2 * b1]
                        if scale == 0:
                            res = 0.0
                        else:
                            res = abs(lhs - rhs) / max(abs(lhs), abs(rhs), scale * scale * ZERO_FLOOR)
                        count += 1
                        if res > worst:
                            worst, worst_q = res, (a1, a2, b1, b2)
    if count == 0:
        raise ValueError("support admits no testable quadruple")
    return FactorizabilityReport(count, worst, worst <= tol, tol, worst_q)

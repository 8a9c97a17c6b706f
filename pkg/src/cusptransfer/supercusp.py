"""Eventual vanishing of A(a, m_a p^m) at cusps with mu = 0, and the cheap exclusions."""

from __future__ import annotations

from dataclasses import dataclass, field

from .cusps import CuspTable
from .dirichlet import DirichletCharacter
from .exactnum import is_prime
from .transfer import CoefficientView, InsufficientData

CONSISTENT = "consistent-with-supercuspidal"
NOT_SC = "not-supercuspidal"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Precheck:
    excluded: bool
    reason: str

    def text(self) -> str:
        return f"excluded ({self.reason})" if self.excluded else "no-obstruction"


def primitive_precheck(chi: DirichletCharacter, p: int) -> Precheck:
    N = chi.modulus
    if N % p:
        return Precheck(True, "p does not divide N")
    if chi.is_primitive():
        return Precheck(True, "chi primitive")
    return Precheck(False, "")


def conductor_precheck(N: int, p: int) -> Precheck:
    if N % (p * p):
        return Precheck(True, "p^2 does not divide N")
    return Precheck(False, "")


@dataclass
class CuspVanishing:
    class_id: int
    label: str
    values: list  # |A(a, m_a p^m)| for m = 0..bound, None where data is missing
    threshold: float
    vanishes_from: int | None  # least M with values zero from M on; None if nonzero at the top
    nonzero_at: list
    status: str  # "vanishes", "nonzero", "missing"

    def line(self) -> str:
        M = self.vanishes_from if self.vanishes_from is not None else "n/a"
        verdict = {"vanishes": "vanishes", "nonzero": "nonzero", "missing": "insufficient-data"}[self.status]
        line = f"cusp={self.label} mu=0 verdict={verdict} M={M}"
        if self.status == "nonzero":
            m = self.nonzero_at[-1]
            line += f" witness=m{m}:|A|={self.values[m]:.3e}"
        return line


@dataclass
class VanishingReport:
    p: int
    bound: int
    threshold: float
    cusps: list
    verdict: str
    prechecks: list = field(default_factory=list)

    def text(self) -> str:
        lines = [c.line() for c in self.cusps]
        for name, pc in self.prechecks:
            lines.append(f"precheck {name}: {pc.text()}")
        lines.append(f"p={self.p} bound={self.bound} threshold={self.threshold:g} verdict={self.verdict}")
        return "\n".join(lines)


def vanishing_test(view: CoefficientView, table: CuspTable, p: int, bound: int, threshold: float = 1e-6,
                   relative: bool = True, witness_range: int = 20) -> VanishingReport:
    """Check A(a, m_a p^m) = 0 for m = 0..bound at every cusp with mu_a = 0.

    In numeric mode a value counts as zero when it is below `threshold` times the
    largest |A(a, n)|, n = 1..witness_range, at the same cusp (or absolutely when
    relative is False). Exact views use threshold 0.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    thr = 0.0 if view.exact else threshold
    results = []
    for cls in table.classes:
        if cls.mu != 0:
            continue
        vals = []
        for m in range(bound + 1):
            try:
                vals.append(abs(complex(view.A(cls.id, cls.m * p ** m))))
            except InsufficientData:
                vals.append(None)
        scale = 1.0
        if relative and not view.exact:
            ref = []
            for n in range(1, witness_range + 1):
                try:
                    ref.append(abs(complex(view.A(cls.id, n))))
                except InsufficientData:
                    pass
            scale = max(ref + [v for v in vals if v is not None], default=0.0) or 1.0
        cut = thr * scale
        if any(v is None for v in vals):
            results.append(CuspVanishing(cls.id, cls.label(), vals, cut, None, [], "missing"))
            continue
        nonzero = [m for m, v in enumerate(vals) if v > cut]
        if nonzero and nonzero[-1] == bound:
            results.append(CuspVanishing(cls.id, cls.label(), vals, cut, None, nonzero, "nonzero"))
        else:
            start = nonzero[-1] + 1 if nonzero else 0
            results.append(CuspVanishing(cls.id, cls.label(), vals, cut, start, nonzero, "vanishes"))
    checks = [("primitive", primitive_precheck(table.chi, p)), ("conductor", conductor_precheck(table.N, p))]
    if any(r.status == "nonzero" for r in results):
        verdict = NOT_SC
    elif any(r.status == "missing" for r in results) or not results:
        verdict = INCONCLUSIVE
    elif any(pc.excluded for _, pc in checks):
        # vanishing up to the bound cannot outweigh a structural exclusion
        verdict = INCONCLUSIVE
    else:
        verdict = CONSISTENT
    return VanishingReport(p, bound, threshold, results, verdict, checks)

"""Numeric ground truth from eta-product fixtures.

Two independent routes produce Fourier coefficients at a cusp:
  * `extract_coefficients` samples F|sigma_a on a horocycle and takes a DFT;
  * `CuspExpansion` rewrites F|gamma_a as an eta quotient with a fitted constant
    and expands it as a power series.
Both return values normalized so that A(inf, 1) = 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import integrate, special

from .cusps import CuspClass, CuspTable, build_cusp_table
from .dirichlet import DirichletCharacter, char_parse
from .exactnum import SL2Z, complete_to_sl2

TWO_PI = 2 * math.pi


# ---- eta products ----------------------------------------------------------

def pentagonal_terms(B: int) -> list[tuple[int, int]]:
    """(exponent, sign) pairs of prod (1 - q^n) up to q^B."""
    out = [(0, 1)]
    k = 1
    while True:
        e1 = k * (3 * k - 1) // 2
        if e1 > B:
            break
        s = -1 if k % 2 else 1
        out.append((e1, s))
        e2 = k * (3 * k + 1) // 2
        if e2 <= B:
            out.append((e2, s))
        k += 1
    return out


def _sparse_mul(dense: np.ndarray, sparse: list[tuple[int, int]], d: int) -> np.ndarray:
    out = np.zeros_like(dense)
    B = len(dense) - 1
    for e, s in sparse:
        sh = e * d
        if sh > B:
            continue
        out[sh:] += s * dense[:B + 1 - sh]
    return out


def _sparse_div(dense: np.ndarray, sparse: list[tuple[int, int]], d: int) -> np.ndarray:
    g = dense.copy()
    B = len(dense) - 1
    rest = [(e * d, s) for e, s in sparse if e and e * d <= B]
    for n in range(B + 1):
        acc = g[n]
        for sh, s in rest:
            if sh > n:
                break
            acc -= s * g[n - sh]
        g[n] = acc
    return g


def eta_qexp(factors, B: int) -> list[int]:
    """a(1..B) for q * prod_d prod_n (1 - q^{dn})^{r_d}; requires sum d r / 24 = 1."""
    offset = Fraction(sum(d * r for d, r in factors), 24)
    if offset != 1:
        raise ValueError(f"q-power offset is {offset}, expected 1")
    series = np.zeros(B, dtype=object)  # exponents 0..B-1, shifted by the leading q
    series[0] = 1
    for d, r in factors:
        pent = pentagonal_terms(B)
        for _ in range(abs(r)):
            series = _sparse_mul(series, pent, d) if r > 0 else _sparse_div(series, pent, d)
    return [int(x) for x in series]


@dataclass
class EtaProductForm:
    level: int
    weight: int
    character: str
    factors: tuple  # ((d, r), ...); empty when explicit coefficients are given
    explicit: dict = field(default_factory=dict)
    name: str = ""
    _cache: np.ndarray | None = field(default=None, repr=False)

    @property
    def chi(self) -> DirichletCharacter:
        return char_parse(self.character, self.level)

    def table(self) -> CuspTable:
        return build_cusp_table(self.level, self.chi)

    def coefficients(self, B: int) -> np.ndarray:
        """Float array c with c[n] = a(n) for 0 <= n <= B (c[0] = 0)."""
        if self._cache is not None and len(self._cache) > B:
            return self._cache
        if not self.factors:
            top = max(self.explicit, default=0)
            if B > top:
                raise ValueError(f"explicit coefficients only reach {top}, need {B}")
            arr = np.zeros(top + 1)
            for n, a in self.explicit.items():
                arr[n] = a
        else:
            size = max(B, 64, 2 * (len(self._cache) if self._cache is not None else 0))
            arr = np.zeros(size + 1)
            arr[1:] = np.array(eta_qexp(self.factors, size), dtype=float)
        self._cache = arr
        return arr

    def a(self, n: int) -> int:
        return int(round(self.coefficients(n)[n]))


def parse_fixture(text: str, name: str = "") -> EtaProductForm:
    level = weight = None
    character = "trivial"
    factors: list[tuple[int, int]] = []
    explicit: dict[int, int] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("coeff"):
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"malformed coefficient line {raw!r}")
            explicit[int(parts[1])] = int(parts[2])
            continue
        if "=" not in line:
            raise ValueError(f"malformed fixture line {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key == "level":
            level = int(val)
        elif key == "weight":
            weight = int(val)
        elif key == "character":
            character = val
        elif key == "eta":
            for item in val.split(","):
                d, r = item.split("^")
                factors.append((int(d), int(r)))
        else:
            raise ValueError(f"unknown fixture key {key!r}")
    if level is None or weight is None:
        raise ValueError("fixture needs level= and weight=")
    if factors and explicit:
        raise ValueError("give either eta= or coeff lines, not both")
    if factors:
        if Fraction(sum(r for _, r in factors), 2) != weight:
            raise ValueError("weight does not match the eta exponents")
        for d, _ in factors:
            if level % d:
                raise ValueError(f"eta factor {d} does not divide the level")
    form = EtaProductForm(level, weight, character, tuple(factors), explicit, name)
    form.chi  # validates the character against the level
    if factors and eta_qexp(factors, 1)[0] != 1:
        raise ValueError("expansion does not start with q")
    return form


def fixture_dir() -> Path:
    return Path(str(resources.files("cusptransfer") / "fixtures"))


def load_fixture(path: str | Path) -> EtaProductForm:
    p = Path(path)
    if not p.exists():
        p = fixture_dir() / Path(path).name
    if not p.exists():
        raise FileNotFoundError(f"no fixture {path}")
    return parse_fixture(p.read_text(), p.stem)


# ---- evaluation ------------------------------------------------------------

@dataclass(frozen=True)
class Evaluation:
    value: complex
    error: float
    terms: int


def _tail_bound(B: int, k: int, r: float) -> float:
    # |a(n)| <= d(n) n^{(k-1)/2} <= 2 n^{k/2}
    rho = ((B + 2) / (B + 1)) ** (k / 2) * r
    if rho >= 1:
        return math.inf
    return 2 * (B + 1) ** (k / 2) * r ** (B + 1) / (1 - rho)


def terms_needed(k: int, im: float, tol: float) -> int:
    r = math.exp(-TWO_PI * im)
    B = max(8, int(math.log(tol) / math.log(r)) if r > 0 else 8)
    while _tail_bound(B, k, r) > tol:
        B = int(B * 1.25) + 8
    return B


MAX_TERMS = 400000


def evaluate_form(f: EtaProductForm, z: complex, tol: float = 1e-14, B: int | None = None) -> Evaluation:
    """F(z) = y^{k/2} sum a(n) e(nz) with a rigorous truncation bound."""
    y = z.imag
    if y <= 0:
        raise ValueError("z must lie in the upper half plane")
    need = terms_needed(f.weight, y, tol)
    if B is None:
        B = need
    elif B < need and _tail_bound(B, f.weight, math.exp(-TWO_PI * y)) > tol:
        raise ValueError(f"B = {B} too small for accuracy {tol}")
    if B > MAX_TERMS:
        raise ValueError(f"Im z = {y:g} needs {B} terms")
    a = f.coefficients(B)[1:B + 1]
    n = np.arange(1, B + 1)
    val = y ** (f.weight / 2) * np.sum(a * np.exp(2j * math.pi * n * z))
    err = y ** (f.weight / 2) * _tail_bound(B, f.weight, math.exp(-TWO_PI * y))
    return Evaluation(complex(val), err, B)


def evaluate_many(f: EtaProductForm, zs: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex)
    ymin = float(zs.imag.min())
    if ymin <= 0:
        raise ValueError("points must lie in the upper half plane")
    B = terms_needed(f.weight, ymin, tol)
    if B > MAX_TERMS:
        raise ValueError(f"Im z = {ymin:g} needs {B} terms")
    a = f.coefficients(B)[1:B + 1]
    out = np.empty(len(zs), dtype=complex)
    chunk = max(1, 4_000_000 // B)
    n = np.arange(1, B + 1)
    for s in range(0, len(zs), chunk):
        z = zs[s:s + chunk]
        q = np.exp(2j * math.pi * np.outer(z, n))
        out[s:s + chunk] = (q @ a) * z.imag ** (f.weight / 2)
    return out


def _as_real4(g) -> tuple[float, float, float, float]:
    return tuple(float(x) for x in g.tuple())


def slash_unitary(F, g, k: int, z: complex) -> complex:
    """((cz+d)/|cz+d|)^{-k} F(gz) after scaling g to determinant 1."""
    a, b, c, d = _as_real4(g)
    det = a * d - b * c
    if det <= 0:
        raise ValueError("determinant must be positive")
    s = math.sqrt(det)
    a, b, c, d = a / s, b / s, c / s, d / s
    j = c * z + d
    if j == 0:
        raise ZeroDivisionError("cz + d = 0")
    w = (a * z + b) / j
    return (j / abs(j)) ** (-k) * F(w)


def form_function(f: EtaProductForm, tol: float = 1e-14):
    return lambda z: evaluate_form(f, z, tol).value


def automorphy_residual(f: EtaProductForm, count: int = 100, seed: int | None = None) -> float:
    """Largest relative |F|gamma - chi~(gamma) F| over random gamma in Gamma0(N) and z."""
    rng = np.random.default_rng(f.level if seed is None else seed)
    N = f.level
    chi = f.chi
    F = form_function(f)
    worst = 0.0
    for _ in range(count):
        while True:
            c = N * int(rng.integers(-3, 4))
            d = int(rng.integers(-12, 13))
            if math.gcd(c, d) == 1:
                break
        g = complete_to_sl2(c, d)
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.3, 1.5))
        lhs = slash_unitary(F, g, f.weight, z)
        rhs = complex(chi(g.d)) * F(z)
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    return worst


def slash_many(f: EtaProductForm, g, zs: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    a, b, c, d = _as_real4(g)
    s = math.sqrt(a * d - b * c)
    a, b, c, d = a / s, b / s, c / s, d / s
    zs = np.asarray(zs, dtype=complex)
    j = c * zs + d
    w = (a * zs + b) / j
    return (j / np.abs(j)) ** (-f.weight) * evaluate_many(f, w, tol)


def _best_row(c: int, d: int, N: int, w: complex, units: list[int]) -> tuple[int, int, int]:
    """Bottom row (c', d') = u (c, d) mod N, coprime, minimizing |c' w + d'|; returns (c', d', u)."""
    best = None
    for u in units:
        c0 = u * c % N
        for cc in (c0, c0 - N) if c0 else (0, N, -N):
            d0 = u * d % N
            if cc == 0:
                cands = [1, -1] if N == 1 or d0 in (1, N - 1) else []
                cands = [dd for dd in (d0, d0 - N) if abs(dd) == 1] or cands
            else:
                centre = -cc * w.real
                t0 = math.floor((centre - d0) / N)
                cands = [d0 + N * t for t in range(t0 - 1, t0 + 3)]
            for dd in cands:
                if math.gcd(cc, dd) != 1:
                    continue
                val = abs(cc * w + dd)
                if best is None or val < best[0] - 1e-15:
                    best = (val, cc, dd, u)
    if best is None:
        raise RuntimeError("no admissible bottom row")
    return best[1], best[2], best[3]


def slash_reduced(f: EtaProductForm, gamma: SL2Z, zs: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """(F|gamma)(z), moving each point by Gamma0(N) first so the q-expansion converges fast.

    F|gamma = chi~(gamma0)^{-1} F|(gamma0 gamma); gamma0 is chosen per point.
    """
    N = f.level
    chi = f.chi
    units = [u for u in range(1, N + 1) if math.gcd(u, N) == 1] if N > 1 else [1]
    zs = np.asarray(zs, dtype=complex)
    out = np.empty(len(zs), dtype=complex)
    groups: dict[tuple[int, int], list[int]] = {}
    info = {}
    for i, z in enumerate(zs):
        cc, dd, u = _best_row(gamma.c, gamma.d, N, complex(z), units)
        groups.setdefault((cc, dd), []).append(i)
        info[(cc, dd)] = u
    for (cc, dd), idx in groups.items():
        g2 = complete_to_sl2(cc, dd)
        g0 = g2 @ gamma.inverse()
        if g0.c % N:
            raise RuntimeError("reduction left Gamma0(N)")
        ph = chi(g0.d)
        out[idx] = slash_many(f, g2, zs[idx], tol) / complex(ph)
    return out


# ---- Whittaker -------------------------------------------------------------

def whittaker(alpha: float, nu: complex, y: float) -> complex:
    """W_{alpha,nu}(y) from its integral representation.

    With s = nu - alpha + 1/2 the integral is regularized at t = 0 so that it
    stays valid for Re s > -1, including the holomorphic case s = 0.
    """
    if y <= 0:
        raise ValueError("y must be positive")
    s = complex(nu) - alpha + 0.5
    if s == 0:
        return complex(y ** alpha * math.exp(-y / 2))
    if s.real <= -1 and abs(s.imag) < 1e-300 and float(s.real).is_integer():
        raise ValueError("s is a nonpositive integer other than 0")
    return whittaker_quad(alpha, nu, y)


def whittaker_quad(alpha: float, nu: complex, y: float) -> complex:
    s = complex(nu) - alpha + 0.5
    b = complex(nu) + alpha - 0.5
    if s.real <= -1:
        raise ValueError("quadrature route needs Re(nu - alpha + 1/2) > -1")

    def g(t):
        return cmath.exp(-y * t) * (1 + t) ** b

    def cquad(fn, lo, hi, **kw):
        re = integrate.quad(lambda t: fn(t).real, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=400, **kw)[0]
        im = integrate.quad(lambda t: fn(t).imag, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=400, **kw)[0]
        return complex(re, im)

    # int_0^1 t^{s-1} (g(t) - 1) dt + 1/s + int_1^inf t^{s-1} g(t) dt, times s / Gamma(s+1)
    inner = cquad(lambda t: (t ** (s - 1) * (g(t) - 1)) if t > 0 else 0j, 0.0, 1.0)
    outer = cquad(lambda t: t ** (s - 1) * g(t), 1.0, np.inf)
    total = s * (inner + outer) + 1
    return complex(y ** (complex(nu) + 0.5) * math.exp(-y / 2) * total / special.gamma(s + 1))


def holomorphic_whittaker(k: int, yprime: float) -> float:
    return whittaker(k / 2, (k - 1) / 2, yprime).real


# ---- expansions at a cusp: eta-quotient route ------------------------------

@dataclass(frozen=True)
class EtaPiece:
    r: int
    A: int
    B: int
    D: int


def eta_pieces(factors, gamma: SL2Z) -> list[EtaPiece]:
    """eta(delta * gamma z) = (automorphy factor) * eta((A z + B)/D) for each factor."""
    a, b, c, d = gamma.tuple()
    if c < 0 or (c == 0 and d < 0):
        a, b, c, d = -a, -b, -c, -d  # same Moebius map; the sign lands in the fitted constant
    out = []
    for delta, r in factors:
        A = math.gcd(delta * a, c)
        p0, r0 = delta * a // A, c // A
        # gamma' = (p0, x; r0, y) in SL2(Z), H = gamma'^{-1} (delta a, delta b; c, d) = (A, B; 0, D)
        g, s, t = _egcd(p0, r0)
        y, x = s, -t
        B = y * delta * b - x * d
        D = delta // A
        out.append(EtaPiece(r, A, B % D, D))
    return out


def _egcd(a: int, b: int):
    """(g, s, t) with a s + b t = g."""
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, s, t = _egcd(b, a % b)
    return g, t, s - (a // b) * t


def eta_value(tau: complex, tol: float = 1e-16) -> complex:
    """Dedekind eta by the pentagonal series."""
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    r = math.exp(-TWO_PI * tau.imag)
    K = 1
    while r ** (K * (3 * K - 1) / 2) > tol:
        K += 1
    s = 1 + 0j
    for k in range(1, K + 1):
        sign = -1 if k % 2 else 1
        s += sign * (cmath.exp(2j * math.pi * tau * k * (3 * k - 1) / 2) + cmath.exp(2j * math.pi * tau * k * (3 * k + 1) / 2))
    return cmath.exp(2j * math.pi * tau / 24) * s


class CuspExpansion:
    """F|sigma_a as y^{k/2} C prod eta(...)^{r}, expanded in e((n + mu) z)."""

    def __init__(self, f: EtaProductForm, cls: CuspClass, check_tol: float = 1e-9):
        if not f.factors:
            raise ValueError("eta route needs an eta-product fixture")
        self.f = f
        self.cls = cls
        self.pieces = eta_pieces(f.factors, cls.gamma)
        self.L = math.lcm(*(p.D for p in self.pieces))
        self.s0 = sum(Fraction(p.r * p.A * self.L, 24 * p.D) for p in self.pieces)
        self.C = self._fit_constant(check_tol)
        self._series = np.zeros(0, dtype=complex)

    def _product(self, w: complex) -> complex:
        out = 1 + 0j
        for p in self.pieces:
            out *= eta_value((p.A * w + p.B) / p.D) ** p.r
        return out

    def _fit_constant(self, tol: float) -> complex:
        g = self.cls.gamma
        k = self.f.weight
        c, d = g.c, g.d
        if c == 0:
            pts = [0.1 + 1.0j, 0.37 + 0.8j]
        else:
            pts = [complex(-d / c, 1 / abs(c)), complex(-d / c + 0.29 / abs(c), 0.8 / abs(c))]
        consts = []
        for w in pts:
            lhs = slash_unitary(form_function(self.f), g, k, w)
            consts.append(lhs / (w.imag ** (k / 2) * self._product(w)))
        if abs(consts[0] - consts[1]) > tol * max(abs(consts[0]), 1e-300):
            raise RuntimeError("fitted constant is not constant; eta transformation failed")
        return consts[0]

    def frequency(self, s: int) -> Fraction:
        return (s + self.s0) * self.cls.m / self.L

    def _ensure(self, S: int):
        if len(self._series) > S:
            return
        S = max(S, 2 * len(self._series), 32)
        ser = np.zeros(S + 1, dtype=complex)
        ser[0] = 1
        for p in self.pieces:
            step = p.A * self.L // p.D  # u-exponent of e(n A w / D)
            root = cmath.exp(2j * math.pi * p.B / p.D)
            fac = np.zeros(S + 1, dtype=complex)
            for e, sgn in pentagonal_terms(S // step + 1):
                if e * step <= S:
                    fac[e * step] += sgn * root ** e
            for _ in range(abs(p.r)):
                if p.r > 0:
                    ser = _dense_mul(ser, fac)
                else:
                    ser = _dense_div(ser, fac)
        # constant phases e(r B / (24 D)) from each eta prefactor
        ph = sum(Fraction(p.r * p.B, 24 * p.D) for p in self.pieces)
        self._series = ser * cmath.exp(2j * math.pi * float(ph))

    def coefficient(self, n: int) -> complex:
        """A(a, n) normalized so that A(inf, 1) = 1."""
        freq = n + self.cls.mu
        s = freq * self.L / self.cls.m - self.s0
        if s.denominator != 1 or s < 0:
            return 0j
        s = int(s)
        self._ensure(s)
        k = self.f.weight
        if freq <= 0:
            return 0j
        return complex(self.cls.m ** (k / 2) * self.C * self._series[s] / float(freq) ** (k / 2))

    def check_frequencies(self, S: int, tol: float = 1e-9) -> None:
        """Every nonzero series coefficient must sit at a frequency n + mu with n integral."""
        self._ensure(S)
        scale = np.max(np.abs(self._series[:S + 1]))
        for s in range(S + 1):
            n = self.frequency(s) - self.cls.mu
            if n.denominator != 1 and abs(self._series[s]) > tol * scale:
                raise RuntimeError(f"nonzero coefficient at non-integral index {n}")


def _dense_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = len(a)
    nz = np.nonzero(b)[0]
    out = np.zeros(n, dtype=complex)
    for i in nz:
        out[i:] += b[i] * a[:n - i]
    return out


def _dense_div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = len(a)
    nz = [i for i in np.nonzero(b)[0] if i > 0]
    g = a.astype(complex).copy() / b[0]
    for m in range(n):
        acc = a[m]
        for i in nz:
            if i > m:
                break
            acc -= b[i] * g[m - i]
        g[m] = acc / b[0]
    return g


class ExpansionCache:
    """One CuspExpansion per class, built lazily."""

    def __init__(self, f: EtaProductForm, table: CuspTable | None = None):
        self.f = f
        self.table = table or f.table()
        self._exp: dict[int, CuspExpansion] = {}

    def expansion(self, class_id: int) -> CuspExpansion:
        if class_id not in self._exp:
            self._exp[class_id] = CuspExpansion(self.f, self.table.classes[class_id])
        return self._exp[class_id]

    def __call__(self, class_id: int, n: int) -> complex:
        return self.expansion(class_id).coefficient(n)


# ---- DFT route -------------------------------------------------------------

@dataclass
class NumericFourierSlice:
    class_id: int
    y: float
    frequencies: list  # n + mu as Fractions
    indices: list
    coefficients: list  # normalized A(a, n)
    error_estimate: float
    raw: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return dict(zip(self.indices, self.coefficients))

    def text(self, label: str) -> str:
        lines = [f"cusp={label} y={self.y:.6g} samples_error={self.error_estimate:.3e}"]
        for n, fr, c in zip(self.indices, self.frequencies, self.coefficients):
            lines.append(f"n={n} freq={fr} A={c.real:+.12e}{c.imag:+.12e}i")
        return "\n".join(lines)


def default_samples(nmax: int) -> int:
    return 1 << max(4, math.ceil(math.log2(8 * max(nmax, 1))))


def extract_coefficients(f: EtaProductForm, cls: CuspClass, y: float | None = None, n_range=None,
                         samples: int | None = None, tol: float = 1e-15) -> NumericFourierSlice:
    """Coefficients of F|sigma_a from samples on the horocycle Im z = y."""
    if n_range is None:
        n_range = range(1, 21)
    n_list = list(n_range)
    nmax = max(abs(n) for n in n_list) + 1
    if y is None:
        y = 1.0 / nmax
    if samples is None:
        samples = default_samples(nmax)
    if samples & (samples - 1) or samples < 2 * (nmax + 1):
        raise ValueError("samples must be a power of two at least 2 (nmax + 1)")
    k = f.weight
    m, mu = cls.m, cls.mu
    xs = np.arange(samples) / samples
    # F|sigma_a(z) = (F|gamma_a)(m z)
    vals = slash_reduced(f, cls.gamma, m * (xs + 1j * y), tol)
    vals = vals * np.exp(-2j * math.pi * float(mu) * xs)
    spec = np.fft.fft(vals) / samples
    coeffs, freqs, raw = [], [], []
    for n in n_list:
        fr = n + mu
        c = spec[n % samples]
        raw.append(complex(c))
        freqs.append(fr)
        if fr > 0:
            W = holomorphic_whittaker(k, 4 * math.pi * float(fr) * y)
            if W < 1e-280:
                raise ValueError("choose smaller y or n")
            coeffs.append(complex(c) * (4 * math.pi) ** (k / 2) / W)
        elif fr < 0:
            W = whittaker(-k / 2, (k - 1) / 2, 4 * math.pi * float(-fr) * y).real
            coeffs.append(complex(c) * (4 * math.pi) ** (k / 2) / W)
        else:
            coeffs.append(complex(c))
    # aliasing: the first folded frequency is samples - nmax above the top index
    alias = (samples + nmax) ** (k / 2) * math.exp(-TWO_PI * (samples - nmax) * y) / max(
        holomorphic_whittaker(k, 4 * math.pi * nmax * y), 1e-300)
    return NumericFourierSlice(cls.id, y, freqs, n_list, coeffs, alias + tol, raw)


class SliceCache:
    """DFT-extracted coefficients per class, for use as a CoefficientView source."""

    def __init__(self, f: EtaProductForm, table: CuspTable | None = None, nmax: int = 20):
        self.f = f
        self.table = table or f.table()
        self.nmax = nmax
        self._data: dict[int, dict] = {}

    def __call__(self, class_id: int, n: int) -> complex:
        if abs(n) > self.nmax:
            raise KeyError((class_id, n))
        if class_id not in self._data:
            cls = self.table.classes[class_id]
            sl = extract_coefficients(self.f, cls, n_range=range(-self.nmax, self.nmax + 1))
            self._data[class_id] = sl.as_dict()
        return self._data[class_id][n]


# ---- Hecke eigenvalues -----------------------------------------------------

@dataclass(frozen=True)
class EigenvalueResult:
    p: int
    eigenvalue: float
    residual: float


def hecke_eigenvalue_numeric(f: EtaProductForm, p: int, points=None, tol: float = 1e-8) -> EigenvalueResult:
    """lambda = a(p) / p^{(k-1)/2}, confirmed by applying T_p pointwise."""
    k = f.weight
    lam = f.a(p) / p ** ((k - 1) / 2)
    chi = f.chi
    chip = complex(chi(p))
    if points is None:
        rng = np.random.default_rng(p)
        points = [complex(x, y) for x, y in zip(rng.uniform(-0.5, 0.5, 4), rng.uniform(0.6, 1.4, 4))]
    F = form_function(f)
    worst = 0.0
    for z in points:
        tp = chip * F(p * z) + sum(F((z + b) / p) for b in range(p))
        tp /= math.sqrt(p)
        fz = F(z)
        worst = max(worst, abs(tp - lam * fz) / max(abs(fz), 1e-300))
    if worst > tol:
        raise RuntimeError(f"Hecke residual {worst:.3e} at p = {p}: fixture is not an eigenform")
    return EigenvalueResult(p, lam, worst)

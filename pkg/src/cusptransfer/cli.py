"""Command-line front end."""

from __future__ import annotations

import argparse
import contextlib
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .cusps import build_cusp_table, parse_cusp, reduce_cusp
from .dirichlet import char_parse
from .exactnum import is_prime
from .heckering import TERM_FLOOR, three_term_data, three_term_relative_residual, verify_prop75
from .numeric import ExpansionCache, SliceCache, automorphy_residual, extract_coefficients, load_fixture
from .supercusp import vanishing_test
from .transfer import (CoefficientView, InsufficientData, eight_case_phase, factorizability_test, multiplicativity_condition,
                       transfer)

DEFAULT_PRIMES = (2, 3, 5, 7, 13)


class UsageError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("CUSP_TRANSFER_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _pmap(fn, items):
    n = _threads()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cusptransfer", description="Fourier coefficients at the cusps of Gamma0(N).")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cusps", help="list cusp classes")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--character", default="trivial")

    p = sub.add_parser("transfer", help="transfer certificate for one coefficient")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--character", default="trivial")
    p.add_argument("--cusp", required=True)
    p.add_argument("--index", required=True, help="signed index, e.g. +12 or -3")

    p = sub.add_parser("three-term", help="three-term data for a cusp and a prime")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--character", default="trivial")
    p.add_argument("--cusp", required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--check-prop75", action="store_true")

    p = sub.add_parser("verify", help="numeric identity checks on a fixture")
    p.add_argument("--fixture", required=True)
    p.add_argument("--identity", required=True, choices=["three-term", "transfer", "multiplicativity", "automorphy"])
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--prime", type=int)
    p.add_argument("--nmax", type=int, default=20)

    p = sub.add_parser("supercuspidal", help="vanishing test at mu = 0 cusps")
    p.add_argument("--fixture", required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)

    p = sub.add_parser("extract", help="numeric Fourier coefficients at a cusp")
    p.add_argument("--fixture", required=True)
    p.add_argument("--cusp", required=True)
    p.add_argument("--nmax", type=int, default=20)
    return ap


def _table(level: int, spec: str):
    if level < 1:
        raise UsageError("level must be positive")
    try:
        chi = char_parse(spec, level)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return build_cusp_table(level, chi)


def _cusp_class(table, text: str, out=None):
    try:
        x = parse_cusp(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cls = table.classes[reduce_cusp(x, table).class_id]
    if out is not None and cls.label() != text.strip():
        out.append(f"# cusp {text.strip()} lies in the class of {cls.label()}")
    return cls


def _index(text: str) -> tuple[int, int]:
    t = text.strip()
    try:
        v = int(t)
    except ValueError:
        raise UsageError(f"malformed index {text!r}") from None
    eps = -1 if t.startswith("-") else 1
    return eps, abs(v)


def _check_prime(p: int):
    if not is_prime(p):
        raise UsageError(f"{p} is not prime")


def _fixture(path: str):
    try:
        return load_fixture(path)
    except (FileNotFoundError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def cmd_cusps(args, out) -> int:
    table = _table(args.level, args.character)
    for cls in table.classes:
        out.append(f"cusp={cls.label()} gamma={cls.gamma} m={cls.m} mu={cls.mu}")
    return 0


def cmd_transfer(args, out) -> int:
    table = _table(args.level, args.character)
    cls = _cusp_class(table, args.cusp, out)
    eps, M = _index(args.index)
    try:
        cert = transfer(cls, eps, M, table)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out.append(cert.text())
    return 0


def cmd_three_term(args, out) -> int:
    table = _table(args.level, args.character)
    cls = _cusp_class(table, args.cusp, out)
    _check_prime(args.prime)
    if args.level % args.prime == 0:
        raise UsageError(f"p = {args.prime} divides N = {args.level}")
    datum = three_term_data(cls, args.prime, table)
    out.append(datum.text(table))
    if args.check_prop75:
        ok = verify_prop75(datum, args.prime, args.level, table.chi, table)
        out.append(f"prop75={'PASS' if ok else 'FAIL'}")
        return 0 if ok else 1
    return 0


def _verdict(worst: float, tol: float) -> str:
    return f"max_residual={worst:.3e} tol={tol:g} {'PASS' if worst < tol else 'FAIL'}"


def verify_three_term(f, primes, nmax: int, tol: float):
    table = f.table()
    pmax = max(primes) if primes else 2
    src = SliceCache(f, table, nmax=pmax * (nmax + 1) + 1)
    view = CoefficientView(table, src)
    lines = []

    def one(item):
        p, cls = item
        lam = f.a(p) / p ** ((f.weight - 1) / 2)
        datum = three_term_data(cls, p, table)
        rel = three_term_relative_residual(view, datum, lam, p, range(1, nmax + 1), table.chi)
        return p, cls, rel

    # classes share the slice cache, so fill it first to keep threads read-only
    for cls in table.classes:
        src(cls.id, 1)
    results = _pmap(one, [(p, c) for p in primes for c in table.classes])
    worst = 0.0
    for p, cls, rel in results:
        lines.append(f"p={p} cusp={cls.label()} residual={rel:.3e}")
        worst = max(worst, rel)
    return worst, lines


def verify_transfer(f, nmax: int, tol: float):
    table = f.table()
    view = CoefficientView(table, SliceCache(f, table, nmax=nmax))
    worst = 0.0
    lines = []
    for cls in table.classes:
        w = 0.0
        ref = max(abs(view.A(cls.id, n)) for n in range(1, nmax + 1)) or 1.0
        for eps in (1, -1):
            for M in range(0, nmax + 1):
                try:
                    cert = transfer(cls, eps, M, table)
                except ValueError:
                    continue
                try:
                    pred = cert.evaluate(view.A)
                    act = view.A(cls.id, eps * M)
                except InsufficientData:
                    continue
                w = max(w, abs(pred - act) / max(abs(act), TERM_FLOOR * ref))
        lines.append(f"cusp={cls.label()} residual={w:.3e}")
        worst = max(worst, w)
    return worst, lines


def verify_multiplicativity(f, nmax: int, tol: float):
    table = f.table()
    view = CoefficientView(table, SliceCache(f, table, nmax=nmax))
    worst = 0.0
    lines = []
    for cls in table.classes:
        x = cls.cusp
        a, b = (1, 0) if x is None else (x.numerator, x.denominator)
        cond = multiplicativity_condition(table.N, a, b)
        support = [view.alpha_of(cls.id, n) for n in range(1, nmax + 1) if n + cls.mu > 0]
        if cond == "unknown":
            lines.append(f"cusp={cls.label()} condition=unknown skipped")
            continue
        weight = eight_case_phase if cond == "eight-case" else None
        rep = factorizability_test(view, cls.id, support, tol, weight=weight)
        lines.append(f"cusp={cls.label()} condition={cond} {rep.text()}")
        worst = max(worst, rep.max_residual)
    return worst, lines


def verify_automorphy(f, tol: float, count: int = 100):
    return automorphy_residual(f, count), [f"samples={count}"]


def cmd_verify(args, out) -> int:
    f = _fixture(args.fixture)
    if args.nmax < 1:
        raise UsageError("nmax must be positive")
    if args.identity == "three-term":
        if args.prime is not None:
            _check_prime(args.prime)
            if f.level % args.prime == 0:
                raise UsageError(f"p = {args.prime} divides N = {f.level}")
            primes = [args.prime]
        else:
            primes = [p for p in DEFAULT_PRIMES if f.level % p]
        worst, lines = verify_three_term(f, primes, args.nmax, args.tol)
    elif args.identity == "transfer":
        worst, lines = verify_transfer(f, args.nmax, args.tol)
    elif args.identity == "multiplicativity":
        worst, lines = verify_multiplicativity(f, args.nmax, args.tol)
    else:
        worst, lines = verify_automorphy(f, args.tol)
    out.extend(lines)
    out.append(_verdict(worst, args.tol))
    return 0 if worst < args.tol else 1


def cmd_supercuspidal(args, out) -> int:
    f = _fixture(args.fixture)
    if args.bound < 0:
        raise UsageError("bound must be nonnegative")
    table = f.table()
    view = CoefficientView(table, ExpansionCache(f, table))
    try:
        rep = vanishing_test(view, table, args.prime, args.bound)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out.append(rep.text())
    return 0


def cmd_extract(args, out) -> int:
    f = _fixture(args.fixture)
    table = f.table()
    cls = _cusp_class(table, args.cusp, out)
    if args.nmax < 1:
        raise UsageError("nmax must be positive")
    sl = extract_coefficients(f, cls, n_range=range(1, args.nmax + 1))
    out.append(sl.text(cls.label()))
    return 0


COMMANDS = {
    "cusps": cmd_cusps,
    "transfer": cmd_transfer,
    "three-term": cmd_three_term,
    "verify": cmd_verify,
    "supercuspidal": cmd_supercuspidal,
    "extract": cmd_extract,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out: list[str] = []
    try:
        code = COMMANDS[args.command](args, out)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(f"error: {exc}", file=stderr)
        return 2
    for line in out:
        print(line, file=stdout)
    return code


def main():
    sys.exit(run())

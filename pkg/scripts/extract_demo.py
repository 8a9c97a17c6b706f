"""Extract Fourier coefficients at every cusp of a fixture and compare with the eta-quotient route."""

import argparse

from cusptransfer.numeric import ExpansionCache, extract_coefficients, load_fixture


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("fixture", nargs="?", default="level20.eta")
    ap.add_argument("--nmax", type=int, default=8)
    args = ap.parse_args()
    f = load_fixture(args.fixture)
    T = f.table()
    cache = ExpansionCache(f, T)
    for cls in T.classes:
        sl = extract_coefficients(f, cls, n_range=range(1, args.nmax + 1))
        worst = max(abs(c - cache(cls.id, n)) for n, c in zip(sl.indices, sl.coefficients))
        print(f"cusp={cls.label()} m={cls.m} mu={cls.mu} dft_vs_eta={worst:.2e}")
        for n, c in zip(sl.indices, sl.coefficients):
            print(f"  A({cls.label()}, {n}) = {c.real:+.10f}{c.imag:+.10f}i")


if __name__ == "__main__":
    main()

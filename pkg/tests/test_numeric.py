import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cusptransfer.exactnum import GL2QPlus, SL2Z, complete_to_sl2
from cusptransfer.numeric import (CuspExpansion, ExpansionCache, automorphy_residual, eta_qexp, eta_value,
                                  evaluate_form, evaluate_many, extract_coefficients, form_function,
                                  hecke_eigenvalue_numeric, holomorphic_whittaker, load_fixture, parse_fixture,
                                  slash_reduced, slash_unitary, whittaker)
from cusptransfer.transfer import transfer

from oracles import naive_eta_product

FIXTURES = ["level11.eta", "level20.eta", "level24.eta", "level27.eta", "level36.eta"]


@pytest.mark.parametrize("name", FIXTURES)
def test_eta_qexp_matches_naive_product(name):
    f = load_fixture(name)
    B = 150
    # every fixture has sum(d r) = 24, so the series starts at q^1
    assert sum(d * r for d, r in f.factors) == 24
    assert eta_qexp(f.factors, B) == naive_eta_product(f.factors, B)


def test_eta_qexp_examples():
    assert eta_qexp(((1, 2), (11, 2)), 5) == [1, -2, -1, 2, 1]
    f = load_fixture("level27.eta")
    assert f.a(3) == 0 and f.a(7) == -1
    f = load_fixture("level36.eta")
    assert [f.a(n) for n in range(1, 14)] == naive_eta_product(f.factors, 13)


def test_eta_value_against_mpmath():
    for tau in (0.1 + 1j, -0.3 + 0.7j, 0.45 + 2.2j):
        ref = complex(mpmath.exp(2j * mpmath.pi * tau / 24) * mpmath.qp(mpmath.exp(2j * mpmath.pi * tau)))
        assert abs(eta_value(tau) - ref) < 1e-14


def test_evaluate_at_i():
    f = load_fixture("level11.eta")
    ev = evaluate_form(f, 1j, tol=1e-13)
    q = math.exp(-2 * math.pi)
    direct = sum(f.a(n) * q ** n for n in range(1, 60))
    assert abs(ev.value - direct) < 1e-12 and ev.error < 1e-12
    # product formula for the same value
    prod = eta_value(1j) ** 2 * eta_value(11j) ** 2
    assert abs(ev.value - prod) < 1e-12


def test_evaluate_rejects():
    f = load_fixture("level11.eta")
    with pytest.raises(ValueError):
        evaluate_form(f, 0.3 - 1j)
    with pytest.raises(ValueError):
        evaluate_form(f, 1j * 1e-6)
    with pytest.raises(ValueError):
        evaluate_form(f, 0.1j, B=3)


def test_evaluate_many_matches_pointwise():
    f = load_fixture("level20.eta")
    zs = np.array([0.1 + 0.3j, -0.4 + 0.9j, 0.25 + 0.2j])
    got = evaluate_many(f, zs)
    for z, v in zip(zs, got):
        assert abs(v - evaluate_form(f, complex(z)).value) < 1e-13


@pytest.mark.parametrize("name", FIXTURES)
def test_automorphy(name):
    assert automorphy_residual(load_fixture(name), count=100) < 1e-9


def test_slash_is_an_action():
    f = load_fixture("level11.eta")
    F = form_function(f)
    g, h = complete_to_sl2(3, 7), complete_to_sl2(-2, 5)
    z = 0.13 + 0.9j
    lhs = slash_unitary(F, g @ h, 2, z)
    rhs = slash_unitary(lambda w: slash_unitary(F, g, 2, w), h, 2, z)
    assert abs(lhs - rhs) < 1e-11
    # scalar matrices act trivially on the unitary slash
    assert abs(slash_unitary(F, GL2QPlus(2, 0, 0, 2), 2, z) - F(z)) < 1e-13


def test_cuspidal_decay():
    f = load_fixture("level11.eta")
    F = form_function(f)
    for y in (1.0, 2.0, 3.0):
        # |F| ~ y e^{-2 pi y} at infinity
        assert abs(F(0.2 + 1j * y)) < 2 * y * math.exp(-2 * math.pi * y)
    T = f.table()
    zero = T.by_label("0")
    # width 11 at the cusp 0: the leading term is y e^{-2 pi y / 11}
    lo, hi = slash_reduced(f, zero.gamma, np.array([0.3 + 20j, 0.3 + 40j]))
    want = 2 * math.exp(-2 * math.pi * 20 / 11)
    assert abs(abs(hi / lo) - want) < 1e-3 * want


def test_slash_reduced_matches_plain_slash():
    f = load_fixture("level20.eta")
    F = form_function(f)
    for cls in f.table().classes:
        zs = np.array([0.2 + 0.8j, -0.3 + 1.1j])
        got = slash_reduced(f, cls.gamma, zs)
        for z, v in zip(zs, got):
            assert abs(v - slash_unitary(F, cls.gamma, 2, complex(z))) < 1e-10


def test_extract_level11_infinity_ratios():
    f = load_fixture("level11.eta")
    T = f.table()
    sl = extract_coefficients(f, T.by_label("inf"), n_range=range(-1, 13))
    A = sl.as_dict()
    assert abs(A[-1]) < 1e-10
    for n in range(1, 13):
        # weight 2 normalization: A(inf, n) / A(inf, 1) = a(n) / n
        assert abs(A[n] / A[1] - f.a(n) / n) < 1e-9
    assert sl.error_estimate < 1e-10


def test_extract_level11_cusp_zero_via_transfer():
    f = load_fixture("level11.eta")
    T = f.table()
    zero = T.by_label("0")
    A0 = extract_coefficients(f, zero, n_range=range(1, 9)).as_dict()
    Ainf = extract_coefficients(f, T.by_label("inf"), n_range=range(1, 9)).as_dict()
    cert = transfer(zero, 1, 2, T)
    assert cert.inf_factors == (1, 2)
    # A(0, 2) / A(0, 1) = A(inf, 2) / A(inf, 1)
    assert abs(A0[2] / A0[1] - Ainf[2] / Ainf[1]) < 1e-9


@pytest.mark.parametrize("name", ["level11.eta", "level20.eta", "level27.eta"])
def test_dft_route_agrees_with_eta_route(name):
    f = load_fixture(name)
    T = f.table()
    cache = ExpansionCache(f, T)
    for cls in T.classes:
        sl = extract_coefficients(f, cls, n_range=range(0, 10)).as_dict()
        scale = max(abs(v) for v in sl.values())
        for n in range(1, 10):
            assert abs(sl[n] - cache(cls.id, n)) < 1e-8 * scale


def test_eta_route_frequencies_integral():
    f = load_fixture("level24.eta")
    for cls in f.table().classes:
        CuspExpansion(f, cls).check_frequencies(200)


@settings(max_examples=15, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(0.1, 1.4), st.floats(0.3, 12))
def test_whittaker_against_mpmath(alpha, nu, y):
    got = whittaker(alpha, nu, y)
    ref = complex(mpmath.whitw(alpha, nu, y))
    assert abs(got - ref) < 1e-8 * max(1.0, abs(ref))


def test_whittaker_examples():
    for y in (0.1, 1.0, 7.5):
        assert abs(whittaker(0, 0.5, y) - math.exp(-y / 2)) < 1e-12
        # holomorphic weight 2: W_{1, 1/2}(y) = y e^{-y/2}
        assert abs(holomorphic_whittaker(2, y) - y * math.exp(-y / 2)) < 1e-12
    # complex nu
    ref = complex(mpmath.whitw(0.3, 0.5 + 0.7j, 2.0))
    assert abs(whittaker(0.3, 0.5 + 0.7j, 2.0) - ref) < 1e-9
    with pytest.raises(ValueError):
        whittaker(1, 0.5, -1.0)


def test_whittaker_degenerate_point():
    # nu - alpha + 1/2 = 0 is handled in closed form; the quadrature on both sides must agree
    alpha, y = 1.0, 1.7
    mid = whittaker(alpha, 0.5, y)
    eps = 1e-6
    avg = 0.5 * (whittaker(alpha, 0.5 + eps, y) + whittaker(alpha, 0.5 - eps, y))
    assert abs(mid - avg) < 1e-9


def test_whittaker_decay():
    y = 50.0
    v = whittaker(1.0, 0.7, y)
    assert abs(v) < y * math.exp(-y / 2) * 2
    assert abs(v - complex(mpmath.whitw(1.0, 0.7, y))) < 1e-18


def test_hecke_eigenvalues():
    f = load_fixture("level11.eta")
    assert abs(hecke_eigenvalue_numeric(f, 2).eigenvalue + math.sqrt(2)) < 1e-12
    assert abs(hecke_eigenvalue_numeric(f, 11).eigenvalue - 1 / math.sqrt(11)) < 1e-12
    assert hecke_eigenvalue_numeric(load_fixture("level27.eta"), 3).eigenvalue == 0


def test_hecke_eigenvalue_rejects_non_eigenform():
    # the sum of two eigenforms of different level is not an eigenform
    f = parse_fixture("level=11\nweight=2\n" + "".join(f"coeff {n} {a}\n" for n, a in
                                                       zip(range(1, 200), [1, 1] + [0] * 197)))
    with pytest.raises(RuntimeError):
        hecke_eigenvalue_numeric(f, 2)


@pytest.mark.parametrize("text", [
    "weight=2\neta=1^2,11^2",
    "level=11\nweight=3\neta=1^2,11^2",
    "level=11\nweight=2\neta=1^2,7^2",
    "level=11\nweight=2\nfoo=1",
    "level=11\nweight=2\nnot a line",
    "level=11\nweight=2\neta=1^2,11^2\ncoeff 1 1",
    "level=11\nweight=2\ncharacter=mod=9;gen=2:1/6\neta=1^2,11^2",
])
def test_parse_fixture_errors(text):
    with pytest.raises(ValueError):
        parse_fixture(text)


def test_load_fixture_missing():
    with pytest.raises(FileNotFoundError):
        load_fixture("nope.eta")


def test_identity_matrix_slash():
    f = load_fixture("level11.eta")
    F = form_function(f)
    z = 0.3 + 0.5j
    assert slash_unitary(F, SL2Z(1, 0, 0, 1), 2, z) == F(z)
    assert abs(slash_unitary(F, SL2Z(-1, 0, 0, -1), 2, z) - F(z)) < 1e-14
    assert cmath.isfinite(F(z))


@pytest.mark.parametrize("name", ["level11.eta", "level20.eta"])
def test_extraction_independent_of_height(name):
    f = load_fixture(name)
    for cls in f.table().classes:
        hi = extract_coefficients(f, cls, n_range=range(1, 11)).as_dict()
        lo = extract_coefficients(f, cls, y=1 / 22, n_range=range(1, 11)).as_dict()
        scale = max(abs(v) for v in hi.values())
        for n in range(1, 11):
            assert abs(hi[n] - lo[n]) < 1e-7 * scale


def test_slash_by_scaling_matrix_and_back():
    f = load_fixture("level20.eta")
    F = form_function(f)
    z = -0.2 + 0.7j
    for cls in f.table().classes:
        g = cls.gamma

        def G(w, g=g):
            return slash_unitary(F, g, 2, w)

        back = slash_unitary(G, g.inverse(), 2, z)
        assert abs(back - F(z)) < 1e-9 * max(abs(F(z)), 1e-3)

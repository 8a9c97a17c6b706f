import math
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cusptransfer.cusps import build_cusp_table
from cusptransfer.dirichlet import all_characters, trivial_character
from cusptransfer.exactnum import PhaseQZ, SL2Z
from cusptransfer.heckering import (GroupRingElement, Term, hecke_coset_reps, hecke_direct, hecke_expand,
                                    normalize, three_term_rhs, recursion_coefficients, three_term_data,
                                    three_term_relative_residual, three_term_residual, verify_prop75, xi_diag)
from cusptransfer.numeric import load_fixture
from cusptransfer.transfer import CoefficientView


def table(n, chi=None):
    return build_cusp_table(n, chi or trivial_character(n))


def test_expand_identity_level11():
    terms = hecke_expand(2, SL2Z(1, 0, 0, 1), 11).terms
    assert len(terms) == 3
    assert terms[0].U == xi_diag(2)
    # bottom rows (0, 2) and (0, 1) up to the lift mod 11
    assert (terms[0].g.c % 11, terms[0].g.d % 11) == (0, 2)
    for t in terms[1:]:
        assert (t.g.c % 11, t.g.d % 11) == (0, 1)


@pytest.mark.parametrize("N,p", [(11, 2), (11, 3), (8, 3), (12, 5), (25, 7)])
def test_expand_term_count_and_rows(N, p):
    for cls in table(N).classes:
        el = hecke_expand(p, cls.gamma, N)
        assert len(el) == p + 1
        c, d = cls.gamma.c, cls.gamma.d
        rows = [(p * c, p * d)] + [(p * c, p * (d - i * c)) for i in range(p)]
        # bottom row of xi * gamma agrees with bottom row of g * xi' mod N up to scaling by p
        for t, (rc, rd) in zip(el.terms, rows):
            m = t.g @ t.U
            assert (m.c - rc) % N == 0 or (m.c * p - rc) % N == 0


@pytest.mark.parametrize("N", [8, 9, 11, 12, 16, 24, 25])
def test_expand_matches_direct(N):
    for chi in all_characters(N)[:4]:
        T = build_cusp_table(N, chi)
        for p in (2, 3, 5, 7):
            if N % p == 0:
                continue
            for cls in T.classes:
                a = normalize(hecke_expand(p, cls.gamma, N), T)
                b = normalize(hecke_direct(p, cls.gamma, chi), T)
                assert a == b


def test_normalize_examples():
    T = table(11)
    nf = normalize(GroupRingElement((Term(PhaseQZ(0), SL2Z(1, 0, 0, 1), xi_diag(2)),)), T)
    t = nf.terms[0]
    assert (t.class_id, t.j, t.xi, t.phase) == (0, 0, ("diag",), PhaseQZ(0))
    zero = T.by_label("0")
    nf = normalize(GroupRingElement((Term(PhaseQZ(0), SL2Z(0, -1, 1, 0), hecke_coset_reps(2)[1]),)), T)
    t = nf.terms[0]
    assert (t.class_id, t.j, t.phase) == (zero.id, 0, PhaseQZ(0))


def test_three_term_examples():
    T = table(11)
    d = three_term_data(T.by_label("inf"), 2, T)
    assert (d.aprime, d.adoubleprime, d.jprime, d.jdoubleprime) == (0, 0, 0, 0)
    assert (d.lambdaprime, d.lambdadoubleprime) == (1, 2)
    d = three_term_data(T.by_label("0"), 2, T)
    assert T.classes[d.aprime].label() == T.classes[d.adoubleprime].label() == "0"
    assert (d.lambdaprime, d.lambdadoubleprime) == (2, 1)
    T = table(16)
    d = three_term_data(T.by_label("1/2"), 3, T)
    assert d.text(T) == "a'=1/2 a''=1/2 j'=5 j''=1 l'=3 l''=1 N'=8"
    assert verify_prop75(d, 3, 16, T.chi, T)
    with pytest.raises(ValueError):
        three_term_data(T.classes[0], 2, T)


def test_printed_lambda_table_fails_for_nontrivial_characters():
    # swapping l' and l'' at the cusp 0 only survives the trivial character
    for chi in all_characters(11):
        T = build_cusp_table(11, chi)
        d = three_term_data(T.by_label("0"), 2, T)
        assert verify_prop75(d, 2, 11, chi, T)
        swapped = replace(d, lambdaprime=1, lambdadoubleprime=2)
        assert verify_prop75(swapped, 2, 11, chi, T) == chi.is_trivial()


@pytest.mark.parametrize("N,lab,p", [(8, "0", 3), (11, "0", 2), (16, "1/2", 3), (8, "1/2", 3)])
def test_group_identity_detects_perturbation(N, lab, p):
    T = table(N)
    d = three_term_data(T.by_label(lab), p, T)
    assert verify_prop75(d, p, N, T.chi, T)
    assert not verify_prop75(replace(d, jprime=d.jprime + 1), p, N, T.chi, T)
    assert not verify_prop75(replace(d, jdoubleprime=d.jdoubleprime + 1), p, N, T.chi, T)


@pytest.mark.parametrize("N", range(1, 31))
def test_group_identity_sweep_small(N):
    for chi in all_characters(N):
        T = build_cusp_table(N, chi)
        for p in (2, 3, 5, 7):
            if N % p == 0:
                continue
            for cls in T.classes:
                assert verify_prop75(three_term_data(cls, p, T), p, N, chi, T)


def test_three_term_rhs_shape():
    T = table(8)
    d = three_term_data(T.by_label("1/2"), 3, T)
    rhs = three_term_rhs(d, T)
    assert len(rhs) == 1 + 3
    assert all(U.det() == 3 for _, _, U in rhs)


def test_recursion_examples():
    assert recursion_coefficients(0.7, PhaseQZ(0), 2, 0) == [1]
    b = recursion_coefficients(0.7, PhaseQZ(0), 2, 3)
    assert abs(b[1] - 0.7 / math.sqrt(2)) < 1e-15
    with pytest.raises(ValueError):
        recursion_coefficients(1, PhaseQZ(0), 2, -1)


@given(st.floats(-2, 2), st.integers(2, 6), st.integers(0, 3))
def test_recursion_relation(lam, kmax, quarter):
    p = 3
    chip = PhaseQZ(Fraction(quarter, 4))
    b = recursion_coefficients(lam, chip, p, kmax)
    for k in range(2, kmax + 1):
        r = math.sqrt(p) * b[k] - lam * b[k - 1] + complex(chip) / math.sqrt(p) * b[k - 2]
        assert abs(r) < 1e-12


def test_recursion_level11_fixture():
    f = load_fixture("level11.eta")
    a = f.coefficients(400)
    lam = a[2] / math.sqrt(2)
    b = recursion_coefficients(lam, PhaseQZ(0), 2, 7)
    for n in (1, 3, 5, 7):
        for k in range(8):
            if n * 2 ** k < 400:
                # weight 2: A(inf, n) = a(n) / n^{k/2}
                A_n = a[n] / n
                A_nk = a[n * 2 ** k] / (n * 2 ** k)
                assert abs(b[k] * A_n - A_nk) < 1e-9


def test_three_term_residual_synthetic_exact():
    # multiplicative data at level 1 built from the recursion solves the identity at infinity
    T = table(1)
    lams = {2: 0.3, 3: -1.1, 5: 0.6, 7: 1.4}
    B = {p: recursion_coefficients(l, PhaseQZ(0), p, 8) for p, l in lams.items()}

    def A(n):
        v = 1.0
        for p in lams:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            v *= B[p][k]
        return v if n == 1 else 0.0

    data = {(0, n): A(n) for n in range(1, 200)}
    view = CoefficientView(T, data, exact=True)
    for p, lam in lams.items():
        d = three_term_data(T.classes[0], p, T)
        for n in range(1, 25):
            assert abs(three_term_residual(view, d, lam, p, n, T.chi)) < 1e-12
        assert three_term_relative_residual(view, d, lam, p, range(1, 25), T.chi) < 1e-12
        # a wrong eigenvalue is visible
        assert three_term_relative_residual(view, d, lam + 0.1, p, range(1, 25), T.chi) > 1e-3

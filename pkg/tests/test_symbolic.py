import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oscint import closedform, symbolic
from oscint.errors import DomainError
from oscint.symbolic import ONE, PI, ZERO, BasisTerm, SymbolicConstant

# Reference bracket coefficients over 1/(2^{3k−1}k!): (q, π power, kind, a, b)
REFERENCE = {
    1: [(1, 0, "Abs2", 0, 0)],
    2: [(1, 1, "Abs2", 0, 0), (4, 0, "Im", 0, 1)],
    3: [(Fraction(7, 4), 2, "Abs2", 0, 0), (6, 0, "Abs2", 1, 1), (6, 1, "Im", 0, 1), (-6, 0, "Re", 0, 2)],
    4: [(Fraction(-5, 2), 3, "Abs2", 0, 0), (-12, 1, "Abs2", 1, 1), (-14, 2, "Im", 0, 1),
        (-24, 0, "Im", 1, 2), (8, 0, "Im", 0, 3), (12, 1, "Re", 0, 2)],
    5: [(Fraction(61, 16), 4, "Abs2", 0, 0), (35, 2, "Abs2", 1, 1), (30, 0, "Abs2", 2, 2),
        (25, 3, "Im", 0, 1), (60, 1, "Im", 1, 2), (20, 1, "Im", 0, 3), (-35, 2, "Re", 0, 2),
        (-40, 0, "Re", 1, 3), (10, 0, "Re", 0, 4)],
}


def reference_terms(k):
    return {BasisTerm(kind, a, b): (Fraction(q), j) for q, j, kind, a, b in REFERENCE[k]}


def derived_terms(k):
    expr = symbolic.sym_expression(k)
    return {t: c.rational_pi_power() for c, t in expr.terms}


# -------------------------------------------------------- SymbolicConstant


def test_constant_arithmetic():
    a = SymbolicConstant.rational(Fraction(1, 2), 1)
    assert a + a == SymbolicConstant.rational(1, 2)
    assert a * a.conj() == SymbolicConstant.rational(Fraction(5, 4))
    assert (PI ** 2 * 3).rational_pi_power() == (Fraction(3), 2)
    assert (PI + ONE).rational_pi_power() is None
    assert ZERO * PI == ZERO


def test_zeta_even_becomes_pi_power():
    assert SymbolicConstant.zeta(2).rational_pi_power() == (Fraction(1, 6), 2)
    assert SymbolicConstant.zeta(3).offending_monomials()


@given(p=st.fractions(-5, 5), q=st.fractions(-5, 5), j=st.integers(0, 4))
def test_constant_evaluate_is_a_ring_map(p, q, j):
    x = p * PI ** j + SymbolicConstant.rational(q, p)
    y = SymbolicConstant.rational(q) + PI
    assert (x * y).evaluate() == pytest.approx(x.evaluate() * y.evaluate(), rel=1e-12, abs=1e-12)
    assert (x + y).evaluate() == pytest.approx(x.evaluate() + y.evaluate(), rel=1e-12, abs=1e-12)


def test_sym_phi_matches_numeric():
    for r in range(1, 6):
        assert symbolic.sym_phi(r).evaluate() == pytest.approx(closedform.phi_r(r), rel=1e-13)


@pytest.mark.parametrize("n,m", [(1, 0), (2, 0), (3, 1), (4, 2), (5, 0)])
def test_sym_p_poly_matches_numeric(n, m):
    assert symbolic.sym_p_poly(n, m).evaluate() == pytest.approx(closedform.p_poly(n, m), rel=1e-12)


# -------------------------------------------------------------- expressions


@pytest.mark.parametrize("k", range(1, 8))
def test_cancellation(k):
    report = symbolic.verify_cancellation(symbolic.sym_expression(k))
    assert report.passed, report.offending


@pytest.mark.parametrize("k", range(1, 7))
def test_expression_evaluates_to_closed_form(k):
    expr = symbolic.sym_expression(k)
    for tau in (-2.0, 0.0, 1.9):
        assert symbolic.evaluate_expression(expr, tau) == pytest.approx(
            closedform.i_k(k, tau).value, rel=1e-11, abs=1e-16)


@pytest.mark.parametrize("k", range(1, 6))
def test_derived_coefficients_reproduce_explicit_table(k):
    table = {BasisTerm(kind, a, b): (Fraction(num, den), pw)
             for num, den, pw, kind, a, b in closedform.EXPLICIT_FORMS[k]}
    assert derived_terms(k) == table


@pytest.mark.parametrize("k", range(1, 6))
def test_reference_form_regression(k):
    # exact comparison against the reference low-order forms
    expr = symbolic.sym_expression(k)
    assert expr.prefactor == SymbolicConstant.rational(Fraction(1, 2 ** (3 * k - 1) * math.factorial(k)))
    ref = reference_terms(k)
    assert symbolic.coefficient_multiset(expr) == sorted(ref.values())
    assert derived_terms(k) == ref


def test_reference_k4_is_the_negative_of_the_derivation():
    derived = derived_terms(4)
    assert {t: (-q, j) for t, (q, j) in reference_terms(4).items()} == derived


def test_reference_k5_differs_in_one_sign():
    derived, ref = derived_terms(5), reference_terms(5)
    differ = [t for t in ref if ref[t] != derived[t]]
    assert differ == [BasisTerm("Im", 0, 3)]
    assert derived[BasisTerm("Im", 0, 3)] == (Fraction(-20), 1)


@pytest.fixture
def alternative_phi(monkeypatch):
    # φ^{(r)} = (−i)^r ψ^{(r−1)}(1) for r ≥ 2 instead of −i^r ψ^{(r−1)}(1)
    original = symbolic.sym_phi

    def alt(r):
        if r == 1:
            return original(1)
        return symbolic.I_UNIT ** r * math.factorial(r - 1) * SymbolicConstant.zeta(r)

    caches = (symbolic.sym_p_poly, symbolic._sym_bilinear, symbolic.sym_expression)
    for c in caches:
        c.cache_clear()
    monkeypatch.setattr(symbolic, "sym_phi", alt)
    yield
    monkeypatch.undo()
    for c in caches:
        c.cache_clear()


def test_alternative_phi_sign_is_rejected(alternative_phi):
    # the other sign of i^r gives −π²/4 for the leading k = 3 coefficient, not 7π²/4
    expr = symbolic.sym_expression(3)
    assert expr.coefficient(BasisTerm("Abs2", 0, 0)).rational_pi_power() == (Fraction(-1, 4), 2)


def test_unit_binomial_is_rejected():
    # dropping C(n, j) from the bilinear sum breaks the k = 3 form
    weights = {}
    for j in range(3):
        for a in range(2 - j + 1):
            for b in range(j + 1):
                w = symbolic.sym_p_poly(2 - j, a) * symbolic.sym_p_poly(j, b).conj()
                weights[(a, b)] = weights.get((a, b), ZERO) + w
    full = symbolic._sym_bilinear(2)
    assert any(weights[key] != full[key] for key in full)


def test_derivative_expressions():
    d2 = symbolic.sym_derivative_modsq(2)
    assert {t: c.rational_pi_power() for c, t in d2.terms} == {
        BasisTerm("Abs2", 0, 0): (Fraction(1, 3), 2),
        BasisTerm("Abs2", 1, 1): (Fraction(2), 0),
        BasisTerm("Re", 0, 2): (Fraction(-2), 0),
    }
    for n in range(1, 5):
        expr = symbolic.sym_derivative_modsq(n)
        for tau in (-1.5, 0.8):
            assert symbolic.evaluate_expression(expr, tau) == pytest.approx(
                closedform.d_modsq_deriv(n, 0, tau), rel=1e-11, abs=1e-13)


# ------------------------------------------------------------------ render


def test_render_text_k3():
    text = symbolic.render(symbolic.sym_expression(3), "text")
    assert "7π²/4" in text and text.startswith("I_3(τ) = 1/1536")


def test_render_structured_k1():
    doc = symbolic.render(symbolic.sym_expression(1), "structured")
    assert doc == {"k": 1, "prefactor": "1/4", "terms": [{"kind": "Abs2", "a": 0, "coeff": "1"}]}


@pytest.mark.parametrize("k", range(1, 7))
def test_structured_round_trip(k):
    expr = symbolic.sym_expression(k)
    back = symbolic.parse_structured(symbolic.render_json(expr))
    assert back.prefactor == expr.prefactor
    assert sorted(back.terms, key=lambda ct: ct[1]) == sorted(expr.terms, key=lambda ct: ct[1])


def test_parse_rejects_bad_documents():
    with pytest.raises(DomainError):
        symbolic.parse_structured({"k": 1})
    with pytest.raises(DomainError):
        symbolic.parse_structured(json.dumps({"k": 1, "prefactor": "1/4",
                                              "terms": [{"kind": "Abs2", "a": 0, "coeff": "pi*2"}]}))


def test_basis_validation():
    with pytest.raises(DomainError):
        BasisTerm("Abs2", 0, 1)
    with pytest.raises(DomainError):
        BasisTerm("Re", 2, 1)
    with pytest.raises(DomainError):
        symbolic.sym_expression(0)

"""Homogeneous elements, the approximation loop and its verifier."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import elements
from perfectoid.arith import (
    ConfigError,
    DencapError,
    FieldConfig,
    IndeterminateError,
    KernelError,
    PrecisionError,
    TiltElement,
    UntiltElement,
)
from perfectoid.tatealg import (
    ApproximationError,
    ClassicalPoint,
    GaussPoint,
    HomogeneousElement,
    Monomial,
    _expand,
    approximate,
    decompose,
    evaluate,
    point_from_json,
    reduce_element,
    sharp_element,
    tilt_power,
    valuation_at,
    verify_contract,
)
from perfectoid.tiltkit import sharp

# full-precision sharps root exponents by p^(prec-1), so dencap leaves
# that much headroom over the digit denominators in play
C3 = FieldConfig(3, 4, 5)
# prec = p^2 certifies target-3 sharp values representative-independent
TC3 = FieldConfig(3, 9, 6)


def uvar(config, nvars, j, coeff=None):
    return HomogeneousElement.variable(config, "untilt", nvars, j, coeff)


def tvar(config, nvars, j, coeff=None):
    return HomogeneousElement.variable(config, "tilt", nvars, j, coeff)


def w_times(config, F, s):
    return F.scalar_mul(UntiltElement.monomial(config, 1, s))


# =====================================================================
# Monomials
# =====================================================================

def test_monomial_graded_lex_order():
    a = Monomial(C3, [2, 0])
    b = Monomial(C3, [1, 1])
    c = Monomial(C3, [0, 2])
    d = Monomial(C3, [1, 0])
    assert c < b < a          # same degree, lex on exponents
    assert d < c              # lower total degree loses
    assert max([c, a, b], key=Monomial.sort_key) == a


def test_monomial_arithmetic():
    m = Monomial(C3, [Fraction(1, 3), 1])
    n = Monomial(C3, [Fraction(2, 3), 0])
    assert m * n == Monomial(C3, [1, 1])
    assert n.divides(m * n)
    assert not n.divides(m)
    assert (m * n) / n == m
    with pytest.raises(KernelError):
        m / n
    assert m.scaled(2) == Monomial(C3, [Fraction(2, 3), 2])
    assert m.total_degree() == Fraction(4, 3)


def test_monomial_lattice_guard():
    with pytest.raises(DencapError):
        Monomial(C3, [Fraction(1, 729), 0])
    m = Monomial(C3, [Fraction(1, 243), 0])
    with pytest.raises(DencapError):
        m.scaled(Fraction(1, 3))


def test_monomial_json_round_trip():
    m = Monomial(C3, [Fraction(5, 9), 2])
    assert Monomial.from_json(C3, m.to_json()) == m


def test_monomial_repr():
    assert repr(Monomial(C3, [Fraction(1, 3), 0, 2])) == "T0^(1/3)*T2^2"
    assert repr(Monomial(C3, [0, 0])) == "1"


# =====================================================================
# Homogeneous elements: construction and ring laws
# =====================================================================

def test_element_rejects_mixed_degrees():
    one = UntiltElement.one(C3)
    with pytest.raises(KernelError):
        HomogeneousElement(C3, "untilt", 2, 1, {
            Monomial(C3, [1, 0]): one,
            Monomial(C3, [2, 0]): one,
        })


def test_element_rejects_kind_mismatch():
    with pytest.raises(ConfigError):
        HomogeneousElement(C3, "untilt", 1, 1,
                           {Monomial(C3, [1]): TiltElement.one(C3)})


def test_element_precision_is_the_minimum():
    # a zero coefficient still caps the precision before being dropped
    sharp_coeff = UntiltElement.one(C3)
    fuzzy_zero = UntiltElement.zero(C3, 2)
    F = HomogeneousElement(C3, "untilt", 2, 1, {
        Monomial(C3, [1, 0]): sharp_coeff,
        Monomial(C3, [0, 1]): fuzzy_zero,
    })
    assert F.precexp == 2
    assert list(F.terms) == [Monomial(C3, [1, 0])]
    assert F.terms[Monomial(C3, [1, 0])].precexp.as_fraction() == 2


def test_element_square_expands():
    T0 = uvar(C3, 2, 0)
    T1 = uvar(C3, 2, 1)
    sq = (T0 + T1) ** 2
    assert sq == HomogeneousElement(C3, "untilt", 2, 2, {
        Monomial(C3, [2, 0]): UntiltElement.one(C3),
        Monomial(C3, [1, 1]): UntiltElement.from_int(C3, 2),
        Monomial(C3, [0, 2]): UntiltElement.one(C3),
    })
    assert sq.degree == 2


def test_element_add_requires_one_degree():
    with pytest.raises(KernelError):
        uvar(C3, 2, 0) + HomogeneousElement.one(C3, "untilt", 2)


def test_element_leading_term():
    F = uvar(C3, 2, 0) + uvar(C3, 2, 1)
    mono, coeff = F.leading()
    assert mono == Monomial(C3, [1, 0])
    assert coeff == UntiltElement.one(C3)
    with pytest.raises(KernelError):
        HomogeneousElement.zero(C3, "untilt", 2, 1).leading()


def test_element_json_round_trip():
    p13 = UntiltElement.monomial(C3, 1, Fraction(1, 3))
    F = HomogeneousElement(C3, "untilt", 2, Fraction(4, 3), {
        Monomial(C3, [Fraction(1, 3), 1]): p13,
        Monomial(C3, [Fraction(4, 3), 0]): UntiltElement.from_int(C3, 2),
    }, 4)
    assert HomogeneousElement.from_json(F.to_json()) == F
    assert HomogeneousElement.from_json(F.dumps()) == F


def test_scalar_multiplication_shifts_digits():
    F = uvar(C3, 1, 0, UntiltElement.from_int(C3, 2))
    G = w_times(C3, F, 1)
    assert G.terms[Monomial(C3, [1])] == UntiltElement.monomial(C3, 2, 1)


# =====================================================================
# sharp_element: frozen values and the coefficient oracle
# =====================================================================

def test_sharp_element_fixes_rational_monomials():
    g = tvar(C3, 1, 0, TiltElement.monomial(C3, 1, Fraction(1, 3)))
    f = sharp_element(g, 4)
    assert f == uvar(C3, 1, 0, UntiltElement.monomial(C3, 1, Fraction(1, 3)))


def test_sharp_element_is_identity_on_plain_variables():
    g = tvar(C3, 2, 0) + tvar(C3, 2, 1)
    assert sharp_element(g, 4) == uvar(C3, 2, 0) + uvar(C3, 2, 1)


def test_sharp_element_matches_coefficient_lift():
    one_plus_t = TiltElement.one(TC3) + TiltElement.uniformizer(TC3)
    g = HomogeneousElement(TC3, "tilt", 2, 2,
                           {Monomial(TC3, [1, 1]): one_plus_t})
    f = sharp_element(g, 3)
    assert f.terms[Monomial(TC3, [1, 1])] == sharp(one_plus_t, 3)
    assert f.precexp == 3


def test_sharp_element_is_multiplicative_mod_target():
    g1 = tvar(TC3, 2, 0, TiltElement.one(TC3) + TiltElement.uniformizer(TC3))
    g2 = tvar(TC3, 2, 0) + tvar(TC3, 2, 1, TiltElement.uniformizer(TC3))
    lhs = sharp_element(g1 * g2, 3)
    rhs = (sharp_element(g1, 3) * sharp_element(g2, 3)).with_precision(3)
    assert lhs == rhs


def test_sharp_element_requires_tilt_input():
    with pytest.raises(ConfigError):
        sharp_element(uvar(C3, 1, 0), 4)


# =====================================================================
# tilt_power: exact fractional powers in characteristic p
# =====================================================================

def test_tilt_power_cube_root_cubes_back():
    g = tvar(C3, 2, 0) + tvar(C3, 2, 1, TiltElement.uniformizer(C3))
    r = tilt_power(g, Fraction(1, 3))
    assert r.terms == {
        Monomial(C3, [Fraction(1, 3), 0]): TiltElement.one(C3),
        Monomial(C3, [0, Fraction(1, 3)]):
            TiltElement.monomial(C3, 1, Fraction(1, 3)),
    }
    assert r ** 3 == g.with_precision(C3.prec)
    assert r.degree == Fraction(1, 3)


def test_tilt_power_integer_and_trivial_cases():
    g = tvar(C3, 1, 0)
    assert tilt_power(g, 0) == HomogeneousElement.one(C3, "tilt", 1)
    assert tilt_power(g, 1) == g.with_precision(C3.prec)
    assert tilt_power(g, 2) == g * g


def test_tilt_power_respects_the_lattice():
    g = tvar(C3, 1, 0, TiltElement.monomial(C3, 1, Fraction(1, 243)))
    with pytest.raises(DencapError):
        tilt_power(g, Fraction(1, 3))


# =====================================================================
# decompose: slicing along powers of the uniformizer
# =====================================================================

def test_decompose_splits_linear_form():
    f = uvar(C3, 2, 0) + uvar(C3, 2, 1, UntiltElement.uniformizer(C3))
    g0, g1 = decompose(f, 1)
    assert g0 == tvar(C3, 2, 0)
    assert g1 == tvar(C3, 2, 1)


def test_decompose_keeps_rational_digits():
    coeff = UntiltElement.monomial(C3, 1, Fraction(1, 3))
    f = uvar(C3, 1, 0, coeff)
    (g0,) = decompose(f, 0)
    assert g0 == tvar(C3, 1, 0, TiltElement.monomial(C3, 1, Fraction(1, 3)))


def test_decompose_unit_coefficient():
    f = uvar(C3, 1, 0, UntiltElement.one(C3)
             + UntiltElement.uniformizer(C3))
    g0, g1 = decompose(f, 1)
    assert g0 == tvar(C3, 1, 0)
    assert g1 == tvar(C3, 1, 0)
    recomb = sharp_element(g0, 2) + w_times(C3, sharp_element(g1, 1), 1)
    assert recomb.with_precision(2) == f.with_precision(2)


def test_decompose_needs_enough_precision():
    f = uvar(C3, 1, 0).with_precision(2)
    with pytest.raises(PrecisionError):
        decompose(f, 2)


@settings(max_examples=40)
@given(
    p=st.sampled_from([2, 3, 5]),
    c=st.integers(min_value=0, max_value=2),
    data=st.data(),
)
def test_decompose_recombines_mod_depth(p, c, data):
    config = FieldConfig(p, 4, 4)
    a = data.draw(elements(config, "untilt", max_terms=3, max_denpow=1))
    b = data.draw(elements(config, "untilt", max_terms=3, max_denpow=1))
    f = HomogeneousElement(config, "untilt", 2, 1, {
        Monomial(config, [1, 0]): a,
        Monomial(config, [0, 1]): b,
    })
    parts = decompose(f, c)
    assert len(parts) == c + 1
    # slice i only reaches the target modulo w^(c+1-i); the weighted sum
    # is then determined exactly modulo w^(c+1)
    recomb = HomogeneousElement.zero(config, "untilt", 2, 1)
    for i, gi in enumerate(parts):
        recomb = recomb + w_times(config, sharp_element(gi, c + 1 - i), i)
    assert recomb.with_precision(c + 1) == f.with_precision(c + 1)


# =====================================================================
# Points and evaluation
# =====================================================================

def test_evaluate_integer_exponents():
    F = HomogeneousElement(C3, "untilt", 2, 2,
                           {Monomial(C3, [1, 1]): UntiltElement.one(C3)})
    pt = ClassicalPoint([UntiltElement.uniformizer(C3),
                         UntiltElement.one(C3)
                         + UntiltElement.uniformizer(C3)])
    got = evaluate(F, pt)
    want = UntiltElement.uniformizer(C3) * (
        UntiltElement.one(C3) + UntiltElement.uniformizer(C3))
    assert got == want


def test_evaluate_fractional_exponent_on_uniformizer_powers():
    F = HomogeneousElement(C3, "untilt", 2, 1, {
        Monomial(C3, [Fraction(1, 3), Fraction(2, 3)]):
            UntiltElement.one(C3)})
    pt = ClassicalPoint([UntiltElement.uniformizer(C3)] * 2)
    assert evaluate(F, pt) == UntiltElement.uniformizer(C3)


def test_evaluate_fractional_exponent_through_preimage():
    y = TiltElement.one(C3) + TiltElement.uniformizer(C3)
    x = sharp(y, C3.prec)
    pt = ClassicalPoint([x], [y])
    F = HomogeneousElement(
        C3, "untilt", 1, Fraction(1, 3),
        {Monomial(C3, [Fraction(1, 3)]): UntiltElement.one(C3)})
    # (1+t)^(1/3) = 1 + t^(1/3), so the value is its sharp image
    root = TiltElement.one(C3) + TiltElement.monomial(C3, 1, Fraction(1, 3))
    assert evaluate(F, pt) == sharp(root, C3.prec)


def test_evaluate_reports_missing_roots():
    F = HomogeneousElement(
        C3, "untilt", 1, Fraction(1, 3),
        {Monomial(C3, [Fraction(1, 3)]): UntiltElement.one(C3)})
    pt = ClassicalPoint([UntiltElement.one(C3)
                         + UntiltElement.uniformizer(C3)])
    with pytest.raises(IndeterminateError):
        evaluate(F, pt)


def test_evaluate_zero_coordinate_and_empty_element():
    F = uvar(C3, 2, 0) + uvar(C3, 2, 1)
    pt = ClassicalPoint([UntiltElement.zero(C3, 4),
                         UntiltElement.one(C3)])
    assert evaluate(F, pt) == UntiltElement.one(C3)
    Z = HomogeneousElement.zero(C3, "untilt", 2, 1, 4)
    assert evaluate(Z, pt).is_zero()


def test_evaluate_rejects_the_gauss_point():
    with pytest.raises(KernelError):
        evaluate(uvar(C3, 1, 0), GaussPoint())


def test_point_validates_tilt_preimages():
    y = TiltElement.uniformizer(C3)
    good = UntiltElement.uniformizer(C3)
    ClassicalPoint([good], [y])
    with pytest.raises(KernelError):
        ClassicalPoint([UntiltElement.one(C3)], [y])


def test_point_json_round_trip():
    y = TiltElement.uniformizer(C3)
    pt = ClassicalPoint([UntiltElement.uniformizer(C3),
                         UntiltElement.one(C3)], [y, None])
    back = point_from_json(pt.to_json())
    assert back == pt
    assert point_from_json(GaussPoint().to_json()) == GaussPoint()


def test_gauss_valuation_reads_coefficients():
    F = (uvar(C3, 2, 0, UntiltElement.monomial(C3, 1, 2))
         + uvar(C3, 2, 1, UntiltElement.uniformizer(C3)))
    assert valuation_at(F, GaussPoint()) == (1, 1)
    Z = HomogeneousElement.zero(C3, "untilt", 2, 1, 4)
    assert valuation_at(Z, GaussPoint()) == (None, 4)


def test_classical_valuation_flags_unsettled_zero():
    F = uvar(C3, 2, 0) - uvar(C3, 2, 1)
    pt = ClassicalPoint([UntiltElement.one(C3), UntiltElement.one(C3)])
    exact, lower = valuation_at(F, pt)
    assert exact is None
    assert lower == 4


# =====================================================================
# approximate: frozen runs
# =====================================================================

def test_approximate_exact_residue_stops_at_once():
    f = uvar(C3, 2, 0) + uvar(C3, 2, 1)
    g = approximate(f, 1, Fraction(1, 3))
    assert g == tvar(C3, 2, 0) + tvar(C3, 2, 1)


def test_approximate_linear_form():
    f = uvar(C3, 2, 0) + uvar(C3, 2, 1, UntiltElement.uniformizer(C3))
    g = approximate(f, 1, Fraction(1, 3))
    assert g == tvar(C3, 2, 0) + tvar(C3, 2, 1, TiltElement.uniformizer(C3))


def test_approximate_quadratic_depth():
    f = (uvar(C3, 3, 0)
         + uvar(C3, 3, 1, UntiltElement.uniformizer(C3))
         + uvar(C3, 3, 2, UntiltElement.monomial(C3, 1, 2)))
    g = approximate(f, 2, Fraction(1, 3))
    assert g == (tvar(C3, 3, 0)
                 + tvar(C3, 3, 1, TiltElement.uniformizer(C3))
                 + tvar(C3, 3, 2, TiltElement.monomial(C3, 1, 2)))


def test_approximate_unit_coefficient_meets_contract():
    # 1 + p has no finite tilt expansion, so every stage refines; the
    # digit denominators grow by one p-power per stage and the dencap
    # must hold all of them
    UC3 = FieldConfig(3, 4, 14)
    f = uvar(UC3, 1, 0, UntiltElement.one(UC3)
             + UntiltElement.uniformizer(UC3))
    g = approximate(f, 1, Fraction(1, 3))
    assert g.degree == f.degree
    pts = [GaussPoint(),
           ClassicalPoint([UntiltElement.one(UC3)]),
           ClassicalPoint([UntiltElement.uniformizer(UC3)]),
           ClassicalPoint([UntiltElement.zero(UC3, 4)])]
    report = verify_contract(f, g, 1, Fraction(1, 3), pts)
    assert report.passed, report.failures()


def test_approximate_validates_inputs():
    f = uvar(C3, 1, 0)
    with pytest.raises(KernelError):
        approximate(f, -1, Fraction(1, 3))
    with pytest.raises(KernelError):
        approximate(f, 1, Fraction(3, 2))
    with pytest.raises(DencapError):
        approximate(f, 1, Fraction(1, 2))    # off the p = 3 lattice
    with pytest.raises(PrecisionError):
        approximate(f.with_precision(1), 1, Fraction(1, 3))


def test_expansion_error_reports_shallow_remainder():
    h = uvar(C3, 1, 0, UntiltElement.monomial(C3, 1, Fraction(1, 9)))
    g = tvar(C3, 1, 0)
    with pytest.raises(ApproximationError):
        _expand(h, g, Fraction(0), Fraction(7, 9), C3.prec, 2)


# =====================================================================
# verify_contract
# =====================================================================

def _linear_pair():
    f = uvar(C3, 2, 0) + uvar(C3, 2, 1, UntiltElement.uniformizer(C3))
    g = tvar(C3, 2, 0) + tvar(C3, 2, 1, TiltElement.uniformizer(C3))
    return f, g


def test_contract_passes_on_an_exact_match():
    f, g = _linear_pair()
    pts = [GaussPoint(),
           ClassicalPoint([UntiltElement.one(C3), UntiltElement.one(C3)]),
           ClassicalPoint([UntiltElement.zero(C3, 4),
                           UntiltElement.uniformizer(C3)])]
    report = verify_contract(f, g, 1, Fraction(1, 3), pts)
    assert report.passed
    assert all(r["equality"] == "pass" and r["inequality"] == "pass"
               for r in report.rows)


def test_contract_catches_a_dropped_term():
    # keeping only the residue of T0 + p*T1 fails where T1 dominates
    f, _ = _linear_pair()
    g = tvar(C3, 2, 0)
    one = UntiltElement.one(C3)
    zero = UntiltElement.zero(C3, 4)
    at_e0 = ClassicalPoint([one, zero])
    at_e1 = ClassicalPoint([zero, one])
    report = verify_contract(f, g, 1, Fraction(1, 2), [at_e0, at_e1])
    assert not report.passed
    good, bad = report.rows
    assert good["equality"] == "pass" and good["inequality"] == "pass"
    assert bad["equality"] == "pass"
    assert bad["inequality"] == "fail"


def test_contract_fails_on_wrong_residue():
    f = uvar(C3, 1, 0)
    g = HomogeneousElement.zero(C3, "tilt", 1, 1)
    pt = ClassicalPoint([UntiltElement.one(C3)])
    report = verify_contract(f, g, 1, Fraction(1, 3), [pt])
    assert not report.passed
    row = report.rows[0]
    assert row["equality"] == "fail"
    assert row["inequality"] == "fail"


def test_contract_reports_indeterminate_when_precision_runs_out():
    coeff = UntiltElement(C3, {Fraction(1): 1}, Fraction(4, 3))
    f = uvar(C3, 1, 0, coeff)
    g = tvar(C3, 1, 0, TiltElement.uniformizer(C3))
    report = verify_contract(f, g, 1, Fraction(1, 3), [GaussPoint()])
    row = report.rows[0]
    assert row["equality"] == "pass"
    assert row["inequality"] == "indeterminate"
    assert not report.passed


def test_contract_report_shapes():
    f, g = _linear_pair()
    report = verify_contract(f, g, 1, Fraction(1, 3), [GaussPoint()])
    data = report.to_json()
    assert data["passed"] is True
    assert data["points"][0]["point"] == {"kind": "gauss"}
    assert report.failures() == []
    assert "pass" in repr(report)


# =====================================================================
# reduce / lift on homogeneous elements
# =====================================================================

def test_reduce_element_drops_deep_digits():
    f = uvar(C3, 1, 0, UntiltElement.one(C3)
             + UntiltElement.uniformizer(C3))
    r = reduce_element(f)
    assert r == tvar(C3, 1, 0).with_precision(1)
    assert r.precexp == 1


def test_reduce_of_sharp_recovers_the_residue():
    g = tvar(C3, 2, 0, TiltElement.one(C3)
             + TiltElement.monomial(C3, 1, Fraction(1, 3))) + tvar(C3, 2, 1)
    f = sharp_element(g, C3.prec)
    assert reduce_element(f) == HomogeneousElement(
        C3, "tilt", 2, 1, dict(g.terms), 1)

import math
from fractions import Fraction

import pytest

from haarwords import freegroup as fg
from haarwords import wordint as wi
from haarwords.bounds import g_polynomial
from haarwords.errors import (TheoremViolationError, UnsupportedSizeError,
                              ValidationError)
from haarwords.ratfunc import Polynomial, RationalFunction
from haarwords.symgroup import Partition, schur_dim_poly

A = fg.parse_word("a")
B = fg.parse_word("b")
COMM = fg.parse_word("abAB")


def as_constant(rf):
    return rf.constant_value()


def test_unbalanced_monomial_is_zero_with_annotation():
    value, note = wi.exact_word_moment(wi.TraceMonomial.of(A), explain=True)
    assert value.is_zero() and note == "phase-invariance"
    value, note = wi.exact_word_moment(wi.TraceMonomial.of(A), n=7, explain=True)
    assert value == 0 and note == "phase-invariance"


def test_single_trace_pair_is_one():
    m = wi.TraceMonomial.of(A, (A, True))
    assert as_constant(wi.exact_word_moment(m)) == 1


def test_commutator_trace_is_one_over_n():
    value = wi.exact_word_moment(wi.TraceMonomial.of(COMM))
    assert value == RationalFunction(Polynomial((1,)), Polynomial.x())


def test_power_trace_variance_matches_min_oracle():
    # E |tr u^j|^2 = min(j, n); symbolically the engine sees the regime
    # n >= j, where the value is the constant j
    for j in (1, 2, 3):
        m = wi.TraceMonomial.of(A**j, (A**j, True))
        assert as_constant(wi.exact_word_moment(m)) == j
        for n in range(j, j + 3):
            assert wi.exact_word_moment(m, n=n) == j
    with pytest.raises(ValidationError):
        wi.exact_word_moment(wi.TraceMonomial.of(A**3, (A**3, True)), n=2)


def test_occurrence_cap():
    m = wi.TraceMonomial.of(A**5, (A**5, True))
    with pytest.raises(UnsupportedSizeError):
        wi.exact_word_moment(m)


def test_empty_factor_is_dimension():
    m = wi.TraceMonomial.of(fg.Word(()))
    assert wi.exact_word_moment(m, n=6) == 6
    sym = wi.exact_word_moment(m)
    assert sym == RationalFunction(Polynomial.x())


def test_commutator_stable_character_examples():
    sym = wi.expect_stable_character((1,), (), COMM)
    assert sym == RationalFunction(Polynomial((1,)), Polynomial.x())
    for n in range(2, 11):
        assert wi.expect_stable_character((1,), (), COMM, n=n) == Fraction(1, n)
    assert wi.expect_stable_character((1,), (1,), A).is_zero()
    assert wi.expect_stable_character((2,), (), A).is_zero()


@pytest.mark.parametrize("lam", [(1,), (2,), (1, 1), (2, 1)])
def test_commutator_matches_frobenius_formula(lam):
    # classical identity: integrating an irreducible character over a
    # commutator gives 1/dimension, uniformly in n
    lam = Partition(lam)
    expected = RationalFunction(Polynomial((1,))) / schur_dim_poly(lam)
    assert wi.expect_stable_character(lam, (), COMM) == expected


def test_conjugation_invariance():
    for v_text in ("a", "b", "ab", "Ba"):
        v = fg.parse_word(v_text)
        w = v * COMM * v.inverse()
        assert wi.expect_stable_character((1,), (1,), w) == \
            wi.expect_stable_character((1,), (1,), COMM)
        assert wi.expect_stable_character((2,), (), w) == \
            wi.expect_stable_character((2,), (), COMM)


def test_inversion_symmetry():
    for lam, mu in (((1,), ()), ((1,), (1,))):
        for w in (COMM, fg.parse_word("abab"), fg.parse_word("aabABA")):
            lhs = wi.expect_stable_character(mu, lam, w)
            rhs = wi.expect_stable_character(lam, mu, w.inverse())
            assert lhs == rhs
    lhs = wi.expect_stable_character((1,), (2,), COMM)
    rhs = wi.expect_stable_character((2,), (1,), COMM.inverse())
    assert lhs == rhs


def test_weight_mismatch_gives_zero():
    w = fg.parse_word("aab")
    assert wi.expect_stable_character((2,), (), w).is_zero()
    assert wi.expect_stable_character((1,), (1,), w).is_zero()


def test_degree_bound_value():
    assert wi.degree_bound(2, 4) == math.ceil(24 * (1 + math.log(8)))
    assert wi.degree_bound(2, 4) == 74
    assert wi.degree_bound(1, 4) == math.ceil(12 * (1 + math.log(4)))


@pytest.fixture(scope="module")
def commutator_report():
    return wi.interpolate_phi((1,), (), COMM)


def test_interpolation_reconstructs_exact_form(commutator_report):
    rep = commutator_report
    assert rep.degree_cap == wi.degree_bound(1, 4)
    assert rep.fitted_degree <= rep.degree_cap
    assert all(r == 0 for r in rep.residuals)
    # E = 1/n exactly, so the fitted polynomial is g_4(x) * x
    expected = g_polynomial(4) * Polynomial.x()
    assert Polynomial(rep.poly_coeffs) == expected
    assert rep.vanishing_order == 1
    assert rep.v_functionals[0] == 0 and rep.v_functionals[1] == 1
    assert all(v == 0 for v in rep.v_functionals[2:])


def test_interpolation_matches_symbolic_route(commutator_report):
    rep = commutator_report
    sym = wi.expect_stable_character((1,), (), COMM)
    assert sym.valuation_at_infinity() == rep.vanishing_order
    g = g_polynomial(4)
    poly = Polynomial(rep.poly_coeffs)
    for n, value in rep.held_out_points:
        assert sym(Fraction(n)) == value
        assert poly(Fraction(1, n)) == g(Fraction(1, n)) * value


def test_interpolation_of_identically_zero_expectation():
    rep = wi.interpolate_phi((1,), (1,), fg.parse_word("ab"))
    assert all(v == 0 for _, v in rep.sample_points)
    assert rep.vanishing_order == math.inf
    verdict = wi.decay_order_check(rep)
    assert verdict["passed"] and verdict["observed_order"] == "inf"


def test_decay_order_check_verdicts(commutator_report):
    verdict = wi.decay_order_check(commutator_report)
    assert verdict["passed"]
    assert verdict["required_order"] == 1 and verdict["observed_order"] == 1
    # forcing a stricter requirement must raise
    fake = wi.InterpolationReport(
        lam=Partition((2,)), mu=Partition(()), word=COMM,
        n_start=8, sample_points=[], held_out_points=[],
        degree_cap=74, poly_coeffs=(Fraction(1),), fitted_degree=0,
        residuals=[], vanishing_order=0, v_functionals=[Fraction(1)])
    with pytest.raises(TheoremViolationError):
        wi.decay_order_check(fake, proper_power=False, mu_empty=True)


def test_proper_power_relaxes_requirement():
    rep = wi.interpolate_phi((1,), (), COMM)
    verdict = wi.decay_order_check(rep, proper_power=True)
    assert verdict["required_order"] == 0


def test_report_json_round():
    rep = wi.interpolate_phi((1,), (), COMM, held_out=2)
    blob = rep.to_json()
    assert blob["word"] == "abAB"
    assert blob["degree_cap"] == 29
    assert all(r == "0" for r in blob["residuals"])

import pytest
from flint import acb
from hypothesis import given, settings
from hypothesis import strategies as st

from elnum import Mul, OpaqueConstant, Rat, find_rational_relation, parse, verify_relation
from elnum.linrel import CANDIDATE, VERIFIED, IntegerRelation, combination, relation_residual
from oracles import brute_relation, mp_value, relation_instances


def P(*texts):
    return [parse(t) for t in texts]


def test_log2_log8():
    v = P("log(2)", "log(8)")
    rel = find_rational_relation(v, 50, 256)
    assert rel.coefficients == (-3, 1) and rel.status == CANDIDATE
    checked = verify_relation(v, rel)
    assert checked.status == VERIFIED and checked.verified


def test_pi_half_pi():
    v = P("pi", "pi*(1/2)")
    rel = find_rational_relation(v, 50, 256)
    # sign convention: last nonzero coefficient positive
    assert rel.coefficients == (-1, 2)
    assert verify_relation(v, rel).verified


def test_independent_logs():
    assert find_rational_relation(P("log(e)", "log(2)", "log(3)"), 50, 256) is None
    assert find_rational_relation(P("1", "log(2)", "log(3)"), 50, 256) is None


def test_e_pi_candidate_rejected():
    v = P("e", "pi")
    rel = verify_relation(v, IntegerRelation((1, -1)))
    assert rel.rejected and not rel.verified


def test_argument_checks():
    with pytest.raises(ValueError):
        find_rational_relation(P("1", "e"), 0)
    with pytest.raises(ValueError):
        find_rational_relation(P("1", "e"), 5, 32)
    with pytest.raises(ValueError):
        find_rational_relation([], 5)
    with pytest.raises(ValueError):
        IntegerRelation((0, 0))
    with pytest.raises(ValueError):
        verify_relation(P("1"), IntegerRelation((1, 2)))


def test_complex_values():
    # log(-1) = i*pi: a relation must kill both parts
    v = P("log(-1)", "pi*i", "pi")
    rel = find_rational_relation(v, 10, 256)
    assert rel.coefficients == (-1, 1, 0)
    assert verify_relation(v, rel).verified


def test_opaque_constants():
    x = OpaqueConstant("x", lambda bits: acb(2).sqrt())
    v = [x, parse("1"), x]
    rel = find_rational_relation(v, 5, 256)
    assert rel.coefficients == (-1, 0, 1)
    assert verify_relation(v, rel).verified
    other = verify_relation([x, parse("pow(2, 1/2)")], IntegerRelation((1, -1)))
    assert not other.verified and "do not cancel" in other.diagnostic


def test_combination_text():
    assert str(combination(P("log(2)", "log(3)"), (2, -1))) == "2*log(2) - log(3)"
    assert combination(P("e"), (0,)) == Rat(0)


@pytest.mark.parametrize("values", relation_instances(50))
def test_lattice_agrees_with_brute_force(values):
    ref = brute_relation([mp_value(v, 60) for v in values], 5)
    got = find_rational_relation(values, 5, 256)
    assert (got.coefficients if got else None) == ref


def test_returned_relation_stable_at_double_precision():
    v = P("log(2)", "log(3)", "log(12)")
    rel = find_rational_relation(v, 20, 256)
    assert rel.coefficients == (-2, -1, 1)
    from elnum import evaluate
    balls = [evaluate(x, 512).value for x in v]
    assert relation_residual(balls, rel.coefficients, 512).contains_zero()


@settings(max_examples=25)
@given(st.sampled_from(relation_instances(20, seed=3)),
       st.fractions(min_value=-5, max_value=5, max_denominator=5).filter(lambda q: q != 0))
def test_scaling_invariance(values, q):
    scaled = [Mul(Rat.of(q), v) for v in values]
    a = find_rational_relation(values, 5, 256)
    b = find_rational_relation(scaled, 5, 256)
    assert (a and a.coefficients) == (b and b.coefficients)

import pytest
from hypothesis import given
from hypothesis import strategies as st

from elnum import (Add, Exp, Inv, Log, Mul, Neg, ParseError, Rat, builtin, derived, evaluate,
                   meta, parse, render)
from elnum.expr import NODE_KINDS, walk
from oracles import mp_value
from strategies import small_rationals, trees

GAMMA_TEXT = "4 + log(1 + exp(log(2)/3))"


def test_parse_exp_exp_zero():
    assert parse("exp(exp(0))") == Exp(Exp(Rat(0)))


def test_parse_gamma_structure():
    g = parse(GAMMA_TEXT)
    assert g == Add(Rat(4), Log(Add(Rat(1), Exp(Mul(Log(Rat(2)), Inv(Rat(3)))))))
    assert {type(n) for n in walk(g)} == {Add, Log, Exp, Mul, Inv, Rat}


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse("log(0")
    assert info.value.position == 5


@pytest.mark.parametrize("text", ["1/0", "2^3", "foo(1)", "e(1)", "", "1 +", "root(2, 3, 3)",
                                  "pow(2, e)"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_render_examples():
    assert render(Exp(Rat(0))) == "exp(0)"
    assert render(Neg(Rat(1, 2))) == "-(1/2)"
    assert render(parse(GAMMA_TEXT)) == GAMMA_TEXT


def test_negative_literals_and_inv():
    assert parse("(-3/4)") == Rat(-3, 4)
    assert parse("-3/4") == Neg(Rat(3, 4))
    assert parse("inv(2)") == Inv(Rat(2))


def test_rational_normalization():
    assert Rat(6, -4) == Rat(-3, 2)
    with pytest.raises(ZeroDivisionError):
        Rat(1, 0)


def test_builtins_are_the_formulas():
    m1 = Neg(Rat(1))
    assert builtin("e") == Exp(Exp(Rat(0)))
    assert builtin("i") == Exp(Mul(Log(m1), Inv(Rat(2))))
    assert builtin("pi") == Mul(Neg(builtin("i")), Log(m1))
    with pytest.raises(ValueError):
        builtin("tau")


def test_derived_expansions():
    x = Rat(5)
    assert derived("rational_pow", x, power=Rat(2, 3)) == Exp(Mul(Rat(2, 3), Log(x)))
    assert evaluate(derived("sin", Rat(0)), 128).contains_zero()
    with pytest.raises(ValueError):
        derived("nth_root_branch", Rat(1), n=3, k=3)
    with pytest.raises(TypeError):
        derived("sin", Rat(1), Rat(2))


def test_cube_root_of_unity_branch():
    # frozen from mpmath at 80 digits
    import mpmath

    b = evaluate(derived("nth_root_branch", Rat(1), n=3, k=1), 256)
    im = "0.86602540378443864676372317075293618347140262690519031402790348972596650845440002"
    with mpmath.workdps(80):
        assert abs(mpmath.mpf(b.to_dict()["mid_re"]) + mpmath.mpf(1) / 2) < mpmath.mpf(10) ** -70
        assert abs(mpmath.mpf(b.to_dict()["mid_im"]) - mpmath.mpf(im)) < mpmath.mpf(10) ** -70
    assert b.radius_float() < 1e-60


def test_i_squared_is_minus_one():
    i = builtin("i")
    b = evaluate(Mul(i, i), 128)
    assert b.contains(evaluate(Rat(-1), 128).value)
    assert b.radius_float() < 2.0 ** -40


@pytest.mark.parametrize("x", [Rat(0), Rat(1), Rat(-3, 2), Rat(4), Rat(7, 5), Rat(-4)])
def test_sin_cos_pythagoras(x):
    s, c = derived("sin", x), derived("cos", x)
    b = evaluate(Add(Mul(s, s), Mul(c, c)), 128)
    assert b.contains(evaluate(Rat(1), 128).value)


@given(small_rationals)
def test_sin_cos_pythagoras_random(q):
    x = Rat.of(q)
    s, c = derived("sin", x), derived("cos", x)
    b = evaluate(Add(Mul(s, s), Mul(c, c)), 128)
    assert b.contains(evaluate(Rat(1), 128).value)


@given(trees())
def test_round_trip(e):
    assert parse(render(e)) == e


@given(trees())
def test_only_seven_node_kinds(e):
    assert all(type(n) in NODE_KINDS for n in walk(e))
    assert len(NODE_KINDS) == 7


def test_meta_depth():
    assert meta(Rat(3)).depth == 0
    m = meta(parse(GAMMA_TEXT))
    assert m.depth == 6
    assert m.node_count == 11


@given(st.sampled_from(["sin", "cos", "tan", "tanh"]), small_rationals)
def test_derived_values_match_mpmath(name, q):
    import mpmath

    x = Rat.of(q)
    if name == "tan" and abs(mpmath.cos(float(q))) < 1e-3:
        return
    b = evaluate(derived(name, x), 128)
    ref = getattr(mpmath, name)(mpmath.mpf(q.numerator) / q.denominator)
    assert abs(complex(float(b.mid_re), float(b.mid_im)) - complex(ref)) < 1e-12


def test_mp_oracle_agrees_on_gamma():
    v = mp_value(parse(GAMMA_TEXT), 80)
    assert mpmath_str(v.real).startswith("4.815329878999164597437811042789392916976850943714469")


def mpmath_str(x):
    import mpmath

    return mpmath.nstr(x, 60, strip_zeros=False)

import json
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from elnum import BudgetExhausted, Rat, parse
from elnum.lab import (LevelCaps, S5Certificate, S5Refusal, ScheduleStep, certify_s5,
                       colthurst_search, conjecture_evidence, degree_pattern, enumerate_levels,
                       opaque_constants, question_roots, separation)
from elnum.lab.evidence import default_basis
from elnum.lab.galois import eisenstein_prime, integer_coefficients
from elnum.lab.levels import contains_value
from elnum.lab.roots import QUINTIC, lambert_root, quintic_roots, real_root_intervals
from oracles import ball_close, brute_levels

R_VALUE = "-0.56714329040978387299996866221035554975381578718651250813513107922304579308668457"
QUINTIC_ROOTS = [
    ("0.50667872136586067601797091936477498114148855027722243633100170031458771611936378689",
     "0"),
    ("1.3289095819454231802905341277036787241361471254189079831961748537331438027478735129",
     "0"),
    ("-0.11753793513004872621271672346428740533059765471139690706586635986855563618121300934",
     "1.5185510173207883390387209019853096247795862518343852843244251052762201294606140779"),
    ("-0.11753793513004872621271672346428740533059765471139690706586635986855563618121300934",
     "-1.5185510173207883390387209019853096247795862518343852843244251052762201294606140779"),
    ("-1.6005124330511864038830716001398788946164403662733366053954438343106202465048112801",
     "0"),
]
EPS2 = "0.71828182845904523536028747135266249775724709369995957496696762772407663035354759"


@pytest.fixture(scope="module")
def levels():
    return enumerate_levels(3)


# -- enumeration ------------------------------------------------------------------------

def test_small_levels(levels):
    assert [len(lv) for lv in levels] == [1, 2, 5, 28]
    assert [str(m.expr) for m in levels[0].members] == ["0"]
    assert sorted(str(m.expr) for m in levels[1].members) == ["0", "1"]
    values = sorted(float(m.ball.mid_re) for m in levels[2].members)
    assert values == pytest.approx([-1, 0, 1, 2, 2.718281828459045])
    assert all(not lv.undecided for lv in levels)


def _match(ours, ref):
    """Bijection between our balls and the oracle's numbers."""
    used = set()
    for m in ours.members:
        d = m.ball.to_dict()
        with mpmath.workdps(50):
            z = mpmath.mpc(mpmath.mpf(d["mid_re"]), mpmath.mpf(d["mid_im"]))
            hits = [k for k, w in enumerate(ref) if abs(z - w) < mpmath.mpf(10) ** -30]
        if len(hits) != 1 or hits[0] in used:
            return False
        used.add(hits[0])
    return len(used) == len(ref)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_levels_match_brute_force(levels, n):
    ref = brute_levels(3)
    assert _match(levels[n], ref[n])


def test_level_monotone(levels):
    for lo, hi in zip(levels, levels[1:]):
        for m in lo.members:
            assert contains_value(hi, m.expr) is True


def test_enumeration_limits():
    with pytest.raises(ValueError):
        enumerate_levels(5)
    with pytest.raises(ValueError):
        enumerate_levels(-1)
    capped = enumerate_levels(3, LevelCaps(max_members=10))
    assert capped[3].truncated and len(capped[3]) == 10


def test_separation(levels):
    with pytest.raises(ValueError):
        separation(levels[0])
    assert separation(levels[1]).epsilon_float() == 1.0
    eps = separation(levels[2])
    assert eps.certified
    assert abs(eps.epsilon_float() - float(mpmath.mpf(EPS2))) < 1e-12
    assert set(eps.closest) == {"2", "exp(1)"}


def test_separation_is_a_lower_bound(levels):
    eps = separation(levels[3])
    assert eps.certified
    ms = levels[3].members
    for i in range(len(ms)):
        for j in range(i + 1, len(ms)):
            gap = abs(complex(float(ms[i].ball.mid_re), float(ms[i].ball.mid_im))
                      - complex(float(ms[j].ball.mid_re), float(ms[j].ball.mid_im)))
            assert gap >= eps.epsilon_float() * (1 - 1e-9)


def test_colthurst(levels):
    assert colthurst_search([]).rows == ()
    steps = [ScheduleStep(Rat(1), Fraction(1, 2)), ScheduleStep(Rat(1), Fraction(1, 2))]
    report = colthurst_search(steps, levels=levels)
    assert report.passing == [1, 2]
    bad = [ScheduleStep(Rat(1), Fraction(1, 2)), ScheduleStep(Rat(2), Fraction(1, 2))]
    report = colthurst_search(bad, levels=levels)
    assert report.rows[1].partial_sum == "3" and report.rows[1].member is False
    assert report.passing == [1]


# -- Galois ---------------------------------------------------------------------------

def test_s5_main_quintic():
    cert = certify_s5([2, 0, 0, 0, -10, 5])
    assert isinstance(cert, S5Certificate)
    assert cert.irreducibility == {"method": "eisenstein", "prime": 5}
    assert [(w.prime, w.pattern) for w in cert.witnesses] == [(19, (5,)), (61, (1, 1, 1, 2))]
    assert cert.replay()
    assert cert.primes_tried <= 10000


def test_s5_other_quintic():
    cert = certify_s5([1, 0, 0, 0, -1, -1])
    assert isinstance(cert, S5Certificate) and cert.replay()
    assert cert.irreducibility["method"] == "degree_patterns"
    assert [(w.prime, w.pattern) for w in cert.witnesses] == [(3, (5,)), (2, (2, 3))]


def test_s5_refusal_and_budget():
    ref = certify_s5([1, 0, 0, 0, 0, -1])
    assert isinstance(ref, S5Refusal) and ref.replay()
    assert ((1, -1), 1) in ref.factors
    with pytest.raises(BudgetExhausted):
        certify_s5([1, 0, 0, 0, 0, -2], prime_budget=200)
    with pytest.raises(ValueError):
        certify_s5([1, 0, 1])


def test_tampered_certificate_fails_replay():
    cert = certify_s5([2, 0, 0, 0, -10, 5])
    forged = S5Certificate(cert.coefficients, cert.irreducibility,
                           (cert.witnesses[0],) * 2, cert.primes_tried)
    assert not forged.replay()
    moved = S5Certificate((2, 0, 0, 0, -10, 7), cert.irreducibility, cert.witnesses, 1)
    assert not moved.replay()


def test_integer_coefficients():
    assert integer_coefficients([Fraction(1, 2), 0, -1]) == [1, 0, -2]
    assert integer_coefficients([0, -2, 4]) == [1, -2]
    assert eisenstein_prime([2, 0, 0, 0, -10, 5]) == 5
    assert eisenstein_prime([1, 0, 0, 0, -1, -1]) is None


@settings(max_examples=40)
@given(st.lists(st.integers(-9, 9), min_size=5, max_size=5),
       st.sampled_from([3, 5, 7, 11, 13, 101]))
def test_degree_pattern_matches_sympy(tail, p):
    coeffs = [1] + tail
    pat = degree_pattern(coeffs, p)
    x = sympy.symbols("x")
    poly = sympy.Poly(coeffs, x, modulus=p)
    if sympy.gcd(poly, poly.diff(x)).degree() > 0:
        assert pat is None
        return
    _, factors = poly.factor_list()
    ref = sorted(f.degree() for f, e in factors for _ in range(e))
    assert pat == tuple(ref)


# -- roots ----------------------------------------------------------------------------

def test_lambert_root():
    R = lambert_root(256)
    assert R.contains(R) and R.rad() < 1e-70
    q = question_roots(256)
    assert ball_close(q.R, R_VALUE, "1e-75")
    assert q.residuals()["R"].contains_zero()
    assert q.residuals()["R"].abs_upper() <= 1e-38


def test_quintic_roots():
    q = question_roots(256)
    for ball, (re, im) in zip(q.quintic, QUINTIC_ROOTS):
        with mpmath.workdps(90):
            assert ball_close(ball, mpmath.mpc(re, im), "1e-75")
    for r in q.residuals().values():
        assert r.contains_zero() and r.abs_upper() <= 1e-38
    assert q.pairwise_disjoint()
    assert q.vieta_sum().contains_zero()


def test_real_root_isolation():
    iv = real_root_intervals(QUINTIC)
    assert len(iv) == 3
    for (a, b), x in zip(iv, [-1.6005, 0.5067, 1.3289]):
        assert a < x < b
    assert len(quintic_roots([1, 0, 0, 0, -1, -1], 128)) == 5


def test_opaque_constants():
    c = opaque_constants()
    assert sorted(c) == ["R", "r1", "r2", "r3", "r4", "r5"]
    assert c["r3"].enclose(256).imag > 1.5


# -- conjecture evidence --------------------------------------------------------------

@pytest.mark.parametrize("cid", [1, 2])
def test_conjecture_consistent(cid):
    a = conjecture_evidence(cid, H=20, precision_bits=256, seed=0)
    assert a.verdict == "consistent"
    assert all(s.outcome == "none found" for s in a.searches)
    b = conjecture_evidence(cid, H=20, precision_bits=256, seed=0)
    assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(b.to_dict(), sort_keys=True)


def test_conjecture_falsification_path():
    basis = default_basis() + [opaque_constants()["R"]]
    report = conjecture_evidence(1, H=20, basis=basis)
    assert report.verdict == "falsification candidate"
    rel = report.searches[0].relation
    assert rel["status"] == "VerifiedSymbolic"
    assert rel["coefficients"] == [-1, 0, 0, 0, 0, 0, 0, 1]


def test_conjecture_bad_id():
    with pytest.raises(ValueError):
        conjecture_evidence(3)


def test_dependent_basis_is_inconclusive():
    basis = [parse("log(2)"), parse("log(4)")]
    report = conjecture_evidence(1, H=20, basis=basis)
    assert report.verdict == "inconclusive"

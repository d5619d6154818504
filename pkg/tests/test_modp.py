import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from almostflat.exact import IntPoly, resultant
from almostflat.modp import (NotInPrError, NotPrimeError, PolyModP, in_pr, is_prime, lambda_of,
                             mult_order, primes_up_to, split_over, splitting_density,
                             splitting_primes)

GOLDEN = IntPoly((1, -3, 1))  # x^2 - 3x + 1
EISENSTEIN = IntPoly((1, 1, 1))  # x^2 + x + 1
SMALL_PRIMES = [p for p in range(2, 200) if all(p % d for d in range(2, p))]


def brute_order(a, p):
    k, x = 1, a % p
    while x != 1:
        x = x * a % p
        k += 1
    return k


def brute_roots(f, p):
    return [x for x in range(p) if f(x) % p == 0]


def test_prime_helpers():
    assert primes_up_to(30) == (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)
    assert [n for n in range(200) if is_prime(n)] == SMALL_PRIMES
    assert primes_up_to(1) == ()


def test_split_examples():
    rep = split_over(GOLDEN, 11)
    assert rep.splits and not rep.has_zero_root and rep.distinct
    assert set(rep.roots) == {5, 9}
    assert not split_over(IntPoly((1, 0, 1)), 7).splits
    for p in (2, 3, 101):
        rep = split_over(IntPoly((-1, 1)), p)
        assert rep.splits and rep.roots == (1,) and not rep.has_zero_root
    with pytest.raises(NotPrimeError):
        split_over(GOLDEN, 9)


monic_polys = st.lists(st.integers(-20, 20), min_size=1, max_size=4).map(
    lambda cs: IntPoly(tuple(cs) + (1,)))
roots_polys = st.lists(st.integers(-8, 8), min_size=1, max_size=4).map(IntPoly.from_roots)


@given(st.one_of(monic_polys, roots_polys), st.sampled_from(SMALL_PRIMES[:20]))
def test_split_report_reproduces_the_polynomial(f, p):
    rep = split_over(f, p)
    assert set(rep.roots) == set(brute_roots(f, p))
    if rep.splits:
        prod = PolyModP(p, (1,))
        for r in rep.roots:
            prod = prod * PolyModP(p, (-r, 1))
        assert prod == PolyModP.from_int_poly(f, p)
    fp = PolyModP.from_int_poly(f, p)
    assert rep.distinct == (fp.gcd(fp.derivative()).degree == 0)
    assert in_pr(f, p) == rep.in_pr


@given(st.sampled_from([GOLDEN, EISENSTEIN, IntPoly((-2, 0, 1)), IntPoly((1, -1, 0, 1))]))
def test_distinct_roots_beyond_the_discriminant(f):
    disc = abs(resultant(f, f.derivative()))
    for p in splitting_primes([f], 400):
        if p > disc:
            assert split_over(f, p).distinct


def test_mult_order_examples():
    assert mult_order(2, 7) == 3
    assert mult_order(1, 13) == 1
    assert mult_order(5, 11) == 5
    with pytest.raises(ValueError):
        mult_order(0, 7)
    with pytest.raises(ValueError):
        mult_order(22, 11)


@given(st.sampled_from(SMALL_PRIMES[1:]), st.integers(1, 10**6))
def test_mult_order_matches_brute_force(p, a):
    if a % p == 0:
        return
    k = mult_order(a, p)
    assert k == brute_order(a, p)
    assert (p - 1) % k == 0


def test_lambda_examples():
    assert lambda_of(GOLDEN, 11) == 5
    assert lambda_of(IntPoly.from_roots([1, 1, 1]), 13) == 1
    with pytest.raises(NotInPrError, match="split"):
        lambda_of(IntPoly((1, 0, 1)), 7)
    with pytest.raises(NotInPrError, match="zero root"):
        lambda_of(IntPoly((0, -1, 1)), 7)


def test_lambda_uses_distinct_roots_only():
    # (x - 2)^2 mod 7: a repeated root still has order 3
    assert lambda_of(IntPoly.from_roots([2, 2]), 7) == 3


def test_splitting_primes_examples():
    assert splitting_primes([IntPoly((-1, 1))], 10) == [2, 3, 5, 7]
    golden = splitting_primes([GOLDEN], 20)
    assert 11 in golden and 19 in golden
    both = splitting_primes([IntPoly((1, 0, 1)), GOLDEN], 500)
    assert both == sorted(set(splitting_primes([IntPoly((1, 0, 1))], 500)) & set(
        splitting_primes([GOLDEN], 500)))
    with pytest.raises(ValueError):
        splitting_primes([IntPoly((0, 1))], 10)


def test_golden_primes_are_the_quadratic_residue_primes():
    # x^2 - 3x + 1 has discriminant 5; it splits iff 5 is a square mod p
    expected = [p for p in primes_up_to(3000)
                if p == 5 or (p > 2 and pow(5, (p - 1) // 2, p) == 1)]
    assert splitting_primes([GOLDEN], 3000) == expected


def test_eisenstein_primes_are_one_mod_three():
    expected = [p for p in primes_up_to(3000) if p == 3 or p % 3 == 1]
    assert splitting_primes([EISENSTEIN], 3000) == expected


def test_density_examples():
    assert splitting_density(IntPoly((-1, 1)), 10**4) >= Fraction(99, 100)
    assert isinstance(splitting_density(GOLDEN, 100), Fraction)
    assert splitting_density(GOLDEN, 1) == 0


@pytest.mark.slow
@pytest.mark.parametrize("f", [GOLDEN, EISENSTEIN], ids=["golden", "eisenstein"])
def test_quadratic_density_near_one_half(f):
    assert 0.45 <= splitting_density(f, 10**5) <= 0.55


def test_lambda_of_golden_matches_brute_force_orders():
    for p in splitting_primes([GOLDEN], 600):
        orders = [brute_order(r, p) for r in set(brute_roots(GOLDEN, p))]
        assert lambda_of(GOLDEN, p) == math.lcm(*orders)

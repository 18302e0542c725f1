"""Tests for `arith_tools` module."""
import math
import warnings

import pytest
from hypothesis import assume
from hypothesis import given
from hypothesis import strategies as st
from sympy import factorint

from qform_tk import arith_tools as arith

small_primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_factorize_negative_number():
    results = arith.factorize(-18)
    expected = arith.Factorization(-1, ((2, 1), (3, 2)))
    assert results == expected


def test_factorize_value_round_trip():
    results = arith.factorize(-360).value()
    assert results == -360


def test_factorize_zero_raises():
    with pytest.raises(ValueError):
        arith.factorize(0)


def test_factorization_exponent_of_missing_prime():
    results = arith.factorize(45).exponent(2)
    assert results == 0


@pytest.mark.parametrize(
    "input,output",
    [((48, 2), 4), ((48, 3), 1), ((-50, 5), 2), ((7, 2), 0)],
)
def test_valuation(input, output):
    results = arith.valuation(*input)
    assert results == output


@pytest.mark.parametrize(
    "input,output",
    [
        ((2, 7), 1),
        ((-1, 3), -1),
        ((5, 8), -1),
        ((-4, 5), 1),
        ((6, 4), 0),
        ((3, -1), 1),
        ((-3, -1), -1),
        ((0, 1), 1),
        ((1, 0), 1),
        ((2, 0), 0),
        ((-20, 3), 1),
        ((-20, 11), -1),
    ],
)
def test_kronecker(input, output):
    results = arith.kronecker(*input)
    assert results == output


@given(st.integers(min_value=-10_000, max_value=10_000))
def test_kronecker_mod_odd_prime_is_euler_criterion(a):
    for p in small_primes[1:]:
        expected = pow(a, (p - 1) // 2, p)
        expected = -1 if expected == p - 1 else expected
        assert arith.kronecker(a, p) == expected


def test_kronecker_raises_no_deprecation_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        results = [arith.kronecker(a, 15) for a in range(-20, 21)]
    assert results[20 + 7] == -1


@given(
    st.integers(min_value=-1000, max_value=1000),
    st.integers(min_value=-1000, max_value=1000).filter(bool),
    st.integers(min_value=-1000, max_value=1000).filter(bool),
)
def test_kronecker_multiplicative_in_denominator(a, b1, b2):
    results = arith.kronecker(a, b1 * b2)
    expected = arith.kronecker(a, b1) * arith.kronecker(a, b2)
    assert results == expected


@given(
    st.integers(min_value=-1000, max_value=1000),
    st.integers(min_value=-1000, max_value=1000),
    st.integers(min_value=1, max_value=2000),
)
def test_kronecker_multiplicative_in_numerator(a1, a2, b):
    results = arith.kronecker(a1 * a2, b)
    expected = arith.kronecker(a1, b) * arith.kronecker(a2, b)
    assert results == expected


@given(
    st.integers(min_value=-500, max_value=500).filter(bool),
    st.integers(min_value=1, max_value=5000),
)
def test_kronecker_periodic_mod_conductor(a, m):
    assume(math.gcd(m, 2 * a) == 1)
    period = abs(arith.conductor(a))
    results = arith.kronecker(a, m + period)
    assert results == arith.kronecker(a, m)


@pytest.mark.parametrize(
    "input,output",
    [(-72, (-2, 6)), (12, (3, 2)), (1, (1, 1)), (-4, (-1, 2))],
)
def test_squarefree_kernel(input, output):
    results = arith.squarefree_kernel(input)
    assert results == output


@given(st.integers(min_value=1, max_value=10**6), st.booleans())
def test_squarefree_kernel_splits_n(n, negative):
    if negative:
        n = -n
    k, n0 = arith.squarefree_kernel(n)
    assert k * n0 * n0 == n
    assert all(e == 1 for e in factorint(abs(k)).values())


@pytest.mark.parametrize(
    "input,output",
    [(-1, -4), (5, 5), (-3, -3), (12, 12), (2, 8), (-20, -20)],
)
def test_conductor(input, output):
    results = arith.conductor(input)
    assert results == output


@pytest.mark.parametrize("input,output", [(48, 3), (-20, 5), (7, 7), (1, 1)])
def test_odd_part(input, output):
    results = arith.odd_part(input)
    assert results == output


def test_crt_pair():
    results = arith.crt_pair(2, 3, 3, 5)
    assert results == 8


def test_sqrt_discriminant_mod_finds_every_root():
    results = arith.sqrt_discriminant_mod(-20, 21)
    expected = [8, 20, 22, 34]
    assert results == expected


def test_sqrt_discriminant_mod_non_residue():
    results = arith.sqrt_discriminant_mod(-4, 3)
    assert results == []


def test_sqrt_discriminant_mod_rejects_nonpositive_modulus():
    with pytest.raises(ValueError):
        arith.sqrt_discriminant_mod(5, 0)


@given(
    st.sampled_from([-3, -4, -20, -23, -84, 5, 8, 12, 13, 60]),
    st.integers(min_value=1, max_value=2000),
)
def test_sqrt_discriminant_mod_roots_are_roots(D, n):
    roots = arith.sqrt_discriminant_mod(D, n)
    assert all(0 <= b < 2 * n for b in roots)
    assert all((b * b - D) % (4 * n) == 0 for b in roots)


def scanned_roots(D, n):
    return [b for b in range(2 * n) if (b * b - D) % (4 * n) == 0]


@pytest.mark.parametrize(
    "input,output", [((-4, 5), [4, 6]), ((-20, 21), [8, 20, 22, 34])]
)
def test_scanned_roots(input, output):
    results = scanned_roots(*input)
    assert results == output


@pytest.mark.parametrize("D", [D for D in range(-100, 101) if D])
def test_sqrt_discriminant_mod_matches_scan(D):
    for n in range(1, 61):
        assert arith.sqrt_discriminant_mod(D, n) == scanned_roots(D, n)


@pytest.mark.slow
@pytest.mark.parametrize("D", [D for D in range(-100, 101) if D])
def test_sqrt_discriminant_mod_matches_scan_to_500(D):
    for n in range(61, 501):
        assert arith.sqrt_discriminant_mod(D, n) == scanned_roots(D, n)


def test_primes_up_to_30():
    results = list(arith.primes_up_to(30))
    expected = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert results == expected


@pytest.mark.parametrize(
    "input,output",
    [(0, 0), (1, 0), (2, 1), (3, 2), (100, 25), (10**6, 78498)],
)
def test_prime_pi(input, output):
    results = arith.prime_pi(input)
    assert results == output


@pytest.mark.parametrize("N", [2, 3, 97, 998, 999, 1000, 1001])
def test_small_segments_match_simple_sieve(N):
    blocks = arith.prime_segments(N, segment_odd_count=7)
    results = [p for block in blocks for p in block.tolist()]
    expected = arith.simple_sieve(N).tolist()
    assert results == expected


@pytest.mark.slow
def test_prime_pi_ten_million():
    results = arith.prime_pi(10**7)
    assert results == 664579

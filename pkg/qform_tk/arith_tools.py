"""Exact integer arithmetic that the rest of the toolkit leans on.

Every decision in this package eventually boils down to one of a few
questions: what are the prime factors of this number, is this a
square modulo that prime, what is left of a number once the square
part (or the 2-part) is stripped off. I kept all of those here so the
form and table modules can read like the math they implement.

Factoring and the modular square roots are delegated to `sympy`,
prime listing uses a segmented `numpy` sieve so that counting runs up
to 10**8 never hold the whole range in memory.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np
from sympy import factorint
from sympy.functions.combinatorial.numbers import jacobi_symbol
from sympy.ntheory import sqrt_mod

# odd integers per sieve segment (each segment spans twice this range)
SEGMENT_ODD_COUNT = 1_000_000


@dataclass(frozen=True)
class Factorization:
    """The signed prime factorization of a nonzero integer.

    Attributes:
        sign: +1 or -1.
        factors: (prime, exponent) pairs sorted by prime.
    """

    sign: int
    factors: tuple

    def value(self) -> int:
        """Multiplies the factorization back out."""
        result = self.sign
        for prime, exponent in self.factors:
            result *= prime**exponent
        return result

    def exponent(self, prime: int) -> int:
        """returns the exponent of `prime` (0 when it does not divide)"""
        for p, e in self.factors:
            if p == prime:
                return e
        return 0

    def primes(self) -> list:
        return [p for p, _ in self.factors]


def _require_nonzero(n: int, name: str = "n") -> None:
    if n == 0:
        msg = f"{name} must be a nonzero integer"
        raise ValueError(msg)


def factorize(n: int) -> Factorization:
    """Factors a nonzero integer into its sign and prime powers.

    Args:
        n: any nonzero integer.

    Returns:
        factorization: a `Factorization` whose `value()` is `n`.

    Raises:
        ValueError: when `n` is 0.
    """
    _require_nonzero(n)
    sign = 1 if n > 0 else -1
    factors = tuple(sorted(factorint(abs(n)).items()))
    return Factorization(sign, factors)


def valuation(n: int, p: int) -> int:
    """returns the exponent of the prime `p` in nonzero `n`"""
    _require_nonzero(n)
    count = 0
    while n % p == 0:
        n //= p
        count += 1
    return count


def kronecker(a: int, b: int) -> int:
    """Computes the Kronecker symbol (a/b).

    This is the full extension of the Jacobi symbol: negative and even
    `b` are allowed, with (a/0) = 1 exactly when a = +-1.

    Args:
        a: the numerator.
        b: the denominator.

    Returns:
        symbol: -1, 0 or 1.
    """
    if b == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if b < 0:
        b = -b
        if a < 0:
            result = -1
    twos = (b & -b).bit_length() - 1
    b >>= twos
    if twos:
        if a % 2 == 0:
            return 0
        if twos % 2 == 1 and a % 8 in (3, 5):
            result = -result
    if b == 1:
        return result
    return result * int(jacobi_symbol(a % b, b))


def squarefree_kernel(n: int) -> tuple:
    """Splits n as k * n0**2 with k squarefree (carrying the sign of n).

    Args:
        n: a nonzero integer.

    Returns:
        kernel: the pair (k, n0) where n0**2 is the largest square
            dividing n.
    """
    factorization = factorize(n)
    k = factorization.sign
    n0 = 1
    for prime, exponent in factorization.factors:
        k *= prime ** (exponent % 2)
        n0 *= prime ** (exponent // 2)
    return k, n0


def conductor(a: int) -> int:
    """returns the (signed) conductor of the character (a/.)

    It is k(a) when k(a) = 1 mod 4 and 4*k(a) otherwise, so the symbol
    kronecker(a, m) only depends on m mod |conductor(a)| for m coprime
    to 2a.
    """
    _require_nonzero(a, "a")
    k, _ = squarefree_kernel(a)
    if k % 4 == 1:
        return k
    return 4 * k


def odd_part(n: int) -> int:
    """returns the largest positive odd divisor of n"""
    _require_nonzero(n)
    n = abs(n)
    return n >> ((n & -n).bit_length() - 1)


@lru_cache(maxsize=65536)
def _prime_power_roots(residue: int, prime: int, exponent: int) -> tuple:
    modulus = prime**exponent
    roots = sqrt_mod(residue % modulus, modulus, all_roots=True) or []
    return tuple(sorted(set(roots)))


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    """Combines x = r1 mod m1 and x = r2 mod m2 for coprime moduli."""
    step = (r2 - r1) * pow(m1, -1, m2) % m2
    return (r1 + m1 * step) % (m1 * m2)


def sqrt_discriminant_mod(D: int, n: int) -> list:
    """Finds every b in [0, 2n) with b*b = D mod 4n.

    The roots are built prime power by prime power and glued together
    with the Chinese remainder theorem; a root mod 4n and that root
    plus 2n give the same b mod 2n.

    Args:
        D: the discriminant.
        n: a positive modulus.

    Returns:
        roots: the sorted list of residues (empty when D is not a
            square mod 4n).
    """
    if n <= 0:
        msg = f"n must be positive, got {n}"
        raise ValueError(msg)
    modulus = 4 * n
    partial = [0]
    partial_modulus = 1
    for prime, exponent in factorize(modulus).factors:
        roots = _prime_power_roots(D, prime, exponent)
        if not roots:
            return []
        prime_power = prime**exponent
        partial = [
            crt_pair(r1, partial_modulus, r2, prime_power)
            for r1 in partial
            for r2 in roots
        ]
        partial_modulus *= prime_power
    return sorted({root % (2 * n) for root in partial})


def simple_sieve(limit: int) -> np.ndarray:
    """returns a numpy array of the primes <= limit"""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def prime_segments(
    N: int, segment_odd_count: int = SEGMENT_ODD_COUNT
) -> Iterator[np.ndarray]:
    """Yields the primes <= N as a sequence of increasing numpy blocks.

    Only odd numbers are sieved; 2 comes out in the first block on its
    own. Memory is bounded by `segment_odd_count` no matter how large
    N gets.
    """
    if N < 2:
        return
    yield np.array([2], dtype=np.int64)
    base = simple_sieve(math.isqrt(N) + 1)
    low = 3
    span = 2 * segment_odd_count
    while low <= N:
        high = min(low + span, N + 1)
        odd_count = (high - low + 1) // 2
        mask = np.ones(odd_count, dtype=bool)
        for p in base[1:]:
            p = int(p)
            square = p * p
            if square >= high:
                break
            start = max(square, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start >= high:
                continue
            mask[(start - low) // 2 :: p] = False
        block = low + 2 * np.flatnonzero(mask).astype(np.int64)
        if block.size:
            yield block
        low = high


def primes_up_to(N: int) -> Iterator[int]:
    """Iterates over the primes <= N in increasing order.

    Args:
        N: the upper bound (inclusive).

    Returns:
        primes: an iterator of python ints.
    """
    for block in prime_segments(N):
        for p in block.tolist():
            yield p


def prime_pi(N: int) -> int:
    """counts the primes <= N (0 for N < 2)"""
    return sum(int(block.size) for block in prime_segments(N))


if __name__ == "__main__":
    print(factorize(-18))
    print(sqrt_discriminant_mod(-20, 21))

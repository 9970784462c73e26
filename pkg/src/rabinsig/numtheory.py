"""Modular arithmetic over a two-prime modulus.

Jacobi symbols, extended Euclid, CRT idempotents and square-root
extraction mod p and mod p*q.  Everything here is a pure function of its
arguments; key material is never mutated, so concurrent use is safe.
"""

import math
import random
from dataclasses import dataclass
from typing import NamedTuple

from .errors import FactorLeakError, NonResidueError

_SYSTEM_RNG = random.SystemRandom()

# 40 Miller-Rabin rounds bound the composite-acceptance error by 4**-40 = 2**-80.
MILLER_RABIN_ROUNDS = 40


def _sieve_primes(limit: int) -> tuple[int, ...]:
    sieve = bytearray([1]) * limit
    sieve[0] = sieve[1] = 0
    for i in range(2, int(limit**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


_SMALL_PRIMES = _sieve_primes(1000)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) and g > 0."""
    if a == 0 and b == 0:
        raise ValueError("gcd(0, 0) is undefined")
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_x, x = x, old_x - quot * x
        old_y, y = y, old_y - quot * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def mod_inv(a: int, n: int) -> int:
    """Inverse of a modulo n.  Raises FactorLeakError when gcd(a, n) > 1."""
    g, x, _ = ext_gcd(a % n, n)
    if g != 1:
        raise FactorLeakError("value is not invertible modulo the modulus")
    return x % n


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n; the Legendre symbol when n is prime."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("Jacobi symbol needs an odd positive lower argument")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_probable_prime(n: int, rng=None) -> bool:
    """Miller-Rabin primality test with error probability at most 2**-80."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    rng = rng or _SYSTEM_RNG
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(MILLER_RABIN_ROUNDS):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Idempotents:
    """Complementary CRT idempotents of a two-prime modulus.

    psi1 is 1 mod p and 0 mod q; psi2 is 0 mod p and 1 mod q.  They satisfy
    psi1 + psi2 = 1, psi1 * psi2 = 0 and psi_i**2 = psi_i, all mod p*q.
    """

    psi1: int
    psi2: int


def crt_idempotents(p: int, q: int) -> Idempotents:
    """Idempotents of Z_pq, from the extended Euclidean algorithm."""
    if p == q:
        raise ValueError("prime factors must be distinct")
    g, x, y = ext_gcd(p, q)
    if g != 1:
        raise ValueError("prime factors must be coprime")
    n = p * q
    return Idempotents(y * q % n, x * p % n)


def crt_combine(rp: int, rq: int, p: int, q: int, idem: Idempotents | None = None) -> int:
    """Lift the residue pair (rp mod p, rq mod q) to Z_pq."""
    if idem is None:
        idem = crt_idempotents(p, q)
    return (rp * idem.psi1 + rq * idem.psi2) % (p * q)


@dataclass(frozen=True)
class Modulus:
    """A two-prime modulus together with its private factorisation."""

    p: int
    q: int
    n: int

    @classmethod
    def create(cls, p: int, q: int, rng=None) -> "Modulus":
        if p == q:
            raise ValueError("prime factors must be distinct")
        if p < 3 or q < 3 or p % 2 == 0 or q % 2 == 0:
            raise ValueError("prime factors must be odd and at least 3")
        if not is_probable_prime(p, rng) or not is_probable_prime(q, rng):
            raise ValueError("factor failed the primality test")
        return cls(p, q, p * q)


def _tonelli_shanks(a: int, p: int) -> int:
    # General root extraction for p = 1 mod 4; caller guarantees (a/p) = 1.
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    z = 2
    while jacobi(z, p) != -1:
        z += 1
    c = pow(z, d, p)
    x = pow(a, (d + 1) // 2, p)
    t = pow(a, d, p)
    m = s
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        x = x * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return x


def sqrt_mod_prime(a: int, p: int) -> int:
    """Canonical square root of a modulo an odd prime (the smaller of the pair).

    Uses the exponentiation shortcut a**((p+1)/4) when p = 3 mod 4 and the
    Tonelli-Shanks procedure otherwise, so any odd prime is accepted.
    """
    a %= p
    if a == 0:
        return 0
    if jacobi(a, p) != 1:
        raise NonResidueError("value has no square root modulo the given prime")
    if p % 4 == 3:
        s = pow(a, (p + 1) // 4, p)
    else:
        s = _tonelli_shanks(a, p)
    return min(s, p - s)


class Root(NamedTuple):
    """A square root mod p*q with its Jacobi class ((value/p), (value/q))."""

    value: int
    jacobi_p: int
    jacobi_q: int


def sqrt_mod_pq(a: int, p: int, q: int, idem: Idempotents | None = None) -> tuple[Root, ...]:
    """All four square roots of a unit a modulo n = p*q, sorted by value.

    The result is closed under negation mod n and each root carries its
    Jacobi class.  Raises FactorLeakError when gcd(a, n) > 1 (treated as a
    degenerate, factorisation-revealing input) and NonResidueError when a
    is not a residue modulo both primes.
    """
    n = p * q
    a %= n
    if math.gcd(a, n) != 1:
        raise FactorLeakError("input shares a factor with the modulus")
    if jacobi(a, p) != 1 or jacobi(a, q) != 1:
        raise NonResidueError("value is not a quadratic residue modulo both primes")
    if idem is None:
        idem = crt_idempotents(p, q)
    sp = sqrt_mod_prime(a, p)
    sq = sqrt_mod_prime(a, q)
    roots = []
    for rp in (sp, p - sp):
        for rq in (sq, q - sq):
            v = (rp * idem.psi1 + rq * idem.psi2) % n
            roots.append(Root(v, jacobi(v, p), jacobi(v, q)))
    roots.sort()
    return tuple(roots)


def canonical_sqrt_mod_pq(a: int, p: int, q: int, idem: Idempotents | None = None) -> int:
    """The canonical root: the smallest of the four square roots mod p*q."""
    return sqrt_mod_pq(a, p, q, idem)[0].value


def sqrt_of_unity_nontrivial(p: int, q: int, idem: Idempotents | None = None) -> tuple[int, int]:
    """The two square roots of 1 mod p*q other than 1 and n-1.

    Both equal psi1 - psi2 up to sign.  Adding 1 to either gives a multiple
    of one prime factor, so neither may ever appear as a padding value.
    """
    if idem is None:
        idem = crt_idempotents(p, q)
    n = p * q
    v = (idem.psi1 - idem.psi2) % n
    return v, n - v

"""Exact integer arithmetic shared by every other module.

Kronecker symbols, deterministic primality, factorization of moderate
integers, splitting behaviour of rational primes in quadratic fields
Q(sqrt(d)), and the genus of the modular curve X0(N) for squarefree N.

All functions are pure and deterministic; nothing here touches floats.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import BoundExceededError, DomainError

# factor() refuses inputs above this bound: the Miller-Rabin base set below is
# proven deterministic only under 3.3 * 10^24 and rho runtimes degrade anyway.
FACTOR_BOUND = 2**64

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES: list[int] = []


def _small_primes(limit: int = 1000) -> list[int]:
    if not _SMALL_PRIMES:
        sieve = bytearray([1]) * (limit + 1)
        sieve[0] = sieve[1] = 0
        for i in range(2, isqrt(limit) + 1):
            if sieve[i]:
                sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
        _SMALL_PRIMES.extend(i for i in range(limit + 1) if sieve[i])
    return _SMALL_PRIMES


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a|n), fully multiplicative extension of Legendre.

    Agrees with the Legendre symbol for odd prime n. n = 0 is out of domain.
    """
    if n == 0:
        raise DomainError("kronecker_symbol: n must be nonzero")
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    # n now odd positive; standard binary-reciprocity loop
    a %= n
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


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin. Exact for all n below 3.3 * 10^24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
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


def _rho(n: int) -> int:
    """Brent's variant of Pollard rho; returns a nontrivial factor of odd
    composite n. Deterministic: the increment c walks 1, 2, 3, ..."""
    if n % 2 == 0:
        return 2
    for c in range(1, 64):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise DomainError(f"rho failed to split {n}")  # pragma: no cover


@dataclass(frozen=True)
class Factorization:
    """Prime factorization n = sign * prod p_i^e_i with p_1 < p_2 < ..."""

    n: int
    sign: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        value = self.sign
        for p, e in self.factors:
            value *= p**e
        if value != self.n:
            raise DomainError("Factorization does not multiply back to n")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)


def factor(n: int, bound: int = FACTOR_BOUND) -> Factorization:
    """Factor n exactly. |n| above `bound` raises BoundExceededError.

    n = 0 is out of domain; n = +-1 factors to the empty product.
    """
    if n == 0:
        raise DomainError("factor: n must be nonzero")
    if abs(n) > bound:
        raise BoundExceededError(f"factor: |{n}| exceeds bound {bound}, too large")
    sign = -1 if n < 0 else 1
    m = abs(n)
    fac: dict[int, int] = {}
    for p in _small_primes():
        if p * p > m:
            break
        while m % p == 0:
            fac[p] = fac.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            fac[m] = fac.get(m, 0) + 1
            continue
        d = _rho(m)
        stack.append(d)
        stack.append(m // d)
    return Factorization(n, sign, tuple(sorted(fac.items())))


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return factor(n).is_squarefree()


class SplitType(enum.Enum):
    SPLIT = "Split"
    INERT = "Inert"
    RAMIFIED = "Ramified"


def splitting(p: int, d: int) -> SplitType:
    """Behaviour of the rational prime p in Q(sqrt(d)), d squarefree, d not 0 or 1.

    Odd p: ramified iff p | d, otherwise the Kronecker symbol (d|p) decides.
    p = 2: split iff d = 1 mod 8, inert iff d = 5 mod 8, ramified otherwise
    (d even or d = 3 mod 4, i.e. 2 divides the field discriminant).
    """
    if d in (0, 1):
        raise DomainError(f"splitting: d={d} does not define a quadratic field")
    if not is_prime(p):
        raise DomainError(f"splitting: p={p} is not prime")
    if not is_squarefree(d):
        raise DomainError(f"splitting: d={d} is not squarefree")
    if p == 2:
        r = d % 8
        if r == 1:
            return SplitType.SPLIT
        if r == 5:
            return SplitType.INERT
        return SplitType.RAMIFIED
    if d % p == 0:
        return SplitType.RAMIFIED
    return SplitType.SPLIT if kronecker_symbol(d, p) == 1 else SplitType.INERT


def genus_x0(n: int) -> int:
    """Genus of the modular curve X0(n) for squarefree n >= 1.

    g = 1 + mu/12 - nu2/4 - nu3/3 - nuinf/2 with mu = prod (p+1),
    nu2 = prod (1 + (-4|p)), nu3 = prod (1 + (-3|p)), nuinf = 2^omega(n).
    The elliptic-point counts use Kronecker symbols so the p = 2 and p = 3
    factors come out right (that is what makes g an integer).
    """
    if n < 1:
        raise DomainError("genus_x0: n must be >= 1")
    fac = factor(n)
    if not fac.is_squarefree():
        raise DomainError(f"genus_x0: {n} is not squarefree")
    mu, nu2, nu3 = 1, 1, 1
    for p in fac.primes:
        mu *= p + 1
        nu2 *= 1 + kronecker_symbol(-4, p)
        nu3 *= 1 + kronecker_symbol(-3, p)
    nuinf = 2 ** len(fac.primes)
    g = 1 + Fraction(mu, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(nuinf, 2)
    if g.denominator != 1 or g < 0:
        raise DomainError(f"genus_x0: formula gave non-integral genus {g} for {n}")
    return int(g)


def primes_below(limit: int) -> list[int]:
    """All primes p < limit by sieve. Intended for limit up to a few 10^6."""
    if limit <= 2:
        return []
    sieve = bytearray([1]) * limit
    sieve[0] = sieve[1] = 0
    for i in range(2, isqrt(limit - 1) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(limit) if sieve[i]]

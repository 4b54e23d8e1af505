"""Exact integer primitives: prime tables, factorization, lambda, phi and friends.

All public results are plain Python ints.  The 64-bit working width of the
count engine is enforced explicitly by :func:`lcm_checked` and
:func:`mul_checked` rather than by the integer type.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from math import comb, gcd, isqrt, prod
from typing import Iterable, Union

import numpy as np

from . import _kernels
from .errors import ArithmeticOverflow, ConfigurationError, DomainError, RangeError

UINT64_MAX = (1 << 64) - 1
DEFAULT_TABLE_CEILING = 10**8


@dataclass(frozen=True, eq=False)
class PrimeTables:
    """Smallest-prime-factor table, prime list and primality flags up to ``limit``.

    Instances are immutable and may be shared between threads.
    """

    limit: int
    smallest_prime_factor: np.ndarray = field(repr=False)
    primes: np.ndarray = field(repr=False)
    primality: np.ndarray = field(repr=False)

    def __post_init__(self):
        for arr in (self.smallest_prime_factor, self.primes, self.primality):
            arr.setflags(write=False)

    @property
    def prime_count(self) -> int:
        return int(self.primes.shape[0])

    def pi(self, x: int) -> int:
        """Number of primes <= x, for x <= limit."""
        if x > self.limit:
            raise RangeError(f"pi({x}) needs tables beyond limit {self.limit}")
        return int(np.searchsorted(self.primes, x, side="right"))

    def is_prime(self, n: int) -> bool:
        if n <= self.limit:
            return n >= 2 and bool(self.primality[n])
        if n > self.limit * self.limit:
            raise RangeError(f"primality of {n} exceeds limit^2 = {self.limit ** 2}")
        r = isqrt(n)
        for p in self.primes:
            p = int(p)
            if p > r:
                return True
            if n % p == 0:
                return False
        return True


def build_tables(limit: int, ceiling: int = DEFAULT_TABLE_CEILING) -> PrimeTables:
    """Sieve smallest prime factors for 2..limit."""
    limit = int(limit)
    if limit < 2:
        raise ConfigurationError(f"table limit must be at least 2, got {limit}")
    if limit > ceiling:
        raise ConfigurationError(f"table limit {limit} is above the memory ceiling {ceiling}")
    spf, primes = _kernels.spf_sieve(limit)
    primality = spf == np.arange(limit + 1)
    primality[:2] = False
    return PrimeTables(limit, spf, primes, primality)


@dataclass(frozen=True)
class Factorization:
    """``n`` together with its prime-power decomposition, primes ascending."""

    n: int
    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        fs = tuple((int(p), int(e)) for p, e in self.factors)
        object.__setattr__(self, "factors", fs)
        if any(e < 1 for _, e in fs) or any(a[0] >= b[0] for a, b in zip(fs, fs[1:])):
            raise DomainError(f"malformed factorization {fs}")
        if prod(p**e for p, e in fs) != self.n:
            raise DomainError(f"factors {fs} do not multiply to {self.n}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "Factorization":
        merged: dict[int, int] = {}
        for p, e in pairs:
            merged[int(p)] = merged.get(int(p), 0) + int(e)
        fs = tuple(sorted((p, e) for p, e in merged.items() if e))
        return cls(prod(p**e for p, e in fs), fs)

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def valuation(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    @property
    def largest_prime(self) -> int:
        """P+(n), with P+(1) = 1."""
        return self.factors[-1][0] if self.factors else 1

    @property
    def smallest_prime(self) -> float:
        """P-(n), with the usual convention P-(1) = +inf."""
        return self.factors[0][0] if self.factors else math.inf

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)


def factor(n: int, tables: PrimeTables) -> Factorization:
    """Factor ``n`` using the tables.

    Supported when ``n <= limit**2`` or, more generally, when trial division
    by the tabulated primes leaves a cofactor that is 1 or at most
    ``limit**2`` (so that it must be prime).  ``2**60`` factors fine with
    small tables; a product of two primes above ``limit`` does not.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    limit = tables.limit
    out = []
    m = n
    if m > limit:
        for p in tables.primes:
            p = int(p)
            if p * p > m or m <= limit:
                break
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                out.append((p, e))
        if m > limit:
            if m > limit * limit:
                raise RangeError(f"{n} has a cofactor {m} beyond limit^2 = {limit * limit}")
            # no prime factor <= sqrt(m) remains, so m itself is prime
            out.append((m, 1))
            m = 1
    spf = tables.smallest_prime_factor
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        out.append((p, e))
    return Factorization(n, tuple(out))


def _as_factorization(n: Union[int, Factorization], tables: PrimeTables | None) -> Factorization:
    if isinstance(n, Factorization):
        return n
    if tables is None:
        raise DomainError("an integer argument needs prime tables")
    return factor(n, tables)


def mul_checked(a: int, b: int) -> int:
    r = a * b
    if r > UINT64_MAX:
        raise ArithmeticOverflow(f"{a} * {b} overflows 64 bits")
    return r


def lcm_checked(a: int, b: int) -> int:
    if a < 1 or b < 1:
        raise DomainError(f"lcm is defined here for positive integers, got {a}, {b}")
    r = a // gcd(a, b) * b
    if r > UINT64_MAX:
        raise ArithmeticOverflow(f"lcm({a}, {b}) overflows 64 bits")
    return r


def lambda_prime_power(p: int, a: int) -> int:
    """lambda(p^a): p^(a-1)(p-1), except 2^(a-2) for p = 2 and a >= 3."""
    if a < 1:
        raise DomainError(f"exponent must be >= 1, got {a}")
    if p < 2 or (p > 3 and not _small_is_prime(p)):
        raise DomainError(f"{p} is not prime")
    if p == 2 and a >= 3:
        return 1 << (a - 2)
    return p ** (a - 1) * (p - 1)


def _small_is_prime(p: int) -> bool:
    if p % 2 == 0:
        return p == 2
    r = isqrt(p)
    f = 3
    while f <= r:
        if p % f == 0:
            return False
        f += 2
    return True


def carmichael_lambda(n: Union[int, Factorization], tables: PrimeTables | None = None,
                      *, checked: bool = True) -> int:
    """Carmichael's function as the lcm of lambda over exact prime-power divisors.

    ``n`` may be given as a :class:`Factorization`, which is how moduli
    wider than 64 bits (witnesses) are handled; pass ``checked=False`` there.
    """
    f = _as_factorization(n, tables)
    r = 1
    for p, e in f.factors:
        lp = (1 << (e - 2)) if (p == 2 and e >= 3) else p ** (e - 1) * (p - 1)
        r = lcm_checked(r, lp) if checked else r // gcd(r, lp) * lp
    return r


def euler_phi(n: Union[int, Factorization], tables: PrimeTables | None = None) -> int:
    f = _as_factorization(n, tables)
    return prod(p ** (e - 1) * (p - 1) for p, e in f.factors)


def divisors(f: Factorization) -> list[int]:
    divs = [1]
    for p, e in f.factors:
        pk = [p**i for i in range(1, e + 1)]
        divs = divs + [d * q for d in divs for q in pk]
    return sorted(divs)


def omega(f: Factorization) -> int:
    return len(f.factors)


def mobius(f: Factorization) -> int:
    if not f.is_squarefree():
        return 0
    return -1 if len(f.factors) % 2 else 1


def tau_k(f: Factorization, k: int) -> int:
    """Number of ordered factorizations n = d_1 ... d_k."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return prod(comb(e + k - 1, k - 1) for _, e in f.factors)


def is_carmichael_number(n: int, tables: PrimeTables) -> bool:
    if n < 2:
        raise DomainError(f"Carmichael numbers are >= 2, got {n}")
    f = factor(n, tables)
    if len(f.factors) == 1 and f.factors[0][1] == 1:
        return False
    return (n - 1) % carmichael_lambda(f) == 0


def lambda_values(limit: int, tables: PrimeTables) -> np.ndarray:
    """lambda(n) for 0 <= n <= limit in one pass (entry 0 is 0)."""
    if limit > tables.limit:
        raise RangeError(f"bulk lambda to {limit} needs tables to {limit}")
    return _kernels.lambda_table(tables.smallest_prime_factor[: limit + 1])


def phi_values(limit: int, tables: PrimeTables) -> np.ndarray:
    if limit > tables.limit:
        raise RangeError(f"bulk phi to {limit} needs tables to {limit}")
    return _kernels.phi_table(tables.smallest_prime_factor[: limit + 1])


def omega_values(limit: int, tables: PrimeTables) -> np.ndarray:
    if limit > tables.limit:
        raise RangeError(f"bulk omega to {limit} needs tables to {limit}")
    return _kernels.omega_table(tables.smallest_prime_factor[: limit + 1])

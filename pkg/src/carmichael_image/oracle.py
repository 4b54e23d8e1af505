"""Membership in the image of Carmichael's function, with certificates.

Criterion
---------
For ``n >= 1`` define the *maximal lambda-divisor*

    L(n) = lcm( 2^v2(n),  p^vp(n) * (p - 1)  for every odd prime p with (p - 1) | n ).

Then ``n = lambda(m)`` for some ``m`` if and only if ``L(n) = n``.

*Every term of L(n) divides n.*  ``2^v2(n)`` does trivially.  For odd ``p``
with ``(p - 1) | n``, ``p^vp(n)`` and ``p - 1`` are coprime divisors of ``n``,
so their product divides ``n``.  Hence ``L(n) | n`` always.

*Necessity.*  Let ``lambda(m) = n``.  Since lambda(m) is the lcm of
lambda(p^a) over the prime powers ``p^a`` exactly dividing ``m``, each such
lambda(p^a) divides ``n``.  For ``p = 2`` this value is a power of two, so
it divides ``2^v2(n)``.  For odd ``p`` it is ``p^(a-1) (p - 1)``; dividing
``n`` forces ``(p - 1) | n`` and ``a - 1 <= vp(n)``, so it divides the term
``p^vp(n) (p - 1)`` of L(n).  Therefore ``n = lambda(m)`` divides ``L(n)``,
and with ``L(n) | n`` we get ``L(n) = n``.

*Sufficiency.*  Put

    m* = 2^(v2(n) + 2) * prod p^(vp(n) + 1)     (n even)
    m* = 2         * prod p^(vp(n) + 1)         (n odd)

over the odd primes ``p`` with ``(p - 1) | n``.  Then lambda(2^(v2+2)) =
2^v2 when ``v2 >= 1`` (exponent at least 3), lambda(2) = 1, and
lambda(p^(vp+1)) = p^vp (p - 1), so lambda(m*) is exactly L(n).  If
``L(n) = n`` then ``m*`` is a witness.

The candidate primes satisfy ``p <= n + 1``, so they are found by walking the
divisors ``d`` of ``n`` and testing ``d + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .arith import (
    Factorization,
    PrimeTables,
    divisors,
    factor,
    lambda_prime_power,
    lambda_values,
)
from .errors import DomainError, RangeError


@dataclass(frozen=True)
class MaxPreimageProfile:
    """Per-prime maximal lambda(p^a) values dividing ``n`` and their lcm ``L``.

    ``odd_entries`` holds ``(p, a_max, contribution)`` with
    ``contribution = lambda(p^a_max) = p^(a_max - 1) (p - 1)``.
    """

    n: int
    two_part: int
    two_exponent: int
    odd_entries: tuple[tuple[int, int, int], ...]
    L: int

    @property
    def is_value(self) -> bool:
        return self.L == self.n


def max_lambda_divisor(n: int, tables: PrimeTables) -> MaxPreimageProfile:
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if n + 1 > tables.limit * tables.limit:
        raise RangeError(f"tables to {tables.limit} cannot test primality up to {n + 1}")
    f = factor(n, tables)
    v2 = f.valuation(2)
    two_part = 1 << v2
    two_exponent = v2 + 2 if v2 else 1
    entries = []
    L = two_part
    for d in divisors(f):
        p = d + 1
        if p == 2 or d % 2 or not tables.is_prime(p):
            continue
        vp = f.valuation(p)
        c = p**vp * d
        entries.append((p, vp + 1, c))
        L = L // gcd(L, c) * c
    return MaxPreimageProfile(n, two_part, two_exponent, tuple(entries), L)


def is_lambda_value(n: int, tables: PrimeTables) -> bool:
    return max_lambda_divisor(n, tables).is_value


def max_witness(n: int, tables: PrimeTables) -> Factorization:
    """The modulus m* whose lambda equals L(n); a witness whenever n is a lambda-value.

    Returned as a factorization because m* outgrows 64 bits quickly.
    """
    prof = max_lambda_divisor(n, tables)
    pairs = [(2, prof.two_exponent)] + [(p, a) for p, a, _ in prof.odd_entries]
    return Factorization.from_pairs(pairs)


def brute_force_image(x_max: int, m_max: int, tables: PrimeTables) -> set[int]:
    """{lambda(m) : 1 <= m <= m_max} restricted to [1, x_max].

    This is a subset of the image in [1, x_max]; it is the whole of it only
    when ``m_max`` is at least the largest needed witness.  For the exact
    set at moderate ``x_max`` use :func:`lcm_closure_image`.
    """
    if m_max < x_max:
        raise DomainError("m_max must be at least x_max")
    lam = lambda_values(m_max, tables)[1:]
    vals = np.unique(lam[lam <= x_max])
    return {int(v) for v in vals}


def lcm_closure_image(x_max: int, tables: PrimeTables) -> set[int]:
    """Exact image of lambda in [1, x_max], built without the L(n) criterion.

    Every lambda-value is an lcm of prime-power values lambda(p^a), one per
    prime, and every such lcm is attained.  Because lcm never decreases, only
    generators <= x_max can take part, and two generators from the same
    prime are comparable under divisibility, so closing {1} under lcm with
    the generators (discarding anything above ``x_max``) gives the image.
    """
    if x_max + 1 > tables.limit:
        raise RangeError(f"closure to {x_max} needs primes up to {x_max + 1}")
    gens = set()
    for p in tables.primes:
        p = int(p)
        if p - 1 > x_max:
            break
        a = 1
        while True:
            v = lambda_prime_power(p, a)
            if v > x_max:
                if p != 2 or a >= 3:
                    break
            else:
                gens.add(v)
            a += 1
    reach = {1}
    for g in sorted(gens):
        new = set()
        for s in reach:
            v = s // gcd(s, g) * g
            if v <= x_max:
                new.add(v)
        reach |= new
    return reach

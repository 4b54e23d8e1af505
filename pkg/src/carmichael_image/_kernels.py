"""Compiled inner loops.

Everything here works on plain numpy arrays and releases the GIL so the
count engine can fan segments out over a thread pool.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def gcd64(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True, nogil=True)
def spf_sieve(limit):
    """Linear sieve: smallest prime factor for 0..limit and the prime list."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        spf[1] = 1
    primes = np.empty(max(16, int(1.3 * limit / max(1.0, np.log(max(limit, 2)))) + 16), dtype=np.int64)
    count = 0
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            primes[count] = i
            count += 1
        si = spf[i]
        for j in range(count):
            p = primes[j]
            if p > si or p * i > limit:
                break
            spf[p * i] = p
    return spf, primes[:count].copy()


@njit(cache=True, nogil=True)
def prime_sieve(limit):
    """Primes up to ``limit`` (inclusive) from an odd-only Eratosthenes sieve."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    half = (limit - 1) // 2  # index i stands for 2*i + 1
    flags = np.ones(half + 1, dtype=np.bool_)
    flags[0] = False
    i = 1
    while (2 * i + 1) * (2 * i + 1) <= limit:
        if flags[i]:
            p = 2 * i + 1
            for j in range((p * p - 1) // 2, half + 1, p):
                flags[j] = False
        i += 1
    out = np.empty(int(np.count_nonzero(flags)) + 1, dtype=np.int64)
    out[0] = 2
    k = 1
    for i in range(1, half + 1):
        if flags[i]:
            out[k] = 2 * i + 1
            k += 1
    return out


@njit(cache=True, nogil=True)
def lambda_table(spf):
    """lambda(n) for every index of ``spf`` via lambda(p^a m) = lcm(lambda(p^a), lambda(m))."""
    limit = spf.shape[0] - 1
    lam = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        lam[1] = 1
    for n in range(2, limit + 1):
        p = spf[n]
        m = n
        a = 0
        pa = 1
        while m % p == 0:
            m //= p
            a += 1
            pa *= p
        if p == 2:
            lp = pa // 4 if a >= 3 else pa // 2
        else:
            lp = (pa // p) * (p - 1)
        lm = lam[m]
        lam[n] = lp // gcd64(lp, lm) * lm
    return lam


@njit(cache=True, nogil=True)
def phi_table(spf):
    limit = spf.shape[0] - 1
    phi = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        phi[1] = 1
    for n in range(2, limit + 1):
        p = spf[n]
        m = n // p
        if m % p == 0:
            phi[n] = phi[m] * p
        else:
            phi[n] = phi[m] * (p - 1)
    return phi


@njit(cache=True, nogil=True)
def omega_table(spf):
    limit = spf.shape[0] - 1
    om = np.zeros(limit + 1, dtype=np.int64)
    for n in range(2, limit + 1):
        p = spf[n]
        m = n // p
        om[n] = om[m] if m % p == 0 else om[m] + 1
    return om


@njit(cache=True, nogil=True)
def _absorb(acc, i, n, p, d):
    # acc[i] <- lcm(acc[i], d * p^v_p(n)); n is a multiple of d = p - 1
    a = acc[i]
    if a == n:
        return
    c = d
    m = n // d
    while m % p == 0:
        m //= p
        c *= p
    if a % c == 0:
        return
    acc[i] = a // gcd64(a, c) * c


@njit(cache=True, nogil=True)
def segment_accumulate(lo, hi, primes, cut):
    """Return the maximal lambda-divisor L(n) for every n in [lo, hi).

    Odd primes with p - 1 < cut are walked along their multiples.  For the
    rest, every hit n = t * (p - 1) has t <= (hi - 1) // cut, so they are
    reached by looping over the cofactor t and slicing the sorted prime
    array, which costs nothing for primes that miss the segment.
    """
    size = hi - lo
    acc = np.empty(size, dtype=np.int64)
    for i in range(size):
        n = lo + i
        acc[i] = n & -n
    nprimes = primes.shape[0]
    j = 1  # skip p = 2, its contribution is the initial power of two
    while j < nprimes:
        p = primes[j]
        d = p - 1
        if d >= cut or d >= hi:
            break
        n = ((lo + d - 1) // d) * d
        while n < hi:
            _absorb(acc, n - lo, n, p, d)
            n += d
        j += 1
    tmax = (hi - 1) // cut
    for t in range(1, tmax + 1):
        d_lo = (lo + t - 1) // t
        if d_lo < cut:
            d_lo = cut
        d_hi = (hi - 1) // t
        if d_lo > d_hi:
            continue
        k = np.searchsorted(primes, d_lo + 1)
        while k < nprimes:
            p = primes[k]
            if p > d_hi + 1:
                break
            if p > 2:
                d = p - 1
                n = t * d
                _absorb(acc, n - lo, n, p, d)
            k += 1
    for i in range(size):
        if acc[i] <= 0 or (lo + i) % acc[i] != 0:
            raise ArithmeticError("accumulator left the divisor lattice of n")
    return acc


@njit(cache=True, nogil=True)
def segment_count(lo, hi, primes, cut):
    acc = segment_accumulate(lo, hi, primes, cut)
    c = 0
    for i in range(hi - lo):
        if acc[i] == lo + i:
            c += 1
    return c


@njit(cache=True, nogil=True)
def phi_sieve(limit):
    """phi(n) for 0..limit from the product formula, without a factor table."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:
            for m in range(p, limit + 1, p):
                phi[m] -= phi[m] // p
    return phi


@njit(cache=True, nogil=True)
def distinct_products(n):
    """Number of distinct i*j with 1 <= i <= j <= n."""
    seen = np.zeros(n * n + 1, dtype=np.bool_)
    count = 0
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            v = i * j
            if not seen[v]:
                seen[v] = True
                count += 1
    return count

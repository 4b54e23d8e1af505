"""Multi-prime representations of lambda-values and the dual-factorization combinatorics.

A squarefree even ``n`` is written as

    n = a_0 ... a_{k-1} * b_1 ... b_{2^k - 1},    B_i = prod{ b_j : bit i of j is set },

and the representation is good when every ``q_i = a_i B_i + 1`` is prime;
then ``n = lambda(q_0 ... q_{k-1})``.  Index ``j`` of ``b_j`` is read as a
bit mask over ``0..k-1`` (``floor(j / 2^i)`` is odd exactly when bit ``i`` of
``j`` is set), so ``B_i`` collects the ``b_j`` whose mask contains ``i``.

The search assigns each prime of ``n`` to one of the ``k + 2^k - 1`` slots.
It runs in two stages.  Stage one gives each prime a mask, which fixes the
products ``d_i = a_i B_i`` and so the primality tests.  Stage two splits the
primes carrying a one-bit mask ``{i}`` between ``a_i`` and ``b_{2^i}``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product
from math import prod
from typing import Sequence

import numpy as np

from .arith import Factorization, PrimeTables, carmichael_lambda, factor
from .errors import ComplexityError, DomainError

MAX_K_SEARCH = 6
MAX_OMEGA = 24
MAX_SEARCH_STATES = 20_000_000


@dataclass(frozen=True)
class RepresentationParams:
    x: float
    k: int
    y: float
    l: int
    degenerate: bool
    enforce_smooth_rough_split: bool = True
    enforce_omega_l: bool = True
    enforce_even_last: bool = True
    enforce_range: bool = True
    log_x: float | None = None

    def relaxed(self) -> "RepresentationParams":
        """Keep only the structural conditions: a_i > 1, q_i prime, 2 | b_{2^k-1}."""
        return replace(self, enforce_smooth_rough_split=False, enforce_omega_l=False,
                       enforce_range=False)


def params_for(x: float | None, k: int, *, log_x: float | None = None,
               y: float | None = None, l: int | None = None,
               relaxed: bool = False) -> RepresentationParams:
    """Smoothness threshold y and per-part prime count l for scale x.

    y = exp(log x / (200 k log log x)) and
    l = floor(k log log y / ((2^k - 1) log(2^k - 1))).
    Pass ``log_x`` instead of ``x`` for scales beyond float range.  Explicit
    ``y`` or ``l`` override the computed values.
    """
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if log_x is None:
        if x is None or x < 16:
            raise DomainError("x must be >= 16")
        log_x = math.log(x)
    elif x is None:
        x = math.exp(log_x) if log_x < 709 else math.inf
    log_y = log_x / (200 * k * math.log(log_x))
    if y is None:
        y = math.exp(log_y)
    else:
        log_y = math.log(y)
    if l is None:
        s = 2**k - 1
        l = max(0, math.floor(k / (s * math.log(s)) * math.log(log_y))) if log_y > 0 else 0
    p = RepresentationParams(x=x, k=k, y=y, l=l, degenerate=(y < 3 or l < 1), log_x=log_x)
    return p.relaxed() if relaxed else p


def index_sets(k: int) -> list[frozenset[int]]:
    """S_i = {1 <= j <= 2^k - 1 : floor(j / 2^i) odd} for i = 0..k-1."""
    if not 1 <= k <= 16:
        raise DomainError(f"k must be in [1, 16], got {k}")
    top = 2**k - 1
    return [frozenset(j for j in range(1, top + 1) if (j >> i) & 1) for i in range(k)]


@dataclass(frozen=True)
class Representation:
    n: int
    k: int
    a: tuple[int, ...]
    b: tuple[int, ...]  # b[0] is b_1
    B: tuple[int, ...]
    q: tuple[int, ...]


def _build(n: int, k: int, a: Sequence[int], b: Sequence[int]) -> Representation:
    B = tuple(prod(b[j - 1] for j in range(1, 2**k) if (j >> i) & 1) for i in range(k))
    q = tuple(a[i] * B[i] + 1 for i in range(k))
    return Representation(n, k, tuple(a), tuple(b), B, q)


def make_representation(n: int, k: int, a: Sequence[int], b: Sequence[int]) -> Representation:
    """Assemble a representation from its parts, deriving B and q."""
    if len(a) != k or len(b) != 2**k - 1:
        raise DomainError("need k values a_i and 2^k - 1 values b_j")
    return _build(n, k, a, b)


def _search(primes: Sequence[int], params: RepresentationParams, tables: PrimeTables,
            max_results: int) -> tuple[int, list[Representation]]:
    k = params.k
    top = 2**k - 1
    n = prod(primes)
    odd = [p for p in primes if p != 2]
    masks_for_2 = [top] if params.enforce_even_last else list(range(1, top + 1))
    masks_for = {}
    for p in primes:
        if p == 2:
            masks_for[p] = masks_for_2
        elif params.enforce_smooth_rough_split and p > params.y:
            masks_for[p] = [1 << i for i in range(k)]  # rough primes live in some a_i
        else:
            masks_for[p] = list(range(1, top + 1))
    order = ([2] if 2 in primes else []) + odd
    states = prod(len(masks_for[p]) for p in order)
    if states > MAX_SEARCH_STATES:
        raise ComplexityError(f"{states} mask assignments exceed the search budget")

    count = 0
    reps: list[Representation] = []
    d = [1] * k
    chosen = [0] * len(order)

    def split_count_and_list(assign: list[int]) -> None:
        nonlocal count
        single = [[] for _ in range(k)]
        fixed_b = {}
        for p, msk in zip(order, assign):
            if msk & (msk - 1) == 0:
                single[msk.bit_length() - 1].append(p)
            else:
                fixed_b.setdefault(msk, []).append(p)
        if any(not s for s in single):
            return  # some a_i would be 1
        strict = params.enforce_smooth_rough_split or params.enforce_omega_l
        if not strict and len(reps) >= max_results:
            count += prod(2 ** len(s) - 1 for s in single)
            return
        # per i: nonempty subset of single[i] goes to a_i, the rest to b_{2^i}
        options = []
        for i in range(k):
            opts = []
            for bits in range(1, 2 ** len(single[i])):
                a_part = [p for t, p in enumerate(single[i]) if (bits >> t) & 1]
                b_part = [p for t, p in enumerate(single[i]) if not (bits >> t) & 1]
                if params.enforce_smooth_rough_split and (
                        any(p <= params.y for p in a_part) or any(p > params.y for p in b_part)):
                    continue
                opts.append((a_part, b_part))
            if not opts:
                return
            options.append(opts)
        for combo in product(*options):
            b_lists = {j: list(fixed_b.get(j, ())) for j in range(1, top + 1)}
            for i, (_, b_part) in enumerate(combo):
                b_lists[1 << i].extend(b_part)
            if params.enforce_omega_l and any(len(v) != params.l for v in b_lists.values()):
                continue
            count += 1
            if len(reps) < max_results:
                a = [prod(a_part) for a_part, _ in combo]
                b = [prod(b_lists[j]) for j in range(1, top + 1)]
                reps.append(_build(n, k, a, b))

    def rec(idx: int) -> None:
        if idx == len(order):
            if all(tables.is_prime(di + 1) for di in d):
                split_count_and_list(chosen)
            return
        p = order[idx]
        for msk in masks_for[p]:
            chosen[idx] = msk
            for i in range(k):
                if (msk >> i) & 1:
                    d[i] *= p
            rec(idx + 1)
            for i in range(k):
                if (msk >> i) & 1:
                    d[i] //= p

    rec(0)
    return count, reps


def find_representations(n: int, params: RepresentationParams, max_results: int,
                         tables: PrimeTables) -> tuple[int, list[Representation]]:
    """r(n) and up to ``max_results`` representations of squarefree ``n``.

    The count is always exact; only the listing is capped.
    """
    if params.k > MAX_K_SEARCH:
        raise ComplexityError(f"k={params.k} exceeds the search limit {MAX_K_SEARCH}")
    f = factor(n, tables)
    if not f.is_squarefree():
        raise DomainError(f"{n} is not squarefree")
    if len(f.factors) > MAX_OMEGA:
        raise ComplexityError(f"omega({n}) = {len(f.factors)} exceeds {MAX_OMEGA}")
    if params.enforce_range and not (params.x / 4**params.k < n <= params.x):
        return 0, []
    if n % 2 and params.enforce_even_last:
        return 0, []
    return _search(f.primes, params, tables, max_results)


def verify_representation(rep: Representation, tables: PrimeTables) -> bool:
    """True iff every q_i is prime, the q_i are distinct and lambda(prod q_i) = n."""
    if any(not tables.is_prime(q) for q in rep.q):
        return False
    if len(set(rep.q)) != len(rep.q):
        return False
    modulus = Factorization.from_pairs((q, 1) for q in rep.q)
    return carmichael_lambda(modulus, checked=False) == rep.n


def squarefree_mask(x: int) -> np.ndarray:
    """mask[n] True iff n is squarefree, for 0 <= n <= x (mask[0] False)."""
    mask = np.ones(x + 1, dtype=bool)
    mask[0] = False
    q = 2
    while q * q <= x:
        mask[q * q::q * q] = False
        q += 1
    return mask


@dataclass(frozen=True)
class S1S2Report:
    S1: int
    S2: int
    positive_count: int
    cauchy_bound: Fraction

    @property
    def cauchy_holds(self) -> bool:
        return self.positive_count * self.S2 >= self.S1 * self.S1


def empirical_s1_s2(x: int, k: int, params: RepresentationParams | None,
                    tables: PrimeTables) -> S1S2Report:
    """First and second moments of r(n) over squarefree n in (x / 4^k, x]."""
    if x > 10**5:
        raise ComplexityError("empirical S1/S2 scans are limited to x <= 1e5")
    if params is None:
        params = params_for(max(x, 16), k, relaxed=True)
    params = replace(params, enforce_range=False)
    lo = x // 4**k  # n > x / 4^k  <=>  n > floor(x / 4^k)
    sf = squarefree_mask(x)
    S1 = S2 = pos = 0
    for n in range(lo + 1, x + 1):
        if not sf[n] or n % 2:
            continue  # odd n: every q_i would be even
        r, _ = find_representations(n, params, 0, tables)
        S1 += r
        S2 += r * r
        pos += r > 0
    bound = Fraction(S1 * S1, S2) if S2 else Fraction(0)
    return S1S2Report(S1, S2, pos, bound)


def b_v_partition(k: int, m: int, b_list: Sequence[int]) -> dict[tuple[int, ...], int]:
    """B_v = product of the b_j whose m lowest binary digits equal v (v[0] lowest)."""
    if not 0 <= m <= k:
        raise DomainError(f"need 0 <= m <= k, got m={m}, k={k}")
    if len(b_list) != 2**k - 1:
        raise DomainError(f"expected {2**k - 1} values b_j, got {len(b_list)}")
    out = {v: 1 for v in product((0, 1), repeat=m)}
    for j in range(1, 2**k):
        v = tuple((j >> t) & 1 for t in range(m))
        out[v] *= b_list[j - 1]
    return out


def _check_dual_range(k: int, m: int, omega_b: int, k_max: int = 5) -> None:
    if not (0 <= m <= k <= k_max) or k < 1 or omega_b < 0:
        raise DomainError(f"(k, m, omega) = ({k}, {m}, {omega_b}) out of range")


def dual_count_formula(k: int, m: int, omega_b: int) -> int:
    _check_dual_range(k, m, omega_b)
    return ((2**m - 1) * 2 ** (2 * (k - m)) + (2 ** (k - m) - 1) ** 2) ** omega_b


def dual_count_bruteforce(k: int, m: int, omega_b: int) -> int:
    """Count, per prime, index pairs (j, j') with equal low-m bits; multiply over primes."""
    _check_dual_range(k, m, omega_b)
    if omega_b > 8:
        raise ComplexityError("brute-force dual count is limited to omega <= 8")
    low = (1 << m) - 1
    per_prime = sum(1 for j in range(1, 2**k) for jj in range(1, 2**k) if j & low == jj & low)
    total = 1
    for _ in range(omega_b):
        total *= per_prime
    return total


def _all_factorizations(primes: Sequence[int], k: int) -> tuple[np.ndarray, np.ndarray]:
    """Every assignment of primes to indices 1..2^k-1, with the prime list as an array."""
    w = len(primes)
    top = 2**k - 1
    if w == 0:
        return np.zeros((1, 0), dtype=np.int64), np.zeros(0, dtype=np.int64)
    grids = np.indices((top,) * w).reshape(w, -1).T + 1
    return grids.astype(np.int64), np.asarray(primes, dtype=np.int64)


def _masked_products(assign: np.ndarray, ps: np.ndarray, select: np.ndarray) -> np.ndarray:
    # product over primes p of (p if select[assign] else 1), row by row
    return np.prod(np.where(select[assign], ps[None, :], 1), axis=1)


def b_v_identity_violations(k: int, m: int, primes: Sequence[int]) -> int:
    """Number of pairs of groups breaking B_i = B'_i (i < m)  =>  B_v = B'_v.

    All factorizations of b = prod(primes) are grouped by (B_0, ..., B_{m-1});
    the implication holds exactly when B_v is constant on every group.
    """
    assign, ps = _all_factorizations(primes, k)
    idx = np.arange(2**k)
    keys = np.stack([_masked_products(assign, ps, ((idx >> i) & 1).astype(bool))
                     for i in range(m)], axis=1) if m else np.zeros((len(assign), 0), dtype=np.int64)
    low = (1 << m) - 1
    vals = np.stack([_masked_products(assign, ps, (idx & low) == v) for v in range(2**m)], axis=1)
    _, group = np.unique(keys, axis=0, return_inverse=True)
    group = group.reshape(-1)
    ngroups = int(group.max()) + 1
    bad = 0
    for col in range(vals.shape[1]):
        lo = np.full(ngroups, np.iinfo(np.int64).max)
        hi = np.zeros(ngroups, dtype=np.int64)
        np.minimum.at(lo, group, vals[:, col])
        np.maximum.at(hi, group, vals[:, col])
        bad += int(np.count_nonzero(lo != hi))
    return bad


def b_v_identity_check(k: int, m: int, trials: int, *, max_omega: int = 6,
                       seed: int = 0, prime_pool: Sequence[int] | None = None) -> bool:
    """Exhaustive check of the B_v identity over random squarefree b with omega(b) <= max_omega."""
    if not (2 <= k <= 4 and 0 <= m <= k):
        raise DomainError(f"(k, m) = ({k}, {m}) out of range")
    if m == 0:
        return True
    rng = random.Random(seed)
    pool = list(prime_pool or [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47])
    for t in range(trials):
        w = t % (max_omega + 1) if trials > max_omega else rng.randint(0, max_omega)
        primes = sorted(rng.sample(pool, w))
        if b_v_identity_violations(k, m, primes):
            return False
    return True

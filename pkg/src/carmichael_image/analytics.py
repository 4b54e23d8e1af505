"""Exponent constants, symmetric prime sums and comparison statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import _kernels
from .arith import PrimeTables, omega_values
from .engine import membership_bitmap
from .errors import DomainError, RangeError
from .series import CountSeries, eta_hat

LOG2 = math.log(2.0)
ETA = 1.0 - (1.0 + math.log(LOG2)) / LOG2
ALPHA = 1.0 - math.e * LOG2 / 2.0
LP_LOWER_EXPONENT = 0.359052  # the earlier lower-bound exponent, as published
EULER_GAMMA = 0.57721566490153286061


def beta(k: int) -> float:
    """Exponent reached by the k-prime construction; tends to ETA as k grows."""
    if k < 2:
        raise DomainError(f"beta_k needs k >= 2, got {k}")
    s = math.log(2**k - 1)
    return 1.0 - k / s * (1.0 + math.log(s) - math.log(k))


@dataclass(frozen=True)
class ExponentReport:
    eta: float = ETA
    alpha: float = ALPHA
    lp_lower_exponent: float = LP_LOWER_EXPONENT
    beta: dict[int, float] = field(default_factory=dict)
    eta_hat_series: list[tuple[int, float | None]] = field(default_factory=list)


def constants(k_max: int = 10) -> ExponentReport:
    return ExponentReport(beta={k: beta(k) for k in range(2, k_max + 1)})


def beta_convergence(k_max: int) -> list[tuple[int, float, float]]:
    """Rows (k, beta_k, beta_k - eta) for 2 <= k <= k_max."""
    if not 2 <= k_max <= 60:
        raise DomainError(f"k_max must be in [2, 60], got {k_max}")
    return [(k, beta(k), beta(k) - ETA) for k in range(2, k_max + 1)]


def f_value(k: int, t: float) -> float:
    s = 2.0**k - 1.0
    inner = 2.0 ** (2 * k - t) - 2.0 ** (k + 1 - t) + 1.0
    return k * math.log(inner) - (2 * k - t) * math.log(s)


def f_second_derivative(k: int, t: float) -> float:
    inner = 2.0 ** (2 * k - t) - 2.0 ** (k + 1 - t) + 1.0
    return k * LOG2**2 * (2.0 ** (2 * k) - 2.0 ** (k + 1)) * 2.0**-t / inner**2


@dataclass(frozen=True)
class FProfile:
    k: int
    f_at_0: float
    f_at_k: float
    interior_min: float
    interior_max: float
    fpp_min: float
    fpp_min_differences: float

    @property
    def holds(self) -> bool:
        return (abs(self.f_at_0) <= 1e-9 and abs(self.f_at_k) <= 1e-9
                and self.interior_max < 0 and self.fpp_min > 0 and self.fpp_min_differences > 0)


def f_profile(k: int, grid_points: int = 101) -> FProfile:
    """Evaluate the S_2 exponent gap f on an even grid of [0, k].

    f'' is taken both from its closed form and from second differences.
    """
    if k < 2 or grid_points < 3:
        raise DomainError("need k >= 2 and at least 3 grid points")
    ts = np.linspace(0.0, float(k), grid_points)
    fs = np.array([f_value(k, t) for t in ts])
    fpp = np.array([f_second_derivative(k, t) for t in ts])
    h = ts[1] - ts[0]
    second = (fs[2:] - 2 * fs[1:-1] + fs[:-2]) / h**2
    return FProfile(k, float(fs[0]), float(fs[-1]), float(fs[1:-1].min()),
                    float(fs[1:-1].max()), float(fpp.min()), float(second.min()))


def prime_list(x: int, tables: PrimeTables | None = None) -> np.ndarray:
    if tables is not None and tables.limit >= x:
        return np.asarray(tables.primes[: tables.pi(x)])
    return _kernels.prime_sieve(int(x))


def power_sums(primes: np.ndarray, h: int) -> list[float]:
    """P_j = sum 1/p^j for j = 1..h, compensated summation."""
    inv = 1.0 / primes.astype(np.float64)
    out = []
    term = np.ones_like(inv)
    for _ in range(h):
        term = term * inv
        out.append(math.fsum(term.tolist()))
    return out


def elementary_from_power_sums(P: Sequence[float], h: int) -> list[float]:
    """e_0..e_h from Newton's identities  j e_j = sum_{i=1}^{j} (-1)^(i-1) e_{j-i} P_i."""
    e = [1.0]
    for j in range(1, h + 1):
        e.append(math.fsum((-1) ** (i - 1) * e[j - i] * P[i - 1] for i in range(1, j + 1)) / j)
    return e


def elementary_direct(values: Sequence[float], h: int) -> float:
    """e_h by summing over all h-subsets; only for small inputs."""
    return math.fsum(math.prod(c) for c in combinations(values, h))


@dataclass(frozen=True)
class Lemma1Result:
    x: int
    h: int
    exact_sum: float
    reference: float
    ratio: float


def lemma1_ratio(x: int, h: int, tables: PrimeTables | None = None) -> Lemma1Result:
    """Sum of mu^2(b)/b over b with P+(b) <= x and omega(b) = h, against (log log x)^h / h!.

    The sum is the elementary symmetric function e_h of {1/p : p <= x}.
    """
    if x > 10**8 or x < 16:
        raise DomainError(f"x must be in [16, 1e8], got {x}")
    llx = math.log(math.log(x))
    if not 1 <= h <= 2 * llx:
        raise DomainError(f"h={h} outside [1, 2 log log x] = [1, {2 * llx:.3f}]")
    e = elementary_from_power_sums(power_sums(prime_list(x, tables), h), h)
    ref = llx**h / math.factorial(h)
    return Lemma1Result(x, h, e[h], ref, e[h] / ref)


def exponent_fit(series: CountSeries) -> list[tuple[int, int, float | None]]:
    """(x, V(x), log(x / V(x)) / log log x) for each checkpoint; report only."""
    return [(cp.x, cp.v_lambda, eta_hat(cp.x, cp.v_lambda)) for cp in series.checkpoints]


@dataclass(frozen=True)
class OmegaReport:
    x: int
    mean_omega_image: float
    mean_omega_all: float
    reference: float


def omega_distribution(x: int, tables: PrimeTables) -> OmegaReport:
    """Mean number of prime factors over lambda-values <= x and over all n <= x."""
    if x > 10**7:
        raise DomainError("omega distribution is limited to x <= 1e7")
    if tables.limit < x:
        raise RangeError(f"tables to {tables.limit} do not reach {x}")
    members = membership_bitmap(x)
    om = omega_values(x, tables)
    ref = math.log(math.log(x)) / LOG2 if x >= 3 else float("nan")
    return OmegaReport(x, float(om[members].mean()), float(om[1:].mean()), ref)


MULT_TABLE_MAX = 2**14


def mult_table_count(n: int) -> int:
    """Distinct entries of the n x n multiplication table."""
    if not 1 <= n <= MULT_TABLE_MAX:
        raise DomainError(f"n must be in [1, {MULT_TABLE_MAX}]")
    return int(_kernels.distinct_products(n))


def mult_table_exponent(n: int, count: int) -> float | None:
    """log(n^2 / count) / log log n, reported for n >= 16."""
    if n < 16:
        return None
    return math.log(n * n / count) / math.log(math.log(n))


def mult_table_count_bruteforce(n: int) -> int:
    return len({i * j for i in range(1, n + 1) for j in range(i, n + 1)})


PHI_IMAGE_MAX = 10**7


def _phi_lower(m: int) -> float:
    # phi(m) > m / (e^gamma log log m + 3 / log log m) for m >= 3, except m = 223092870,
    # whose phi exceeds PHI_IMAGE_MAX so it can never be a value we count
    u = math.log(math.log(m))
    return m / (math.exp(EULER_GAMMA) * u + 3.0 / u)


def phi_search_bound(x: int) -> int:
    """Least M >= 2 with phi(m) > x guaranteed for every m > M."""
    lo, hi = 2, 4
    while _phi_lower(hi + 1) <= x:
        hi *= 2
    # the lower bound is increasing for m >= 3; find the least M with bound(M + 1) > x
    while lo < hi:
        mid = (lo + hi) // 2
        if _phi_lower(mid + 1) > x:
            hi = mid
        else:
            lo = mid + 1
    return lo


def phi_image_count(x: int, tables: PrimeTables | None = None) -> int:
    """Number of distinct totient values <= x."""
    if not 1 <= x <= PHI_IMAGE_MAX:
        raise DomainError(f"x must be in [1, {PHI_IMAGE_MAX}]")
    M = phi_search_bound(x)
    phi = _kernels.phi_sieve(M)[1:]
    return int(np.unique(phi[phi <= x]).size)


def phi_image_count_bruteforce(x: int, m_max: int) -> int:
    def phi(m):
        r, k, p = m, m, 2
        while p * p <= k:
            if k % p == 0:
                while k % p == 0:
                    k //= p
                r -= r // p
            p += 1
        if k > 1:
            r -= r // k
        return r

    return len({v for v in map(phi, range(1, m_max + 1)) if v <= x})

"""Desk-scale integer factorization and primitive prime divisors.

``factorize`` does trial division up to 10**6, then Brent's variant of Pollard
rho on whatever cofactor remains.  Primality of every reported factor is
checked with Miller-Rabin: the first thirteen prime bases are a proof below
3.3 * 10**24; above that a strong Lucas test is added (Baillie-PSW).

A primitive prime divisor of ``(a, m)`` is a prime ``r`` dividing
``a**m - 1`` but no ``a**i - 1`` with ``i < m``; equivalently the
multiplicative order of ``a`` modulo ``r`` is exactly ``m``.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

TRIAL_LIMIT = 10**6
MAX_FACTOR_BITS = 128
# Sorenson & Webster: the first 13 primes are a deterministic base set below this bound.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_BOUND = 3317044064679887385961981


class FactorizationTimeout(RuntimeError):
    """Pollard rho ran out of its iteration budget; no answer is reported."""


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    sieve = bytearray([1]) * (TRIAL_LIMIT + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(TRIAL_LIMIT) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, TRIAL_LIMIT + 1, i)))
    return tuple(i for i, v in enumerate(sieve) if v)


@lru_cache(maxsize=1)
def _small_prime_set() -> frozenset[int]:
    return frozenset(_small_primes())


def _miller_rabin(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
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


def _strong_lucas(n: int) -> bool:
    if math.isqrt(n) ** 2 == n:
        return False
    d = 5
    while True:
        j = _jacobi(d, n)
        if j == -1:
            break
        if j == 0 and abs(d) != n:
            return False
        d = -d - 2 if d > 0 else -d + 2
    p, q = 1, (1 - d) // 4
    k, s = n + 1, 0
    while k % 2 == 0:
        k //= 2
        s += 1
    # binary Lucas chain for U_k, V_k
    u, v, qk = 1, p, q % n
    inv2 = (n + 1) // 2
    for bit in bin(k)[3:]:
        u, v = u * v % n, (v * v - 2 * qk) % n
        qk = qk * qk % n
        if bit == "1":
            u, v = (p * u + v) * inv2 % n, (d * u + p * v) * inv2 % n
            qk = qk * q % n
    if u == 0 or v == 0:
        return True
    for _ in range(s - 1):
        v = (v * v - 2 * qk) % n
        qk = qk * qk % n
        if v == 0:
            return True
    return False


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n <= TRIAL_LIMIT:
        return n in _small_prime_set()
    if not all(_miller_rabin(n, a) for a in _MR_BASES):
        return False
    if n < _MR_DETERMINISTIC_BOUND:
        return True
    return _strong_lucas(n)


def _brent(n: int, budget: int, rng: random.Random) -> int:
    """A non-trivial factor of composite odd ``n`` via Brent's cycle finding."""
    spent = 0
    while spent < budget:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g, r, q = 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
            spent += r
            if spent > budget:
                break
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    raise FactorizationTimeout(f"rho budget of {budget} iterations exhausted on {n}")


def factorize(n: int, budget: int = 5_000_000, seed: int = 1) -> Counter:
    """Prime factorization of ``1 <= n < 2**128`` as a Counter prime -> exponent."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"factorize needs a positive integer, got {n!r}")
    if n.bit_length() > MAX_FACTOR_BITS:
        raise ValueError(f"{n} exceeds the {MAX_FACTOR_BITS}-bit factorization limit")
    out: Counter = Counter()
    for p in _small_primes():
        if p * p > n:
            break
        while n % p == 0:
            out[p] += 1
            n //= p
    if n == 1:
        return out
    rng = random.Random(seed)
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] += 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _brent(m, budget, rng)
        stack += [d, m // d]
    return out


def multiplicative_order(a: int, r: int) -> int:
    """Order of ``a`` modulo the prime ``r`` (``a`` coprime to ``r``)."""
    n = r - 1
    k = n
    for p in factorize(n):
        while k % p == 0 and pow(a, k // p, r) == 1:
            k //= p
    return k


def _mobius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


@lru_cache(maxsize=None)
def cyclotomic_value(m: int, a: int) -> int:
    """Phi_m(a) via the Mobius product over a**d - 1."""
    num, den = 1, 1
    for d in _divisors(m):
        mu = _mobius(m // d)
        if mu == 1:
            num *= a**d - 1
        elif mu == -1:
            den *= a**d - 1
    assert num % den == 0
    return num // den


def factor_power_minus_one(a: int, m: int) -> Counter:
    """Factorization of ``a**m - 1`` assembled from the cyclotomic pieces."""
    out: Counter = Counter()
    for d in _divisors(m):
        out.update(factorize(cyclotomic_value(d, a)))
    return out


@dataclass(frozen=True)
class PpdResult:
    a: int
    m: int
    primes: tuple[int, ...]
    orders: tuple[int, ...] = field(default=())

    @property
    def exceptional(self) -> bool:
        return not self.primes

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "m": self.m,
            "primes": list(self.primes),
            "orders": list(self.orders),
            "exceptional": self.exceptional,
        }


@lru_cache(maxsize=None)
def ppd_set(a: int, m: int) -> PpdResult:
    """Primitive prime divisors of ``(a, m)`` with order certificates.

    Candidates come from the factorization of Phi_m(a); each is kept only when
    the multiplicative order of ``a`` modulo it is exactly ``m``.
    """
    if a < 2 or m < 2:
        raise ValueError("ppd_set needs a >= 2 and m >= 2")
    primes, orders = [], []
    for r in sorted(factorize(cyclotomic_value(m, a))):
        k = multiplicative_order(a, r)
        if k == m:
            primes.append(r)
            orders.append(k)
    for r, k in zip(primes, orders):
        assert k == m and (a**m - 1) % r == 0
    return PpdResult(a, m, tuple(primes), tuple(orders))


# ---------------------------------------------------------------------------
# elements of ppd order

PPD_DIMENSIONS = {
    "SL": (4, 6, 8),
    "PSL": (4, 6, 8),
    "Sp": (6, 8),
    "OmegaPlus": (8, 10, 12),
    "OmegaMinus": (8, 10, 12),
}


class PpdSearchExhausted(RuntimeError):
    """No ppd-order element turned up within the sampling budget."""


@dataclass(frozen=True)
class PpdElement:
    ppd: PpdResult
    r: int | None
    element: object = field(default=None, compare=False)
    samples: int = 0

    @property
    def absent(self) -> bool:
        """True when ppd(2, ef) is empty, so no such element can exist."""
        return self.r is None


def find_ppd_element(spec, budget: int = 2000, rng=None) -> PpdElement:
    """Random element of order r in ppd(2, e*f), preferring the largest such r.

    Each sample g is pushed into the Sylow-r part by raising it to |G|/r^a; a
    non-identity result is then powered down to order exactly r.  The answer
    is re-verified as an element of prime order r before it is returned.
    """
    import numpy as np

    from . import matgrp

    if spec.family not in PPD_DIMENSIONS or spec.n not in PPD_DIMENSIONS[spec.family]:
        raise ValueError(f"{spec} is not one of the families with a ppd-order target")
    if not spec.field.binary:
        raise ValueError("ppd-order search needs a field of characteristic 2")
    res = ppd_set(2, spec.e * spec.f)
    if res.exceptional:
        return PpdElement(res, None)
    rng = np.random.default_rng(0) if rng is None else rng
    order = matgrp.group_order(spec)
    factors = matgrp.group_order_factors(spec)
    for sample in range(1, budget + 1):
        g = matgrp.random_element(spec, rng)
        for r in sorted(res.primes, reverse=True):
            y = matgrp.power(spec, g, order // r ** factors[r])
            if matgrp.is_identity(spec, y):
                continue
            while True:
                z = matgrp.power(spec, y, r)
                if matgrp.is_identity(spec, z):
                    break
                y = z
            assert matgrp.element_order(spec, y) == r
            return PpdElement(res, r, y, sample)
    raise PpdSearchExhausted(f"no element of order in {list(res.primes)} after {budget} samples of {spec}")

"""Exact arithmetic in GF(2^f) (polynomial basis) and in odd prime fields GF(p).

Field elements are plain integers in ``[0, q)``.  In the binary case the
integer is the bit-vector of polynomial coefficients (bit ``i`` is the
coefficient of ``x^i``); in the prime case it is the residue.  That integer is
also the wire encoding used by the CLI and JSON reports.

The reduction polynomial for GF(2^f) is the numerically least irreducible
polynomial of degree ``f``, so encodings are stable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_BINARY_DEGREE = 16
MAX_PRIME = 1 << 16


class FieldError(ValueError):
    """Invalid field parameters or an undefined operation (e.g. 1/0)."""


def poly_mul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials (no reduction)."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(a: int, m: int) -> int:
    """Remainder of ``a`` modulo ``m`` in GF(2)[x]."""
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def is_irreducible(poly: int) -> bool:
    """Exhaustive irreducibility test over GF(2): trial division by every
    polynomial of degree 1..deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for cand in range(1 << d, 1 << (d + 1)):
            if poly_mod(poly, cand) == 0:
                return False
    return True


@lru_cache(maxsize=None)
def least_irreducible(f: int) -> int:
    """Numerically least irreducible polynomial of degree ``f`` over GF(2)."""
    if f == 1:
        # x itself; GF(2) needs no reduction beyond degree 1
        return 0b10
    for cand in range((1 << f) + 1, 1 << (f + 1), 2):
        if is_irreducible(cand):
            return cand
    raise FieldError(f"no irreducible polynomial of degree {f}")  # pragma: no cover


def _is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def _prime_divisors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class FieldCtx:
    """Immutable arithmetic context for GF(2^f) or GF(p).

    Equality and hashing only look at ``(kind, f, p)``; the lookup tables are
    derived data.
    """

    kind: str
    f: int
    p: int
    reduction: int
    q: int
    generator: int = field(compare=False)
    _exp: tuple = field(compare=False, repr=False)
    _log: tuple = field(compare=False, repr=False)
    exp_np: np.ndarray = field(compare=False, repr=False)
    log_np: np.ndarray = field(compare=False, repr=False)

    # -- scalar arithmetic -------------------------------------------------

    @property
    def binary(self) -> bool:
        return self.kind == "binary"

    @property
    def char(self) -> int:
        return 2 if self.binary else self.p

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise FieldError(f"{a} is not an element of GF({self.q})")
        return a

    def add(self, a: int, b: int) -> int:
        if not (0 <= a < self.q and 0 <= b < self.q):
            raise FieldError(f"operands {a}, {b} are not both in GF({self.q})")
        return a ^ b if self.binary else (a + b) % self.p

    def neg(self, a: int) -> int:
        return a if self.binary else (-a) % self.p

    def sub(self, a: int, b: int) -> int:
        return a ^ b if self.binary else (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        if not (0 <= a < self.q and 0 <= b < self.q):
            raise FieldError(f"operands {a}, {b} are not both in GF({self.q})")
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("zero has no multiplicative inverse")
        self.check(a)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise FieldError("zero has no multiplicative inverse")
            return 1 if k == 0 else 0
        self.check(a)
        return self._exp[(self._log[a] * k) % (self.q - 1)]

    def frobenius(self, a: int) -> int:
        """``a ** char``; squaring in the binary case."""
        return self.pow(a, self.char)

    def trace(self, a: int) -> int:
        """Absolute trace to the prime field."""
        t, x = 0, a
        for _ in range(self.f if self.binary else 1):
            t = self.add(t, x)
            x = self.frobenius(x)
        return t

    def mult_order(self, a: int) -> int:
        if a == 0:
            raise FieldError("zero has no multiplicative order")
        n = self.q - 1
        k = n
        for r in _prime_divisors(n):
            while k % r == 0 and self.pow(a, k // r) == 1:
                k //= r
        return k

    def elements(self) -> range:
        return range(self.q)

    def additive_basis(self) -> list[int]:
        """A GF(char)-basis of the field: 1, x, ..., x^(f-1) (or just 1)."""
        if self.binary:
            return [1 << i for i in range(self.f)]
        return [1]

    def roots_of_unity(self, n: int) -> list[int]:
        """All λ with λ^n = 1, ascending."""
        return [a for a in range(1, self.q) if self.pow(a, n) == 1]

    # -- vectorised arithmetic --------------------------------------------

    def mul_np(self, a: np.ndarray, b) -> np.ndarray:
        """Elementwise product of integer arrays (broadcasting)."""
        if self.q == 2:
            return a & b
        if not self.binary:
            return (a * b) % self.p
        return self.exp_np[self.log_np[a] + self.log_np[b]]

    def add_np(self, a: np.ndarray, b) -> np.ndarray:
        return a ^ b if self.binary else (a + b) % self.p

    def __str__(self) -> str:
        if self.binary:
            return f"GF(2^{self.f})"
        return f"GF({self.p})"


def _mul_raw(a: int, b: int, f: int, red: int) -> int:
    r = 0
    top = 1 << f
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= red
    return r


@lru_cache(maxsize=None)
def field_new(kind: str, f_or_p: int) -> FieldCtx:
    """Build a field context.

    ``field_new("binary", f)`` gives GF(2^f) with 1 <= f <= 16;
    ``field_new("prime", p)`` gives GF(p) for an odd prime p < 2^16.
    """
    if kind == "binary":
        f = f_or_p
        if not isinstance(f, int) or not 1 <= f <= MAX_BINARY_DEGREE:
            raise FieldError(f"binary extension degree must be in 1..{MAX_BINARY_DEGREE}, got {f!r}")
        q = 1 << f
        red = least_irreducible(f)
        if f > 1 and not is_irreducible(red):  # pragma: no cover - guarded by construction
            raise FieldError(f"reduction polynomial {red:#b} is reducible")
        mul = (lambda a, b: _mul_raw(a, b, f, red)) if f > 1 else (lambda a, b: a & b)
        p = 2
    elif kind == "prime":
        p = f_or_p
        if not isinstance(p, int) or not _is_odd_prime(p) or p >= MAX_PRIME:
            raise FieldError(f"prime field needs an odd prime below 2^16, got {p!r}")
        q, f, red = p, 1, 0
        mul = lambda a, b: (a * b) % p  # noqa: E731
    else:
        raise FieldError(f"unknown field kind {kind!r}")

    # least primitive element
    n = q - 1
    divs = _prime_divisors(n) if n > 1 else []
    gen = None
    for g in range(1, q):
        ok = True
        for r in divs:
            x, e, acc = g, n // r, 1
            while e:
                if e & 1:
                    acc = mul(acc, x)
                x = mul(x, x)
                e >>= 1
            if acc == 1:
                ok = False
                break
        if ok:
            gen = g
            break
    assert gen is not None

    exp = [0] * (2 * n + 1)
    log = [0] * q
    x = 1
    for i in range(n):
        exp[i] = x
        log[x] = i
        x = mul(x, gen)
    for i in range(n, 2 * n + 1):
        exp[i] = exp[i - n]

    # numpy tables: log[0] is a sentinel whose sums land in the zero tail of exp
    exp_np = np.zeros(4 * q + 4, dtype=np.int64)
    exp_np[: 2 * n + 1] = exp
    log_np = np.array(log, dtype=np.int64)
    log_np[0] = 2 * q + 1

    return FieldCtx(
        kind=kind,
        f=f,
        p=p,
        reduction=red,
        q=q,
        generator=gen,
        _exp=tuple(exp),
        _log=tuple(log),
        exp_np=exp_np,
        log_np=log_np,
    )


def GF(q: int) -> FieldCtx:
    """Convenience constructor from the field order."""
    if q >= 2 and q & (q - 1) == 0:
        return field_new("binary", q.bit_length() - 1)
    return field_new("prime", q)


_OPS = {
    "add": 2,
    "sub": 2,
    "mul": 2,
    "div": 2,
    "inv": 1,
    "neg": 1,
    "pow": 2,
    "frobenius": 1,
}


def arith(ctx: FieldCtx, op: str, *operands: int) -> int:
    """Dispatch a named field operation; ``pow`` takes (base, integer exponent)."""
    if op not in _OPS:
        raise FieldError(f"unknown field operation {op!r}")
    if len(operands) != _OPS[op]:
        raise FieldError(f"{op} takes {_OPS[op]} operand(s)")
    if op == "pow":
        return ctx.pow(ctx.check(operands[0]), operands[1])
    return getattr(ctx, op)(*(ctx.check(a) for a in operands))

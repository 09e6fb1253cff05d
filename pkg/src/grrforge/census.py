"""Involution censuses for GL_n(q), q even, and the per-family bound ledger.

Every closed form in ``q`` is a :class:`QForm`, an exact quotient of Laurent
polynomials with rational coefficients (optionally divided by
``gcd(k, q - 1)``), evaluated with :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

# ---------------------------------------------------------------------------
# exact closed forms in q


class Laurent:
    """Finite sum of ``c * q**k`` with rational ``c`` and integer ``k``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, Fraction | int] | None = None):
        self.terms = {k: Fraction(c) for k, c in (terms or {}).items() if c}

    @classmethod
    def mono(cls, coef, exp: int = 0) -> "Laurent":
        return cls({exp: Fraction(coef)})

    @classmethod
    def const(cls, c) -> "Laurent":
        return cls.mono(c, 0)

    def __add__(self, other: "Laurent") -> "Laurent":
        out = dict(self.terms)
        for k, c in _lift(other).terms.items():
            out[k] = out.get(k, 0) + c
        return Laurent(out)

    __radd__ = __add__

    def __neg__(self) -> "Laurent":
        return Laurent({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "Laurent":
        return self + (-_lift(other))

    def __mul__(self, other) -> "Laurent":
        other = _lift(other)
        out: dict[int, Fraction] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return Laurent(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Laurent) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def __call__(self, q) -> Fraction:
        q = Fraction(q)
        return sum((c * q**k for k, c in self.terms.items()), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            c = self.terms[k]
            sign = "-" if c < 0 else "+"
            c = abs(c)
            coef = "" if c == 1 and k != 0 else str(c)
            if k == 0:
                mono = str(c)
            elif k == 1:
                mono = f"{coef}q"
            else:
                mono = f"{coef}q^{k}"
            parts.append((sign, mono))
        first_sign, first = parts[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, mono in parts[1:]:
            s += f" {sign} {mono}"
        return s


def _lift(x) -> Laurent:
    return x if isinstance(x, Laurent) else Laurent.const(x)


Q = Laurent.mono(1, 1)


@dataclass(frozen=True)
class QForm:
    """``num(q) / (den(q) * gcd(gcd_arg, q - 1))``; the gcd factor is optional."""

    num: Laurent
    den: Laurent = Laurent.const(1)
    gcd_arg: int | None = None

    def __call__(self, q: int) -> Fraction:
        value = self.num(q) / self.den(q)
        if self.gcd_arg is not None:
            value /= math.gcd(self.gcd_arg, q - 1)
        return value

    def __str__(self) -> str:
        den = "" if self.den == Laurent.const(1) else f"({self.den})"
        if self.gcd_arg is not None:
            den = f"{den}gcd({self.gcd_arg}, q - 1)" if den else f"gcd({self.gcd_arg}, q - 1)"
        num = f"({self.num})" if not self.num.is_monomial() else str(self.num)
        return f"{num}/{den}" if den else num


def _mono(coef, exp: int) -> QForm:
    return QForm(Laurent.mono(coef, exp))


def _poly(terms: Mapping[int, Fraction | int]) -> Laurent:
    return Laurent(terms)


# ---------------------------------------------------------------------------
# GL_n(q) involution classes


def _check_even_q(q: int) -> None:
    if q < 2 or q & (q - 1):
        raise ValueError(f"q must be a power of 2, got {q}")


def gl_order(n: int, q: int) -> int:
    order = 1
    for i in range(n):
        order *= q**n - q**i
    return order


def gl_centralizer_order(n: int, l: int, q: int) -> int:
    """|C_{GL_n(q)}(j_l(n))| = q^{l(2n-3l)} |GL_l(q)| |GL_{n-2l}(q)|."""
    _check_even_q(q)
    if not (1 <= l and 2 * l <= n):
        raise ValueError(f"need 1 <= l <= n/2, got n={n}, l={l}")
    return q ** (l * (2 * n - 3 * l)) * gl_order(l, q) * gl_order(n - 2 * l, q)


@dataclass(frozen=True)
class InvolutionClassInfo:
    n: int
    l: int
    q: int
    centralizer_order: int
    class_size: int

    def as_dict(self) -> dict:
        return {
            "l": self.l,
            "centralizer_order": str(self.centralizer_order),
            "class_size": str(self.class_size),
        }


def involution_classes(n: int, q: int) -> list[InvolutionClassInfo]:
    """One entry per class j_l(n), 1 <= l <= n/2."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    total = gl_order(n, q)
    out = []
    for l in range(1, n // 2 + 1):
        c = gl_centralizer_order(n, l, q)
        size, rem = divmod(total, c)
        assert rem == 0
        out.append(InvolutionClassInfo(n, l, q, c, size))
    return out


def i2_gl_exact(n: int, q: int) -> int:
    """Number of involutions of GL_n(q) (equal to that of SL_n(q) and PSL_n(q) for q even)."""
    return sum(c.class_size for c in involution_classes(n, q))


def commuting_involution_ceiling(n: int, q: int) -> int:
    """i2(SL_{n/2}(q)) q^{n^2/4 - (n-2)} + q^{n^2/4}: a ceiling on the number of
    involutions commuting with j_{n/2}(n) in SL_n(q)."""
    if n % 2:
        raise ValueError("n must be even")
    return i2_gl_exact(n // 2, q) * q ** (n * n // 4 - (n - 2)) + q ** (n * n // 4)


# ---------------------------------------------------------------------------
# bound ledger

ROWS = (
    ("PSL", 4), ("PSL", 6), ("PSL", 8),
    ("PSp", 6), ("PSp", 8),
    ("OmegaPlus", 8), ("OmegaPlus", 10), ("OmegaPlus", 12),
    ("OmegaMinus", 8), ("OmegaMinus", 10), ("OmegaMinus", 12),
)

_LEDGER_ALIASES = {
    "sl": "PSL", "psl": "PSL",
    "sp": "PSp", "psp": "PSp",
    "omegaplus": "OmegaPlus", "o+": "OmegaPlus", "omega+": "OmegaPlus", "pomegaplus": "OmegaPlus",
    "omegaminus": "OmegaMinus", "o-": "OmegaMinus", "omega-": "OmegaMinus", "pomegaminus": "OmegaMinus",
}


def ledger_family(name: str) -> str:
    key = name.strip().lower().replace("_", "")
    if key not in _LEDGER_ALIASES:
        raise KeyError(f"no ledger family {name!r}")
    return _LEDGER_ALIASES[key]


@dataclass(frozen=True)
class BoundLedgerEntry:
    """Closed forms per row.

    ``uG`` is the bound on the number of relevant outer involutions used in
    the master assembly; ``uG_table`` keeps the coarser tabulated value and
    ``uG_exact`` an exact refinement where one exists.  ``displayed_terms``
    are the two subtracted terms of the row's stated lower bound, and
    ``min_q`` the least q = 2^f at which that bound is positive.
    """

    family: str
    n: int
    e: int
    condition: str
    min_q_even: int
    iG: QForm
    uG: QForm
    uG_table: QForm
    uG_exact: QForm | None
    normalizer: QForm
    aQ: QForm
    bQ: QForm
    displayed_terms: tuple[QForm, ...]
    min_q: int

    def stated_bound(self, q: int) -> Fraction:
        return 1 - sum(t(q) for t in self.displayed_terms)

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "e": self.e,
            "condition": self.condition,
            "iG": str(self.iG),
            "uG": str(self.uG),
            "uG_table": str(self.uG_table),
            "uG_exact": None if self.uG_exact is None else str(self.uG_exact),
            "normalizer": str(self.normalizer),
            "aQ": str(self.aQ),
            "bQ": str(self.bQ),
            "statedBound": "1 - " + " - ".join(str(t) for t in self.displayed_terms),
            "minQ": self.min_q,
        }


def _row(family, n, condition, min_even, iG, uG_table, normalizer, aQ, bQ, displayed, min_q,
         uG=None, uG_exact=None) -> BoundLedgerEntry:
    e = n - 2 if family == "OmegaPlus" else n
    return BoundLedgerEntry(
        family, n, e, condition, min_even, iG, uG or uG_table, uG_table, uG_exact,
        normalizer, aQ, bQ, displayed, min_q,
    )


def _cyc_quotient(k: int, coef: int) -> QForm:
    """coef * (q^k - 1) / (q - 1)."""
    return QForm(Laurent({k: coef, 0: -coef}), Laurent({1: 1, 0: -1}))


_ROOT_COEF = Fraction(21, 16)

_LEDGER: dict[tuple[str, int], BoundLedgerEntry] = {
    r[:2]: r[2]
    for r in [
        ("PSL", 4, _row(
            "PSL", 4, "q >= 4 even", 4,
            iG=QForm(_poly({8: 1, 5: -1})),
            uG_table=_mono(22, 3),
            uG=_mono(Fraction(13, 8), 3),
            uG_exact=QForm(_poly({3: 1, 2: 2, 1: 1, 0: 2})),
            normalizer=_cyc_quotient(4, 4),
            aQ=_mono(Fraction(3, 2), 7),
            bQ=_mono(2, 4),
            displayed=(_mono(5, -1),),
            min_q=8,
        )),
        ("PSL", 6, _row(
            "PSL", 6, "q >= 4 even", 4,
            iG=_mono(Fraction(1, 2), 18), uG_table=_mono(32, 5),
            normalizer=QForm(_poly({6: 6, 0: -6}), _poly({1: 1, 0: -1}), gcd_arg=6),
            aQ=_mono(6, 14), bQ=_mono(_ROOT_COEF, 12),
            displayed=(_mono(12, -4), _mono(84, -1)), min_q=128,
        )),
        ("PSL", 8, _row(
            "PSL", 8, "q even", 2,
            iG=_mono(Fraction(1, 2), 32), uG_table=_mono(64, 7),
            normalizer=_cyc_quotient(8, 8),
            aQ=_mono(6, 23), bQ=_mono(_ROOT_COEF, 20),
            displayed=(_mono(12, -9), _mono(168, -5)), min_q=4,
        )),
        ("PSp", 6, _row(
            "PSp", 6, "q >= 4 even", 4,
            iG=_mono(1, 12), uG_table=_mono(25, 3),
            normalizer=QForm(_poly({3: 6, 0: 6})),
            aQ=_mono(7, 11), bQ=_mono(2, 8),
            displayed=(_mono(7, -1), _mono(50, -1)), min_q=64,
        )),
        ("PSp", 8, _row(
            "PSp", 8, "q even", 2,
            iG=_mono(1, 20), uG_table=_mono(34, 4),
            normalizer=QForm(_poly({4: 8, 0: 8})),
            aQ=_mono(8, 16), bQ=_mono(2, 14),
            displayed=(_mono(8, -4), _mono(68, -2)), min_q=16,
        )),
        ("OmegaPlus", 8, _row(
            "OmegaPlus", 8, "q >= 4 even", 4,
            iG=_mono(Fraction(1, 2), 16), uG_table=_mono(61, 4),
            normalizer=QForm(_poly({3: 6, 0: 6}) * _poly({1: 1, 0: 1})),
            aQ=_mono(12, 13), bQ=_mono(2, 10),
            displayed=(_mono(24, -3), _mono(244, -2)), min_q=16,
        )),
        ("OmegaPlus", 10, _row(
            "OmegaPlus", 10, "q even", 2,
            iG=_mono(Fraction(1, 2), 24), uG_table=_mono(102, 5),
            normalizer=QForm(_poly({4: 8, 0: 8}) * _poly({1: 1, 0: 1})),
            aQ=_mono(10, 21), bQ=_mono(3, 17),
            displayed=(_mono(20, -3), _mono(612, -2)), min_q=32,
        )),
        ("OmegaPlus", 12, _row(
            "OmegaPlus", 12, "q even", 2,
            iG=_mono(Fraction(1, 2), 36), uG_table=_mono(124, 6),
            normalizer=QForm(_poly({5: 10, 0: 10}) * _poly({1: 1, 0: 1})),
            aQ=_mono(10, 31), bQ=_mono(3, 24),
            displayed=(_mono(20, -5), _mono(744, -6)), min_q=4,
        )),
        ("OmegaMinus", 8, _row(
            "OmegaMinus", 8, "q even", 2,
            iG=_mono(Fraction(1, 2), 16), uG_table=_mono(34, 4),
            normalizer=QForm(_poly({4: 4, 0: 4})),
            aQ=_mono(3, 8), bQ=_mono(3, 9),
            displayed=(_mono(6, -8), _mono(204, -3)), min_q=8,
        )),
        ("OmegaMinus", 10, _row(
            "OmegaMinus", 10, "q even", 2,
            iG=_mono(Fraction(1, 2), 24), uG_table=_mono(42, 5),
            normalizer=QForm(_poly({5: 5, 0: 5})),
            aQ=_mono(6, 15), bQ=_mono(3, 15),
            displayed=(_mono(12, -9), _mono(252, -4)), min_q=4,
        )),
        ("OmegaMinus", 12, _row(
            "OmegaMinus", 12, "q even", 2,
            iG=_mono(Fraction(1, 2), 36), uG_table=_mono(49, 6),
            normalizer=QForm(_poly({6: 6, 0: 6})),
            aQ=_mono(4, 18), bQ=_mono(5, 22),
            displayed=(_mono(8, -18), _mono(490, -8)), min_q=4,
        )),
    ]
}


def ledger(family: str, n: int) -> BoundLedgerEntry:
    key = (ledger_family(family), n)
    if key not in _LEDGER:
        raise KeyError(f"no ledger row for {family} in dimension {n}")
    return _LEDGER[key]


def ledger_rows() -> list[BoundLedgerEntry]:
    return [_LEDGER[k] for k in ROWS]


# ---------------------------------------------------------------------------
# lower bound on i2 versus the tabulated i(G)

INVOLUTION_CHECK_PAIRS = ((4, 4), (4, 8), (6, 4), (6, 8), (8, 2), (8, 4))


@dataclass(frozen=True)
class InvolutionCountReport:
    n: int
    q: int
    i2_exact: int
    iG: Fraction
    applicable: bool
    holds: bool

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "i2_exact": str(self.i2_exact),
            "iG": str(self.iG),
            "applicable": self.applicable,
            "holds": self.holds,
        }


def check_involution_count(n: int, q: int) -> InvolutionCountReport:
    """Compare the exact involution count of PSL_n(q) with the ledger's i(G).

    ``applicable`` records whether q meets the row's condition; outside it the
    comparison is informational only.
    """
    _check_even_q(q)
    row = ledger("PSL", n)
    exact = i2_gl_exact(n, q)
    iG = row.iG(q)
    return InvolutionCountReport(n, q, exact, iG, q >= row.min_q_even, exact >= iG)

"""Exact lower bounds on the GRR probability, per ledger row.

``master_lower`` assembles ``1 - a(q)/i(G) - u(G) b(q)/i(G)`` from the ledger;
``displayed_lower`` evaluates the row's simplified closed form.  Everything is
a :class:`fractions.Fraction`; no floating point is involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .census import BoundLedgerEntry, ledger, ledger_rows

MAX_F = 64
LIMIT_EPS = Fraction(1, 2**10)


def _row(family: str | BoundLedgerEntry, n: int | None = None) -> BoundLedgerEntry:
    return family if isinstance(family, BoundLedgerEntry) else ledger(family, n)


def master_terms(family, n, q: int) -> tuple[Fraction, Fraction]:
    """(a(q)/i(G), u(G) b(q)/i(G))."""
    row = _row(family, n)
    iG = row.iG(q)
    return row.aQ(q) / iG, row.uG(q) * row.bQ(q) / iG


def master_lower(family, n, q: int) -> Fraction:
    a_term, u_term = master_terms(family, n, q)
    return 1 - a_term - u_term


def displayed_terms(family, n, q: int) -> tuple[Fraction, ...]:
    return tuple(t(q) for t in _row(family, n).displayed_terms)


def displayed_lower(family, n, q: int) -> Fraction:
    return 1 - sum(displayed_terms(family, n, q), Fraction(0))


@dataclass(frozen=True)
class ProbabilityBound:
    family: str
    n: int
    q: int
    master: Fraction
    displayed: Fraction

    @property
    def positive(self) -> bool:
        return self.displayed > 0

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "q": self.q,
            "master": str(self.master),
            "displayed": str(self.displayed),
            "positive": self.positive,
        }


def probability_bound(family, n, q: int) -> ProbabilityBound:
    row = _row(family, n)
    return ProbabilityBound(row.family, row.n, q, master_lower(row, None, q), displayed_lower(row, None, q))


def _terms_decreasing(row: BoundLedgerEntry) -> bool:
    """Each subtracted term c q^k has c > 0 and k < 0, so shrinks strictly as q grows."""
    for t in row.displayed_terms:
        if t.den.terms != {0: 1} or t.gcd_arg is not None:
            return False
        if any(c <= 0 or k >= 0 for k, c in t.num.terms.items()):
            return False
    return True


@dataclass(frozen=True)
class Threshold:
    family: str
    n: int
    stated_min_q: int
    computed_min_q: int | None
    decreasing_terms: bool

    @property
    def match(self) -> bool:
        return self.stated_min_q == self.computed_min_q

    def csv_row(self) -> str:
        return f"{self.family},{self.n},{self.stated_min_q},{self.computed_min_q},{str(self.match).lower()}"


def min_q_positive(family, n=None, max_f: int = MAX_F) -> int | None:
    """Least q = 2^f (f <= max_f) with displayed_lower > 0.

    Positivity for every larger q follows because each subtracted term is a
    positive multiple of a negative power of q; that is checked symbolically,
    and positivity is also confirmed exactly for every f up to ``max_f``.
    """
    row = _row(family, n)
    found = None
    for f in range(1, max_f + 1):
        if displayed_lower(row, None, 2**f) > 0:
            found = f
            break
    if found is None:
        return None
    if not _terms_decreasing(row):
        raise ArithmeticError(f"cannot certify monotone positivity for {row.family}_{row.n}")
    assert all(displayed_lower(row, None, 2**f) > 0 for f in range(found, max_f + 1))
    return 2**found


def threshold(family, n=None) -> Threshold:
    row = _row(family, n)
    return Threshold(row.family, row.n, row.min_q, min_q_positive(row), _terms_decreasing(row))


def thresholds_table() -> list[Threshold]:
    return [threshold(row) for row in ledger_rows()]


def thresholds_csv() -> str:
    lines = ["family,n,paper_minQ,computed_minQ,match"]
    lines += [t.csv_row() for t in thresholds_table()]
    return "\n".join(lines) + "\n"


def limit_witness(family, n=None, eps: Fraction = LIMIT_EPS, max_f: int = MAX_F) -> int | None:
    """Least f with displayed_lower(2^f) > 1 - eps."""
    row = _row(family, n)
    for f in range(1, max_f + 1):
        if displayed_lower(row, None, 2**f) > 1 - eps:
            return f
    return None


def monotone_above_threshold(family, n=None, max_f: int = MAX_F) -> bool:
    """displayed_lower(2^f) strictly increases for threshold <= 2^f <= 2^max_f."""
    row = _row(family, n)
    q0 = min_q_positive(row, max_f=max_f)
    if q0 is None:
        return False
    f0 = q0.bit_length() - 1
    values = [displayed_lower(row, None, 2**f) for f in range(f0, max_f + 1)]
    return all(a < b for a, b in zip(values, values[1:]))


def terms_agree(family, n=None, q: int = 2) -> bool:
    """Master-assembly terms versus the displayed terms at one q.

    For rows with two displayed terms they must agree term by term; for the
    single-term row the master bound must dominate the displayed one.
    """
    row = _row(family, n)
    master = master_terms(row, None, q)
    shown = displayed_terms(row, None, q)
    if len(shown) == 2:
        return master == shown
    return 1 - sum(master) >= 1 - sum(shown)

"""Desk-scale group tables: BFS enumeration, involutions, orders, centralizers.

A table stores the sorted int64 keys of the canonical elements (see
:func:`matgrp.canonical_keys`); element ``i`` is ``decode(keys[i])``.  All
heavy work runs in numpy over chunks of decoded elements.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import os
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import matgrp
from .matgrp import GroupError, GroupSpec

log = logging.getLogger(__name__)

DEFAULT_CAP = 2_000_000
CHUNK = 1 << 15
CACHE_MAGIC = b"GRRF1"


class EnumerationRefused(RuntimeError):
    """The group is larger than the element cap (or cannot be keyed in 63 bits)."""


class CacheError(ValueError):
    """A cache file failed verification."""


def _chunks(n: int, size: int = CHUNK):
    for lo in range(0, n, size):
        yield lo, min(n, lo + size)


@dataclass(eq=False)
class ElementTable:
    spec: GroupSpec
    keys: np.ndarray
    _involutions: np.ndarray | None = field(default=None, repr=False)
    _orders: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.keys)

    @property
    def order(self) -> int:
        return len(self.keys)

    # -- lookup --------------------------------------------------------------

    def element(self, i: int) -> np.ndarray:
        return matgrp.decode(self.spec, self.keys[int(i)])

    def elements(self, idx=None) -> np.ndarray:
        keys = self.keys if idx is None else self.keys[np.asarray(idx)]
        return matgrp.decode(self.spec, keys)

    def lookup_keys(self, keys: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, len(self.keys) - 1)
        if not np.array_equal(self.keys[pos], keys):
            raise GroupError(f"element(s) not in the table of {self.spec}")
        return pos

    def indices(self, batch: np.ndarray) -> np.ndarray:
        return self.lookup_keys(matgrp.canonical_keys(self.spec, batch))

    def index_of(self, g) -> int:
        g = np.asarray(g, dtype=np.int64)
        return int(self.indices(g[None])[0])

    def contains(self, g) -> bool:
        try:
            self.index_of(g)
        except GroupError:
            return False
        return True

    @property
    def identity_index(self) -> int:
        return self.index_of(matgrp.identity(self.spec))

    # -- multiplication permutations --------------------------------------

    def _mult_perm(self, g: np.ndarray, side: str) -> np.ndarray:
        g = np.asarray(g, dtype=np.int64)
        out = np.empty(len(self), dtype=np.int64)
        for lo, hi in _chunks(len(self)):
            E = self.elements(np.arange(lo, hi))
            prod = matgrp.mul(self.spec, E, g) if side == "right" else matgrp.mul(self.spec, g, E)
            out[lo:hi] = self.indices(prod)
        return out

    def right_mult_perm(self, g) -> np.ndarray:
        """``perm[i]`` = index of ``element(i) * g``."""
        return self._mult_perm(g, "right")

    def left_mult_perm(self, g) -> np.ndarray:
        """``perm[i]`` = index of ``g * element(i)``."""
        return self._mult_perm(g, "left")

    def inverse_index(self, i: int) -> int:
        return self.index_of(matgrp.inverse(self.spec, self.element(i)))

    # -- powers and orders -------------------------------------------------

    def _power_keys(self, E: np.ndarray, k: int) -> np.ndarray:
        return matgrp.canonical_keys(self.spec, _batch_power(self.spec, E, k))

    @property
    def involutions(self) -> np.ndarray:
        """Sorted indices of the elements of order exactly 2."""
        if self._involutions is None:
            ident = self.keys[self.identity_index]
            hits = []
            for lo, hi in _chunks(len(self)):
                E = self.elements(np.arange(lo, hi))
                sq = matgrp.canonical_keys(self.spec, matgrp.mul(self.spec, E, E))
                hits.append(np.arange(lo, hi)[sq == ident])
            inv = np.concatenate(hits)
            self._involutions = inv[inv != self.identity_index]
        return self._involutions

    @property
    def i2(self) -> int:
        return len(self.involutions)

    @property
    def orders(self) -> np.ndarray:
        """Order of every element, via prime-power parts of the group order."""
        if self._orders is None:
            from .ppd import factorize

            N = len(self)
            fac = factorize(N)
            ident = self.keys[self.identity_index]
            orders = np.ones(N, dtype=np.int64)
            for lo, hi in _chunks(len(self)):
                E = self.elements(np.arange(lo, hi))
                for r, e in fac.items():
                    Y = _batch_power(self.spec, E, N // r**e)
                    part = np.ones(hi - lo, dtype=np.int64)
                    for _ in range(e):
                        pending = matgrp.canonical_keys(self.spec, Y) != ident
                        if not pending.any():
                            break
                        part[pending] *= r
                        Y = _batch_power(self.spec, Y, r)
                    orders[lo:hi] *= part
            self._orders = orders
        return self._orders

    def element_order(self, i: int) -> int:
        return int(self.orders[int(i)])

    # -- centralizers ------------------------------------------------------

    def commuting_mask(self, g, idx=None) -> np.ndarray:
        g = np.asarray(g, dtype=np.int64)
        idx = np.arange(len(self)) if idx is None else np.asarray(idx)
        out = np.empty(len(idx), dtype=bool)
        for lo, hi in _chunks(len(idx)):
            E = self.elements(idx[lo:hi])
            a = matgrp.canonical_keys(self.spec, matgrp.mul(self.spec, E, g))
            b = matgrp.canonical_keys(self.spec, matgrp.mul(self.spec, g, E))
            out[lo:hi] = a == b
        return out


def _batch_power(spec: GroupSpec, E: np.ndarray, k: int) -> np.ndarray:
    result = np.broadcast_to(matgrp.identity(spec), E.shape).copy()
    base = E
    while k:
        if k & 1:
            result = matgrp.mul(spec, result, base)
        k >>= 1
        if k:
            base = matgrp.mul(spec, base, base)
    return result


# ---------------------------------------------------------------------------
# enumeration

def _closure_keys(spec: GroupSpec, gens: list[np.ndarray], cap: int) -> np.ndarray:
    if matgrp.key_weights(spec) is None:
        raise EnumerationRefused(f"{spec}: element encoding exceeds 63 bits")
    gens = gens + [matgrp.inverse(spec, g) for g in gens]
    seen = matgrp.canonical_keys(spec, matgrp.identity(spec)[None])
    frontier = seen
    while len(frontier):
        found = []
        for lo, hi in _chunks(len(frontier)):
            F = matgrp.decode(spec, frontier[lo:hi])
            for g in gens:
                found.append(matgrp.canonical_keys(spec, matgrp.mul(spec, F, g)))
        new = np.unique(np.concatenate(found))
        pos = np.minimum(np.searchsorted(seen, new), len(seen) - 1)
        new = new[seen[pos] != new]
        if len(seen) + len(new) > cap:
            raise EnumerationRefused(f"{spec}: closure exceeds the cap of {cap} elements")
        seen = np.union1d(seen, new)
        frontier = new
    return seen


def enumerate_group(spec: GroupSpec, cap: int = DEFAULT_CAP,
                    cache_dir: str | os.PathLike | None = None) -> ElementTable:
    """BFS closure of the standard generators; refuses groups above ``cap``.

    For matrix families the count is checked against the order formula, which
    doubles as a certificate that the generators are correct.
    """
    if spec.is_matrix:
        order = matgrp.group_order(spec)
        if order > cap:
            raise EnumerationRefused(f"{spec} has order {order} > cap {cap}")
    path = None
    if cache_dir is not None:
        path = Path(cache_dir) / cache_filename(spec)
        if path.exists():
            try:
                return load_table(path, spec)
            except CacheError as exc:
                log.warning("rebuilding %s: %s", path, exc)
    keys = _closure_keys(spec, matgrp.standard_generators(spec), cap)
    if spec.is_matrix and len(keys) != matgrp.group_order(spec):
        raise GroupError(
            f"closure of the generators of {spec} has {len(keys)} elements, "
            f"expected {matgrp.group_order(spec)}"
        )
    table = ElementTable(spec, keys)
    if path is not None:
        save_table(table, path)
    return table


@lru_cache(maxsize=None)
def perm_closure_keys(spec: GroupSpec, cap: int = DEFAULT_CAP) -> frozenset[int]:
    keys = _closure_keys(spec, matgrp.standard_generators(spec), cap)
    return frozenset(int(k) for k in keys)


# ---------------------------------------------------------------------------
# generation, sampling, centralizers

def subgroup_size(table: ElementTable, *gens) -> int:
    """Size of the subgroup generated by ``gens`` (BFS over right multiplications)."""
    perms = [table.right_mult_perm(g) for g in gens]
    seen = np.zeros(len(table), dtype=bool)
    start = table.identity_index
    seen[start] = True
    frontier = np.array([start])
    while len(frontier):
        nxt = np.unique(np.concatenate([p[frontier] for p in perms]))
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return int(seen.sum())


def generates(table: ElementTable, x, y) -> bool:
    """True iff <x, y> is the whole group."""
    for g in (x, y):
        table.index_of(g)  # raises on foreign elements
    return subgroup_size(table, x, y) == len(table)


def sample_involution(table: ElementTable, rng: np.random.Generator) -> np.ndarray:
    inv = table.involutions
    if len(inv) == 0:
        raise GroupError(f"{table.spec} has no involutions")
    return table.element(inv[rng.integers(len(inv))])


def centralizer_order(table: ElementTable, g) -> int:
    table.index_of(g)
    return int(table.commuting_mask(g).sum())


def centralizer_involution_count(table: ElementTable, g) -> int:
    table.index_of(g)
    return int(table.commuting_mask(g, table.involutions).sum())


# ---------------------------------------------------------------------------
# matrix-level centralizers (groups too large to tabulate)

def _nullspace(F, A: list[list[int]]) -> list[list[int]]:
    rows, cols = len(A), len(A[0])
    A = [row[:] for row in A]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = F.inv(A[r][c])
        A[r] = [F.mul(inv, a) for a in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                k = A[i][c]
                A[i] = [F.sub(a, F.mul(k, b)) for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * cols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(A[i][fc])
        basis.append(v)
    return basis


def _batch_det(F, M: np.ndarray) -> np.ndarray:
    """Leibniz determinant of a stack of n x n matrices (n <= 6)."""
    n = M.shape[-1]
    if n > 6:
        raise GroupError("batched determinant limited to n <= 6")
    total = np.zeros(M.shape[:-2], dtype=np.int64)
    for perm in itertools.permutations(range(n)):
        term = M[..., 0, perm[0]]
        for i in range(1, n):
            term = F.mul_np(term, M[..., i, perm[i]])
        if not F.binary:
            inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
            if inversions % 2:
                term = (-term) % F.p
        total = F.add_np(total, term)
    return total


def matrix_centralizer(spec: GroupSpec, g, cap: int = DEFAULT_CAP) -> np.ndarray:
    """All members of ``spec`` commuting with ``g``, found by enumerating the
    commutant algebra ``{M : Mg = gM}`` (a linear subspace) and filtering."""
    F, n = spec.field, spec.n
    g = np.asarray(g, dtype=np.int64)
    # unknown M[a, b] at column a*n + b; equation (Mg - gM)[i, j] = 0
    eqs = []
    for i in range(n):
        for j in range(n):
            row = [0] * (n * n)
            for k in range(n):
                row[i * n + k] = F.add(row[i * n + k], int(g[k, j]))
                row[k * n + j] = F.sub(row[k * n + j], int(g[i, k]))
            eqs.append(row)
    basis = np.array(_nullspace(F, eqs), dtype=np.int64)
    d = len(basis)
    if F.q**d > cap:
        raise EnumerationRefused(f"commutant has {F.q}^{d} elements > cap {cap}")
    found = []
    total = F.q**d
    for lo, hi in _chunks(total):
        idx = np.arange(lo, hi, dtype=np.int64)
        coeffs = np.empty((hi - lo, d), dtype=np.int64)
        for k in range(d - 1, -1, -1):
            coeffs[:, k] = idx % F.q
            idx //= F.q
        flat = np.zeros((hi - lo, n * n), dtype=np.int64)
        for k in range(d):
            flat = F.add_np(flat, F.mul_np(coeffs[:, k : k + 1], basis[k][None, :]))
        M = flat.reshape(-1, n, n)
        det = _batch_det(F, M)
        keep = det == 1 if spec.family in ("SL", "PSL") else det != 0
        M = M[keep]
        if spec.family not in ("SL", "PSL", "GL"):
            M = M[[matgrp.in_group(spec, m) for m in M]]
        found.append(M)
    return np.concatenate(found)


def matrix_centralizer_involutions(spec: GroupSpec, g, cap: int = DEFAULT_CAP) -> int:
    C = matrix_centralizer(spec, g, cap)
    ident = np.eye(spec.n, dtype=np.int64)
    sq = matgrp.mul(spec, C, C)
    is_one = (sq == ident).all(axis=(1, 2))
    not_one = ~(C == ident).all(axis=(1, 2))
    return int((is_one & not_one).sum())


# ---------------------------------------------------------------------------
# disk cache

def cache_filename(spec: GroupSpec) -> str:
    d = spec.descriptor()
    tag = f"{d['family']}_{d['n']}"
    if spec.field is not None:
        tag += f"_q{spec.q}"
    else:
        tag += "_" + hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:12]
    return f"{tag}.grrf"


def save_table(table: ElementTable, path: str | os.PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    desc = json.dumps(table.spec.descriptor(), sort_keys=True).encode()
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<I", len(desc)))
        fh.write(desc)
        fh.write(struct.pack("<Q", len(table.keys)))
        fh.write(table.keys.astype("<i8").tobytes())
    os.replace(tmp, path)


def load_table(path: str | os.PathLike, spec: GroupSpec) -> ElementTable:
    """Reload a cached table, re-verifying header, count, order and generators."""
    data = Path(path).read_bytes()
    if not data.startswith(CACHE_MAGIC):
        raise CacheError("bad magic")
    pos = len(CACHE_MAGIC)
    try:
        (dlen,) = struct.unpack_from("<I", data, pos)
        pos += 4
        desc = json.loads(data[pos : pos + dlen])
        pos += dlen
        (count,) = struct.unpack_from("<Q", data, pos)
        pos += 8
    except (struct.error, ValueError) as exc:
        raise CacheError(f"truncated header: {exc}") from exc
    if desc != json.loads(json.dumps(spec.descriptor(), sort_keys=True)):
        raise CacheError("descriptor does not match the requested group")
    body = data[pos:]
    if len(body) != 8 * count:
        raise CacheError(f"expected {count} keys, file holds {len(body) / 8:g}")
    keys = np.frombuffer(body, dtype="<i8").astype(np.int64)
    if count and np.any(np.diff(keys) <= 0):
        raise CacheError("keys are not strictly increasing")
    if spec.is_matrix and count != matgrp.group_order(spec):
        raise CacheError("element count differs from the group order")
    table = ElementTable(spec, keys)
    for g in matgrp.standard_generators(spec):
        if not table.contains(g):
            raise CacheError("a standard generator is missing from the table")
    return table

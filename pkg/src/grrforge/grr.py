"""Cayley graphs, GRR certification, exhaustive searches and P(x) estimates.

Cay(G, S) has an edge {g, s*g} for every g in G and s in S, so every right
multiplication ``g -> g*h`` is an automorphism.  The graph is a GRR exactly
when |Aut| = |G|; that is what :func:`is_grr` certifies, after a cheap
generation test.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist

import numpy as np

from . import matgrp
from .automorphism import BudgetExceeded, Graph, aut_order
from .smallgrp import ElementTable

SMALL_TABLE = 6000


class ConnectionSetError(ValueError):
    """S contains the identity, is not inverse-closed, or leaves the table."""


# ---------------------------------------------------------------------------
# index-level multiplication


class MultiplicationCache:
    """Left/right multiplication permutations on a table, by element index.

    Tables up to ``SMALL_TABLE`` elements get a full multiplication table.
    """

    def __init__(self, table: ElementTable):
        self.table = table
        self._right: dict[int, np.ndarray] = {}
        self._left: dict[int, np.ndarray] = {}
        self._full = None
        if len(table) <= SMALL_TABLE:
            E = table.elements()
            full = np.empty((len(table), len(table)), dtype=np.int64)
            for j in range(len(table)):
                full[:, j] = table.indices(matgrp.mul(table.spec, E, E[j]))
            self._full = full

    def right(self, j: int) -> np.ndarray:
        """perm[i] = index(e_i * e_j)."""
        j = int(j)
        if self._full is not None:
            return self._full[:, j]
        if j not in self._right:
            self._right[j] = self.table.right_mult_perm(self.table.element(j))
        return self._right[j]

    def left(self, j: int) -> np.ndarray:
        """perm[i] = index(e_j * e_i)."""
        j = int(j)
        if self._full is not None:
            return self._full[j, :]
        if j not in self._left:
            self._left[j] = self.table.left_mult_perm(self.table.element(j))
        return self._left[j]

    def inverse(self, j: int) -> int:
        return int(np.flatnonzero(self.right(j) == self.table.identity_index)[0])


_CACHES: dict[int, tuple[ElementTable, MultiplicationCache]] = {}


def mult_cache(table: ElementTable) -> MultiplicationCache:
    hit = _CACHES.get(id(table))
    if hit is None or hit[0] is not table:
        hit = (table, MultiplicationCache(table))
        _CACHES[id(table)] = hit
    return hit[1]


def _as_index(table: ElementTable, g) -> int:
    if isinstance(g, (int, np.integer)):
        if not 0 <= g < len(table):
            raise ConnectionSetError(f"index {g} outside the table")
        return int(g)
    try:
        return table.index_of(g)
    except matgrp.GroupError as exc:
        raise ConnectionSetError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Cayley graphs


@dataclass
class CayleyGraph:
    graph: Graph
    connection_set: tuple[int, ...]
    table: ElementTable = field(repr=False)

    @property
    def vertex_count(self) -> int:
        return self.graph.n

    @property
    def adjacency(self) -> np.ndarray:
        return self.graph.adjacency

    def is_connected(self) -> bool:
        return self.graph.is_connected()

    def to_dimacs(self) -> str:
        e = self.graph.edges()
        lines = [f"p edge {self.graph.n} {len(e)}"]
        lines += [f"e {u + 1} {v + 1}" for u, v in e.tolist()]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        adj = [[int(v) for v in row if v >= 0] for row in self.graph.adjacency]
        return json.dumps({
            "schema": "grrforge/1",
            "vertices": self.graph.n,
            "connection_set": list(self.connection_set),
            "adjacency": adj,
        })


def build_cayley(table: ElementTable, S) -> CayleyGraph:
    """Cay(G, S) with g adjacent to s*g; S must be inverse-closed and avoid 1."""
    cache = mult_cache(table)
    idx = [_as_index(table, s) for s in S]
    if len(set(idx)) != len(idx):
        raise ConnectionSetError("connection set has repeated elements")
    ident = table.identity_index
    if ident in idx:
        raise ConnectionSetError("connection set contains the identity")
    if {cache.inverse(i) for i in idx} != set(idx):
        raise ConnectionSetError("connection set is not closed under inverses")
    adj = np.stack([cache.left(i) for i in idx], axis=1) if idx else np.full((len(table), 1), -1)
    return CayleyGraph(Graph(np.ascontiguousarray(adj)), tuple(idx), table)


def regular_automorphisms(table: ElementTable) -> list[np.ndarray]:
    """Right multiplications by the standard generators (they generate G acting on itself)."""
    cache = mult_cache(table)
    return [cache.right(table.index_of(g)) for g in matgrp.standard_generators(table.spec)]


def cayley_aut_order(cg: CayleyGraph, node_budget=None, time_budget=None) -> int:
    return aut_order(cg.graph, regular_automorphisms(cg.table), node_budget, time_budget)


def aut_gs_order(table: ElementTable, S) -> int:
    """|Aut(G, S)| for a generating set S: count the permutations of S that
    extend to automorphisms of G."""
    cache = mult_cache(table)
    idx = [_as_index(table, s) for s in S]
    rights = {i: cache.right(i) for i in idx}
    N = len(table)
    ident = table.identity_index
    count = 0
    for images in itertools.permutations(idx):
        phi = np.full(N, -1, dtype=np.int64)
        phi[ident] = ident
        frontier = np.array([ident])
        ok = True
        while len(frontier) and ok:
            nxt = []
            for s, t in zip(idx, images):
                src = rights[s][frontier]
                dst = rights[t][phi[frontier]]
                known = phi[src] >= 0
                if np.any(phi[src[known]] != dst[known]):
                    ok = False
                    break
                fresh = src[~known]
                # duplicates within one step must agree too
                order = np.argsort(fresh, kind="stable")
                fs, ds = fresh[order], dst[~known][order]
                same = fs[1:] == fs[:-1]
                if np.any(ds[1:][same] != ds[:-1][same]):
                    ok = False
                    break
                phi[fs] = ds
                nxt.append(np.unique(fs))
            frontier = np.unique(np.concatenate(nxt)) if ok and nxt else np.array([], dtype=np.int64)
        if ok and np.all(phi >= 0) and len(np.unique(phi)) == N:
            count += 1
    return count


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class GrrVerdict:
    connection_set: tuple[int, ...]
    generates: bool
    aut_order: int | None
    group_order: int
    budget_exceeded: bool = False
    elapsed_ms: float = 0.0

    @property
    def is_grr(self) -> bool | None:
        if self.budget_exceeded:
            return None
        return bool(self.generates and self.aut_order == self.group_order)

    @property
    def status(self) -> str:
        if self.budget_exceeded:
            return "unknown"
        return "grr" if self.is_grr else "not-grr"

    def as_dict(self, table: ElementTable | None = None, canonical: bool = False) -> dict:
        d = {
            "connection_set": list(self.connection_set),
            "generates": self.generates,
            "autOrder": None if self.aut_order is None else str(self.aut_order),
            "groupOrder": str(self.group_order),
            "isGRR": self.is_grr,
            "status": self.status,
            "budgetExceeded": self.budget_exceeded,
        }
        if table is not None:
            d["elements"] = [matgrp.format_matrix(table.element(i)) for i in self.connection_set]
        if not canonical:
            d["elapsedMs"] = round(self.elapsed_ms, 3)
        return d


def certify(table: ElementTable, S, node_budget=None, time_budget=None) -> GrrVerdict:
    """Generation test, then |Aut(Cay(G, S))| via the automorphism engine."""
    t0 = time.perf_counter()
    cache = mult_cache(table)
    idx = tuple(_as_index(table, s) for s in S)
    N = len(table)
    gen_ok = _generates_idx(table, cache, idx)
    if not gen_ok:
        return GrrVerdict(idx, False, None, N, False, 1000 * (time.perf_counter() - t0))
    cg = build_cayley(table, idx)
    try:
        order = cayley_aut_order(cg, node_budget, time_budget)
    except BudgetExceeded:
        return GrrVerdict(idx, True, None, N, True, 1000 * (time.perf_counter() - t0))
    assert order % N == 0
    return GrrVerdict(idx, True, order, N, False, 1000 * (time.perf_counter() - t0))


def _generates_idx(table, cache, idx) -> bool:
    perms = [cache.right(i) for i in idx]
    seen = np.zeros(len(table), dtype=bool)
    start = table.identity_index
    seen[start] = True
    frontier = np.array([start])
    while len(frontier):
        nxt = np.unique(np.concatenate([p[frontier] for p in perms]))
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return bool(seen.all())


def is_grr(table: ElementTable, x, y, node_budget=None, time_budget=None,
           allow_any_shape: bool = False) -> GrrVerdict:
    """Certify Cay(G, {x, x^-1, y}) with x of order > 2 and y an involution."""
    cache = mult_cache(table)
    xi, yi = _as_index(table, x), _as_index(table, y)
    xinv = cache.inverse(xi)
    if not allow_any_shape:
        if table.element_order(yi) != 2:
            raise ConnectionSetError("y must be an involution")
        if table.element_order(xi) <= 2:
            raise ConnectionSetError("x must have order greater than 2")
    return certify(table, (xi, xinv, yi), node_budget, time_budget)


# ---------------------------------------------------------------------------
# exhaustive searches


@dataclass
class SearchReport:
    shape: str
    candidates: int
    examined: int = 0
    witnesses: list[tuple[int, ...]] = field(default_factory=list)
    unknown: list[tuple[int, ...]] = field(default_factory=list)
    non_generating: int = 0
    stopped_early: bool = False

    @property
    def complete(self) -> bool:
        return self.examined == self.candidates and not self.unknown

    @property
    def certified_empty(self) -> bool:
        return self.complete and not self.witnesses

    def as_dict(self, table: ElementTable | None = None) -> dict:
        d = {
            "shape": self.shape,
            "candidates": self.candidates,
            "examined": self.examined,
            "nonGenerating": self.non_generating,
            "witnesses": [list(w) for w in self.witnesses],
            "unknown": [list(w) for w in self.unknown],
            "complete": self.complete,
            "stoppedEarly": self.stopped_early,
        }
        if table is not None:
            d["witnessElements"] = [
                [matgrp.format_matrix(table.element(i)) for i in w] for w in self.witnesses
            ]
        return d


def mixed_candidates(table: ElementTable, x_order: int | None = None) -> list[tuple[int, int, int]]:
    """(x, x^-1, y): one x per inverse pair of elements of order > 2, all involutions y."""
    cache = mult_cache(table)
    orders = table.orders
    xs = []
    for i in np.flatnonzero(orders > 2):
        i = int(i)
        if x_order is not None and orders[i] != x_order:
            continue
        j = cache.inverse(i)
        if i < j:
            xs.append((i, j))
    return [(i, j, int(y)) for i, j in xs for y in table.involutions]


def involution_triples(table: ElementTable) -> list[tuple[int, int, int]]:
    return [tuple(int(v) for v in t) for t in itertools.combinations(table.involutions, 3)]


def _certify_batch(args):
    table, sets, node_budget, time_budget = args
    return [certify(table, s, node_budget, time_budget) for s in sets]


def run_search(table: ElementTable, candidates, shape: str, stop_after: int | None = None,
               node_budget=None, time_budget=None, workers: int = 1) -> SearchReport:
    report = SearchReport(shape, len(candidates))

    def absorb(verdict: GrrVerdict) -> bool:
        report.examined += 1
        if not verdict.generates:
            report.non_generating += 1
        elif verdict.budget_exceeded:
            report.unknown.append(verdict.connection_set)
        elif verdict.is_grr:
            report.witnesses.append(verdict.connection_set)
            if stop_after is not None and len(report.witnesses) >= stop_after:
                report.stopped_early = report.examined < report.candidates
                return True
        return False

    if workers <= 1:
        for s in candidates:
            if absorb(certify(table, s, node_budget, time_budget)):
                break
        return report
    chunk = max(1, math.ceil(len(candidates) / (4 * workers)))
    batches = [candidates[i : i + chunk] for i in range(0, len(candidates), chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for verdicts in pool.map(_certify_batch, [(table, b, node_budget, time_budget) for b in batches]):
            for v in verdicts:
                if absorb(v):
                    pool.shutdown(cancel_futures=True)
                    return report
    return report


def exhaustive_grr_search(table: ElementTable, shape: str = "mixed", x_order: int | None = None,
                          stop_after: int | None = None, node_budget=None, time_budget=None,
                          workers: int = 1) -> SearchReport:
    """All cubic GRR connection sets of one shape, or a certified empty result.

    ``shape`` is ``"mixed"`` ({x, x^-1, y}) or ``"three-involutions"``;
    ``x_order`` restricts the mixed shape to one element order.
    """
    if shape == "mixed":
        cands = mixed_candidates(table, x_order)
    elif shape in ("three-involutions", "triples", "involutions"):
        shape = "three-involutions"
        cands = involution_triples(table)
    else:
        raise ValueError(f"unknown search shape {shape!r}")
    return run_search(table, cands, shape, stop_after, node_budget, time_budget, workers)


def find_grr_for_x(table: ElementTable, x, node_budget=None, time_budget=None) -> GrrVerdict | None:
    """First involution y (in table order) making {x, x^-1, y} a GRR."""
    for y in table.involutions:
        v = is_grr(table, x, int(y), node_budget, time_budget)
        if v.is_grr:
            return v
    return None


# ---------------------------------------------------------------------------
# estimating P(x)


@dataclass(frozen=True)
class Estimate:
    mode: str
    successes: int
    trials: int
    exact: Fraction | None = None
    interval: tuple[float, float] | None = None
    unknown: int = 0

    @property
    def value(self) -> float:
        return self.successes / self.trials

    def as_dict(self) -> dict:
        d = {"mode": self.mode, "successes": self.successes, "trials": self.trials, "unknown": self.unknown}
        if self.exact is not None:
            d["exact"] = str(self.exact)
        if self.interval is not None:
            d["wilson95"] = [self.interval[0], self.interval[1]]
        return d


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    den = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    # rounding keeps the exact endpoints 0 and 1 free of float residue
    return max(0.0, round(centre - half, 12)), min(1.0, round(centre + half, 12))


def estimate_p(table: ElementTable, x, mode: str = "exhaustive", samples: int | None = None,
               rng: np.random.Generator | None = None, node_budget=None, time_budget=None) -> Estimate:
    """Proportion of involutions y for which {x, x^-1, y} gives a GRR.

    ``exhaustive`` loops over every involution and returns the exact fraction;
    ``sample`` draws ``samples`` uniform involutions and adds a 95% Wilson interval.
    """
    xi = _as_index(table, x)
    if table.element_order(xi) <= 2:
        raise ConnectionSetError("x must have order greater than 2")
    if mode == "exhaustive":
        ys = [int(y) for y in table.involutions]
    elif mode == "sample":
        if not samples or samples <= 0:
            raise ValueError("sample mode needs a positive sample count")
        rng = np.random.default_rng(0) if rng is None else rng
        inv = table.involutions
        ys = [int(inv[k]) for k in rng.integers(len(inv), size=samples)]
    else:
        raise ValueError(f"unknown estimation mode {mode!r}")
    hits = unknown = 0
    for y in ys:
        v = is_grr(table, xi, y, node_budget, time_budget)
        if v.budget_exceeded:
            unknown += 1
        elif v.is_grr:
            hits += 1
    if mode == "exhaustive":
        return Estimate(mode, hits, len(ys), Fraction(hits, len(ys)), unknown=unknown)
    return Estimate(mode, hits, len(ys), interval=wilson_interval(hits, len(ys)), unknown=unknown)

"""Automorphism group order of a simple undirected graph.

Individualization-refinement: colour refinement to an equitable partition,
then a search tree that individualizes one vertex of the first smallest
non-trivial cell per level.  |Aut| is the product over levels of the orbit
length of the first path's vertex under the pointwise stabilizer of the
earlier path vertices.  Orbit membership of a candidate ``w`` is decided by
searching the subtree below ``w`` for a leaf equivalent to the first leaf;
automorphisms found on the way (or supplied up front) prune whole orbits.

Colour labels are always produced by sorting invariant data, so two vertices
related by an automorphism that fixes the individualized vertices receive
identical labels.  That makes leaf comparison a relabelling check.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components


class BudgetExceeded(RuntimeError):
    """The node or wall-clock budget ran out before the search finished."""


@dataclass
class Graph:
    """Padded neighbour lists: row ``v`` lists the neighbours of ``v``, then -1s."""

    adjacency: np.ndarray

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return (self.adjacency >= 0).sum(axis=1)

    def edges(self) -> np.ndarray:
        """Each undirected edge once, as rows (u, v) with u < v."""
        u = np.repeat(np.arange(self.n), self.adjacency.shape[1])
        v = self.adjacency.ravel()
        keep = (v >= 0) & (u < v)
        return np.stack([u[keep], v[keep]], axis=1)

    def edge_count(self) -> int:
        return len(self.edges())

    def csr(self) -> sparse.csr_matrix:
        e = self.edges()
        data = np.ones(2 * len(e), dtype=np.int8)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        k, _ = connected_components(self.csr(), directed=False)
        return k == 1

    def relabel(self, perm: np.ndarray) -> "Graph":
        """Graph with vertex ``v`` renamed ``perm[v]``."""
        perm = np.asarray(perm)
        e = self.edges()
        return graph_from_edges(self.n, perm[e])


def graph_from_edges(n: int, edges) -> Graph:
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(edges) and (edges.min() < 0 or edges.max() >= n):
        raise ValueError("edge endpoint out of range")
    if np.any(edges[:, 0] == edges[:, 1]):
        raise ValueError("loops are not allowed")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges.tolist():
        nbrs[u].add(v)
        nbrs[v].add(u)
    width = max((len(s) for s in nbrs), default=0)
    adj = np.full((n, max(width, 1)), -1, dtype=np.int64)
    for v, s in enumerate(nbrs):
        adj[v, : len(s)] = sorted(s)
    return Graph(adj)


# ---------------------------------------------------------------------------
# refinement


def _relabel_rows(M: np.ndarray) -> np.ndarray:
    """Dense labels 0..k-1 ordering the rows of M lexicographically."""
    order = np.lexsort(M.T[::-1])
    S = M[order]
    change = np.any(S[1:] != S[:-1], axis=1)
    labels = np.empty(len(M), dtype=np.int64)
    labels[order] = np.concatenate([[0], np.cumsum(change)])
    return labels


def distance_signature(graph: Graph, radius: int = 4) -> np.ndarray:
    """Per-vertex (degree, |B_1|, ..., |B_radius|) ball sizes as a dense colouring."""
    A = graph.csr().astype(bool)
    ball = sparse.identity(graph.n, dtype=bool, format="csr")
    cols = [graph.degrees]
    for _ in range(radius):
        ball = (ball + ball @ A).astype(bool)
        cols.append(np.diff(ball.indptr))
    return _relabel_rows(np.stack(cols, axis=1))


class AutomorphismSearch:
    def __init__(self, graph: Graph, known=(), node_budget: int | None = None,
                 time_budget: float | None = None, signature_radius: int = 4):
        self.graph = graph
        self.n = graph.n
        self.adj = graph.adjacency
        self.mask = self.adj < 0
        e = graph.edges()
        both = np.concatenate([e, e[:, ::-1]])
        self.edge_codes = np.sort(both[:, 0] * self.n + both[:, 1])
        self.node_budget = node_budget
        self.deadline = None if time_budget is None else time.monotonic() + time_budget
        self.nodes = 0
        self.generators: list[np.ndarray] = []
        for g in known:
            g = np.asarray(g, dtype=np.int64)
            if self.is_automorphism(g):
                self.generators.append(g)
        self.radius = signature_radius

    # -- primitives ---------------------------------------------------------

    def _tick(self) -> None:
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            raise BudgetExceeded(f"node budget {self.node_budget} exceeded")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded("wall-clock budget exceeded")

    def refine(self, colors: np.ndarray) -> np.ndarray:
        self._tick()
        colors = _relabel_rows(colors[:, None])
        count = int(colors.max()) + 1 if self.n else 0
        while count < self.n:
            nc = np.where(self.mask, -1, colors[self.adj])
            nc.sort(axis=1)
            new = _relabel_rows(np.column_stack([colors, nc]))
            new_count = int(new.max()) + 1
            colors = new
            if new_count == count:
                break
            count = new_count
        return colors

    @staticmethod
    def individualize(colors: np.ndarray, v: int) -> np.ndarray:
        out = colors * 2 + 1
        out[v] -= 1
        return out

    @staticmethod
    def target_cell(colors: np.ndarray) -> np.ndarray | None:
        counts = np.bincount(colors)
        big = np.flatnonzero(counts > 1)
        if len(big) == 0:
            return None
        c = big[np.argmin(counts[big])]
        return np.flatnonzero(colors == c)

    def is_automorphism(self, perm: np.ndarray) -> bool:
        if perm.shape != (self.n,):
            return False
        src, dst = np.divmod(self.edge_codes, self.n)
        mapped = np.sort(perm[src] * self.n + perm[dst])
        return bool(np.array_equal(mapped, self.edge_codes))

    def _orbits(self, gens: list[np.ndarray]) -> np.ndarray:
        if not gens:
            return np.arange(self.n)
        rows = np.concatenate([np.arange(self.n)] * len(gens))
        cols = np.concatenate(gens)
        M = sparse.csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(self.n, self.n))
        _, labels = connected_components(M, directed=False)
        return labels

    # -- search -------------------------------------------------------------

    def _leaf_search(self, colors: np.ndarray, v: int, depth: int):
        """Automorphism mapping the first leaf into the subtree below (colors, v), or None."""
        child = self.refine(self.individualize(colors, v))
        if not np.array_equal(np.bincount(child), self.path_invariants[depth + 1]):
            return None
        if depth + 1 == len(self.path):
            gamma = np.empty(self.n, dtype=np.int64)
            gamma[child] = np.arange(self.n)
            gamma = gamma[self.first_leaf]
            return gamma if self.is_automorphism(gamma) else None
        for u in self.target_cell(child):
            found = self._leaf_search(child, int(u), depth + 1)
            if found is not None:
                return found
        return None

    def run(self) -> int:
        start = distance_signature(self.graph, self.radius) if self.radius else np.zeros(self.n, np.int64)
        colors = self.refine(start)
        self.path: list[int] = []
        self.path_colors: list[np.ndarray] = []
        self.path_cells: list[np.ndarray] = []
        self.path_invariants = [np.bincount(colors)]
        while True:
            cell = self.target_cell(colors)
            if cell is None:
                break
            v = int(cell[0])
            self.path.append(v)
            self.path_colors.append(colors)
            self.path_cells.append(cell)
            colors = self.refine(self.individualize(colors, v))
            self.path_invariants.append(np.bincount(colors))
        self.first_leaf = colors

        order = 1
        for i in reversed(range(len(self.path))):
            fixed = self.path[:i]
            gens = [g for g in self.generators if all(g[p] == p for p in fixed)]
            labels = self._orbits(gens)
            v = self.path[i]
            failed: list[int] = []  # one vertex per orbit known to be outside v's orbit
            for w in self.path_cells[i]:
                w = int(w)
                if labels[w] == labels[v] or any(labels[w] == labels[u] for u in failed):
                    continue
                gamma = self._leaf_search(self.path_colors[i], w, i)
                if gamma is None:
                    failed.append(w)
                else:
                    self.generators.append(gamma)
                    gens.append(gamma)
                    labels = self._orbits(gens)
            cell = self.path_cells[i]
            order *= int(np.count_nonzero(labels[cell] == labels[v]))
        return order


def aut_order(graph: Graph, known=(), node_budget: int | None = None,
              time_budget: float | None = None) -> int:
    """Exact |Aut(graph)|; raises :class:`BudgetExceeded` instead of guessing."""
    return AutomorphismSearch(graph, known, node_budget, time_budget).run()


def aut_order_bruteforce(graph: Graph) -> int:
    """Count vertex permutations preserving the edge set (tiny graphs only)."""
    import itertools

    if graph.n > 9:
        raise ValueError("brute force is limited to 9 vertices")
    search = AutomorphismSearch(graph, signature_radius=0)
    return sum(search.is_automorphism(np.array(p)) for p in itertools.permutations(range(graph.n)))

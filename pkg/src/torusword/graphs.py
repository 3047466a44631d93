"""Rauzy graphs, cycle spaces and conservative flows.

The order-n Rauzy graph of a word has the length-n factors as vertices and
one edge per length-(n+1) factor, from its length-n prefix to its length-n
suffix.  The module also handles arbitrary directed multigraphs: cycle
vectors, fundamental cycle bases from a spanning forest, conservation
defects of edge functions, and decomposition of conservative flows in the
fundamental basis (for a connected graph the flow space equals the cycle
space, of dimension |E| - |V| + 1).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .words import (
    DEFAULT_POLICY,
    LazyWord,
    StabilizationPolicy,
    complexity_entry,
    factor_counts,
)


class GraphError(ValueError):
    """Invalid graph or argument."""


@dataclass(frozen=True)
class Edge:
    key: str
    source: str
    target: str
    weight: float | None = None
    count: int | None = None


class RauzyGraph:
    """Directed multigraph with named edges (self-loops and parallels allowed)."""

    def __init__(
        self,
        vertices,
        edges,
        order: int | None = None,
        provisional: bool = False,
        prefix_len: int | None = None,
    ):
        self.vertices = sorted(vertices)
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise GraphError("duplicate vertices")
        self.edges = list(edges)
        keys = [e.key for e in self.edges]
        if len(set(keys)) != len(keys):
            raise GraphError("duplicate edge keys")
        for e in self.edges:
            if e.source not in vset or e.target not in vset:
                raise GraphError(f"edge {e.key} touches an unknown vertex")
        self.order = order
        self.provisional = provisional
        self.prefix_len = prefix_len
        self._out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        self._in: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            self._out[e.source].append(e)
            self._in[e.target].append(e)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def out_edges(self, v: str) -> list[Edge]:
        return list(self._out[v])

    def in_edges(self, v: str) -> list[Edge]:
        return list(self._in[v])

    def edge(self, key: str) -> Edge:
        for e in self.edges:
            if e.key == key:
                return e
        raise GraphError(f"no edge {key!r}")

    def components(self) -> list[set[str]]:
        """Weakly connected components."""
        seen: set[str] = set()
        comps = []
        for start in self.vertices:
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            while stack:
                v = stack.pop()
                for e in self._out[v] + self._in[v]:
                    for nxt in (e.source, e.target):
                        if nxt not in comp:
                            comp.add(nxt)
                            stack.append(nxt)
            seen |= comp
            comps.append(comp)
        return comps

    @property
    def n_components(self) -> int:
        return len(self.components())

    def counts_function(self) -> dict[str, float]:
        return {e.key: float(e.count) for e in self.edges}

    def weights_function(self) -> dict[str, float]:
        return {e.key: float(e.weight) for e in self.edges}

    def to_dot(self, with_weights: bool = False) -> str:
        lines = ["digraph rauzy {"]
        for v in self.vertices:
            lines.append(f'  "{v}";')
        for e in self.edges:
            label = e.key
            if with_weights and e.weight is not None:
                label = f"{e.key} ({e.weight:.6g})"
            lines.append(f'  "{e.source}" -> "{e.target}" [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def stats_row(self) -> dict:
        c = self.n_components
        dim = self.n_edges - self.n_vertices + c
        return {
            "n": self.order,
            "vertices": self.n_vertices,
            "edges": self.n_edges,
            "components": c,
            "dimZ": dim,
            "chi": dim,
        }


def stats_csv(graphs, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["n", "vertices", "edges", "components", "dimZ", "chi"])
    for g in graphs:
        row = g.stats_row()
        writer.writerow([row[k] for k in ("n", "vertices", "edges", "components", "dimZ", "chi")])


def build_rauzy_graph(
    w: LazyWord, n: int, policy: StabilizationPolicy = DEFAULT_POLICY
) -> RauzyGraph:
    """Order-n Rauzy graph of a lazy word.

    The prefix length follows the stabilization policy applied to the
    length-(n+1) factor count; if either factor set is still growing the
    graph is returned with ``provisional=True``.  Edge weights are the
    empirical frequencies count/(L-n); raw counts are kept alongside.
    """
    if n < 1:
        raise GraphError("order must be >= 1")
    ent_n = complexity_entry(w, n, policy)
    ent_edge = complexity_entry(w, n + 1, policy)
    L = max(ent_n.prefix_len, ent_edge.prefix_len)
    counts_n1 = factor_counts(w, n + 1, L)
    vertices = {str(f) for f in factor_counts(w, n, L)}
    edges = []
    denom = L - n
    for f, c in sorted(counts_n1.items(), key=lambda kv: str(kv[0])):
        edges.append(
            Edge(
                key=str(f),
                source=str(f[:n]),
                target=str(f[1:]),
                weight=c / denom,
                count=c,
            )
        )
    return RauzyGraph(
        vertices,
        edges,
        order=n,
        provisional=not (ent_n.stabilized and ent_edge.stabilized),
        prefix_len=L,
    )


def four_vertex_example() -> RauzyGraph:
    """The 4-vertex, 6-edge worked example (dim Z = 6 - 4 + 1 = 3)."""
    edges = [
        Edge("e1", "1", "2"),
        Edge("e2", "2", "3"),
        Edge("e3", "3", "4"),
        Edge("e4", "4", "1"),
        Edge("e5", "2", "4"),
        Edge("e6", "1", "3"),
    ]
    return RauzyGraph(["1", "2", "3", "4"], edges)


def conservation_defect(G: RauzyGraph, f: dict[str, float]) -> dict[str, float]:
    """Per-vertex out-sum minus in-sum; f is conservative iff all zero."""
    for e in G.edges:
        if e.key not in f:
            raise GraphError(f"edge function misses edge {e.key}")
    defect = {}
    for v in G.vertices:
        out = sum(f[e.key] for e in G._out[v])
        inn = sum(f[e.key] for e in G._in[v])
        defect[v] = out - inn
    return defect


@dataclass(frozen=True)
class CycleVector:
    """Edge coefficients in {-1, 0, +1} induced by an oriented cycle."""

    coefficients: dict[str, int]

    def as_vector(self, edge_order: list[str]) -> np.ndarray:
        return np.array([self.coefficients.get(k, 0) for k in edge_order], dtype=float)


def cycle_vector(G: RauzyGraph, walk: list[str]) -> CycleVector:
    """Cycle vector of a closed vertex walk (first vertex = last vertex).

    Each consecutive pair must be joined by an edge in one direction or the
    other; forward traversal contributes +1, backward -1.  With parallel
    edges the lexicographically smallest key is used.
    """
    if len(walk) < 2 or walk[0] != walk[-1]:
        raise GraphError("walk must be closed")
    coeffs: dict[str, int] = {}
    for a, b in zip(walk, walk[1:]):
        fwd = sorted((e.key for e in G._out.get(a, []) if e.target == b))
        bwd = sorted((e.key for e in G._out.get(b, []) if e.target == a))
        if fwd:
            coeffs[fwd[0]] = coeffs.get(fwd[0], 0) + 1
        elif bwd:
            coeffs[bwd[0]] = coeffs.get(bwd[0], 0) - 1
        else:
            raise GraphError(f"no edge between {a} and {b}")
    return CycleVector({k: v for k, v in coeffs.items() if v != 0})


@dataclass
class CycleSpaceBasis:
    """Fundamental cycles from a spanning forest, one per non-tree edge."""

    cycles: list[CycleVector]
    dimension: int
    tree_edges: list[str]
    non_tree_edges: list[str]
    edge_order: list[str] = field(default_factory=list)

    def matrix(self) -> np.ndarray:
        return np.column_stack([c.as_vector(self.edge_order) for c in self.cycles]) if self.cycles else np.zeros((len(self.edge_order), 0))


def cycle_space(G: RauzyGraph) -> CycleSpaceBasis:
    """Deterministic fundamental cycle basis.

    Breadth-first forest rooted at the lexicographically smallest vertex of
    each component; non-tree edges taken in key order.  For each non-tree
    edge u -> v the cycle is the edge (+1) followed by the tree path from v
    back to u (tree edges +1 when traversed along their orientation).
    Dimension = |E| - |V| + #components.
    """
    parent: dict[str, tuple[str, Edge, int] | None] = {}
    depth: dict[str, int] = {}
    tree_edges: list[str] = []
    edge_sorted = sorted(G.edges, key=lambda e: e.key)
    for root in G.vertices:  # vertices sorted, so roots are lex-smallest
        if root in parent:
            continue
        parent[root] = None
        depth[root] = 0
        frontier = [root]
        while frontier:
            nxt = []
            for v in frontier:
                for e in sorted(G._out[v] + G._in[v], key=lambda e: e.key):
                    other, sign = (e.target, 1) if e.source == v else (e.source, -1)
                    if other in parent:
                        continue
                    parent[other] = (v, e, sign)
                    depth[other] = depth[v] + 1
                    tree_edges.append(e.key)
                    nxt.append(other)
            frontier = nxt
    tree_set = set(tree_edges)
    non_tree = [e for e in edge_sorted if e.key not in tree_set]

    def path_to_ancestor_steps(a: str, b: str):
        """±1 steps of the tree path a -> b (same component)."""
        steps: list[tuple[str, int]] = []
        back: list[tuple[str, int]] = []
        x, y = a, b
        while depth[x] > depth[y]:
            p, e, sign = parent[x]
            steps.append((e.key, -sign))  # going child -> parent
            x = p
        while depth[y] > depth[x]:
            p, e, sign = parent[y]
            back.append((e.key, sign))  # later traversed parent -> child
            y = p
        while x != y:
            p, e, sign = parent[x]
            steps.append((e.key, -sign))
            x = p
            q, e2, sign2 = parent[y]
            back.append((e2.key, sign2))
            y = q
        return steps + back[::-1]

    cycles = []
    for e in non_tree:
        coeffs = {e.key: 1}
        for key, sign in path_to_ancestor_steps(e.target, e.source):
            coeffs[key] = coeffs.get(key, 0) + sign
        cycles.append(CycleVector({k: v for k, v in coeffs.items() if v != 0}))
    dim = G.n_edges - G.n_vertices + G.n_components
    basis = CycleSpaceBasis(
        cycles=cycles,
        dimension=dim,
        tree_edges=tree_edges,
        non_tree_edges=[e.key for e in non_tree],
        edge_order=[e.key for e in edge_sorted],
    )
    if len(cycles) != dim:
        raise GraphError("fundamental cycle count does not match |E|-|V|+c")
    return basis


@dataclass
class Decomposition:
    ok: bool
    coefficients: np.ndarray
    residual: float
    basis: CycleSpaceBasis


def decompose_in_cycles(
    G: RauzyGraph,
    f: dict[str, float],
    tol: float = 1e-9,
    basis: CycleSpaceBasis | None = None,
) -> Decomposition:
    """Least-squares decomposition of an edge function in the fundamental basis.

    Succeeds (ok=True) when the residual stays below tol, which for a
    connected graph happens exactly when f is conservative within tol.
    """
    if basis is None:
        basis = cycle_space(G)
    fvec = np.array([f[k] for k in basis.edge_order], dtype=float)
    A = basis.matrix()
    if A.shape[1] == 0:
        residual = float(np.max(np.abs(fvec))) if fvec.size else 0.0
        return Decomposition(residual < tol, np.zeros(0), residual, basis)
    coeffs, *_ = np.linalg.lstsq(A, fvec, rcond=None)
    residual = float(np.max(np.abs(A @ coeffs - fvec)))
    return Decomposition(residual < tol, coeffs, residual, basis)


@dataclass(frozen=True)
class EulerRow:
    n: int
    p_n: int
    p_n1: int
    components: int
    chi: int
    stabilized: bool
    chi_ge_k: bool
    chi_ge_k_plus_1: bool


def euler_characteristic_check(
    w: LazyWord, k: int, n_max: int, policy: StabilizationPolicy = DEFAULT_POLICY
) -> list[EulerRow]:
    """chi = p(n+1) - p(n) + c for each order n, compared against k.

    chi equals dim Z(G_n); the published bound is chi >= k while the
    complexity increment bound implies chi >= k+1 for connected graphs, so
    both comparisons are recorded.
    """
    rows = []
    for n in range(1, n_max + 1):
        G = build_rauzy_graph(w, n, policy)
        c = G.n_components
        chi = G.n_edges - G.n_vertices + c
        rows.append(
            EulerRow(
                n=n,
                p_n=G.n_vertices,
                p_n1=G.n_edges,
                components=c,
                chi=chi,
                stabilized=not G.provisional,
                chi_ge_k=chi >= k,
                chi_ge_k_plus_1=chi >= k + 1,
            )
        )
    return rows

"""Immutable k-uniform hypergraphs, vertex stars and the ``.hg`` text format.

Edges are stored as an ``(m, k)`` int64 array, each row strictly increasing,
rows in colexicographic order (compare largest vertex first). The position of
a row is its edge id. Vertices are 0-based everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._accel import kernels
from .errors import HypergraphError


@dataclass(frozen=True, eq=False)
class Hypergraph:
    n: int
    k: int
    edges: np.ndarray

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def _csr(self):
        return kernels.build_stars(self.edges, self.n)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self._csr[0])

    def star_ids(self, v: int) -> np.ndarray:
        indptr, indices = self._csr
        return indices[indptr[v]:indptr[v + 1]]

    def edge_list(self) -> list[list[int]]:
        return self.edges.tolist()

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.n == other.n and self.k == other.k
                and np.array_equal(self.edges, other.edges))

    def __hash__(self):
        return hash((self.n, self.k, self.edges.tobytes()))

    def __repr__(self):
        return f"Hypergraph(n={self.n}, k={self.k}, m={self.m})"


@dataclass(frozen=True)
class VertexStar:
    vertex: int
    edge_ids: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.edge_ids)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _from_canonical(n: int, k: int, edges: np.ndarray) -> Hypergraph:
    """Wrap an already canonical edge array without re-validating it."""
    edges = np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, k)
    return Hypergraph(n, k, _frozen(edges))


def colex_order(edges: np.ndarray) -> np.ndarray:
    """Permutation sorting rows (each ascending) into colexicographic order."""
    if edges.shape[0] == 0:
        return np.arange(0)
    # lexsort treats the last key as primary: the largest vertex
    return np.lexsort(edges.T)


def new_hypergraph(n: int, k: int, raw_edges) -> Hypergraph:
    """Validate and canonicalize an edge list.

    Raises HypergraphError on wrong arity, a repeated vertex inside an edge,
    an out-of-range vertex or a duplicate edge; the message names the edge.
    """
    if int(n) != n or n < 1:
        raise HypergraphError(f"vertex count must be a positive integer, got {n!r}")
    if int(k) != k or k < 2:
        raise HypergraphError(f"uniformity must be an integer >= 2, got {k!r}")
    n, k = int(n), int(k)
    rows = []
    for raw in raw_edges:
        edge = [int(v) for v in raw]
        if len(edge) != k:
            raise HypergraphError(f"edge {list(raw)} has {len(edge)} vertices, expected {k}")
        if len(set(edge)) != k:
            raise HypergraphError(f"edge {list(raw)} repeats a vertex")
        for v in edge:
            if not 0 <= v < n:
                raise HypergraphError(f"edge {list(raw)}: vertex {v} out of range [0, {n})")
        rows.append(sorted(edge))
    if rows and k > n:
        raise HypergraphError(f"k={k} > n={n} admits no edges")
    edges = np.array(rows, dtype=np.int64).reshape(-1, k)
    edges = edges[colex_order(edges)]
    if edges.shape[0] > 1:
        dup = np.flatnonzero(np.all(edges[1:] == edges[:-1], axis=1))
        if dup.size:
            raise HypergraphError(f"duplicate edge {edges[dup[0]].tolist()}")
    return _from_canonical(n, k, edges)


def _check_vertex(H: Hypergraph, v) -> int:
    if int(v) != v or not 0 <= v < H.n:
        raise HypergraphError(f"vertex {v!r} out of range [0, {H.n})")
    return int(v)


def star(H: Hypergraph, v: int) -> VertexStar:
    v = _check_vertex(H, v)
    return VertexStar(v, tuple(H.star_ids(v).tolist()))


def codegree(H: Hypergraph, u: int, v: int) -> int:
    """Number of edges containing both u and v (u != v)."""
    u, v = _check_vertex(H, u), _check_vertex(H, v)
    if u == v:
        raise HypergraphError("codegree is defined for distinct vertices only")
    return int(np.intersect1d(H.star_ids(u), H.star_ids(v), assume_unique=True).size)


def parse_hg(text: str) -> Hypergraph:
    """Parse the ``.hg`` format: ``#`` comments, header ``n k m``, then m edge lines."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise HypergraphError("missing header line 'n k m'")
    header = lines[0].split()
    try:
        n, k, m = (int(x) for x in header)
    except ValueError:
        raise HypergraphError(f"malformed header {lines[0]!r}, expected 'n k m'") from None
    if m < 0:
        raise HypergraphError(f"negative edge count in header {lines[0]!r}")
    body = lines[1:]
    if len(body) != m:
        raise HypergraphError(f"header declares {m} edges but {len(body)} edge lines follow")
    raw = []
    for ln in body:
        try:
            raw.append([int(x) for x in ln.split()])
        except ValueError:
            raise HypergraphError(f"non-integer token in edge line {ln!r}") from None
    return new_hypergraph(n, k, raw)


def serialize_hg(H: Hypergraph) -> str:
    out = [f"{H.n} {H.k} {H.m}"]
    out.extend(" ".join(map(str, e)) for e in H.edges.tolist())
    return "\n".join(out) + "\n"


def read_hg(path) -> Hypergraph:
    with open(path) as fh:
        return parse_hg(fh.read())


def write_hg(H: Hypergraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_hg(H))

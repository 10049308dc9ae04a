"""Star-dependent matrices and their contraction over the unit partition.

A matrix M is star-dependent when M[u, v] = F(star(u), star(v)) for u != v and
M[u, u] = G(star(u)). Rows of two vertices in one unit then agree up to swapping
those two coordinates, which makes the unit partition equitable.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .collisions import UnitPartition
from .errors import CapacityError, KernelError, PartitionError, PreconditionError
from .hypergraph import Hypergraph

MAX_DENSE_N = 4096

Star = tuple  # sorted edge ids


@dataclass(frozen=True)
class StarKernel:
    """F (``offdiag``) and G (``diag``) as functions of stars.

    ``dense``, when given, builds the whole matrix from the codegree matrix and
    degree vector; it must agree exactly with the entrywise definition.
    """
    name: str
    offdiag: Callable[[Star, Star, Hypergraph], float]
    diag: Callable[[Star, Hypergraph], float]
    symmetric: bool
    dense: Callable[[np.ndarray, np.ndarray, Hypergraph], np.ndarray] | None = None


def _common(a: Star, b: Star) -> int:
    return len(set(a).intersection(b))


def _codegree_dense(C, deg, H):
    M = C.astype(np.float64)
    np.fill_diagonal(M, deg)
    return M


def _banerjee_dense(C, deg, H):
    M = C / (H.k - 1)
    np.fill_diagonal(M, 0.0)
    return M


def _laplacian_dense(C, deg, H):
    M = -C / (H.k - 1)
    np.fill_diagonal(M, deg.astype(np.float64))
    return M


def _randomwalk_dense(C, deg, H):
    scale = ((H.k - 1) * deg)[:, None]
    M = np.divide(C, scale, out=np.zeros(C.shape), where=scale > 0)
    np.fill_diagonal(M, 0.0)
    return M


def _randomwalk_offdiag(a, b, H):
    if not a:
        return 0.0
    return _common(a, b) / ((H.k - 1) * len(a))


KERNELS: dict[str, StarKernel] = {
    "codegree": StarKernel(
        "codegree", lambda a, b, H: float(_common(a, b)), lambda a, H: float(len(a)),
        True, _codegree_dense),
    "banerjee": StarKernel(
        "banerjee", lambda a, b, H: _common(a, b) / (H.k - 1), lambda a, H: 0.0,
        True, _banerjee_dense),
    "laplacian": StarKernel(
        "laplacian", lambda a, b, H: -_common(a, b) / (H.k - 1), lambda a, H: float(len(a)),
        True, _laplacian_dense),
    "randomwalk": StarKernel(
        "randomwalk", _randomwalk_offdiag, lambda a, H: 0.0, False, _randomwalk_dense),
}


def get_kernel(name: str) -> StarKernel:
    try:
        return KERNELS[name]
    except KeyError:
        raise KernelError(f"unknown kernel {name!r}; choose from {sorted(KERNELS)}") from None


@dataclass(frozen=True, eq=False)
class StarMatrix:
    n: int
    entries: np.ndarray
    kernel_name: str


@dataclass(frozen=True, eq=False)
class UnitContraction:
    parts: list[tuple[int, ...]]
    beta: np.ndarray

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(p) for p in self.parts], dtype=np.float64)


def codegree_matrix(H: Hypergraph) -> np.ndarray:
    """Integer matrix of |star(u) & star(v)|; the diagonal holds degrees."""
    C = np.zeros((H.n, H.n), dtype=np.int64)
    if H.m:
        rows = np.repeat(H.edges, H.k, axis=1).ravel()
        cols = np.tile(H.edges, (1, H.k)).ravel()
        np.add.at(C, (rows, cols), 1)
    return C


def build_matrix(H: Hypergraph, kernel: StarKernel | str, entrywise: bool = False) -> StarMatrix:
    """Dense star-dependent matrix; ``entrywise`` forces direct evaluation of F and G."""
    if isinstance(kernel, str):
        kernel = get_kernel(kernel)
    if H.n > MAX_DENSE_N:
        raise CapacityError(f"dense matrices are limited to n <= {MAX_DENSE_N}, got {H.n}")
    if kernel.dense is not None and not entrywise:
        C = codegree_matrix(H)
        M = kernel.dense(C, np.diag(C).copy(), H)
    else:
        stars = [tuple(H.star_ids(v).tolist()) for v in range(H.n)]
        M = np.empty((H.n, H.n))
        for u in range(H.n):
            try:
                M[u, u] = kernel.diag(stars[u], H)
                for v in range(H.n):
                    if v != u:
                        M[u, v] = kernel.offdiag(stars[u], stars[v], H)
            except (ArithmeticError, ValueError, TypeError) as exc:
                raise KernelError(f"kernel {kernel.name!r} failed at vertex {u}: {exc}") from exc
    M.flags.writeable = False
    return StarMatrix(H.n, M, kernel.name)


def _check_cover(n: int, parts) -> None:
    seen = np.zeros(n, dtype=np.int64)
    for part in parts:
        seen[list(part)] += 1
    if seen.size != n or not np.all(seen == 1):
        raise PartitionError("partition does not cover every vertex exactly once")


def part_sums(M: np.ndarray, parts) -> np.ndarray:
    """S[u, j] = sum of M[u, w] over w in part j.

    Sums over parts with two or more vertices use math.fsum, which is correctly
    rounded and so independent of summation order.
    """
    S = np.empty((M.shape[0], len(parts)))
    for j, part in enumerate(parts):
        if len(part) == 1:
            S[:, j] = M[:, part[0]]
        else:
            block = M[:, list(part)]
            S[:, j] = [math.fsum(row) for row in block.tolist()]
    return S


def verify_equitable(M: StarMatrix, P: UnitPartition, tol: float = 0.0) -> tuple[bool, float]:
    parts = P.parts()
    _check_cover(M.n, parts)
    S = part_sums(M.entries, parts)
    dev = 0.0
    for part in parts:
        if len(part) > 1:
            block = S[list(part)]
            dev = max(dev, float(np.max(np.abs(block - block[0]))))
    return dev <= tol, dev


def quotient(M: StarMatrix, P: UnitPartition, tol: float = 0.0) -> UnitContraction:
    parts = P.parts()
    _check_cover(M.n, parts)
    S = part_sums(M.entries, parts)
    for part in parts:
        if len(part) > 1:
            dev = float(np.max(np.abs(S[list(part)] - S[part[0]])))
            if dev > tol:
                raise PartitionError(f"partition is not equitable (deviation {dev:g} in part {part})")
    beta = S[[part[0] for part in parts]]
    beta.flags.writeable = False
    return UnitContraction(parts, beta)


def symmetrized_quotient(Q: UnitContraction) -> np.ndarray:
    """D^(1/2) beta D^(-1/2) with D = diag(part sizes); symmetric for symmetric kernels."""
    root = np.sqrt(Q.sizes)
    return root[:, None] * Q.beta / root[None, :]


def lift(P: UnitPartition, f) -> np.ndarray:
    parts = P.parts()
    f = np.asarray(f)
    if f.shape != (len(parts),):
        raise PreconditionError(f"vector has shape {f.shape}, expected ({len(parts)},)")
    return f[P.part_index()]


def local_basis(P: UnitPartition) -> list[np.ndarray]:
    """Vectors 1_{w0} - 1_{wi} for every nontrivial unit {w0 < w1 < ...}."""
    basis = []
    for unit in P.nontrivial():
        w0 = unit.vertices[0]
        for w in unit.vertices[1:]:
            x = np.zeros(P.n, dtype=np.int64)
            x[w0], x[w] = 1, -1
            basis.append(x)
    return basis


def unit_eigenvalues(M: StarMatrix, P: UnitPartition) -> list[float]:
    """M[u, u] - M[u, v] for each nontrivial unit, with multiplicity |W| - 1."""
    A = M.entries
    eigs = []
    for unit in P.nontrivial():
        vs = unit.vertices
        values = {float(A[u, u] - A[u, v]) for u in vs for v in vs if u != v}
        if len(values) != 1:
            raise PreconditionError(
                f"unit {vs} gives differing values {sorted(values)}; matrix is not star-dependent")
        eigs.extend([values.pop()] * (len(vs) - 1))
    return sorted(eigs)


def _csv_rows(A: np.ndarray) -> str:
    buf = io.StringIO()
    for row in A.tolist():
        buf.write(",".join(f"{x:.17g}" for x in row))
        buf.write("\n")
    return buf.getvalue()


def matrix_to_csv(M: StarMatrix) -> str:
    return _csv_rows(M.entries)


def quotient_to_csv(Q: UnitContraction) -> str:
    header = "# parts: " + " | ".join(" ".join(map(str, p)) for p in Q.parts)
    return header + "\n" + _csv_rows(Q.beta)


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return np.array([[float(x) for x in ln.split(",")] for ln in rows])

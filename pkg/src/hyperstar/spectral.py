"""Eigenvalues of star-dependent matrices and the global/local spectral split.

Spec(M) is the union of Spec of the unit contraction (global part, carried by
unit-constant vectors) and the unit-eigenvalues (local part, carried by
differences 1_u - 1_v inside units).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import kernels
from .collisions import UnitPartition, build_partition
from .errors import CapacityError, ConvergenceError, KernelError, PreconditionError
from .hypergraph import Hypergraph
from .star_matrix import (MAX_DENSE_N, StarKernel, StarMatrix, build_matrix, get_kernel,
                          quotient, symmetrized_quotient, unit_eigenvalues, verify_equitable)

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
MATCH_ABS = 1e-8
MATCH_REL = 1e-10


def symmetric_eigenvalues(A, backend=None) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.

    Iterates full sweeps until the off-diagonal Frobenius norm drops to
    1e-12 * ||A||_F; gives up with ConvergenceError after 100 sweeps.
    """
    A = np.array(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n > MAX_DENSE_N:
        raise CapacityError(f"eigensolver limited to n <= {MAX_DENSE_N}, got {n}")
    if n == 0:
        return np.empty(0)
    scale = 1.0 + float(np.max(np.abs(A)))
    if np.max(np.abs(A - A.T)) > 1e-10 * scale:
        raise PreconditionError("matrix is not symmetric")
    A = np.ascontiguousarray(0.5 * (A + A.T))
    impl = kernels if backend is None else backend
    eigs, sweeps, converged = impl.jacobi_eigenvalues(A, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if not converged:
        raise ConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    return np.sort(eigs)


def match_multisets(target, parts, abs_tol=MATCH_ABS, rel_tol=MATCH_REL) -> tuple[bool, float]:
    """Greedy sorted matching of ``parts`` against ``target``; returns (matched, max error)."""
    a = np.sort(np.asarray(target, dtype=np.float64))
    b = np.sort(np.asarray(parts, dtype=np.float64))
    if a.size != b.size:
        return False, float("inf")
    if a.size == 0:
        return True, 0.0
    err = np.abs(a - b)
    bound = abs_tol + rel_tol * max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    return bool(np.all(err <= bound)), float(np.max(err))


@dataclass(frozen=True)
class SpectralSplitReport:
    spec_M: list[float]
    spec_quotient: list[float]
    unit_eigs: list[float]
    matched: bool
    max_match_error: float
    kernel: str = ""
    equitable: bool = True
    equitable_deviation: float = 0.0

    def to_json(self) -> dict:
        return {
            "kernel": self.kernel,
            "spec_M": self.spec_M,
            "spec_quotient": self.spec_quotient,
            "unit_eigs": self.unit_eigs,
            "matched": self.matched,
            "max_match_error": self.max_match_error,
            "equitable": self.equitable,
            "equitable_deviation": self.equitable_deviation,
        }


def spectral_split_check(H: Hypergraph, kernel: StarKernel | str, tol: float = MATCH_ABS,
                         partition: UnitPartition | None = None) -> SpectralSplitReport:
    if isinstance(kernel, str):
        kernel = get_kernel(kernel)
    if not kernel.symmetric:
        raise KernelError("spectral check requires symmetric kernel")
    P = build_partition(H) if partition is None else partition
    M = build_matrix(H, kernel)
    equitable, dev = verify_equitable(M, P)
    Q = quotient(M, P, tol=dev)
    spec_M = symmetric_eigenvalues(M.entries)
    spec_Q = symmetric_eigenvalues(symmetrized_quotient(Q))
    local = unit_eigenvalues(M, P)
    matched, err = match_multisets(spec_M, np.concatenate([spec_Q, local]), abs_tol=tol)
    return SpectralSplitReport(
        spec_M=spec_M.tolist(), spec_quotient=spec_Q.tolist(), unit_eigs=list(local),
        matched=matched, max_match_error=err, kernel=kernel.name,
        equitable=equitable, equitable_deviation=dev)


ESD_SNAP = 1e-9


def _snap(values: np.ndarray, tol: float) -> np.ndarray:
    """Replace each value by the smallest member of its cluster (gaps <= tol chain)."""
    order = np.argsort(values, kind="stable")
    v = values[order]
    starts = np.concatenate(([True], np.diff(v) > tol))
    snapped = v[np.flatnonzero(starts)[np.cumsum(starts) - 1]]
    out = np.empty_like(values)
    out[order] = snapped
    return out


def esd_kolmogorov(a, b, snap: float = ESD_SNAP) -> float:
    """Sup distance between the empirical CDFs of two eigenvalue lists.

    Values of the pooled lists closer than ``snap * (1 + max |x|)`` are treated
    as one atom, so rounding noise in computed spectra does not split jumps.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise PreconditionError("empirical spectral distribution of an empty list")
    pooled = np.concatenate([a, b])
    if snap > 0:
        pooled = _snap(pooled, snap * (1.0 + float(np.max(np.abs(pooled)))))
    a, b = np.sort(pooled[:a.size]), np.sort(pooled[a.size:])
    # both CDFs are step functions, so the sup is attained at a jump point
    grid = np.concatenate([a, b])
    ca = np.searchsorted(a, grid, side="right").astype(np.int64)
    cb = np.searchsorted(b, grid, side="right").astype(np.int64)
    # |ca/na - cb/nb| from an exact integer numerator: one rounding only
    gap = int(np.max(np.abs(ca * b.size - cb * a.size)))
    return gap / (a.size * b.size)


def propagate(M: StarMatrix | np.ndarray, x0, T: int) -> np.ndarray:
    """Trajectory x(0..T) of x(t+1) = M x(t), one row per step."""
    A = M.entries if isinstance(M, StarMatrix) else np.asarray(M)
    x = np.asarray(x0, dtype=np.float64)
    if x.shape != (A.shape[0],):
        raise PreconditionError(f"x0 has shape {x.shape}, expected ({A.shape[0]},)")
    if T < 0:
        raise PreconditionError("T must be >= 0")
    out = np.empty((T + 1, x.size))
    out[0] = x
    for t in range(T):
        out[t + 1] = A @ out[t]
    return out


def _unit_spread(x: np.ndarray, P: UnitPartition) -> float:
    spread = 0.0
    for unit in P.nontrivial():
        vals = x[list(unit.vertices)]
        spread = max(spread, float(vals.max() - vals.min()))
    return spread


def unit_sync_preserved(M: StarMatrix, P: UnitPartition, x0, T: int, tol: float = 1e-8) -> bool:
    """True iff x(t) stays constant on every unit for t <= T (relative tolerance)."""
    x0 = np.asarray(x0, dtype=np.float64)
    if _unit_spread(x0, P) > tol * max(1.0, float(np.max(np.abs(x0), initial=0.0))):
        raise PreconditionError("x0 is not constant on units")
    for x in propagate(M, x0, T):
        if _unit_spread(x, P) > tol * max(1.0, float(np.max(np.abs(x), initial=0.0))):
            return False
    return True


def local_dynamics_ok(M: StarMatrix, P: UnitPartition, T: int, tol: float = 1e-8) -> bool:
    """Check x(t) = (M_uu - M_uv)^t x0 for x0 = 1_u - 1_v over every nontrivial unit pair (u, v)."""
    A = M.entries
    for unit in P.nontrivial():
        u = unit.vertices[0]
        for v in unit.vertices[1:]:
            alpha = A[u, u] - A[u, v]
            x0 = np.zeros(M.n)
            x0[u], x0[v] = 1.0, -1.0
            traj = propagate(M, x0, T)
            for t in range(T + 1):
                expect = alpha ** t * x0
                if np.max(np.abs(traj[t] - expect)) > tol * max(1.0, abs(alpha) ** t):
                    return False
    return True

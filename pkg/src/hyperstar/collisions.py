"""Star collisions, units and their exact expectations under H(n, k, p).

A collision is an unordered pair {u, v} with identical stars. It is degenerate
when the common star is empty (both vertices isolated). Units group vertices
with identical non-empty stars; isolated vertices stay separate singletons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import kernels
from .errors import RegimeError
from .hypergraph import Hypergraph
from .sampler import (FixedLambda, FixedP, HalfLogLogPlusW, LogPlusC,
                      RegimeSpec, binom, log_binom)


@dataclass(frozen=True)
class Unit:
    vertices: tuple[int, ...]
    support: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class UnitPartition:
    n: int
    units: tuple[Unit, ...]
    isolated: tuple[int, ...]

    def nontrivial(self) -> list[Unit]:
        return [u for u in self.units if u.size >= 2]

    def parts(self) -> list[tuple[int, ...]]:
        """All parts of the vertex set (isolated vertices as singletons), by smallest member."""
        parts = [u.vertices for u in self.units] + [(v,) for v in self.isolated]
        parts.sort(key=lambda p: p[0])
        return parts

    def part_index(self) -> np.ndarray:
        """Map vertex -> index into :meth:`parts`."""
        idx = np.empty(self.n, dtype=np.int64)
        for j, part in enumerate(self.parts()):
            idx[list(part)] = j
        return idx

    @property
    def dim_loc(self) -> int:
        return sum(u.size - 1 for u in self.units)


def unit_representatives(H: Hypergraph) -> np.ndarray:
    """Smallest vertex with the same non-empty star, or -1 for isolated vertices."""
    indptr, indices = H._csr
    return kernels.unit_representatives(H.edges, indptr, indices)


def build_partition(H: Hypergraph) -> UnitPartition:
    rep = unit_representatives(H)
    members: dict[int, list[int]] = {}
    isolated = []
    for v, r in enumerate(rep.tolist()):
        if r < 0:
            isolated.append(v)
        else:
            members.setdefault(r, []).append(v)
    units = tuple(Unit(tuple(vs), tuple(H.star_ids(r).tolist()))
                  for r, vs in sorted(members.items()))
    return UnitPartition(H.n, units, tuple(isolated))


@dataclass(frozen=True)
class CollisionCensus:
    n: int
    k: int
    m: int
    I_n: int
    X0: int
    X: dict[int, int] = field(default_factory=dict)
    U: dict[int, int] = field(default_factory=dict)
    Y: int = 0
    dim_loc: int = 0

    def X_r(self, r: int) -> int:
        return self.X0 if r == 0 else self.X.get(r, 0)

    @property
    def U_ge3(self) -> int:
        return sum(c for size, c in self.U.items() if size >= 3)

    def to_json(self) -> dict:
        return {
            "n": self.n, "k": self.k, "m": self.m, "I_n": self.I_n, "X0": self.X0,
            "X": {str(r): c for r, c in sorted(self.X.items())},
            "U": {str(s): c for s, c in sorted(self.U.items())},
            "Y": self.Y, "dim_loc": self.dim_loc,
        }


def census(H: Hypergraph) -> CollisionCensus:
    rep = unit_representatives(H)
    deg = H.degrees
    I_n = int(np.count_nonzero(rep < 0))
    sizes = np.bincount(rep[rep >= 0], minlength=H.n)
    reps = np.flatnonzero(sizes >= 2)
    X: dict[int, int] = {}
    U: dict[int, int] = {}
    for r, s in zip(deg[reps].tolist(), sizes[reps].tolist()):
        X[r] = X.get(r, 0) + s * (s - 1) // 2
        U[s] = U.get(s, 0) + 1
    return CollisionCensus(
        n=H.n, k=H.k, m=H.m, I_n=I_n, X0=I_n * (I_n - 1) // 2,
        X=dict(sorted(X.items())), U=dict(sorted(U.items())),
        Y=int(reps.size), dim_loc=int(sizes[reps].sum() - reps.size),
    )


# -- exact and asymptotic expectations --------------------------------------

def _pow_term(count: int, p: float) -> float:
    """log of p**count with 0**0 = 1."""
    if count == 0:
        return 0.0
    return count * math.log(p) if p > 0 else -math.inf


def _log1m_term(count: int, p: float) -> float:
    """log of (1-p)**count with 0**0 = 1."""
    if count == 0:
        return 0.0
    return count * math.log1p(-p) if p < 1 else -math.inf


def expected_Xr_exact(n: int, k: int, p: float, r: int) -> float:
    """E[X_r]: C(n,2) C(C(n-2,k-2), r) p^r (1-p)^(2C(n-2,k-1) + C(n-2,k-2) - r)."""
    both = binom(n - 2, k - 2)
    if r < 0 or r > both or n < 2:
        return 0.0
    absent = 2 * binom(n - 2, k - 1) + both - r
    log_prob = _pow_term(r, p) + _log1m_term(absent, p)
    coef = binom(n, 2) * binom(both, r)
    if coef.bit_length() < 1000 and log_prob > -700:
        # keep the integer prefactor exact when it fits a double
        return float(coef) * math.exp(log_prob)
    return math.exp(log_binom(n, 2) + log_binom(both, r) + log_prob)


def expected_Xr_asymptotic(n: int, k: int, lam: float, r: int) -> float:
    return ((k - 1) ** r / (2 * math.factorial(r)) * float(n) ** (2 - r)
            * lam ** r * math.exp(-2 * lam))


def expected_triples_exact(n: int, k: int, p: float) -> float:
    """E[T_n], T_n = number of vertex triples sharing one non-empty star.

    Every edge meeting the triple in one or two vertices must be absent and at
    least one of the C(n-3, k-3) edges containing all three must be present.
    """
    inside = binom(n - 3, k - 3)
    if n < 3 or inside == 0 or p <= 0.0:
        return 0.0
    partial = binom(n, k) - binom(n - 3, k) - inside
    if p >= 1.0:
        return float(binom(n, 3)) if partial == 0 else 0.0
    some_inside = -math.expm1(inside * math.log1p(-p))
    return math.exp(log_binom(n, 3) + _log1m_term(partial, p)) * some_inside


def expected_isolated(n: int, k: int, p: float) -> float:
    """E[I_n] = n (1-p)^C(n-1, k-1)."""
    return n * math.exp(_log1m_term(binom(n - 1, k - 1), p))


# -- limit laws --------------------------------------------------------------

@dataclass(frozen=True)
class LimitLaw:
    """Limit law of one collision statistic under a degree regime.

    ``law`` is ``"poisson"`` (the statistic itself is Poisson(mean)) or
    ``"binom2_poisson"`` (the statistic is C(Z, 2) with Z ~ Poisson(mean)).
    ``vanishing`` lists statistics that tend to zero in probability.
    """
    regime: str
    statistic: str
    law: str
    mean: float
    also: tuple[str, ...] = ()
    vanishing: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"regime": self.regime, "statistic": self.statistic, "law": self.law,
                "mean": self.mean, "also": list(self.also), "vanishing": list(self.vanishing)}


def limit_parameters(regime: RegimeSpec, k: int) -> LimitLaw:
    if isinstance(regime, LogPlusC):
        return LimitLaw(str(regime), "X0", "binom2_poisson", math.exp(-regime.c),
                        vanishing=("X_r>=1", "Y"))
    if isinstance(regime, HalfLogLogPlusW):
        return LimitLaw(str(regime), "X1", "poisson", (k - 1) / 4 * math.exp(-2 * regime.w),
                        also=("Y",), vanishing=("U_>=3",))
    if isinstance(regime, FixedLambda):
        lam = regime.lam
        return LimitLaw(str(regime), "X2", "poisson",
                        (k - 1) ** 2 / 4 * lam ** 2 * math.exp(-2 * lam),
                        vanishing=("X_r>=3",))
    if isinstance(regime, FixedP):
        raise RegimeError(f"no limit law available for fixed-probability regime {regime}")
    raise RegimeError(f"unknown regime {regime!r}")

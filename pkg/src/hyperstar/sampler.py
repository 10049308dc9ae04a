"""Exact sampling from the independent-edge model H(n, k, p).

A draw is made in two stages: the edge count M ~ Binomial(C(n, k), p), then
M distinct ranks uniform on [0, C(n, k)) unranked to k-sets in colex order.
This is the same law as flipping one p-coin per k-set.

Regimes give p through the expected degree lambda = p * C(n-1, k-1):

    p=<float>            p verbatim
    lambda=<float>       lambda fixed
    log+c=<float>        lambda = log n + c
    halfloglog+w=<float> lambda = (log n + log log n) / 2 + w

Seeds: ``derive_seed(seed, *labels)`` folds labels into a 64-bit seed with the
splitmix64 finalizer. Integer labels are used as-is (mod 2**64), strings are
hashed with 8-byte BLAKE2b. Four further splitmix64 words of the result
set the 128-bit state and increment of a PCG64 generator directly.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
import threading
from functools import lru_cache

import numpy as np

from ._accel import kernels
from .errors import CapacityError, RegimeError
from .hypergraph import Hypergraph, _from_canonical

MASK64 = (1 << 64) - 1
# largest trial count handed to numpy's binomial in one call; counts above
# 2**53 lose integer exactness inside its float arithmetic
_BINOM_CHUNK = 1 << 53
_MAX_CHUNKS = 1 << 16
# dense C(c, i) lookup table used by the vectorized unranker
_TABLE_LIMIT = 1 << 62
_TABLE_MAX_CELLS = 50_000_000


# -- combinatorics -----------------------------------------------------------

def binom(n: int, r: int) -> int:
    """Exact C(n, r); zero when r > n or r < 0."""
    if r < 0 or n < 0 or r > n:
        return 0
    return math.comb(n, r)


def log_binom(n, r) -> float:
    """Natural log of C(n, r); -inf when the coefficient vanishes."""
    if r < 0 or n < 0 or r > n:
        return -math.inf
    if int(n) == n and int(r) == r and min(r, n - r) <= 64:
        return math.log(math.comb(int(n), int(r)))
    return math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)


def rank_kset(edge) -> int:
    """Colex rank: sum of C(c_i, i) over the sorted members c_1 < ... < c_k."""
    return sum(math.comb(c, i) for i, c in enumerate(sorted(edge), start=1))


def unrank_kset(index: int, n: int, k: int) -> tuple[int, ...]:
    total = binom(n, k)
    if int(index) != index or not 0 <= index < total:
        raise ValueError(f"rank {index!r} outside [0, C({n},{k})={total})")
    r = int(index)
    out = []
    hi = n - 1
    for i in range(k, 0, -1):
        lo = i - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if math.comb(mid, i) <= r:
                lo = mid
            else:
                hi = mid - 1
        r -= math.comb(lo, i)
        out.append(lo)
        hi = lo - 1
    return tuple(reversed(out))


@lru_cache(maxsize=32)
def binomial_table(n: int, k: int) -> np.ndarray | None:
    """uint64 table T[i, c] = C(c, i) for i <= k, c < n, or None if it would overflow."""
    if (k + 1) * n > _TABLE_MAX_CELLS:
        return None
    if max(binom(n - 1, i) for i in range(k + 1)) >= _TABLE_LIMIT:
        return None
    table = np.zeros((k + 1, n), dtype=np.uint64)
    table[0, :] = 1
    for i in range(1, k + 1):
        # C(c, i) = sum_{j < c} C(j, i - 1)
        table[i, 1:] = np.cumsum(table[i - 1, :-1], dtype=np.uint64)
    table.flags.writeable = False
    return table


def unrank_many(ranks, n: int, k: int) -> np.ndarray:
    """Unrank an array of colex ranks to an ``(m, k)`` edge array."""
    table = binomial_table(n, k)
    if table is not None:
        ranks = np.ascontiguousarray(ranks, dtype=np.uint64)
        return kernels.unrank_colex(ranks, table, k)
    rows = [unrank_kset(int(r), n, k) for r in ranks]
    return np.array(rows, dtype=np.int64).reshape(-1, k)


# -- regimes -----------------------------------------------------------------

@dataclass(frozen=True)
class FixedP:
    p: float

    def __str__(self):
        return f"p={self.p!r}"


@dataclass(frozen=True)
class FixedLambda:
    lam: float

    def expected_degree(self, n: int) -> float:
        return float(self.lam)

    def __str__(self):
        return f"lambda={self.lam!r}"


@dataclass(frozen=True)
class LogPlusC:
    c: float

    def expected_degree(self, n: int) -> float:
        return math.log(n) + self.c

    def __str__(self):
        return f"log+c={self.c!r}"


@dataclass(frozen=True)
class HalfLogLogPlusW:
    w: float

    def expected_degree(self, n: int) -> float:
        if n < 3:
            raise RegimeError("halfloglog regime needs n >= 3 so that log log n is defined")
        return 0.5 * (math.log(n) + math.log(math.log(n))) + self.w

    def __str__(self):
        return f"halfloglog+w={self.w!r}"


RegimeSpec = FixedP | FixedLambda | LogPlusC | HalfLogLogPlusW

_REGIME_KEYS = {
    "p": FixedP,
    "lambda": FixedLambda,
    "log+c": LogPlusC,
    "halfloglog+w": HalfLogLogPlusW,
}


def parse_regime(text: str) -> RegimeSpec:
    key, sep, value = text.strip().partition("=")
    if not sep or key.strip() not in _REGIME_KEYS:
        raise RegimeError(
            f"cannot parse regime {text!r}; expected one of "
            + ", ".join(f"{k}=<float>" for k in _REGIME_KEYS))
    try:
        x = float(value)
    except ValueError:
        raise RegimeError(f"regime value {value!r} is not a number") from None
    if not math.isfinite(x):
        raise RegimeError(f"regime value must be finite, got {value!r}")
    regime = _REGIME_KEYS[key.strip()](x)
    if isinstance(regime, FixedP) and not 0.0 <= x <= 1.0:
        raise RegimeError(f"probability {x} outside [0, 1]")
    return regime


def expected_degree(regime: RegimeSpec, n: int, k: int) -> float:
    if isinstance(regime, FixedP):
        return regime.p * binom(n - 1, k - 1)
    return regime.expected_degree(n)


def edge_probability(regime: RegimeSpec, n: int, k: int) -> float:
    if isinstance(regime, FixedP):
        if not 0.0 <= regime.p <= 1.0:
            raise RegimeError(f"probability {regime.p} outside [0, 1]")
        return float(regime.p)
    slots = binom(n - 1, k - 1)
    if slots < 1:
        raise RegimeError(f"C(n-1, k-1) = 0 for n={n}, k={k}; no edge can exist")
    lam = regime.expected_degree(n)
    if lam < 0:
        raise RegimeError(f"{regime} gives negative expected degree {lam:.6g} at n={n}")
    p = lam / slots
    if p > 1.0:
        raise RegimeError(
            f"{regime} infeasible at n={n}, k={k}: p > 1 (p = {lam:.6g}/{slots} = {p:.6g}; "
            f"needs lambda <= C(n-1,k-1) = {slots})")
    return p


# -- seeding -----------------------------------------------------------------

def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def _label_word(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label) & MASK64
    return _text_word(str(label))


@lru_cache(maxsize=256)
def _text_word(label: str) -> int:
    digest = hashlib.blake2b(label.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(seed: int, *labels) -> int:
    h = _splitmix64(int(seed) & MASK64)
    for label in labels:
        h = _splitmix64(h ^ _splitmix64(_label_word(label)))
    return h


def _pcg_state(seed: int, *labels) -> dict:
    h = derive_seed(seed, *labels)
    w = [_splitmix64(h ^ i) for i in range(1, 5)]
    return {"bit_generator": "PCG64",
            "state": {"state": (w[0] << 64) | w[1], "inc": ((w[2] << 64) | w[3]) | 1},
            "has_uint32": 0, "uinteger": 0}


def make_rng(seed: int, *labels) -> np.random.Generator:
    """Fresh PCG64 generator whose stream depends only on (seed, labels)."""
    bg = np.random.PCG64(0)
    bg.state = _pcg_state(seed, *labels)
    return np.random.Generator(bg)


_scratch = threading.local()


def _scratch_rng(seed: int, *labels) -> np.random.Generator:
    """Like make_rng but reuses one generator per thread; only for internal short-lived use."""
    rng = getattr(_scratch, "rng", None)
    if rng is None:
        rng = _scratch.rng = np.random.Generator(np.random.PCG64(0))
    rng.bit_generator.state = _pcg_state(seed, *labels)
    return rng


# -- sampling ----------------------------------------------------------------

@dataclass(frozen=True)
class SampleConfig:
    n: int
    k: int
    seed: int

    def __post_init__(self):
        if self.n < 1 or self.k < 2:
            raise RegimeError(f"need n >= 1 and k >= 2, got n={self.n}, k={self.k}")


def binomial_count(rng: np.random.Generator, trials: int, p: float) -> int:
    """Exact Binomial(trials, p) draw for arbitrarily large integer trial counts.

    Large counts are split into chunks of at most 2**53 trials; a sum of
    independent binomials with a common p is again binomial.
    """
    if p <= 0.0 or trials == 0:
        return 0
    if p >= 1.0:
        return trials
    if trials <= _BINOM_CHUNK:
        return int(rng.binomial(trials, p))
    full, rest = divmod(trials, _BINOM_CHUNK)
    if full > _MAX_CHUNKS:
        raise CapacityError(f"binomial trial count {trials} too large to sample exactly")
    total = int(rng.binomial(_BINOM_CHUNK, p, size=full).sum(dtype=np.int64))
    if rest:
        total += int(rng.binomial(rest, p))
    return total


def _uniform_below(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in [0, bound): top bits of raw 64-bit words, rejected until below bound."""
    bits = (bound - 1).bit_length()
    words = (bits + 63) // 64
    raw = rng.bit_generator.random_raw
    while True:
        if words == 1:
            x = int(raw())
        else:
            x = 0
            for w in raw(words).tolist():
                x = (x << 64) | w
        x >>= words * 64 - bits
        if x < bound:
            return x


SMALL_DRAW = 64


def distinct_ranks(rng: np.random.Generator, total: int, count: int):
    """``count`` distinct uniform ranks in [0, total), sorted ascending."""
    if count > total:
        raise CapacityError(f"cannot draw {count} distinct ranks from {total}")
    if count <= SMALL_DRAW:
        # a plain set avoids numpy call overhead, which dominates for tiny n
        picked: set[int] = set()
        while len(picked) < count:
            picked.add(_uniform_below(rng, total))
        ordered = sorted(picked)
        return np.array(ordered, dtype=np.uint64) if total < (1 << 63) else ordered
    if total < (1 << 63):
        chosen = np.unique(rng.integers(0, total, size=count, dtype=np.int64))
        while chosen.size < count:
            extra = rng.integers(0, total, size=count - chosen.size, dtype=np.int64)
            chosen = np.union1d(chosen, extra)
        return chosen.astype(np.uint64)
    chosen = set()
    while len(chosen) < count:
        chosen.add(_uniform_below(rng, total))
    return sorted(chosen)


def sample(config: SampleConfig, regime: RegimeSpec) -> Hypergraph:
    n, k = config.n, config.k
    p = edge_probability(regime, n, k)
    total = binom(n, k)
    if total.bit_length() > 128:
        raise CapacityError(f"C({n},{k}) exceeds 128 bits")
    rng = _scratch_rng(config.seed, "sample")
    count = binomial_count(rng, total, p)
    if count == 0:
        return _from_canonical(n, k, np.empty((0, k), dtype=np.int64))
    if count == total:
        ranks = np.arange(total, dtype=np.uint64) if total < (1 << 63) else range(total)
    else:
        ranks = distinct_ranks(rng, total, count)
    # ascending rank is exactly colex order, so the result is canonical
    return _from_canonical(n, k, unrank_many(ranks, n, k))

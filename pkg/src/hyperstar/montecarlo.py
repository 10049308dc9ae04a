"""Seeded Monte Carlo experiments over H(n, k, p) with exact oracles.

Trial ``i`` at size ``n`` uses seed ``derive_seed(master_seed, n, i)``, so the
outcome of a plan does not depend on how trials are spread over workers.
Per-trial statistics are merged as integer histograms and integer sums.
"""

from __future__ import annotations

import json
import math
import multiprocessing as mp
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .collisions import (census, expected_isolated, expected_triples_exact,
                         expected_Xr_exact, limit_parameters)
from .errors import PreconditionError
from .sampler import (FixedLambda, FixedP, HalfLogLogPlusW, LogPlusC, RegimeSpec,
                      SampleConfig, derive_seed, edge_probability, expected_degree,
                      parse_regime, sample)
from .spectral import spectral_split_check

DEFAULT_CAP = 64
PMF_STATS = ("X0", "X1", "X2", "Y", "dim_loc")
EVENTS = ("X0_zero", "X0_positive", "X1_positive", "X3_positive", "U3_positive",
          "fingerprint", "all_stars_distinct", "dim_loc_ne_Y_without_U3")
Z_WARN, Z_FAIL = 4.0, 5.0


# -- distributions -----------------------------------------------------------

def poisson_pmf(mu: float, j: int) -> float:
    if mu < 0:
        raise PreconditionError(f"Poisson mean must be >= 0, got {mu}")
    if j < 0:
        return 0.0
    if mu == 0:
        return 1.0 if j == 0 else 0.0
    return math.exp(-mu + j * math.log(mu) - math.lgamma(j + 1))


def _capped(masses: dict[int, float], cap: int) -> dict:
    pmf = {v: q for v, q in masses.items() if v <= cap and q > 0}
    pmf["overflow"] = max(0.0, 1.0 - math.fsum(pmf.values()))
    return pmf


def poisson_law(mu: float, cap: int = DEFAULT_CAP) -> dict:
    """Poisson(mu) on 0..cap with the remaining tail mass under ``"overflow"``."""
    return _capped({j: poisson_pmf(mu, j) for j in range(cap + 1)}, cap)


def binom2_poisson_pmf(mu: float, cap: int = DEFAULT_CAP) -> dict:
    """Law of C(Z, 2), Z ~ Poisson(mu), on 0..cap plus overflow."""
    masses: dict[int, float] = {}
    z = 0
    while z * (z - 1) // 2 <= cap:
        v = z * (z - 1) // 2
        masses[v] = masses.get(v, 0.0) + poisson_pmf(mu, z)
        z += 1
    return _capped(masses, cap)


def x0_limit_pmf(c: float, values=None, cap: int = DEFAULT_CAP) -> dict:
    """Limit law of X0 when lambda = log n + c: C(Z, 2) with Z ~ Poisson(exp(-c)).

    With ``values`` given, returns the mass at each listed value.
    """
    pmf = binom2_poisson_pmf(math.exp(-c), max(cap, max(values, default=0)) if values else cap)
    if values is None:
        return pmf
    return {v: pmf.get(v, 0.0) for v in values}


def _check_pmf(p: dict, name: str) -> None:
    vals = list(p.values())
    if any(q < 0 for q in vals) or abs(math.fsum(vals) - 1.0) > 1e-9:
        raise PreconditionError(f"{name} is not a normalized pmf (sum {math.fsum(vals)!r})")


def tv_distance(p: dict, q: dict) -> float:
    """Half the L1 distance over the union of supports (``"overflow"`` is one atom)."""
    _check_pmf(p, "first argument")
    _check_pmf(q, "second argument")
    keys = set(p) | set(q)
    return 0.5 * math.fsum(abs(p.get(j, 0.0) - q.get(j, 0.0)) for j in keys)


# -- plan and per-trial statistics ------------------------------------------

@dataclass(frozen=True)
class ExperimentPlan:
    n_list: tuple[int, ...]
    k: int
    regime: RegimeSpec
    trials: int
    master_seed: int
    collect_spectral: bool = False
    r_max: int = 3
    value_cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.trials < 1:
            raise PreconditionError("trials must be >= 1")
        if self.r_max < 2:
            raise PreconditionError("r_max must be >= 2")
        if not self.n_list:
            raise PreconditionError("n_list is empty")
        if self.k < 2 or any(n < 1 for n in self.n_list):
            raise PreconditionError("need k >= 2 and every n >= 1")
        if self.collect_spectral and max(self.n_list) > 4096:
            raise PreconditionError("spectral collection is limited to n <= 4096")

    def to_json(self) -> dict:
        return {
            "n_list": list(self.n_list), "k": self.k, "regime": str(self.regime),
            "trials": self.trials, "master_seed": self.master_seed,
            "collect_spectral": self.collect_spectral, "r_max": self.r_max,
            "value_cap": self.value_cap,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentPlan":
        known = {"n_list", "k", "regime", "trials", "master_seed", "collect_spectral",
                 "r_max", "value_cap"}
        unknown = set(data) - known
        if unknown:
            raise PreconditionError(f"unknown plan keys {sorted(unknown)}")
        try:
            return cls(
                n_list=tuple(int(n) for n in data["n_list"]), k=int(data["k"]),
                regime=parse_regime(data["regime"]), trials=int(data["trials"]),
                master_seed=int(data["master_seed"]),
                collect_spectral=bool(data.get("collect_spectral", False)),
                r_max=int(data.get("r_max", 3)),
                value_cap=int(data.get("value_cap", DEFAULT_CAP)))
        except KeyError as exc:
            raise PreconditionError(f"plan is missing key {exc.args[0]!r}") from None


def _fields(k: int, r_max: int) -> list[str]:
    return (["m", "I_n", "X0"] + [f"X{r}" for r in range(1, r_max + 1)] + ["X_gt"]
            + [f"U{s}" for s in range(2, k + 1)] + ["Y", "dim_loc", "T"])


def trial_statistics(n: int, k: int, regime: RegimeSpec, seed: int, r_max: int,
                     collect_spectral: bool = False) -> dict:
    """Sample one hypergraph and return its integer statistics and event flags."""
    H = sample(SampleConfig(n, k, seed), regime)
    c = census(H)
    row = {"m": c.m, "I_n": c.I_n, "X0": c.X0, "Y": c.Y, "dim_loc": c.dim_loc}
    for r in range(1, r_max + 1):
        row[f"X{r}"] = c.X.get(r, 0)
    row["X_gt"] = sum(v for r, v in c.X.items() if r > r_max)
    for s in range(2, k + 1):
        row[f"U{s}"] = c.U.get(s, 0)
    row["T"] = sum(cnt * math.comb(s, 3) for s, cnt in c.U.items())
    u3 = c.U_ge3
    events = {
        "X0_zero": c.X0 == 0,
        "X0_positive": c.X0 > 0,
        "X1_positive": c.X.get(1, 0) > 0,
        "X3_positive": any(v > 0 for r, v in c.X.items() if r >= 3),
        "U3_positive": u3 > 0,
        "fingerprint": c.Y == 0,
        "all_stars_distinct": c.Y == 0 and c.I_n <= 1,
        "dim_loc_ne_Y_without_U3": u3 == 0 and c.dim_loc != c.Y,
    }
    spectral = None
    if collect_spectral:
        spectral = spectral_split_check(H, "codegree").matched
    return {"row": row, "events": events, "spectral": spectral}


@dataclass
class _Tally:
    fields: list[str]
    cap: int
    trials: int = 0
    sums: dict = field(default_factory=dict)
    sumsq: dict = field(default_factory=dict)
    hist: dict = field(default_factory=dict)
    events: dict = field(default_factory=dict)
    spectral_checked: int = 0
    spectral_matched: int = 0

    def __post_init__(self):
        for f in self.fields:
            self.sums.setdefault(f, 0)
            self.sumsq.setdefault(f, 0)
        for s in PMF_STATS:
            self.hist.setdefault(s, [0] * (self.cap + 2))
        for e in EVENTS:
            self.events.setdefault(e, 0)

    def add(self, result: dict) -> None:
        row = result["row"]
        self.trials += 1
        for f in self.fields:
            v = row[f]
            self.sums[f] += v
            self.sumsq[f] += v * v
        for s in PMF_STATS:
            self.hist[s][min(row[s], self.cap + 1)] += 1
        for e, flag in result["events"].items():
            self.events[e] += int(flag)
        if result["spectral"] is not None:
            self.spectral_checked += 1
            self.spectral_matched += int(result["spectral"])

    def merge(self, other: "_Tally") -> None:
        self.trials += other.trials
        for f in self.fields:
            self.sums[f] += other.sums[f]
            self.sumsq[f] += other.sumsq[f]
        for s in PMF_STATS:
            self.hist[s] = [a + b for a, b in zip(self.hist[s], other.hist[s])]
        for e in EVENTS:
            self.events[e] += other.events[e]
        self.spectral_checked += other.spectral_checked
        self.spectral_matched += other.spectral_matched


def _run_block(plan: ExperimentPlan, n: int, start: int, stop: int) -> _Tally:
    tally = _Tally(_fields(plan.k, plan.r_max), plan.value_cap)
    for i in range(start, stop):
        seed = derive_seed(plan.master_seed, n, i)
        tally.add(trial_statistics(n, plan.k, plan.regime, seed, plan.r_max,
                                   plan.collect_spectral))
    return tally


# -- summary -----------------------------------------------------------------

def empirical_pmf(hist: list[int]) -> dict:
    total = sum(hist)
    pmf: dict = {v: c / total for v, c in enumerate(hist[:-1]) if c}
    if hist[-1]:
        pmf["overflow"] = hist[-1] / total
    return pmf


def _mean_var(s: int, sq: int, t: int) -> tuple[float, float]:
    mean = s / t
    var = (sq * t - s * s) / (t * (t - 1)) if t > 1 else 0.0
    return mean, var


def z_score(mean: float, var: float, trials: int, oracle: float) -> float:
    """(mean - oracle) / SE with the empirical SE.

    When every trial gave the same value the empirical SE is zero; the
    Poisson-approximation SE sqrt(oracle / trials) is used instead.
    """
    se = math.sqrt(var / trials)
    if se == 0.0:
        se = math.sqrt(max(oracle, 0.0) / trials)
    if se == 0.0:
        return 0.0 if mean == oracle else math.copysign(math.inf, mean - oracle)
    return (mean - oracle) / se


def _status(z: float) -> str:
    return "ok" if abs(z) <= Z_WARN else ("warn" if abs(z) <= Z_FAIL else "fail")


def _pmf_json(pmf: dict) -> dict:
    return {str(k): v for k, v in pmf.items()}


def _block_summary(plan: ExperimentPlan, n: int, tally: _Tally) -> dict:
    k, t, cap = plan.k, tally.trials, plan.value_cap
    p = edge_probability(plan.regime, n, k)
    lam = expected_degree(plan.regime, n, k)
    means, variances = {}, {}
    for f in tally.fields:
        means[f], variances[f] = _mean_var(tally.sums[f], tally.sumsq[f], t)
    oracles = {f"X{r}": expected_Xr_exact(n, k, p, r) for r in range(0, plan.r_max + 1)}
    oracles["T"] = expected_triples_exact(n, k, p)
    oracles["I_n"] = expected_isolated(n, k, p)
    z = {f: z_score(means[f], variances[f], t, oracles[f]) for f in oracles}
    pmfs = {s: empirical_pmf(tally.hist[s]) for s in PMF_STATS}

    mu_iso, mu1, mu2 = oracles["I_n"], oracles["X1"], oracles["X2"]
    tv = {
        "X0_exact": tv_distance(pmfs["X0"], binom2_poisson_pmf(mu_iso, cap)),
        "X1_exact": tv_distance(pmfs["X1"], poisson_law(mu1, cap)),
        "X2_exact": tv_distance(pmfs["X2"], poisson_law(mu2, cap)),
        "Y_exact": tv_distance(pmfs["Y"], poisson_law(mu1, cap)),
    }
    limit = None
    if not isinstance(plan.regime, FixedP):
        law = limit_parameters(plan.regime, k)
        limit = law.to_json()
        if isinstance(plan.regime, LogPlusC):
            tv["X0_limit"] = tv_distance(pmfs["X0"], binom2_poisson_pmf(law.mean, cap))
        elif isinstance(plan.regime, HalfLogLogPlusW):
            tv["X1_limit"] = tv_distance(pmfs["X1"], poisson_law(law.mean, cap))
            tv["Y_limit"] = tv_distance(pmfs["Y"], poisson_law(law.mean, cap))
        elif isinstance(plan.regime, FixedLambda):
            tv["X2_limit"] = tv_distance(pmfs["X2"], poisson_law(law.mean, cap))

    block = {
        "n": n, "p": p, "lambda": lam, "trials": t,
        "pmfs": {s: _pmf_json(pmf) for s, pmf in pmfs.items()},
        "means": means, "variances": variances,
        "oracles": oracles, "z_scores": z,
        "oracle_status": {f: _status(v) for f, v in z.items()},
        "tv": tv, "limit_law": limit,
        "events": {e: c / t for e, c in tally.events.items()},
        "event_counts": dict(tally.events),
    }
    if plan.collect_spectral:
        block["spectral"] = {"checked": tally.spectral_checked,
                             "matched": tally.spectral_matched}
    return block


@dataclass
class ExperimentSummary:
    plan: ExperimentPlan
    blocks: list[dict]
    wall_time: float = 0.0

    def block(self, n: int) -> dict:
        for b in self.blocks:
            if b["n"] == n:
                return b
        raise KeyError(n)

    @property
    def fatal(self) -> list[str]:
        return [f"n={b['n']}:{f}" for b in self.blocks
                for f, s in b["oracle_status"].items() if s == "fail"]

    def to_json(self, include_timing: bool = False) -> dict:
        out = {"version": __version__, "plan": self.plan.to_json(), "results": self.blocks}
        if include_timing:
            out["wall_time"] = self.wall_time
        return out

    def dumps(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_json(include_timing), indent=2, sort_keys=True) + "\n"

    def histogram_csv(self, n: int, stat: str) -> str:
        b = self.block(n)
        t = b["trials"]
        lines = ["value,count,probability"]
        for v, q in b["pmfs"][stat].items():
            lines.append(f"{v},{round(q * t)},{q!r}")
        return "\n".join(lines) + "\n"


def run_experiment(plan: ExperimentPlan, workers: int = 1) -> ExperimentSummary:
    for n in plan.n_list:
        edge_probability(plan.regime, n, plan.k)
    start = time.perf_counter()
    blocks = []
    for n in plan.n_list:
        chunks = _chunks(plan.trials, max(1, workers))
        if workers <= 1 or len(chunks) == 1:
            tally = _run_block(plan, n, 0, plan.trials)
        else:
            tally = _Tally(_fields(plan.k, plan.r_max), plan.value_cap)
            ctx = mp.get_context("fork")
            with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
                futures = [pool.submit(_run_block, plan, n, a, b) for a, b in chunks]
                for fut in futures:
                    tally.merge(fut.result())
        blocks.append(_block_summary(plan, n, tally))
    return ExperimentSummary(plan, blocks, time.perf_counter() - start)


def _chunks(trials: int, workers: int) -> list[tuple[int, int]]:
    size = -(-trials // workers)
    return [(a, min(a + size, trials)) for a in range(0, trials, size)]


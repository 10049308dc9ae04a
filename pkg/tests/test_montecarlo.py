import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperstar import PreconditionError
from hyperstar.collisions import expected_Xr_exact
from hyperstar.montecarlo import (EVENTS, PMF_STATS, ExperimentPlan, binom2_poisson_pmf,
                                  empirical_pmf, poisson_law, poisson_pmf, run_experiment,
                                  trial_statistics, tv_distance, x0_limit_pmf, z_score)
from hyperstar.sampler import FixedLambda, FixedP, HalfLogLogPlusW, LogPlusC


# -- distributions -----------------------------------------------------------

def test_tv_examples():
    p = {0: 0.2, 1: 0.8}
    assert tv_distance(p, p) == 0
    assert tv_distance({0: 1.0}, {1: 1.0}) == 1
    assert tv_distance({0: 1.0}, {0: 0.5, 1: 0.5}) == 0.5


def test_tv_overflow_is_an_atom():
    assert tv_distance({0: 0.5, "overflow": 0.5}, {0: 0.5, "overflow": 0.5}) == 0
    assert tv_distance({0: 0.5, 70: 0.5}, {0: 0.5, "overflow": 0.5}) == 0.5


def test_tv_rejects_unnormalized():
    with pytest.raises(PreconditionError):
        tv_distance({0: 0.5}, {0: 1.0})
    with pytest.raises(PreconditionError):
        tv_distance({0: 1.5, 1: -0.5}, {0: 1.0})


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=8),
       st.lists(st.floats(0, 1), min_size=1, max_size=8))
def test_tv_is_a_metric_value(a, b):
    if sum(a) == 0 or sum(b) == 0:
        return
    p = {i: x / sum(a) for i, x in enumerate(a)}
    q = {i: x / sum(b) for i, x in enumerate(b)}
    d = tv_distance(p, q)
    assert 0 <= d <= 1 + 1e-12
    assert d == pytest.approx(tv_distance(q, p))


def test_poisson_pmf():
    assert poisson_pmf(0, 0) == 1
    assert poisson_pmf(0, 3) == 0
    assert poisson_pmf(2.0, 3) == pytest.approx(math.exp(-2) * 8 / 6, rel=1e-14)
    with pytest.raises(PreconditionError):
        poisson_pmf(-1, 0)


def test_poisson_law_normalized():
    law = poisson_law(3.0, cap=10)
    assert math.fsum(law.values()) == pytest.approx(1.0, abs=1e-15)
    assert law["overflow"] == pytest.approx(1 - sum(poisson_pmf(3.0, j) for j in range(11)))


def test_x0_limit_examples():
    pmf = x0_limit_pmf(0.0)
    assert pmf[0] == pytest.approx(2 * math.exp(-1), rel=1e-14)
    assert pmf[0] == pytest.approx(0.735759, rel=1e-6)
    assert pmf[1] == pytest.approx(0.183940, rel=1e-5)
    assert pmf[3] == pytest.approx(math.exp(-1) / 6, rel=1e-14)
    assert 2 not in pmf
    assert x0_limit_pmf(0.0, values=[0, 2]) == {0: pmf[0], 2: 0.0}


def test_binom2_poisson_normalized():
    for mu in (0.1, 1.0, 4.0):
        assert math.fsum(binom2_poisson_pmf(mu).values()) == pytest.approx(1.0, abs=1e-12)


def test_empirical_pmf():
    assert empirical_pmf([2, 0, 1, 1]) == {0: 0.5, 2: 0.25, "overflow": 0.25}


def test_z_score_fallback():
    assert z_score(1.0, 0.25, 100, 1.0) == 0.0
    assert z_score(1.1, 0.25, 100, 1.0) == pytest.approx(2.0)
    # constant sample: Poisson SE sqrt(oracle / trials) instead of zero
    assert z_score(0.0, 0.0, 100, 0.01) == pytest.approx(-1.0)
    assert z_score(0.0, 0.0, 100, 0.0) == 0.0


# -- plans -------------------------------------------------------------------

def test_plan_validation():
    with pytest.raises(PreconditionError):
        ExperimentPlan((10,), 3, FixedP(0.1), 0, 1)
    with pytest.raises(PreconditionError):
        ExperimentPlan((10,), 3, FixedP(0.1), 5, 1, r_max=1)
    with pytest.raises(PreconditionError):
        ExperimentPlan((5000,), 3, FixedP(0.1), 5, 1, collect_spectral=True)


def test_plan_json_round_trip():
    plan = ExperimentPlan((100, 200), 3, HalfLogLogPlusW(0.5), 7, 42, r_max=4)
    again = ExperimentPlan.from_json(json.loads(json.dumps(plan.to_json())))
    assert again == plan


def test_plan_rejects_unknown_keys():
    data = ExperimentPlan((10,), 3, FixedP(0.1), 5, 1).to_json()
    data["extra"] = 1
    with pytest.raises(PreconditionError, match="unknown"):
        ExperimentPlan.from_json(data)
    del data["extra"], data["k"]
    with pytest.raises(PreconditionError, match="missing"):
        ExperimentPlan.from_json(data)


# -- experiments -------------------------------------------------------------

def test_empty_hypergraphs_point_mass():
    s = run_experiment(ExperimentPlan((100,), 3, FixedP(0.0), 10, 1))
    b = s.block(100)
    assert b["pmfs"]["X0"] == {"overflow": 1.0}  # 4950 lies beyond the value cap
    assert b["means"]["X0"] == 4950 and b["variances"]["X0"] == 0
    s = run_experiment(ExperimentPlan((100,), 3, FixedP(0.0), 10, 1, value_cap=5000))
    assert s.block(100)["pmfs"]["X0"] == {"4950": 1.0}


def test_summary_contents():
    plan = ExperimentPlan((60,), 3, FixedLambda(1.0), 50, 3, collect_spectral=True)
    b = run_experiment(plan).block(60)
    for stat in PMF_STATS:
        assert math.fsum(b["pmfs"][stat].values()) == pytest.approx(1.0, abs=1e-12)
    assert set(b["events"]) == set(EVENTS)
    assert b["spectral"] == {"checked": 50, "matched": 50}
    assert b["oracles"]["X1"] == expected_Xr_exact(60, 3, b["p"], 1)
    assert {"X0_exact", "X1_exact", "X2_exact", "Y_exact", "X2_limit"} <= set(b["tv"])
    assert b["events"]["dim_loc_ne_Y_without_U3"] == 0


def test_trial_statistics_consistency():
    res = trial_statistics(50, 3, FixedLambda(1.5), 11, 3)
    row, ev = res["row"], res["events"]
    assert row["X0"] == math.comb(row["I_n"], 2)
    assert ev["X0_zero"] != ev["X0_positive"]
    assert row["Y"] == sum(row[f"U{s}"] for s in (2, 3))


def test_deterministic_across_workers():
    plan = ExperimentPlan((200, 300), 3, LogPlusC(0.0), 40, 9)
    one = run_experiment(plan, workers=1).dumps()
    assert one == run_experiment(plan, workers=3).dumps()
    assert one == run_experiment(plan, workers=1).dumps()
    other = run_experiment(ExperimentPlan((200, 300), 3, LogPlusC(0.0), 40, 10)).dumps()
    assert one != other


def test_timing_only_on_request():
    s = run_experiment(ExperimentPlan((30,), 3, FixedP(0.01), 3, 1))
    assert "wall_time" not in s.to_json()
    assert "wall_time" in s.to_json(include_timing=True)


def test_histogram_csv():
    s = run_experiment(ExperimentPlan((30,), 3, FixedLambda(1.0), 20, 1))
    text = s.histogram_csv(30, "X1")
    lines = text.splitlines()
    assert lines[0] == "value,count,probability"
    assert sum(int(ln.split(",")[1]) for ln in lines[1:]) == 20


def test_markov_bound_on_triples():
    plan = ExperimentPlan((200,), 3, HalfLogLogPlusW(0.0), 400, 5)
    b = run_experiment(plan).block(200)
    freq = b["events"]["U3_positive"]
    bound = b["oracles"]["T"]
    assert freq <= bound + 4 * math.sqrt(max(bound, 1e-3) / 400)


@pytest.mark.slow
def test_mean_x1_at_n4():
    b = run_experiment(ExperimentPlan((4,), 3, FixedP(0.5), 10 ** 6, 2024)).block(4)
    assert abs(b["z_scores"]["X1"]) <= 4
    assert b["oracles"]["X1"] == pytest.approx(0.75, rel=1e-15)
    for r in (0, 1, 2):
        assert b["oracle_status"][f"X{r}"] == "ok"

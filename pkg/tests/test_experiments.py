from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lametrans.config import default_config, parse_curves
from lametrans.experiments import (
    SCHEMA,
    SweepRecord,
    fit_rate,
    format_csv,
    read_csv,
    run_experiment,
    summarize,
)


def recs(xs, ys):
    return [SweepRecord({"x": x, "y": y}) for x, y in zip(xs, ys)]


def test_fit_rate_exact_quartic():
    eps = [0.2, 0.1, 0.05, 0.025]
    slope, _ = fit_rate(recs(eps, [e**4 for e in eps]), "x", "y")
    assert abs(slope - 4.0) <= 1e-12


def test_fit_rate_inverse_root():
    mu = [10.0, 100.0, 1000.0]
    slope, icpt = fit_rate(recs(mu, [3 * m**-0.5 for m in mu]), "x", "y")
    assert slope == pytest.approx(-0.5, abs=1e-12)
    assert np.exp(icpt) == pytest.approx(3.0)


def test_fit_rate_errors():
    with pytest.raises(ValueError):
        fit_rate(recs([1, 2], [1, 2]), "x", "y")
    with pytest.raises(ValueError):
        fit_rate(recs([1, 2, 3], [1, 0, 2]), "x", "y")


def test_fit_rate_skips_failed_rows():
    rows = recs([1, 2, 4], [1, 4, 16]) + [SweepRecord({}, "error: boom")]
    assert fit_rate(rows, "x", "y")[0] == pytest.approx(2.0)


@given(st.floats(-6, 6), st.floats(-3, 3))
def test_fit_rate_recovers_power_laws(p, c):
    xs = [0.5, 1.0, 2.0, 4.0]
    slope, icpt = fit_rate(recs(xs, [np.exp(c) * x**p for x in xs]), "x", "y")
    assert slope == pytest.approx(p, abs=1e-9)
    assert icpt == pytest.approx(c, abs=1e-9)


@pytest.fixture(scope="module")
def mu_result():
    return run_experiment(default_config("mu_sweep"))


def test_mu_sweep_defaults(mu_result):
    assert len(mu_result.records) == 5
    assert mu_result.passed
    assert [r["mu"] for r in mu_result.records] == sorted(r["mu"] for r in mu_result.records)


def test_csv_schema_and_roundtrip(mu_result):
    text = mu_result.to_csv()
    assert text.startswith(f"# {SCHEMA} kind=mu_sweep\n")
    kind, rows = read_csv(text)
    assert kind == "mu_sweep"
    for a, b in zip(mu_result.records, rows):
        for k, v in a.values.items():
            assert b[k] == v  # 17 significant digits round-trip exactly
    with pytest.raises(ValueError):
        read_csv("mu,r\n1,2\n")


def test_verdicts_recomputable_from_rows(mu_result):
    _, rows = read_csv(mu_result.to_csv())
    assert summarize("mu_sweep", rows) == mu_result.verdicts


def test_deterministic_csv():
    cfg = replace(default_config("bvp_check"), mu=(10.0, 100.0, 1000.0), seed=3)
    assert run_experiment(cfg).to_csv() == run_experiment(cfg).to_csv()


def test_parallel_rows_match_serial():
    cfg = default_config("soft_sweep")
    assert run_experiment(replace(cfg, workers=3)).to_csv() == run_experiment(cfg).to_csv()


def test_soft_sweep_defaults():
    res = run_experiment(default_config("soft_sweep"))
    assert res.passed and len(res.records) == 5


def test_failed_rows_are_recorded():
    # the second disk overlaps the first: each row fails but the sweep finishes
    cfg = replace(default_config("mu_sweep"), mu=(10.0, 100.0, 1000.0),
                  inclusions=parse_curves("circle(0.5); circle(0.5) @ 0.2, 0"))
    with pytest.raises(ValueError):
        run_experiment(cfg)
    cfg = replace(default_config("uniformity_sweep"), epsilon=(5.0,))
    res = run_experiment(cfg)
    assert len(res.records) == 5
    assert all(r.status.startswith("error:") for r in res.records)
    assert not res.passed
    assert "error" in format_csv("uniformity_sweep", res.records)


def test_epsilon_sweep_defaults():
    res = run_experiment(default_config("epsilon_sweep"))
    assert res.passed
    assert res.verdicts[0].value >= 3.5


def test_emt_experiment_verdicts():
    res = run_experiment(default_config("emt"))
    assert res.passed
    names = [v.name for v in res.verdicts]
    assert any("rotation" in n for n in names)
    kite = replace(default_config("emt"), inclusions=parse_curves("kite()"))
    assert not any("rotation" in v.name for v in run_experiment(kite).verdicts)


def test_bvp_check_defaults():
    res = run_experiment(default_config("bvp_check"))
    assert res.passed, res.summary()

import json
import math

import numpy as np
import pytest

import botw

ARMS = [[1.0, 0.0], [0.0, 1.0], [-0.6, 0.8], [0.8, -0.6], [-math.sqrt(0.5), -math.sqrt(0.5)]]


def config(**overrides):
    cfg = {
        "arms": [{"id": f"a{i}", "vector": v} for i, v in enumerate(ARMS)],
        "environment": {"variant": "stochastic", "theta": [-0.6, -0.4]},
        "policy": "ftrl",
        "horizon_T": 256,
        "repetitions": 3,
        "base_seed": 11,
        "record_granularity": "every_round",
    }
    cfg.update(overrides)
    return cfg


def test_design_on_basis():
    arms = botw.ArmSet([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    d = botw.frank_wolfe_design(arms)
    assert d["converged"]
    assert d["g_value"] == pytest.approx(3.0, abs=1e-12)
    np.testing.assert_allclose(d["weights"], [1 / 3] * 3, atol=1e-15)


def test_rank_deficient_raises():
    with pytest.raises(botw.BotwError, match="RankDeficient"):
        botw.ArmSet([[1.0, 0.0], [0.5, 0.0]])


def test_leader_matches_softmax():
    L = np.array([0.3, -1.2, 2.0])
    q = botw.regularized_leader(L, 0.7)
    w = np.exp(-(L - L.min()) / 0.7)
    np.testing.assert_allclose(q, w / w.sum(), rtol=1e-13)


def test_estimate_is_unbiased():
    arms = botw.ArmSet(ARMS)
    p = np.array([0.1, 0.3, 0.2, 0.25, 0.15])
    theta = np.array([0.2, -0.5])
    means = arms.losses(theta)
    total = sum(p[i] * botw.estimate_loss(arms, p, i, means[i]) for i in range(5))
    np.testing.assert_allclose(total, means, atol=1e-12)


def test_run_and_verify_roundtrip():
    out = botw.run(config(), threads=1)
    assert len(out["final_regret"]) == 3
    summary = json.loads(out["summary_json"])
    reports = botw.verify(out["trace_csv"], summary["gap_profile"])
    assert len(reports) == 3
    for r in reports:
        assert "fail" not in r.values()


def test_run_is_deterministic():
    a = botw.run(config(), threads=1)
    b = botw.run(config(), threads=2)
    assert a["trace_csv"] == b["trace_csv"]


def test_sweep_reports_slope():
    s = botw.sweep(config(repetitions=2), [64, 128, 256])
    assert len(s["per_horizon"]) == 3
    assert math.isfinite(s["slope"])

import math

import numpy as np
import pytest

from stable_field_lab.analysis import (
    CONSERVATIVE, DISSIPATIVE, INCONCLUSIVE, estimate_scaling_exponent, frechet_cdf,
    frechet_gof, frechet_quantile, limit_scale_prediction, verdict,
)
from stable_field_lab.simulator import FieldModel, GridSpec, MaximaDataset, partial_maxima, tail_constant

LADDER = (8.0, 16.0, 32.0, 64.0)


def dataset(values, ladder=LADDER, **meta):
    return MaximaDataset(tuple(ladder), np.asarray(values, dtype=float), seed=0,
                         method="cell", level=0, meta=meta)


def frechet_draws(alpha, scale, n, seed):
    rng = np.random.default_rng(seed)
    return scale * (-np.log(rng.uniform(size=n))) ** (-1 / alpha)


def test_exact_power_law_slope():
    base = np.linspace(1, 2, 60)[:, None]
    ds = dataset(base * np.array(LADDER) ** 0.7, p=1, alpha=1.5)
    rep = estimate_scaling_exponent(ds, 0.7)
    assert rep.slope == pytest.approx(0.7, abs=1e-12)
    assert rep.verdict == DISSIPATIVE


def test_slope_invariant_under_scaling():
    rng = np.random.default_rng(0)
    vals = rng.uniform(1, 3, size=(80, 4)) * np.array(LADDER) ** 0.4
    a = estimate_scaling_exponent(dataset(vals), 0.5)
    b = estimate_scaling_exponent(dataset(17.5 * vals), 0.5)
    assert a.slope == pytest.approx(b.slope, abs=1e-12)
    assert a.verdict == b.verdict


def test_conservative_and_inconclusive_verdicts():
    base = np.ones((60, 1))
    slow = dataset(base * np.array(LADDER) ** 0.2)
    assert estimate_scaling_exponent(slow, 1.0).verdict == CONSERVATIVE
    wiggly = dataset(base * np.array([1.0, 3.0, 2.0, 9.0]))
    assert estimate_scaling_exponent(wiggly, 1.0).verdict == INCONCLUSIVE


def test_predicted_from_metadata():
    ds = dataset(np.ones((60, 1)) * np.array(LADDER), p=2, alpha=2)
    assert estimate_scaling_exponent(ds).predicted == 1.0
    with pytest.raises(ValueError, match="metadata"):
        estimate_scaling_exponent(dataset(np.ones((60, 4))))


def test_scaling_input_checks():
    with pytest.raises(ValueError, match="3 distinct"):
        estimate_scaling_exponent(dataset(np.ones((60, 2)), (1, 2)), 1.0)
    with pytest.raises(ValueError, match="50"):
        estimate_scaling_exponent(dataset(np.ones((10, 4))), 1.0)
    vals = np.ones((60, 4))
    vals[:, 2] = 0
    with pytest.raises(ValueError, match="degenerate"):
        estimate_scaling_exponent(dataset(vals), 1.0)


def test_frechet_quantile_values():
    assert frechet_quantile(math.exp(-1), 1.5) == pytest.approx(1.0, abs=1e-14)
    assert frechet_quantile(0.5, 1.0) == pytest.approx(1 / math.log(2), abs=1e-14)
    assert frechet_quantile(0.5, 1.0, 3.0) == pytest.approx(3 / math.log(2), abs=1e-14)
    q = frechet_quantile(np.linspace(0.01, 0.99, 50), 0.8)
    assert np.all(np.diff(q) > 0)
    with pytest.raises(ValueError):
        frechet_quantile(1.0, 1.0)


@pytest.mark.parametrize("alpha,scale", [(0.5, 1.0), (1.5, 2.3), (1.9, 0.1)])
def test_frechet_quantile_inverts_cdf(alpha, scale):
    u = np.linspace(0.001, 0.999, 200)
    np.testing.assert_allclose(frechet_cdf(frechet_quantile(u, alpha, scale), alpha, scale), u, atol=1e-12)


def test_frechet_cdf_support():
    assert np.all(frechet_cdf(np.array([-1.0, 0.0]), 1.5) == 0)


def test_gof_accepts_true_law_and_rejects_wrong_scale():
    alpha, K = 1.5, 1.7
    vals = np.column_stack([frechet_draws(alpha, K, 1000, s) * t ** (1 / alpha)
                            for s, t in enumerate(LADDER)])
    ds = dataset(vals, p=1, alpha=alpha)
    fit = frechet_gof(ds, alpha, K)
    assert max(fit.ks_by_t.values()) < 0.05
    assert fit.passed
    assert not frechet_gof(ds, alpha, 2 * K).passed
    assert frechet_gof(ds, alpha, 2 * K).ks_by_t[64.0] > 0.2


def test_gof_rejects_rising_distance():
    alpha = 1.0
    cols = [frechet_draws(alpha, 1.0, 400, 1), frechet_draws(alpha, 1.0, 400, 2),
            frechet_draws(alpha, 1.0, 400, 3), frechet_draws(alpha, 1.12, 400, 4)]
    ds = dataset(np.column_stack(cols) * np.array(LADDER), p=1, alpha=alpha)
    fit = frechet_gof(ds, alpha, 1.0, threshold=0.5, max_rise=0.01)
    assert not fit.passed


def test_gof_input_checks():
    with pytest.raises(ValueError, match="100"):
        frechet_gof(dataset(np.ones((60, 4)), p=1, alpha=1.5), 1.5, 1.0)
    with pytest.raises(ValueError, match="dissipative"):
        frechet_gof(dataset(np.ones((200, 4)), conservative=True), 1.5, 1.0)


def test_limit_scale_example(example3):
    # K = C^(1/alpha) |w| (2 (|1| + |-1|))^(1/alpha)
    assert limit_scale_prediction(example3) == pytest.approx((4 * tail_constant(1.5)) ** (2 / 3), rel=1e-12)
    cauchy = FieldModel(example3.spec, 1.0, example3.kernel)
    assert limit_scale_prediction(cauchy) == pytest.approx(8 / math.pi, rel=1e-12)


def test_limit_scale_homogeneous(example3):
    assert limit_scale_prediction(example3.scaled(3)) == pytest.approx(3 * limit_scale_prediction(example3))


def test_limit_scale_rejects_conservative(nadkarni):
    with pytest.raises(ValueError, match="conservative"):
        limit_scale_prediction(nadkarni)


def test_verdict_on_simulation(example3):
    ds = partial_maxima(example3, GridSpec(LADDER, 1, 150, seed=3))
    rep = verdict(ds, example3)
    assert rep.predicted_branch == "dissipative"
    assert rep.limit_scale == pytest.approx(limit_scale_prediction(example3))
    doc = rep.to_dict()
    assert set(doc["ks_by_t"]) == {"8", "16", "32", "64"}
    assert doc["matches_prediction"] == rep.matches

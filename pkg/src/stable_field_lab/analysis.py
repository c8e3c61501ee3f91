"""Growth-rate verdicts and Frechet fits for partial-maxima datasets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from .action import classify
from .simulator import FieldModel, MaximaDataset, tail_constant, translation_width

SLOPE_TOL = 0.15
SPREAD_LIMIT = 3.0
KS_THRESHOLD = 0.15
KS_MAX_RISE = 0.05

DISSIPATIVE = "dissipative-consistent"
CONSERVATIVE = "conservative-consistent"
INCONCLUSIVE = "inconclusive"

THRESHOLD_NOTE = (
    "slope tolerance, spread ratio and KS thresholds are engineering choices "
    "for finite samples; no convergence rate backs them"
)


@dataclass
class ScalingReport:
    slope: float
    stderr: float
    medians: dict
    scaled_medians: dict
    predicted: float
    verdict: str
    slope_tol: float = SLOPE_TOL
    spread_limit: float = SPREAD_LIMIT

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "stderr": self.stderr,
            "predicted": self.predicted,
            "verdict": self.verdict,
            "medians": {_key(t): v for t, v in self.medians.items()},
            "scaled_medians": {_key(t): v for t, v in self.scaled_medians.items()},
            "slope_tol": self.slope_tol,
            "spread_limit": self.spread_limit,
        }


@dataclass
class FrechetFit:
    alpha: float
    scale: float
    ks_by_t: dict
    threshold: float = KS_THRESHOLD
    max_rise: float = KS_MAX_RISE
    passed: bool = False

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "scale": self.scale,
            "ks_by_t": {_key(t): v for t, v in self.ks_by_t.items()},
            "threshold": self.threshold,
            "max_rise": self.max_rise,
            "passed": self.passed,
        }


def _key(t) -> str:
    t = float(t)
    return str(int(t)) if t.is_integer() else repr(t)


def _meta_exponent(dataset: MaximaDataset) -> float:
    try:
        return float(dataset.meta["p"]) / float(dataset.meta["alpha"])
    except KeyError as exc:
        raise ValueError("dataset metadata lacks 'p' and 'alpha'") from exc


def estimate_scaling_exponent(dataset: MaximaDataset, predicted: Optional[float] = None, *,
                              slope_tol: float = SLOPE_TOL,
                              spread_limit: float = SPREAD_LIMIT) -> ScalingReport:
    """Slope of log median M_t against log t, and the resulting verdict.

    The verdict is ``dissipative-consistent`` when the slope is within
    ``slope_tol`` of ``p/alpha`` and the medians of ``t^(-p/alpha) M_t`` stay
    within a factor ``spread_limit``; otherwise ``conservative-consistent``
    when those scaled medians strictly decrease along the ladder; otherwise
    ``inconclusive``.  Medians are used because M_t may have no mean.
    """
    ts = np.array(dataset.t_ladder, dtype=float)
    if len(set(ts)) < 3:
        raise ValueError("need at least 3 distinct t values")
    if dataset.replications < 50:
        raise ValueError("need at least 50 replications")
    if np.any(np.all(dataset.values == 0, axis=0)):
        raise ValueError("degenerate dataset: some t has only zero maxima")
    if predicted is None:
        predicted = _meta_exponent(dataset)
    med = np.median(dataset.values, axis=0)
    fit = stats.linregress(np.log(ts), np.log(med))
    scaled = med * ts ** (-predicted)
    spread = scaled.max() / scaled.min()
    if abs(fit.slope - predicted) <= slope_tol and spread < spread_limit:
        verdict = DISSIPATIVE
    elif np.all(np.diff(scaled) < 0):
        verdict = CONSERVATIVE
    else:
        verdict = INCONCLUSIVE
    return ScalingReport(
        slope=float(fit.slope),
        stderr=float(fit.stderr),
        medians={float(t): float(m) for t, m in zip(ts, med)},
        scaled_medians={float(t): float(m) for t, m in zip(ts, scaled)},
        predicted=float(predicted),
        verdict=verdict,
        slope_tol=slope_tol,
        spread_limit=spread_limit,
    )


def frechet_cdf(z, alpha: float, scale: float = 1.0):
    """``P(K Z <= z) = exp(-(z/K)^-alpha)`` for z > 0, and 0 otherwise."""
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.exp(-np.power(np.where(z > 0, z / scale, np.inf), -alpha))
    return np.where(z > 0, out, 0.0)


def frechet_quantile(u, alpha: float, scale: float = 1.0):
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u >= 1)):
        raise ValueError("u must lie in (0, 1)")
    if scale <= 0:
        raise ValueError("scale must be positive")
    q = scale * (-np.log(u)) ** (-1 / alpha)
    return float(q) if q.ndim == 0 else q


def limit_scale_prediction(model: FieldModel) -> float:
    """``K = C_alpha^(1/alpha) K_X`` where ``K_X = lim T^(-p/alpha) b(T)``.

    Uses the closed form ``b(T)^alpha = |w|^alpha (len + 2 T sum_j |A_j|)`` of a
    single box on R^1; for p = 1 the limit is ``|w| (2 sum_j |A_j|)^(1/alpha)``.
    """
    cls = classify(model.spec, model.alpha)
    if cls.conservative:
        raise ValueError("conservative action: K_X = 0, no Frechet limit")
    if model.k != 1 or len(model.kernel) != 1:
        raise ValueError("limit scale needs a single-box kernel on R^1")
    if cls.p != 1:
        raise ValueError(f"closed-form limit needs p = 1, got p = {cls.p}")
    alpha = model.alpha
    w = abs(float(model.kernel[0].w))
    kx = w * (2 * float(translation_width(model.spec))) ** (1 / alpha)
    return tail_constant(alpha) ** (1 / alpha) * kx


def frechet_gof(dataset: MaximaDataset, alpha: float, K: float, p: Optional[int] = None, *,
                threshold: float = KS_THRESHOLD, max_rise: float = KS_MAX_RISE) -> FrechetFit:
    """KS distance of ``t^(-p/alpha) M_t`` to ``K Z_alpha`` for every t of the ladder.

    Passes when the largest-t distance is below ``threshold`` and no step
    along the ladder raises the distance by more than ``max_rise``.
    """
    if dataset.meta.get("conservative"):
        raise ValueError("Frechet limit only applies to dissipative actions")
    if dataset.replications < 100:
        raise ValueError("need at least 100 replications")
    if p is None:
        p = int(dataset.meta.get("p", 1))
    ks = {}
    for j, t in enumerate(dataset.t_ladder):
        z = dataset.values[:, j] * float(t) ** (-p / alpha)
        res = stats.kstest(z, lambda x: frechet_cdf(x, alpha, K))
        ks[float(t)] = float(res.statistic)
    seq = list(ks.values())
    passed = seq[-1] < threshold and all(b - a <= max_rise for a, b in zip(seq, seq[1:]))
    return FrechetFit(alpha=alpha, scale=K, ks_by_t=ks, threshold=threshold,
                      max_rise=max_rise, passed=passed)


@dataclass
class VerdictReport:
    scaling: ScalingReport
    predicted_branch: str
    frechet: Optional[FrechetFit] = None
    limit_scale: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def matches(self) -> bool:
        want = DISSIPATIVE if self.predicted_branch == "dissipative" else CONSERVATIVE
        if self.scaling.verdict != want:
            return False
        return self.frechet is None or self.frechet.passed

    def to_dict(self) -> dict:
        out = {
            "slope": self.scaling.slope,
            "stderr": self.scaling.stderr,
            "predicted": self.scaling.predicted,
            "verdict": self.scaling.verdict,
            "predicted_branch": self.predicted_branch,
            "matches_prediction": self.matches,
            "medians": self.scaling.to_dict()["medians"],
            "scaled_medians": self.scaling.to_dict()["scaled_medians"],
            "ks_by_t": self.frechet.to_dict()["ks_by_t"] if self.frechet else {},
            "limit_scale": self.limit_scale,
            "tolerances": {
                "slope_tol": self.scaling.slope_tol,
                "spread_limit": self.scaling.spread_limit,
                "ks_threshold": self.frechet.threshold if self.frechet else None,
                "ks_max_rise": self.frechet.max_rise if self.frechet else None,
            },
            "note": THRESHOLD_NOTE,
        }
        out.update(self.extra)
        return out


def verdict(dataset: MaximaDataset, model: FieldModel, *, slope_tol: float = SLOPE_TOL,
            ks_threshold: float = KS_THRESHOLD, spread_limit: float = SPREAD_LIMIT,
            max_rise: float = KS_MAX_RISE) -> VerdictReport:
    """Scaling verdict plus, for dissipative models, the Frechet fit at the predicted scale."""
    cls = classify(model.spec, model.alpha)
    predicted = cls.p / model.alpha
    scaling = estimate_scaling_exponent(dataset, predicted, slope_tol=slope_tol,
                                        spread_limit=spread_limit)
    report = VerdictReport(scaling=scaling, predicted_branch=cls.branch)
    if not cls.conservative:
        try:
            K = limit_scale_prediction(model)
        except ValueError as exc:
            report.extra["frechet_skipped"] = str(exc)
        else:
            report.limit_scale = K
            if dataset.replications >= 100:
                report.frechet = frechet_gof(dataset, model.alpha, K, cls.p,
                                             threshold=ks_threshold, max_rise=max_rise)
    return report

"""Regression scoring: R², sMAPE, MSE, MAE and Pearson correlation.

The sMAPE here is 100/n · Σ |y−Y| / (|y|+|Y|), i.e. without the factor 2
that some textbook definitions put in the numerator, so its range is
[0, 100]. Terms where both values are exactly zero contribute zero (the
limit of the term along y=Y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import UndefinedScoreError


def _pair(y, yhat) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float).ravel()
    yhat = np.asarray(yhat, dtype=float).ravel()
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: {y.shape} vs {yhat.shape}")
    if y.size == 0:
        raise ValueError("empty input")
    return y, yhat


def r_squared(y, yhat) -> float:
    """Coefficient of determination, 1 - SS_res/SS_tot.

    Negative when the predictions fit worse than the mean of the
    observations; undefined (raises) when the observations are constant.
    """
    y, yhat = _pair(y, yhat)
    if y.size < 2:
        raise UndefinedScoreError("r_squared needs at least 2 observations")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise UndefinedScoreError("r_squared undefined for constant observations")
    ss_res = float(np.sum((y - yhat) ** 2))
    return 1.0 - ss_res / ss_tot


def smape(y, yhat) -> float:
    """Symmetric mean absolute percentage error in [0, 100]."""
    y, yhat = _pair(y, yhat)
    num = np.abs(y - yhat)
    den = np.abs(y) + np.abs(yhat)
    terms = np.divide(num, den, out=np.zeros_like(num), where=den != 0.0)
    return float(100.0 * terms.mean())


def mse(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.mean((y - yhat) ** 2))


def mae(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.mean(np.abs(y - yhat)))


def pearson(y, yhat) -> tuple[float, float]:
    """Sample Pearson r and the two-sided p-value.

    p comes from t = r·sqrt((n-2)/(1-r²)) against Student's t with n-2
    degrees of freedom (exact CDF, no normal approximation).
    """
    y, yhat = _pair(y, yhat)
    n = y.size
    if n < 3:
        raise UndefinedScoreError("pearson needs at least 3 observations")
    dy = y - y.mean()
    dz = yhat - yhat.mean()
    sy = float(np.sqrt(np.sum(dy**2)))
    sz = float(np.sqrt(np.sum(dz**2)))
    if sy == 0.0 or sz == 0.0:
        raise UndefinedScoreError("pearson undefined for constant input")
    r = float(np.sum(dy * dz) / (sy * sz))
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * np.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * float(stats.t.sf(abs(t), df=n - 2))
    return r, p


@dataclass(frozen=True)
class ScoreSet:
    """All scores for one (observations, predictions) pair."""

    r2: float
    smape: float
    mse: float
    mae: float
    pearson_r: float
    pearson_p: float
    n: int

    def to_json(self) -> dict:
        return {
            "r2": self.r2,
            "smape": self.smape,
            "mse": self.mse,
            "mae": self.mae,
            "pearson_r": self.pearson_r,
            "pearson_p": self.pearson_p,
            "n": self.n,
        }


def score_all(y, yhat) -> ScoreSet:
    y, yhat = _pair(y, yhat)
    r, p = pearson(y, yhat)
    return ScoreSet(
        r2=r_squared(y, yhat),
        smape=smape(y, yhat),
        mse=mse(y, yhat),
        mae=mae(y, yhat),
        pearson_r=r,
        pearson_p=p,
        n=int(y.size),
    )

"""Activity sensitivity indices and contingency reserves from an ensemble."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import ConfigError, DegenerateProject
from .montecarlo import Ensemble, empirical_percentile


@dataclass(frozen=True)
class SensitivityReport:
    """Per-node CI / CrI / SSI with the standard deviations behind them."""

    node_ids: tuple
    node_names: tuple
    ci: np.ndarray
    cri: np.ndarray
    ssi: np.ndarray
    sigma: np.ndarray          # per-node duration sd
    sigma_duration: float      # project duration sd


def criticality_index(ensemble: Ensemble) -> np.ndarray:
    """Fraction of runs in which each node sits on a critical path."""
    return ensemble.critical.mean(axis=0)


def cruciality_index(ensemble: Ensemble, method: str = "pearson") -> np.ndarray:
    """|corr(node duration, project duration)| per node; 0 for degenerate sides."""
    if ensemble.n_runs < 2:
        raise ConfigError("cruciality_index needs at least 2 runs")
    if method not in ("pearson", "spearman"):
        raise ConfigError(f"unknown correlation method {method!r}")
    totals = ensemble.total_duration
    d = ensemble.durations
    if method == "spearman":
        totals = rankdata(totals)
        d = np.column_stack([rankdata(d[:, j]) for j in range(d.shape[1])])
    tc = totals - totals.mean()
    dc = d - d.mean(axis=0)
    denom = np.sqrt((dc * dc).sum(axis=0) * (tc * tc).sum())
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (dc * tc[:, None]).sum(axis=0) / denom
    r = np.where(denom == 0.0, 0.0, r)
    return np.clip(np.abs(r), 0.0, 1.0)


def _column_stds(matrix) -> np.ndarray:
    # contiguous copies so each column reduces exactly like a 1-D array;
    # a single-activity project then gets sigma_i / sigma_PD == 1.0 bitwise
    return np.array([np.ascontiguousarray(matrix[:, j]).std(ddof=1)
                     for j in range(matrix.shape[1])])


def schedule_sensitivity_index(ensemble: Ensemble) -> np.ndarray:
    """CI scaled by the sd ratio of node duration to project duration."""
    if ensemble.n_runs < 2:
        raise ConfigError("schedule_sensitivity_index needs at least 2 runs")
    sigma_pd = float(ensemble.total_duration.std(ddof=1))
    if sigma_pd == 0.0:
        raise DegenerateProject("project duration has zero variance")
    return criticality_index(ensemble) * _column_stds(ensemble.durations) / sigma_pd


def sensitivity_report(ensemble: Ensemble, method: str = "pearson") -> SensitivityReport:
    sigma = _column_stds(ensemble.durations)
    sigma_pd = float(ensemble.total_duration.std(ddof=1))
    ci = criticality_index(ensemble)
    cri = cruciality_index(ensemble, method=method)
    ssi = schedule_sensitivity_index(ensemble)
    return SensitivityReport(node_ids=ensemble.node_ids, node_names=ensemble.node_names,
                             ci=ci, cri=cri, ssi=ssi, sigma=sigma, sigma_duration=sigma_pd)


def contingency_reserve(ensemble: Ensemble, p: float, dimension: str = "cost") -> float:
    """Percentile of the simulated outcome minus the planned baseline value.

    Negative for percentiles that fall below the plan.
    """
    if dimension == "cost":
        samples, planned = ensemble.total_cost, ensemble.bac
    elif dimension == "duration":
        samples, planned = ensemble.total_duration, ensemble.planned_duration
    else:
        raise ConfigError(f"dimension must be 'cost' or 'duration', got {dimension!r}")
    return empirical_percentile(samples, p) - planned

"""Shapley-value attribution for both pipeline stages.

Exact enumeration over feature subsets when the feature count permits
(both stages have at most 9 features), permutation sampling as the
general fallback. Features are marginalized interventionally by
substituting the background mean, a single reference vector.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from math import factorial, sqrt
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .models.fusion import FusionCore, Standardizer
from .models.static import StaticRegressor

EXACT_FEATURE_CAP = 12

ModelFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AttributionReport:
    feature_names: tuple[str, ...]
    per_instance_phi: np.ndarray  # (instances, features)
    base_value: float
    predictions: np.ndarray  # model output per instance
    mean_abs_phi: np.ndarray
    std_abs_phi: np.ndarray
    rank: tuple[int, ...]
    mode: str
    stderr: Optional[np.ndarray] = None  # (instances, features), sampled mode only

    @property
    def n_instances(self) -> int:
        return self.per_instance_phi.shape[0]

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "base_value": self.base_value,
            "mean_abs_phi": self.mean_abs_phi.tolist(),
            "std_abs_phi": self.std_abs_phi.tolist(),
            "rank": list(self.rank),
            "mode": self.mode,
            "per_instance_phi": self.per_instance_phi.tolist(),
            "predictions": self.predictions.tolist(),
        }


@dataclass(frozen=True)
class WaterfallDecomposition:
    instance_id: int
    entries: tuple[tuple[str, float], ...]  # ordered by |phi| descending
    base_value: float
    prediction: float

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "entries": [{"feature": name, "phi": phi} for name, phi in self.entries],
            "base_value": self.base_value,
            "prediction": self.prediction,
        }


def _ranks(mean_abs: np.ndarray, names: Sequence[str]) -> tuple[int, ...]:
    # ties broken by name so ranks are a stable permutation of 1..F
    order = sorted(range(len(names)), key=lambda i: (-mean_abs[i], names[i]))
    rank = [0] * len(names)
    for position, i in enumerate(order):
        rank[i] = position + 1
    return tuple(rank)


def _exact_phi(fn: ModelFn, x: np.ndarray, reference: np.ndarray) -> np.ndarray:
    n_feat = len(x)
    n_masks = 1 << n_feat
    composites = np.tile(reference, (n_masks, 1))
    for mask in range(n_masks):
        for i in range(n_feat):
            if mask >> i & 1:
                composites[mask, i] = x[i]
    values = np.asarray(fn(composites), dtype=float)

    weights = [factorial(s) * factorial(n_feat - s - 1) / factorial(n_feat)
               for s in range(n_feat)]
    phi = np.zeros(n_feat)
    for mask in range(n_masks):
        size = bin(mask).count("1")
        for i in range(n_feat):
            if not mask >> i & 1:
                phi[i] += weights[size] * (values[mask | 1 << i] - values[mask])
    return phi


def _sampled_phi(fn: ModelFn, x: np.ndarray, reference: np.ndarray,
                 n_permutations: int, rng: np.random.Generator):
    n_feat = len(x)
    perms = np.stack([rng.permutation(n_feat) for _ in range(n_permutations)])

    # cumulative reveal: row (t, j) has the first j features of permutation t
    composites = np.tile(reference, (n_permutations, n_feat + 1, 1))
    for t in range(n_permutations):
        for j in range(n_feat):
            composites[t, j + 1:, perms[t, j]] = x[perms[t, j]]
    values = np.asarray(
        fn(composites.reshape(-1, n_feat)), dtype=float
    ).reshape(n_permutations, n_feat + 1)

    marginals = np.zeros((n_permutations, n_feat))
    steps = np.diff(values, axis=1)
    for t in range(n_permutations):
        marginals[t, perms[t]] = steps[t]
    phi = marginals.mean(axis=0)
    stderr = marginals.std(axis=0, ddof=1) / sqrt(n_permutations)
    return phi, stderr


def shapley_values(fn: ModelFn, X: np.ndarray, background: np.ndarray,
                   feature_names: Sequence[str], mode: str = "exact",
                   n_permutations: int = 2000, seed: int = 42) -> AttributionReport:
    """Per-instance Shapley attribution of fn over the given instances.

    fn maps an (n, F) matrix to n outputs. Exact mode enumerates all 2^F
    feature subsets; sampled mode averages marginal contributions over
    random feature orderings and reports a standard error per value.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    background = np.atleast_2d(np.asarray(background, dtype=float))
    if background.shape[0] == 0:
        raise ValueError("background must contain at least one row")
    n_feat = X.shape[1]
    if background.shape[1] != n_feat or len(feature_names) != n_feat:
        raise ValueError(
            f"feature count mismatch: X has {n_feat}, background "
            f"{background.shape[1]}, names {len(feature_names)}"
        )
    if mode not in ("exact", "sampled"):
        raise ValueError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    if mode == "exact" and n_feat > EXACT_FEATURE_CAP:
        raise ValueError(
            f"exact mode enumerates 2^F subsets; F={n_feat} exceeds cap "
            f"{EXACT_FEATURE_CAP}, use mode='sampled'"
        )

    reference = background.mean(axis=0)
    base_value = float(np.asarray(fn(reference[None, :]), dtype=float)[0])
    predictions = np.asarray(fn(X), dtype=float)

    rng = np.random.default_rng(seed)
    phi_rows, stderr_rows = [], []
    for x in X:
        if mode == "exact":
            phi_rows.append(_exact_phi(fn, x, reference))
        else:
            phi, stderr = _sampled_phi(fn, x, reference, n_permutations, rng)
            phi_rows.append(phi)
            stderr_rows.append(stderr)

    per_instance_phi = np.stack(phi_rows)
    mean_abs = np.abs(per_instance_phi).mean(axis=0)
    std_abs = np.abs(per_instance_phi).std(axis=0)
    return AttributionReport(
        feature_names=tuple(feature_names),
        per_instance_phi=per_instance_phi,
        base_value=base_value,
        predictions=predictions,
        mean_abs_phi=mean_abs,
        std_abs_phi=std_abs,
        rank=_ranks(mean_abs, feature_names),
        mode=mode,
        stderr=np.stack(stderr_rows) if stderr_rows else None,
    )


def attribution_summary(report: AttributionReport) -> list[tuple[str, float, float, int]]:
    """(feature, mean |phi|, std |phi|, rank) rows ordered by rank."""
    if not report.feature_names:
        raise ValueError("empty report")
    rows = [
        (name, float(report.mean_abs_phi[i]), float(report.std_abs_phi[i]),
         report.rank[i])
        for i, name in enumerate(report.feature_names)
    ]
    rows.sort(key=lambda row: row[3])
    return rows


def write_summary_csv(report: AttributionReport, path: Union[str, Path]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "mean_abs_phi", "std_abs_phi", "rank"])
        for name, mean, std, rank in attribution_summary(report):
            writer.writerow([name, repr(mean), repr(std), rank])


def waterfall_decomposition(report: AttributionReport,
                            instance_id: int) -> WaterfallDecomposition:
    if not 0 <= instance_id < report.n_instances:
        raise ValueError(
            f"instance {instance_id} not in report (has {report.n_instances})"
        )
    phi = report.per_instance_phi[instance_id]
    order = sorted(range(len(phi)),
                   key=lambda i: (-abs(phi[i]), report.feature_names[i]))
    return WaterfallDecomposition(
        instance_id=instance_id,
        entries=tuple((report.feature_names[i], float(phi[i])) for i in order),
        base_value=report.base_value,
        prediction=float(report.predictions[instance_id]),
    )


def static_branch_attribution(static: StaticRegressor, X: np.ndarray,
                              background: np.ndarray,
                              feature_names: Sequence[str],
                              **kwargs) -> AttributionReport:
    """Attribution of the stage-1 static branch over its 6 inputs."""
    return shapley_values(static.predict, X, background, feature_names, **kwargs)


def temporal_branch_attribution(core: FusionCore, standardizer: Standardizer,
                                static_pred_fixed: float, seq_X: np.ndarray,
                                seq_background: np.ndarray,
                                feature_names: Sequence[str],
                                **kwargs) -> AttributionReport:
    """Attribution of the fusion core over the 4 sequence inputs.

    The static-branch input is pinned at a fixed raw value (typically the
    background mean prediction) so the four temporal features explain the
    core's raw, unclamped output alone.
    """

    def fn(seq_raw: np.ndarray) -> np.ndarray:
        seq_raw = np.atleast_2d(seq_raw)
        fused = np.hstack([seq_raw, np.full((len(seq_raw), 1), static_pred_fixed)])
        std = standardizer.transform(fused)
        return core.predict_raw(std[:, :4], std[:, 4])

    return shapley_values(fn, seq_X, seq_background, feature_names, **kwargs)


def efficiency_attribution(eff_model: StaticRegressor, X: np.ndarray,
                           background: np.ndarray,
                           feature_names: Sequence[str],
                           **kwargs) -> AttributionReport:
    """Attribution of the stage-2 regressor over its 9 inputs."""
    return shapley_values(eff_model.predict, X, background, feature_names, **kwargs)

"""Model bundle persistence.

A bundle is a directory: manifest.json plus three weight blobs. The
manifest pins the schema version, the feature layout (hashed), the
standardizer statistics and a checksum per blob, so a load either
reproduces the saved model bit-for-bit or fails loudly.

Layout:
    manifest.json   metadata, standardizer, checksums
    static.joblib   stage-1 static branch (sklearn estimator)
    fusion.npz      encoder + head parameters as numpy arrays
    stage2.joblib   efficiency-loss regressor (sklearn estimator)
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import joblib
import numpy as np

from .errors import BundleError, CorruptBundleError, NotFittedError, SchemaMismatchError
from .features import SEQUENCE_FEATURE_NAMES, STAGE2_FEATURE_NAMES, STATIC_FEATURE_NAMES
from .models.fusion import FusionConfig, FusionCore, Standardizer
from .models.hybrid import HybridAodModel
from .models.metrics import MetricsReport
from .models.static import StaticRegressor

BUNDLE_SCHEMA_VERSION = 1

MANIFEST_NAME = "manifest.json"
STATIC_BLOB = "static.joblib"
FUSION_BLOB = "fusion.npz"
STAGE2_BLOB = "stage2.joblib"

FEATURE_SCHEMA = {
    "static": list(STATIC_FEATURE_NAMES),
    "sequence": list(SEQUENCE_FEATURE_NAMES),
    "stage2": list(STAGE2_FEATURE_NAMES),
}


def _schema_hash(schema: dict) -> str:
    canonical = json.dumps(schema, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _file_sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass(frozen=True)
class ModelBundle:
    hybrid: HybridAodModel
    eff_model: StaticRegressor
    manifest: dict
    path: Path

    @property
    def seed(self) -> int:
        return int(self.manifest["seed"])

    @property
    def train_metrics(self) -> dict[str, MetricsReport]:
        return {stage: MetricsReport.from_dict(d)
                for stage, d in self.manifest["train_metrics"].items()}


def save_bundle(path: Union[str, Path], hybrid: HybridAodModel,
                eff_model: StaticRegressor,
                train_metrics: dict[str, MetricsReport], seed: int) -> Path:
    if not hybrid.fitted:
        raise NotFittedError("cannot save an unfitted hybrid model")
    if not eff_model.fitted:
        raise NotFittedError("cannot save an unfitted efficiency regressor")

    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    joblib.dump(hybrid.static, out / STATIC_BLOB)
    np.savez(out / FUSION_BLOB, **hybrid.core.get_state())
    joblib.dump(eff_model, out / STAGE2_BLOB)

    manifest = {
        "schema_version": BUNDLE_SCHEMA_VERSION,
        "seed": seed,
        "encoder_kind": hybrid.core.kind,
        "fusion_config": hybrid.core.config.to_dict(),
        "fusion_loss_history": [float(v) for v in hybrid.core.loss_history],
        "standardizer": hybrid.standardizer.to_dict(),
        "static_family": hybrid.static.family,
        "static_hyperparameters": _jsonable(hybrid.static.hyperparameters),
        "stage2_family": eff_model.family,
        "stage2_hyperparameters": _jsonable(eff_model.hyperparameters),
        "feature_schema": FEATURE_SCHEMA,
        "feature_schema_hash": _schema_hash(FEATURE_SCHEMA),
        "train_metrics": {stage: report.to_dict()
                          for stage, report in train_metrics.items()},
        "blobs": {
            name: _file_sha256(out / name)
            for name in (STATIC_BLOB, FUSION_BLOB, STAGE2_BLOB)
        },
    }
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n")
    return out


def _jsonable(params: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in params.items()}


def load_bundle(path: Union[str, Path]) -> ModelBundle:
    root = Path(path)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise BundleError(f"no {MANIFEST_NAME} in {root}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise CorruptBundleError(f"unreadable manifest in {root}: {exc}") from exc

    version = manifest.get("schema_version")
    if version != BUNDLE_SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"bundle schema version {version}, loader supports {BUNDLE_SCHEMA_VERSION}"
        )

    stored_hash = manifest.get("feature_schema_hash")
    if _schema_hash(manifest.get("feature_schema", {})) != stored_hash:
        raise CorruptBundleError("feature schema does not match its recorded hash")
    if manifest["feature_schema"] != FEATURE_SCHEMA:
        raise SchemaMismatchError(
            f"bundle feature schema {manifest['feature_schema']} differs from "
            f"this package's layout {FEATURE_SCHEMA}"
        )

    for name, expected in manifest["blobs"].items():
        blob = root / name
        if not blob.is_file():
            raise BundleError(f"missing blob {name} in {root}")
        actual = _file_sha256(blob)
        if actual != expected:
            raise CorruptBundleError(
                f"checksum mismatch for {name}: expected {expected[:12]}…, "
                f"got {actual[:12]}…"
            )

    static = joblib.load(root / STATIC_BLOB)
    eff_model = joblib.load(root / STAGE2_BLOB)
    with np.load(root / FUSION_BLOB) as npz:
        state = {key: npz[key] for key in npz.files}
    core = FusionCore.from_state(
        kind=manifest["encoder_kind"],
        config=FusionConfig.from_dict(manifest["fusion_config"]),
        state=state,
        loss_history=manifest.get("fusion_loss_history", ()),
    )
    hybrid = HybridAodModel(
        static=static,
        core=core,
        standardizer=Standardizer.from_dict(manifest["standardizer"]),
    )
    return ModelBundle(hybrid=hybrid, eff_model=eff_model,
                       manifest=manifest, path=root)

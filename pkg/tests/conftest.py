"""Shared fixtures.

Training is the expensive part, so one small pipeline (numpy encoder,
few epochs) is trained once per session and shared by the forecast,
bundle, explain, service and CLI tests. The full-size configuration is
exercised only in the acceptance suite.
"""

import dataclasses

import pytest

from dustcast.bundle import load_bundle, save_bundle
from dustcast.config import load_config
from dustcast.features import assemble_datasets
from dustcast.pipeline import train_pipeline
from dustcast.synthetic import generate_synthetic_records


@pytest.fixture(scope="session")
def fast_config():
    cfg = load_config()
    fusion = dataclasses.replace(cfg.fusion, epochs=8, hidden_dim=8)
    return dataclasses.replace(cfg, fusion=fusion,
                               encoder_kind="linear-autoregressive")


@pytest.fixture(scope="session")
def records_small():
    return generate_synthetic_records(n_days=420, seed=7)


@pytest.fixture(scope="session")
def stage1_small(records_small):
    return assemble_datasets(records_small).stage1


@pytest.fixture(scope="session")
def stage2_observed(records_small):
    # bootstrap mode: predicted_aod column carries the observed series
    return assemble_datasets(records_small).stage2


@pytest.fixture(scope="session")
def trained(records_small, fast_config):
    return train_pipeline(records_small, fast_config)


@pytest.fixture(scope="session")
def saved_bundle_dir(tmp_path_factory, trained, fast_config):
    out = tmp_path_factory.mktemp("persist") / "bundle"
    save_bundle(out, trained.hybrid, trained.eff_model, trained.metrics,
                seed=fast_config.seed)
    return out


@pytest.fixture(scope="session")
def loaded_bundle(saved_bundle_dir):
    return load_bundle(saved_bundle_dir)

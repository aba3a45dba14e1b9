import logging

import numpy as np
import pytest
import scipy.sparse as sp

from adaptive_mlc.models.dto import LossConfig, SyntheticSpec, TrainConfig
from adaptive_mlc.models.tensors import Dataset, LabelMatrix, SparseFeatureMatrix
from adaptive_mlc.services.dataset_service import generate_synthetic


@pytest.fixture(autouse=True)
def _reset_root_logging():
    """setup_logging이 붙인 핸들러가 다른 테스트로 새지 않도록 원상 복구"""
    root = logging.getLogger()
    handlers = root.handlers[:]
    level = root.level
    yield
    for handler in root.handlers[:]:
        if handler not in handlers:
            root.removeHandler(handler)
            handler.close()
    root.setLevel(level)


@pytest.fixture
def features_factory():
    """ 밀집 리스트 → SparseFeatureMatrix 를 만드는 Factory Fixture """
    def _create(rows):
        return SparseFeatureMatrix(sp.csr_matrix(np.asarray(rows, dtype=np.float64)))
    return _create


@pytest.fixture
def labels_factory():
    """ 밀집 0/1 리스트 → LabelMatrix 를 만드는 Factory Fixture """
    def _create(rows):
        return LabelMatrix(sp.csr_matrix(np.asarray(rows, dtype=np.float64)))
    return _create


@pytest.fixture
def synthetic_dataset_factory():
    """ 작은 롱테일 합성 데이터셋 Factory (기본: 120 샘플, 12 레이블, 40 피처) """
    def _create(n_samples=120, n_labels=12, n_features=40, seed=7, **kwargs):
        spec = SyntheticSpec(n_samples=n_samples, n_labels=n_labels, n_features=n_features, seed=seed, **kwargs)
        features, labels = generate_synthetic(spec)
        return Dataset(features, labels)
    return _create


@pytest.fixture
def train_config_factory(tmp_path):
    """ 빠른 테스트용 TrainConfig Factory (Adam, 작은 은닉층) """
    def _create(**overrides):
        loss = overrides.pop("loss", None) or LossConfig()
        defaults = {
            "variant": "adaptive",
            "batch_size": 16,
            "max_epochs": 5,
            "early_stop_patience": 50,
            "hidden_dim": 16,
            "learning_rate": 0.01,
            "optimizer": "adam",
            "eval_k": 5,
            "eval_reference_size": 64,
            "seed": 3,
            "output_dir": str(tmp_path / "runs"),
            "loss": loss,
        }
        defaults.update(overrides)
        return TrainConfig(**defaults)
    return _create


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)

"""Pytest configuration and fixtures."""

import os
import tempfile
from pathlib import Path

import numpy as np
import pytest

from src.backends import MockEncoder, MockScorer, ToyBackend
from src.config import ToyBackendConfig


def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line(
        "markers", "property: randomised property checks (many trials per test)"
    )
    config.addinivalue_line(
        "markers", "integration: real model stack; skipped unless ALE_INTEGRATION=1"
    )


def pytest_collection_modifyitems(config, items):
    if os.environ.get("ALE_INTEGRATION") == "1":
        return
    skip = pytest.mark.skip(reason="set ALE_INTEGRATION=1 to run")
    for item in items:
        if "integration" in item.keywords:
            item.add_marker(skip)


class ConstantScorer:
    """Scorer that ignores its inputs."""

    def __init__(self, value: float = 10.0):
        self.value = value
        self.calls = []

    def score(self, image, text):
        self.calls.append((image, text))
        return self.value


@pytest.fixture
def temp_dir():
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture(scope="session")
def toy_backend():
    return ToyBackend.from_config(ToyBackendConfig())


@pytest.fixture
def mock_encoder():
    return MockEncoder()


@pytest.fixture
def mock_scorer():
    return MockScorer()


@pytest.fixture
def constant_scorer():
    return ConstantScorer(10.0)


@pytest.fixture
def source_image():
    """128×128 image: gray background, red square top-left, blue square bottom-right."""
    image = np.full((128, 128, 3), 0.5)
    image[16:56, 16:56] = (0.9, 0.1, 0.1)
    image[72:112, 72:112] = (0.1, 0.1, 0.9)
    return image


@pytest.fixture
def two_object_masks():
    a = np.zeros((128, 128), dtype=bool)
    b = np.zeros((128, 128), dtype=bool)
    a[16:56, 16:56] = True
    b[72:112, 72:112] = True
    return [a, b]

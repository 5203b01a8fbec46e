import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def toy_registry_dir(tmp_path_factory):
    """One cheap trained artifact per mode, built once per session."""
    from fixtures import build_toy_registry

    root = tmp_path_factory.mktemp("registry")
    model_dir = root / "models"
    data_dir = root / "data"
    data_dir.mkdir()
    build_toy_registry(model_dir, data_dir)
    return model_dir


@pytest.fixture(scope="session")
def toy_data_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("toydata")

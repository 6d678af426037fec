import importlib.util
from pathlib import Path

import pytest

# lets the root test run pass when only the simulator is installed
collect_ignore = (
    [] if importlib.util.find_spec("mpisac_plots") else ["test_plots.py"])


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return Path(__file__).parent / "data"

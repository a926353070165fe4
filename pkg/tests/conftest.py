import importlib
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


def _backends():
    names = ["mtgender.aligner._kernels_py"]
    try:
        importlib.import_module("mtgender.aligner._kernels")
        names.append("mtgender.aligner._kernels")
    except ImportError:
        pass
    return names


@pytest.fixture(params=_backends(), ids=lambda n: n.rsplit(".", 1)[-1])
def kernel_backend(request, monkeypatch):
    """Run a test once per available kernel implementation."""
    from mtgender.aligner import model

    module = importlib.import_module(request.param)
    monkeypatch.setattr(model, "kernels", module)
    return module


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)

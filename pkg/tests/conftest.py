import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stretchlab import _kernels_py, stretch  # noqa: E402
from stretchlab._backend import BACKEND  # noqa: E402

BACKENDS = ["python"] + (["cython"] if BACKEND == "cython" else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per available kernel implementation."""
    if request.param == "python":
        monkeypatch.setattr(stretch, "kernels", _kernels_py)
    return request.param


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

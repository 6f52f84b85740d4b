import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from acceptance_registry import RESULTS  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[key])

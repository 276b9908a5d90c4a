import functools
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from baccara.game_core import Model  # noqa: E402
from baccara.solver import solve_model  # noqa: E402

ACCEPTANCE_LINES: dict[int, str] = {}


@functools.lru_cache(maxsize=None)
def solved(name: str, d: int | None = None):
    return solve_model(Model.parse(name, d))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])

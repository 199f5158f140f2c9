import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from acceptance_log import RESULTS as ACCEPTANCE_RESULTS  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE_RESULTS):
        line = f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)

import contextlib

import pytest

_VERDICTS: dict[int, tuple[str, str, str]] = {}


@pytest.fixture
def criterion():
    """Context manager recording PASS/FAIL for one acceptance criterion."""

    @contextlib.contextmanager
    def record(number, title):
        try:
            yield
        except BaseException as exc:
            _VERDICTS[number] = ("FAIL", title, f"{type(exc).__name__}: {exc}".splitlines()[0][:120])
            print(f"criterion {number:2d} FAIL  {title}")
            raise
        prev = _VERDICTS.get(number)
        if prev is None or prev[0] != "FAIL":
            _VERDICTS[number] = ("PASS", title, "")
        print(f"criterion {number:2d} PASS  {title}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        status, title, detail = _VERDICTS[number]
        line = f"criterion {number:2d} {status}  {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))

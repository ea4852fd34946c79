import pytest

_ACCEPTANCE = {}
_REPORTS = []


class Recorder:
    def __call__(self, criterion: int, ok: bool, detail: str) -> bool:
        _ACCEPTANCE[criterion] = (ok, detail)
        return ok

    def report(self, title: str, text: str) -> None:
        _REPORTS.append((title, text))


@pytest.fixture(scope="session")
def record():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    for title, text in _REPORTS:
        tr.section(title)
        tr.write_line(text)
    tr.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")

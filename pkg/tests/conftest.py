"""Shared test plumbing: the acceptance summary table."""

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def record(name: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS[name] = (bool(passed), detail)
    assert passed, f"{name}: {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance summary")
    for name, (passed, detail) in ACCEPTANCE_RESULTS.items():
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{name}] {verdict}: {detail}")

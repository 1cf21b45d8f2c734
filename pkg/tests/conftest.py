ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record(number: int, title: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}"
        terminalreporter.write_line(f"{line}  ({detail})" if detail else line)

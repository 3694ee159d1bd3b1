import sys
from pathlib import Path

# lets test modules import the shared oracles
sys.path.insert(0, str(Path(__file__).resolve().parent))

_criteria: dict[str, list] = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    name = props.get("criterion")
    if name is None:
        return
    entry = _criteria.setdefault(name, [True, []])
    if report.failed:
        entry[0] = False
    if report.when == "call" and props.get("note") and props["note"] not in entry[1]:
        entry[1].append(props["note"])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda s: int(s.split(".")[0])):
        ok, notes = _criteria[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
        for note in notes:
            terminalreporter.write_line(f"      note: {note}")

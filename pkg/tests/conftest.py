import pytest

from lichnerowicz.geometry import flat, hyperbolic

_LINES = pytest.StashKey[dict]()


@pytest.fixture(params=["flat3", "lorentz3", "hyp2", "hyp3"])
def geo(request):
    return {
        "flat3": flat(3),
        "lorentz3": flat(3, (2, 1)),
        "hyp2": hyperbolic(2),
        "hyp3": hyperbolic(3),
    }[request.param]


@pytest.fixture
def criterion(request, capsys):
    """``criterion(label, ok, detail)`` prints and records one acceptance line."""
    lines = request.config.stash.setdefault(_LINES, {})

    def record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {label}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
        lines[label] = line
        with capsys.disabled():
            print("\n" + line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    key = lambda s: (int("".join(ch for ch in s.split()[0] if ch.isdigit())), s)
    for label in sorted(lines, key=key):
        terminalreporter.write_line(lines[label])

import pytest

from gridcov.griddomain import parse_domain

SHAPES = {
    "1x2": "##",
    "1x3": "###",
    "1x4": "####",
    "1x5": "#####",
    "L3": "##\n#.",
    "2x2": "##\n##",
    "2x3": "###\n###",
    "S4": ".##\n##.",
    "T4": "###\n.#.",
    "L4": "###\n#..",
    "2x4": "####\n####",
    "ring": "###\n#.#\n###",
}

SMALL = ["1x2", "1x3", "1x4", "L3", "2x2", "S4", "T4", "L4"]


def domain(key):
    return parse_domain(SHAPES[key], name=key)


@pytest.fixture(params=SMALL)
def small_domain(request):
    return domain(request.param)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)

import os
import sys

import pytest

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, HERE)

ROOT = os.path.dirname(HERE)
FIXTURES = os.path.join(ROOT, "fixtures")
LISTING = os.path.join(FIXTURES, "listing")
AXPY = os.path.join(FIXTURES, "axpy")
SPARK = os.path.join(FIXTURES, "spark")


def read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture
def listing_templates():
    from pstgen.template import load_template

    return (
        load_template(os.path.join(LISTING, "function.c")),
        load_template(os.path.join(LISTING, "kernel.c")),
    )


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)

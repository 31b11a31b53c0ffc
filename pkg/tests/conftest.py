import os
import sys

from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("XXZLADDER_LONG", "") not in ("", "0"):
        return
    skip = pytest.mark.skip(reason="long-running; set XXZLADDER_LONG=1")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)

# criterion number -> (passed, title, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        passed, title, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(
            f"[{'PASS' if passed else 'FAIL'}] criterion {key}: {title} -- {detail}"
        )

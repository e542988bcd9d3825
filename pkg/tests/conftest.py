"""Emit one PASS/FAIL line per acceptance criterion in the terminal log.

Tests tagged with a ``_criterion`` attribute (see test_acceptance.py) get a
summary line printed from the reporting phase, where output bypasses pytest's
per-test capture regardless of capture mode.
"""

import pytest


class _CriterionEcho:
    def __init__(self, config) -> None:
        self.config = config
        self.registry = {}

    def pytest_collection_modifyitems(self, config, items):
        for item in items:
            tag = getattr(getattr(item, "function", None), "_criterion", None)
            if tag is not None:
                self.registry[item.nodeid] = tag

    @pytest.hookimpl(trylast=True)
    def pytest_runtest_logreport(self, report):
        tag = self.registry.get(report.nodeid)
        if tag is None:
            return
        if report.when == "setup" and not report.failed:
            return
        if report.when == "teardown":
            return
        index, total, description = tag
        if report.passed:
            verdict = "PASS"
        elif report.skipped:
            verdict = "SKIP"
        else:
            verdict = "FAIL"
        line = f"{verdict} [{index}/{total}] {description}"
        reporter = self.config.pluginmanager.get_plugin("terminalreporter")
        if reporter is not None:
            reporter.ensure_newline()
            reporter.write_line(line)
        else:
            print(line)


def pytest_configure(config):
    config.pluginmanager.register(_CriterionEcho(config), "criterion-echo")

import pytest


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False,
                     help="run the long oracle tiers")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter, config):
    from helpers import ACCEPTANCE, CRITERIA
    ran = {label for label, _, _ in ACCEPTANCE}
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, detail in sorted(ACCEPTANCE, key=lambda r: CRITERIA.index(r[0])):
        terminalreporter.write_line(f"criterion {label}: {status}  {detail}".rstrip())
    for label in CRITERIA:
        if label not in ran:
            why = "  (needs --slow)" if label.endswith("slow") and not config.getoption("--slow") else ""
            terminalreporter.write_line(f"criterion {label}: NOT RUN{why}")

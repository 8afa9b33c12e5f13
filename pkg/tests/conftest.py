import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    number = getattr(item.function, "criterion", None)
    if number is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        state = "PASS" if rep.passed else "FAIL"
        _ACCEPTANCE[number] = (state, item.function.__doc__.strip().splitlines()[0] if item.function.__doc__ else item.name)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        state, title = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {state}  {title}")

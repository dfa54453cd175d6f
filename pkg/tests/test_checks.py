import pytest

from worms.checks import SUITES


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name):
    res = SUITES[name]()
    assert res.checks
    assert res.passed, res.first_failure

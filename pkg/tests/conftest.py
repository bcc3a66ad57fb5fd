import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--regen-golden",
        action="store_true",
        default=False,
        help="rewrite fixtures/golden_report.json from the current implementation",
    )


@pytest.fixture
def regen_golden(request):
    return request.config.getoption("--regen-golden")

import pytest
import structlog


@pytest.fixture(autouse=True)
def _reset_structlog():
    """Isolate tests from global structlog config bound to a closed capture stream."""
    yield
    structlog.reset_defaults()

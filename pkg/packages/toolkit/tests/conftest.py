import logging
import os

import pytest
import structlog
from hypothesis import HealthCheck, settings

from arcsin_bounds_shared.types.precision import PrecisionConfig

# Oracle evaluations are slow compared to hypothesis' default deadline.
settings.register_profile(
    "ci",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.register_profile(
    "dev",
    max_examples=10,
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture(autouse=True)
def quiet_logs():
    """Warnings and above only, written to whatever stdout is current.

    CLI tests point structlog at the runner's stream, which is closed once
    the invocation returns.
    """
    structlog.configure(
        wrapper_class=structlog.make_filtering_bound_logger(logging.WARNING),
        logger_factory=structlog.PrintLoggerFactory(),
        cache_logger_on_first_use=False,
    )
    yield
    structlog.reset_defaults()


@pytest.fixture
def prec() -> PrecisionConfig:
    """128-bit verification precision."""
    return PrecisionConfig()


@pytest.fixture
def cert_prec() -> PrecisionConfig:
    """256-bit certification precision."""
    return PrecisionConfig.certification()

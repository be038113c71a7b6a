import logging

import pytest

from polymonodromy.core.polycore import RatPoly, chebyshev
from polymonodromy.core.utils import setup_logging


@pytest.fixture(autouse=True)
def configured_logging(tmp_path):
    """Route library logging to a per-test file, as the scripts do."""
    setup_logging(str(tmp_path / "test.log"))
    yield
    logging.getLogger().handlers.clear()


@pytest.fixture
def quartic():
    """x^4 + x: degree 4, three Morse points, full symmetric monodromy."""
    return RatPoly.parse("0,1,0,0,1")


@pytest.fixture
def t3():
    return chebyshev(3)


@pytest.fixture
def square():
    return RatPoly.parse("0,0,1")

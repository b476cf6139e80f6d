import random

import hypothesis
import pytest

from maycompat.linalg import INTEGERS, RATIONALS, prime_field

hypothesis.settings.register_profile("default", deadline=None, max_examples=40)
hypothesis.settings.load_profile("default")

RINGS = [INTEGERS, RATIONALS, prime_field(2), prime_field(7)]


def rng_for(seed):
    return random.Random(seed)


@pytest.fixture(params=RINGS, ids=str)
def ring(request):
    return request.param


# criterion number -> one-line verdict, filled in by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])

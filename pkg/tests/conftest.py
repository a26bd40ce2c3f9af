import pytest

from dsp.bandlimited import synth_random
from dsp.kernel import compute_constants
from dsp.noise import build


@pytest.fixture(scope="session")
def spec():
    return compute_constants(2.0)


@pytest.fixture(scope="session")
def signal(spec):
    """K=16 random signal; window (4, 59)."""
    return synth_random(spec, 16, 0.9, 3)


@pytest.fixture(scope="session")
def model(spec):
    """All noise from dither."""
    return build(spec, 0.0, 1.1)


@pytest.fixture(scope="session")
def noisy_model(spec):
    """sigma_w = 1 plus topping-up dither."""
    return build(spec, 1.0, 1.1)

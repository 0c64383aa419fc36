import numpy as np
import pytest

from cfrelay.diophantine import Constellation
from cfrelay.lattice_core import ChannelState

GOLDEN_CHANNEL = (-1.274, 0.602)
GOLDEN_SNR = 1e4


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def golden_constellation():
    return Constellation(5)


@pytest.fixture
def golden_channel():
    """The golden channel at 40 dB with noise variance 1/SNR."""
    return ChannelState.at_snr(GOLDEN_CHANNEL, GOLDEN_SNR)

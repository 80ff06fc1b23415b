"""Pytest configuration and shared channel fixtures."""

import math

import numpy as np
import pytest

from secrecy_regions.channel import (
    BceChannel,
    DiscreteChannel,
    binary_symmetric,
    compose,
    identity_channel,
    uniform_noise_channel,
)


def binary_entropy(p):
    """h(p) in bits, written out independently of the package."""
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@pytest.fixture
def h2():
    return binary_entropy


@pytest.fixture
def bsc_cascade():
    """X -> BSC(0.1) -> Y1 -> BSC(0.05) -> Y2 -> BSC(0.1) -> Z, marginals only.

    End-to-end crossovers are 0.1, 0.14 and 0.212.
    """
    y1 = binary_symmetric(0.1)
    y2 = compose(y1, binary_symmetric(0.05))
    z = compose(y2, binary_symmetric(0.1))
    return BceChannel(y1, y2, z)


@pytest.fixture
def bsc_cascade_physical(bsc_cascade):
    """The same marginals with the physically degraded joint."""
    joint = np.einsum(
        "xa,ab,bc->xabc",
        bsc_cascade.y1.kernel,
        binary_symmetric(0.05).kernel,
        binary_symmetric(0.1).kernel,
    )
    return BceChannel(bsc_cascade.y1, bsc_cascade.y2, bsc_cascade.z, joint)


@pytest.fixture
def noiseless_bce():
    """Both receivers and the eavesdropper see X."""
    return BceChannel(identity_channel(2), identity_channel(2), identity_channel(2))


@pytest.fixture
def blind_eavesdropper_bce():
    """Noiseless receivers, eavesdropper output independent of X."""
    return BceChannel(identity_channel(2), identity_channel(2), uniform_noise_channel(2, 2))


@pytest.fixture
def ternary_channel():
    return DiscreteChannel(
        np.array(
            [
                [0.7, 0.2, 0.1],
                [0.1, 0.8, 0.1],
                [0.25, 0.25, 0.5],
            ]
        )
    )

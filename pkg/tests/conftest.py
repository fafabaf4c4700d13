"""Shared fixtures: small parameter sets and seeded rngs for fast tests."""

import pytest

from pkeet.params import derive_int_params, derive_ring_params
from pkeet.rng import XofRng


@pytest.fixture(scope="session")
def ring_small():
    """Ring parameters at n=64: full structure, fraction of the cost."""
    return derive_ring_params(128, 64, "toy")


@pytest.fixture(scope="session")
def ring_toy():
    return derive_ring_params(128, 256, "toy")


@pytest.fixture(scope="session")
def int_small():
    """Integer-lattice parameters at n=16 (m=896): fast trapdoor tests."""
    return derive_int_params(128, 16, "toy")


@pytest.fixture(scope="session")
def int_toy():
    return derive_int_params(128, 32, "toy")


@pytest.fixture
def rng():
    return XofRng(b"\x42" * 32)


def seeded(label: str) -> XofRng:
    import hashlib

    return XofRng(hashlib.shake_256(b"pkeet-tests:" + label.encode()).digest(32))

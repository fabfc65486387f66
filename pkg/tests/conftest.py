import numpy as np
import pytest

from hsiseg.cube import BandTriple, pseudo_rgb
from hsiseg.phantom import PhantomSpec, generate


@pytest.fixture(scope="session")
def small_phantom():
    """16x16, 8-band, 2-material noiseless scene with brightness jitter."""
    return generate(PhantomSpec(16, 16, 8, n_materials=2, noise_sigma=0.0, seed=11))


@pytest.fixture(scope="session")
def noisy_phantom():
    return generate(PhantomSpec(24, 20, 12, n_materials=3, noise_sigma=0.01, seed=23))


@pytest.fixture()
def phantom_rgb(small_phantom):
    cube, _ = small_phantom
    return pseudo_rgb(cube, BandTriple.default_for(cube.bands))


def random_mask(rng: np.random.Generator, h: int, w: int, p: float = 0.5) -> np.ndarray:
    return rng.random((h, w)) < p

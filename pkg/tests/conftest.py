import numpy as np
import pytest

import nodalheat as nh


class ConstantModel:
    """Duck-typed scalar field with a fixed value; used as a test function."""

    def __init__(self, value=0.0):
        self.value = value
        self.eigenvalue = 0.0
        self.periodic = (False, False)
        self.frame = (0.0, 0.0, 1.0, 1.0)

    def evaluate(self, x, y):
        return np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, self.value)

    def gradient(self, x, y):
        z = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
        return z, z.copy()


@pytest.fixture(scope="session")
def torus11():
    return nh.make_torus_eigenfunction(1, 1)


@pytest.fixture(scope="session")
def torus11_mask_128(torus11):
    field = nh.sample_field(torus11, nh.grid_for_model(torus11, 128))
    return field, nh.label_nodal_domains(field)


@pytest.fixture(scope="session")
def torus11_mask_256(torus11):
    field = nh.sample_field(torus11, nh.grid_for_model(torus11, 256))
    return field, nh.label_nodal_domains(field)


@pytest.fixture(scope="session")
def unit_square_mask_256():
    grid = nh.GridSpec(nx=256, ny=256)
    field = nh.indicator_field(grid, lambda x, y: np.ones_like(x, dtype=bool))
    return field, nh.label_nodal_domains(field)

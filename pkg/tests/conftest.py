import numpy as np
import pytest

from curvedelta import (make_circle, make_ellipse, make_grid,
                        reparametrize_arclength, scale_to_length)


@pytest.fixture(scope="session")
def circle():
    return make_circle(1.0)


@pytest.fixture(scope="session")
def circle_grid(circle):
    return make_grid(circle, 256)


@pytest.fixture(scope="session")
def ellipse():
    """2:1 ellipse rescaled to length 2 pi, arc-length parametrized."""
    return reparametrize_arclength(scale_to_length(make_ellipse(2.0, 1.0), 2.0 * np.pi))


@pytest.fixture(scope="session")
def ellipse_grid(ellipse):
    return make_grid(ellipse, 256)

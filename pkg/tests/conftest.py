import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

# reference 3x3 window, 8-bit intensities
EXAMPLE_WINDOW = np.array([[108, 195, 55], [176, 130, 76], [180, 95, 185]], dtype=np.float64)


@pytest.fixture
def example_window():
    return EXAMPLE_WINDOW / 255.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)

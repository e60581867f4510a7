import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from fuzzylbp.errors import ContractError
from fuzzylbp.lbp import lbp_code, max_code, neighbor_bits, sign

int_windows = arrays(np.int64, (3, 3), elements=st.integers(0, 255))


def test_sign():
    assert sign(0.0) == 1
    assert sign(-0.3) == 0
    assert sign(0.3) == 1


def test_example_window_bits(example_window):
    # clockwise from the top-left: top row 0,1,0 / right 0 / bottom 1,0,1 / left 1
    assert neighbor_bits(example_window).tolist() == [0, 1, 0, 0, 1, 0, 1, 1]


def test_example_window_code(example_window):
    assert lbp_code(example_window) == oracles.lbp_value(example_window.tolist()) == 420
    assert lbp_code(example_window, "classic") == oracles.lbp_value(example_window.tolist(), True) == 210


def test_constant_window():
    w = np.full((3, 3), 0.4)
    assert lbp_code(w) == 510 == max_code("paper")
    assert lbp_code(w, "classic") == 255 == max_code("classic")


def test_stacked_windows_agree_with_single(rng):
    stack = rng.random((50, 3, 3))
    codes = lbp_code(stack)
    assert codes.shape == (50,)
    assert [lbp_code(w) for w in stack] == codes.tolist()


def test_bad_shape():
    with pytest.raises(ContractError):
        lbp_code(np.zeros((3, 4)))
    with pytest.raises(ContractError):
        lbp_code(np.zeros((3, 3)), "binary")


@given(int_windows, st.integers(-1000, 1000))
def test_shift_invariance(w, c):
    assert lbp_code(w.astype(float)) == lbp_code((w + c).astype(float))


@given(int_windows, st.integers(1, 64))
def test_scale_invariance(w, s):
    assert lbp_code(w.astype(float)) == lbp_code((w * s).astype(float))


@given(arrays(np.float64, (3, 3), elements=st.floats(0, 1)))
def test_range_and_parity(w):
    code = lbp_code(w)
    assert 0 <= code <= 510
    assert code % 2 == 0
    assert 0 <= lbp_code(w, "classic") <= 255

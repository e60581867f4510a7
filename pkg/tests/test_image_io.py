import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from fuzzylbp.errors import ContractError, DecodeError
from fuzzylbp.image_io import (
    GrayImage,
    RawImage,
    decode_pgm,
    encode_pgm,
    load_gray,
    normalize,
    resize_to_multiple_of_3,
    write_pgm,
)


def test_decode_p5():
    data = b"P5 3 3 255\n" + bytes(range(9))
    img = decode_pgm(data)
    assert (img.width, img.height) == (3, 3)
    assert img.pixels.tolist() == [[0, 1, 2], [3, 4, 5], [6, 7, 8]]


def test_p2_matches_p5():
    p2 = b"P2\n# a comment\n3 3\n255\n0 1 2\n3 4 5\n6 7 8\n"
    p5 = b"P5\n3 3\n255\n" + bytes(range(9))
    assert np.array_equal(decode_pgm(p2).pixels, decode_pgm(p5).pixels)


def test_truncated_p5():
    with pytest.raises(DecodeError, match="truncated pixel data") as info:
        decode_pgm(b"P5 3 3 255\n" + bytes(5))
    assert info.value.offset == 11 + 5


def test_truncated_p2():
    with pytest.raises(DecodeError, match="truncated pixel data"):
        decode_pgm(b"P2 3 3 255\n0 1 2 3 4")


@pytest.mark.parametrize(
    "data, fragment",
    [
        (b"P6 3 3 255\n" + bytes(27), "magic"),
        (b"P5 3 3 65535\n" + bytes(18), "maxval"),
        (b"P5 3 x 255\n" + bytes(9), "height"),
        (b"P5 3", "height"),
        (b"P2 3 3 10\n0 0 0 0 0 0 0 0 11", "exceeds maxval"),
    ],
)
def test_malformed_headers(data, fragment):
    with pytest.raises(DecodeError, match=fragment):
        decode_pgm(data)


@settings(max_examples=50)
@given(arrays(np.uint8, st.tuples(st.integers(3, 12), st.integers(3, 12))))
def test_pgm_roundtrip(pixels):
    img = RawImage(pixels.shape[1], pixels.shape[0], pixels)
    back = decode_pgm(encode_pgm(img))
    assert back == img
    assert (back.width, back.height) == (img.width, img.height)


def test_normalize_divides_by_max():
    img = RawImage(3, 3, np.array([[50, 100, 200], [0, 0, 0], [0, 0, 0]]))
    out = normalize(img)
    assert out[0].tolist() == [0.25, 0.5, 1.0]


def test_normalize_constant_and_zero():
    assert np.all(normalize(RawImage(3, 3, np.full((3, 3), 7))) == 1.0)
    assert np.all(normalize(RawImage(3, 3, np.zeros((3, 3)))) == 0.0)


@settings(max_examples=50)
@given(arrays(np.uint8, (6, 9)))
def test_normalized_max_is_one(pixels):
    out = normalize(RawImage(9, 6, pixels))
    if pixels.max() == 0:
        assert out.max() == 0.0
    else:
        assert out.max() == 1.0
        assert out.min() >= 0.0


def test_resize_orl_shape(rng):
    grid = rng.random((112, 92))
    out = resize_to_multiple_of_3(grid, 90, 90)
    assert (out.width, out.height) == (90, 90)
    assert 0.0 <= out.pixels.min() and out.pixels.max() <= 1.0


def test_resize_identity(rng):
    grid = rng.random((63, 63))
    assert np.array_equal(resize_to_multiple_of_3(grid, 63, 63).pixels, grid)


def test_resize_checkerboard_matches_bruteforce():
    board = np.indices((6, 6)).sum(axis=0) % 2.0
    expected = oracles.bilinear(board.tolist(), 3, 3)
    got = resize_to_multiple_of_3(board, 3, 3).pixels
    np.testing.assert_allclose(got, expected, atol=1e-15)
    # every 2x2 footprint of a checkerboard averages to one half
    assert np.all(got == 0.5)


def test_resize_random_matches_bruteforce(rng):
    for shape, target in [((112, 92), (63, 63)), ((20, 31), (45, 27)), ((7, 5), (9, 12))]:
        grid = rng.random(shape)
        got = resize_to_multiple_of_3(grid, *target).pixels
        want = oracles.bilinear(grid.tolist(), target[1], target[0])
        np.testing.assert_allclose(got, want, atol=1e-12)


@pytest.mark.parametrize("w, h", [(64, 63), (63, 2), (0, 3)])
def test_resize_rejects_bad_targets(w, h):
    with pytest.raises(ContractError):
        resize_to_multiple_of_3(np.zeros((9, 9)), w, h)


def test_gray_image_invariants():
    with pytest.raises(ContractError):
        GrayImage(np.zeros((4, 3)))
    with pytest.raises(ContractError):
        GrayImage(np.full((3, 3), 1.5))
    img = GrayImage(np.zeros((3, 6)))
    assert (img.width, img.height) == (6, 3)
    assert not img.pixels.flags.writeable


def test_raw_image_invariants():
    with pytest.raises(ContractError):
        RawImage(2, 3, np.zeros((3, 2)))
    with pytest.raises(ContractError):
        RawImage(3, 3, np.zeros(8))


def test_load_gray(tmp_path, rng):
    pixels = rng.integers(0, 200, size=(112, 92), dtype=np.uint8)
    path = tmp_path / "face.pgm"
    write_pgm(path, RawImage(92, 112, pixels))
    img = load_gray(path, 63, 63)
    expected = oracles.bilinear((pixels / pixels.max()).tolist(), 63, 63)
    np.testing.assert_allclose(img.pixels, expected, atol=1e-12)

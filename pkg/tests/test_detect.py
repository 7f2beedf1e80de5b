"""
Tests for the ML, MMSE and reducer detectors
"""

import numpy as np
import pytest

from risdcc.core.channel import awgn
from risdcc.core.codec_block import encode_block, enumerate_codebook
from risdcc.core.detect import (
    DetectorConfig,
    DetectorKind,
    LinearDetector,
    MLDetector,
    detect_ml,
    detect_mmse,
    detect_reducer,
    make_detector,
    mmse_detector,
)
from risdcc.core.diffraction import GeneratorMatrix, build_generator
from risdcc.core.errors import DetectorError, DimensionMismatch, RankDeficient
from risdcc.core.modem import get_scheme, modulate


@pytest.mark.parametrize("name", ["BPSK", "QPSK"])
def test_ml_matches_brute_force(stack_74, rng, name):
    G = build_generator(stack_74)
    m = get_scheme(name)
    book = enumerate_codebook(G, m)
    d = rng.integers(0, m.order, size=(1000, 4))
    y = awgn(encode_block(G, modulate(d, m)), 1.0, rng)

    decoded = MLDetector(G, m, book)(y)
    for row, out in zip(y, decoded, strict=True):
        best = np.argmin(np.sum(np.abs(row - book.codewords) ** 2, axis=1))
        assert np.array_equal(out, book.datawords[best])


@pytest.mark.parametrize("kind", list(DetectorKind))
def test_noiseless_detection_is_exact(repetition_stack, rng, kind):
    G = build_generator(repetition_stack)
    m = get_scheme("QPSK")
    d = rng.integers(0, 4, size=(200, 2))
    detector = make_detector(DetectorConfig(kind, 0.0), G, m)
    assert np.array_equal(detector(encode_block(G, modulate(d, m))), d)


def test_single_vector_keeps_shape(stack_74):
    G = build_generator(stack_74)
    m = get_scheme("BPSK")
    y = encode_block(G, modulate([0, 1, 1, 0], m))
    assert detect_ml(G, m, y).tolist() == [0, 1, 1, 0]
    assert detect_reducer(G, m, y).tolist() == [0, 1, 1, 0]
    assert detect_mmse(G, m, y, 1e-9).tolist() == [0, 1, 1, 0]


def test_mmse_requires_positive_noise(stack_74):
    with pytest.raises(DetectorError):
        mmse_detector(build_generator(stack_74), get_scheme("BPSK"), 0.0)


def test_mmse_at_zero_noise_falls_back_to_pseudo_inverse(stack_74):
    G = build_generator(stack_74)
    detector = make_detector(DetectorConfig(DetectorKind.MMSE, 0.0), G, get_scheme("BPSK"))
    assert isinstance(detector, LinearDetector)
    assert np.allclose(detector.W @ G.entries, np.eye(4), atol=1e-9)


def test_reducer_rejects_rank_deficient_generator():
    G = GeneratorMatrix.from_entries([[1, 1], [1, 1], [1, 1]])
    with pytest.raises(RankDeficient):
        detect_reducer(G, get_scheme("BPSK"), np.ones(3))


def test_negative_noise_variance():
    with pytest.raises(DetectorError):
        DetectorConfig(DetectorKind.MMSE, -1.0)


def test_received_length_checked(stack_74):
    with pytest.raises(DimensionMismatch):
        detect_ml(build_generator(stack_74), get_scheme("BPSK"), np.ones(6))

"""
Tests for the Hamming(7,4) and (2,1,3) convolutional baselines
"""

import itertools

import numpy as np
import pytest

from risdcc.core.baseline import (
    conv_encode,
    conv_viterbi,
    format_conformance_vectors,
    free_distance,
    hamming_ber_hard_exact,
    hamming_decode_hard,
    hamming_decode_soft,
    hamming_encode,
    hamming_min_distance,
    hamming_syndrome,
    write_conformance_vectors,
)


@pytest.mark.parametrize("data,codeword", [
    ([0, 0, 0, 0], [0, 0, 0, 0, 0, 0, 0]),
    ([1, 0, 0, 0], [1, 0, 0, 0, 1, 1, 0]),
    ([0, 0, 0, 1], [0, 0, 0, 1, 1, 1, 1]),
    ([1, 1, 1, 1], [1, 1, 1, 1, 1, 1, 1]),
])
def test_hamming_vectors(data, codeword):
    assert hamming_encode(data).tolist() == codeword
    assert not hamming_syndrome(codeword).any()


def test_hamming_minimum_distance():
    assert hamming_min_distance() == 3


def test_hamming_corrects_every_single_error():
    words = np.array(list(itertools.product((0, 1), repeat=4)))
    codewords = hamming_encode(words)
    for pos in range(7):
        received = codewords.copy()
        received[:, pos] ^= 1
        assert np.array_equal(hamming_decode_hard(received), words)


def test_hamming_soft_decoding_noiseless():
    words = np.array(list(itertools.product((0, 1), repeat=4)))
    y = 1.0 - 2.0 * hamming_encode(words)
    assert np.array_equal(hamming_decode_soft(y), words)
    assert hamming_decode_soft(y[5]).tolist() == words[5].tolist()


def test_exact_hard_ber_limits():
    assert hamming_ber_hard_exact(0.0) == 0.0
    # at small p the double errors dominate
    assert hamming_ber_hard_exact(1e-4) == pytest.approx(9e-8, rel=0.01)


def test_exact_hard_ber_matches_simulation():
    rng = np.random.default_rng(5)
    p = 0.05
    words = rng.integers(0, 2, (400_000, 4))
    flips = (rng.random((400_000, 7)) < p).astype(np.int64)
    ber = np.mean(hamming_decode_hard(hamming_encode(words) ^ flips) != words)
    assert ber == pytest.approx(hamming_ber_hard_exact(p), rel=0.05)


def test_conv_impulse_response():
    assert conv_encode([1]).tolist() == [1, 1, 0, 1, 1, 1, 1, 1]


def test_conv_free_distance():
    assert free_distance() == 6


@pytest.mark.parametrize("mode", ["hard", "soft"])
def test_conv_noiseless_round_trip(mode):
    rng = np.random.default_rng(9)
    msgs = rng.integers(0, 2, (32, 40))
    coded = conv_encode(msgs)
    y = coded if mode == "hard" else 1.0 - 2.0 * coded
    assert np.array_equal(conv_viterbi(y, mode), msgs)


def test_conv_hard_corrects_two_errors():
    msg = np.array([1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0])
    received = conv_encode(msg)
    received[[2, 15]] ^= 1
    assert np.array_equal(conv_viterbi(received, "hard"), msg)


def test_conv_unknown_mode():
    with pytest.raises(ValueError):
        conv_viterbi(np.zeros(8), "list")


def test_conformance_vectors(tmp_path):
    text = format_conformance_vectors(n_random=4, seed=3)
    lines = text.splitlines()
    assert lines[0] == "# hamming74"
    assert "1000 1000110" in lines
    assert lines[17] == "# conv213"
    assert len(lines) == 22
    path = tmp_path / "vectors.txt"
    write_conformance_vectors(path, n_random=4, seed=3)
    assert path.read_text() == text

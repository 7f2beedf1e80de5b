"""
Tests for the Viterbi engine and the diffractional trellis codes
"""

import io
import itertools

import numpy as np
import pytest

from risdcc.core.baseline import conv_encode, conv_trellis, conv_viterbi
from risdcc.core.codec_trellis import (
    TrellisSpec,
    TrellisState,
    branch_table,
    build_trellis_generator,
    encode_sequence,
    trellis_output,
    viterbi_dcc,
    write_trellis_csv,
)
from risdcc.core.codec_block import encode_block
from risdcc.core.diffraction import GeneratorMatrix
from risdcc.core.errors import DimensionMismatch, StateSpaceTooLarge, UnknownVariant
from risdcc.core.geometry import evenly_spaced_stack
from risdcc.core.modem import get_scheme, modulate
from risdcc.core.trellis import Trellis, viterbi

VARIANTS = ("after_memory", "ahead_memory", "extra_atoms")


def _bpsk(bits):
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def _dcc(variant, carrier, wl, mu=1, k=1, n=2):
    spec = TrellisSpec(variant, k, n, mu, 1)
    stack = evenly_spaced_stack(carrier, spec.layer1_atoms, n, 0.4 * wl, 10 * wl, require_expansion=False)
    return spec, build_trellis_generator(stack, spec)


@pytest.mark.parametrize("length", range(1, 13))
def test_conv_soft_viterbi_is_sequence_ml(length, rng):
    """Exhaustive search over every message of the given length"""
    messages = np.array(list(itertools.product((0, 1), repeat=length)), dtype=np.int64)
    candidates = _bpsk(conv_encode(messages))
    for _ in range(10):
        msg = rng.integers(0, 2, length)
        y = _bpsk(conv_encode(msg)) + rng.normal(scale=0.9, size=2 * (length + 3))
        best = messages[np.argmin(np.sum((y - candidates) ** 2, axis=1))]
        assert np.array_equal(conv_viterbi(y, "soft"), best)


@pytest.mark.parametrize("length", range(1, 13))
def test_conv_hard_viterbi_is_minimum_hamming_distance(length, rng):
    """Hard ties are common, so the decoded path must reach the exhaustive minimum"""
    messages = np.array(list(itertools.product((0, 1), repeat=length)), dtype=np.int64)
    codewords = conv_encode(messages)
    for _ in range(10):
        sent = conv_encode(rng.integers(0, 2, length))
        received = sent ^ (rng.random(sent.size) < 0.12).astype(np.int64)
        best = int(np.min(np.sum(codewords != received, axis=1)))
        decoded = conv_viterbi(received, "hard")
        assert decoded.shape == (length,)
        assert int(np.sum(conv_encode(decoded) != received)) == best


def test_viterbi_batches_like_single_rows(rng):
    msgs = rng.integers(0, 2, (64, 20))
    y = _bpsk(conv_encode(msgs)) + rng.normal(scale=0.8, size=(64, 46))
    batch = conv_viterbi(y, "soft")
    for i in (0, 17, 63):
        assert np.array_equal(batch[i], conv_viterbi(y[i], "soft"))


def test_viterbi_ties_go_to_smaller_sequence():
    """An all-erased observation is equally close to every codeword"""
    decoded = viterbi(conv_trellis("bpsk"), np.zeros((1, 8, 2)))
    assert decoded.tolist() == [[0, 0, 0, 0, 0]]


def test_unterminated_viterbi_length():
    trellis = conv_trellis("bpsk")
    y = trellis.encode([[1, 0, 1, 1]])[:, :4]
    assert viterbi(trellis, y, terminated=False).tolist() == [[1, 0, 1, 1]]


def test_state_limit():
    with pytest.raises(StateSpaceTooLarge):
        Trellis(2, 20, np.zeros((1, 2, 1)))


def test_sequence_too_short():
    with pytest.raises(DimensionMismatch):
        viterbi(conv_trellis("bpsk"), np.zeros((1, 2, 2)))


def test_unknown_variant():
    with pytest.raises(UnknownVariant):
        TrellisSpec("before_memory", 1, 2, 1)


def test_spec_properties():
    spec = TrellisSpec("extra_atoms", 2, 3, 2, 2)
    assert spec.frame_inputs == 16
    assert spec.state_count == 256
    assert spec.layer1_atoms == 6
    assert spec.rate == pytest.approx(2 / 3)


@pytest.mark.parametrize("variant", VARIANTS)
def test_generator_normalization(variant, carrier, wl):
    spec, parts = _dcc(variant, carrier, wl)
    assert np.sum(np.abs(parts.G) ** 2) == pytest.approx(spec.n)
    if variant == "ahead_memory":
        assert np.sum(np.abs(parts.D) ** 2) == pytest.approx(spec.k)
    else:
        assert parts.D is None


def test_wrong_atom_count(carrier, wl):
    spec = TrellisSpec("extra_atoms", 1, 2, 1)
    stack = evenly_spaced_stack(carrier, 1, 2, 0.4 * wl, 10 * wl)
    with pytest.raises(DimensionMismatch):
        build_trellis_generator(stack, spec)


def test_after_memory_flips_phase(carrier, wl):
    spec, parts = _dcc("after_memory", carrier, wl)
    m = get_scheme("BPSK")
    clean = trellis_output(spec, parts, m, TrellisState(((0,),)), [1])
    flipped = trellis_output(spec, parts, m, TrellisState(((1,),)), [1])
    assert np.allclose(flipped, -clean)
    assert np.allclose(clean, parts.G @ np.array([-1.0]))


def test_extra_atoms_feeds_previous_frame(carrier, wl):
    spec, parts = _dcc("extra_atoms", carrier, wl)
    m = get_scheme("BPSK")
    out = trellis_output(spec, parts, m, TrellisState(((1,),)), [0])
    assert np.allclose(out, parts.G @ np.array([1.0, -1.0]))


@pytest.mark.parametrize("variant", VARIANTS)
def test_noiseless_decoding_recovers_frames(variant, carrier, wl, rng):
    spec, parts = _dcc(variant, carrier, wl)
    m = get_scheme("BPSK")
    table = branch_table(spec, parts, m)
    frames = rng.integers(0, 2, (16, 12, 1))
    y = encode_sequence(spec, parts, m, frames, table)
    assert y.shape == (16, 13, 2)
    assert np.array_equal(viterbi_dcc(spec, parts, m, y, table=table), frames)


@pytest.mark.parametrize("variant", VARIANTS)
def test_dcc_viterbi_is_sequence_ml(variant, carrier, wl, rng):
    spec, parts = _dcc(variant, carrier, wl)
    m = get_scheme("BPSK")
    table = branch_table(spec, parts, m)
    length = 5
    sequences = np.array(list(itertools.product((0, 1), repeat=length)), dtype=np.int64)[..., None]
    candidates = encode_sequence(spec, parts, m, sequences, table)
    for _ in range(10):
        truth = rng.integers(0, 2, (length, 1))
        y = encode_sequence(spec, parts, m, truth, table)[0]
        y = y + 0.6 * (rng.normal(size=y.shape) + 1j * rng.normal(size=y.shape))
        best = sequences[np.argmin(np.sum(np.abs(y - candidates) ** 2, axis=(1, 2)))]
        assert np.array_equal(viterbi_dcc(spec, parts, m, y, table=table), best)


def test_qpsk_memory_two(carrier, wl, rng):
    _, parts = _dcc("after_memory", carrier, wl)
    spec = TrellisSpec("after_memory", 1, 2, 2, 2)
    m = get_scheme("QPSK")
    frames = rng.integers(0, 4, (4, 10, 1))
    y = encode_sequence(spec, parts, m, frames)
    assert np.array_equal(viterbi_dcc(spec, parts, m, y), frames)


def test_trellis_csv(carrier, wl):
    spec, parts = _dcc("after_memory", carrier, wl)
    table = branch_table(spec, parts, get_scheme("BPSK"))
    buffer = io.StringIO()
    write_trellis_csv(table, spec, buffer)
    lines = buffer.getvalue().splitlines()
    assert lines[0] == "state,input,next_state,output_index,re,im"
    # 2 states x 2 inputs x 2 outputs
    assert len(lines) == 9


def test_213_extra_atoms_dimensions(carrier, wl):
    spec, parts = _dcc("extra_atoms", carrier, wl, mu=3)
    assert parts.G.shape == (2, 4)
    assert spec.state_count == 8
    table = branch_table(spec, parts, get_scheme("BPSK"))
    assert table.outputs.shape == (8, 2, 2)


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("length", range(1, 9))
def test_213_viterbi_is_sequence_ml(variant, length, carrier, wl, rng):
    spec, parts = _dcc(variant, carrier, wl, mu=3)
    m = get_scheme("BPSK")
    table = branch_table(spec, parts, m)
    sequences = np.array(list(itertools.product((0, 1), repeat=length)), dtype=np.int64)[..., None]
    candidates = encode_sequence(spec, parts, m, sequences, table)
    for _ in range(5):
        truth = rng.integers(0, 2, (length, 1))
        y = encode_sequence(spec, parts, m, truth, table)[0]
        assert y.shape == (length + 3, 2)
        y = y + 0.6 * (rng.normal(size=y.shape) + 1j * rng.normal(size=y.shape))
        best = sequences[np.argmin(np.sum(np.abs(y - candidates) ** 2, axis=(1, 2)))]
        assert np.array_equal(viterbi_dcc(spec, parts, m, y, table=table), best)


def test_oldest_frame_reaches_extra_atoms(carrier, wl):
    spec, parts = _dcc("extra_atoms", carrier, wl, mu=3)
    m = get_scheme("BPSK")
    before = trellis_output(spec, parts, m, TrellisState(((0,), (0,), (0,))), [1])
    after = trellis_output(spec, parts, m, TrellisState(((0,), (0,), (1,))), [1])
    assert np.allclose(after - before, -2 * parts.G[:, 3])


@pytest.mark.parametrize("variant", ["after_memory", "ahead_memory"])
def test_memory_variants_use_only_the_last_frame(variant, carrier, wl):
    spec, parts = _dcc(variant, carrier, wl, mu=3)
    m = get_scheme("BPSK")
    for frames in itertools.product((0, 1), repeat=4):
        d_t, *previous = ((f,) for f in frames)
        full = trellis_output(spec, parts, m, TrellisState(tuple(previous)), d_t)
        recent = trellis_output(spec, parts, m, TrellisState((previous[0], (0,), (0,))), d_t)
        assert np.allclose(full, recent)


def test_after_memory_with_zero_last_frame_is_memoryless(carrier, wl):
    spec, parts = _dcc("after_memory", carrier, wl, mu=3)
    m = get_scheme("BPSK")
    out = trellis_output(spec, parts, m, TrellisState(((0,), (1,), (1,))), [1])
    assert np.allclose(out, parts.G @ modulate([1], m))


@pytest.mark.parametrize("scheme,mu", [("BPSK", 3), ("QPSK", 2)])
def test_ahead_memory_radiates_zeros_when_frame_repeats(scheme, mu, carrier, wl):
    m = get_scheme(scheme)
    spec = TrellisSpec("ahead_memory", 1, 2, mu, m.bits_per_symbol)
    stack = evenly_spaced_stack(carrier, 1, 2, 0.4 * wl, 10 * wl, require_expansion=False)
    parts = build_trellis_generator(stack, spec)
    s_zero = modulate([0], m)
    for d in range(2**m.bits_per_symbol):
        for older in itertools.product(range(2**m.bits_per_symbol), repeat=mu - 1):
            state = TrellisState(((d,), *((o,) for o in older)))
            phase = np.exp(1j * np.angle(modulate([d], m)))
            expected = parts.G @ (phase * (parts.D @ s_zero))
            assert np.allclose(trellis_output(spec, parts, m, state, [d]), expected)


@pytest.mark.parametrize("variant,reach", [("extra_atoms", 3), ("after_memory", 1), ("ahead_memory", 1)])
def test_outputs_are_causal_with_finite_memory(variant, reach, carrier, wl, rng):
    spec, parts = _dcc(variant, carrier, wl, mu=3)
    m = get_scheme("BPSK")
    frames = rng.integers(0, 2, (10, 1))
    changed = frames.copy()
    changed[5] ^= 1
    a = encode_sequence(spec, parts, m, frames)[0]
    b = encode_sequence(spec, parts, m, changed)[0]
    assert np.allclose(a[:5], b[:5])
    assert np.allclose(a[6 + reach:], b[6 + reach:])
    assert not np.allclose(a[5 + reach], b[5 + reach])


def test_zero_memory_extra_atoms_is_block_encoding(carrier, wl):
    spec = TrellisSpec("extra_atoms", 2, 3, 0, 1)
    stack = evenly_spaced_stack(carrier, 2, 3, 0.4 * wl, 10 * wl)
    parts = build_trellis_generator(stack, spec)
    G = GeneratorMatrix.from_entries(parts.G)
    m = get_scheme("BPSK")
    for d in itertools.product((0, 1), repeat=2):
        v = trellis_output(spec, parts, m, TrellisState.zero(spec), d)
        assert np.allclose(v, encode_block(G, modulate(d, m)))

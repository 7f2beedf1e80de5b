"""
AWGN channel, Eb/N0 accounting and seeded random substreams
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import erfc

from risdcc.core.baseline import hamming_ber_hard_exact


def rng_substream(master_seed: int, snr_index: int, batch_index: int) -> np.random.Generator:
    """
    Independent, reproducible generator for one (SNR point, batch) cell.

    Uses numpy's SeedSequence spawn keys, so streams do not depend on the
    order or the process in which batches run.
    """
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(snr_index), int(batch_index)))
    return np.random.Generator(np.random.PCG64(seq))


def awgn(x: ArrayLike, N0: float, rng: np.random.Generator) -> NDArray[np.complex128]:
    """Add circularly-symmetric complex Gaussian noise of variance N0 per entry"""
    if N0 < 0:
        raise ValueError(f"N0 must be non-negative, got {N0}")
    x = np.asarray(x, dtype=np.complex128)
    if N0 == 0:
        return x.copy()
    sigma = math.sqrt(N0 / 2)
    noise = rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)
    return x + sigma * noise


@dataclass(frozen=True)
class ChannelSpec:
    """
    Noise level for one sweep point.

    Eb = energy_per_frame / bits_per_frame and N0 = Eb / 10^(eb_n0_db / 10);
    an infinite Eb/N0 gives N0 = 0.
    """

    eb_n0_db: float
    bits_per_frame: int
    energy_per_frame: float

    @property
    def eb(self) -> float:
        return self.energy_per_frame / self.bits_per_frame

    @property
    def n0(self) -> float:
        if math.isinf(self.eb_n0_db) and self.eb_n0_db > 0:
            return 0.0
        return self.eb / 10 ** (self.eb_n0_db / 10)


def q_function(x: ArrayLike) -> NDArray[np.float64]:
    """Gaussian tail probability Q(x)"""
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2))


def uncoded_ber_theory(eb_n0_db: ArrayLike) -> NDArray[np.float64]:
    ebn0 = 10 ** (np.asarray(eb_n0_db, dtype=np.float64) / 10)
    return q_function(np.sqrt(2 * ebn0))


def hamming_hard_ber(eb_n0_db: float) -> float:
    """Post-decoding BER of Hamming(7,4) with hard decisions on BPSK"""
    p = float(q_function(math.sqrt(2 * (4 / 7) * 10 ** (eb_n0_db / 10))))
    return hamming_ber_hard_exact(p)

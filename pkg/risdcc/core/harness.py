"""
Seeded Monte-Carlo BER engine

Each SNR point is simulated in fixed-size frame batches. Batch ``i`` at a
point draws all its bits and noise from its own substream, keyed by the
master seed, the point's Eb/N0 value and ``i``. Batches are computed in
waves across worker processes and merged strictly in batch order, and the
stopping rule is evaluated after every batch in that order, so tallies do
not depend on the number of workers.
"""

from __future__ import annotations

import csv
import math
import struct
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from multiprocessing.pool import Pool
from typing import IO

import numpy as np

from risdcc.config import Config, detect_workers
from risdcc.core.channel import ChannelSpec, awgn, rng_substream
from risdcc.core.links import Link
from risdcc.core.memory import cleanup_memory, get_memory_info
from risdcc.core.status import RunStatus, start_run, update_run_status
from risdcc.log import logger

CSV_HEADER = ["scheme", "detector", "modulation", "geometry_digest", "seed",
              "eb_n0_db", "frames", "bit_errors", "ber", "ci95"]


@dataclass(frozen=True)
class StoppingRule:
    target_errors: int = 100
    max_bits: int = 10**7
    frames_per_batch: int = 2000

    def __post_init__(self):
        if self.target_errors <= 0 or self.max_bits <= 0 or self.frames_per_batch <= 0:
            raise ValueError("stopping.target_errors, max_bits and frames_per_batch must be positive")


@dataclass(frozen=True)
class BatchTally:
    frames: int
    bit_errors: int
    energy: float


@dataclass(frozen=True)
class BerPoint:
    eb_n0_db: float
    frames: int
    bit_errors: int
    bits_per_frame: int
    energy: float = 0.0

    @property
    def bits(self) -> int:
        return self.frames * self.bits_per_frame

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else 0.0

    @property
    def ci95(self) -> float:
        """Normal-approximation 95% half-width"""
        if not self.bits:
            return 0.0
        p = self.ber
        return 1.96 * math.sqrt(p * (1 - p) / self.bits)

    @property
    def mean_frame_energy(self) -> float:
        return self.energy / self.frames if self.frames else 0.0


@dataclass
class BerCurve:
    scheme: str
    detector: str
    modulation: str
    geometry_digest: str
    seed: int
    points: list[BerPoint] = field(default_factory=list)
    # status record of the run that produced the curve
    run_id: str = ""

    def rows(self) -> list[list[str]]:
        return [
            [self.scheme, self.detector, self.modulation, self.geometry_digest, str(self.seed),
             _fmt(p.eb_n0_db), str(p.frames), str(p.bit_errors), _fmt(p.ber), _fmt(p.ci95)]
            for p in self.points
        ]


def _fmt(x: float) -> str:
    return repr(float(x))


def snr_label(eb_n0_db: float) -> int:
    """Stable non-negative integer for an Eb/N0 value (its IEEE-754 bit pattern)"""
    return int.from_bytes(struct.pack(">d", float(eb_n0_db)), "big")


def simulate_batch(link: Link, n0: float, seed: int, eb_n0_db: float, batch_index: int, frames: int) -> BatchTally:
    """Draw, transmit, add noise and decode one batch of frames"""
    rng = rng_substream(seed, snr_label(eb_n0_db), batch_index)
    bits = rng.integers(0, 2, size=(frames, link.info_bits_per_frame), dtype=np.int64)
    x = link.transmit(bits)
    y = awgn(x, n0, rng)
    decoded = link.receive(y, n0)
    errors = int(np.count_nonzero(decoded != bits))
    energy = float(np.sum(np.abs(x) ** 2))
    return BatchTally(frames, errors, energy)


# Worker-process state; set once per pool by the initializer
_worker_link: Link | None = None


def _init_worker(link: Link):
    global _worker_link
    _worker_link = link


def _batch_task(args: tuple[float, int, float, int, int]) -> BatchTally:
    n0, seed, eb_n0_db, batch_index, frames = args
    return simulate_batch(_worker_link, n0, seed, eb_n0_db, batch_index, frames)


def _batch_sizes(stopping: StoppingRule, bits_per_frame: int) -> list[int]:
    max_frames = max(1, stopping.max_bits // bits_per_frame)
    full, rest = divmod(max_frames, stopping.frames_per_batch)
    return [stopping.frames_per_batch] * full + ([rest] if rest else [])


def run_point(link: Link, eb_n0_db: float, seed: int, stopping: StoppingRule | None = None,
              pool: Pool | None = None, workers: int = 1) -> BerPoint:
    """Simulate one SNR point until the error target or the bit cap is reached"""
    stopping = stopping or StoppingRule()
    channel = ChannelSpec(eb_n0_db, link.info_bits_per_frame, link.energy_per_frame)
    n0 = channel.n0
    sizes = _batch_sizes(stopping, link.info_bits_per_frame)
    frames = errors = 0
    energy = 0.0
    wave = max(1, workers) if pool is not None else 1

    for start in range(0, len(sizes), wave):
        tasks = [(n0, seed, eb_n0_db, i, sizes[i]) for i in range(start, min(start + wave, len(sizes)))]
        if pool is not None:
            tallies = pool.map(_batch_task, tasks)
        else:
            tallies = [simulate_batch(link, *task) for task in tasks]
        for tally in tallies:
            frames += tally.frames
            errors += tally.bit_errors
            energy += tally.energy
            if errors >= stopping.target_errors:
                return BerPoint(eb_n0_db, frames, errors, link.info_bits_per_frame, energy)
    return BerPoint(eb_n0_db, frames, errors, link.info_bits_per_frame, energy)


def sweep_points(start_db: float, stop_db: float, step_db: float) -> list[float]:
    """Inclusive sweep; each point is computed from its index so no drift accumulates"""
    if step_db <= 0:
        raise ValueError(f"sweep step must be positive, got {step_db}")
    count = int(math.floor((stop_db - start_db) / step_db + 1e-9)) + 1
    if count <= 0:
        raise ValueError(f"empty sweep from {start_db} to {stop_db}")
    return [round(start_db + i * step_db, 12) for i in range(count)]


def run_ber(link: Link, sweep_db: Sequence[float], seed: int, stopping: StoppingRule | None = None,
            workers: int | None = None, label: str | None = None) -> BerCurve:
    """BER curve of a link over an ascending Eb/N0 sweep"""
    stopping = stopping or StoppingRule()
    if not sweep_db:
        raise ValueError("sweep must contain at least one point")
    workers = detect_workers() if workers is None else workers
    curve = BerCurve(label or link.scheme, link.detector, link.modulation, link.geometry_digest, seed)
    run_id = curve.run_id = start_run("ber", {"scheme": curve.scheme, "seed": seed, "points": len(sweep_db)})
    logger.info(f"Simulating {curve.scheme} ({curve.detector}, {curve.modulation}) with {workers} worker(s)")

    pool = Pool(processes=workers, initializer=_init_worker, initargs=(link,)) if workers > 1 else None
    try:
        for i, eb_n0_db in enumerate(sorted(sweep_db)):
            update_run_status(run_id, RunStatus.SIMULATING, f"{eb_n0_db} dB", current_step=i, total_steps=len(sweep_db))
            started = time.perf_counter()
            point = run_point(link, eb_n0_db, seed, stopping, pool, workers)
            curve.points.append(point)
            logger.info(
                f"✓ point {eb_n0_db} dB: {point.bit_errors} errors / {point.bits} bits "
                f"(BER {point.ber:.3e}, {time.perf_counter() - started:.1f}s)"
            )
            if Config.ENABLE_MEMORY_MONITORING:
                memory = get_memory_info()
                update_run_status(run_id, RunStatus.SIMULATING, memory_usage=memory)
                logger.debug(f"Memory after {eb_n0_db} dB: {memory['cpu_memory_mb']:.1f} MB")
                cleanup_memory()
    except Exception as e:
        update_run_status(run_id, RunStatus.ERROR, error_message=str(e))
        raise
    finally:
        if pool is not None:
            pool.close()
            pool.join()

    update_run_status(run_id, RunStatus.COMPLETED, current_step=len(sweep_db))
    return curve


def write_ber_csv(curves: Sequence[BerCurve], stream: IO[str]) -> None:
    """One header, then each curve's rows in ascending SNR order"""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for curve in curves:
        writer.writerows(curve.rows())


def highest_common_point(curves: Sequence[BerCurve], min_errors: int = 100) -> tuple[float, list[BerPoint]] | None:
    """
    Highest Eb/N0 at which every curve has a point with at least
    ``min_errors`` bit errors, with those points in curve order.
    """
    reliable = [{p.eb_n0_db: p for p in curve.points if p.bit_errors >= min_errors} for curve in curves]
    if not reliable:
        return None
    shared = set(reliable[0]).intersection(*reliable[1:])
    if not shared:
        return None
    top = max(shared)
    return top, [points[top] for points in reliable]

"""
Feed-forward trellis tables and a batched Viterbi sequence decoder

A state holds the last ``memory`` inputs, most recent in the least
significant base-Q digit. Encoding starts in state 0 and is terminated by
``memory`` all-zero flush inputs. Both the DCC trellis codes and the
convolutional baseline run on this engine.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from risdcc.config import Config
from risdcc.core.errors import DimensionMismatch, StateSpaceTooLarge

BranchMetric = Callable[[NDArray], NDArray[np.float64]]

# Largest F*S*Q*n working array per Viterbi chunk
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True, eq=False)
class Trellis:
    """Branch outputs indexed by (state, input)"""

    n_inputs: int
    memory: int
    outputs: NDArray

    def __post_init__(self):
        if self.memory < 1:
            raise DimensionMismatch(f"trellis memory must be at least 1, got {self.memory}")
        if self.n_states > Config.STATE_LIMIT:
            raise StateSpaceTooLarge(f"{self.n_states} states exceed the limit of {Config.STATE_LIMIT}")
        expected = (self.n_states, self.n_inputs)
        if self.outputs.shape[:2] != expected:
            raise DimensionMismatch(f"outputs must have leading shape {expected}, got {self.outputs.shape}")

    @property
    def n_states(self) -> int:
        return self.n_inputs**self.memory

    @property
    def n_outputs(self) -> int:
        return self.outputs.shape[2]

    def next_state(self, state: ArrayLike, inputs: ArrayLike) -> NDArray[np.int64]:
        q = self.n_inputs
        return np.asarray(inputs) + q * (np.asarray(state) % q ** (self.memory - 1))

    def predecessors(self) -> NDArray[np.int64]:
        """(S, Q) table: predecessor of state ns whose dropped (oldest) input is o"""
        q = self.n_inputs
        ns = np.arange(self.n_states)[:, None]
        o = np.arange(q)[None, :]
        return ns // q + q ** (self.memory - 1) * o

    def encode(self, inputs: ArrayLike) -> NDArray:
        """
        Encode (F, L) input sequences; returns (F, L + memory, n) outputs
        including the zero flush.
        """
        inputs = np.atleast_2d(np.asarray(inputs, dtype=np.int64))
        f, length = inputs.shape
        padded = np.concatenate([inputs, np.zeros((f, self.memory), dtype=np.int64)], axis=1)
        state = np.zeros(f, dtype=np.int64)
        out = np.empty((f, length + self.memory, self.n_outputs), dtype=self.outputs.dtype)
        for t in range(length + self.memory):
            out[:, t] = self.outputs[state, padded[:, t]]
            state = self.next_state(state, padded[:, t])
        return out


def euclidean_metric(trellis: Trellis) -> BranchMetric:
    outputs = trellis.outputs

    def metric(y_t: NDArray) -> NDArray[np.float64]:
        diff = y_t[:, None, None, :] - outputs[None]
        return np.sum(np.abs(diff) ** 2, axis=-1)

    return metric


def hamming_metric(trellis: Trellis) -> BranchMetric:
    outputs = trellis.outputs

    def metric(y_t: NDArray) -> NDArray[np.float64]:
        return np.sum(y_t[:, None, None, :] != outputs[None], axis=-1).astype(np.float64)

    return metric


def viterbi(trellis: Trellis, received: ArrayLike, metric: Literal["euclidean", "hamming"] = "euclidean",
            terminated: bool = True) -> NDArray[np.int64]:
    """
    Maximum-likelihood input sequences for (F, T, n) received blocks.

    With ``terminated`` the last ``memory`` stages are flush stages and the
    path must end in state 0; the flush inputs are dropped from the result.
    Ties resolve to the lexicographically smallest input sequence: survivors
    carry their lexicographic rank among all survivors, and merging paths
    with equal metric keep the lower-ranked one.
    """
    received = np.asarray(received)
    if received.ndim == 2:
        received = received[None]
    f, t_len, n = received.shape
    if n != trellis.n_outputs:
        raise DimensionMismatch(f"received blocks have {n} entries, trellis emits {trellis.n_outputs}")
    n_flush = trellis.memory if terminated else 0
    if t_len < n_flush:
        raise DimensionMismatch(f"sequence of {t_len} stages is shorter than the {n_flush} flush stages")

    per_row = trellis.n_states * trellis.n_inputs * max(n, 1)
    chunk = max(1, _CHUNK_ELEMENTS // per_row)
    branch = euclidean_metric(trellis) if metric == "euclidean" else hamming_metric(trellis)
    parts = [_viterbi_chunk(trellis, received[i:i + chunk], branch, n_flush) for i in range(0, f, chunk)]
    return np.concatenate(parts, axis=0)


def _viterbi_chunk(trellis: Trellis, received: NDArray, branch: BranchMetric, n_flush: int) -> NDArray[np.int64]:
    f, t_len, _ = received.shape
    s, q = trellis.n_states, trellis.n_inputs
    pred = trellis.predecessors()
    f_of_ns = np.arange(s) % q
    states = np.arange(s)
    flush_blocked = f_of_ns != 0

    metric = np.full((f, s), np.inf)
    metric[:, 0] = 0.0
    rank = np.tile(np.arange(s), (f, 1))
    decisions = np.empty((t_len, f, s), dtype=np.min_scalar_type(q))
    rows = np.arange(f)[:, None]

    for t in range(t_len):
        bm = branch(received[:, t])
        cand = metric[:, pred] + bm[:, pred, f_of_ns[:, None]]
        if t >= t_len - n_flush:
            cand[:, flush_blocked, :] = np.inf
        best = cand.min(axis=2, keepdims=True)
        pred_rank = np.where(cand == best, rank[:, pred], s)
        o = np.argmin(pred_rank, axis=2)
        chosen = pred[states, o]
        metric = best[..., 0]
        keys = rank[rows, chosen] * q + f_of_ns
        rank = np.argsort(np.argsort(keys, axis=1, kind="stable"), axis=1, kind="stable")
        decisions[t] = o

    if n_flush:
        state = np.zeros(f, dtype=np.int64)
    else:
        final = np.where(metric == metric.min(axis=1, keepdims=True), rank, s)
        state = np.argmin(final, axis=1)

    inputs = np.empty((f, t_len), dtype=np.int64)
    idx = np.arange(f)
    for t in range(t_len - 1, -1, -1):
        inputs[:, t] = state % q
        state = pred[state, decisions[t, idx, state]]
    return inputs[:, : t_len - n_flush]

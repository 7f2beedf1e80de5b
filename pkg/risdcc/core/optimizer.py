"""
Max-min code distance geometry design

The objective is the minimum Euclidean codeword distance of the
unit-Frobenius-normalized block code a stack produces. Free parameters are
the layer separation and per-atom in-plane coordinates. Every candidate is
projected onto the constraints (box clamp, then nearest-neighbour spacing
repair) before it is evaluated, and only candidates that pass
validate_stack are ever scored.

``multistart_direct_search`` spends half its budget on a space-filling
initial design (an evenly spaced grid in 1-D, scrambled Sobol points
otherwise) and the rest on compass searches with step halving started
from the best design points. ``grid`` evaluates a full factorial grid.
"""

from __future__ import annotations

import csv
import itertools
import math
import warnings
from dataclasses import dataclass, field
from multiprocessing.pool import Pool
from typing import IO, Literal

import numpy as np
from numpy.typing import NDArray
from scipy.stats import qmc

from risdcc.config import detect_workers
from risdcc.core.codec_block import ZERO_DISTANCE_RTOL, enumerate_codebook, minimum_distance
from risdcc.core.diffraction import GeneratorMatrix, build_generator
from risdcc.core.errors import ConfigError, GeometryError, InfeasibleSpace
from risdcc.core.geometry import (
    MAX_SPACING_WL,
    MIN_SEPARATION_WL,
    MIN_SPACING_WL,
    RisStack,
    validate_stack,
)
from risdcc.core.modem import ModulationScheme
from risdcc.core.status import RunStatus, start_run, update_run_status
from risdcc.log import logger

Method = Literal["multistart_direct_search", "grid"]
METHODS = ("multistart_direct_search", "grid")
FREE_PARAMETERS = ("separation", "layer1.x", "layer1.y", "layer2.x", "layer2.y")

_REPAIR_SWEEPS = 100
_IMPROVE_TOL = 1e-12
_MIN_STEP_FRACTION = 1e-6


def objective_from_generator(G: GeneratorMatrix, m: ModulationScheme) -> float:
    """d_min of an already normalized generator, 0 for a non-injective code"""
    codebook = enumerate_codebook(G, m)
    d_min, _ = minimum_distance(codebook)
    scale = float(np.max(np.linalg.norm(codebook.codewords, axis=1)))
    return d_min if d_min > ZERO_DISTANCE_RTOL * max(scale, 1e-300) else 0.0


def objective(stack: RisStack, m: ModulationScheme) -> float:
    """Minimum codeword distance of the unit-Frobenius-normalized code"""
    return objective_from_generator(build_generator(stack, "unit_frobenius"), m)


@dataclass(frozen=True, eq=False)
class SearchSpace:
    """
    Movable parameters of a base stack and their bounds.

    ``z_max_m`` bounds the separation from above (the lower bound is 10
    wavelengths); in-plane coordinates stay inside the box
    [-aperture_m, aperture_m]. Unset bounds default to 30 wavelengths and
    the base layout's extent plus half a wavelength.
    """

    base: RisStack
    free: tuple[str, ...] = ("separation",)
    z_max_m: float | None = None
    aperture_m: float | None = None

    def __post_init__(self):
        free = tuple(dict.fromkeys(self.free))
        if not free:
            raise ConfigError("optimizer.free must name at least one parameter")
        unknown = [p for p in free if p not in FREE_PARAMETERS]
        if unknown:
            raise ConfigError(f"unknown optimizer.free parameters {unknown}; expected {', '.join(FREE_PARAMETERS)}")
        object.__setattr__(self, "free", free)

        wl = self.base.wavelength_m
        if self.z_max_m is None:
            object.__setattr__(self, "z_max_m", max(30.0 * wl, self.base.separation_m))
        if self.aperture_m is None:
            extent = max(np.max(np.abs(self.base.layer1.positions[:, :2])),
                         np.max(np.abs(self.base.layer2.positions[:, :2])))
            object.__setattr__(self, "aperture_m", float(extent) + 0.5 * wl)
        if "separation" in free and self.z_max_m < MIN_SEPARATION_WL * wl * (1 - 1e-9):
            raise InfeasibleSpace(
                f"z_max {self.z_max_m / wl:.6g} wavelengths is below the {MIN_SEPARATION_WL} wavelength minimum separation"
            )
        if self.aperture_m <= 0:
            raise InfeasibleSpace(f"aperture must be positive, got {self.aperture_m}")

    def _slots(self) -> list[tuple[str, int, int, int]]:
        """(parameter, layer, atom, axis) per vector entry; layer 0 marks the separation"""
        slots = []
        for p in self.free:
            if p == "separation":
                slots.append((p, 0, 0, 0))
                continue
            layer_name, axis_name = p.split(".")
            layer = int(layer_name[-1])
            axis = 0 if axis_name == "x" else 1
            size = self.base.layer1.size if layer == 1 else self.base.layer2.size
            slots.extend((p, layer, atom, axis) for atom in range(size))
        return slots

    @property
    def dim(self) -> int:
        return len(self._slots())

    @property
    def lower(self) -> NDArray[np.float64]:
        wl = self.base.wavelength_m
        return np.array([MIN_SEPARATION_WL * wl if s[0] == "separation" else -self.aperture_m for s in self._slots()])

    @property
    def upper(self) -> NDArray[np.float64]:
        return np.array([self.z_max_m if s[0] == "separation" else self.aperture_m for s in self._slots()])

    def initial(self) -> NDArray[np.float64]:
        """The base stack's values of the free parameters"""
        x = []
        for p, layer, atom, axis in self._slots():
            if p == "separation":
                x.append(self.base.separation_m)
            else:
                positions = self.base.layer1.positions if layer == 1 else self.base.layer2.positions
                x.append(positions[atom, axis])
        return np.array(x, dtype=np.float64)

    def _layouts(self, x: NDArray[np.float64]) -> tuple[NDArray, NDArray, float]:
        xy1 = self.base.layer1.positions[:, :2].copy()
        xy2 = self.base.layer2.positions[:, :2].copy()
        sep = self.base.separation_m
        for value, (p, layer, atom, axis) in zip(x, self._slots(), strict=True):
            if p == "separation":
                sep = float(value)
            else:
                (xy1 if layer == 1 else xy2)[atom, axis] = value
        return xy1, xy2, sep

    def apply(self, x: NDArray[np.float64]) -> RisStack:
        """Stack at parameter vector x; raises GeometryError for coincident atoms"""
        xy1, xy2, sep = self._layouts(np.asarray(x, dtype=np.float64))
        return self.base.replace(xy1, xy2, sep)

    def _free_axes(self, layer: int) -> NDArray[np.bool_]:
        return np.array([f"layer{layer}.x" in self.free, f"layer{layer}.y" in self.free])

    def _repair_layer(self, xy: NDArray[np.float64], movable: NDArray[np.bool_]) -> NDArray[np.float64]:
        """Push nearest neighbours into [λ/10, λ/2] along the movable axes"""
        if not movable.any() or len(xy) < 2:
            return xy
        wl = self.base.wavelength_m
        lo = MIN_SPACING_WL * wl * (1 + 1e-6)
        hi = MAX_SPACING_WL * wl * (1 - 1e-6)
        xy = xy.copy()
        for _ in range(_REPAIR_SWEEPS):
            changed = False
            for i in range(len(xy)):
                delta = xy - xy[i]
                dist = np.hypot(delta[:, 0], delta[:, 1])
                dist[i] = np.inf
                j = int(np.argmin(dist))
                d = dist[j]
                if lo <= d <= hi:
                    continue
                direction = delta[j] / d if d > 0 else np.array([1.0, 0.0])
                direction = np.where(movable, direction, 0.0)
                norm = np.linalg.norm(direction)
                if norm == 0:
                    continue
                direction /= norm
                shift = (d - hi) if d > hi else (d - lo)
                xy[i] = np.clip(xy[i] + shift * direction, -self.aperture_m, self.aperture_m)
                changed = True
            if not changed:
                break
        return xy

    def project(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """Clamp to the bounds, then repair intra-layer spacing"""
        x = np.clip(np.asarray(x, dtype=np.float64), self.lower, self.upper)
        xy1, xy2, sep = self._layouts(x)
        xy1 = self._repair_layer(xy1, self._free_axes(1))
        xy2 = self._repair_layer(xy2, self._free_axes(2))
        out = []
        for p, layer, atom, axis in self._slots():
            out.append(sep if p == "separation" else (xy1 if layer == 1 else xy2)[atom, axis])
        return np.array(out, dtype=np.float64)

    def feasible_stack(self, x: NDArray[np.float64]) -> RisStack | None:
        """Stack at x if it satisfies every constraint, else None"""
        try:
            stack = self.apply(x)
        except GeometryError:
            return None
        return stack if validate_stack(stack).ok else None


@dataclass
class OptimizerResult:
    best_stack: RisStack
    best_d_min: float
    best_x: NDArray[np.float64]
    evaluations: int
    seed: int
    method: str
    # (iteration, best d_min so far), one entry per scored candidate
    trace: list[tuple[int, float]] = field(default_factory=list)
    run_id: str = ""


@dataclass
class _Evaluator:
    """Scores projected candidates within a budget, remembering repeats"""

    space: SearchSpace
    m: ModulationScheme
    budget: int
    spent: int = 0
    history: list[tuple[NDArray[np.float64], float]] = field(default_factory=list)
    _cache: dict[bytes, float | None] = field(default_factory=dict)

    @property
    def exhausted(self) -> bool:
        return self.spent >= self.budget

    def __call__(self, x: NDArray[np.float64]) -> tuple[NDArray[np.float64], float | None]:
        x = self.space.project(x)
        key = x.tobytes()
        if key in self._cache:
            return x, self._cache[key]
        if self.exhausted:
            return x, None
        self.spent += 1
        stack = self.space.feasible_stack(x)
        value = None if stack is None else objective(stack, self.m)
        self._cache[key] = value
        if value is not None:
            self.history.append((x, value))
        return x, value


def _initial_design(space: SearchSpace, n: int, seed: int) -> NDArray[np.float64]:
    lo, hi = space.lower, space.upper
    if space.dim == 1:
        return np.linspace(lo[0], hi[0], n)[:, None]
    with warnings.catch_warnings():
        # non power-of-two sample counts only weaken balance properties
        warnings.simplefilter("ignore", UserWarning)
        unit = qmc.Sobol(d=space.dim, scramble=True, seed=seed).random(max(n - 1, 0))
    return np.vstack([space.initial()[None], qmc.scale(unit, lo, hi)]) if len(unit) else space.initial()[None]


def _compass_search(space: SearchSpace, m: ModulationScheme, x0: NDArray[np.float64], value0: float,
                    budget: int) -> list[tuple[NDArray[np.float64], float]]:
    """Opportunistic coordinate search with step halving; returns the scored candidates"""
    evaluate = _Evaluator(space, m, budget)
    x, best = x0, value0
    span = space.upper - space.lower
    step = 0.25 * span
    while not evaluate.exhausted and np.any(step > _MIN_STEP_FRACTION * np.maximum(span, 1e-300)):
        improved = False
        for d in range(space.dim):
            for sign in (1.0, -1.0):
                candidate = x.copy()
                candidate[d] += sign * step[d]
                cx, value = evaluate(candidate)
                if value is not None and value > best + _IMPROVE_TOL:
                    x, best, improved = cx, value, True
                    break
            if evaluate.exhausted:
                break
        if not improved:
            step = step / 2
    return evaluate.history


def _restart_task(args) -> list[tuple[NDArray[np.float64], float]]:
    return _compass_search(*args)


def _best(history: list[tuple[NDArray[np.float64], float]]) -> tuple[NDArray[np.float64], float]:
    """First candidate with the largest value"""
    best_x, best_value = history[0]
    for x, value in history[1:]:
        if value > best_value:
            best_x, best_value = x, value
    return best_x, best_value


def _result(space: SearchSpace, history, seed: int, method: str) -> OptimizerResult:
    if not history:
        raise InfeasibleSpace("no candidate in the search space satisfies the geometry constraints")
    trace, running = [], -np.inf
    for i, (_, value) in enumerate(history):
        running = max(running, value)
        trace.append((i, float(running)))
    best_x, best_value = _best(history)
    return OptimizerResult(space.apply(best_x), float(best_value), best_x, len(history), seed, method, trace)


def optimize(space: SearchSpace, m: ModulationScheme, budget: int, seed: int = 0,
             method: Method = "multistart_direct_search", restarts: int = 8,
             workers: int | None = None) -> OptimizerResult:
    """
    Maximize the normalized minimum codeword distance over the space.

    Results depend only on the arguments other than ``workers``: restarts
    are independent and their histories are merged in restart order.
    """
    if budget < 1:
        raise ConfigError(f"optimizer.budget must be at least 1, got {budget}")
    if method not in METHODS:
        raise ConfigError(f"optimizer.method must be one of {', '.join(METHODS)}, got {method!r}")
    if restarts < 1:
        raise ConfigError(f"optimizer.restarts must be at least 1, got {restarts}")

    run_id = start_run("optimize", {"method": method, "budget": budget, "seed": seed, "free": list(space.free)})
    update_run_status(run_id, RunStatus.OPTIMIZING, f"{method} over {space.dim} parameter(s)", total_steps=budget)
    try:
        if budget == 1:
            result = _result(space, _single(space, m), seed, method)
        elif method == "grid":
            result = _result(space, _grid(space, m, budget), seed, method)
        else:
            result = _result(space, _multistart(space, m, budget, seed, restarts, workers), seed, method)
    except Exception as e:
        update_run_status(run_id, RunStatus.ERROR, error_message=str(e))
        raise
    result.run_id = run_id
    update_run_status(run_id, RunStatus.COMPLETED, current_step=result.evaluations)
    logger.info(f"✓ {method}: best d_min {result.best_d_min:.6g} after {result.evaluations} evaluations")
    return result


def _single(space: SearchSpace, m: ModulationScheme) -> list[tuple[NDArray[np.float64], float]]:
    evaluate = _Evaluator(space, m, 1)
    evaluate(space.initial())
    return evaluate.history


def _grid(space: SearchSpace, m: ModulationScheme, budget: int) -> list[tuple[NDArray[np.float64], float]]:
    per_axis = max(2, int(math.floor(budget ** (1 / space.dim) + 1e-9)))
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(space.lower, space.upper, strict=True)]
    evaluate = _Evaluator(space, m, budget)
    for point in itertools.product(*axes):
        if evaluate.exhausted:
            break
        evaluate(np.array(point))
    return evaluate.history


def _multistart(space: SearchSpace, m: ModulationScheme, budget: int, seed: int, restarts: int,
                workers: int | None) -> list[tuple[NDArray[np.float64], float]]:
    evaluate = _Evaluator(space, m, budget // 2)
    for x in _initial_design(space, budget // 2, seed):
        evaluate(x)
    history = list(evaluate.history)
    if not history:
        return history

    # restart from the best distinct design points, ties to the earlier point
    order = sorted(range(len(history)), key=lambda i: -history[i][1])
    starts = [history[i] for i in order[:restarts]]
    remaining = budget - evaluate.spent
    shares = [remaining // len(starts) + (1 if r < remaining % len(starts) else 0) for r in range(len(starts))]
    tasks = [(space, m, x, value, share) for (x, value), share in zip(starts, shares, strict=True) if share > 0]

    workers = detect_workers() if workers is None else workers
    if workers > 1 and len(tasks) > 1:
        with Pool(processes=min(workers, len(tasks))) as pool:
            runs = pool.map(_restart_task, tasks)
    else:
        runs = [_restart_task(task) for task in tasks]
    for run in runs:
        history.extend(run)
    return history


def write_trace_csv(result: OptimizerResult, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["iteration", "d_min"])
    for iteration, value in result.trace:
        writer.writerow([iteration, repr(value)])

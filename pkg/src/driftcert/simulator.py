"""Seeded Monte Carlo sampling of trajectories and one-step jumps.

Sampling is inverse-CDF over each row's support sorted by target state,
one uniform variate per step.  Trajectory ``t`` of a run with master seed
``s`` draws its uniforms from ``PCG64(SeedSequence([s, t]))``, in chunks
of ``CHUNK`` variates; a stand-alone trajectory with seed ``s`` uses
``PCG64(SeedSequence(s))``.  Because every trajectory owns its stream and
results are stored by trajectory index, the statistics do not depend on how
many workers ran them.

Rows are read from a cumulative table grown on demand for chains with a
declared uniform bound (compiled kernel); other chains are sampled row by
row in Python from the same uniforms.  Rounding deficits of a row (at most
the row tolerance) go to its last support point.
"""

from __future__ import annotations

import csv
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numba
import numpy as np

from .chain_model import ChainSpec

CHUNK = 1 << 16

_EXHAUSTED, _RETURNED, _EXTEND = 0, 1, 2


def _generator(seed_words) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed_words)))


def _sorted_cumulative(targets: np.ndarray, probs: np.ndarray):
    order = np.argsort(targets, axis=1, kind="stable")
    t = np.take_along_axis(targets, order, axis=1)
    p = np.take_along_axis(probs, order, axis=1)
    cum = np.cumsum(p, axis=1)
    last = p.shape[1] - 1 - np.argmax((p > 0)[:, ::-1], axis=1)
    cum[np.arange(cum.shape[0]), last] = np.inf
    return t, cum


class _RowTable:
    """Cumulative rows ``0..n-1``, doubled in size when a walk reaches the edge."""

    def __init__(self, spec: ChainSpec, n: int):
        self.spec = spec
        self.lock = threading.Lock()
        self.targets = np.zeros((0, 1), dtype=np.int64)
        self.cum = np.zeros((0, 1))
        self._grow(n)

    @property
    def size(self) -> int:
        return self.targets.shape[0]

    def _grow(self, n: int) -> None:
        parts = [_sorted_cumulative(b.targets, b.probs) for b in self.spec.blocks(self.size, n - 1)]
        width = max([self.targets.shape[1]] + [t.shape[1] for t, _ in parts])
        ts = [self._pad(self.targets, self.cum, width)]
        for t, c in parts:
            ts.append(self._pad(t, c, width))
        targets = np.concatenate([t for t, _ in ts])
        cum = np.concatenate([c for _, c in ts])
        self.targets, self.cum = targets, cum

    @staticmethod
    def _pad(t, c, width):
        k = width - t.shape[1]
        if k == 0:
            return t, c
        t = np.concatenate([t, np.repeat(t[:, -1:], k, axis=1)], axis=1)
        c = np.concatenate([c, np.full((c.shape[0], k), np.inf)], axis=1)
        return t, c

    def ensure(self, state: int):
        with self.lock:
            if state >= self.size:
                self._grow(max(2 * self.size, state + 1))
            return self.targets, self.cum


@numba.njit(nogil=True, cache=True)
def _walk(state, step0, uniforms, targets, cum, target, stop_on_return, ret_time, lo, hi):
    width = targets.shape[1]
    n_rows = targets.shape[0]
    for k in range(uniforms.shape[0]):
        if state >= n_rows:
            return k, state, ret_time, lo, hi, _EXTEND
        u = uniforms[k]
        for c in range(width):
            if u < cum[state, c]:
                state = targets[state, c]
                break
        if state > hi:
            hi = state
        if state < lo:
            lo = state
        if state == target and ret_time < 0:
            ret_time = step0 + k + 1
            if stop_on_return:
                return k + 1, state, ret_time, lo, hi, _RETURNED
    return uniforms.shape[0], state, ret_time, lo, hi, _EXHAUSTED


class _PythonRows:
    """Row sampler for chains without a declared band (unbounded jumps)."""

    def __init__(self, spec: ChainSpec):
        self.spec = spec
        self.cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def row(self, i: int):
        hit = self.cache.get(i)
        if hit is None:
            r = self.spec.row(i)
            t, c = _sorted_cumulative(
                np.array([r.targets], dtype=np.int64), np.array([r.probs], dtype=float)
            )
            hit = self.cache[i] = (t[0], c[0])
        return hit

    def walk(self, state, step0, uniforms, target, stop_on_return, ret_time, lo, hi):
        for k, u in enumerate(uniforms):
            t, c = self.row(state)
            state = int(t[np.searchsorted(c, u, side="right")])
            hi = max(hi, state)
            lo = min(lo, state)
            if state == target and ret_time < 0:
                ret_time = step0 + k + 1
                if stop_on_return:
                    return k + 1, state, ret_time, lo, hi, _RETURNED
        return len(uniforms), state, ret_time, lo, hi, _EXHAUSTED


class _Engine:
    def __init__(self, spec: ChainSpec, start: int, steps: int, use_kernel: bool | None = None):
        if use_kernel is None:
            use_kernel = spec.uniform_bound is not None
        self.use_kernel = use_kernel
        if use_kernel:
            up = spec.declared_up_bound or 1
            self.table = _RowTable(spec, min(start + 1 + up * steps, start + 1 + CHUNK) + 1)
        else:
            self.rows = _PythonRows(spec)

    def run(self, rng, start, steps, target, stop_on_return):
        state, ret_time, lo, hi, done = start, -1, start, start, 0
        while done < steps:
            uniforms = rng.random(min(CHUNK, steps - done))
            k0 = 0
            while k0 < uniforms.shape[0]:
                if self.use_kernel:
                    targets, cum = self.table.targets, self.table.cum
                    used, state, ret_time, lo, hi, status = _walk(
                        state, done + k0, uniforms[k0:], targets, cum, target, stop_on_return, ret_time, lo, hi
                    )
                    if status == _EXTEND:
                        self.table.ensure(state)
                else:
                    used, state, ret_time, lo, hi, status = self.rows.walk(
                        state, done + k0, uniforms[k0:], target, stop_on_return, ret_time, lo, hi
                    )
                k0 += used
                if status == _RETURNED:
                    return state, ret_time, lo, hi, done + k0
            done += uniforms.shape[0]
        return state, ret_time, lo, hi, done


@dataclass(frozen=True)
class TrajectorySummary:
    start: int
    steps: int
    end_state: int
    min_state: int
    max_state: int
    return_time: int | None  # first n >= 1 with X_n = start, None if censored


def simulate_trajectory(spec: ChainSpec, start: int, steps: int, seed: int, use_kernel: bool | None = None) -> TrajectorySummary:
    """Run ``steps`` steps from ``start``; record the first return to ``start``."""
    if start < 0 or steps < 0:
        raise ValueError("start and steps must be nonnegative")
    eng = _Engine(spec, start, steps, use_kernel)
    end, ret, lo, hi, _ = eng.run(_generator(seed), start, steps, start, False)
    return TrajectorySummary(start, steps, int(end), int(lo), int(hi), None if ret < 0 else int(ret))


@dataclass(frozen=True)
class ReturnStats:
    """Finite-horizon return statistics; a corroboration, never a verdict."""

    target: int
    n_trajectories: int
    max_steps: int
    returned: int
    return_fraction: float
    return_fraction_se: float
    censored_mean_return_time: float | None
    max_state_reached: dict
    master_seed: int

    def to_dict(self) -> dict:
        out = asdict(self)
        out["note"] = (
            "P(return within max_steps); finite horizons cannot separate null recurrence from transience"
        )
        return out


@dataclass(frozen=True)
class _Runs:
    return_time: np.ndarray
    max_state: np.ndarray
    end_state: np.ndarray


def _run_range(spec, eng, target, max_steps, master_seed, ts, out: _Runs):
    for t in ts:
        end_state, ret, _, hi, _ = eng.run(_generator([master_seed, int(t)]), target, max_steps, target, True)
        out.return_time[t] = ret
        out.max_state[t] = hi
        out.end_state[t] = end_state


def run_return_trajectories(
    spec: ChainSpec, target: int, n_traj: int, max_steps: int, master_seed: int,
    workers: int = 1, use_kernel: bool | None = None,
) -> _Runs:
    """Per-trajectory return times (``-1`` if censored), maxima and end states."""
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    eng = _Engine(spec, target, max_steps, use_kernel)
    out = _Runs(np.full(n_traj, -1, dtype=np.int64), np.zeros(n_traj, dtype=np.int64), np.zeros(n_traj, dtype=np.int64))
    if workers <= 1:
        _run_range(spec, eng, target, max_steps, master_seed, range(n_traj), out)
    else:
        chunks = np.array_split(np.arange(n_traj), workers)
        with ThreadPoolExecutor(workers) as pool:
            for f in [pool.submit(_run_range, spec, eng, target, max_steps, master_seed, c, out) for c in chunks]:
                f.result()
    return out


def estimate_return_stats(
    spec: ChainSpec, target: int, n_traj: int, max_steps: int, master_seed: int,
    workers: int = 1, trajectories_csv=None, use_kernel: bool | None = None,
) -> ReturnStats:
    """Fraction of trajectories started at ``target`` that come back within
    ``max_steps`` steps, with the mean return time among those that did."""
    runs = run_return_trajectories(spec, target, n_traj, max_steps, master_seed, workers, use_kernel)
    back = runs.return_time >= 0
    returned = int(back.sum())
    frac = returned / n_traj
    mean_t = float(runs.return_time[back].sum()) / returned if returned else None
    mx = runs.max_state
    stats = ReturnStats(
        target, n_traj, max_steps, returned, frac, math.sqrt(frac * (1 - frac) / n_traj), mean_t,
        {"min": int(mx.min()), "median": float(np.median(mx)), "max": int(mx.max())},
        master_seed,
    )
    if trajectories_csv is not None:
        with open(trajectories_csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["trajectory", "return_time", "max_state", "end_state"])
            for t in range(n_traj):
                w.writerow([t, int(runs.return_time[t]), int(runs.max_state[t]), int(runs.end_state[t])])
    return stats


@dataclass(frozen=True)
class DriftEstimate:
    mean: float
    mean_se: float
    second_moment: float
    second_moment_se: float
    n_samples: int


def empirical_drift(spec: ChainSpec, i: int, n_samples: int, seed: int) -> DriftEstimate:
    """Sample ``n_samples`` jumps from state ``i``; estimate gamma and sigma."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    r = spec.row(i)
    t, c = _sorted_cumulative(np.array([r.targets], dtype=np.int64), np.array([r.probs], dtype=float))
    u = _generator(seed).random(n_samples)
    jumps = (t[0][np.searchsorted(c[0], u, side="right")] - i).astype(float)
    sq = jumps**2
    root_n = math.sqrt(n_samples)
    return DriftEstimate(
        float(jumps.mean()), float(jumps.std(ddof=1) / root_n),
        float(sq.mean()), float(sq.std(ddof=1) / root_n), n_samples,
    )

"""First and second moment drifts, Kaplan's function and local oscillation."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._numerics import column_sum, geometric_partial_sum
from .chain_model import ChainSpec, RowBlock, validate_row
from .errors import RangeTooSmall, TailInconsistent, ZOutOfRange
from .tails import ConstantTail, PowerLawTail

# relative slack used when validating a tail descriptor against the table
TAIL_SLACK = 1e-9
# above this z the quotient is evaluated in factored form; the direct form
# loses about eps / (1 - z) in absolute accuracy
KAPLAN_SWITCH = 0.9


def mean_drift(spec: ChainSpec, i: int) -> float:
    """Expected one-step displacement from state ``i``."""
    row = validate_row(spec, i)
    return math.fsum(p * (j - i) for j, p in row.support)


def second_moment_drift(spec: ChainSpec, i: int) -> float:
    """Expected squared one-step displacement from state ``i``."""
    row = validate_row(spec, i)
    return math.fsum(p * (j - i) ** 2 for j, p in row.support)


def block_moments(block: RowBlock) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(gamma, sigma, first absolute moment) for every row of a block."""
    off = block.offsets.astype(float)
    p = block.probs
    cols = range(p.shape[1])
    gamma = column_sum([p[:, k] * off[:, k] for k in cols])
    sigma = column_sum([p[:, k] * off[:, k] ** 2 for k in cols])
    absm = column_sum([p[:, k] * np.abs(off[:, k]) for k in cols])
    return gamma, sigma, absm


@dataclass(frozen=True, eq=False)
class DriftProfile:
    """Tabulated drifts on ``lo..hi``.

    ``abs_moment`` (the expected absolute jump) is the natural rounding
    scale of ``gamma`` and is what the criteria use to size their slack.
    """

    lo: int
    hi: int
    gamma: np.ndarray
    sigma: np.ndarray
    abs_moment: np.ndarray
    tail: PowerLawTail | ConstantTail | None = None

    def __post_init__(self):
        n = self.hi - self.lo + 1
        for name in ("gamma", "sigma", "abs_moment"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have length {n}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def states(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def index(self, i: int) -> int:
        if not self.lo <= i <= self.hi:
            raise RangeTooSmall(f"state {i} outside profile range [{self.lo}, {self.hi}]")
        return i - self.lo

    def gamma_at(self, i: int) -> float:
        return float(self.gamma[self.index(i)])

    def sigma_at(self, i: int) -> float:
        return float(self.sigma[self.index(i)])

    def restricted(self, lo: int, hi: int) -> "DriftProfile":
        a, b = self.index(lo), self.index(hi)
        return DriftProfile(
            lo, hi, self.gamma[a : b + 1], self.sigma[a : b + 1], self.abs_moment[a : b + 1], self.tail
        )

    def summary(self) -> dict:
        return {
            "range": [self.lo, self.hi],
            "gamma_min": float(self.gamma.min()),
            "gamma_max": float(self.gamma.max()),
            "sigma_min": float(self.sigma.min()),
            "sigma_max": float(self.sigma.max()),
            "tail": None if self.tail is None else self.tail.to_dict(),
        }

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "gamma", "sigma"])
        for i, g, s in zip(self.states, self.gamma, self.sigma):
            w.writerow([int(i), repr(float(g)), repr(float(s))])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            self.write_csv(fh)


def validate_tail(tail: PowerLawTail, states, gamma, abs_moment) -> int | None:
    """First tabulated state that contradicts the descriptor, or None."""
    states = np.asarray(states)
    sel = states >= tail.cutoff
    if not sel.any():
        return None
    i = states[sel]
    center = tail.center(i)
    allowed = center * tail.relative_error_bound(i) + TAIL_SLACK * abs_moment[sel]
    bad = np.abs(gamma[sel] - center) > allowed
    if bad.any():
        return int(i[np.argmax(bad)])
    return None


def drift_profile(
    spec: ChainSpec, lo: int, hi: int, tail: PowerLawTail | None = None
) -> DriftProfile:
    """Tabulate gamma and sigma on ``lo..hi``.

    ``tail`` defaults to the descriptor carried by the spec; homogeneous
    chains get an exact constant tail instead.
    """
    if not 0 <= lo <= hi:
        raise ValueError(f"need 0 <= lo <= hi, got [{lo}, {hi}]")
    parts = [block_moments(b) for b in spec.blocks(lo, hi)]
    gamma = np.concatenate([g for g, _, _ in parts])
    sigma = np.concatenate([s for _, s, _ in parts])
    absm = np.concatenate([a for _, _, a in parts])
    if tail is None:
        tail = spec.tail
    if tail is None and spec.homogeneous_from is not None:
        start = spec.homogeneous_from
        g, s, a = block_moments(next(spec.blocks(start, start)))
        tail = ConstantTail(float(g[0]), float(s[0]), float(a[0]), start)
    if isinstance(tail, PowerLawTail):
        bad = validate_tail(tail, np.arange(lo, hi + 1), gamma, absm)
        if bad is not None:
            raise TailInconsistent(
                f"drift at state {bad} is inconsistent with tail C={tail.C}, alpha={tail.alpha}, D={tail.D}",
                state=bad,
            )
    return DriftProfile(lo, hi, gamma, sigma, absm, tail)


def kaplan_function(spec: ChainSpec, i: int, z: float) -> float:
    """``(z**i - sum_j p_ij z**j) / (1 - z)``.

    Near ``z = 1`` the quotient is rewritten term by term with
    ``z**a - z**b = z**min(a,b) (1 - z) (1 + z + ... + z**(|a-b|-1))``
    so that no cancelling difference is divided by ``1 - z``; this form is
    used for every ``z > KAPLAN_SWITCH``.
    """
    if not 0.0 <= z < 1.0:
        raise ZOutOfRange(f"z must lie in [0, 1), got {z!r}")
    row = validate_row(spec, i)
    if z <= KAPLAN_SWITCH:
        num = math.fsum([z**i] + [-p * z**j for j, p in row.support])
        return num / (1.0 - z)
    terms = []
    for j, p in row.support:
        if j > i:
            terms.append(p * z**i * geometric_partial_sum(j - i, z))
        elif j < i:
            terms.append(-p * z**j * geometric_partial_sum(i - j, z))
    return math.fsum(terms)


def local_oscillation(profile: DriftProfile, i: int, d: int) -> float:
    """``max_{|k-i| <= d} |gamma_k**2 - gamma_i**2|``."""
    if i - d < profile.lo or i + d > profile.hi:
        raise RangeTooSmall(
            f"window [{i - d}, {i + d}] not inside profile range [{profile.lo}, {profile.hi}]"
        )
    a = profile.index(i)
    g2 = profile.gamma[a - d : a + d + 1] ** 2
    return float(np.max(np.abs(g2 - profile.gamma[a] ** 2)))


def oscillation_array(profile: DriftProfile, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Local oscillation for every state whose window fits in the profile.

    Returns ``(states, delta)``.
    """
    n = profile.gamma.shape[0]
    if n < 2 * d + 1:
        raise RangeTooSmall("profile shorter than one oscillation window")
    g2 = profile.gamma**2
    centre = g2[d : n - d]
    delta = np.zeros_like(centre)
    for h in range(-d, d + 1):
        np.maximum(delta, np.abs(g2[d + h : n - d + h] - centre), out=delta)
    return np.arange(profile.lo + d, profile.hi - d + 1), delta

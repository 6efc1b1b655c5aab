"""Closed-form descriptors of the drift sequence beyond a finite table."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


@dataclass(frozen=True)
class PowerLawTail:
    """Asserts ``gamma_i = C * i**-alpha * (1 + eps_i)`` with ``|eps_i| <= D / i``
    for every ``i >= cutoff``.

    ``C`` and ``alpha`` are kept as exact rationals so that boundary cases
    such as ``alpha == 1/2`` are decided exactly.
    """

    C: Fraction
    alpha: Fraction
    D: Fraction = Fraction(0)
    cutoff: int = 1

    def __post_init__(self):
        object.__setattr__(self, "C", as_fraction(self.C))
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "D", as_fraction(self.D))
        if self.C <= 0:
            raise ValueError("tail constant C must be positive")
        if self.alpha <= 0:
            raise ValueError("tail exponent alpha must be positive")
        if self.D < 0:
            raise ValueError("tail error constant D must be nonnegative")
        if self.cutoff < 1:
            raise ValueError("tail cutoff must be >= 1")

    def center(self, i):
        return float(self.C) * np.asarray(i, dtype=float) ** (-float(self.alpha))

    def relative_error_bound(self, i):
        return float(self.D) / np.asarray(i, dtype=float)

    @property
    def square_summable(self) -> bool:
        return 2 * self.alpha > 1

    def positive_beyond(self, i: int) -> bool:
        """True when the descriptor alone forces gamma_k > 0 for all k > i."""
        k = max(i + 1, self.cutoff)
        return self.D < k

    def to_dict(self) -> dict:
        return {
            "kind": "power_law",
            "C": str(self.C),
            "alpha": str(self.alpha),
            "D": str(self.D),
            "cutoff": self.cutoff,
        }


@dataclass(frozen=True)
class ConstantTail:
    """Rows from ``start`` on are translates of one another, so every
    moment is exactly constant there."""

    gamma: float
    sigma: float
    abs_moment: float
    start: int

    def to_dict(self) -> dict:
        return {
            "kind": "constant",
            "gamma": self.gamma,
            "sigma": self.sigma,
            "abs_moment": self.abs_moment,
            "start": self.start,
        }


def tail_from_dict(data):
    if data is None:
        return None
    kind = data.get("kind", "power_law")
    if kind == "power_law":
        return PowerLawTail(
            C=data["C"],
            alpha=data["alpha"],
            D=data.get("D", 0),
            cutoff=int(data.get("cutoff", 1)),
        )
    if kind == "constant":
        return ConstantTail(
            float(data["gamma"]), float(data["sigma"]), float(data["abs_moment"]), int(data["start"])
        )
    raise ValueError(f"unknown tail kind {kind!r}")

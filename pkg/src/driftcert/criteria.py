"""Certificate checkers for the drift and Foster-Lyapunov criteria.

Every checker verifies the hypotheses of one classification result on a
finite range of states and returns a ``Verdict``.  "For all i >= N" cannot
be decided from a table, so each certified verdict says whether it rests
on the scanned horizon only (``HorizonCertified``) or whether a closed-form
tail descriptor extends the hypotheses to every state (``AnalyticTail``).

Inequalities are checked with slack ``TAU_INEQ * min(1, scale)``, where
``scale`` is the rounding scale of the compared quantities (for a drift,
the expected absolute jump; for a Lyapunov increment,
``sum_j p_ij |f(j) - f(i)|``).  Quantities of order one or larger get the
plain absolute slack; much smaller ones (such as the cubes of a vanishing
drift) get a proportionally smaller one, so an inequality between two
numbers near ``1e-18`` is never decided by the slack alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._numerics import column_sum, compensated_suffix_sum, log_log_slope
from .chain_model import ChainSpec
from .drift_analysis import DriftProfile, drift_profile, oscillation_array, validate_tail
from .errors import (
    DriftcertError,
    HorizonTooSmallForBand,
    MissingBounds,
    MissingDownBound,
    NoTailCertificate,
    TailInconsistent,
)
from .tails import ConstantTail, PowerLawTail
from .verdicts import Caveat, Verdict, VerdictClass, strongest

TAU_INEQ = 1e-9
# log-log slope below which a tabulated sequence is treated as vanishing
DECAY_SLOPE = -0.01

V = VerdictClass


def _slack(scale):
    """Absolute slack ``TAU_INEQ``, shrunk in proportion for quantities
    whose rounding scale is below one so that tiny terms are not waved
    through."""
    return TAU_INEQ * np.minimum(1.0, scale)


# --------------------------------------------------------------------------
# Lyapunov functions


@dataclass(frozen=True, eq=False)
class LyapunovFunction:
    """A test function on the states.

    Either a finite ``table`` on ``0..H`` or a closed form ``func`` (a
    vectorized callable on integer arrays), optionally both.
    """

    table: np.ndarray | None = None
    tail_remainder_bound: float = 0.0
    monotone: bool = False
    divergent: bool = False
    bounded: bool = True
    kind: str = "table"
    func: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.table is None and self.func is None:
            raise ValueError("need a table or a closed form")
        if self.table is not None:
            t = np.asarray(self.table, dtype=float)
            t.setflags(write=False)
            object.__setattr__(self, "table", t)
            if self.monotone and np.any(np.diff(t) > 0):
                raise ValueError("table flagged monotone but increases somewhere")
        if self.tail_remainder_bound < 0:
            raise ValueError("tail remainder bound must be nonnegative")

    @property
    def horizon(self) -> float:
        return math.inf if self.func is not None else self.table.shape[0] - 1

    def values(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        if self.func is not None:
            return np.asarray(self.func(idx), dtype=float)
        if idx.size and idx.max() > self.horizon:
            raise HorizonTooSmallForBand(
                f"f is tabulated up to {int(self.horizon)} but rows reach state {int(idx.max())}"
            )
        return self.table[idx]

    def is_nonnegative_on(self, hi: int) -> bool:
        return bool(np.all(self.values(np.arange(0, hi + 1)) >= 0))

    def scaled(self, c: float) -> "LyapunovFunction":
        func = None if self.func is None else (lambda idx, g=self.func: c * g(idx))
        table = None if self.table is None else c * self.table
        return LyapunovFunction(
            table, c * self.tail_remainder_bound, self.monotone and c > 0,
            self.divergent and c > 0, self.bounded, self.kind, func,
        )

    @classmethod
    def identity(cls) -> "LyapunovFunction":
        return cls(func=lambda idx: idx.astype(float), divergent=True, bounded=False, kind="identity")

    @classmethod
    def indicator(cls, target: int = 0) -> "LyapunovFunction":
        """``f(target) = 0`` and ``f = 1`` elsewhere."""
        return cls(func=lambda idx: (idx != target).astype(float), kind="indicator")

    @classmethod
    def from_values(cls, values, **kw) -> "LyapunovFunction":
        return cls(table=np.asarray(values, dtype=float), **kw)


def lyapunov_increment(spec: ChainSpec, f: LyapunovFunction, lo: int, hi: int):
    """``Delta f(i) = sum_j p_ij (f(j) - f(i))`` for ``i`` in ``lo..hi``.

    Returns ``(delta, scale, max_jump)``: the increment, its rounding scale
    ``sum_j p_ij |f(j) - f(i)|`` and ``max_{p_ij > 0} |f(j) - f(i)|``.
    """
    deltas, scales, jumps = [], [], []
    for block in spec.blocks(lo, hi):
        fi = f.values(block.states)
        diff = f.values(block.targets) - fi[:, None]
        p = block.probs
        cols = range(p.shape[1])
        deltas.append(column_sum([p[:, k] * diff[:, k] for k in cols]))
        scales.append(column_sum([p[:, k] * np.abs(diff[:, k]) for k in cols]))
        jumps.append(np.max(np.where(p > 0, np.abs(diff), 0.0), axis=1))
    return np.concatenate(deltas), np.concatenate(scales), np.concatenate(jumps)


def _persistent_start(ok: np.ndarray, lo: int, min_start: int = 1, latest: int | None = None):
    """Smallest ``N >= min_start`` with ``ok`` true on all of ``N..hi``."""
    hi = lo + ok.shape[0] - 1
    bad = np.flatnonzero(~ok)
    n = lo if bad.size == 0 else lo + int(bad[-1]) + 1
    n = max(n, min_start)
    if n > hi or (latest is not None and n > latest):
        return None
    return n


def _midpoint(lo: int, hi: int) -> int:
    return lo + (hi - lo) // 2


def _first_violation(ok, lo, start):
    bad = np.flatnonzero(~ok[start - lo :])
    return None if bad.size == 0 else start + int(bad[0])


def _last_violation(ok, lo):
    bad = np.flatnonzero(~ok)
    return None if bad.size == 0 else lo + int(bad[-1])


def _lyapunov_scan(name, ok, lo, hi, N, success_cls, witnesses, reason_fail):
    """Shared ending of the Lyapunov checkers: fixed or scanned N."""
    if N is None:
        n = _persistent_start(ok, lo, min_start=max(lo, 1), latest=_midpoint(lo, hi))
        if n is None:
            last = _last_violation(ok, lo)
            return Verdict.inconclusive(name, reason_fail, first_violation=last, H=hi)
        N = n
    else:
        bad = _first_violation(ok, lo, N)
        if bad is not None:
            return Verdict.inconclusive(name, reason_fail, first_violation=bad, N=N, H=hi)
    return Verdict(success_cls, name, {"N": N, "H": hi, **witnesses}, Caveat.HORIZON)


def check_foster(spec, f: LyapunovFunction, N: int | None, eps: float, H: int) -> Verdict:
    """Positive recurrence from ``Delta f <= -eps`` for ``i >= N``.

    The drift is bounded above by ``-eps`` (negative drift), and
    ``sum_j p_ij f(j)`` must be finite below ``N``.
    """
    name = "foster"
    if eps <= 0:
        raise ValueError("eps must be positive")
    if N is not None and N < 1:
        raise ValueError("N must be >= 1")
    if not f.is_nonnegative_on(min(H, int(min(f.horizon, H)))):
        return Verdict.inconclusive(name, "f is not nonnegative")
    delta, scale, _ = lyapunov_increment(spec, f, 0, H)
    ok = delta <= -eps + _slack(scale)
    ok[0] = True
    lo_rows = N if N is not None else H + 1
    if not np.all(np.isfinite(delta[:lo_rows])):
        return Verdict.inconclusive(name, "sum_j p_ij f(j) is not finite below N")
    margin = -eps - delta
    v = _lyapunov_scan(
        name, ok[1:], 1, H, N, V.POSITIVE_RECURRENT, {"eps": eps},
        f"increment exceeds -eps = {-eps!r}",
    )
    if v.certified:
        n = v.witnesses["N"]
        v = Verdict(v.cls, name, {**v.witnesses, "min_margin": float(margin[n:].min())}, v.caveat)
    return v


def _tail_refutes_identity(spec: ChainSpec, eps: float, H: int):
    """For ``f(i) = i`` the increment is the drift; a power-law tail sends it to 0."""
    tail = spec.tail
    if not isinstance(tail, PowerLawTail):
        return None
    # largest possible drift at i is C i^-alpha (1 + D/i); find where it drops below eps
    i = max(H + 1, tail.cutoff)
    while float(tail.center(i)) * (1 + float(tail.D) / i) >= eps:
        i *= 2
        if i > 2**62:
            return None
    return i


def check_fmm_transience(spec, f: LyapunovFunction, N: int | None, eps: float, jump_bound: float, H: int) -> Verdict:
    """Transience from ``Delta f >= eps`` plus bounded increments of ``f``."""
    name = "fmm_transience"
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not f.is_nonnegative_on(int(min(f.horizon, H))):
        return Verdict.inconclusive(name, "f is not nonnegative")
    delta, scale, jump = lyapunov_increment(spec, f, 0, H)
    bad_jump = np.flatnonzero(jump > jump_bound + _slack(jump_bound))
    if bad_jump.size:
        return Verdict.inconclusive(
            name, f"|f(i) - f(j)| exceeds d = {jump_bound!r} on a support pair",
            first_violation=int(bad_jump[0]),
        )
    ok = delta >= eps - _slack(scale)
    v = _lyapunov_scan(
        name, ok[1:], 1, H, N, V.TRANSIENT, {"eps": eps, "d": jump_bound},
        f"increment below eps = {eps!r}",
    )
    if v.certified and f.kind == "identity":
        beyond = _tail_refutes_identity(spec, eps, H)
        if beyond is not None:
            return Verdict.inconclusive(
                name,
                "eps is horizon-dependent: the analytic drift tail falls below eps",
                N=v.witnesses["N"], H=H, eps=eps, fails_by_state=beyond,
            )
    return v


def check_mertens_transience(spec, f: LyapunovFunction, N: int | None, H: int) -> Verdict:
    """Transience from a bounded non-constant ``f`` with ``Delta f <= 0``
    for ``i >= N`` and some ``k >= N`` where ``f(k) < min_{i <= N} f(i)``."""
    name = "mertens_transience"
    if not f.bounded:
        return Verdict.inconclusive(name, "f is not bounded")
    vals = f.values(np.arange(0, H + 1))
    if np.all(vals == vals[0]):
        return Verdict.inconclusive(name, "f is constant")
    delta, scale, _ = lyapunov_increment(spec, f, 0, H)
    ok = delta <= _slack(scale)
    R = f.tail_remainder_bound

    def witness_k(n):
        floor = float(np.min(vals[: n + 1])) - R
        k = n + int(np.argmin(vals[n:]))
        return k, float(vals[k]), floor

    if N is None:
        n = _persistent_start(ok[1:], 1, min_start=1, latest=_midpoint(1, H))
        if n is None:
            return Verdict.inconclusive(
                name, "increment positive somewhere in the top half", first_violation=_last_violation(ok, 0)
            )
        N = n
    else:
        bad = _first_violation(ok, 0, N)
        if bad is not None:
            return Verdict.inconclusive(name, "increment positive", first_violation=bad, N=N, H=H)
    k, fk, floor = witness_k(N)
    if not fk < floor:
        return Verdict.inconclusive(
            name, "no k >= N with f(k) below min_{i<=N} f(i) minus the tail remainder", N=N, H=H
        )
    return Verdict(
        V.TRANSIENT, name,
        {"N": N, "H": H, "k": k, "f_k": fk, "min_f_up_to_N": floor + R, "tail_remainder_bound": R,
         "max_increment": float(delta[N:].max())},
        Caveat.HORIZON,
    )


def check_mertens_recurrence(spec, f: LyapunovFunction, N: int | None, H: int) -> Verdict:
    """Recurrence from ``Delta f <= 0`` for ``i >= N`` and ``f -> infinity``."""
    name = "mertens_recurrence"
    delta, scale, _ = lyapunov_increment(spec, f, 0, H)
    ok = delta <= _slack(scale)
    if f.divergent:
        divergence = "analytic"
    else:
        vals = f.values(np.arange(0, H + 1))
        top = vals[_midpoint(0, H) :]
        if np.all(np.diff(top) >= 0) and top[-1] > vals[: _midpoint(0, H)].max():
            divergence = "table-growth"
        else:
            return Verdict.inconclusive(name, "f is not certified to diverge")
    v = _lyapunov_scan(name, ok[1:], 1, H, N, V.RECURRENT, {"divergence": divergence}, "increment positive")
    if v.certified:
        v = Verdict(v.cls, name, {**v.witnesses, "max_increment": float(delta[v.witnesses["N"]:].max())}, v.caveat)
    return v


def check_return_floor(spec: ChainSpec, H: int, target: int = 0) -> Verdict:
    """Positive recurrence when every state jumps to ``target`` with probability
    at least ``a > 0``: Foster with ``f`` the indicator of leaving ``target``
    and ``eps = a``."""
    name = "return_floor"
    floors = []
    for block in spec.blocks(1, H):
        hit = np.where(block.targets == target, block.probs, 0.0).sum(axis=1)
        hit = np.where(block.states == target, np.inf, hit)
        floors.append(hit)
    floor = float(np.min(np.concatenate(floors)))
    if not floor > 0:
        return Verdict.inconclusive(name, f"some state in 1..{H} cannot jump to {target}")
    v = check_foster(spec, LyapunovFunction.indicator(target), 1, floor, H)
    if not v.certified:
        return Verdict.inconclusive(name, v.reason, **v.witnesses)
    return Verdict(v.cls, name, {**v.witnesses, "target": target, "return_floor": floor}, v.caveat)


# --------------------------------------------------------------------------
# drift-table criteria


def _top_half(profile: DriftProfile):
    a = (profile.hi - profile.lo) // 2
    return slice(a, None), profile.states[a:]


def _vanishing(profile, values, top) -> bool:
    slope = log_log_slope(profile.states[top], values[top])
    return bool(np.isfinite(slope) and slope < DECAY_SLOPE)


def _constant_tail_slack(t: ConstantTail) -> float:
    return _slack(t.abs_moment)


def check_pakes(profile: DriftProfile) -> Verdict:
    """Positive recurrence when the drift stays below some ``-eps < 0``."""
    name = "pakes"
    g, absm = profile.gamma, profile.abs_moment
    if not np.all(np.isfinite(g)):
        return Verdict.inconclusive(name, "infinite drift in the table")
    if isinstance(profile.tail, PowerLawTail):
        return Verdict.inconclusive(name, "analytic tail drift is positive, limsup is not negative")
    top, _ = _top_half(profile)
    eps = -float(np.max(g[top]))
    if not eps > _slack(float(np.max(absm[top]))):
        return Verdict.inconclusive(name, "drift not bounded below zero on the top half", max_top_gamma=-eps)
    if _vanishing(profile, g, top):
        return Verdict.inconclusive(name, "drift appears to vanish (limsup may be 0)", max_top_gamma=-eps)
    ok = g <= -eps + _slack(absm)
    N = _persistent_start(ok, profile.lo, 1, _midpoint(profile.lo, profile.hi))
    if N is None:
        return Verdict.inconclusive(name, "no persistent N")
    caveat = Caveat.HORIZON
    t = profile.tail
    if isinstance(t, ConstantTail) and t.start <= profile.hi + 1 and t.gamma <= -eps + _constant_tail_slack(t):
        caveat = Caveat.ANALYTIC
    return Verdict(V.POSITIVE_RECURRENT, name, {"N": N, "eps": eps, "H": profile.hi}, caveat)


def check_nonpositive_drift_recurrence(profile: DriftProfile) -> Verdict:
    """Recurrence when the drift is eventually ``<= 0`` (Lyapunov ``f(i) = i``)."""
    name = "nonpositive_drift_recurrence"
    g, absm = profile.gamma, profile.abs_moment
    t = profile.tail
    if isinstance(t, PowerLawTail) and t.positive_beyond(profile.hi):
        return Verdict.inconclusive(name, "analytic tail drift is positive")
    ok = g <= _slack(absm)
    N = _persistent_start(ok, profile.lo, 1, _midpoint(profile.lo, profile.hi))
    if N is None:
        return Verdict.inconclusive(name, "drift positive somewhere in the top half",
                                    last_violation=_last_violation(ok, profile.lo))
    caveat = Caveat.HORIZON
    if isinstance(t, ConstantTail):
        if t.gamma > _constant_tail_slack(t):
            return Verdict.inconclusive(name, "constant tail drift is positive")
        if t.start <= profile.hi + 1:
            caveat = Caveat.ANALYTIC
    return Verdict(V.RECURRENT, name, {"N": N, "H": profile.hi, "max_gamma": float(g[N - profile.lo :].max())}, caveat)


def check_kaplan_nonergodic(spec: ChainSpec, profile: DriftProfile) -> Verdict:
    """Non-ergodicity of a downward bounded chain with eventually ``gamma >= 0``."""
    name = "kaplan_nonergodic"
    if spec.declared_down_bound is None:
        raise MissingDownBound(f"{spec.name} has no declared downward bound")
    g, absm = profile.gamma, profile.abs_moment
    if not np.all(np.isfinite(g)):
        return Verdict.inconclusive(name, "infinite drift in the table")
    ok = g >= -_slack(absm)
    N = _persistent_start(ok, profile.lo, 1, _midpoint(profile.lo, profile.hi))
    if N is None:
        return Verdict.inconclusive(name, "drift negative somewhere in the top half",
                                    last_violation=_last_violation(ok, profile.lo))
    t = profile.tail
    caveat = Caveat.HORIZON
    if isinstance(t, PowerLawTail) and t.positive_beyond(profile.hi):
        caveat = Caveat.ANALYTIC
    elif isinstance(t, ConstantTail):
        if t.gamma < -_constant_tail_slack(t):
            return Verdict.inconclusive(name, "constant tail drift is negative")
        if t.start <= profile.hi + 1:
            caveat = Caveat.ANALYTIC
    return Verdict(
        V.NON_ERGODIC, name,
        {"N": N, "H": profile.hi, "k": spec.declared_down_bound, "min_gamma": float(g[N - profile.lo :].min())},
        caveat,
    )


def check_null_recurrence(spec: ChainSpec, profile: DriftProfile) -> Verdict:
    """Null recurrence of a downward bounded chain whose drift is eventually 0."""
    name = "null_recurrence"
    if spec.declared_down_bound is None:
        raise MissingDownBound(f"{spec.name} has no declared downward bound")
    g, absm = profile.gamma, profile.abs_moment
    t = profile.tail
    if isinstance(t, PowerLawTail):
        return Verdict.inconclusive(name, "analytic tail drift is nonzero")
    ok = np.abs(g) <= _slack(absm)
    N = _persistent_start(ok, profile.lo, 1, _midpoint(profile.lo, profile.hi))
    if N is None:
        return Verdict.inconclusive(name, "drift nonzero somewhere in the top half",
                                    last_violation=_last_violation(ok, profile.lo))
    kap = check_kaplan_nonergodic(spec, profile)
    rec = check_nonpositive_drift_recurrence(profile)
    if not (kap.certified and rec.certified):
        return Verdict.inconclusive(name, "Kaplan or recurrence sub-check did not fire")
    caveat = Caveat.HORIZON
    if (
        isinstance(t, ConstantTail)
        and abs(t.gamma) <= _constant_tail_slack(t)
        and kap.caveat is Caveat.ANALYTIC
        and rec.caveat is Caveat.ANALYTIC
    ):
        caveat = Caveat.ANALYTIC
    return Verdict(
        V.NULL_RECURRENT, name,
        {"N": N, "H": profile.hi, "max_abs_gamma": float(np.abs(g[N - profile.lo :]).max()),
         "kaplan_N": kap.witnesses["N"], "recurrence_N": rec.witnesses["N"]},
        caveat,
    )


def check_bounded_transience(spec: ChainSpec, profile: DriftProfile) -> Verdict:
    """Transience of a uniformly bounded chain with ``liminf gamma > 0``."""
    name = "bounded_transience"
    if spec.uniform_bound is None:
        raise MissingBounds(f"{spec.name} is not declared uniformly bounded")
    g, absm = profile.gamma, profile.abs_moment
    if isinstance(profile.tail, PowerLawTail):
        return Verdict.inconclusive(name, "liminf of drift is 0 (asymptotically zero drift)")
    top, _ = _top_half(profile)
    eps = float(np.min(g[top]))
    if not eps > _slack(float(np.max(absm[top]))):
        return Verdict.inconclusive(name, "drift not bounded above zero on the top half", min_top_gamma=eps)
    if _vanishing(profile, g, top):
        return Verdict.inconclusive(name, "liminf of drift appears to be 0 (drift vanishing)", min_top_gamma=eps)
    ok = g >= eps - _slack(absm)
    N = _persistent_start(ok, profile.lo, 1, _midpoint(profile.lo, profile.hi))
    if N is None:
        return Verdict.inconclusive(name, "no persistent N")
    caveat = Caveat.HORIZON
    t = profile.tail
    if isinstance(t, ConstantTail) and t.start <= profile.hi + 1 and t.gamma >= eps - _constant_tail_slack(t):
        caveat = Caveat.ANALYTIC
    return Verdict(V.TRANSIENT, name, {"N": N, "eps": eps, "d": spec.uniform_bound, "H": profile.hi}, caveat)


def check_lamperti(profile: DriftProfile, theta: float) -> Verdict:
    """Pointwise Lamperti comparison of ``gamma_i`` with ``theta sigma_i / (2i)``.

    ``theta < 1`` and ``gamma_i <= theta sigma_i / (2i)`` eventually gives
    Recurrent; ``theta > 1`` with the reverse inequality gives Transient.
    Only applicable when ``sigma`` is bounded away from zero.
    """
    name = f"lamperti(theta={theta!r})"
    if theta == 1:
        raise ValueError("theta must differ from 1")
    g, s, absm = profile.gamma, profile.sigma, profile.abs_moment
    top, _ = _top_half(profile)
    floor = float(np.min(s[top]))
    if not floor > 0 or _vanishing(profile, s, top):
        return Verdict.inconclusive(
            name, "σ not bounded away from zero", applicable=False, min_top_sigma=floor
        )
    i = np.maximum(profile.states, 1).astype(float)
    bound = theta * s / (2 * i)
    if theta < 1:
        ok, cls = g <= bound + _slack(absm), V.RECURRENT
        margin = bound - g
    else:
        ok, cls = g >= bound - _slack(absm), V.TRANSIENT
        margin = g - bound
    N = _persistent_start(ok, profile.lo, max(profile.lo, 1), _midpoint(profile.lo, profile.hi))
    if N is None:
        return Verdict.inconclusive(
            name, "inequality fails somewhere in the top half", last_violation=_last_violation(ok, profile.lo)
        )
    return Verdict(
        cls, name,
        {"N": N, "H": profile.hi, "theta": theta, "sigma_floor": floor,
         "min_margin": float(margin[N - profile.lo :].min())},
        Caveat.HORIZON,
    )


def check_powerlaw_family(C, alpha, D, d: int, profile: DriftProfile) -> Verdict:
    """Transience for drifts ``C i^-alpha (1 + eps_i)``, ``1/2 < alpha < 1``,
    ``eps`` of order ``1/i`` over every band window, eventually positive and
    nonincreasing."""
    name = "powerlaw_family"
    tail = profile.tail
    wanted = PowerLawTail(C, alpha, D, tail.cutoff if isinstance(tail, PowerLawTail) else 1)
    if not isinstance(tail, PowerLawTail) or (tail.C, tail.alpha, tail.D) != (wanted.C, wanted.alpha, wanted.D):
        raise TailInconsistent("profile tail descriptor does not match (C, alpha, D)")
    bad = validate_tail(tail, profile.states, profile.gamma, profile.abs_moment)
    if bad is not None:
        raise TailInconsistent(f"tabulated drift contradicts the tail at state {bad}", state=bad)
    if d < 1:
        raise ValueError("band bound d must be >= 1")
    if not (tail.alpha * 2 > 1 and tail.alpha < 1):
        return Verdict.inconclusive(name, f"alpha = {tail.alpha} outside (1/2, 1)", alpha=str(tail.alpha))
    g, absm = profile.gamma, profile.abs_moment
    ok = g > 0
    ok[:-1] &= g[1:] <= g[:-1] + _slack(absm[1:] + absm[:-1])
    N = _persistent_start(ok, profile.lo, max(profile.lo, 1), _midpoint(profile.lo, profile.hi))
    if N is None:
        return Verdict.inconclusive(name, "drift not eventually positive and nonincreasing on the range")
    caveat = Caveat.ANALYTIC if tail.D == 0 else Caveat.HORIZON
    return Verdict(
        V.TRANSIENT, name,
        {"N": N, "H": profile.hi, "C": str(tail.C), "alpha": str(tail.alpha), "D": str(tail.D), "d": d},
        caveat,
    )


def _square_tail(profile: DriftProfile, H: int, declared: float | None):
    """(estimate, bracket width) for ``sum_{k > H} gamma_k**2``."""
    t = profile.tail
    if isinstance(t, PowerLawTail) and t.square_summable:
        if H < t.cutoff:
            raise NoTailCertificate("horizon below the tail descriptor's cutoff")
        a2 = 2 * float(t.alpha)
        c2 = float(t.C) ** 2
        d = float(t.D)
        upper = c2 * (1 + d / (H + 1)) ** 2 * H ** (1 - a2) / (a2 - 1)
        lower = c2 * max(0.0, 1 - d / (H + 1)) ** 2 * (H + 1) ** (1 - a2) / (a2 - 1)
        return 0.5 * (upper + lower), upper - lower
    if isinstance(t, ConstantTail) and abs(t.gamma) <= _constant_tail_slack(t):
        return 0.0, 0.0
    if declared is not None:
        if declared < 0:
            raise ValueError("declared tail bound must be nonnegative")
        return 0.0, float(declared)
    raise NoTailCertificate("square-summability of the drift cannot be certified")


def build_tail_lyapunov(profile: DriftProfile, H: int, declared_tail_bound: float | None = None) -> LyapunovFunction:
    """``f(i) = sum_{k >= i} gamma_k**2`` tabulated on ``0..H``.

    The part beyond ``H`` comes from the integral test on the power-law
    tail (midpoint of the bracket; the bracket width is the remainder
    bound), or from a caller-declared bound.
    """
    if profile.lo != 0 or profile.hi < H:
        raise HorizonTooSmallForBand(f"profile [{profile.lo}, {profile.hi}] must cover [0, {H}]")
    estimate, width = _square_tail(profile, H, declared_tail_bound)
    g2 = profile.gamma[: H + 1] ** 2
    table = compensated_suffix_sum(g2, start=estimate)
    table = np.minimum.accumulate(table)  # guard against a rounding uptick
    return LyapunovFunction(table=table, tail_remainder_bound=width, monotone=True, kind="tail")


def check_zero_drift_transience(spec: ChainSpec, profile: DriftProfile, H: int) -> Verdict:
    """Transience of a uniformly bounded chain with vanishing monotone drift.

    Needs, for all ``i`` in ``N..H``: positive drift, nonincreasing drift,
    square-summable drift (certified by the tail) and the local-regularity
    bound ``d * delta_i <= gamma_i**3 / 2``.  The Lyapunov function
    ``sum_{k >= i} gamma_k**2`` is then built and its increment checked
    directly against ``-gamma_i**3 / 2``.
    """
    name = "zero_drift_transience"
    d = spec.uniform_bound
    if d is None:
        raise MissingBounds(f"{spec.name} is not declared uniformly bounded")
    if profile.lo != 0 or profile.hi < H + d:
        raise HorizonTooSmallForBand(f"profile must cover [0, {H + d}], has [{profile.lo}, {profile.hi}]")
    f = build_tail_lyapunov(profile, profile.hi)
    R = f.tail_remainder_bound

    g = profile.gamma[: H + 1]
    absm = profile.abs_moment[: H + 1]
    _, delta_all = oscillation_array(profile, d)
    delta = np.full(H + 1, np.inf)
    delta[d:] = delta_all[: H + 1 - d]
    cube = 0.5 * g**3
    # drift indistinguishable from rounding noise is not positive drift
    c1 = g > _slack(absm)
    c2 = np.ones(H + 1, dtype=bool)
    c2[:-1] = g[1:] <= g[:-1] + _slack(absm[1:] + absm[:-1])
    c4 = d * delta <= cube + _slack(d * delta + np.abs(cube))
    ok = c1 & c2 & c4
    N = _persistent_start(ok, 0, min_start=max(1, d))
    ratio_H = float(d * delta[H] / cube[H]) if cube[H] > 0 else math.inf
    if N is None:
        last = _last_violation(ok, 0)
        which = "(i) positive drift" if not c1[last] else (
            "(ii) nonincreasing drift" if not c2[last] else "(iv) local oscillation d*delta_i <= gamma_i^3/2"
        )
        return Verdict.inconclusive(
            name, f"condition {which} fails at state {last}",
            failing_condition=which, state=last, H=H, oscillation_ratio_at_H=ratio_H,
        )
    k = H
    floor = float(f.table[: N + 1].min()) - R
    if not f.table[k] < floor:
        return Verdict.inconclusive(name, "no k >= N with f(k) < min_{i<=N} f(i)", N=N, H=H)
    inc, scale, _ = lyapunov_increment(spec, f, N, H)
    bound = -cube[N:] + 2 * d * R
    inc_ok = inc <= bound + _slack(scale + np.abs(cube[N:]))
    if not inc_ok.all():
        bad = N + int(np.flatnonzero(~inc_ok)[0])
        return Verdict.inconclusive(
            name, f"Lyapunov increment exceeds -gamma^3/2 at state {bad}", N=N, H=H, state=bad
        )
    return Verdict(
        V.TRANSIENT, name,
        {
            "N": N, "H": H, "d": d,
            "tail_remainder_bound": R,
            "min_gamma": float(g[N:].min()),
            "max_oscillation_ratio": float(np.max(d * delta[N:] / cube[N:])),
            "max_increment_over_half_cube": float(np.max(inc / cube[N:])),
            "mertens_k": k,
        },
        Caveat.HORIZON,
    )


# --------------------------------------------------------------------------
# orchestration


@dataclass(frozen=True)
class LyapunovCheck:
    """A user-supplied Lyapunov certificate to try during ``classify``."""

    kind: str  # foster | fmm_transience | mertens_transience | mertens_recurrence
    f: LyapunovFunction
    N: int | None = None
    eps: float | None = None
    jump_bound: float | None = None

    def run(self, spec: ChainSpec, H: int) -> Verdict:
        if self.kind == "foster":
            return check_foster(spec, self.f, self.N, self.eps, H)
        if self.kind == "fmm_transience":
            return check_fmm_transience(spec, self.f, self.N, self.eps, self.jump_bound, H)
        if self.kind == "mertens_transience":
            return check_mertens_transience(spec, self.f, self.N, H)
        if self.kind == "mertens_recurrence":
            return check_mertens_recurrence(spec, self.f, self.N, H)
        raise ValueError(f"unknown Lyapunov check {self.kind!r}")


CHECKER_ORDER = (
    "pakes",
    "nonpositive_drift_recurrence",
    "kaplan_nonergodic",
    "null_recurrence",
    "bounded_transience",
    "lamperti",
    "powerlaw_family",
    "zero_drift_transience",
    "return_floor",
    "lyapunov",
)


def _guard(name: str, fn) -> Verdict:
    try:
        return fn()
    except DriftcertError as exc:
        return Verdict.inconclusive(name, f"{type(exc).__name__}: {exc}", applicable=False)


def run_checkers(
    spec: ChainSpec,
    profile: DriftProfile,
    H: int,
    thetas: Sequence[float] = (0.9, 1.1),
    lyapunov_checks: Sequence[LyapunovCheck] = (),
    return_floor: bool = True,
) -> list[Verdict]:
    """All checkers in the fixed documented order."""
    base = profile.restricted(0, H)
    out = [
        _guard("pakes", lambda: check_pakes(base)),
        _guard("nonpositive_drift_recurrence", lambda: check_nonpositive_drift_recurrence(base)),
        _guard("kaplan_nonergodic", lambda: check_kaplan_nonergodic(spec, base)),
        _guard("null_recurrence", lambda: check_null_recurrence(spec, base)),
        _guard("bounded_transience", lambda: check_bounded_transience(spec, base)),
    ]
    for theta in thetas:
        out.append(_guard(f"lamperti(theta={theta!r})", lambda th=theta: check_lamperti(base, th)))
    t = profile.tail
    if isinstance(t, PowerLawTail) and spec.uniform_bound is not None:
        out.append(_guard("powerlaw_family", lambda: check_powerlaw_family(t.C, t.alpha, t.D, spec.uniform_bound, base)))
    else:
        out.append(Verdict.inconclusive("powerlaw_family", "no power-law tail descriptor or no uniform bound",
                                        applicable=False))
    out.append(_guard("zero_drift_transience", lambda: check_zero_drift_transience(spec, profile, H)))
    if return_floor:
        out.append(_guard("return_floor", lambda: check_return_floor(spec, H)))
    for chk in lyapunov_checks:
        out.append(_guard(chk.kind, lambda c=chk: c.run(spec, H)))
    return out


def classify(
    spec: ChainSpec,
    horizon: int = 100_000,
    tail: PowerLawTail | None = None,
    thetas: Sequence[float] = (0.9, 1.1),
    lyapunov_checks: Sequence[LyapunovCheck] = (),
    return_floor: bool = True,
    timings: bool = False,
):
    """Run every checker and assemble a ``ClassificationReport``.

    Raises ``ContradictoryVerdicts`` when certified verdicts are
    incompatible, which signals a bug rather than a property of the chain.
    """
    import time

    from .report import ClassificationReport

    clock = {}
    t0 = time.perf_counter()
    extra = spec.uniform_bound or 0
    profile = drift_profile(spec, 0, horizon + extra, tail)
    clock["profile"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    verdicts = run_checkers(spec, profile, horizon, thetas, lyapunov_checks, return_floor)
    clock["criteria"] = time.perf_counter() - t0
    conclusion = strongest(verdicts)
    return ClassificationReport.build(
        spec, profile.restricted(0, horizon), verdicts, conclusion, clock if timings else None
    )

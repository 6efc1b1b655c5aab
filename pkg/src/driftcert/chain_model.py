"""Infinite-state chains on the nonnegative integers.

A chain is given lazily: explicit rows below ``boundary_cutoff`` and a rule
producing the row of any state at or above it.  Nothing is ever
materialized as a matrix; callers ask for single rows (``validate_row``) or
for padded blocks of consecutive rows (``ChainSpec.blocks``), which is what
the vectorized drift and Lyapunov code consumes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np
import yaml
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from ._numerics import column_sum
from .errors import (
    BandViolation,
    InvalidParams,
    NegativeProbability,
    NegativeTargetState,
    RowError,
    RowSumOutOfTolerance,
    SpecParseError,
    UnknownBuiltin,
)
from .expr import Expr
from .tails import PowerLawTail, tail_from_dict

ROW_TOL = 1e-12
GEOMETRIC_TAIL_TOL = 1e-15

Row = Sequence[tuple[int, float]]


@dataclass(frozen=True)
class RowDistribution:
    state: int
    support: tuple[tuple[int, float], ...]

    @property
    def targets(self) -> list[int]:
        return [j for j, _ in self.support]

    @property
    def probs(self) -> list[float]:
        return [p for _, p in self.support]

    def prob(self, j: int) -> float:
        for t, p in self.support:
            if t == j:
                return p
        return 0.0

    def cumulative(self) -> np.ndarray:
        return np.cumsum(np.array(self.probs, dtype=float))


@dataclass(frozen=True)
class RowBlock:
    """Consecutive rows padded to a common width.

    Padding slots carry probability 0 and target equal to the origin state,
    so they contribute nothing to any moment or increment.
    """

    states: np.ndarray
    targets: np.ndarray
    probs: np.ndarray

    @property
    def offsets(self) -> np.ndarray:
        return self.targets - self.states[:, None]

    def __len__(self):
        return self.states.shape[0]


class BandedRule:
    """Row of state ``i`` is ``{i + o: expr_o(i)}`` for a fixed offset set."""

    def __init__(self, offsets: Mapping[int, Expr | str]):
        items = sorted((int(o), e if isinstance(e, Expr) else Expr(e)) for o, e in offsets.items())
        if not items:
            raise InvalidParams("banded rule needs at least one offset")
        self.offsets = tuple(o for o, _ in items)
        self.exprs = tuple(e for _, e in items)

    @property
    def homogeneous(self) -> bool:
        return not any(e.depends_on_i for e in self.exprs)

    def raw_row(self, i: int) -> list[tuple[int, float]]:
        x = float(i)
        return [(i + o, e(x)) for o, e in zip(self.offsets, self.exprs)]

    def band(self, states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = states.astype(float)
        probs = np.stack([e(x) for e in self.exprs], axis=1)
        targets = states[:, None] + np.asarray(self.offsets, dtype=np.int64)[None, :]
        return targets, probs

    def to_dict(self) -> dict:
        return {int(o): e.source for o, e in zip(self.offsets, self.exprs)}


class FunctionRule:
    """Row given by arbitrary code; used for chains whose jumps are unbounded."""

    homogeneous = False

    def __init__(self, fn: Callable[[int], Row]):
        self.fn = fn

    def raw_row(self, i: int) -> list[tuple[int, float]]:
        return list(self.fn(i))


def _check_scalar_row(i, row, down, up) -> list[tuple[int, float]]:
    merged: dict[int, list[float]] = {}
    for j, p in row:
        p = float(p)
        if not math.isfinite(p):
            raise RowError(f"row {i}: non-finite probability for target {j}", state=i)
        if p < 0:
            if p < -ROW_TOL:
                raise NegativeProbability(f"row {i}: p[{i},{j}] = {p!r} < 0", state=i)
            continue
        if p == 0:
            continue
        if j < 0:
            raise NegativeTargetState(f"row {i}: positive mass {p!r} on state {j} < 0", state=i)
        if down is not None and i - j > down:
            raise BandViolation(f"row {i}: jump to {j} exceeds declared down bound {down}", state=i)
        if up is not None and j - i > up:
            raise BandViolation(f"row {i}: jump to {j} exceeds declared up bound {up}", state=i)
        merged.setdefault(int(j), []).append(p)
    support = [(j, math.fsum(ps)) for j, ps in sorted(merged.items())]
    total = math.fsum(p for _, p in support)
    if abs(total - 1.0) > ROW_TOL:
        raise RowSumOutOfTolerance(f"row {i}: probabilities sum to {total!r}", state=i)
    return support


def _check_block(block: RowBlock, down, up) -> None:
    s = block.states[:, None]
    p = block.probs
    t = block.targets

    def first(mask):
        return int(block.states[np.argmax(mask.any(axis=1))])

    bad = ~np.isfinite(p)
    if bad.any():
        i = first(bad)
        raise RowError(f"row {i}: non-finite probability", state=i)
    bad = p < -ROW_TOL
    if bad.any():
        i = first(bad)
        raise NegativeProbability(f"row {i}: negative probability", state=i)
    pos = p > 0
    bad = pos & (t < 0)
    if bad.any():
        i = first(bad)
        raise NegativeTargetState(f"row {i}: positive mass on a negative state", state=i)
    if down is not None:
        bad = pos & (s - t > down)
        if bad.any():
            i = first(bad)
            raise BandViolation(f"row {i}: jump exceeds declared down bound {down}", state=i)
    if up is not None:
        bad = pos & (t - s > up)
        if bad.any():
            i = first(bad)
            raise BandViolation(f"row {i}: jump exceeds declared up bound {up}", state=i)
    totals = column_sum([np.where(pos, p, 0.0)[:, k] for k in range(p.shape[1])])
    bad = np.abs(totals - 1.0) > ROW_TOL
    if bad.any():
        i = int(block.states[np.argmax(bad)])
        raise RowSumOutOfTolerance(f"row {i}: probabilities sum to {totals[np.argmax(bad)]!r}", state=i)


def _pad_rows(states: Sequence[int], rows: Sequence[Row]) -> RowBlock:
    width = max(1, max(len(r) for r in rows))
    n = len(rows)
    st = np.asarray(states, dtype=np.int64)
    targets = np.repeat(st[:, None], width, axis=1)
    probs = np.zeros((n, width))
    for k, row in enumerate(rows):
        for c, (j, p) in enumerate(row):
            targets[k, c] = j
            probs[k, c] = p
    return RowBlock(st, targets, probs)


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """Immutable description of a chain on the nonnegative integers.

    ``source`` is the canonical declarative document the spec was built
    from; equality and serialization go through it.
    """

    name: str
    rule: BandedRule | FunctionRule
    boundary_cutoff: int
    boundary_rows: tuple[tuple[tuple[int, float], ...], ...]
    declared_down_bound: int | None = None
    declared_up_bound: int | None = None
    tail: PowerLawTail | None = None
    source: Mapping = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.boundary_rows) != self.boundary_cutoff:
            raise InvalidParams(
                f"need {self.boundary_cutoff} boundary rows, got {len(self.boundary_rows)}"
            )

    def __eq__(self, other):
        if not isinstance(other, ChainSpec):
            return NotImplemented
        return self.name == other.name and _canon(self.source) == _canon(other.source)

    def __hash__(self):
        return hash((self.name, _canon(self.source)))

    @property
    def banded(self) -> bool:
        return isinstance(self.rule, BandedRule)

    @property
    def homogeneous_from(self) -> int | None:
        """First state from which rows are exact translates, if known."""
        return self.boundary_cutoff if self.rule.homogeneous else None

    @property
    def uniform_bound(self) -> int | None:
        if self.declared_down_bound is None or self.declared_up_bound is None:
            return None
        return max(self.declared_down_bound, self.declared_up_bound)

    def raw_row(self, i: int) -> list[tuple[int, float]]:
        if i < 0:
            raise ValueError(f"state must be nonnegative, got {i}")
        if i < self.boundary_cutoff:
            return list(self.boundary_rows[i])
        return self.rule.raw_row(i)

    def row(self, i: int) -> RowDistribution:
        return validate_row(self, i)

    def blocks(self, lo: int, hi: int, validate: bool = True) -> Iterator[RowBlock]:
        """Yield padded row blocks covering states ``lo..hi`` in order."""
        if lo < 0 or hi < lo:
            raise ValueError(f"bad state range [{lo}, {hi}]")
        down, up = self.declared_down_bound, self.declared_up_bound
        b_hi = min(hi, self.boundary_cutoff - 1)
        if lo <= b_hi:
            states = list(range(lo, b_hi + 1))
            rows = [_check_scalar_row(i, self.boundary_rows[i], down, up) for i in states]
            yield _pad_rows(states, rows)
        start = max(lo, self.boundary_cutoff)
        chunk = 1 << 20
        while start <= hi:
            stop = min(hi, start + chunk - 1)
            states = np.arange(start, stop + 1, dtype=np.int64)
            if isinstance(self.rule, BandedRule):
                targets, probs = self.rule.band(states)
                block = RowBlock(states, targets, probs)
                if validate:
                    _check_block(block, down, up)
                # tiny negative rounding noise is treated as an exact zero
                probs = np.where(probs > 0, probs, 0.0)
                yield RowBlock(states, np.where(probs > 0, targets, states[:, None]), probs)
            else:
                rows = [
                    _check_scalar_row(int(i), self.rule.raw_row(int(i)), down, up)
                    if validate
                    else self.rule.raw_row(int(i))
                    for i in states
                ]
                yield _pad_rows(states, rows)
            start = stop + 1


def _canon(source) -> str:
    return json.dumps(source, sort_keys=True, default=str)


def validate_row(spec: ChainSpec, i: int) -> RowDistribution:
    """Materialize and check row ``i``; never renormalizes."""
    if i < 0:
        raise ValueError(f"state must be nonnegative, got {i}")
    support = _check_scalar_row(
        i, spec.raw_row(i), spec.declared_down_bound, spec.declared_up_bound
    )
    return RowDistribution(i, tuple(support))


# --------------------------------------------------------------------------
# built-in chains


def _geometric_row() -> tuple[tuple[int, float], ...]:
    # smallest M with sum_{i>M} 2^-i = 2^-M below the tolerance
    m = 1
    while 2.0**-m >= GEOMETRIC_TAIL_TOL:
        m += 1
    row = [(i, 2.0**-i) for i in range(1, m + 1)]
    row[-1] = (m, 2.0**-m + 2.0**-m)
    return tuple(row)


def _ergodic_drift(params):
    def rule(i):
        return [(0, 0.5), (3 * i, 0.5)]

    return ChainSpec(
        name="ergodic_drift",
        rule=FunctionRule(rule),
        boundary_cutoff=1,
        boundary_rows=(_geometric_row(),),
    )


def _ergodic_zero_drift(params):
    def rule(i):
        return [(0, 0.5), (i - 1, 1 / 8 - 1 / i), (i + 1, 1 / 8 + 1 / i), (3 * i, 0.25)]

    rows = [_geometric_row(), ((0, 0.5), (2, 0.5))]
    for i in range(2, 9):
        rows.append(((0, 0.5), (i + 1, 0.25), (3 * i, 0.25)))
    return ChainSpec(
        name="ergodic_zero_drift_patched",
        rule=FunctionRule(rule),
        boundary_cutoff=9,
        boundary_rows=tuple(rows),
        notes=(
            "rows 2..8 patched: the literal rule gives p[i,i-1] = 1/8 - 1/i <= 0 there; "
            "replaced by p[i,0]=1/2, p[i,i+1]=1/4, p[i,3i]=1/4",
        ),
    )


def _int_param(params, key, minimum=1):
    try:
        value = int(params[key])
    except KeyError:
        raise InvalidParams(f"missing parameter {key!r}") from None
    except (TypeError, ValueError):
        raise InvalidParams(f"parameter {key!r} must be an integer") from None
    if value != float(params[key]) or value < minimum:
        raise InvalidParams(f"parameter {key!r} must be an integer >= {minimum}")
    return value


def _sit_still(params):
    k = _int_param(params, "k")
    w = 2 * k + 1
    rule = BandedRule({o: f"1/{w}" for o in range(-k, k + 1)})
    boundary = tuple(((i + 1, 1.0),) for i in range(k))
    return ChainSpec(
        name=f"sit_still(k={k})",
        rule=rule,
        boundary_cutoff=k,
        boundary_rows=boundary,
        declared_down_bound=k,
        declared_up_bound=k,
    )


def _lopsided(params):
    m = _int_param(params, "m")
    n = _int_param(params, "n")
    if math.gcd(m, n) != 1:
        raise InvalidParams(f"lopsided walk needs gcd(m, n) = 1, got m={m}, n={n}")
    s = m + n
    rule = BandedRule({n: f"{m}/{s}", -m: f"{n}/{s}"})
    boundary = tuple(((i, n / s), (i + n, m / s)) for i in range(m))
    return ChainSpec(
        name=f"lopsided(m={m},n={n})",
        rule=rule,
        boundary_cutoff=m,
        boundary_rows=boundary,
        declared_down_bound=m,
        declared_up_bound=n,
    )


def _birth_death(params):
    if "p" not in params:
        raise InvalidParams("birth_death needs an up-probability expression 'p'")
    p = Expr(str(params["p"]))
    q_given = params.get("q") not in (None, "")
    q = Expr(str(params["q"])) if q_given else Expr(f"1 - ({p.source})")
    offsets = {-1: q, 1: p}
    if q_given:
        offsets[0] = Expr(f"1 - ({p.source}) - ({q.source})")
    p0 = p(0.0)
    if not (0 < p0 <= 1):
        raise InvalidParams(f"birth_death needs 0 < p(0) <= 1, got {p0!r}")
    row0 = ((0, 1.0 - p0), (1, p0)) if p0 < 1 else ((1, 1.0),)
    name = f"birth_death(p={p.source}" + (f", q={q.source})" if q_given else ")")
    return ChainSpec(
        name=name,
        rule=BandedRule(offsets),
        boundary_cutoff=1,
        boundary_rows=(row0,),
        declared_down_bound=1,
        declared_up_bound=1,
    )


def _powerlaw_transient(params):
    try:
        alpha = float(Fraction(str(params["alpha"])))
    except KeyError:
        raise InvalidParams("powerlaw_transient needs 'alpha'") from None
    except (ValueError, ZeroDivisionError):
        raise InvalidParams(f"bad alpha {params['alpha']!r}") from None
    if not 0.5 < alpha < 1:
        raise InvalidParams(f"powerlaw_transient needs 1/2 < alpha < 1, got {alpha!r}")
    c = {"alpha": alpha}
    rule = BandedRule(
        {
            -2: Expr("1/9 * i**(-alpha)", c),
            -1: Expr("1/4 * i**(-alpha)", c),
            0: Expr("1 - 31/36 * i**(-alpha)", c),
            1: Expr("1/2 * i**(-alpha)", c),
        }
    )
    # out-of-range downward mass is redirected to state 0; state 0 uses i**-alpha := 1
    row0 = ((0, 1 / 9 + 1 / 4 + (1 - 31 / 36)), (1, 1 / 2))
    row1 = ((0, 1 / 9 + 1 / 4), (1, 1 - 31 / 36), (2, 1 / 2))
    return ChainSpec(
        name=f"powerlaw_transient(alpha={alpha!r})",
        rule=rule,
        boundary_cutoff=2,
        boundary_rows=(row0, row1),
        declared_down_bound=2,
        declared_up_bound=1,
        tail=PowerLawTail(C=Fraction(1, 36), alpha=Fraction(repr(alpha)), D=0, cutoff=2),
    )


@dataclass(frozen=True)
class Builtin:
    name: str
    builder: Callable[[Mapping], ChainSpec]
    params: tuple[str, ...]
    provenance: str


BUILTINS: dict[str, Builtin] = {
    b.name: b
    for b in (
        Builtin(
            "ergodic_drift",
            _ergodic_drift,
            (),
            "positive recurrent chain with p[i,0] = p[i,3i] = 1/2 whose drift i/2 diverges",
        ),
        Builtin(
            "sit_still",
            _sit_still,
            ("k",),
            "walk that may stay put, uniform on i-k..i+k; zero drift, null recurrent",
        ),
        Builtin(
            "lopsided",
            _lopsided,
            ("m", "n"),
            "up n w.p. m/(m+n), down m w.p. n/(m+n), gcd(m,n)=1; zero drift, null recurrent",
        ),
        Builtin(
            "ergodic_zero_drift",
            _ergodic_zero_drift,
            (),
            "ergodic chain with drift 2/i -> 0 (rows 2..8 patched to stay valid)",
        ),
        Builtin(
            "birth_death",
            _birth_death,
            ("p", "q"),
            "birth-death chain p[i,i+1] = p(i), p[i,i-1] = q(i) (default q = 1 - p)",
        ),
        Builtin(
            "powerlaw_transient",
            _powerlaw_transient,
            ("alpha",),
            "drift i^-alpha/36 with vanishing second moment; transient, Lamperti not applicable",
        ),
    )
}


def _normalize_params(name: str, params: Mapping) -> dict:
    out = {}
    for key in BUILTINS[name].params:
        if key not in params or params[key] in (None, ""):
            continue
        value = params[key]
        if key in ("k", "m", "n"):
            out[key] = _int_param(params, key)
        elif key == "alpha":
            out[key] = float(Fraction(str(value)))
        else:
            out[key] = Expr(str(value)).source
    extra = set(params) - set(BUILTINS[name].params)
    if extra:
        raise InvalidParams(f"unexpected parameters for {name}: {sorted(extra)}")
    return out


def build_builtin(name: str, params: Mapping | None = None) -> ChainSpec:
    """Construct and validate one of the built-in example chains."""
    if name not in BUILTINS:
        raise UnknownBuiltin(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
    params = _normalize_params(name, dict(params or {}))
    spec = BUILTINS[name].builder(params)
    spec = _with_source(spec, {"builtin": name, "params": params})
    _smoke_validate(spec)
    return spec


def _with_source(spec: ChainSpec, source: Mapping) -> ChainSpec:
    return ChainSpec(
        name=spec.name,
        rule=spec.rule,
        boundary_cutoff=spec.boundary_cutoff,
        boundary_rows=spec.boundary_rows,
        declared_down_bound=spec.declared_down_bound,
        declared_up_bound=spec.declared_up_bound,
        tail=spec.tail,
        source=source,
        notes=spec.notes,
    )


def _smoke_validate(spec: ChainSpec, upto: int = 64) -> None:
    for _ in spec.blocks(0, spec.boundary_cutoff + upto):
        pass


# --------------------------------------------------------------------------
# observational diagnostics


@dataclass(frozen=True)
class BandBounds:
    down: int
    up: int
    verified: bool


def detect_band_bounds(spec: ChainSpec, horizon: int) -> BandBounds:
    """Largest downward and upward jumps observed on rows ``0..horizon``."""
    if horizon < spec.boundary_cutoff:
        raise ValueError("horizon must be at least the boundary cutoff")
    down = up = 0
    for block in spec.blocks(0, horizon):
        off = np.where(block.probs > 0, block.offsets, 0)
        down = max(down, int(-off.min()))
        up = max(up, int(off.max()))
    d, u = spec.declared_down_bound, spec.declared_up_bound
    verified = d is not None and u is not None and down <= d and up <= u
    return BandBounds(down, up, verified)


@dataclass(frozen=True)
class IrreducibilityDiagnostic:
    status: str  # "Connected", "NotConnectedWithin" or "Inconclusive"
    witness: tuple[int, int] | None
    window: int

    @property
    def connected(self) -> bool:
        return self.status == "Connected"


def check_irreducible_truncated(spec: ChainSpec, horizon: int) -> IrreducibilityDiagnostic:
    """Strong connectivity of the support graph on ``[0, horizon + up]``.

    Edges that leave the window go to an outside node which re-enters at
    the outer layer ``(horizon, horizon + up]``.  If connectivity holds only
    thanks to that outside node the answer is Inconclusive.
    """
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    up = spec.declared_up_bound
    if up is None:
        up = detect_band_bounds(spec, horizon).up
    top = horizon + up
    out = top + 1
    src, dst = [], []
    for block in spec.blocks(0, top):
        mask = block.probs > 0
        s = np.broadcast_to(block.states[:, None], block.targets.shape)[mask]
        t = block.targets[mask]
        src.append(s)
        dst.append(np.minimum(t, out))
    src = np.concatenate(src)
    dst = np.concatenate(dst)

    def graph(with_outside):
        n = out + 1 if with_outside else out
        if with_outside:
            layer = np.arange(horizon + 1, top + 1)
            s = np.concatenate([src, np.full(layer.shape, out)])
            t = np.concatenate([dst, layer])
        else:
            keep = dst < out
            s, t = src[keep], dst[keep]
        return coo_matrix((np.ones(s.shape[0]), (s, t)), shape=(n, n)).tocsr()

    inner = graph(False)
    n_comp, _ = connected_components(inner, directed=True, connection="strong")
    if n_comp == 1:
        return IrreducibilityDiagnostic("Connected", None, top)
    full = graph(True)
    n_full, _ = connected_components(full, directed=True, connection="strong")
    if n_full == 1:
        return IrreducibilityDiagnostic("Inconclusive", None, top)
    reach = np.zeros(out + 1, dtype=bool)
    reach[breadth_first_order(full, 0, directed=True, return_predecessors=False)] = True
    if not reach[: out].all():
        return IrreducibilityDiagnostic("NotConnectedWithin", (0, int(np.argmin(reach[:out]))), top)
    back = np.zeros(out + 1, dtype=bool)
    back[breadth_first_order(full.T.tocsr(), 0, directed=True, return_predecessors=False)] = True
    return IrreducibilityDiagnostic("NotConnectedWithin", (int(np.argmin(back[:out])), 0), top)


# --------------------------------------------------------------------------
# declarative spec files


def _boundary_doc(rows) -> dict:
    return {i: {int(j): repr(float(p)) for j, p in row} for i, row in enumerate(rows)}


def spec_from_document(doc: Mapping) -> ChainSpec:
    """Build a chain from a parsed spec document (see ``load_spec``)."""
    if not isinstance(doc, Mapping):
        raise SpecParseError("spec document must be a mapping")
    if "builtin" in doc:
        extra = set(doc) - {"builtin", "params"}
        if extra:
            raise SpecParseError(f"unexpected keys next to 'builtin': {sorted(extra)}")
        params = doc.get("params") or {}
        if not isinstance(params, Mapping):
            raise SpecParseError("'params' must be a mapping")
        return build_builtin(str(doc["builtin"]), params)
    if "banded_rule" not in doc:
        raise SpecParseError("spec needs either 'builtin' or 'banded_rule'")
    allowed = {"name", "banded_rule", "boundary_rows", "constants", "down_bound", "up_bound", "tail"}
    extra = set(doc) - allowed
    if extra:
        raise SpecParseError(f"unknown keys {sorted(extra)}")
    constants = dict(doc.get("constants") or {})
    try:
        constants = {str(k): float(Fraction(str(v))) for k, v in constants.items()}
        rule_doc = doc["banded_rule"]
        cutoff = int(rule_doc.get("cutoff", 0))
        offsets = {int(o): Expr(str(e), constants) for o, e in (rule_doc.get("offsets") or {}).items()}
        rows_doc = doc.get("boundary_rows") or {}
        rows_exprs = {
            int(i): {int(j): Expr(str(p), constants) for j, p in (row or {}).items()}
            for i, row in rows_doc.items()
        }
    except SpecParseError:
        raise
    except (TypeError, ValueError, AttributeError, ZeroDivisionError) as exc:
        raise SpecParseError(f"malformed banded spec: {exc}") from None
    if sorted(rows_exprs) != list(range(cutoff)):
        raise SpecParseError(f"boundary_rows must list exactly states 0..{cutoff - 1}")
    boundary = tuple(
        tuple((j, e(float(i))) for j, e in sorted(rows_exprs[i].items())) for i in range(cutoff)
    )
    down = doc.get("down_bound")
    up = doc.get("up_bound")
    tail = tail_from_dict(doc.get("tail")) if doc.get("tail") else None
    name = str(doc.get("name", "banded_chain"))
    source = {
        "name": name,
        "banded_rule": {"cutoff": cutoff, "offsets": {o: e.source for o, e in sorted(offsets.items())}},
        "boundary_rows": {
            i: {j: e.source for j, e in sorted(rows_exprs[i].items())} for i in range(cutoff)
        },
        "down_bound": None if down is None else int(down),
        "up_bound": None if up is None else int(up),
        "tail": None if tail is None else tail.to_dict(),
    }
    spec = ChainSpec(
        name=name,
        rule=BandedRule(offsets),
        boundary_cutoff=cutoff,
        boundary_rows=boundary,
        declared_down_bound=source["down_bound"],
        declared_up_bound=source["up_bound"],
        tail=tail,
        source=source,
    )
    _smoke_validate(spec)
    return spec


def load_spec(text: str) -> ChainSpec:
    """Parse a YAML spec document.

    Two forms are accepted::

        builtin: lopsided
        params: {m: 1, n: 2}

    or a banded rule with explicit boundary rows::

        name: walk
        banded_rule:
          cutoff: 1
          offsets: {-1: "1/2", 1: "1/2"}
        boundary_rows:
          0: {0: "1/2", 1: "1/2"}
        down_bound: 1
        up_bound: 1
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SpecParseError(f"invalid YAML: {exc}") from None
    return spec_from_document(doc)


def dump_spec(spec: ChainSpec) -> str:
    if not spec.source:
        raise SpecParseError(f"spec {spec.name!r} has no declarative source")
    return yaml.safe_dump(json.loads(json.dumps(spec.source)), sort_keys=True)


def read_spec_file(path) -> ChainSpec:
    with open(path, encoding="utf-8") as fh:
        return load_spec(fh.read())

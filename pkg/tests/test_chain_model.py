from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from driftcert.chain_model import (
    BUILTINS,
    GEOMETRIC_TAIL_TOL,
    ROW_TOL,
    build_builtin,
    check_irreducible_truncated,
    detect_band_bounds,
    dump_spec,
    load_spec,
    read_spec_file,
    validate_row,
)
from driftcert.errors import (
    BandViolation,
    InvalidParams,
    NegativeProbability,
    NegativeTargetState,
    RowSumOutOfTolerance,
    SpecParseError,
    UnknownBuiltin,
)

from .conftest import ALL_BUILTINS, banded, raw_chain


def test_sit_still_row(sit_still1):
    row = validate_row(sit_still1, 2)
    assert row.targets == [1, 2, 3]
    assert row.probs == pytest.approx([1 / 3] * 3, rel=1e-15)


def test_self_loop_row_is_valid():
    spec = banded({0: "1"})
    row = validate_row(spec, 7)
    assert row.support == ((7, 1.0),)


def test_row_sum_rejected():
    spec = raw_chain({0: "0.6", 3: "0.5"})
    with pytest.raises(RowSumOutOfTolerance) as exc:
        validate_row(spec, 4)
    assert exc.value.state == 4


def test_negative_probability_rejected():
    spec = raw_chain({-1: "1/2 - 1/i", 1: "1/2 + 1/i"}, boundary_rows=[((1, 1.0),)])
    with pytest.raises(NegativeProbability):
        validate_row(spec, 1)
    assert validate_row(spec, 2).probs == [1.0]


def test_negative_target_rejected():
    with pytest.raises(NegativeTargetState):
        validate_row(raw_chain({-2: "1/2", 1: "1/2"}), 1)


def test_band_violation_flagged():
    spec = raw_chain({-1: "1/2", 3: "1/2"}, boundary_rows=[((3, 1.0),)], down=1, up=2)
    with pytest.raises(BandViolation):
        validate_row(spec, 5)


def test_rows_are_never_renormalized():
    # off by 5e-12: beyond the tolerance, must fail rather than be rescaled
    spec = raw_chain({-1: "0.5", 1: "0.5 + 5e-12"}, boundary_rows=[((1, 1.0),)])
    with pytest.raises(RowSumOutOfTolerance):
        validate_row(spec, 3)
    ok = banded({-1: "0.5", 1: "0.5 + 5e-13"}, boundary_rows={0: {1: "1"}})
    assert sum(validate_row(ok, 3).probs) == pytest.approx(1 + 5e-13, abs=1e-16)


def test_lopsided_row(lopsided12):
    row = validate_row(lopsided12, 3)
    assert row.targets == [2, 5]
    assert row.probs == pytest.approx([2 / 3, 1 / 3], rel=1e-15)


def test_powerlaw_row_at_100(powerlaw075):
    row = validate_row(powerlaw075, 100)
    x = 100 ** -0.75
    expected = [x / 9, x / 4, 1 - 31 / 36 * x, x / 2]
    assert row.targets == [98, 99, 100, 101]
    assert row.probs == pytest.approx(expected, rel=1e-14)


def test_sit_still_boundary():
    spec = build_builtin("sit_still", {"k": 2})
    assert validate_row(spec, 1).support == ((2, 1.0),)


def test_ergodic_drift_state_zero_row(ergodic_drift):
    row = validate_row(ergodic_drift, 0)
    # truncation point: smallest M with 2^-M below the tolerance
    m = next(m for m in range(1, 100) if 2.0**-m < GEOMETRIC_TAIL_TOL)
    assert row.targets == list(range(1, m + 1))
    assert sum(row.probs) == 1.0
    assert row.prob(m) == 2.0 ** (1 - m)
    assert validate_row(ergodic_drift, 7).support == ((0, 0.5), (21, 0.5))


def test_ergodic_zero_drift_patch(ergodic_zero):
    assert ergodic_zero.name == "ergodic_zero_drift_patched"
    assert ergodic_zero.notes
    for i in range(2, 9):
        assert dict(validate_row(ergodic_zero, i).support) == {0: 0.5, i + 1: 0.25, 3 * i: 0.25}
    row = dict(validate_row(ergodic_zero, 9).support)
    assert row[8] == pytest.approx(1 / 8 - 1 / 9)


@pytest.mark.parametrize(
    "name,params",
    [
        ("sit_still", {"k": 0}),
        ("lopsided", {"m": 2, "n": 4}),
        ("powerlaw_transient", {"alpha": 0.5}),
        ("powerlaw_transient", {"alpha": 1.0}),
        ("powerlaw_transient", {"alpha": 1.2}),
        ("sit_still", {"k": 1, "z": 3}),
        ("birth_death", {}),
    ],
)
def test_invalid_params(name, params):
    with pytest.raises(InvalidParams):
        build_builtin(name, params)


def test_unknown_builtin():
    with pytest.raises(UnknownBuiltin):
        build_builtin("nope")


def test_six_builtins():
    assert len(BUILTINS) == 6


@pytest.mark.parametrize("name,params", ALL_BUILTINS)
def test_builtin_rows_valid_up_to_10_000(name, params):
    spec = build_builtin(name, params)
    for block in spec.blocks(0, 10_000):
        totals = block.probs.sum(axis=1)
        assert np.all(np.abs(totals - 1) <= ROW_TOL)
        assert np.all((block.probs >= 0) & (block.probs <= 1))
        assert np.all(block.targets >= 0)


@pytest.mark.parametrize("name,params", ALL_BUILTINS)
def test_builtin_deterministic(name, params):
    a, b = build_builtin(name, params), build_builtin(name, params)
    assert a == b
    for i in (0, 1, 5, 1234):
        assert a.raw_row(i) == b.raw_row(i)


def test_band_bounds_lopsided(lopsided12):
    assert tuple(detect_band_bounds(lopsided12, 1000).__dict__.values()) == (1, 2, True)


def test_band_bounds_powerlaw(powerlaw075):
    b = detect_band_bounds(powerlaw075, 1000)
    assert (b.down, b.up, b.verified) == (2, 1, True)


def test_band_bounds_ergodic_drift(ergodic_drift):
    b = detect_band_bounds(ergodic_drift, 1000)
    # the oracle: scan rows directly
    down = max(i - min(validate_row(ergodic_drift, i).targets) for i in range(1001))
    up = max(max(validate_row(ergodic_drift, i).targets) - i for i in range(1001))
    assert (b.down, b.up, b.verified) == (down, up, False)
    assert b.down == 1000


@pytest.mark.parametrize("name,params", [b for b in ALL_BUILTINS if b[0] != "ergodic_drift"])
def test_declared_bounds_never_exceeded(name, params):
    spec = build_builtin(name, params)
    b = detect_band_bounds(spec, 2000)
    if spec.declared_down_bound is not None:
        assert b.down <= spec.declared_down_bound
    if spec.declared_up_bound is not None:
        assert b.up <= spec.declared_up_bound


def _reachable(spec, start, hi, reverse=False):
    """Plain BFS oracle on the support graph restricted to [0, hi]."""
    edges = {}
    for i in range(hi + 1):
        for j in validate_row(spec, i).targets:
            if j <= hi:
                a, b = (j, i) if reverse else (i, j)
                edges.setdefault(a, set()).add(b)
    seen, todo = {start}, [start]
    while todo:
        for j in edges.get(todo.pop(), ()):
            if j not in seen:
                seen.add(j)
                todo.append(j)
    return seen


def test_irreducible_sit_still(sit_still1):
    assert check_irreducible_truncated(sit_still1, 50).status == "Connected"


def test_irreducible_lopsided_matches_bfs(lopsided12):
    d = check_irreducible_truncated(lopsided12, 50)
    fwd = _reachable(lopsided12, 0, d.window)
    back = _reachable(lopsided12, 0, d.window, reverse=True)
    assert d.status == "Connected"
    assert fwd == back == set(range(d.window + 1))


def test_absorbing_chain_not_connected():
    d = check_irreducible_truncated(banded({0: "1"}, up=0, down=0), 10)
    assert d.status == "NotConnectedWithin"
    assert d.witness == (0, 1)


def test_ergodic_drift_truncation(ergodic_drift):
    # every state up to the truncation point of row 0 is reachable, and the
    # window's outer layer is only reached through the outside node
    assert check_irreducible_truncated(ergodic_drift, 50).status == "Inconclusive"
    # 52 is neither <= 50 nor a multiple of 3: truncating row 0 cut it off
    d = check_irreducible_truncated(ergodic_drift, 60)
    assert d.status == "NotConnectedWithin"
    assert d.witness == (0, 52)


SPEC_TEXT = """
name: reflected_walk
banded_rule:
  cutoff: 1
  offsets: {-1: "q", 1: "1 - q"}
constants: {q: "2/3"}
boundary_rows:
  0: {0: "q", 1: "1 - q"}
down_bound: 1
up_bound: 1
"""


def test_spec_file_roundtrip(tmp_path):
    spec = load_spec(SPEC_TEXT)
    assert validate_row(spec, 5).probs == pytest.approx([2 / 3, 1 / 3])
    text = dump_spec(spec)
    again = load_spec(text)
    assert again == spec
    assert dump_spec(again) == text
    path = tmp_path / "walk.yaml"
    path.write_text(text)
    assert read_spec_file(path) == spec


def test_builtin_spec_file_roundtrip():
    spec = load_spec("builtin: lopsided\nparams: {m: 1, n: 2}\n")
    assert spec == build_builtin("lopsided", {"m": 1, "n": 2})
    assert load_spec(dump_spec(spec)) == spec


@pytest.mark.parametrize(
    "text",
    [
        "builtin: lopsided\nparams: [1, 2]\n",
        "name: x\n",
        "banded_rule: {cutoff: 1, offsets: {1: '1'}}\nboundary_rows: {}\n",
        "banded_rule: {offsets: {1: 'import os'}}\n",
        "banded_rule: {offsets: {1: '1'}}\nbogus: 1\n",
        ": : :\n",
    ],
)
def test_spec_parse_errors(text):
    with pytest.raises(SpecParseError):
        load_spec(text)


@given(
    k=st.integers(1, 4),
    alpha=st.fractions(Fraction(51, 100), Fraction(99, 100)),
)
def test_builtin_roundtrip_property(k, alpha):
    for spec in (build_builtin("sit_still", {"k": k}), build_builtin("powerlaw_transient", {"alpha": str(alpha)})):
        assert load_spec(dump_spec(spec)) == spec

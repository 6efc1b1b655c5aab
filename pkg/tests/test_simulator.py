import csv

import numpy as np
import pytest

from driftcert.chain_model import build_builtin
from driftcert.drift_analysis import drift_profile
from driftcert.simulator import (
    CHUNK,
    empirical_drift,
    estimate_return_stats,
    run_return_trajectories,
    simulate_trajectory,
)

from .conftest import ALL_BUILTINS, banded


def test_self_loop_returns_at_time_one():
    spec = banded({0: "1"}, down=0, up=0)
    t = simulate_trajectory(spec, 3, 50, seed=11)
    assert (t.end_state, t.return_time, t.min_state, t.max_state) == (3, 1, 3, 3)


def test_sit_still_first_step_up(sit_still1):
    for seed in range(20):
        assert simulate_trajectory(sit_still1, 0, 1, seed).end_state == 1


def test_up_chain_escapes():
    spec = banded({1: "1"}, down=0, up=1)
    t = simulate_trajectory(spec, 0, 10, seed=0)
    assert t.end_state == 10 and t.return_time is None
    stats = estimate_return_stats(spec, 0, 20, 1000, master_seed=1)
    assert stats.returned == 0 and stats.return_fraction == 0.0
    assert stats.censored_mean_return_time is None


def test_trajectory_is_deterministic(powerlaw075):
    a = simulate_trajectory(powerlaw075, 5, 3 * CHUNK + 17, seed=42)
    b = simulate_trajectory(powerlaw075, 5, 3 * CHUNK + 17, seed=42)
    assert a == b


def test_kernel_matches_python_rows(powerlaw075, ergodic_drift):
    for spec, start in ((powerlaw075, 0), (build_builtin("lopsided", {"m": 2, "n": 3}), 4)):
        fast = run_return_trajectories(spec, start, 40, 5000, 9, use_kernel=True)
        slow = run_return_trajectories(spec, start, 40, 5000, 9, use_kernel=False)
        for name in ("return_time", "max_state", "end_state"):
            np.testing.assert_array_equal(getattr(fast, name), getattr(slow, name))


def test_unbanded_chain_simulates(ergodic_drift):
    stats = estimate_return_stats(ergodic_drift, 0, 200, 200, master_seed=3)
    assert stats.return_fraction == 1.0


def test_workers_do_not_change_results(powerlaw075):
    serial = estimate_return_stats(powerlaw075, 0, 64, 20_000, master_seed=5)
    for workers in (2, 3, 8):
        assert estimate_return_stats(powerlaw075, 0, 64, 20_000, master_seed=5, workers=workers) == serial


def test_positive_recurrent_returns():
    spec = build_builtin("birth_death", {"p": "1/3", "q": "2/3"})
    stats = estimate_return_stats(spec, 0, 10_000, 10_000, master_seed=2024, workers=4)
    assert stats.return_fraction > 0.99
    assert stats.censored_mean_return_time >= 1


def test_transient_escape_mass_visible(powerlaw075):
    stats = estimate_return_stats(powerlaw075, 0, 2000, 100_000, master_seed=1, workers=4)
    assert 0 <= stats.return_fraction < 1
    assert stats.returned < stats.n_trajectories


def test_monotone_censoring(powerlaw075):
    fractions = [
        estimate_return_stats(powerlaw075, 0, 300, steps, master_seed=8).return_fraction
        for steps in (10, 100, 1000, 10_000)
    ]
    assert fractions == sorted(fractions)


def test_stats_invariants_and_dict(sit_still1):
    stats = estimate_return_stats(sit_still1, 0, 100, 1000, master_seed=4)
    assert 0 <= stats.return_fraction <= 1
    assert stats.censored_mean_return_time >= 1
    d = stats.to_dict()
    assert d["master_seed"] == 4 and "cannot separate" in d["note"]


def test_trajectory_csv(tmp_path, sit_still1):
    path = tmp_path / "traj.csv"
    stats = estimate_return_stats(sit_still1, 0, 25, 500, master_seed=6, trajectories_csv=path)
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 25
    assert sum(int(r["return_time"]) >= 0 for r in rows) == stats.returned


def test_bad_arguments(sit_still1):
    with pytest.raises(ValueError):
        estimate_return_stats(sit_still1, 0, 0, 10, 1)
    with pytest.raises(ValueError):
        simulate_trajectory(sit_still1, -1, 10, 1)
    with pytest.raises(ValueError):
        empirical_drift(sit_still1, 0, 1, 1)


@pytest.mark.parametrize(
    "name,params,i,n,exact",
    [
        ("sit_still", {"k": 1}, 5, 100_000, 0.0),
        ("ergodic_drift", {}, 10, 100_000, 5.0),
        ("powerlaw_transient", {"alpha": 0.75}, 16, 1_000_000, 1 / 288),
    ],
)
def test_empirical_drift_examples(name, params, i, n, exact):
    est = empirical_drift(build_builtin(name, params), i, n, seed=77)
    assert abs(est.mean - exact) <= 4 * est.mean_se


@pytest.mark.parametrize("name,params", ALL_BUILTINS)
def test_empirical_drift_all_builtins(name, params):
    spec = build_builtin(name, params)
    states = [0, 1, 2, 3, 5, 8, 13, 21, 34, 49]
    prof = drift_profile(spec, 0, max(states))
    for k, i in enumerate(states):
        est = empirical_drift(spec, i, 20_000, seed=1000 + k)
        assert abs(est.mean - prof.gamma[i]) <= 4 * est.mean_se + 1e-12
        assert abs(est.second_moment - prof.sigma[i]) <= 4 * est.second_moment_se + 1e-12

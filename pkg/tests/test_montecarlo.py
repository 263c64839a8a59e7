"""Simulation determinism, null-model reduction, and momentum behavior."""

import math

import pytest

from scoreruns import gamedata, montecarlo, runcore
from scoreruns.gamedata import EventKind, SequenceMode
from scoreruns.montecarlo import SimConfig


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(n_events=0, p_same=0.38)
    with pytest.raises(ValueError):
        SimConfig(n_events=5, p_same=1.2)
    with pytest.raises(ValueError):
        SimConfig(n_events=5, p_same=0.38, momentum_delta=-0.1)
    with pytest.raises(ValueError):
        SimConfig(n_events=5, p_same=0.38, momentum_cap=0)
    with pytest.raises(ValueError):
        SimConfig(n_events=5, p_same=0.38, seed=-1)


def test_same_probability_boost_and_clamp():
    config = SimConfig(n_events=5, p_same=0.9, momentum_delta=0.05, momentum_cap=3)
    assert config.same_probability(1) == pytest.approx(0.9)  # no boost on a fresh run
    assert config.same_probability(2) == pytest.approx(0.95)
    assert config.same_probability(4) == pytest.approx(1.0)  # saturated at the cap
    assert config.same_probability(9) == pytest.approx(1.0)  # and clamped


def test_simulate_labels_degenerate_models():
    always = montecarlo.simulate_labels(SimConfig(n_events=5, p_same=1.0, seed=3))
    assert len(set(always)) == 1 and len(always) == 5
    never = montecarlo.simulate_labels(SimConfig(n_events=6, p_same=0.0, seed=3))
    assert all(a != b for a, b in zip(never, never[1:]))


def test_simulate_labels_deterministic():
    config = SimConfig(n_events=40, p_same=0.38, momentum_delta=0.02, momentum_cap=4, seed=77)
    assert montecarlo.simulate_labels(config) == montecarlo.simulate_labels(config)
    other = montecarlo.simulate_labels(SimConfig(n_events=40, p_same=0.38, seed=78))
    assert other != montecarlo.simulate_labels(config)


def test_simulate_bernoulli_labels():
    assert len(montecarlo.simulate_bernoulli_labels(1, seed=5)) == 1
    labels = montecarlo.simulate_bernoulli_labels(200, seed=5)
    assert set(labels) <= {"A", "B"}
    assert labels == montecarlo.simulate_bernoulli_labels(200, seed=5)
    with pytest.raises(ValueError):
        montecarlo.simulate_bernoulli_labels(0)


def test_empirical_pmf_point_mass_and_determinism():
    config = SimConfig(n_events=12, p_same=0.38, seed=11)
    point = montecarlo.empirical_longest_run_pmf(config, 1)
    assert len(point) == 1 and list(point.values()) == [1.0]
    a = montecarlo.empirical_longest_run_pmf(config, 30000)
    b = montecarlo.empirical_longest_run_pmf(config, 30000)
    assert a == b


def test_empirical_pmf_tallies_conserve_reps():
    config = SimConfig(n_events=30, p_same=0.38, seed=4)
    reps = montecarlo.PMF_CHUNK + 1234  # crosses a chunk boundary
    pmf = montecarlo.empirical_longest_run_pmf(config, reps)
    tallies = [v * reps for v in pmf.values()]
    assert all(abs(t - round(t)) < 1e-6 for t in tallies)
    assert sum(round(t) for t in tallies) == reps
    assert math.fsum(pmf.values()) == pytest.approx(1.0, abs=1e-12)


def test_empirical_pmf_tracks_exact_distribution():
    config = SimConfig(n_events=10, p_same=0.38, seed=21)
    emp = montecarlo.empirical_longest_run_pmf(config, 200000)
    exact = runcore.team_run_pmf(10, 0.38)
    for k in set(emp) | {k for k, v in exact.items() if v > 1e-6}:
        assert emp.get(k, 0.0) == pytest.approx(exact.get(k, 0.0), abs=0.005)


def test_null_model_s_proportion():
    # over 10^6 transitions the S share sits within 4 standard errors of p
    p = 0.38
    n = 10**6 + 1
    labels = montecarlo.simulate_labels(SimConfig(n_events=n, p_same=p, seed=99))
    ds = gamedata.derive_ds(labels)
    share = ds.count("S") / len(ds)
    se = math.sqrt(p * (1 - p) / len(ds))
    assert abs(share - p) < 4 * se


def test_momentum_mean_monotone():
    means = []
    for delta in (0.0, 0.02, 0.05, 0.1):
        config = SimConfig(
            n_events=40, p_same=0.38, momentum_delta=delta, momentum_cap=5, seed=31
        )
        means.append(montecarlo.empirical_mean_longest_run(config, 100000))
    assert all(b >= a for a, b in zip(means, means[1:]))
    assert means[-1] > means[0]


def test_simulate_season_shape_and_determinism():
    config = SimConfig(n_events=52, p_same=0.38, seed=123)
    season = montecarlo.simulate_season(25, (52, 106), config)
    assert len(season) == 25
    assert [g.game_id for g in season[:2]] == ["SIM-0001", "SIM-0002"]
    for game in season:
        assert 52 <= len(game.events) <= 106
        assert {e.kind for e in game.events} == {EventKind.FG2}
        assert {e.team for e in game.events} <= {"A", "B"}
        assert {e.period for e in game.events} == {1, 2, 3, 4}
    # byte-identical serialization for equal seeds
    again = montecarlo.simulate_season(25, (52, 106), config)
    assert gamedata.games_to_json(season) == gamedata.games_to_json(again)
    shifted = montecarlo.simulate_season(25, (52, 106), config, seed=124)
    assert gamedata.games_to_json(shifted) != gamedata.games_to_json(season)


def test_simulate_season_halves_split_evenly():
    config = SimConfig(n_events=52, p_same=0.38, seed=5)
    game = montecarlo.simulate_season(1, (80, 80), config)[0]
    first = gamedata.scoring_sequence(game, SequenceMode.FG_ONLY, gamedata.GameScope.FIRST_HALF)
    second = gamedata.scoring_sequence(game, SequenceMode.FG_ONLY, gamedata.GameScope.SECOND_HALF)
    assert len(first) == len(second) == 40


def test_simulate_season_rejects_bad_ranges():
    config = SimConfig(n_events=52, p_same=0.38)
    with pytest.raises(ValueError):
        montecarlo.simulate_season(0, (52, 106), config)
    with pytest.raises(ValueError):
        montecarlo.simulate_season(5, (1, 10), config)
    with pytest.raises(ValueError):
        montecarlo.simulate_season(5, (10, 9), config)


def test_season_event_totals():
    config = SimConfig(n_events=52, p_same=0.38, seed=8)
    season = montecarlo.simulate_season(4, (52, 60), config)
    assert montecarlo.season_event_totals(season) == [len(g.events) for g in season]

"""Seeded simulation of scoring sequences and whole synthetic seasons.

Serves two roles: an empirical oracle for the exact run distributions, and a
generator of null-model and momentum-model seasons for calibration and power
checks. All randomness comes from numpy's PCG64 generator with substreams
derived from (master seed, index), so results are reproducible regardless of
chunking or scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .gamedata import EventKind, GameLog, ScoringEvent

# Replicates simulated per RNG substream in the empirical-pmf estimator.
PMF_CHUNK = 65536

PERIOD_SECONDS = 720.0


@dataclass(frozen=True)
class SimConfig:
    """One simulated game's parameters.

    The next scoring event repeats the previous team with probability
    p_same + momentum_delta * min(current_run - 1, momentum_cap), clamped to
    [0, 1]. With momentum_delta = 0 this is the independent null model.
    """

    n_events: int
    p_same: float
    momentum_delta: float = 0.0
    momentum_cap: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n_events < 1:
            raise ValueError(f"n_events must be >= 1, got {self.n_events}")
        if not 0.0 <= self.p_same <= 1.0:
            raise ValueError(f"p_same must lie in [0, 1], got {self.p_same}")
        if self.momentum_delta < 0:
            raise ValueError(f"momentum_delta must be >= 0, got {self.momentum_delta}")
        if self.momentum_cap < 1:
            raise ValueError(f"momentum_cap must be >= 1, got {self.momentum_cap}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def same_probability(self, current_run: int) -> float:
        boost = self.momentum_delta * min(current_run - 1, self.momentum_cap)
        return min(1.0, max(0.0, self.p_same + boost))


def simulate_labels(config: SimConfig, rng: np.random.Generator | None = None) -> list[str]:
    """One game's ordered team labels under the (possibly momentum) model.

    The first scorer is chosen equiprobably; each later event repeats the
    previous team with the run-adjusted S-probability.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    labels = ["A" if int(rng.integers(2)) == 0 else "B"]
    if config.n_events > 1:
        draws = rng.random(config.n_events - 1)
        run = 1
        for u in draws:
            if u < config.same_probability(run):
                labels.append(labels[-1])
                run += 1
            else:
                labels.append("A" if labels[-1] == "B" else "B")
                run = 1
    return labels


def simulate_bernoulli_labels(n: int, seed: int = 0) -> list[str]:
    """n independent fair-coin team labels (no possession correction)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return ["A" if bit == 0 else "B" for bit in rng.integers(0, 2, size=n)]


def _batch_longest_runs(config: SimConfig, size: int, rng: np.random.Generator) -> np.ndarray:
    """Longest team runs of `size` simulated games, one column of draws at a time.

    Tracks (current run, max run) vectors across games; the team identities
    never matter for run lengths, only the same/different draws do.
    """
    cur = np.ones(size)
    best = np.ones(size)
    if config.n_events > 1:
        draws = rng.random((size, config.n_events - 1))
        for j in range(config.n_events - 1):
            boost = config.momentum_delta * np.minimum(cur - 1.0, float(config.momentum_cap))
            p_eff = np.clip(config.p_same + boost, 0.0, 1.0)
            cur = np.where(draws[:, j] < p_eff, cur + 1.0, 1.0)
            np.maximum(best, cur, out=best)
    return best.astype(np.int64)


def empirical_longest_run_pmf(config: SimConfig, reps: int) -> dict[int, float]:
    """Relative frequencies of the longest team run over `reps` simulated games.

    Games are simulated in fixed-size chunks, each on its own substream
    derived from (seed, chunk index), so the result is independent of chunk
    scheduling. Integer tallies conserve the replicate count exactly.
    """
    reps = int(reps)
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    counts = np.zeros(config.n_events + 1, dtype=np.int64)
    done = 0
    chunk_index = 0
    while done < reps:
        size = min(PMF_CHUNK, reps - done)
        rng = np.random.default_rng([config.seed, chunk_index])
        runs = _batch_longest_runs(config, size, rng)
        counts += np.bincount(runs, minlength=config.n_events + 1)
        done += size
        chunk_index += 1
    assert int(counts.sum()) == reps
    return {length: int(c) / reps for length, c in enumerate(counts) if c > 0}


def empirical_mean_longest_run(config: SimConfig, reps: int) -> float:
    pmf = empirical_longest_run_pmf(config, reps)
    return sum(length * prob for length, prob in pmf.items())


def _synthetic_events(labels: list[str]) -> tuple[ScoringEvent, ...]:
    """Lay labels out as FG2s on a synthetic clock, 4 periods split by index."""
    n = len(labels)
    periods = [1 + (4 * j) // n for j in range(n)]
    per_period: dict[int, int] = {}
    for p in periods:
        per_period[p] = per_period.get(p, 0) + 1
    events = []
    rank: dict[int, int] = {}
    for label, p in zip(labels, periods):
        r = rank.get(p, 0)
        rank[p] = r + 1
        clock = PERIOD_SECONDS * (1.0 - (r + 0.5) / per_period[p])
        events.append(
            ScoringEvent(
                period=p,
                clock_seconds_remaining=round(clock, 1),
                team=label,
                kind=EventKind.FG2,
            )
        )
    return tuple(events)


def simulate_season(
    games: int,
    event_count_range: tuple[int, int],
    config: SimConfig,
    seed: int | None = None,
) -> list[GameLog]:
    """Simulate a season of GameLogs with event totals uniform on the range.

    Game i draws from substream (seed, i): first its event total, inclusive
    of both endpoints, then its labels. The template config supplies the
    model parameters; its n_events is overridden per game.
    """
    games = int(games)
    if games < 1:
        raise ValueError(f"games must be >= 1, got {games}")
    low, high = (int(event_count_range[0]), int(event_count_range[1]))
    if low < 2:
        raise ValueError(f"event count range must start at >= 2, got {low}")
    if high < low:
        raise ValueError(f"empty event count range [{low}, {high}]")
    master = config.seed if seed is None else seed
    season = []
    for i in range(games):
        rng = np.random.default_rng([master, i])
        total = int(rng.integers(low, high + 1))
        labels = simulate_labels(replace(config, n_events=total), rng=rng)
        season.append(
            GameLog(
                game_id=f"SIM-{i + 1:04d}",
                home_team="A",
                away_team="B",
                events=_synthetic_events(labels),
            )
        )
    return season


def season_event_totals(season: Iterable[GameLog]) -> list[int]:
    return [len(game.events) for game in season]

"""Play-by-play scoring logs and the sequences derived from them.

Ingests per-game scoring events from CSV or JSON, collapses free-throw trips,
flags and-ones, and turns event streams into team-label and same/different
sequences for run analysis.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, TextIO


class GameDataError(ValueError):
    """Invalid scoring-log content."""


class ParseError(GameDataError):
    """Malformed input; carries the offending row number when known."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class EventKind(str, Enum):
    FG2 = "FG2"
    FG3 = "FG3"
    FT_TRIP = "FT_TRIP"


class SequenceMode(str, Enum):
    FG_ONLY = "fg"
    FG_PLUS_FT = "fg+ft"


class GameScope(str, Enum):
    FULL_GAME = "full"
    FIRST_HALF = "first-half"
    SECOND_HALF = "second-half"


# Raw input rows use FT for made free throws; trips are collapsed on ingest.
_RAW_EVENT_TYPES = {"FG2": EventKind.FG2, "FG3": EventKind.FG3, "FT": None}

CSV_HEADER = [
    "game_id",
    "date",
    "home_team",
    "away_team",
    "period",
    "clock_seconds_remaining",
    "team",
    "event_type",
    "points",
]


@dataclass(frozen=True)
class ScoringEvent:
    """One made scoring play: a field goal or a collapsed free-throw trip."""

    period: int
    clock_seconds_remaining: float
    team: str
    kind: EventKind
    and_one: bool = False

    def __post_init__(self):
        if self.period < 1:
            raise GameDataError(f"period must be >= 1, got {self.period}")
        if self.clock_seconds_remaining < 0:
            raise GameDataError(f"clock must be >= 0, got {self.clock_seconds_remaining}")
        if self.and_one and self.kind is not EventKind.FT_TRIP:
            raise GameDataError("and_one applies only to free-throw trips")


@dataclass(frozen=True)
class GameLog:
    """Ordered scoring events for one game."""

    game_id: str
    home_team: str
    away_team: str
    events: tuple[ScoringEvent, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        last = None
        for event in self.events:
            if event.team not in (self.home_team, self.away_team):
                raise GameDataError(
                    f"game {self.game_id}: team {event.team!r} is neither home nor away"
                )
            key = (event.period, -event.clock_seconds_remaining)
            if last is not None and key < last:
                raise GameDataError(
                    f"game {self.game_id}: events out of order at period {event.period}, "
                    f"clock {event.clock_seconds_remaining}"
                )
            last = key


@dataclass(frozen=True)
class TeamSeasonStats:
    team: str
    point_differential: float


def team_stats_mapping(stats: Iterable[TeamSeasonStats]) -> dict[str, float]:
    return {s.team: s.point_differential for s in stats}


# ---------------------------------------------------------------------------
# Parsing


def _collapse_rows(rows: list[dict], game_id: str) -> tuple[ScoringEvent, ...]:
    """Collapse made-FT rows into trips and flag and-ones.

    Consecutive made-FT rows by one team at one (period, clock) stoppage form
    a single trip; a trip whose first free throw directly follows a made field
    goal by the same team at the same clock is an and-one.
    """
    events: list[ScoringEvent] = []
    prev: dict | None = None  # previous made scoring row, pre-collapse
    for row in rows:
        stoppage = (row["period"], row["clock"], row["team"])
        if row["kind"] is None:  # made free throw
            if (
                prev is not None
                and prev["kind"] is None
                and (prev["period"], prev["clock"], prev["team"]) == stoppage
            ):
                pass  # same trip; nothing new to emit
            else:
                and_one = (
                    prev is not None
                    and prev["kind"] in (EventKind.FG2, EventKind.FG3)
                    and (prev["period"], prev["clock"], prev["team"]) == stoppage
                )
                events.append(
                    ScoringEvent(
                        period=row["period"],
                        clock_seconds_remaining=row["clock"],
                        team=row["team"],
                        kind=EventKind.FT_TRIP,
                        and_one=and_one,
                    )
                )
        else:
            events.append(
                ScoringEvent(
                    period=row["period"],
                    clock_seconds_remaining=row["clock"],
                    team=row["team"],
                    kind=row["kind"],
                )
            )
        prev = row
    return tuple(events)


def _classify_raw_row(event_type: str, points: int, row_num: int) -> EventKind | None | str:
    """Map a raw row to an event kind, None for a made FT, or "skip"."""
    event_type = event_type.strip().upper()
    if points == 0:
        return "skip"  # missed shot or non-scoring row
    if event_type not in _RAW_EVENT_TYPES:
        raise ParseError(f"unknown scoring event type {event_type!r}", row_num)
    return _RAW_EVENT_TYPES[event_type]


def _parse_int(value, name: str, row_num: int) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParseError(f"{name} must be an integer, got {value!r}", row_num) from None


def _parse_float(value, name: str, row_num: int) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ParseError(f"{name} must be a number, got {value!r}", row_num) from None


def parse_games_csv(source: TextIO | str) -> list[GameLog]:
    """Parse a season CSV of made scoring plays into one GameLog per game.

    Rows belonging to one game must be contiguous and in played order.
    Non-scoring rows (points = 0) are skipped.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.DictReader(source)
    if reader.fieldnames is None:
        raise ParseError("empty input, header row required")
    missing = [name for name in CSV_HEADER if name not in reader.fieldnames]
    if missing:
        raise ParseError(f"missing columns: {', '.join(missing)}")

    games: list[GameLog] = []
    seen: set[str] = set()
    current: dict | None = None  # game_id, home, away, rows

    def finish(game: dict) -> None:
        try:
            events = _collapse_rows(game["rows"], game["game_id"])
            games.append(
                GameLog(
                    game_id=game["game_id"],
                    home_team=game["home"],
                    away_team=game["away"],
                    events=events,
                )
            )
        except GameDataError as exc:
            raise ParseError(str(exc), game["first_row"]) from exc

    for row_num, row in enumerate(reader, start=2):
        if any(row.get(name) is None for name in CSV_HEADER):
            raise ParseError("wrong number of fields", row_num)
        game_id = row["game_id"].strip()
        if not game_id:
            raise ParseError("empty game_id", row_num)
        if current is None or game_id != current["game_id"]:
            if current is not None:
                finish(current)
            if game_id in seen:
                raise ParseError(f"rows for game {game_id!r} are not contiguous", row_num)
            seen.add(game_id)
            current = {
                "game_id": game_id,
                "home": row["home_team"].strip(),
                "away": row["away_team"].strip(),
                "rows": [],
                "first_row": row_num,
            }
        kind = _classify_raw_row(row["event_type"], _parse_int(row["points"], "points", row_num), row_num)
        if kind == "skip":
            continue
        team = row["team"].strip()
        if team not in (current["home"], current["away"]):
            raise ParseError(f"unknown team {team!r} for game {game_id!r}", row_num)
        period = _parse_int(row["period"], "period", row_num)
        clock = _parse_float(row["clock_seconds_remaining"], "clock_seconds_remaining", row_num)
        if period < 1:
            raise ParseError(f"period must be >= 1, got {period}", row_num)
        if clock < 0:
            raise ParseError(f"clock must be >= 0, got {clock}", row_num)
        prev_rows = current["rows"]
        if prev_rows and (period, -clock) < (prev_rows[-1]["period"], -prev_rows[-1]["clock"]):
            raise ParseError(
                f"events out of order for game {game_id!r}: period {period}, clock {clock}",
                row_num,
            )
        prev_rows.append({"period": period, "clock": clock, "team": team, "kind": kind})

    if current is not None:
        finish(current)
    return games


def _game_from_json_obj(obj: dict, index: int) -> GameLog:
    try:
        game_id = str(obj["game_id"])
        home = str(obj["home_team"])
        away = str(obj["away_team"])
        raw_events = obj["events"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"game object #{index} missing field: {exc}") from None

    rows = []
    collapsed: list[ScoringEvent] = []
    is_collapsed = any("kind" in e for e in raw_events)
    for ev_num, ev in enumerate(raw_events, start=1):
        try:
            period = int(ev["period"])
            clock = float(ev["clock_seconds_remaining"])
            team = str(ev["team"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad event in game {game_id!r}: {exc}", ev_num) from None
        if team not in (home, away):
            raise ParseError(f"unknown team {team!r} for game {game_id!r}", ev_num)
        if is_collapsed:
            kind_name = str(ev.get("kind", ""))
            try:
                kind = EventKind(kind_name)
            except ValueError:
                raise ParseError(f"unknown event kind {kind_name!r}", ev_num) from None
            collapsed.append(
                ScoringEvent(
                    period=period,
                    clock_seconds_remaining=clock,
                    team=team,
                    kind=kind,
                    and_one=bool(ev.get("and_one", False)),
                )
            )
        else:
            kind = _classify_raw_row(str(ev.get("event_type", "")), int(ev.get("points", 0)), ev_num)
            if kind == "skip":
                continue
            rows.append({"period": period, "clock": clock, "team": team, "kind": kind})

    events = tuple(collapsed) if is_collapsed else _collapse_rows(rows, game_id)
    return GameLog(game_id=game_id, home_team=home, away_team=away, events=events)


def parse_games_json(source: TextIO | str) -> list[GameLog]:
    """Parse a JSON array of games, in raw (event_type/points) or collapsed
    (kind/and_one) form."""
    text = source if isinstance(source, str) else source.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise ParseError("top-level JSON value must be an array of games")
    return [_game_from_json_obj(obj, i) for i, obj in enumerate(data)]


def parse_game_log(source: TextIO | str, format: str = "csv") -> GameLog:
    """Parse a source holding exactly one game."""
    if format == "csv":
        games = parse_games_csv(source)
    elif format == "json":
        games = parse_games_json(source)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {format!r}")
    if len(games) != 1:
        raise ParseError(f"expected exactly one game, found {len(games)}")
    return games[0]


def load_games(path: str, format: str | None = None) -> list[GameLog]:
    """Load a season file, inferring CSV vs JSON from the extension."""
    if format is None:
        format = "json" if str(path).lower().endswith(".json") else "csv"
    with open(path, "r", encoding="utf-8", newline="") as handle:
        if format == "json":
            return parse_games_json(handle)
        return parse_games_csv(handle)


# ---------------------------------------------------------------------------
# Serialization


def game_log_to_dict(game: GameLog) -> dict:
    return {
        "game_id": game.game_id,
        "home_team": game.home_team,
        "away_team": game.away_team,
        "events": [
            {
                "period": e.period,
                "clock_seconds_remaining": e.clock_seconds_remaining,
                "team": e.team,
                "kind": e.kind.value,
                "and_one": e.and_one,
            }
            for e in game.events
        ],
    }


def games_to_json(games: Iterable[GameLog]) -> str:
    """Serialize games in the collapsed schema (round-trips exactly)."""
    return json.dumps([game_log_to_dict(g) for g in games], indent=2)


def games_to_raw_csv(games: Iterable[GameLog], date: str = "1970-01-01") -> str:
    """Serialize games in the raw input CSV schema.

    Free-throw trips are written as a single made FT worth 1 point; their
    points total is not tracked, and and-one adjacency is implied by clock
    equality with the preceding field goal.
    """
    points = {EventKind.FG2: 2, EventKind.FG3: 3, EventKind.FT_TRIP: 1}
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for game in games:
        for e in game.events:
            writer.writerow(
                [
                    game.game_id,
                    date,
                    game.home_team,
                    game.away_team,
                    e.period,
                    f"{e.clock_seconds_remaining:g}",
                    e.team,
                    "FT" if e.kind is EventKind.FT_TRIP else e.kind.value,
                    points[e.kind],
                ]
            )
    return out.getvalue()


def load_team_stats(source: TextIO | str) -> dict[str, float]:
    """Read a team,point_differential CSV into a mapping."""
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.DictReader(source)
    if reader.fieldnames is None or not {"team", "point_differential"} <= set(reader.fieldnames):
        raise ParseError("team stats CSV needs 'team' and 'point_differential' columns")
    stats: dict[str, float] = {}
    for row_num, row in enumerate(reader, start=2):
        team = row["team"].strip()
        stats[team] = _parse_float(row["point_differential"], "point_differential", row_num)
    return stats


# ---------------------------------------------------------------------------
# Sequence derivation


def scoring_sequence(
    game: GameLog,
    mode: SequenceMode,
    scope: GameScope = GameScope.FULL_GAME,
    include_overtime: bool = True,
) -> list[str]:
    """Ordered team labels of the game's scoring events under a run definition.

    FG_ONLY keeps field goals; FG_PLUS_FT adds free-throw trips except
    and-ones, which do not change possession and so do not break or extend a
    run on their own. Overtime periods count toward the second half unless
    excluded outright.
    """
    labels = []
    for e in game.events:
        if e.kind is EventKind.FT_TRIP:
            if mode is SequenceMode.FG_ONLY or e.and_one:
                continue
        if e.period > 4 and not include_overtime:
            continue
        if scope is GameScope.FIRST_HALF and e.period > 2:
            continue
        if scope is GameScope.SECOND_HALF and e.period <= 2:
            continue
        labels.append(e.team)
    return labels


def derive_ds(labels: Iterable[str]) -> str:
    """Same/different sequence: S where a label repeats its predecessor, else D."""
    labels = list(labels)
    return "".join("S" if b == a else "D" for a, b in zip(labels, labels[1:]))


def longest_team_run(labels: Iterable[str]) -> int:
    """Length of the longest block of consecutive identical labels (0 if empty)."""
    best = current = 0
    prev = None
    for label in labels:
        current = current + 1 if label == prev else 1
        best = max(best, current)
        prev = label
    return best


def longest_run_for_team(labels: Iterable[str], team: str) -> int:
    """Longest block of consecutive labels equal to one specific team."""
    best = current = 0
    for label in labels:
        current = current + 1 if label == team else 0
        best = max(best, current)
    return best


def ds_counts(
    games: Iterable[GameLog],
    mode: SequenceMode,
    scope: GameScope = GameScope.FULL_GAME,
    include_overtime: bool = True,
) -> tuple[int, int]:
    """Pooled (same count, total symbols) over the games' derived sequences."""
    same = total = 0
    for game in games:
        ds = derive_ds(scoring_sequence(game, mode, scope, include_overtime))
        same += ds.count("S")
        total += len(ds)
    return same, total


def estimate_p_same(
    games: Iterable[GameLog],
    mode: SequenceMode,
    scope: GameScope = GameScope.FULL_GAME,
    include_overtime: bool = True,
) -> float:
    """Pooled sample proportion of S symbols across all derived sequences."""
    same, total = ds_counts(games, mode, scope, include_overtime)
    if total == 0:
        raise GameDataError("no derived symbols: every scope has fewer than two events")
    return same / total


def matched_games_filter(
    games: Iterable[GameLog],
    stats: Mapping[str, float],
    home_advantage: float = 5.0,
    window: float = 3.0,
) -> list[GameLog]:
    """Keep games whose visitor point differential sits within `window` of the
    home differential plus the home-court offset."""
    kept = []
    for game in games:
        for team in (game.home_team, game.away_team):
            if team not in stats:
                raise GameDataError(f"no season stats for team {team!r}")
        target = stats[game.home_team] + home_advantage
        if abs(stats[game.away_team] - target) <= window:
            kept.append(game)
    return kept

"""Expected-vs-observed longest-run tables and chi-square goodness of fit.

Expected counts come from summing each game's exact longest-run pmf; observed
counts tally the actual longest runs. Tables can be pooled from the tails so
every bin carries enough expected mass for the chi-square approximation.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from scipy.special import gammaincc

from . import runcore
from .gamedata import GameLog, GameScope, SequenceMode, longest_team_run, scoring_sequence


class GofError(ValueError):
    """Invalid table or test configuration."""


class DfConvention(str, Enum):
    # Whether one extra degree of freedom is charged for the pooled estimate
    # of the same-team probability.
    BINS_MINUS_1 = "bins-1"
    BINS_MINUS_2 = "bins-2"


@dataclass(frozen=True)
class LengthBin:
    """One (possibly pooled) row of a frequency table."""

    lo: int
    hi: int
    expected: float
    observed: int
    edge: str = ""  # "left"/"right" when the bin touches the table edge

    @property
    def label(self) -> str:
        if self.lo == self.hi:
            return str(self.lo)
        if self.edge == "left":
            return f"<={self.hi}"
        if self.edge == "right":
            return f"{self.lo}+"
        return f"{self.lo}-{self.hi}"


@dataclass(frozen=True)
class LengthFrequencyTable:
    """Per-length expected and observed counts, with optional pooling.

    The fine-grained rows are always retained; pooling only records group
    boundaries, so pooled totals equal unpooled totals by construction.
    """

    lengths: tuple[int, ...]
    expected: tuple[float, ...]
    observed: tuple[int, ...]
    groups: tuple[tuple[int, int], ...] | None = None  # (start, stop) row slices

    def __post_init__(self):
        if not (len(self.lengths) == len(self.expected) == len(self.observed)):
            raise GofError("lengths, expected, and observed must align")
        if any(b <= a for a, b in zip(self.lengths, self.lengths[1:])):
            raise GofError("lengths must be strictly increasing")
        if any(e < 0 for e in self.expected):
            raise GofError("expected counts must be >= 0")
        if any(o < 0 for o in self.observed):
            raise GofError("observed counts must be >= 0")
        if self.groups is not None:
            flat = [i for start, stop in self.groups for i in range(start, stop)]
            if flat != list(range(len(self.lengths))):
                raise GofError("groups must partition the rows in order")

    @classmethod
    def from_counts(
        cls, expected: Mapping[int, float], observed: Mapping[int, int]
    ) -> "LengthFrequencyTable":
        lengths = sorted(set(expected) | set(observed))
        return cls(
            lengths=tuple(lengths),
            expected=tuple(float(expected.get(k, 0.0)) for k in lengths),
            observed=tuple(int(observed.get(k, 0)) for k in lengths),
        )

    @property
    def is_pooled(self) -> bool:
        return self.groups is not None

    def expected_total(self) -> float:
        return math.fsum(self.expected)

    def observed_total(self) -> int:
        return sum(self.observed)

    def bins(self) -> list[LengthBin]:
        groups = self.groups or tuple((i, i + 1) for i in range(len(self.lengths)))
        out = []
        for index, (start, stop) in enumerate(groups):
            edge = ""
            if stop - start > 1:
                if index == 0:
                    edge = "left"
                elif index == len(groups) - 1:
                    edge = "right"
            out.append(
                LengthBin(
                    lo=self.lengths[start],
                    hi=self.lengths[stop - 1],
                    expected=math.fsum(self.expected[start:stop]),
                    observed=sum(self.observed[start:stop]),
                    edge=edge,
                )
            )
        return out

    def pooling_description(self) -> str:
        if not self.is_pooled:
            return "none"
        merged = [b.label for b in self.bins() if b.lo != b.hi]
        return "merged " + ", ".join(merged) if merged else "none"


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    degrees_of_freedom: int
    p_value: float
    pooling: str
    df_convention: DfConvention


def expected_counts(event_counts: Iterable[int], p_same: float) -> dict[int, float]:
    """Sum the exact per-game longest-run pmfs into expected counts per length.

    Total mass equals the number of games. Distributions are cached per
    distinct event total, so seasons of similar games stay cheap.
    """
    totals: dict[int, float] = {}
    cache: dict[int, dict[int, float]] = {}
    n_games = 0
    for count in event_counts:
        count = int(count)
        if count < 1:
            raise GofError(f"every event count must be >= 1, got {count}")
        pmf = cache.get(count)
        if pmf is None:
            pmf = cache[count] = runcore.team_run_pmf(count, p_same)
        for length, prob in pmf.items():
            totals[length] = totals.get(length, 0.0) + prob
        n_games += 1
    return {length: totals[length] for length in sorted(totals)}


def observed_counts(
    games: Iterable[GameLog],
    mode: SequenceMode,
    scope: GameScope = GameScope.FULL_GAME,
    include_overtime: bool = True,
) -> dict[int, int]:
    """Frequency of each longest-run length across games (or halves)."""
    tally = Counter(
        longest_team_run(scoring_sequence(game, mode, scope, include_overtime))
        for game in games
    )
    return {length: tally[length] for length in sorted(tally)}


def pool_bins(table: LengthFrequencyTable, min_expected: float = 5.0) -> LengthFrequencyTable:
    """Merge bins from each tail inward until every bin has enough expected mass.

    Total expected and observed mass is preserved exactly: the fine-grained
    rows are kept and only group boundaries change.
    """
    if min_expected <= 0:
        raise GofError(f"min_expected must be > 0, got {min_expected}")
    groups = [(i, i + 1) for i in range(len(table.lengths))]

    def group_expected(g: tuple[int, int]) -> float:
        return math.fsum(table.expected[g[0] : g[1]])

    def merge(i: int) -> None:
        groups[i : i + 2] = [(groups[i][0], groups[i + 1][1])]

    while len(groups) > 1 and group_expected(groups[0]) < min_expected:
        merge(0)
    while len(groups) > 1 and group_expected(groups[-1]) < min_expected:
        merge(len(groups) - 2)
    # Interior deficits are possible only for non-unimodal tables; fold them
    # into the lighter neighbor.
    while len(groups) > 1 and any(group_expected(g) < min_expected for g in groups):
        i = next(k for k, g in enumerate(groups) if group_expected(g) < min_expected)
        left = group_expected(groups[i - 1]) if i > 0 else math.inf
        right = group_expected(groups[i + 1]) if i < len(groups) - 1 else math.inf
        merge(i - 1 if left <= right else i)
    if len(groups) < 2 or any(group_expected(g) < min_expected for g in groups):
        raise GofError("pooling collapsed the table to fewer than 2 usable bins")
    return LengthFrequencyTable(
        lengths=table.lengths,
        expected=table.expected,
        observed=table.observed,
        groups=tuple(groups),
    )


def chi_square_upper_tail(statistic: float, df: int) -> float:
    """P(chi-square with df degrees of freedom >= statistic), via the
    regularized upper incomplete gamma function."""
    if df < 1:
        raise GofError(f"degrees of freedom must be >= 1, got {df}")
    if statistic < 0:
        raise GofError(f"statistic must be >= 0, got {statistic}")
    return float(gammaincc(df / 2.0, statistic / 2.0))


def chi_square_test(
    table: LengthFrequencyTable,
    df_convention: DfConvention = DfConvention.BINS_MINUS_1,
) -> ChiSquareResult:
    """Pearson goodness-of-fit test on a (typically pooled) table."""
    bins = table.bins()
    if len(bins) < 2:
        raise GofError("chi-square needs at least 2 bins")
    if any(b.expected <= 0 for b in bins):
        raise GofError("chi-square needs every expected count > 0")
    df_offset = 1 if df_convention is DfConvention.BINS_MINUS_1 else 2
    df = len(bins) - df_offset
    if df < 1:
        raise GofError(
            f"{df_convention.value} needs at least {df_offset + 1} bins, got {len(bins)}"
        )
    statistic = math.fsum((b.observed - b.expected) ** 2 / b.expected for b in bins)
    return ChiSquareResult(
        statistic=statistic,
        degrees_of_freedom=df,
        p_value=chi_square_upper_tail(statistic, df),
        pooling=table.pooling_description(),
        df_convention=df_convention,
    )


def summarize(table: LengthFrequencyTable) -> tuple[float, float]:
    """(expected mean, observed mean) of run length, weighted by counts."""
    e_total = table.expected_total()
    o_total = table.observed_total()
    if e_total <= 0 or o_total <= 0:
        raise GofError("cannot summarize a table with zero mass")
    e_mean = math.fsum(k * e for k, e in zip(table.lengths, table.expected)) / e_total
    o_mean = math.fsum(k * o for k, o in zip(table.lengths, table.observed)) / o_total
    return e_mean, o_mean


# ---------------------------------------------------------------------------
# Table serialization (the machine-readable forms of the run-length tables)


def table_to_tsv(table: LengthFrequencyTable, include_mean: bool = True) -> str:
    lines = ["length\texpected\tobserved"]
    for b in table.bins():
        lines.append(f"{b.label}\t{b.expected!r}\t{b.observed}")
    if include_mean:
        e_mean, o_mean = summarize(table)
        lines.append(f"mean\t{e_mean!r}\t{o_mean!r}")
    return "\n".join(lines) + "\n"


def table_from_tsv(text: str) -> LengthFrequencyTable:
    """Parse an unpooled TSV table; a trailing mean row is ignored."""
    expected: dict[int, float] = {}
    observed: dict[int, int] = {}
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0].split("\t") != ["length", "expected", "observed"]:
        raise GofError("TSV table must start with 'length\\texpected\\tobserved'")
    for line in lines[1:]:
        parts = line.split("\t")
        if len(parts) != 3:
            raise GofError(f"bad TSV row: {line!r}")
        if parts[0].strip().lower() == "mean":
            continue
        try:
            length = int(parts[0])
            expected[length] = float(parts[1])
            observed[length] = int(round(float(parts[2])))
        except ValueError as exc:
            raise GofError(f"bad TSV row {line!r}: {exc}") from None
    return LengthFrequencyTable.from_counts(expected, observed)


def table_to_json_dict(table: LengthFrequencyTable) -> dict:
    e_mean, o_mean = summarize(table)
    doc = {
        "rows": [
            {"length": k, "expected": e, "observed": o}
            for k, e, o in zip(table.lengths, table.expected, table.observed)
        ],
        "expected_mean": e_mean,
        "observed_mean": o_mean,
    }
    if table.is_pooled:
        doc["pooled_bins"] = [
            {"label": b.label, "expected": b.expected, "observed": b.observed}
            for b in table.bins()
        ]
    return doc


def table_to_json(table: LengthFrequencyTable) -> str:
    return json.dumps(table_to_json_dict(table), indent=2)

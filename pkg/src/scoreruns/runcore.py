"""Exact distributions of the longest success run in Bernoulli trials.

The production method builds an absorbing Markov chain whose states track the
current success-run length (capped at an absorbing length m) and reads
P(longest run >= m) off the n-th power of the transition matrix.  Two
independent methods, a dynamic program over (current run, max run) states and
a full 2^n enumeration, serve as cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# P(longest >= m) tail values below this are treated as zero when sweeping m.
TAIL_EPS = 1e-15

# Brute-force enumeration cost guard: 2^n outcome sequences.
BRUTE_FORCE_MAX_N = 20


def _check_probability(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return p


def _check_trials(n: int) -> int:
    n = int(n)
    if n < 0:
        raise ValueError(f"trial count must be >= 0, got {n}")
    return n


@dataclass(frozen=True)
class AbsorbingChain:
    """Transition matrix of the run-length chain with absorbing cap m.

    State i (0 <= i < m) is the current success-run length; a success moves
    to i+1, a failure resets to 0.  State m is absorbing and encodes "a run
    of length >= m has occurred".
    """

    p: float
    m: int
    entries: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.m + 1


@dataclass(frozen=True)
class LongestRunDistribution:
    """Exact pmf of the longest success run in n Bernoulli(p) trials."""

    n: int
    p: float
    pmf: dict[int, float]

    def expectation(self) -> float:
        return float(sum(length * prob for length, prob in self.pmf.items()))

    def cdf(self, length: int) -> float:
        return float(sum(prob for k, prob in self.pmf.items() if k <= length))


def build_transition_matrix(p: float, m: int) -> AbsorbingChain:
    """Build the (m+1)x(m+1) run-length transition matrix.

    Row i (i < m) has 1-p at column 0 and p at column i+1; row m is
    absorbing.
    """
    p = _check_probability(p)
    m = int(m)
    if m < 1:
        raise ValueError(f"absorbing run length must be >= 1, got {m}")
    entries = np.zeros((m + 1, m + 1))
    entries[:m, 0] = 1.0 - p
    entries[np.arange(m), np.arange(1, m + 1)] = p
    entries[m, m] = 1.0
    entries.setflags(write=False)
    return AbsorbingChain(p=p, m=m, entries=entries)


def matrix_power(chain: AbsorbingChain, n: int) -> np.ndarray:
    """n-th power of the chain's transition matrix (repeated squaring)."""
    n = _check_trials(n)
    return np.linalg.matrix_power(chain.entries, n)


def prob_longest_run_at_least(n: int, p: float, m: int) -> float:
    """P(longest success run in n trials >= m).

    This is the chain's n-step probability of absorption from state 0, the
    upper-right entry of the matrix power.
    """
    n = _check_trials(n)
    p = _check_probability(p)
    m = int(m)
    if m < 0:
        raise ValueError(f"run length must be >= 0, got {m}")
    if m == 0:
        return 1.0
    if m > n:
        return 0.0
    chain = build_transition_matrix(p, m)
    return float(matrix_power(chain, n)[0, m])


def longest_run_distribution(n: int, p: float) -> LongestRunDistribution:
    """Exact longest-run pmf via the absorbing chain.

    pmf(L) = P(longest >= L) - P(longest >= L+1), sweeping m upward and
    truncating once the tail falls below TAIL_EPS (it is non-increasing).
    """
    n = _check_trials(n)
    p = _check_probability(p)
    pmf = {length: 0.0 for length in range(n + 1)}
    if n == 0:
        pmf[0] = 1.0
        return LongestRunDistribution(n=n, p=p, pmf=pmf)
    tail_prev = 1.0  # P(longest >= 0)
    for m in range(1, n + 1):
        tail = prob_longest_run_at_least(n, p, m)
        if tail < TAIL_EPS:
            tail = 0.0
        # successive matrix powers are rounded independently; keep the tail
        # non-increasing so differences stay valid probabilities
        tail = min(tail, tail_prev)
        pmf[m - 1] = tail_prev - tail
        tail_prev = tail
        if tail == 0.0:
            break
    else:
        pmf[n] = tail_prev  # P(longest >= n) = p^n; nothing beyond n trials
    return LongestRunDistribution(n=n, p=p, pmf=pmf)


def expected_longest_run(n: int, p: float) -> float:
    """Expected length of the longest success run in n Bernoulli(p) trials."""
    return longest_run_distribution(n, p).expectation()


def dp_longest_run_distribution(n: int, p: float) -> LongestRunDistribution:
    """Exact longest-run pmf by dynamic programming (no Markov chain).

    Propagates the joint distribution of (current run length r, max run so
    far M) one trial at a time over the triangular state space r <= M.
    O(n^3) time, O(n^2) memory.
    """
    n = _check_trials(n)
    p = _check_probability(p)
    if n == 0:
        return LongestRunDistribution(n=n, p=p, pmf={0: 1.0})
    q = 1.0 - p
    # state[r, M] = P(current run = r, max run = M); only r <= M is reachable
    state = np.zeros((n + 1, n + 1))
    state[0, 0] = 1.0
    rows = np.arange(1, n + 1)
    for _ in range(n):
        nxt = np.zeros_like(state)
        nxt[0, :] = q * state.sum(axis=0)  # failure resets the run
        diag = np.diagonal(state).copy()
        np.fill_diagonal(state, 0.0)
        nxt[1:, :] += p * state[:-1, :]  # success inside the current max
        nxt[rows, rows] += p * diag[:-1]  # success extending the max
        state = nxt
    totals = state.sum(axis=0)
    pmf = {length: float(totals[length]) for length in range(n + 1)}
    return LongestRunDistribution(n=n, p=p, pmf=pmf)


def brute_force_distribution(n: int, p: float) -> LongestRunDistribution:
    """Exact longest-run pmf by enumerating all 2^n outcome sequences.

    Test oracle only; refuses n > BRUTE_FORCE_MAX_N.
    """
    n = _check_trials(n)
    p = _check_probability(p)
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if n == 0:
        return LongestRunDistribution(n=n, p=p, pmf={0: 1.0})
    masks = np.arange(1 << n, dtype=np.uint32)
    # Longest run of set bits: AND with a self-shift kills runs one bit per
    # round, so the round count at extinction is the run length.
    longest = np.zeros(masks.shape, dtype=np.int64)
    x = masks.copy()
    while True:
        alive = x != 0
        if not alive.any():
            break
        longest[alive] += 1
        x &= x << 1
    successes = np.zeros(masks.shape, dtype=np.int64)
    for bit in range(n):
        successes += (masks >> bit) & 1
    weight_by_count = np.array([p**k * (1.0 - p) ** (n - k) for k in range(n + 1)])
    totals = np.bincount(longest, weights=weight_by_count[successes], minlength=n + 1)
    pmf = {length: float(totals[length]) for length in range(n + 1)}
    return LongestRunDistribution(n=n, p=p, pmf=pmf)


# A game with N scoring events yields N-1 derived same/different symbols, and
# a run of k consecutive "same" symbols is a run of k+1 consecutive scores.
# The literal N-1 trial count reproduces the expected-longest-run reference
# values within 0.02 at p = 0.38, so it is the adopted convention.
TRIAL_CONVENTION = "total_scores - 1"


def derived_trials(total_scores: int) -> int:
    """Number of derived same/different trials for a game with the given score total."""
    total_scores = int(total_scores)
    if total_scores < 1:
        raise ValueError(f"total_scores must be >= 1, got {total_scores}")
    return total_scores - 1


def team_run_pmf(total_scores: int, p_same: float) -> dict[int, float]:
    """Exact pmf of the longest scoring run by either team in one game.

    A longest run of L scores corresponds to a longest same-team run of L-1
    in the derived sequence, so this is the longest-run pmf shifted up by one.
    """
    trials = derived_trials(total_scores)
    dist = longest_run_distribution(trials, p_same)
    return {length + 1: prob for length, prob in dist.pmf.items()}


def team_run_expectation(total_scores: int, p_same: float) -> float:
    """Expected longest scoring run by either team in a game with total_scores events."""
    return 1.0 + expected_longest_run(derived_trials(total_scores), p_same)

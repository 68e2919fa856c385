"""Reviewer assignment: seeded random or incentive-aligned, plus diagnostics.

Both policies order the submitters and then connect them on a cycle:
the participant at position j is reviewed by the participants at positions
j+1 .. j+d (mod n), d = min(k, n-1). The cyclic construction guarantees a
d-regular derangement (no self pairs, no duplicates, out-degree = in-degree
= d) for any ordering, so policy only decides the ordering step:

* RANDOM    - uniform seeded permutation.
* INCENTIVE - descending usefulness score, ties broken by a seeded hash so
  no identity enjoys a stable advantage across rounds. Rank adjacency means
  students who wrote useful feedback get the other useful reviewers.

Under INCENTIVE the d lowest-ranked positions wrap around the cycle and are
reviewed by the top of the ranking; assortativity measurements can exclude
those wrap positions, which is the documented caveat of this construction.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import TooFewSubmitters


class Policy(Enum):
    RANDOM = "RANDOM"
    INCENTIVE = "INCENTIVE"


DEFAULT_SCORE = 3.0  # cold-start usefulness: midpoint of the 1..5 scale


@dataclass(frozen=True)
class UsefulnessScore:
    participant: str
    value: float
    n_ratings: int


@dataclass(frozen=True)
class AssignmentSet:
    round_id: str
    pairs: tuple[tuple[str, str], ...]  # (reviewer, author)
    policy: Policy
    seed: int
    order: tuple[str, ...]  # post-ordering sequence the cycle was built on

    @property
    def fan_out(self) -> int:
        return len(self.pairs) // len(self.order) if self.order else 0


@dataclass(frozen=True)
class ValidityReport:
    violations: tuple[tuple[str, str], ...]  # (code, detail)

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class AssortativityResult:
    value: float
    degenerate: bool  # all ranks tied; correlation undefined, value forced to 0


def usefulness_score(participant: str, rating_history: Iterable[int]) -> UsefulnessScore:
    """Mean stars over all prior-round ratings; 3.0 for a blank history."""
    stars = list(rating_history)
    for s in stars:
        if not 1 <= s <= 5:
            raise ValueError(f"star rating {s!r} outside 1..5")
    if not stars:
        return UsefulnessScore(participant, DEFAULT_SCORE, 0)
    return UsefulnessScore(participant, sum(stars) / len(stars), len(stars))


def pooled_score(participant: str, round_stats: Iterable[tuple[float, int]]) -> UsefulnessScore:
    """Pooled mean from per-round (mean, count) entries, as kept on a Participant."""
    total = 0.0
    n = 0
    for mean, count in round_stats:
        total += mean * count
        n += count
    if n == 0:
        return UsefulnessScore(participant, DEFAULT_SCORE, 0)
    return UsefulnessScore(participant, total / n, n)


def _tiebreak(participant: str, seed: int) -> bytes:
    # Stable across processes; Python's builtin hash() is salted per run.
    return hashlib.blake2b(f"{participant}|{seed}".encode(), digest_size=8).digest()


def _score_value(score: Union[UsefulnessScore, float, int]) -> float:
    return score.value if isinstance(score, UsefulnessScore) else float(score)


def assign_reviewers(
    submitters: Iterable[str],
    policy: Policy,
    k: int,
    scores: Mapping[str, Union[UsefulnessScore, float]],
    seed: int,
    round_id: str = "",
) -> AssignmentSet:
    """Build the round's reviewer -> author pairs.

    ``scores`` is consulted only under INCENTIVE; submitters missing from it
    fall back to the cold-start default. Identical inputs give byte-identical
    output; the input ordering of ``submitters`` is irrelevant (they are
    canonicalized before the seeded step).
    """
    ids = sorted(set(submitters))
    n = len(ids)
    if n < 2:
        raise TooFewSubmitters(f"need at least 2 submitters, got {n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    d = min(k, n - 1)

    if policy is Policy.RANDOM:
        perm = np.random.default_rng(seed).permutation(n)
        order = tuple(ids[i] for i in perm)
    else:
        values = {p: _score_value(scores.get(p, DEFAULT_SCORE)) for p in ids}
        order = tuple(sorted(ids, key=lambda p: (-values[p], _tiebreak(p, seed))))

    pairs = tuple(
        (order[(j + i) % n], order[j])
        for j in range(n)
        for i in range(1, d + 1)
    )
    return AssignmentSet(round_id=round_id, pairs=pairs, policy=policy, seed=seed, order=order)


def validate_assignment(aset: AssignmentSet, submitters: Iterable[str], k: int) -> ValidityReport:
    """Check the fan-out contract: d-regular, no self pairs, no duplicates."""
    ids = set(submitters)
    n = len(ids)
    d = min(k, n - 1) if n > 1 else 0
    violations: list[tuple[str, str]] = []

    seen: set[tuple[str, str]] = set()
    out_deg: dict[str, int] = {p: 0 for p in ids}
    in_deg: dict[str, int] = {p: 0 for p in ids}
    for reviewer, author in aset.pairs:
        if reviewer == author:
            violations.append(("self-pair", f"{reviewer} assigned to themselves"))
        if (reviewer, author) in seen:
            violations.append(("duplicate-pair", f"({reviewer}, {author}) repeated"))
        seen.add((reviewer, author))
        if reviewer not in ids:
            violations.append(("unknown-endpoint", f"reviewer {reviewer} not a submitter"))
        else:
            out_deg[reviewer] += 1
        if author not in ids:
            violations.append(("unknown-endpoint", f"author {author} not a submitter"))
        else:
            in_deg[author] += 1

    for p in sorted(ids):
        if out_deg[p] != d:
            violations.append(("out-degree", f"{p} reviews {out_deg[p]} peers, expected {d}"))
        if in_deg[p] != d:
            violations.append(("in-degree", f"{p} reviewed by {in_deg[p]} peers, expected {d}"))

    return ValidityReport(tuple(violations))


def _average_ranks(values: list[float]) -> list[float]:
    """1-based ranks; tied values share the average of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def _spearman(xs: list[float], ys: list[float]) -> AssortativityResult:
    rx = _average_ranks(xs)
    ry = _average_ranks(ys)
    n = len(rx)
    mx = sum(rx) / n
    my = sum(ry) / n
    sxx = sum((a - mx) ** 2 for a in rx)
    syy = sum((b - my) ** 2 for b in ry)
    if sxx == 0.0 or syy == 0.0:
        return AssortativityResult(0.0, True)
    sxy = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    return AssortativityResult(sxy / (sxx * syy) ** 0.5, False)


def assortativity(
    aset: AssignmentSet,
    scores: Mapping[str, Union[UsefulnessScore, float]],
    exclude_wrap: bool = False,
) -> AssortativityResult:
    """Spearman correlation of each author's score with their reviewers' mean score.

    ``exclude_wrap=True`` drops the d authors at the tail of the ordering,
    whose reviewer windows wrap around the cycle; see the module docstring.
    Degenerate rank variation (e.g. all scores equal) yields 0 with the
    ``degenerate`` flag set instead of an undefined value.
    """
    d = aset.fan_out
    authors = list(aset.order[: len(aset.order) - d]) if exclude_wrap else list(aset.order)
    by_author: dict[str, list[float]] = {a: [] for a in aset.order}
    for reviewer, author in aset.pairs:
        by_author[author].append(_score_value(scores[reviewer]))

    xs = [_score_value(scores[a]) for a in authors]
    ys = [sum(by_author[a]) / len(by_author[a]) for a in authors]
    if len(xs) < 2:
        return AssortativityResult(0.0, True)
    return _spearman(xs, ys)

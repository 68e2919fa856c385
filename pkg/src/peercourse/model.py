"""Domain types for the peer review course engine.

All types are immutable snapshots; the engine replaces them wholesale when
state changes, so instances are safe to hand across threads. Timestamps are
RFC 3339 strings throughout (the engine never does date arithmetic).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional


class Condition(Enum):
    """The three course modes: who is visible and how reviewers are matched."""

    BLIND_RANDOM = "blind-random"
    IDENTIFIED_RANDOM = "identified-random"
    IDENTIFIED_INCENTIVE = "identified-incentive"

    @property
    def identified(self) -> bool:
        return self is not Condition.BLIND_RANDOM

    @property
    def incentive_matched(self) -> bool:
        return self is Condition.IDENTIFIED_INCENTIVE


class Phase(Enum):
    SUBMISSION = "submission"
    REVIEWING = "reviewing"
    RATING = "rating"
    RELEASED = "released"


# Legal phase order; transitions may only step to the immediate successor.
PHASE_ORDER = (Phase.SUBMISSION, Phase.REVIEWING, Phase.RATING, Phase.RELEASED)


def phase_index(phase: Phase) -> int:
    return PHASE_ORDER.index(phase)


class TaskStatus(Enum):
    PENDING = "pending"
    REVIEWED = "reviewed"
    RATED = "rated"
    # Tasks still pending when reviewing is force-closed are expired rather
    # than left dangling; expired tasks never produce a review.
    EXPIRED = "expired"


INTRO_MAX_CHARS = 500
PROMPT_COUNT = 4
PROMPT_MAX_CHARS = 4000
MESSAGE_MAX_CHARS = 2000
NUDGE_TEXT = "Quick check: Is your feedback actionable?"


@dataclass(frozen=True)
class CourseConfig:
    """Course-wide settings, immutable once the course exists."""

    condition: Condition
    k: int = 3
    grade_lo: int = 0
    grade_hi: int = 100
    nudge_threshold: int = 15
    rng_seed: int = 0

    def validate(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.grade_lo >= self.grade_hi:
            raise ValueError("grade scale bounds must satisfy lo < hi")
        if self.nudge_threshold < 0:
            raise ValueError("nudge threshold must be >= 0")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must fit in 64 bits")


@dataclass(frozen=True)
class Participant:
    participant_id: str
    display_name: str
    intro: Optional[str] = None
    # (round_id, mean stars received on authored reviews, contributing count)
    # per closed round; rounds where none of the participant's reviews were
    # rated contribute no entry.
    usefulness_history: tuple[tuple[str, float, int], ...] = ()

    def with_intro(self, text: str) -> "Participant":
        return replace(self, intro=text)


@dataclass(frozen=True)
class CourseRound:
    round_id: str
    condition: Condition
    phase: Phase
    k: int
    roster: frozenset[str]
    rng_seed: int
    deadlines: tuple[tuple[str, str], ...] = ()  # (phase name, RFC 3339)


@dataclass(frozen=True)
class Submission:
    author: str
    round_id: str
    content_ref: str
    submitted_at: str


@dataclass(frozen=True)
class ReviewTask:
    task_id: str
    reviewer: str
    author: str
    round_id: str
    status: TaskStatus


@dataclass(frozen=True)
class Review:
    review_id: str
    task_id: str
    round_id: str
    reviewer: str
    author: str
    prompts: tuple[str, str, str, str]
    grade: int
    created_at: str


@dataclass(frozen=True)
class UsefulnessRating:
    review_id: str
    stars: int
    rated_at: str


@dataclass(frozen=True)
class Message:
    review_id: str
    sender: str
    body: str
    sent_at: str


@dataclass(frozen=True)
class GradeReport:
    participant: str
    round_id: str
    per_review_grades: tuple[int, ...]
    # None when the participant received no reviews at all; the gate lets
    # them through but there is nothing to aggregate.
    aggregate: Optional[int]


@dataclass(frozen=True)
class Event:
    """One record in a course's append-only log."""

    seq: int
    ts: str
    kind: str
    payload: dict = field(hash=False)


# Event kinds, in the order they typically appear in a round's life.
EVENT_KINDS = (
    "CourseCreated",
    "ParticipantEnrolled",
    "RoundCreated",
    "SubmissionMade",
    "IntroRecorded",
    "PhaseAdvanced",
    "AssignmentCreated",
    "ReviewSubmitted",
    "FeedbackRated",
    "MessagePosted",
    "GradesReleased",
)


def lower_median(values: list[int]) -> int:
    """Median with the lower of the two middle values on even counts."""
    if not values:
        raise ValueError("lower_median of empty list")
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def actionability_nudge(text: str, threshold: int = 15) -> Optional[str]:
    """Nudge sparse feedback toward something the receiver can act on.

    Returns the fixed nudge string when ``text`` has fewer than ``threshold``
    words, otherwise None.
    """
    if len(text.split()) < threshold:
        return NUDGE_TEXT
    return None

"""Synthetic cohorts running the full review protocol, plus metric export.

Agents drive a real :class:`~peercourse.course.Course` through every phase:
submit, review the assigned peers, rate the feedback received, talk in the
threads, and release grades. Their behavior is a small parametric model:

* a review's usefulness is an affine function of its writer's latent quality
  plus per-review noise, reported on the 1-5 star scale;
* grades track the graded author's latent quality plus noise;
* diligence is the probability a review task gets done at all;
* message_propensity is the chance the feedback receiver opens the thread.

Condition effects (identified cohorts messaging more, say) enter only through
these parameters. The simulation makes no claim about human behavior; it
exercises the mechanism.

Every random draw is keyed by (seed, purpose, round, participant, ordinal)
rather than pulled from one shared stream. Two consequences matter: runs are
reproducible bit for bit, and first-round metrics do not depend on who was
paired with whom, so RANDOM and INCENTIVE runs on the same seed are directly
comparable from a cold start.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from . import stats
from .course import Course
from .errors import ConfigInvalid, GradesNotReleased, IoFailure
from .matching import assortativity
from .model import Condition, CourseConfig, Phase

# Engagement defaults per condition: identified cohorts talk more. These are
# inputs to the model, not findings.
DEFAULT_MESSAGE_PROPENSITY = {
    Condition.BLIND_RANDOM: 0.15,
    Condition.IDENTIFIED_RANDOM: 0.30,
    Condition.IDENTIFIED_INCENTIVE: 0.28,
}

_VOCAB = (
    "the argument structure is clear and the examples support it well but "
    "section transitions need work consider tightening the opening claim "
    "cite the data source restate your conclusion show one counterexample "
    "define terms before use split the long paragraph add a summary table"
).split()

_BASE_TS = "2026-01-01T00:00:00+00:00"


@dataclass(frozen=True)
class AgentProfile:
    """Behavioral parameters for one synthetic student."""

    agent_id: str
    quality: float  # latent review-writing quality in [0, 1]
    diligence: float = 1.0  # probability each review task is completed
    message_propensity: float = 0.2
    rating_noise_sd: float = 0.0

    def validate(self) -> None:
        if not self.agent_id:
            raise ConfigInvalid("agent_id must be non-empty")
        for name in ("quality", "diligence", "message_propensity"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigInvalid(f"{name} must be in [0, 1], got {v}")
        if self.rating_noise_sd < 0:
            raise ConfigInvalid("rating_noise_sd must be >= 0")


@dataclass(frozen=True)
class SimulationConfig:
    cohort: int
    rounds: int
    condition: Condition
    seed: int
    k: int = 3
    agents: Optional[tuple[AgentProfile, ...]] = None

    def validate(self) -> None:
        if self.cohort < 2:
            raise ConfigInvalid(f"cohort must be >= 2, got {self.cohort}")
        if self.rounds < 1:
            raise ConfigInvalid(f"rounds must be >= 1, got {self.rounds}")
        if self.k < 1:
            raise ConfigInvalid(f"k must be >= 1, got {self.k}")
        if self.agents is not None:
            if len(self.agents) != self.cohort:
                raise ConfigInvalid(
                    f"{len(self.agents)} agents given for cohort {self.cohort}"
                )
            ids = [a.agent_id for a in self.agents]
            if len(set(ids)) != len(ids):
                raise ConfigInvalid("agent ids must be unique")
            for agent in self.agents:
                agent.validate()


@dataclass(frozen=True)
class RoundMetrics:
    """Everything measured about one round, with sample sizes attached."""

    round_id: str
    condition: str
    cohort: int
    fan_out: int
    n_reviews: int
    n_ratings: int
    mean_usefulness: Optional[float]
    std_usefulness: Optional[float]
    mean_review_words: Optional[float]
    std_review_words: Optional[float]
    message_count: int
    assortativity: float
    assortativity_degenerate: bool
    assortativity_excl_wrap: float
    grades: tuple[tuple[str, Optional[int]], ...]  # (participant, aggregate)
    released: bool


def default_agents(
    cohort: int,
    condition: Condition,
    seed: int,
    diligence: float = 1.0,
    rating_noise_sd: float = 0.3,
) -> tuple[AgentProfile, ...]:
    """A cohort with i.i.d. uniform latent quality and per-condition chatter."""
    propensity = DEFAULT_MESSAGE_PROPENSITY[condition]
    agents = []
    for i in range(1, cohort + 1):
        q = float(_rng(seed, "quality", i).random())
        agents.append(AgentProfile(
            agent_id=f"a{i:03d}",
            quality=q,
            diligence=diligence,
            message_propensity=propensity,
            rating_noise_sd=rating_noise_sd,
        ))
    return tuple(agents)


def load_agents(path: Union[str, Path]) -> tuple[AgentProfile, ...]:
    """Read agent profiles from a JSON list of objects."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"agent file is not valid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise ConfigInvalid("agent file must hold a JSON list")
    agents = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict) or "agent_id" not in entry or "quality" not in entry:
            raise ConfigInvalid(f"agent entry {i} needs agent_id and quality")
        agent = AgentProfile(
            agent_id=str(entry["agent_id"]),
            quality=float(entry["quality"]),
            diligence=float(entry.get("diligence", 1.0)),
            message_propensity=float(entry.get("message_propensity", 0.2)),
            rating_noise_sd=float(entry.get("rating_noise_sd", 0.0)),
        )
        agent.validate()
        agents.append(agent)
    return tuple(agents)


class _LogicalClock:
    """Deterministic second-resolution timestamps; one tick per event batch."""

    def __init__(self) -> None:
        self._base = datetime.fromisoformat(_BASE_TS)
        self._step = timedelta(seconds=1)
        self._ticks = 0

    def __call__(self) -> str:
        self._ticks += 1
        return (self._base + self._ticks * self._step).isoformat()


def _rng(seed: int, *key: object) -> np.random.Generator:
    label = "|".join(str(part) for part in key)
    digest = hashlib.blake2b(f"{seed}|{label}".encode(), digest_size=8).digest()
    return np.random.default_rng(int.from_bytes(digest, "big"))


def _prompt_texts(agent: AgentProfile, round_id: str, ordinal: int) -> tuple[str, str, str, str]:
    # Better reviewers write longer reviews; text is a deterministic slice of
    # a fixed vocabulary so identical runs produce identical bytes.
    total_words = 8 + round(agent.quality * 40)
    start = int.from_bytes(
        hashlib.blake2b(f"{agent.agent_id}|{round_id}|{ordinal}".encode(), digest_size=4).digest(),
        "big",
    )
    words = [_VOCAB[(start + i) % len(_VOCAB)] for i in range(total_words)]
    quarter = max(1, len(words) // 4)
    fields = [
        " ".join(words[0:quarter]),
        " ".join(words[quarter:2 * quarter]),
        " ".join(words[2 * quarter:3 * quarter]),
        " ".join(words[3 * quarter:]),
    ]
    return (fields[0], fields[1], fields[2], fields[3])


def _stars_for(agent: AgentProfile, noise: float) -> int:
    raw = round(1.0 + 4.0 * agent.quality + noise)
    return int(min(5, max(1, raw)))


def _grade_for(agent: AgentProfile, noise: float, lo: int, hi: int) -> int:
    raw = round(lo + (hi - lo) * agent.quality + noise)
    return int(min(hi, max(lo, raw)))


def run_simulation(config: SimulationConfig) -> list[RoundMetrics]:
    """Run the whole multi-round protocol; returns one metrics row per round."""
    config.validate()
    agents = config.agents if config.agents is not None else default_agents(
        config.cohort, config.condition, config.seed
    )
    for agent in agents:
        agent.validate()
    by_id = {a.agent_id: a for a in agents}

    course = Course.create(
        "sim",
        CourseConfig(condition=config.condition, k=config.k, rng_seed=config.seed),
        clock=_LogicalClock(),
    )
    for agent in agents:
        course.enroll(agent.agent_id, f"Agent {agent.agent_id}")
        if config.condition.identified:
            course.record_intro(
                agent.agent_id, f"Hi, I'm {agent.agent_id}. I give direct feedback."
            )

    results = []
    for round_no in range(1, config.rounds + 1):
        results.append(_run_round(course, by_id, config, f"r{round_no}"))
    return results


def _run_round(
    course: Course,
    agents: dict[str, AgentProfile],
    config: SimulationConfig,
    round_id: str,
) -> RoundMetrics:
    assert course.config is not None
    lo, hi = course.config.grade_lo, course.config.grade_hi
    seed = config.seed
    roster = sorted(agents)

    course.create_round(round_id)
    for pid in roster:
        course.submit_assignment(round_id, pid, f"essay by {pid} for {round_id}")

    # Scores as the matcher will see them; history grows at release, later.
    scores_at_match = {pid: course.usefulness_score(pid) for pid in roster}
    course.advance_phase(round_id, Phase.REVIEWING)

    incomplete = 0
    word_counts: list[float] = []
    grade_ordinal = {pid: 0 for pid in roster}
    for pid in roster:
        agent = agents[pid]
        for ordinal, task in enumerate(course.tasks_for(round_id, pid)):
            done = _rng(seed, "done", round_id, pid, ordinal).random() < agent.diligence
            if not done:
                incomplete += 1
                continue
            author = task.author
            g_noise = 0.0
            if agents[author].rating_noise_sd > 0:
                # grade noise scales like the star noise: sd per quarter scale
                g_noise = float(
                    _rng(seed, "grade", round_id, author, grade_ordinal[author]).normal(
                        0.0, agents[author].rating_noise_sd * (hi - lo) / 4.0
                    )
                )
            grade_ordinal[author] += 1
            prompts = _prompt_texts(agent, round_id, ordinal)
            course.submit_review(
                task.task_id, pid, prompts, _grade_for(agents[author], g_noise, lo, hi)
            )
            word_counts.append(float(sum(len(p.split()) for p in prompts)))

    course.advance_phase(round_id, Phase.RATING, force=incomplete > 0)

    stars_given: list[float] = []
    message_count = 0
    for pid in roster:
        agent = agents[pid]
        received = course.received_reviews(round_id, pid)
        for ordinal, review in enumerate(received):
            writer = agents[review.reviewer]
            noise = 0.0
            if writer.rating_noise_sd > 0:
                # noise rides on the review itself (writers vary between
                # reviews); keyed to the writer so pairings don't matter
                authored_ordinal = [
                    r.review_id for r in course.authored_reviews(round_id, review.reviewer)
                ].index(review.review_id)
                noise = float(
                    _rng(seed, "stars", round_id, review.reviewer, authored_ordinal).normal(
                        0.0, writer.rating_noise_sd
                    )
                )
            stars = _stars_for(writer, noise)
            course.rate_feedback(review.review_id, pid, stars)
            stars_given.append(float(stars))
            if _rng(seed, "msg", round_id, pid, ordinal).random() < agent.message_propensity:
                course.post_message(
                    review.review_id, pid, "Thanks, the suggestions were concrete."
                )
                message_count += 1

    course.advance_phase(round_id, Phase.RELEASED)

    aset = course.assignments[round_id]
    plain = assortativity(aset, scores_at_match)
    core = assortativity(aset, scores_at_match, exclude_wrap=True)
    grades = tuple(
        (pid, course.grade_report(round_id, pid).aggregate) for pid in roster
    )
    return RoundMetrics(
        round_id=round_id,
        condition=config.condition.value,
        cohort=len(roster),
        fan_out=aset.fan_out,
        n_reviews=len(word_counts),
        n_ratings=len(stars_given),
        mean_usefulness=stats.mean(stars_given) if stars_given else None,
        std_usefulness=stats.std(stars_given) if len(stars_given) >= 2 else None,
        mean_review_words=stats.mean(word_counts) if word_counts else None,
        std_review_words=stats.std(word_counts) if len(word_counts) >= 2 else None,
        message_count=message_count,
        assortativity=plain.value,
        assortativity_degenerate=plain.degenerate,
        assortativity_excl_wrap=core.value,
        grades=grades,
        released=True,
    )


def grade_gap(metrics: RoundMetrics) -> float:
    """Spread of the round's aggregate grades: 90th minus 10th percentile."""
    if not metrics.released:
        raise GradesNotReleased(f"round {metrics.round_id} has not released grades")
    values = [float(g) for _, g in metrics.grades if g is not None]
    if not values:
        raise GradesNotReleased(f"round {metrics.round_id} produced no grades")
    return stats.percentile_nearest_rank(values, 90) - stats.percentile_nearest_rank(values, 10)


def export_csv(metrics: Iterable[RoundMetrics], path: Union[str, Path]) -> None:
    """Write one row per (round, condition, metric); RFC 4180 quoting."""
    rows = []
    for m in metrics:
        def emit(metric: str, value, sample_size=""):
            rows.append([m.round_id, m.condition, metric,
                         "" if value is None else value, sample_size])

        emit("mean_usefulness", m.mean_usefulness, m.n_ratings)
        emit("std_usefulness", m.std_usefulness, m.n_ratings)
        emit("mean_review_words", m.mean_review_words, m.n_reviews)
        emit("std_review_words", m.std_review_words, m.n_reviews)
        emit("message_count", m.message_count)
        emit("assortativity", m.assortativity, m.cohort)
        emit("assortativity_excl_wrap", m.assortativity_excl_wrap,
             max(m.cohort - m.fan_out, 0))
        emit("grade_gap", grade_gap(m) if m.released else None, m.cohort)
        for pid, grade in m.grades:
            emit(f"grade:{pid}", grade)
    try:
        out = Path(path)
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["round", "condition", "metric", "value", "sample_size"])
            writer.writerows(rows)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc

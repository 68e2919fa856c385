"""The course engine: a four-phase, event-sourced peer review workflow.

Every mutation validates its preconditions, emits one or more events, hands
them to the configured sink (the durable log) and only then folds them into
state. Replaying the same events through :meth:`Course.apply_event` rebuilds
an identical course, which is what the persistence layer relies on.

Mutations to one course must be serialized by the caller (single writer);
reads hand out immutable snapshots and may run concurrently.
"""

from __future__ import annotations

import hashlib
from dataclasses import replace
from datetime import datetime, timezone
from typing import Callable, Iterable, Optional

from . import matching
from .errors import (
    AllPromptsEmpty,
    AlreadyRated,
    BlindModeActive,
    EmptyBody,
    GradeOutOfRange,
    GradesPending,
    IllegalTransition,
    IncompleteReviews,
    InsufficientSubmissions,
    InvalidStars,
    NotAParty,
    NotReceiver,
    NotYourTask,
    PhaseClosed,
    SequenceConflict,
    TaskNotPending,
    TooLong,
    UnknownEntity,
    UnknownParticipant,
)
from .model import (
    INTRO_MAX_CHARS,
    MESSAGE_MAX_CHARS,
    PHASE_ORDER,
    PROMPT_COUNT,
    PROMPT_MAX_CHARS,
    Condition,
    CourseConfig,
    CourseRound,
    Event,
    GradeReport,
    Message,
    Participant,
    Phase,
    Review,
    ReviewTask,
    Submission,
    TaskStatus,
    UsefulnessRating,
    lower_median,
    phase_index,
)

Sink = Callable[[list[Event]], None]
Clock = Callable[[], str]


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def derive_round_seed(course_seed: int, round_id: str) -> int:
    digest = hashlib.blake2b(f"{course_seed}|{round_id}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class Course:
    """Aggregate root for one course: participants, rounds, and their artifacts."""

    def __init__(self) -> None:
        self.course_id: str = ""
        self.config: Optional[CourseConfig] = None
        self.last_seq = 0
        self.participants: dict[str, Participant] = {}
        self.rounds: dict[str, CourseRound] = {}
        self.submissions: dict[str, dict[str, Submission]] = {}
        self.assignments: dict[str, matching.AssignmentSet] = {}
        self.tasks: dict[str, ReviewTask] = {}
        self.round_tasks: dict[str, list[str]] = {}
        self.reviews: dict[str, Review] = {}
        self.task_review: dict[str, str] = {}
        self.ratings: dict[str, UsefulnessRating] = {}
        self.messages: dict[str, list[Message]] = {}
        self._next_task = 1
        self._next_review = 1
        self._sink: Optional[Sink] = None
        self._clock: Clock = utc_now

    # -- construction ---------------------------------------------------

    @classmethod
    def create(
        cls,
        course_id: str,
        config: CourseConfig,
        sink: Optional[Sink] = None,
        clock: Optional[Clock] = None,
    ) -> "Course":
        config.validate()
        course = cls()
        course._sink = sink
        if clock is not None:
            course._clock = clock
        course._commit([
            ("CourseCreated", {"course": course_id, "config": _config_to_dict(config)}),
        ])
        return course

    @classmethod
    def replay(cls, events: Iterable[Event]) -> "Course":
        course = cls()
        for event in events:
            course.apply_event(event)
        return course

    def attach(self, sink: Optional[Sink] = None, clock: Optional[Clock] = None) -> None:
        """Wire a sink/clock onto a replayed course so it can accept new writes."""
        if sink is not None:
            self._sink = sink
        if clock is not None:
            self._clock = clock

    # -- commit pipeline --------------------------------------------------

    def _commit(self, items: list[tuple[str, dict]]) -> list[Event]:
        ts = self._clock()
        events = [
            Event(seq=self.last_seq + offset, ts=ts, kind=kind, payload=payload)
            for offset, (kind, payload) in enumerate(items, start=1)
        ]
        if self._sink is not None:
            self._sink(events)  # durable before state changes
        for event in events:
            self.apply_event(event)
        return events

    def apply_event(self, event: Event) -> None:
        if event.seq != self.last_seq + 1:
            raise SequenceConflict(
                f"event seq {event.seq} does not follow {self.last_seq}"
            )
        handler = getattr(self, f"_apply_{_snake(event.kind)}")
        handler(event)
        self.last_seq = event.seq

    # -- commands ----------------------------------------------------------

    def enroll(self, participant_id: str, display_name: str) -> Participant:
        if participant_id in self.participants:
            raise ValueError(f"participant id {participant_id!r} already enrolled")
        if not display_name:
            raise ValueError("display_name must be non-empty")
        self._commit([
            ("ParticipantEnrolled", {"participant": participant_id, "display_name": display_name}),
        ])
        return self.participants[participant_id]

    def create_round(
        self,
        round_id: str,
        roster: Optional[Iterable[str]] = None,
        rng_seed: Optional[int] = None,
        deadlines: Optional[dict[str, str]] = None,
    ) -> CourseRound:
        assert self.config is not None
        if round_id in self.rounds:
            raise ValueError(f"round id {round_id!r} already exists")
        members = sorted(roster) if roster is not None else sorted(self.participants)
        for pid in members:
            if pid not in self.participants:
                raise UnknownParticipant(f"{pid} is not enrolled")
        seed = rng_seed if rng_seed is not None else derive_round_seed(self.config.rng_seed, round_id)
        self._commit([
            ("RoundCreated", {
                "round": round_id,
                "condition": self.config.condition.value,
                "k": self.config.k,
                "roster": members,
                "seed": seed,
                "deadlines": dict(deadlines) if deadlines else {},
            }),
        ])
        return self.rounds[round_id]

    def submit_assignment(self, round_id: str, participant: str, content_ref: str) -> Submission:
        rnd = self._round(round_id)
        if rnd.phase is not Phase.SUBMISSION:
            raise PhaseClosed(f"submissions closed in phase {rnd.phase.value}")
        if participant not in rnd.roster:
            raise UnknownParticipant(f"{participant} is not on the round roster")
        self._commit([
            ("SubmissionMade", {"round": round_id, "author": participant, "content_ref": content_ref}),
        ])
        return self.submissions[round_id][participant]

    def record_intro(self, participant: str, text: str, round_id: Optional[str] = None) -> Participant:
        assert self.config is not None
        if participant not in self.participants:
            raise UnknownParticipant(participant)
        condition = self._round(round_id).condition if round_id is not None else self.config.condition
        if condition is Condition.BLIND_RANDOM:
            raise BlindModeActive("introductions are not accepted in blind mode")
        if len(text) > INTRO_MAX_CHARS:
            raise TooLong(f"intro exceeds {INTRO_MAX_CHARS} characters")
        self._commit([("IntroRecorded", {"participant": participant, "text": text})])
        return self.participants[participant]

    def advance_phase(self, round_id: str, target: Phase, force: bool = False) -> CourseRound:
        rnd = self._round(round_id)
        idx = phase_index(rnd.phase)
        if idx + 1 >= len(PHASE_ORDER) or PHASE_ORDER[idx + 1] is not target:
            raise IllegalTransition(
                f"cannot advance {rnd.phase.value} -> {target.value}"
            )

        items: list[tuple[str, dict]] = [
            ("PhaseAdvanced", {"round": round_id, "phase": target.value, "forced": bool(force)}),
        ]
        if target is Phase.REVIEWING:
            submitters = sorted(self.submissions.get(round_id, {}))
            if len(submitters) < 2:
                raise InsufficientSubmissions(
                    f"need at least 2 submissions, have {len(submitters)}"
                )
            aset = matching.assign_reviewers(
                submitters,
                matching.Policy.INCENTIVE if rnd.condition.incentive_matched else matching.Policy.RANDOM,
                rnd.k,
                self._scores(submitters),
                rnd.rng_seed,
                round_id=round_id,
            )
            items.append(("AssignmentCreated", {
                "round": round_id,
                "policy": aset.policy.value,
                "seed": aset.seed,
                "order": list(aset.order),
                "pairs": [list(p) for p in aset.pairs],
            }))
        elif target is Phase.RATING:
            pending = [t for t in self._round_task_objs(round_id) if t.status is TaskStatus.PENDING]
            if pending and not force:
                raise IncompleteReviews(f"{len(pending)} review tasks still pending")
        elif target is Phase.RELEASED:
            items.append(("GradesReleased", {"round": round_id}))

        self._commit(items)
        return self.rounds[round_id]

    def submit_review(self, task_id: str, caller: str, prompts: Iterable[str], grade: int) -> Review:
        assert self.config is not None
        task = self.tasks.get(task_id)
        if task is None:
            raise UnknownEntity(f"no task {task_id!r}")
        rnd = self._round(task.round_id)
        if rnd.phase is not Phase.REVIEWING:
            raise PhaseClosed(f"reviews closed in phase {rnd.phase.value}")
        if caller != task.reviewer:
            raise NotYourTask(f"task {task_id} belongs to another reviewer")
        if task.status is not TaskStatus.PENDING:
            raise TaskNotPending(f"task {task_id} is {task.status.value}")
        texts = [str(p) for p in prompts]
        if len(texts) != PROMPT_COUNT:
            raise ValueError(f"a review carries exactly {PROMPT_COUNT} prompt fields")
        for text in texts:
            if len(text) > PROMPT_MAX_CHARS:
                raise TooLong(f"prompt exceeds {PROMPT_MAX_CHARS} characters")
        if not any(text.strip() for text in texts):
            raise AllPromptsEmpty("at least one prompt field must be filled in")
        if not isinstance(grade, int) or isinstance(grade, bool):
            raise GradeOutOfRange("grade must be an integer")
        if not self.config.grade_lo <= grade <= self.config.grade_hi:
            raise GradeOutOfRange(
                f"grade {grade} outside {self.config.grade_lo}..{self.config.grade_hi}"
            )
        self._commit([
            ("ReviewSubmitted", {
                "round": task.round_id,
                "task": task_id,
                "reviewer": caller,
                "prompts": texts,
                "grade": grade,
            }),
        ])
        return self.reviews[self.task_review[task_id]]

    def rate_feedback(self, review_id: str, caller: str, stars: int) -> UsefulnessRating:
        review = self._review(review_id)
        rnd = self._round(review.round_id)
        if rnd.phase not in (Phase.RATING, Phase.RELEASED):
            raise PhaseClosed(f"rating closed in phase {rnd.phase.value}")
        if caller != review.author:
            raise NotReceiver("only the review's receiving author may rate it")
        if review_id in self.ratings:
            raise AlreadyRated(f"review {review_id} already rated")
        if not isinstance(stars, int) or isinstance(stars, bool) or not 1 <= stars <= 5:
            raise InvalidStars(f"stars must be an integer 1..5, got {stars!r}")
        self._commit([
            ("FeedbackRated", {
                "round": review.round_id,
                "review": review_id,
                "rater": caller,
                "stars": stars,
            }),
        ])
        return self.ratings[review_id]

    def post_message(self, review_id: str, sender: str, body: str) -> Message:
        review = self._review(review_id)
        rnd = self._round(review.round_id)
        if rnd.phase not in (Phase.RATING, Phase.RELEASED):
            raise PhaseClosed("conversation opens once rating starts")
        if sender not in (review.reviewer, review.author):
            raise NotAParty("only the reviewer and the receiving author may post")
        if not body or not body.strip():
            raise EmptyBody("message body must be non-empty")
        if len(body) > MESSAGE_MAX_CHARS:
            raise TooLong(f"message exceeds {MESSAGE_MAX_CHARS} characters")
        self._commit([
            ("MessagePosted", {
                "round": review.round_id,
                "review": review_id,
                "sender": sender,
                "body": body,
            }),
        ])
        return self.messages[review_id][-1]

    # -- reads -------------------------------------------------------------

    def round(self, round_id: str) -> CourseRound:
        return self._round(round_id)

    def participant(self, participant_id: str) -> Participant:
        p = self.participants.get(participant_id)
        if p is None:
            raise UnknownParticipant(participant_id)
        return p

    def tasks_for(self, round_id: str, reviewer: str) -> list[ReviewTask]:
        self._round(round_id)
        return [t for t in self._round_task_objs(round_id) if t.reviewer == reviewer]

    def received_reviews(self, round_id: str, participant: str) -> list[Review]:
        """Reviews delivered on this participant's work, in creation order."""
        self._round(round_id)
        received = [r for r in self.reviews.values()
                    if r.round_id == round_id and r.author == participant]
        return sorted(received, key=lambda r: int(r.review_id[1:]))

    def authored_reviews(self, round_id: str, reviewer: str) -> list[Review]:
        self._round(round_id)
        authored = [r for r in self.reviews.values()
                    if r.round_id == round_id and r.reviewer == reviewer]
        return sorted(authored, key=lambda r: int(r.review_id[1:]))

    def thread(self, review_id: str) -> list[Message]:
        self._review(review_id)
        return list(self.messages.get(review_id, []))

    def grades_visible(self, round_id: str, participant: str) -> bool:
        """True once the participant has rated every review they received.

        A participant who received no reviews is not deadlocked: once the
        round reaches the rating phase they are visible by default.
        """
        rnd = self._round(round_id)
        received = self.received_reviews(round_id, participant)
        if not received:
            return phase_index(rnd.phase) >= phase_index(Phase.RATING)
        return all(r.review_id in self.ratings for r in received)

    def grade_report(self, round_id: str, participant: str) -> GradeReport:
        if not self.grades_visible(round_id, participant):
            raise GradesPending("rate all received feedback to see your grades")
        grades = tuple(r.grade for r in self.received_reviews(round_id, participant))
        return GradeReport(
            participant=participant,
            round_id=round_id,
            per_review_grades=grades,
            aggregate=lower_median(list(grades)) if grades else None,
        )

    def usefulness_score(self, participant: str) -> matching.UsefulnessScore:
        p = self.participant(participant)
        return matching.pooled_score(
            participant, [(mean, n) for (_rid, mean, n) in p.usefulness_history]
        )

    # -- internals -----------------------------------------------------------

    def _round(self, round_id: Optional[str]) -> CourseRound:
        rnd = self.rounds.get(round_id or "")
        if rnd is None:
            raise UnknownEntity(f"no round {round_id!r}")
        return rnd

    def _review(self, review_id: str) -> Review:
        review = self.reviews.get(review_id)
        if review is None:
            raise UnknownEntity(f"no review {review_id!r}")
        return review

    def _round_task_objs(self, round_id: str) -> list[ReviewTask]:
        return [self.tasks[tid] for tid in self.round_tasks.get(round_id, [])]

    def _scores(self, submitters: list[str]) -> dict[str, matching.UsefulnessScore]:
        return {pid: self.usefulness_score(pid) for pid in submitters}

    # -- event application ---------------------------------------------------

    def _apply_course_created(self, event: Event) -> None:
        self.course_id = event.payload["course"]
        self.config = _config_from_dict(event.payload["config"])

    def _apply_participant_enrolled(self, event: Event) -> None:
        pid = event.payload["participant"]
        self.participants[pid] = Participant(pid, event.payload["display_name"])

    def _apply_round_created(self, event: Event) -> None:
        p = event.payload
        self.rounds[p["round"]] = CourseRound(
            round_id=p["round"],
            condition=Condition(p["condition"]),
            phase=Phase.SUBMISSION,
            k=p["k"],
            roster=frozenset(p["roster"]),
            rng_seed=p["seed"],
            deadlines=tuple(sorted(p.get("deadlines", {}).items())),
        )
        self.submissions.setdefault(p["round"], {})
        self.round_tasks.setdefault(p["round"], [])

    def _apply_submission_made(self, event: Event) -> None:
        p = event.payload
        self.submissions[p["round"]][p["author"]] = Submission(
            author=p["author"],
            round_id=p["round"],
            content_ref=p["content_ref"],
            submitted_at=event.ts,
        )

    def _apply_intro_recorded(self, event: Event) -> None:
        pid = event.payload["participant"]
        self.participants[pid] = self.participants[pid].with_intro(event.payload["text"])

    def _apply_phase_advanced(self, event: Event) -> None:
        p = event.payload
        target = Phase(p["phase"])
        self.rounds[p["round"]] = replace(self.rounds[p["round"]], phase=target)
        if target is Phase.RATING:
            for tid in self.round_tasks[p["round"]]:
                if self.tasks[tid].status is TaskStatus.PENDING:
                    self.tasks[tid] = replace(self.tasks[tid], status=TaskStatus.EXPIRED)

    def _apply_assignment_created(self, event: Event) -> None:
        p = event.payload
        aset = matching.AssignmentSet(
            round_id=p["round"],
            pairs=tuple((r, a) for r, a in p["pairs"]),
            policy=matching.Policy(p["policy"]),
            seed=p["seed"],
            order=tuple(p["order"]),
        )
        self.assignments[p["round"]] = aset
        for reviewer, author in aset.pairs:
            tid = f"t{self._next_task}"
            self._next_task += 1
            self.tasks[tid] = ReviewTask(
                task_id=tid,
                reviewer=reviewer,
                author=author,
                round_id=p["round"],
                status=TaskStatus.PENDING,
            )
            self.round_tasks[p["round"]].append(tid)

    def _apply_review_submitted(self, event: Event) -> None:
        p = event.payload
        task = self.tasks[p["task"]]
        vid = f"v{self._next_review}"
        self._next_review += 1
        self.reviews[vid] = Review(
            review_id=vid,
            task_id=task.task_id,
            round_id=task.round_id,
            reviewer=task.reviewer,
            author=task.author,
            prompts=tuple(p["prompts"]),  # type: ignore[arg-type]
            grade=p["grade"],
            created_at=event.ts,
        )
        self.task_review[task.task_id] = vid
        self.tasks[task.task_id] = replace(task, status=TaskStatus.REVIEWED)
        self.messages[vid] = []

    def _apply_feedback_rated(self, event: Event) -> None:
        p = event.payload
        self.ratings[p["review"]] = UsefulnessRating(
            review_id=p["review"], stars=p["stars"], rated_at=event.ts
        )
        task_id = self.reviews[p["review"]].task_id
        self.tasks[task_id] = replace(self.tasks[task_id], status=TaskStatus.RATED)

    def _apply_message_posted(self, event: Event) -> None:
        p = event.payload
        self.messages[p["review"]].append(
            Message(review_id=p["review"], sender=p["sender"], body=p["body"], sent_at=event.ts)
        )

    def _apply_grades_released(self, event: Event) -> None:
        round_id = event.payload["round"]
        rnd = self.rounds[round_id]
        for pid in sorted(rnd.roster):
            stars = [
                self.ratings[r.review_id].stars
                for r in self.reviews.values()
                if r.round_id == round_id and r.reviewer == pid and r.review_id in self.ratings
            ]
            if not stars:
                continue
            participant = self.participants[pid]
            entry = (round_id, sum(stars) / len(stars), len(stars))
            self.participants[pid] = replace(
                participant,
                usefulness_history=participant.usefulness_history + (entry,),
            )

    # -- snapshots -------------------------------------------------------------

    def to_state_dict(self) -> dict:
        assert self.config is not None
        return {
            "course_id": self.course_id,
            "config": _config_to_dict(self.config),
            "last_seq": self.last_seq,
            "next_task": self._next_task,
            "next_review": self._next_review,
            "participants": {
                pid: {
                    "display_name": p.display_name,
                    "intro": p.intro,
                    "usefulness_history": [list(e) for e in p.usefulness_history],
                }
                for pid, p in sorted(self.participants.items())
            },
            "rounds": {
                rid: {
                    "condition": r.condition.value,
                    "phase": r.phase.value,
                    "k": r.k,
                    "roster": sorted(r.roster),
                    "rng_seed": r.rng_seed,
                    "deadlines": [list(d) for d in r.deadlines],
                }
                for rid, r in sorted(self.rounds.items())
            },
            "submissions": {
                rid: {
                    author: {"content_ref": s.content_ref, "submitted_at": s.submitted_at}
                    for author, s in sorted(subs.items())
                }
                for rid, subs in sorted(self.submissions.items())
            },
            "assignments": {
                rid: {
                    "policy": a.policy.value,
                    "seed": a.seed,
                    "order": list(a.order),
                    "pairs": [list(p) for p in a.pairs],
                }
                for rid, a in sorted(self.assignments.items())
            },
            "tasks": {
                tid: {
                    "reviewer": t.reviewer,
                    "author": t.author,
                    "round": t.round_id,
                    "status": t.status.value,
                }
                for tid, t in sorted(self.tasks.items())
            },
            "round_tasks": {rid: list(tids) for rid, tids in sorted(self.round_tasks.items())},
            "reviews": {
                vid: {
                    "task": r.task_id,
                    "round": r.round_id,
                    "reviewer": r.reviewer,
                    "author": r.author,
                    "prompts": list(r.prompts),
                    "grade": r.grade,
                    "created_at": r.created_at,
                }
                for vid, r in sorted(self.reviews.items())
            },
            "ratings": {
                vid: {"stars": rt.stars, "rated_at": rt.rated_at}
                for vid, rt in sorted(self.ratings.items())
            },
            "messages": {
                vid: [{"sender": m.sender, "body": m.body, "sent_at": m.sent_at} for m in msgs]
                for vid, msgs in sorted(self.messages.items())
            },
        }

    @classmethod
    def from_state_dict(cls, state: dict) -> "Course":
        course = cls()
        course.course_id = state["course_id"]
        course.config = _config_from_dict(state["config"])
        course.last_seq = state["last_seq"]
        course._next_task = state["next_task"]
        course._next_review = state["next_review"]
        for pid, p in state["participants"].items():
            course.participants[pid] = Participant(
                participant_id=pid,
                display_name=p["display_name"],
                intro=p["intro"],
                usefulness_history=tuple((rid, mean, n) for rid, mean, n in p["usefulness_history"]),
            )
        for rid, r in state["rounds"].items():
            course.rounds[rid] = CourseRound(
                round_id=rid,
                condition=Condition(r["condition"]),
                phase=Phase(r["phase"]),
                k=r["k"],
                roster=frozenset(r["roster"]),
                rng_seed=r["rng_seed"],
                deadlines=tuple((ph, ts) for ph, ts in r["deadlines"]),
            )
        for rid, subs in state["submissions"].items():
            course.submissions[rid] = {
                author: Submission(author=author, round_id=rid,
                                   content_ref=s["content_ref"], submitted_at=s["submitted_at"])
                for author, s in subs.items()
            }
        for rid, a in state["assignments"].items():
            course.assignments[rid] = matching.AssignmentSet(
                round_id=rid,
                pairs=tuple((r, au) for r, au in a["pairs"]),
                policy=matching.Policy(a["policy"]),
                seed=a["seed"],
                order=tuple(a["order"]),
            )
        for tid, t in state["tasks"].items():
            course.tasks[tid] = ReviewTask(
                task_id=tid,
                reviewer=t["reviewer"],
                author=t["author"],
                round_id=t["round"],
                status=TaskStatus(t["status"]),
            )
        course.round_tasks = {rid: list(tids) for rid, tids in state["round_tasks"].items()}
        for vid, r in state["reviews"].items():
            course.reviews[vid] = Review(
                review_id=vid,
                task_id=r["task"],
                round_id=r["round"],
                reviewer=r["reviewer"],
                author=r["author"],
                prompts=tuple(r["prompts"]),  # type: ignore[arg-type]
                grade=r["grade"],
                created_at=r["created_at"],
            )
            course.task_review[r["task"]] = vid
        for vid, rt in state["ratings"].items():
            course.ratings[vid] = UsefulnessRating(
                review_id=vid, stars=rt["stars"], rated_at=rt["rated_at"]
            )
        for vid, msgs in state["messages"].items():
            course.messages[vid] = [
                Message(review_id=vid, sender=m["sender"], body=m["body"], sent_at=m["sent_at"])
                for m in msgs
            ]
        return course


def _config_to_dict(config: CourseConfig) -> dict:
    return {
        "condition": config.condition.value,
        "k": config.k,
        "grade_lo": config.grade_lo,
        "grade_hi": config.grade_hi,
        "nudge_threshold": config.nudge_threshold,
        "rng_seed": config.rng_seed,
    }


def _config_from_dict(data: dict) -> CourseConfig:
    return CourseConfig(
        condition=Condition(data["condition"]),
        k=data["k"],
        grade_lo=data["grade_lo"],
        grade_hi=data["grade_hi"],
        nudge_threshold=data["nudge_threshold"],
        rng_seed=data["rng_seed"],
    )


def _snake(kind: str) -> str:
    out = []
    for i, ch in enumerate(kind):
        if ch.isupper() and i > 0:
            out.append("_")
        out.append(ch.lower())
    return "".join(out)

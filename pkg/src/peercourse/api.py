"""HTTP facade over the course engine.

One process serves many courses. Each course keeps its own append-only log
under ``data_dir/courses/<id>/`` and a lock serializing its mutations, which
is what the single-writer contract of the engine requires. Authentication is
bearer tokens: one admin token bootstrapped next to the data directory, plus
per-participant tokens minted by the admin endpoints. A token grants exactly
one participant's view of exactly one course.

Wire conventions: JSON bodies, snake_case fields, RFC 3339 UTC timestamps.
Domain errors map 1:1 onto status codes (see ``STATUS_BY_ERROR``); bodies are
always ``{"error": <code>, "detail": <text>}``. Grade values are omitted from
feedback payloads, not nulled, until the receiver has rated everything, so
field presence can't leak the gate state. Under the blind condition reviewer
and author identities are absent in both directions; conversation messages
carry role labels instead of names.
"""

from __future__ import annotations

import json
import re
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, Union

from fastapi import Depends, FastAPI, Header
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import eventlog
from .course import Course
from .errors import PeerCourseError, UnknownEntity
from .model import (
    Condition,
    CourseConfig,
    CourseRound,
    GradeReport,
    Message,
    Participant,
    Phase,
    Review,
    ReviewTask,
    actionability_nudge,
)

STATUS_BY_ERROR = {
    "UnknownEntity": 404,
    "UnknownParticipant": 404,
    "NotYourTask": 403,
    "NotAParty": 403,
    "NotReceiver": 403,
    "PhaseClosed": 409,
    "IllegalTransition": 409,
    "InsufficientSubmissions": 409,
    "IncompleteReviews": 409,
    "GradesPending": 409,
    "AlreadyRated": 409,
    "TaskNotPending": 409,
    "BlindModeActive": 409,
    "SequenceConflict": 409,
    "TooFewSubmitters": 409,
    "TooLong": 422,
    "AllPromptsEmpty": 422,
    "GradeOutOfRange": 422,
    "InvalidStars": 422,
    "EmptyBody": 422,
    "ConfigInvalid": 422,
}

_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]{0,63}$")


class ApiError(Exception):
    """Service-level failure with a fixed status and error code."""

    def __init__(self, status: int, code: str, detail: str):
        super().__init__(detail)
        self.status = status
        self.code = code
        self.detail = detail


def _check_id(label: str, value: str) -> str:
    # ids end up in URLs and directory names; keep them boring
    if not _ID_RE.match(value):
        raise ApiError(422, "InvalidRequest", f"{label} must match {_ID_RE.pattern}")
    return value


@dataclass(frozen=True)
class Identity:
    kind: str  # "admin" | "participant"
    course: Optional[str] = None
    participant: Optional[str] = None


@dataclass
class CourseHandle:
    course: Course
    log: eventlog.EventLog
    lock: threading.RLock
    directory: Path


class CourseService:
    """Owns course storage, tokens, and per-course write serialization."""

    def __init__(
        self,
        data_dir: Union[str, Path],
        fsync: bool = True,
        admin_token: Optional[str] = None,
    ):
        self.data_dir = Path(data_dir)
        self.fsync = fsync
        self._handles: dict[str, CourseHandle] = {}
        self._tokens: dict[str, dict[str, Optional[str]]] = {}
        self._registry_lock = threading.Lock()
        self.data_dir.mkdir(parents=True, exist_ok=True)
        (self.data_dir / "courses").mkdir(exist_ok=True)
        self.admin_token = admin_token or self._load_admin_token()
        self._load_tokens()
        self._load_existing_courses()

    # -- bootstrap ---------------------------------------------------------

    def _load_admin_token(self) -> str:
        path = self.data_dir / "admin_token"
        if path.exists():
            return path.read_text(encoding="utf-8").strip()
        token = secrets.token_hex(16)
        path.write_text(token + "\n", encoding="utf-8")
        return token

    def _load_tokens(self) -> None:
        path = self.data_dir / "tokens.json"
        if path.exists():
            self._tokens = json.loads(path.read_text(encoding="utf-8"))

    def _save_tokens(self) -> None:
        path = self.data_dir / "tokens.json"
        path.write_text(json.dumps(self._tokens, sort_keys=True, indent=1), encoding="utf-8")

    def _load_existing_courses(self) -> None:
        for course_dir in sorted((self.data_dir / "courses").iterdir()):
            log_path = course_dir / "events.ndjson"
            if not log_path.exists():
                continue
            course = eventlog.load_course(log_path, course_dir / "snapshot.json")
            log = eventlog.EventLog(log_path, fsync=self.fsync)
            course.attach(sink=log.append)
            self._handles[course.course_id] = CourseHandle(
                course=course, log=log, lock=threading.RLock(), directory=course_dir
            )

    # -- courses -------------------------------------------------------------

    def create_course(self, course_id: str, config: CourseConfig) -> CourseHandle:
        with self._registry_lock:
            if course_id in self._handles:
                raise ApiError(409, "DuplicateCourse", f"course {course_id!r} exists")
            directory = self.data_dir / "courses" / course_id
            directory.mkdir(parents=True, exist_ok=True)
            log = eventlog.EventLog(directory / "events.ndjson", fsync=self.fsync)
            course = Course.create(course_id, config, sink=log.append)
            handle = CourseHandle(
                course=course, log=log, lock=threading.RLock(), directory=directory
            )
            self._handles[course_id] = handle
            return handle

    def handle(self, course_id: Optional[str]) -> CourseHandle:
        handle = self._handles.get(course_id or "")
        if handle is None:
            raise UnknownEntity(f"no course {course_id!r}")
        return handle

    def snapshot(self, course_id: str) -> int:
        handle = self.handle(course_id)
        with handle.lock:
            eventlog.save_snapshot(handle.directory / "snapshot.json", handle.course)
            return handle.course.last_seq

    # -- tokens ----------------------------------------------------------------

    def issue_token(
        self, course_id: str, participant: str, expires_at: Optional[str] = None
    ) -> str:
        handle = self.handle(course_id)
        handle.course.participant(participant)  # raises if unknown
        if expires_at is not None:
            _parse_ts(expires_at)  # validate now, not at every request
        token = secrets.token_hex(16)
        with self._registry_lock:
            self._tokens[token] = {
                "participant": participant,
                "course": course_id,
                "expires_at": expires_at,
            }
            self._save_tokens()
        return token

    def authenticate(self, authorization: Optional[str]) -> Identity:
        if not authorization or not authorization.startswith("Bearer "):
            raise ApiError(401, "InvalidToken", "missing bearer token")
        token = authorization[len("Bearer "):].strip()
        if secrets.compare_digest(token, self.admin_token):
            return Identity(kind="admin")
        record = self._tokens.get(token)
        if record is None:
            raise ApiError(401, "InvalidToken", "unknown token")
        expires_at = record.get("expires_at")
        if expires_at is not None and _parse_ts(expires_at) <= datetime.now(timezone.utc):
            raise ApiError(401, "InvalidToken", "token expired")
        return Identity(
            kind="participant", course=record["course"], participant=record["participant"]
        )


def _parse_ts(value: str) -> datetime:
    try:
        parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ApiError(422, "InvalidRequest", f"bad timestamp {value!r}") from exc
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


# -- request bodies ------------------------------------------------------------


class CourseCreateBody(BaseModel):
    course_id: str
    condition: str
    k: int = 3
    grade_lo: int = 0
    grade_hi: int = 100
    nudge_threshold: int = 15
    rng_seed: int = 0


class EnrollBody(BaseModel):
    participant_id: str
    display_name: str
    expires_at: Optional[str] = None


class TokenBody(BaseModel):
    participant: str
    expires_at: Optional[str] = None


class RoundCreateBody(BaseModel):
    round_id: str
    roster: Optional[list[str]] = None
    rng_seed: Optional[int] = None
    deadlines: Optional[dict[str, str]] = None


class PhaseBody(BaseModel):
    target: str
    force: bool = False


class SubmissionBody(BaseModel):
    content_ref: str


class IntroBody(BaseModel):
    text: str


class ReviewBody(BaseModel):
    prompts: list[str]
    grade: int


class RatingBody(BaseModel):
    stars: int


class MessageBody(BaseModel):
    body: str


# -- serialization ---------------------------------------------------------------


def _round_view(rnd: CourseRound) -> dict[str, Any]:
    return {
        "round_id": rnd.round_id,
        "condition": rnd.condition.value,
        "phase": rnd.phase.value,
        "k": rnd.k,
        "deadlines": dict(rnd.deadlines),
    }


def _participant_view(p: Participant) -> dict[str, Any]:
    return {
        "participant_id": p.participant_id,
        "display_name": p.display_name,
        "intro": p.intro,
    }


def _task_view(task: ReviewTask, course: Course, identified: bool) -> dict[str, Any]:
    view: dict[str, Any] = {
        "task_id": task.task_id,
        "round_id": task.round_id,
        "status": task.status.value,
    }
    if identified:
        author = course.participant(task.author)
        view["author"] = {
            "participant_id": author.participant_id,
            "display_name": author.display_name,
        }
    return view


def _received_review_view(
    review: Review, course: Course, identified: bool, include_grade: bool
) -> dict[str, Any]:
    view: dict[str, Any] = {
        "review_id": review.review_id,
        "round_id": review.round_id,
        "created_at": review.created_at,
        "prompts": list(review.prompts),
        "rated": review.review_id in course.ratings,
    }
    if view["rated"]:
        view["my_rating"] = course.ratings[review.review_id].stars
    if identified:
        view["reviewer"] = _participant_view(course.participant(review.reviewer))
    if include_grade:
        view["grade"] = review.grade
    return view


def _authored_review_view(review: Review) -> dict[str, Any]:
    # no author identity (blind-safe) and no grade echo; the writer already
    # knows both, and keeping grades out of every list view keeps the
    # gate airtight
    return {
        "review_id": review.review_id,
        "task_id": review.task_id,
        "round_id": review.round_id,
        "created_at": review.created_at,
        "prompts": list(review.prompts),
    }


def _message_view(
    message: Message, review: Review, course: Course, identified: bool
) -> dict[str, Any]:
    role = "reviewer" if message.sender == review.reviewer else "author"
    view: dict[str, Any] = {"role": role, "body": message.body, "sent_at": message.sent_at}
    if identified:
        sender = course.participant(message.sender)
        view["sender"] = {
            "participant_id": sender.participant_id,
            "display_name": sender.display_name,
        }
    return view


def _grade_view(report: GradeReport) -> dict[str, Any]:
    return {
        "participant": report.participant,
        "round_id": report.round_id,
        "per_review_grades": list(report.per_review_grades),
        "aggregate": report.aggregate,
    }


# -- application -------------------------------------------------------------------


def create_app(service: CourseService) -> FastAPI:
    app = FastAPI(title="peercourse", openapi_url=None, docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def _api_error(_request, exc: ApiError):
        return JSONResponse({"error": exc.code, "detail": exc.detail}, status_code=exc.status)

    @app.exception_handler(PeerCourseError)
    async def _domain_error(_request, exc: PeerCourseError):
        status = STATUS_BY_ERROR.get(exc.code, 500)
        return JSONResponse({"error": exc.code, "detail": str(exc)}, status_code=status)

    @app.exception_handler(ValueError)
    async def _value_error(_request, exc: ValueError):
        return JSONResponse({"error": "InvalidRequest", "detail": str(exc)}, status_code=422)

    def auth(authorization: Optional[str] = Header(None)) -> Identity:
        return service.authenticate(authorization)

    def require_admin(identity: Identity) -> None:
        if identity.kind != "admin":
            raise ApiError(403, "AdminOnly", "this endpoint needs the admin token")

    def participant_handle(identity: Identity) -> tuple[CourseHandle, str]:
        if identity.kind != "participant":
            raise ApiError(403, "NotAParticipant", "a participant token is required")
        assert identity.course is not None and identity.participant is not None
        return service.handle(identity.course), identity.participant

    def require_self(identity: Identity, participant: str) -> tuple[CourseHandle, str]:
        handle, me = participant_handle(identity)
        if me != participant:
            raise ApiError(403, "NotYourView", "token does not match the requested participant")
        return handle, me

    def admin_course(identity: Identity, course: Optional[str]) -> CourseHandle:
        require_admin(identity)
        if course is None:
            raise ApiError(422, "InvalidRequest", "course query parameter is required")
        return service.handle(course)

    # -- admin endpoints ---------------------------------------------------

    @app.post("/courses", status_code=201)
    def create_course(body: CourseCreateBody, identity: Identity = Depends(auth)):
        require_admin(identity)
        _check_id("course_id", body.course_id)
        config = CourseConfig(
            condition=Condition(body.condition),
            k=body.k,
            grade_lo=body.grade_lo,
            grade_hi=body.grade_hi,
            nudge_threshold=body.nudge_threshold,
            rng_seed=body.rng_seed,
        )
        handle = service.create_course(body.course_id, config)
        return {
            "course_id": handle.course.course_id,
            "condition": config.condition.value,
            "k": config.k,
            "grade_lo": config.grade_lo,
            "grade_hi": config.grade_hi,
            "nudge_threshold": config.nudge_threshold,
        }

    @app.get("/courses/{course_id}")
    def get_course(course_id: str, identity: Identity = Depends(auth)):
        require_admin(identity)
        handle = service.handle(course_id)
        with handle.lock:
            course = handle.course
            assert course.config is not None
            return {
                "course_id": course.course_id,
                "condition": course.config.condition.value,
                "k": course.config.k,
                "participants": [
                    _participant_view(course.participants[pid])
                    for pid in sorted(course.participants)
                ],
                "rounds": [_round_view(course.rounds[rid]) for rid in sorted(course.rounds)],
                "last_seq": course.last_seq,
            }

    @app.post("/courses/{course_id}/participants", status_code=201)
    def enroll(course_id: str, body: EnrollBody, identity: Identity = Depends(auth)):
        require_admin(identity)
        _check_id("participant_id", body.participant_id)
        handle = service.handle(course_id)
        with handle.lock:
            participant = handle.course.enroll(body.participant_id, body.display_name)
        token = service.issue_token(course_id, participant.participant_id, body.expires_at)
        return {
            "participant_id": participant.participant_id,
            "display_name": participant.display_name,
            "token": token,
        }

    @app.post("/courses/{course_id}/tokens", status_code=201)
    def mint_token(course_id: str, body: TokenBody, identity: Identity = Depends(auth)):
        require_admin(identity)
        token = service.issue_token(course_id, body.participant, body.expires_at)
        return {"participant": body.participant, "token": token}

    @app.post("/courses/{course_id}/rounds", status_code=201)
    def create_round(course_id: str, body: RoundCreateBody, identity: Identity = Depends(auth)):
        require_admin(identity)
        _check_id("round_id", body.round_id)
        handle = service.handle(course_id)
        with handle.lock:
            rnd = handle.course.create_round(
                body.round_id,
                roster=body.roster,
                rng_seed=body.rng_seed,
                deadlines=body.deadlines,
            )
            return _round_view(rnd)

    @app.post("/courses/{course_id}/snapshot", status_code=201)
    def snapshot(course_id: str, identity: Identity = Depends(auth)):
        require_admin(identity)
        return {"course_id": course_id, "covering_seq": service.snapshot(course_id)}

    @app.post("/rounds/{round_id}/phase")
    def advance_phase(
        round_id: str,
        body: PhaseBody,
        course: Optional[str] = None,
        identity: Identity = Depends(auth),
    ):
        handle = admin_course(identity, course)
        with handle.lock:
            rnd = handle.course.advance_phase(round_id, Phase(body.target), force=body.force)
            return _round_view(rnd)

    # -- participant endpoints ------------------------------------------------

    @app.get("/rounds/{round_id}")
    def get_round(round_id: str, identity: Identity = Depends(auth)):
        handle, me = participant_handle(identity)
        with handle.lock:
            course = handle.course
            view = _round_view(course.round(round_id))
            view["submitted"] = me in course.submissions.get(round_id, {})
            return view

    @app.get("/participants/{participant_id}")
    def get_participant(participant_id: str, identity: Identity = Depends(auth)):
        handle, me = require_self(identity, participant_id)
        with handle.lock:
            return _participant_view(handle.course.participant(me))

    @app.put("/participants/{participant_id}/intro")
    def record_intro(
        participant_id: str, body: IntroBody, identity: Identity = Depends(auth)
    ):
        handle, me = require_self(identity, participant_id)
        with handle.lock:
            return _participant_view(handle.course.record_intro(me, body.text))

    @app.post("/rounds/{round_id}/submissions", status_code=201)
    def submit_assignment(
        round_id: str, body: SubmissionBody, identity: Identity = Depends(auth)
    ):
        handle, me = participant_handle(identity)
        with handle.lock:
            submission = handle.course.submit_assignment(round_id, me, body.content_ref)
            return {
                "round_id": submission.round_id,
                "author": submission.author,
                "content_ref": submission.content_ref,
                "submitted_at": submission.submitted_at,
            }

    @app.get("/rounds/{round_id}/tasks")
    def list_tasks(
        round_id: str, reviewer: Optional[str] = None, identity: Identity = Depends(auth)
    ):
        handle, me = require_self(identity, reviewer or "")
        with handle.lock:
            course = handle.course
            assert course.config is not None
            identified = course.config.condition.identified
            tasks = course.tasks_for(round_id, me)
            return {"tasks": [_task_view(t, course, identified) for t in tasks]}

    @app.post("/tasks/{task_id}/review", status_code=201)
    def submit_review(task_id: str, body: ReviewBody, identity: Identity = Depends(auth)):
        handle, me = participant_handle(identity)
        with handle.lock:
            course = handle.course
            assert course.config is not None
            review = course.submit_review(task_id, me, body.prompts, body.grade)
            response: dict[str, Any] = {
                "review_id": review.review_id,
                "task_id": review.task_id,
                "round_id": review.round_id,
            }
            nudge = actionability_nudge(
                " ".join(review.prompts), course.config.nudge_threshold
            )
            if nudge is not None:
                response["nudge"] = nudge
            return response

    @app.get("/rounds/{round_id}/reviews")
    def list_authored_reviews(
        round_id: str, reviewer: Optional[str] = None, identity: Identity = Depends(auth)
    ):
        handle, me = require_self(identity, reviewer or "")
        with handle.lock:
            authored = handle.course.authored_reviews(round_id, me)
            return {"reviews": [_authored_review_view(r) for r in authored]}

    @app.get("/rounds/{round_id}/feedback")
    def list_feedback(
        round_id: str, participant: Optional[str] = None, identity: Identity = Depends(auth)
    ):
        handle, me = require_self(identity, participant or "")
        with handle.lock:
            course = handle.course
            assert course.config is not None
            identified = course.config.condition.identified
            include_grade = course.grades_visible(round_id, me)
            received = course.received_reviews(round_id, me)
            return {
                "round_id": round_id,
                "participant": me,
                "reviews": [
                    _received_review_view(r, course, identified, include_grade)
                    for r in received
                ],
            }

    @app.post("/reviews/{review_id}/rating", status_code=201)
    def rate_feedback(review_id: str, body: RatingBody, identity: Identity = Depends(auth)):
        handle, me = participant_handle(identity)
        with handle.lock:
            rating = handle.course.rate_feedback(review_id, me, body.stars)
            return {"review_id": rating.review_id, "stars": rating.stars}

    @app.post("/reviews/{review_id}/messages", status_code=201)
    def post_message(review_id: str, body: MessageBody, identity: Identity = Depends(auth)):
        handle, me = participant_handle(identity)
        with handle.lock:
            course = handle.course
            assert course.config is not None
            message = course.post_message(review_id, me, body.body)
            review = course.reviews[review_id]
            return _message_view(message, review, course, course.config.condition.identified)

    @app.get("/reviews/{review_id}/messages")
    def list_messages(review_id: str, identity: Identity = Depends(auth)):
        handle, me = participant_handle(identity)
        with handle.lock:
            course = handle.course
            assert course.config is not None
            messages = course.thread(review_id)
            review = course.reviews[review_id]
            if me not in (review.reviewer, review.author):
                raise ApiError(403, "NotAParty", "only the thread's parties may read it")
            identified = course.config.condition.identified
            return {
                "review_id": review_id,
                "messages": [_message_view(m, review, course, identified) for m in messages],
            }

    @app.get("/rounds/{round_id}/grades")
    def get_grades(
        round_id: str, participant: Optional[str] = None, identity: Identity = Depends(auth)
    ):
        handle, me = require_self(identity, participant or "")
        with handle.lock:
            return _grade_view(handle.course.grade_report(round_id, me))

    return app

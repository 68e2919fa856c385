"""Endpoint reference generator; `python -m peercourse.apidocs` writes docs/api.md."""

from __future__ import annotations

import sys
from pathlib import Path

from .api import STATUS_BY_ERROR

_ENDPOINTS = [
    # (method, path, token, summary, request, response)
    ("POST", "/courses", "admin",
     "Create a course.",
     '{"course_id", "condition": "blind-random|identified-random|identified-incentive", '
     '"k"?, "grade_lo"?, "grade_hi"?, "nudge_threshold"?, "rng_seed"?}',
     "201 course summary"),
    ("GET", "/courses/{course_id}", "admin",
     "Course overview: participants, rounds, last event sequence.",
     "-", "200 course detail"),
    ("POST", "/courses/{course_id}/participants", "admin",
     "Enroll a participant and mint their access token.",
     '{"participant_id", "display_name", "expires_at"?}',
     '201 {"participant_id", "display_name", "token"}'),
    ("POST", "/courses/{course_id}/tokens", "admin",
     "Mint a fresh token for an enrolled participant.",
     '{"participant", "expires_at"?}', '201 {"participant", "token"}'),
    ("POST", "/courses/{course_id}/rounds", "admin",
     "Create a round in phase `submission`.",
     '{"round_id", "roster"?, "rng_seed"?, "deadlines"?}', "201 round view"),
    ("POST", "/courses/{course_id}/snapshot", "admin",
     "Write a snapshot covering the current event sequence.",
     "-", '201 {"course_id", "covering_seq"}'),
    ("POST", "/rounds/{round_id}/phase?course={course_id}", "admin",
     "Advance the round one phase; `submission -> reviewing` builds the "
     "review assignment, `rating -> released` folds ratings into usefulness "
     "history. `force` expires unfinished review tasks.",
     '{"target": "reviewing|rating|released", "force"?}', "200 round view"),
    ("GET", "/rounds/{round_id}", "participant",
     "Round status for polling: phase, condition, k, deadlines, plus "
     "`submitted` for the caller.",
     "-", "200 round view"),
    ("GET", "/participants/{participant_id}", "participant (self)",
     "The caller's own profile.", "-",
     '200 {"participant_id", "display_name", "intro"}'),
    ("PUT", "/participants/{participant_id}/intro", "participant (self)",
     "Record the reviewer introduction shown beside this participant's "
     "reviews. Rejected in blind courses (409 BlindModeActive).",
     '{"text"}', "200 profile"),
    ("POST", "/rounds/{round_id}/submissions", "participant",
     "Submit (or replace) the caller's assignment while phase is "
     "`submission`.",
     '{"content_ref"}', "201 submission view"),
    ("GET", "/rounds/{round_id}/tasks?reviewer={participant_id}", "participant (self)",
     "The caller's review tasks. `author` appears only in identified "
     "conditions.",
     "-", '200 {"tasks": [{task_id, round_id, status, author?}]}'),
    ("POST", "/tasks/{task_id}/review", "participant",
     "Submit the four-prompt review and a grade for the task's author. When "
     "the combined text is shorter than the course's nudge threshold the "
     "response carries `nudge`.",
     '{"prompts": [4 strings], "grade"}', '201 {"review_id", "task_id", "round_id", "nudge"?}'),
    ("GET", "/rounds/{round_id}/reviews?reviewer={participant_id}", "participant (self)",
     "Reviews the caller wrote this round (for reaching their threads). "
     "No author identity, no grade echo.",
     "-", '200 {"reviews": [...]}'),
    ("GET", "/rounds/{round_id}/feedback?participant={participant_id}", "participant (self)",
     "Reviews received on the caller's work. `reviewer` appears only in "
     "identified conditions; `grade` appears only once the caller has rated "
     "every received review (omitted before that, never null).",
     "-", '200 {"round_id", "participant", "reviews": [...]}'),
    ("POST", "/reviews/{review_id}/rating", "participant (receiver)",
     "Rate a received review's usefulness, integer stars 1..5, once.",
     '{"stars"}', '201 {"review_id", "stars"}'),
    ("POST", "/reviews/{review_id}/messages", "participant (party)",
     "Post to the review's conversation (reviewer and receiver only; open "
     "from the rating phase).",
     '{"body"}', "201 message view"),
    ("GET", "/reviews/{review_id}/messages", "participant (party)",
     "Read the review's conversation. Senders are role labels "
     "(`reviewer`/`author`); identified conditions add the sender's name.",
     "-", '200 {"review_id", "messages": [...]}'),
    ("GET", "/rounds/{round_id}/grades?participant={participant_id}", "participant (self)",
     "The caller's grade report: per-review grades and the aggregate "
     "(lower median). 409 GradesPending until every received review is "
     "rated.",
     "-", '200 {"participant", "round_id", "per_review_grades", "aggregate"}'),
]

_SERVICE_ERRORS = [
    ("InvalidToken", 401, "missing, unknown, expired, or wrong-course bearer token"),
    ("AdminOnly", 403, "participant token used on an admin endpoint"),
    ("NotAParticipant", 403, "admin token used on a participant endpoint"),
    ("NotYourView", 403, "query names a participant other than the token's"),
    ("DuplicateCourse", 409, "course id already exists"),
    ("InvalidRequest", 422, "malformed ids, enum values, or payload shapes"),
]


def generate() -> str:
    lines = [
        "# HTTP API",
        "",
        "All requests carry `Authorization: Bearer <token>`. JSON in, JSON out,",
        "snake_case fields, RFC 3339 UTC timestamps. Error bodies are always",
        '`{"error": "<code>", "detail": "<text>"}`.',
        "",
        "The admin token lives in `<data_dir>/admin_token`; participant tokens",
        "come from the enrollment and token endpoints and grant exactly one",
        "participant's view of one course.",
        "",
        "## Endpoints",
        "",
    ]
    for method, path, token, summary, request, response in _ENDPOINTS:
        lines.append(f"### `{method} {path}`")
        lines.append("")
        lines.append(f"*Token:* {token}")
        lines.append("")
        lines.append(summary)
        lines.append("")
        if request != "-":
            lines.append(f"Request: `{request}`")
            lines.append("")
        lines.append(f"Response: `{response}`")
        lines.append("")
    lines.append("## Error codes")
    lines.append("")
    lines.append("Course engine errors map 1:1 onto statuses:")
    lines.append("")
    lines.append("| code | status |")
    lines.append("|---|---|")
    for code in sorted(STATUS_BY_ERROR):
        lines.append(f"| {code} | {STATUS_BY_ERROR[code]} |")
    lines.append("")
    lines.append("Service-level codes:")
    lines.append("")
    lines.append("| code | status | meaning |")
    lines.append("|---|---|---|")
    for code, status, meaning in _SERVICE_ERRORS:
        lines.append(f"| {code} | {status} | {meaning} |")
    lines.append("")
    return "\n".join(lines)


def main(argv=None) -> int:
    out = Path(argv[0]) if argv else Path("docs/api.md")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(generate(), encoding="utf-8")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))

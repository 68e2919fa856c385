"""Shared fixtures: an app over a temp data dir plus a scripted cohort driver."""

import pytest
from fastapi.testclient import TestClient

from peercourse.api import CourseService, create_app

ADMIN_TOKEN = "test-admin-token"
PROMPTS = [
    "The thesis is stated early and carried through each section cleanly.",
    "The evidence in part two is thin; one anecdote carries the claim.",
    "Bring in the survey numbers you mention and cite where they came from.",
    "Strong draft overall; the fixes are all local edits.",
]


@pytest.fixture
def service(tmp_path):
    return CourseService(tmp_path / "data", fsync=False, admin_token=ADMIN_TOKEN)


@pytest.fixture
def client(service):
    return TestClient(create_app(service), raise_server_exceptions=False)


def admin(extra=None):
    headers = {"Authorization": f"Bearer {ADMIN_TOKEN}"}
    if extra:
        headers.update(extra)
    return headers


def bearer(token):
    return {"Authorization": f"Bearer {token}"}


class Cohort:
    """Drives one course end to end through the HTTP surface only."""

    def __init__(self, client, course_id, condition, n, k=3, seed=0):
        self.client = client
        self.course_id = course_id
        self.ids = [f"p{i}" for i in range(1, n + 1)]
        created = client.post(
            "/courses",
            json={
                "course_id": course_id,
                "condition": condition,
                "k": k,
                "rng_seed": seed,
            },
            headers=admin(),
        )
        assert created.status_code == 201, created.text
        self.tokens = {}
        for pid in self.ids:
            enrolled = client.post(
                f"/courses/{course_id}/participants",
                json={"participant_id": pid, "display_name": f"Student {pid.upper()}"},
                headers=admin(),
            )
            assert enrolled.status_code == 201, enrolled.text
            self.tokens[pid] = enrolled.json()["token"]

    def auth(self, pid):
        return bearer(self.tokens[pid])

    def open_round(self, round_id="r1"):
        response = self.client.post(
            f"/courses/{self.course_id}/rounds",
            json={"round_id": round_id},
            headers=admin(),
        )
        assert response.status_code == 201, response.text
        return response.json()

    def submit_all(self, round_id="r1"):
        for pid in self.ids:
            response = self.client.post(
                f"/rounds/{round_id}/submissions",
                json={"content_ref": f"essay-{pid}"},
                headers=self.auth(pid),
            )
            assert response.status_code == 201, response.text

    def advance(self, target, round_id="r1", force=False):
        response = self.client.post(
            f"/rounds/{round_id}/phase",
            params={"course": self.course_id},
            json={"target": target, "force": force},
            headers=admin(),
        )
        assert response.status_code == 200, response.text
        return response.json()

    def tasks(self, pid, round_id="r1"):
        response = self.client.get(
            f"/rounds/{round_id}/tasks",
            params={"reviewer": pid},
            headers=self.auth(pid),
        )
        assert response.status_code == 200, response.text
        return response.json()["tasks"]

    def review_all(self, round_id="r1", grade=80, prompts=None):
        for pid in self.ids:
            for task in self.tasks(pid, round_id):
                response = self.client.post(
                    f"/tasks/{task['task_id']}/review",
                    json={"prompts": prompts or PROMPTS, "grade": grade},
                    headers=self.auth(pid),
                )
                assert response.status_code == 201, response.text

    def feedback(self, pid, round_id="r1"):
        response = self.client.get(
            f"/rounds/{round_id}/feedback",
            params={"participant": pid},
            headers=self.auth(pid),
        )
        assert response.status_code == 200, response.text
        return response.json()["reviews"]

    def rate_all(self, round_id="r1", stars=4):
        for pid in self.ids:
            for review in self.feedback(pid, round_id):
                if review["rated"]:
                    continue
                response = self.client.post(
                    f"/reviews/{review['review_id']}/rating",
                    json={"stars": stars},
                    headers=self.auth(pid),
                )
                assert response.status_code == 201, response.text

    def play_round(self, round_id="r1", grade=80, stars=4):
        """SUBMISSION through RELEASED with full participation."""
        self.open_round(round_id)
        self.submit_all(round_id)
        self.advance("reviewing", round_id)
        self.review_all(round_id, grade=grade)
        self.advance("rating", round_id)
        self.rate_all(round_id, stars=stars)
        self.advance("released", round_id)

"""Walk one small course through all four phases and print what happens.

Run from the repository root:

    python3 demos/run_course.py
"""

from peercourse import Condition, Course, CourseConfig, Phase

PROMPTS = (
    "Your opening paragraph states the claim clearly and the sections follow it.",
    "The third section asserts the result without showing the intermediate step.",
    "Spell out the substitution you used between equations two and three.",
    "Nice draft; with that one gap filled it reads complete.",
)

ROSTER = {
    "ada": "Ada L.",
    "ben": "Ben W.",
    "cho": "Cho K.",
    "dev": "Dev P.",
}


def main():
    config = CourseConfig(condition=Condition.IDENTIFIED_INCENTIVE, k=3, rng_seed=7)
    course = Course.create("writing-101", config)
    for pid, name in ROSTER.items():
        course.enroll(pid, name)
        course.record_intro(pid, f"Hi, I'm {name}. I give blunt but friendly notes.")
    print(f"course 'writing-101' ({config.condition.value}), {len(ROSTER)} enrolled")

    course.create_round("week1")
    for pid in ROSTER:
        course.submit_assignment("week1", pid, f"drafts/{pid}-week1.md")
    print("week1: all drafts in, advancing to reviewing")

    course.advance_phase("week1", Phase.REVIEWING)
    pairs = course.assignments["week1"].pairs
    print(f"matched {len(pairs)} review pairs (fan-out {course.assignments['week1'].fan_out}):")
    for reviewer, author in pairs:
        print(f"  {ROSTER[reviewer]:7s} reviews {ROSTER[author]}")

    grades = {"ada": 92, "ben": 78, "cho": 85, "dev": 88}
    for pid in ROSTER:
        for task in course.tasks_for("week1", pid):
            course.submit_review(task.task_id, pid, PROMPTS, grades[pid])
    print("all reviews submitted, advancing to rating")

    course.advance_phase("week1", Phase.RATING)
    stars = {"ada": 5, "ben": 3, "cho": 4, "dev": 4}
    for pid in ROSTER:
        for review in course.received_reviews("week1", pid):
            course.rate_feedback(review.review_id, pid, stars[review.reviewer])
        report = course.grade_report("week1", pid)
        print(f"  {ROSTER[pid]:7s} rated all feedback -> grade {report.aggregate}"
              f" (lower median of {sorted(report.per_review_grades)})")

    course.advance_phase("week1", Phase.RELEASED)
    print("week1 released; usefulness scores now steer next week's matching:")
    for pid in ROSTER:
        score = course.usefulness_score(pid)
        print(f"  {ROSTER[pid]:7s} {score.value:.2f} stars over {score.n_ratings} ratings")


if __name__ == "__main__":
    main()

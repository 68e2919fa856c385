"""Peer review course platform: identified reviewing with incentive matching.

The engine runs courses through four phases per round: everyone submits, a
seeded matcher hands each student k peers to review with four guided prompts
and a grade, receivers rate each review's usefulness (1-5 stars) and can talk
to the reviewer, and grades unlock per student only once they have rated all
the feedback they received. Under the incentive condition the matcher pairs
students by usefulness rank, so writing better reviews earns better
reviewers. Everything is event-sourced to an append-only log, served over
HTTP, and reproducible under a seeded agent simulation.
"""

from .course import Course, derive_round_seed
from .errors import PeerCourseError
from .matching import (
    AssignmentSet,
    Policy,
    UsefulnessScore,
    assign_reviewers,
    assortativity,
    validate_assignment,
)
from .model import (
    Condition,
    CourseConfig,
    GradeReport,
    Phase,
    actionability_nudge,
    lower_median,
)
from .simulation import (
    AgentProfile,
    RoundMetrics,
    SimulationConfig,
    export_csv,
    grade_gap,
    run_simulation,
)
from .stats import TTestResult, mean, percentile_nearest_rank, pooled_t_test, std

__version__ = "0.1.0"

__all__ = [
    "AgentProfile",
    "AssignmentSet",
    "Condition",
    "Course",
    "CourseConfig",
    "GradeReport",
    "PeerCourseError",
    "Phase",
    "Policy",
    "RoundMetrics",
    "SimulationConfig",
    "TTestResult",
    "UsefulnessScore",
    "actionability_nudge",
    "assign_reviewers",
    "assortativity",
    "derive_round_seed",
    "export_csv",
    "grade_gap",
    "lower_median",
    "mean",
    "percentile_nearest_rank",
    "pooled_t_test",
    "run_simulation",
    "std",
    "validate_assignment",
]

"""Error types raised by the course engine, stores, and statistics helpers.

Every error carries a stable ``code`` (its class name) so transport layers
can map one class to one wire error without string matching.
"""


class PeerCourseError(Exception):
    """Base class for all domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# -- phase machine ----------------------------------------------------------

class IllegalTransition(PeerCourseError):
    """Target phase is not the immediate successor of the current phase."""


class InsufficientSubmissions(PeerCourseError):
    """Reviewing needs at least two submissions to pair anyone."""


class IncompleteReviews(PeerCourseError):
    """Pending review tasks remain and the advance was not forced."""


class PhaseClosed(PeerCourseError):
    """The operation is not available in the round's current phase."""


# -- participants and submissions -------------------------------------------

class UnknownParticipant(PeerCourseError):
    """Participant is not enrolled or not on the round's roster."""


class UnknownEntity(PeerCourseError):
    """Referenced course, round, task, or review does not exist."""


class BlindModeActive(PeerCourseError):
    """Introductions are rejected while the course runs blind."""


class TooLong(PeerCourseError):
    """Text exceeds its configured length bound."""


# -- reviews, ratings, messages ---------------------------------------------

class NotYourTask(PeerCourseError):
    """Caller is not the reviewer the task was assigned to."""


class TaskNotPending(PeerCourseError):
    """The task was already reviewed or has expired."""


class AllPromptsEmpty(PeerCourseError):
    """A review needs at least one non-empty prompt field."""


class GradeOutOfRange(PeerCourseError):
    """Grade lies outside the course's configured scale."""


class AlreadyRated(PeerCourseError):
    """A review accepts exactly one usefulness rating."""


class NotReceiver(PeerCourseError):
    """Only the review's receiving author may rate it."""


class InvalidStars(PeerCourseError):
    """Usefulness stars must be an integer from 1 to 5."""


class NotAParty(PeerCourseError):
    """Only the reviewer and the receiving author may join a thread."""


class EmptyBody(PeerCourseError):
    """Messages must carry text."""


# -- grades ------------------------------------------------------------------

class GradesPending(PeerCourseError):
    """Grades stay hidden until the participant rates all received feedback."""


class GradesNotReleased(PeerCourseError):
    """Round-level grade statistics need a released round."""


# -- matching ----------------------------------------------------------------

class TooFewSubmitters(PeerCourseError):
    """Reviewer assignment needs at least two submitters."""


# -- persistence -------------------------------------------------------------

class SequenceConflict(PeerCourseError):
    """Appended event does not continue the log's gapless sequence."""


class StorageFailure(PeerCourseError):
    """The log could not be durably written."""


class CorruptLog(PeerCourseError):
    """A log record failed its checksum or could not be parsed.

    ``last_good_seq`` is the sequence number of the last intact record
    (0 for an unreadable first record); ``offset`` is the byte position
    where the bad record starts.
    """

    def __init__(self, message: str, last_good_seq: int, offset: int):
        super().__init__(message)
        self.last_good_seq = last_good_seq
        self.offset = offset


class VersionMismatch(PeerCourseError):
    """Snapshot was written by an incompatible schema version."""


# -- statistics / simulation --------------------------------------------------

class TooFewSamples(PeerCourseError):
    """The statistic needs more observations than were given."""


class ZeroVariance(PeerCourseError):
    """Pooled variance is zero; the t statistic is undefined."""


class ConfigInvalid(PeerCourseError):
    """Simulation or service configuration failed validation."""


class IoFailure(PeerCourseError):
    """An output file could not be written."""

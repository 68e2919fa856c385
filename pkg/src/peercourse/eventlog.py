"""Durable course log: newline-delimited JSON events plus JSON snapshots.

Each line holds one event as a JSON object with fields ``seq``, ``ts``,
``kind``, ``payload`` and ``crc32`` (hex of the record body), so torn writes
are detectable and the log stays greppable. Snapshots are single JSON
documents carrying ``schema_version``, ``covering_seq`` and the full state;
replay resumes after the covering sequence number.
"""

from __future__ import annotations

import json
import os
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .course import Course
from .errors import CorruptLog, SequenceConflict, StorageFailure, VersionMismatch
from .model import Event

SCHEMA_VERSION = 1


def _crc_body(event: Event) -> str:
    body = json.dumps(
        {"seq": event.seq, "ts": event.ts, "kind": event.kind, "payload": event.payload},
        sort_keys=True,
        separators=(",", ":"),
    )
    return format(zlib.crc32(body.encode("utf-8")), "08x")


def encode_event(event: Event) -> str:
    record = {
        "seq": event.seq,
        "ts": event.ts,
        "kind": event.kind,
        "payload": event.payload,
        "crc32": _crc_body(event),
    }
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def decode_line(line: str) -> Event:
    """Parse one log line; raises ValueError on any structural or CRC defect."""
    record = json.loads(line)
    event = Event(
        seq=record["seq"], ts=record["ts"], kind=record["kind"], payload=record["payload"]
    )
    if record.get("crc32") != _crc_body(event):
        raise ValueError("crc mismatch")
    return event


@dataclass
class ScanResult:
    events: list[Event]
    last_good_seq: int
    end_offset: int  # byte offset just past the last intact record
    torn_tail: bool  # a bad record was found with nothing valid after it


class EventLog:
    """Single-appender log for one course."""

    def __init__(self, path: Union[str, Path], fsync: bool = True):
        self.path = Path(path)
        self.fsync = fsync
        self._last_seq = 0
        self._end_offset = 0
        self._torn = False
        if self.path.exists():
            scan = self.scan()
            self._last_seq = scan.last_good_seq
            self._end_offset = scan.end_offset
            self._torn = scan.torn_tail

    @property
    def last_seq(self) -> int:
        return self._last_seq

    def scan(self) -> ScanResult:
        """Tolerant pass: collect intact records, flag a torn tail.

        A bad record followed by further intact records is real corruption
        and raises CorruptLog; a bad record at the very end is a torn write.
        """
        events: list[Event] = []
        offset = 0
        expected = 1
        raw = self.path.read_bytes() if self.path.exists() else b""
        lines = raw.split(b"\n")
        for i, chunk in enumerate(lines):
            if chunk == b"":
                continue
            complete = i < len(lines) - 1  # a complete record ends in a newline
            try:
                if not complete:
                    raise ValueError("record not newline-terminated")
                event = decode_line(chunk.decode("utf-8"))
                if event.seq != expected:
                    raise ValueError(f"sequence gap: expected {expected}, got {event.seq}")
            except (ValueError, KeyError, TypeError, UnicodeDecodeError) as exc:
                remainder = b"\n".join(lines[i + 1:])
                if _has_valid_record(remainder):
                    raise CorruptLog(
                        f"corrupt record after seq {expected - 1}: {exc}",
                        last_good_seq=expected - 1,
                        offset=offset,
                    ) from exc
                return ScanResult(events, expected - 1, offset, torn_tail=True)
            events.append(event)
            offset += len(chunk) + 1
            expected += 1
        return ScanResult(events, expected - 1, offset, torn_tail=False)

    def events(self) -> list[Event]:
        """Strict read of the whole log; any defect raises CorruptLog."""
        scan = self.scan()
        if scan.torn_tail:
            raise CorruptLog(
                "torn record at end of log",
                last_good_seq=scan.last_good_seq,
                offset=scan.end_offset,
            )
        return scan.events

    def append(self, events: list[Event]) -> int:
        """Durably append a batch; returns the last sequence number written."""
        if not events:
            return self._last_seq
        expected = self._last_seq + 1
        for event in events:
            if event.seq != expected:
                raise SequenceConflict(
                    f"event seq {event.seq} does not follow {expected - 1}"
                )
            expected += 1
        data = "".join(encode_event(e) + "\n" for e in events).encode("utf-8")
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "r+b" if self.path.exists() else "wb") as fh:
                if self._torn:
                    fh.truncate(self._end_offset)  # drop the torn bytes before appending
                    self._torn = False
                fh.seek(self._end_offset)
                fh.write(data)
                fh.flush()
                if self.fsync:
                    os.fsync(fh.fileno())
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc
        self._end_offset += len(data)
        self._last_seq = events[-1].seq
        return self._last_seq


def replay(log: EventLog) -> Course:
    """Fold the full log through the course transitions."""
    return Course.replay(log.events())


def save_snapshot(path: Union[str, Path], course: Course) -> None:
    document = {
        "schema_version": SCHEMA_VERSION,
        "covering_seq": course.last_seq,
        "state": course.to_state_dict(),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(document, sort_keys=True), encoding="utf-8")
    tmp.replace(path)


def load_snapshot(path: Union[str, Path]) -> Course:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    if document.get("schema_version") != SCHEMA_VERSION:
        raise VersionMismatch(
            f"snapshot schema {document.get('schema_version')!r}, expected {SCHEMA_VERSION}"
        )
    course = Course.from_state_dict(document["state"])
    if course.last_seq != document["covering_seq"]:
        raise VersionMismatch("snapshot covering_seq disagrees with its state")
    return course


def load_course(
    log_path: Union[str, Path],
    snapshot_path: Optional[Union[str, Path]] = None,
    tolerate_torn_tail: bool = True,
) -> Course:
    """Restore a course: snapshot if present, then replay the log tail.

    With ``tolerate_torn_tail`` (the service default) a torn final record is
    skipped; the next append truncates it. Mid-log corruption always raises.
    """
    log = EventLog(log_path)
    scan = log.scan()
    if scan.torn_tail and not tolerate_torn_tail:
        raise CorruptLog(
            "torn record at end of log",
            last_good_seq=scan.last_good_seq,
            offset=scan.end_offset,
        )
    if snapshot_path is not None and Path(snapshot_path).exists():
        course = load_snapshot(snapshot_path)
        for event in scan.events:
            if event.seq > course.last_seq:
                course.apply_event(event)
        return course
    return Course.replay(scan.events)


def _has_valid_record(data: bytes) -> bool:
    for chunk in data.split(b"\n"):
        if chunk == b"":
            continue
        try:
            decode_line(chunk.decode("utf-8"))
            return True
        except (ValueError, KeyError, TypeError, UnicodeDecodeError):
            continue
    return False

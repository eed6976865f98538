"""Event-log data model and CSV ingestion.

An event log is a single flat relation of events. Every event carries an
event id, a case id, a timestamp and one value (possibly null) per schema
attribute. Two key candidates hold: (eid, cid) and (cid, ts). Within one
case timestamps are therefore unique, which totally orders the case.

Timestamps are integer epoch milliseconds everywhere inside the package;
ISO-8601 text is converted once at ingestion. All model types are frozen
and safe to share.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import cached_property
from typing import Iterable, TextIO

from .errors import BadTimestamp, KeyViolation, MalformedCsv

# Case-insensitive header names accepted for the three fixed column roles.
EID_ALIASES = ("eid", "event_id")
CID_ALIASES = ("cid", "case_id")
TS_ALIASES = ("ts", "timestamp", "event_time")


def parse_timestamp(text: str) -> int:
    """Parse a timestamp field into epoch milliseconds.

    Accepts a non-negative decimal integer (already milliseconds) or an
    ISO-8601 date/datetime. Naive datetimes are read as UTC.
    """
    raw = text.strip()
    if not raw:
        raise BadTimestamp("empty timestamp field")
    body = raw[1:] if raw[0] in "+-" else raw
    if body.isdigit():
        value = int(raw)
        if value < 0:
            raise BadTimestamp(f"negative timestamp {raw!r}")
        return value
    iso = raw[:-1] + "+00:00" if raw.endswith(("Z", "z")) else raw
    try:
        moment = datetime.fromisoformat(iso)
    except ValueError:
        raise BadTimestamp(f"cannot parse timestamp {raw!r}") from None
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    millis = round(moment.timestamp() * 1000)
    if millis < 0:
        raise BadTimestamp(f"timestamp {raw!r} is before the epoch")
    return millis


def millis_to_iso(ts: int) -> str:
    """Render epoch milliseconds as an ISO-8601 UTC string (for display only)."""
    return datetime.fromtimestamp(ts / 1000, tz=timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass(frozen=True)
class Event:
    """One event row. ``attrs`` is an ordered (name, value) mapping; a value
    of None is the null marker."""

    eid: str
    cid: str
    ts: int
    attrs: tuple[tuple[str, str | None], ...]

    def __post_init__(self) -> None:
        if self.ts < 0:
            raise BadTimestamp(f"event {self.eid!r}: negative timestamp {self.ts}")
        object.__setattr__(self, "attrs", tuple(self.attrs))

    def value(self, name: str) -> str | None:
        for key, val in self.attrs:
            if key == name:
                return val
        raise KeyError(name)

    def att(self) -> tuple[str | None, ...]:
        """The event's attribute tuple, in schema order."""
        return tuple(val for _, val in self.attrs)


def _check_keys(events: Iterable[Event]) -> None:
    seen_eid_cid: set[tuple[str, str]] = set()
    seen_cid_ts: set[tuple[str, int]] = set()
    for ev in events:
        if (ev.eid, ev.cid) in seen_eid_cid:
            raise KeyViolation(f"duplicate (eid, cid) pair ({ev.eid!r}, {ev.cid!r})")
        if (ev.cid, ev.ts) in seen_cid_ts:
            raise KeyViolation(f"duplicate (cid, ts) pair ({ev.cid!r}, {ev.ts})")
        seen_eid_cid.add((ev.eid, ev.cid))
        seen_cid_ts.add((ev.cid, ev.ts))


@dataclass(frozen=True)
class EventLog:
    """Immutable event log. Events are kept in canonical (cid, ts) order and
    the key candidates are enforced at construction time."""

    schema: tuple[str, ...]
    events: tuple[Event, ...]

    def __post_init__(self) -> None:
        schema = tuple(self.schema)
        if len(set(schema)) != len(schema):
            raise MalformedCsv(f"duplicate attribute names in schema {schema}")
        ordered = tuple(sorted(self.events, key=lambda e: (e.cid, e.ts)))
        for ev in ordered:
            if tuple(name for name, _ in ev.attrs) != schema:
                raise KeyViolation(
                    f"event {ev.eid!r} attribute names do not match schema {schema}"
                )
        _check_keys(ordered)
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "events", ordered)


@dataclass(frozen=True)
class EventSet:
    """All events of one case, ascending by timestamp."""

    cid: str
    events: tuple[Event, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.events, key=lambda e: e.ts))
        for ev in ordered:
            if ev.cid != self.cid:
                raise KeyViolation(f"event {ev.eid!r} belongs to case {ev.cid!r}, not {self.cid!r}")
        object.__setattr__(self, "events", ordered)

    def __len__(self) -> int:
        return len(self.events)

    @cached_property
    def timestamps(self) -> tuple[int, ...]:
        return tuple(e.ts for e in self.events)

    @cached_property
    def _index(self) -> dict[int, int]:
        return {ts: i for i, ts in enumerate(self.timestamps)}

    def event_at(self, ts: int) -> Event:
        return self.events[self._index[ts]]

    def successor(self, ts: int) -> int | None:
        """The next event timestamp strictly after ``ts``, or None."""
        i = self._index[ts] + 1
        return self.timestamps[i] if i < len(self.timestamps) else None

    def events_between(self, lo: int, hi: int) -> int:
        """Number of events with lo < ts < hi."""
        return sum(1 for ts in self.timestamps if lo < ts < hi)


@dataclass(frozen=True)
class Segment:
    """A contiguous stretch of one case's timeline, named by its endpoint
    timestamps, or the distinguished empty segment (both endpoints None)."""

    start: int | None
    end: int | None

    def __post_init__(self) -> None:
        if (self.start is None) != (self.end is None):
            raise ValueError("segment endpoints must both be set or both be None")
        if self.start is not None and self.start > self.end:  # type: ignore[operator]
            raise ValueError(f"segment start {self.start} after end {self.end}")

    @staticmethod
    def interval(start: int, end: int) -> "Segment":
        return Segment(start, end)

    @staticmethod
    def empty() -> "Segment":
        return EMPTY_SEGMENT

    @property
    def is_empty(self) -> bool:
        return self.start is None

    def sort_key(self) -> tuple[int, int]:
        """(span, start) presentation order; the empty segment sorts first."""
        if self.is_empty:
            return (-1, -1)
        return (self.end - self.start, self.start)  # type: ignore[operator]

    def __str__(self) -> str:
        if self.is_empty:
            return "empty"
        return f"({self.start},{self.end})"


EMPTY_SEGMENT = Segment(None, None)


@dataclass(frozen=True)
class CaseSet:
    """Per-case attribute rows. Ingestible and validatable; the query
    pipeline never touches it."""

    schema: tuple[str, ...]
    rows: tuple[tuple[str, tuple[str | None, ...]], ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for cid, values in self.rows:
            if cid in seen:
                raise KeyViolation(f"duplicate case id {cid!r}")
            if len(values) != len(self.schema):
                raise MalformedCsv(f"case {cid!r} has {len(values)} values for {len(self.schema)} attributes")
            seen.add(cid)

    def case_ids(self) -> frozenset[str]:
        return frozenset(cid for cid, _ in self.rows)


def _resolve_role(header: list[str], wanted: str | None, aliases: tuple[str, ...], role: str) -> int:
    if wanted is not None:
        for i, name in enumerate(header):
            if name == wanted:
                return i
        for i, name in enumerate(header):
            if name.lower() == wanted.lower():
                return i
        raise MalformedCsv(f"{role} column {wanted!r} not found in header {header}")
    hits = [i for i, name in enumerate(header) if name.lower() in aliases]
    if not hits:
        raise MalformedCsv(f"no {role} column found in header {header}; pass one explicitly")
    if len(hits) > 1:
        raise MalformedCsv(f"ambiguous {role} column in header {header}; pass one explicitly")
    return hits[0]


def load_event_log(
    source: str | TextIO,
    *,
    eid_col: str | None = None,
    cid_col: str | None = None,
    ts_col: str | None = None,
) -> EventLog:
    """Read an RFC-4180 CSV stream into an EventLog.

    The three role columns are located by the given header names, or by the
    usual aliases (event_id/eid, case_id/cid, timestamp/ts/event_time) when
    not given. Every remaining column becomes a schema attribute, in header
    order. Empty attribute fields ingest as null.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedCsv("missing header row") from None
    if any(not name.strip() for name in header):
        raise MalformedCsv(f"blank column name in header {header}")
    ei = _resolve_role(header, eid_col, EID_ALIASES, "event id")
    ci = _resolve_role(header, cid_col, CID_ALIASES, "case id")
    ti = _resolve_role(header, ts_col, TS_ALIASES, "timestamp")
    if len({ei, ci, ti}) != 3:
        raise MalformedCsv("event id, case id and timestamp must be distinct columns")
    attr_cols = [i for i in range(len(header)) if i not in (ei, ci, ti)]
    schema = tuple(header[i] for i in attr_cols)

    events = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedCsv(f"row {lineno} has {len(row)} fields, header has {len(header)}")
        try:
            ts = parse_timestamp(row[ti])
        except BadTimestamp as exc:
            raise BadTimestamp(f"row {lineno}: {exc}") from None
        attrs = tuple((header[i], row[i] if row[i] != "" else None) for i in attr_cols)
        events.append(Event(eid=row[ei], cid=row[ci], ts=ts, attrs=attrs))
    return EventLog(schema=schema, events=tuple(events))


def serialize_event_log(log: EventLog) -> str:
    """Serialize back to CSV with canonical eid/cid/ts headers and millisecond
    timestamps. load_event_log of the result reproduces the log exactly."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["eid", "cid", "ts", *log.schema])
    for ev in log.events:
        writer.writerow([ev.eid, ev.cid, str(ev.ts), *["" if v is None else v for v in ev.att()]])
    return out.getvalue()


def load_case_set(source: str | TextIO, *, cid_col: str | None = None) -> CaseSet:
    """Read a per-case attribute CSV. Case ids must be unique."""
    stream = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedCsv("missing header row") from None
    ci = _resolve_role(header, cid_col, CID_ALIASES, "case id")
    attr_cols = [i for i in range(len(header)) if i != ci]
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedCsv(f"row {lineno} has {len(row)} fields, header has {len(header)}")
        rows.append((row[ci], tuple(row[i] if row[i] != "" else None for i in attr_cols)))
    return CaseSet(schema=tuple(header[i] for i in attr_cols), rows=tuple(rows))


def cases(log: EventLog) -> frozenset[str]:
    """The distinct case ids of the log."""
    return frozenset(e.cid for e in log.events)


def case_events(log: EventLog, cid: str) -> EventSet:
    """The case's events ascending by timestamp; empty for an absent cid."""
    return EventSet(cid=cid, events=tuple(e for e in log.events if e.cid == cid))


def event_sets(log: EventLog) -> list[EventSet]:
    """All per-case event sets, ordered by case id."""
    grouped: dict[str, list[Event]] = {}
    for ev in log.events:
        grouped.setdefault(ev.cid, []).append(ev)
    return [EventSet(cid=cid, events=tuple(evs)) for cid, evs in sorted(grouped.items())]


def enumerate_segments(es: EventSet) -> list[Segment]:
    """Every nonempty segment of the case: all timestamp pairs t_b <= t_e,
    ascending by (start, end). Exactly n(n+1)/2 segments for n events."""
    ts = es.timestamps
    return [Segment.interval(ts[i], ts[j]) for i in range(len(ts)) for j in range(i, len(ts))]


def merge_cases(log: EventLog) -> EventLog:
    """Collapse all cases into a single case "merged".

    Events are renumbered with timestamps 1..n in ascending original
    (ts, cid, eid) order; attribute tuples are untouched. Event ids are kept
    unless merging would collide two of them, in which case a deterministic
    suffix is appended.
    """
    ordered = sorted(log.events, key=lambda e: (e.ts, e.cid, e.eid))
    used: set[str] = set()
    merged = []
    for row, ev in enumerate(ordered, start=1):
        eid = ev.eid
        while eid in used:
            eid = f"{eid}_{row}"
        used.add(eid)
        merged.append(Event(eid=eid, cid="merged", ts=row, attrs=ev.attrs))
    return EventLog(schema=log.schema, events=tuple(merged))

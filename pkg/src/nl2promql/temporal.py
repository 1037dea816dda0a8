"""Time range resolution for natural-language questions.

A question (or an explicit override) is turned into a concrete window plus
the PromQL range-selector syntax to embed in generated queries. Strategies
are tried in a fixed order and the first hit wins:

1. explicit caller-supplied (start, end) timestamps,
2. shorthand duration strings such as ``15m``, ``6h``, ``7d``,
3. natural-language durations ("last 6 hours", "3 days ago", "in the past
   2 weeks"),
4. calendar references ("yesterday", "today", "this week", "this month",
   month names with an optional year),
5. specific dates ("2025-08-10", "June 5th", "06/05/2025"), resolved with a
   preference for past dates and day-boundary timestamps,
6. a default window (one hour unless configured otherwise).

Range-selector units follow the expression's own unit when it names one:
"yesterday" is a day expression and yields ``[1d]``, "3 weeks" yields
``[21d]``. Windows without a named unit (explicit timestamps, the default)
use the numeric thresholds in :func:`rate_syntax_for`.

Everything here is pure: ``now`` is always injected, never read from the
clock, and all calendar arithmetic is UTC.
"""

from __future__ import annotations

import calendar as _cal
import math
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum

__all__ = ["Strategy", "TimeRangeInfo", "resolve_time", "rate_syntax_for"]

SECONDS = {"s": 1, "m": 60, "h": 3600, "d": 86400, "w": 604800}

_RATE_RE = re.compile(r"^\[\d+[smhdw]\]$")


class Strategy(str, Enum):
    shorthand = "shorthand"
    nl_duration = "nl_duration"
    calendar = "calendar"
    specific_date = "specific_date"
    explicit = "explicit"
    default = "default"


@dataclass(frozen=True)
class TimeRangeInfo:
    start: int
    end: int
    rate_syntax: str
    duration_text: str
    duration_seconds: int
    strategy: Strategy

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValueError(f"empty time range: start={self.start} end={self.end}")
        if self.duration_seconds != self.end - self.start:
            raise ValueError("duration_seconds does not match end - start")
        if not _RATE_RE.match(self.rate_syntax):
            raise ValueError(f"bad rate syntax {self.rate_syntax!r}")


def rate_syntax_for(duration_seconds: int) -> str:
    """Range-selector syntax for a unitless window.

    Sub-hour windows use minutes, windows under 48 hours use hours, anything
    longer uses days; counts round up so the selector always covers the
    window.
    """
    if duration_seconds <= 0:
        raise ValueError(f"non-positive duration {duration_seconds}")
    if duration_seconds < 3600:
        return f"[{math.ceil(duration_seconds / 60)}m]"
    if duration_seconds < 48 * 3600:
        return f"[{math.ceil(duration_seconds / 3600)}h]"
    return f"[{math.ceil(duration_seconds / 86400)}d]"


def _unit_rate(duration_seconds: int, unit: str) -> str:
    """Range syntax when the source expression named a unit.

    Weeks, months, and years collapse to days; seconds, minutes, hours, and
    days pass through.
    """
    if unit == "w":
        unit = "d"
    return f"[{max(1, math.ceil(duration_seconds / SECONDS[unit]))}{unit}]"


def _humanize(seconds: int) -> str:
    parts = []
    for label, size in (("day", 86400), ("hour", 3600), ("minute", 60), ("second", 1)):
        count, seconds = divmod(seconds, size)
        if count:
            parts.append(f"{count} {label}" + ("s" if count != 1 else ""))
    return " ".join(parts) or "0 seconds"


def _mk(start: int, end: int, rate: str, strategy: Strategy) -> TimeRangeInfo:
    return TimeRangeInfo(
        start=start,
        end=end,
        rate_syntax=rate,
        duration_text=_humanize(end - start),
        duration_seconds=end - start,
        strategy=strategy,
    )


# --------------------------------------------------------------------------
# strategy 2: shorthand

_SHORTHAND_RE = re.compile(r"^(\d+)\s*([smhdw])$")


def _try_shorthand(q: str, now: int, _day_bounds: bool) -> TimeRangeInfo | None:
    m = _SHORTHAND_RE.match(q)
    if not m:
        return None
    n, unit = int(m.group(1)), m.group(2)
    if n == 0:
        return None
    duration = n * SECONDS[unit]
    return _mk(now - duration, now, _unit_rate(duration, unit), Strategy.shorthand)


# --------------------------------------------------------------------------
# strategy 3: natural-language durations

_NL_UNITS = {
    "minute": ("m", 60),
    "min": ("m", 60),
    "hour": ("h", 3600),
    "hr": ("h", 3600),
    "day": ("d", 86400),
    "week": ("w", 604800),
    "month": ("d", 2592000),
    "year": ("d", 31536000),
}
_UNIT_ALT = r"(minutes?|mins?|hours?|hrs?|days?|weeks?|months?|years?)"
_NL_NUMERIC_RE = re.compile(rf"\b(?:last|past)\s+(\d+)\s+{_UNIT_ALT}\b")
_NL_AGO_RE = re.compile(rf"\b(\d+)\s+{_UNIT_ALT}\s+ago\b")
_NL_IMPLICIT_RE = re.compile(r"\b(?:last|past)\s+(minute|hour|day|week|month|year)\b")


def _canon_unit(text: str) -> tuple[str, int]:
    return _NL_UNITS[text.rstrip("s") if text != "s" else text]


def _try_nl_duration(q: str, now: int, _day_bounds: bool) -> TimeRangeInfo | None:
    for pattern in (_NL_NUMERIC_RE, _NL_AGO_RE):
        m = pattern.search(q)
        if m:
            n = int(m.group(1))
            if n == 0:
                continue
            unit, unit_seconds = _canon_unit(m.group(2))
            duration = n * unit_seconds
            return _mk(now - duration, now, _unit_rate(duration, unit), Strategy.nl_duration)
    m = _NL_IMPLICIT_RE.search(q)
    if m:
        unit, unit_seconds = _canon_unit(m.group(1))
        return _mk(now - unit_seconds, now, _unit_rate(unit_seconds, unit), Strategy.nl_duration)
    return None


# --------------------------------------------------------------------------
# strategy 4: calendar references

_MONTHS = {
    "january": 1, "jan": 1, "february": 2, "feb": 2, "march": 3, "mar": 3,
    "april": 4, "apr": 4, "may": 5, "june": 6, "jun": 6, "july": 7, "jul": 7,
    "august": 8, "aug": 8, "september": 9, "sept": 9, "sep": 9,
    "october": 10, "oct": 10, "november": 11, "nov": 11, "december": 12, "dec": 12,
}
_MONTH_ALT = "|".join(sorted(_MONTHS, key=len, reverse=True))
_YESTERDAY_RE = re.compile(r"\byesterday\b")
_TODAY_RE = re.compile(r"\btoday\b")
_THIS_WEEK_RE = re.compile(r"\bthis\s+week\b")
_THIS_MONTH_RE = re.compile(r"\bthis\s+month\b")
_MONTH_NAME_RE = re.compile(rf"\b({_MONTH_ALT})\b(?:\s+(\d{{4}}))?")
_DAY_BEFORE_RE = re.compile(r"(\d{1,2})(?:st|nd|rd|th)?\s+$")
_DAY_AFTER_RE = re.compile(r"^\s+\d{1,2}(?:st|nd|rd|th)?\b(?!\d)")


def _midnight(now: int) -> datetime:
    return datetime.fromtimestamp(now, tz=timezone.utc).replace(
        hour=0, minute=0, second=0, microsecond=0
    )


def _ts(dt: datetime) -> int:
    return int(dt.timestamp())


def _day_window(start: int, end: int, strategy: Strategy) -> TimeRangeInfo:
    return _mk(start, end, _unit_rate(end - start, "d"), strategy)


def _try_calendar(q: str, now: int, day_bounds: bool) -> TimeRangeInfo | None:
    midnight = _midnight(now)
    if _YESTERDAY_RE.search(q):
        if day_bounds:
            end = _ts(midnight)
            return _day_window(end - 86400, end, Strategy.calendar)
        return _day_window(now - 86400, now, Strategy.calendar)
    if _TODAY_RE.search(q):
        start = _ts(midnight)
        if start >= now:
            start -= 86400
        return _mk(start, now, "[1d]", Strategy.calendar)
    if _THIS_WEEK_RE.search(q):
        start = _ts(midnight) - midnight.weekday() * 86400
        if start >= now:
            start -= 7 * 86400
        return _day_window(start, now, Strategy.calendar)
    if _THIS_MONTH_RE.search(q):
        start = _ts(midnight.replace(day=1))
        if start >= now:
            return None
        return _day_window(start, now, Strategy.calendar)
    for m in _MONTH_NAME_RE.finditer(q):
        # A month name adjacent to a day number ("june 5", "5 june") is a
        # specific date, not a calendar month; leave it to the next strategy.
        if _DAY_BEFORE_RE.search(q[: m.start()]) or _DAY_AFTER_RE.match(q[m.end(1):]):
            continue
        name = m.group(1)
        year_text = m.group(2)
        # "may" doubles as a verb; only read it as a month when the year
        # is spelled out.
        if name == "may" and not year_text:
            continue
        month = _MONTHS[name]
        if year_text:
            year = int(year_text)
        else:
            year = midnight.year
            if month > midnight.month:
                year -= 1
            elif month == midnight.month:
                start = _ts(midnight.replace(day=1))
                if start >= now:
                    continue
                return _day_window(start, now, Strategy.calendar)
        start_dt = datetime(year, month, 1, tzinfo=timezone.utc)
        days = _cal.monthrange(year, month)[1]
        start = _ts(start_dt)
        return _day_window(start, start + days * 86400, Strategy.calendar)
    return None


# --------------------------------------------------------------------------
# strategy 5: specific dates

_ISO_DATE_RE = re.compile(r"\b(\d{4})-(\d{1,2})-(\d{1,2})\b")
_SLASH_YMD_RE = re.compile(r"\b(\d{1,2})/(\d{1,2})/(\d{4})\b")
_SLASH_MD_RE = re.compile(r"\b(\d{1,2})/(\d{1,2})\b(?!/)")
_MONTH_DAY_RE = re.compile(
    rf"\b({_MONTH_ALT})\s+(\d{{1,2}})(?:st|nd|rd|th)?\b(?!\d)(?:,?\s+(\d{{4}}))?"
)
_DAY_MONTH_RE = re.compile(
    rf"\b(\d{{1,2}})(?:st|nd|rd|th)?\s+({_MONTH_ALT})\b(?:,?\s+(\d{{4}}))?"
)


def _valid_date(year: int, month: int, day: int) -> datetime | None:
    try:
        return datetime(year, month, day, tzinfo=timezone.utc)
    except ValueError:
        return None


def _prefer_past(month: int, day: int, now: int) -> datetime | None:
    today = _midnight(now)
    date = _valid_date(today.year, month, day)
    if date is None:
        return None
    if _ts(date) > now:
        date = _valid_date(today.year - 1, month, day)
    return date


def _try_specific_date(q: str, now: int, _day_bounds: bool) -> TimeRangeInfo | None:
    date: datetime | None = None
    m = _ISO_DATE_RE.search(q)
    if m:
        date = _valid_date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    if date is None:
        m = _SLASH_YMD_RE.search(q)
        if m:
            date = _valid_date(int(m.group(3)), int(m.group(1)), int(m.group(2)))
    if date is None:
        m = _SLASH_MD_RE.search(q)
        if m:
            date = _prefer_past(int(m.group(1)), int(m.group(2)), now)
    if date is None:
        m = _MONTH_DAY_RE.search(q)
        if m:
            month, day = _MONTHS[m.group(1)], int(m.group(2))
            if m.group(3):
                date = _valid_date(int(m.group(3)), month, day)
            else:
                date = _prefer_past(month, day, now)
    if date is None:
        m = _DAY_MONTH_RE.search(q)
        if m:
            month, day = _MONTHS[m.group(2)], int(m.group(1))
            if m.group(3):
                date = _valid_date(int(m.group(3)), month, day)
            else:
                date = _prefer_past(month, day, now)
    if date is None:
        return None
    start = _ts(date)
    return _mk(start, start + 86400, "[1d]", Strategy.specific_date)


# --------------------------------------------------------------------------

_RESOLVERS = (_try_shorthand, _try_nl_duration, _try_calendar, _try_specific_date)


def resolve_time(
    question: str,
    *,
    now: int,
    explicit: tuple[int, int] | None = None,
    default_window: int = 3600,
    calendar_day_boundaries: bool = False,
) -> TimeRangeInfo:
    """Resolve a question to a concrete time window.

    Args:
        question: the raw question text; may be empty.
        now: reference timestamp (unix seconds, UTC).
        explicit: optional (start, end) override that wins over any text.
        default_window: fallback window in seconds when nothing matches.
        calendar_day_boundaries: when set, "yesterday" snaps to midnight
            boundaries instead of the trailing 24 hours.

    Raises:
        ValueError: explicit start at or after end, or a non-positive
            default window.
    """
    if explicit is not None:
        start, end = int(explicit[0]), int(explicit[1])
        if start >= end:
            raise ValueError(f"explicit range is empty: start={start} end={end}")
        return _mk(start, end, rate_syntax_for(end - start), Strategy.explicit)
    now = int(now)
    q = " ".join(question.lower().split())
    for resolver in _RESOLVERS:
        info = resolver(q, now, calendar_day_boundaries)
        if info is not None:
            return info
    if default_window <= 0:
        raise ValueError(f"non-positive default window {default_window}")
    return _mk(now - default_window, now, rate_syntax_for(default_window), Strategy.default)

"""PromQL generation from (metric, intent, time range) plus syntactic repair.

Queries come from a fixed template grid keyed by (intent, metric type).
Histogram cells reference the ``_bucket`` child series and aggregate
``by (le)`` before ``histogram_quantile``; counter cells wrap the metric in
``rate()`` with the resolved range. Comparison cells aggregate by a label
inferred from the question's domain terms (models -> ``model_name``, pods ->
``pod``, nodes -> ``node``, otherwise ``instance``).

Every generated string then passes through :func:`repair`, which applies
four fixes in a fixed order: drop trailing commas inside label selectors,
balance parentheses and brackets by appending or removing closers at the
end of the expression, insert the range selector into ``rate``/``irate``/
``increase`` calls that lack one, and wrap a bare top-level range vector in
``rate()``. Repair is idempotent; input it cannot fix raises
:class:`~nl2promql.errors.RepairError` carrying the original string.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .catalog import MetricEntry, MetricType
from .errors import RepairError
from .intent import IntentResult, IntentType
from .temporal import TimeRangeInfo

__all__ = [
    "Repair",
    "GeneratedQuery",
    "infer_by_label",
    "generate",
    "repair",
    "check_promql",
    "TEMPLATES",
]


class Repair(str, Enum):
    trailing_comma = "trailing_comma"
    paren_balance = "paren_balance"
    missing_range = "missing_range"
    bare_range_wrapped = "bare_range_wrapped"


@dataclass(frozen=True)
class GeneratedQuery:
    query: str
    metric: str
    template_id: str
    repairs: tuple[Repair, ...]
    by_label: str | None


# Placeholders: {m} metric name, {r} range selector, {q} quantile,
# {n} top-k count, {l} aggregation label.
TEMPLATES: dict[tuple[IntentType, MetricType], str] = {
    (IntentType.current_value, MetricType.counter): "rate({m}{r})",
    (IntentType.current_value, MetricType.gauge): "{m}",
    (IntentType.current_value, MetricType.histogram):
        "histogram_quantile({q}, sum(rate({m}_bucket{r})) by (le))",
    (IntentType.current_value, MetricType.summary): "{m}",
    (IntentType.count, MetricType.counter): "count({m})",
    (IntentType.count, MetricType.gauge): "count({m})",
    (IntentType.count, MetricType.histogram): "count({m}_count)",
    (IntentType.count, MetricType.summary): "count({m}_count)",
    (IntentType.average, MetricType.counter): "avg(rate({m}{r}))",
    (IntentType.average, MetricType.gauge): "avg({m})",
    (IntentType.average, MetricType.histogram): "rate({m}_sum{r}) / rate({m}_count{r})",
    (IntentType.average, MetricType.summary): "rate({m}_sum{r}) / rate({m}_count{r})",
    (IntentType.percentile, MetricType.counter): "quantile({q}, rate({m}{r}))",
    (IntentType.percentile, MetricType.gauge): "quantile({q}, {m})",
    (IntentType.percentile, MetricType.histogram):
        "histogram_quantile({q}, sum(rate({m}_bucket{r})) by (le))",
    (IntentType.percentile, MetricType.summary): '{m}{{quantile="{q}"}}',
    (IntentType.top_n, MetricType.counter): "topk({n}, rate({m}{r}))",
    (IntentType.top_n, MetricType.gauge): "topk({n}, {m})",
    (IntentType.top_n, MetricType.histogram): "topk({n}, {m})",
    (IntentType.top_n, MetricType.summary): "topk({n}, {m})",
    (IntentType.comparison, MetricType.counter): "sum by ({l})(rate({m}{r}))",
    (IntentType.comparison, MetricType.gauge): "avg by ({l})({m})",
    (IntentType.comparison, MetricType.histogram):
        "histogram_quantile({q}, sum by ({l}, le)(rate({m}_bucket{r})))",
    (IntentType.comparison, MetricType.summary): "avg by ({l})({m})",
    (IntentType.trend, MetricType.counter): "rate({m}{r})",
    (IntentType.trend, MetricType.gauge): "avg_over_time({m}{r})",
    (IntentType.trend, MetricType.histogram): "{m}",
    (IntentType.trend, MetricType.summary): "avg_over_time({m}{r})",
    (IntentType.rate, MetricType.counter): "sum(rate({m}{r}))",
    (IntentType.rate, MetricType.gauge): "rate({m}{r})",
    (IntentType.rate, MetricType.histogram):
        "histogram_quantile({q}, sum(rate({m}_bucket{r})) by (le))",
    (IntentType.rate, MetricType.summary): "sum(rate({m}_count{r}))",
}

_P99_TRIGGERS = {"p99", "99th"}
_P90_TRIGGERS = {"p90"}
_P50_TRIGGERS = {"p50"}
_TOP_N_RE = re.compile(r"\btop\s+(\d+)\b")


def infer_by_label(intent: IntentResult, metric: MetricEntry) -> str:
    """Aggregation label for comparison and top-n shapes, from domain terms."""
    if "model" in intent.domain_terms:
        return "model_name"
    if "pod" in intent.domain_terms:
        return "pod"
    if "node" in intent.domain_terms:
        return "node"
    return "instance"


def _quantile_for(intent: IntentResult) -> str:
    matched = set(intent.matched_triggers)
    if matched & _P99_TRIGGERS:
        return "0.99"
    if matched & _P90_TRIGGERS:
        return "0.90"
    if matched & _P50_TRIGGERS:
        return "0.50"
    return "0.95"


def _top_n_for(intent: IntentResult) -> int:
    for trigger in intent.matched_triggers:
        m = _TOP_N_RE.match(trigger)
        if m:
            return int(m.group(1))
    return 5


def generate(metric: MetricEntry, intent: IntentResult, time: TimeRangeInfo) -> GeneratedQuery:
    """Render the template for this (intent, metric type) cell and repair it."""
    template = TEMPLATES[(intent.intent, metric.metric_type)]
    by_label = None
    if intent.intent in (IntentType.comparison, IntentType.top_n):
        by_label = infer_by_label(intent, metric)
    query = template.format(
        m=metric.name,
        r=time.rate_syntax,
        q=_quantile_for(intent),
        n=_top_n_for(intent),
        l=by_label or "instance",
    )
    repaired, applied = repair(query, time)
    return GeneratedQuery(
        query=repaired,
        metric=metric.name,
        template_id=f"{intent.intent.value}_{metric.metric_type.value}",
        repairs=tuple(applied),
        by_label=by_label,
    )


# --------------------------------------------------------------------------
# repair pass

_PAIR_OF = {")": "(", "]": "[", "}": "{"}
_CLOSER_OF = {"(": ")", "[": "]", "{": "}"}
_TRAILING_COMMA_RE = re.compile(r",\s*}")
_CLOSER_TAIL_RE = re.compile(r"[)\]}\s]*\Z")

#: Functions that take a range vector; every call needs a [window].
_RANGE_FUNCS = frozenset(
    {
        "rate", "irate", "increase", "delta", "idelta", "deriv",
        "predict_linear", "changes", "resets", "absent_over_time",
        "avg_over_time", "min_over_time", "max_over_time", "sum_over_time",
        "count_over_time", "quantile_over_time", "stddev_over_time",
        "stdvar_over_time", "last_over_time", "present_over_time",
    }
)
_RANGE_CALL_RE = re.compile(r"\b(" + "|".join(sorted(_RANGE_FUNCS)) + r")\s*\(")
_BARE_RANGE_RE = re.compile(
    r"^[A-Za-z_:][A-Za-z0-9_:]*(?:\{[^{}]*\})?\s*\[\d+[smhdw]\]$"
)


def _scan_delimiters(query: str) -> tuple[list[str], list[int], bool]:
    """Quote-aware delimiter scan.

    Returns the stack of unclosed openers, positions of unmatched closers,
    and whether the string ends inside a quoted literal.
    """
    stack: list[str] = []
    unmatched: list[int] = []
    in_str = False
    escape = False
    for i, ch in enumerate(query):
        if in_str:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_str = False
            continue
        if ch == '"':
            in_str = True
        elif ch in "([{":
            stack.append(ch)
        elif ch in ")]}":
            if stack and stack[-1] == _PAIR_OF[ch]:
                stack.pop()
            else:
                unmatched.append(i)
    return stack, unmatched, in_str


def _repair_balance(query: str, original: str) -> tuple[str, bool]:
    stack, unmatched, in_str = _scan_delimiters(query)
    if in_str:
        raise RepairError("unterminated string literal", original)
    changed = False
    if unmatched:
        # Extra closers are only fixable when they sit in the trailing run
        # of the expression; an orphan closer mid-string is irreparable.
        if not _CLOSER_TAIL_RE.fullmatch(query, unmatched[0]):
            raise RepairError("unmatched closing delimiter mid-expression", original)
        chars = list(query)
        for pos in reversed(unmatched):
            del chars[pos]
        query = "".join(chars).rstrip()
        changed = True
        stack, unmatched, _ = _scan_delimiters(query)
        if unmatched:
            raise RepairError("unmatched closing delimiter mid-expression", original)
    if stack:
        query = query + "".join(_CLOSER_OF[ch] for ch in reversed(stack))
        changed = True
    return query, changed


def _matching_paren(query: str, open_pos: int) -> int | None:
    depth = 0
    in_str = False
    escape = False
    for i in range(open_pos, len(query)):
        ch = query[i]
        if in_str:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_str = False
            continue
        if ch == '"':
            in_str = True
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return i
    return None


def _span_has_range_bracket(query: str, start: int, end: int) -> bool:
    in_str = False
    escape = False
    for i in range(start, end):
        ch = query[i]
        if in_str:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_str = False
            continue
        if ch == '"':
            in_str = True
        elif ch == "[":
            return True
    return False


def _insert_missing_ranges(query: str, rate_syntax: str) -> tuple[str, bool]:
    insert_at: list[int] = []
    for m in _RANGE_CALL_RE.finditer(query):
        open_pos = m.end() - 1
        close_pos = _matching_paren(query, open_pos)
        if close_pos is None:
            continue
        if not _span_has_range_bracket(query, open_pos + 1, close_pos):
            insert_at.append(close_pos)
    for pos in sorted(insert_at, reverse=True):
        query = query[:pos] + rate_syntax + query[pos:]
    return query, bool(insert_at)


def repair(query: str, time: TimeRangeInfo) -> tuple[str, list[Repair]]:
    """Apply the four syntactic fixes in order; report which ones fired.

    Raises:
        RepairError: for damage that end-of-string edits cannot fix, with
            the untouched input available on ``original``.
    """
    original = query
    applied: list[Repair] = []

    fixed = _TRAILING_COMMA_RE.sub("}", query)
    while fixed != query:
        query = fixed
        fixed = _TRAILING_COMMA_RE.sub("}", query)
    if query != original:
        applied.append(Repair.trailing_comma)

    query, changed = _repair_balance(query, original)
    if changed:
        applied.append(Repair.paren_balance)

    query, changed = _insert_missing_ranges(query, time.rate_syntax)
    if changed:
        applied.append(Repair.missing_range)

    if _BARE_RANGE_RE.match(query):
        query = f"rate({query})"
        applied.append(Repair.bare_range_wrapped)

    return query, applied


# --------------------------------------------------------------------------
# well-formedness check

_QUANTILE_CALL_RE = re.compile(
    r"\b(?:histogram_quantile|quantile|quantile_over_time)\(\s*(-?\d+(?:\.\d+)?)"
)
_IDENT_TAIL_RE = re.compile(r"([A-Za-z_:][A-Za-z0-9_:]*)\s*\Z")


def check_promql(query: str) -> list[str]:
    """Cheap structural checks on a PromQL string; empty list means clean.

    Checks: balanced delimiters, no trailing commas in label selectors,
    range selectors only inside range-vector functions, and quantile
    arguments strictly between 0 and 1.
    """
    issues: list[str] = []
    stack, unmatched, in_str = _scan_delimiters(query)
    if in_str:
        issues.append("unterminated string literal")
    if stack or unmatched:
        issues.append("unbalanced delimiters")
    if _TRAILING_COMMA_RE.search(query):
        issues.append("trailing comma in label selector")

    # Walk the expression tracking which function call each position is in.
    # Each frame is [function name or None, saw a range selector inside].
    call_stack: list[list] = []
    in_str = False
    escape = False
    for i, ch in enumerate(query):
        if in_str:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_str = False
            continue
        if ch == '"':
            in_str = True
        elif ch == "(":
            m = _IDENT_TAIL_RE.search(query[:i])
            call_stack.append([m.group(1) if m else None, False])
        elif ch == ")":
            if call_stack:
                name, saw_range = call_stack.pop()
                if name in _RANGE_FUNCS and not saw_range:
                    issues.append(f"{name}() without a range selector")
        elif ch == "[":
            enclosing = next((f[0] for f in reversed(call_stack) if f[0]), None)
            if enclosing not in _RANGE_FUNCS:
                issues.append("range selector outside a range-vector function")
            for frame in call_stack:
                frame[1] = True
    for name, saw_range in call_stack:
        if name in _RANGE_FUNCS and not saw_range:
            issues.append(f"{name}() without a range selector")

    for m in _QUANTILE_CALL_RE.finditer(query):
        value = float(m.group(1))
        if not 0 < value < 1:
            issues.append(f"quantile argument {m.group(1)} outside (0, 1)")
    return issues

"""Pattern matching over per-case event sets.

A pattern denotes a set of segments of a case's timeline:

* an identifier (or ANY) denotes the single-event segments whose event
  matches it;
* ``A ~> B`` spans from the start of an A-segment to the end of a strictly
  later-starting B-segment; ``A -> B`` additionally requires that no event
  lies strictly between the end of A and the start of B. Both operands must
  be witnessed by nonempty segments;
* ``A*`` denotes the empty segment plus every contiguous concatenation of
  one or more A-segments;
* ``START (A)`` / ``(A) END`` keep only the A-segments that begin at the
  case's first event / end at its last event.

``satisfying_segments`` computes the set bottom-up. The brute-force oracle
re-derives it top-down by testing every candidate segment against the
definition clauses; the two share nothing but the AST and segment types.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    AnyEvent,
    AttrEqAttr,
    AttrEqConst,
    BehaviourDef,
    BehaviourMatch,
    BehaviourRef,
    DirectlyFollows,
    End,
    Follows,
    Identifier,
    IdentifierExpr,
    Literal,
    NotExpr,
    OrExpr,
    PatternFormula,
    SimpleMatch,
    Star,
    Start,
)
from .errors import OracleBoundExceeded, UnboundBehaviourName, UnknownAttribute
from .eventlog import (
    EMPTY_SEGMENT,
    Event,
    EventLog,
    EventSet,
    Segment,
    enumerate_segments,
    event_sets,
)

DEFAULT_ORACLE_BOUND = 12


@dataclass(frozen=True)
class CompiledPattern:
    """A pattern bound to its evaluation mode: a single attribute for plain
    matches, or a list of named behaviour predicates."""

    formula: PatternFormula
    attribute: str | None = None
    behaviours: tuple[BehaviourDef, ...] = ()

    @property
    def is_simple(self) -> bool:
        return self.attribute is not None

    def behaviour(self, name: str) -> BehaviourDef:
        for d in self.behaviours:
            if d.name == name:
                return d
        raise UnboundBehaviourName(f"behaviour name {name!r} is not defined")


def _identifier_leaves(formula: PatternFormula):
    stack: list[PatternFormula | IdentifierExpr] = [formula]
    while stack:
        node = stack.pop()
        if isinstance(node, Identifier):
            stack.append(node.expr)
        elif isinstance(node, (Follows, DirectlyFollows)):
            stack.extend((node.left, node.right))
        elif isinstance(node, (Star, Start, End)):
            stack.append(node.inner)
        elif isinstance(node, (OrExpr,)):
            stack.extend((node.left, node.right))
        elif isinstance(node, NotExpr):
            stack.append(node.inner)
        elif isinstance(node, (Literal, BehaviourRef)):
            yield node


def compile_pattern(condition: SimpleMatch | BehaviourMatch, schema: tuple[str, ...]) -> CompiledPattern:
    """Bind a MATCHES condition against the log schema.

    Raises UnknownAttribute for attribute names outside the schema and
    UnboundBehaviourName for identifiers with no matching behaviour.
    """
    if isinstance(condition, SimpleMatch):
        if condition.attribute not in schema:
            raise UnknownAttribute(
                f"attribute {condition.attribute!r} is not in the schema {list(schema)}"
            )
        for leaf in _identifier_leaves(condition.pattern):
            if isinstance(leaf, BehaviourRef):
                raise UnboundBehaviourName(
                    f"behaviour name {leaf.name!r} used outside a BEHAVIOUR match"
                )
        return CompiledPattern(formula=condition.pattern, attribute=condition.attribute)

    names = [d.name for d in condition.behaviours]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate behaviour names in {names}")
    for d in condition.behaviours:
        for conj in d.conjuncts:
            attrs = (conj.left, conj.right) if isinstance(conj, AttrEqAttr) else (conj.attr,)
            for attr in attrs:
                if attr not in schema:
                    raise UnknownAttribute(
                        f"attribute {attr!r} (behaviour {d.name!r}) is not in the schema {list(schema)}"
                    )
    for leaf in _identifier_leaves(condition.pattern):
        if isinstance(leaf, Literal):
            raise UnboundBehaviourName(
                f"literal {leaf.value!r} in a BEHAVIOUR pattern; identifiers must be behaviour names"
            )
        if leaf.name not in names:
            raise UnboundBehaviourName(f"behaviour name {leaf.name!r} is not defined")
    return CompiledPattern(formula=condition.pattern, behaviours=condition.behaviours)


def _attr_value(event: Event, name: str) -> str | None:
    try:
        return event.value(name)
    except KeyError:
        raise UnknownAttribute(f"attribute {name!r} is not carried by event {event.eid!r}") from None


def _behaviour_holds(conjuncts: tuple[AttrEqAttr | AttrEqConst, ...], event: Event) -> bool:
    for conj in conjuncts:
        if isinstance(conj, AttrEqConst):
            value = _attr_value(event, conj.attr)
            if value is None or value != str(conj.value):
                return False
        else:
            left = _attr_value(event, conj.left)
            right = _attr_value(event, conj.right)
            if left is None or right is None or left != right:
                return False
    return True


def event_matches_identifier(expr: IdentifierExpr, event: Event, pattern: CompiledPattern) -> bool:
    """Does a single event match the identifier expression? A null attribute
    matches no literal, so it does match the literal's negation."""
    if isinstance(expr, Literal):
        if pattern.attribute is None:
            raise UnboundBehaviourName(
                f"literal {expr.value!r} in a BEHAVIOUR pattern; identifiers must be behaviour names"
            )
        return _attr_value(event, pattern.attribute) == expr.value
    if isinstance(expr, BehaviourRef):
        return _behaviour_holds(pattern.behaviour(expr.name).conjuncts, event)
    if isinstance(expr, OrExpr):
        return event_matches_identifier(expr.left, event, pattern) or event_matches_identifier(
            expr.right, event, pattern
        )
    if isinstance(expr, NotExpr):
        return not event_matches_identifier(expr.inner, event, pattern)
    raise TypeError(f"not an identifier expression: {expr!r}")


@dataclass(frozen=True)
class MatchResult:
    """The satisfying segments of one pattern over one event set."""

    segments: frozenset[Segment]

    @property
    def satisfied(self) -> bool:
        return bool(self.segments)

    def ordered(self) -> list[Segment]:
        """Segments by (span, start); the empty segment sorts first."""
        return sorted(self.segments, key=Segment.sort_key)


class _Generator:
    """Bottom-up segment-set evaluation, memoised per formula node."""

    def __init__(self, pattern: CompiledPattern, es: EventSet):
        self.pattern = pattern
        self.es = es
        self.memo: dict[PatternFormula, frozenset[Segment]] = {}

    def eval(self, node: PatternFormula) -> frozenset[Segment]:
        cached = self.memo.get(node)
        if cached is not None:
            return cached
        result = self._eval(node)
        self.memo[node] = result
        return result

    def _eval(self, node: PatternFormula) -> frozenset[Segment]:
        if isinstance(node, Identifier):
            return frozenset(
                Segment.interval(ev.ts, ev.ts)
                for ev in self.es.events
                if event_matches_identifier(node.expr, ev, self.pattern)
            )
        if isinstance(node, AnyEvent):
            return frozenset(Segment.interval(ts, ts) for ts in self.es.timestamps)
        if isinstance(node, Follows):
            return self._combine(self.eval(node.left), self.eval(node.right), contiguous=False)
        if isinstance(node, DirectlyFollows):
            return self._combine(self.eval(node.left), self.eval(node.right), contiguous=True)
        if isinstance(node, Star):
            return self._star(self.eval(node.inner))
        if isinstance(node, Start):
            if not self.es.events:
                return frozenset()
            first = self.es.timestamps[0]
            return frozenset(s for s in self.eval(node.inner) if not s.is_empty and s.start == first)
        if isinstance(node, End):
            if not self.es.events:
                return frozenset()
            last = self.es.timestamps[-1]
            return frozenset(s for s in self.eval(node.inner) if not s.is_empty and s.end == last)
        raise TypeError(f"not a pattern formula: {node!r}")

    def _combine(
        self, lefts: frozenset[Segment], rights: frozenset[Segment], contiguous: bool
    ) -> frozenset[Segment]:
        # Composition needs nonempty witnesses on both sides; a star operand
        # contributes only its nonempty members.
        out = set()
        for a in lefts:
            if a.is_empty:
                continue
            for b in rights:
                if b.is_empty or a.end >= b.start:
                    continue
                if contiguous and self.es.successor(a.end) != b.start:
                    continue
                out.add(Segment.interval(a.start, b.end))
        return frozenset(out)

    def _star(self, inner: frozenset[Segment]) -> frozenset[Segment]:
        base = [s for s in inner if not s.is_empty]
        result: set[Segment] = set(base)
        frontier = list(base)
        while frontier:
            fresh = []
            for right in frontier:
                for left in base:
                    if left.end < right.start and self.es.successor(left.end) == right.start:
                        joined = Segment.interval(left.start, right.end)
                        if joined not in result:
                            result.add(joined)
                            fresh.append(joined)
            frontier = fresh
        result.add(EMPTY_SEGMENT)
        return frozenset(result)


def satisfying_segments(pattern: CompiledPattern, es: EventSet) -> MatchResult:
    """All segments of the case satisfying the pattern."""
    return MatchResult(_Generator(pattern, es).eval(pattern.formula))


def case_satisfies(pattern: CompiledPattern, es: EventSet) -> bool:
    return satisfying_segments(pattern, es).satisfied


def pattern_select(pattern: CompiledPattern, log: EventLog) -> EventLog:
    """Keep exactly the events of cases with at least one satisfying segment.

    The output is case-closed (a case's events survive together or not at
    all) and the operator is idempotent.
    """
    surviving = {es.cid for es in event_sets(log) if case_satisfies(pattern, es)}
    return EventLog(schema=log.schema, events=tuple(e for e in log.events if e.cid in surviving))


# --- brute-force oracle ------------------------------------------------------

def _oracle_identifier(expr: IdentifierExpr, event: Event, pattern: CompiledPattern) -> bool:
    # Deliberately re-derived rather than delegating to the engine's matcher.
    if isinstance(expr, Literal):
        if pattern.attribute is None:
            raise UnboundBehaviourName(f"literal {expr.value!r} in a BEHAVIOUR pattern")
        return _attr_value(event, pattern.attribute) == expr.value
    if isinstance(expr, BehaviourRef):
        defn = pattern.behaviour(expr.name)
        for conj in defn.conjuncts:
            if isinstance(conj, AttrEqConst):
                if _attr_value(event, conj.attr) != str(conj.value):
                    return False
            else:
                left, right = _attr_value(event, conj.left), _attr_value(event, conj.right)
                if left is None or left != right:
                    return False
        return True
    if isinstance(expr, OrExpr):
        return _oracle_identifier(expr.left, event, pattern) or _oracle_identifier(
            expr.right, event, pattern
        )
    if isinstance(expr, NotExpr):
        return not _oracle_identifier(expr.inner, event, pattern)
    raise TypeError(f"not an identifier expression: {expr!r}")


class _Oracle:
    def __init__(self, pattern: CompiledPattern, es: EventSet):
        self.pattern = pattern
        self.es = es
        self.memo: dict[tuple[PatternFormula, Segment], bool] = {}

    def span(self, seg: Segment) -> list[int]:
        return [t for t in self.es.timestamps if seg.start <= t <= seg.end]  # type: ignore[operator]

    def satisfies(self, seg: Segment, node: PatternFormula) -> bool:
        key = (node, seg)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        result = self._satisfies(seg, node)
        self.memo[key] = result
        return result

    def _satisfies(self, seg: Segment, node: PatternFormula) -> bool:
        if seg.is_empty:
            return isinstance(node, Star)
        if isinstance(node, Identifier):
            return seg.start == seg.end and _oracle_identifier(
                node.expr, self.es.event_at(seg.start), self.pattern  # type: ignore[arg-type]
            )
        if isinstance(node, AnyEvent):
            return seg.start == seg.end
        if isinstance(node, Start):
            return seg.start == self.es.timestamps[0] and self.satisfies(seg, node.inner)
        if isinstance(node, End):
            return seg.end == self.es.timestamps[-1] and self.satisfies(seg, node.inner)
        if isinstance(node, Follows):
            inside = self.span(seg)
            for ta in inside:
                if not self.satisfies(Segment.interval(seg.start, ta), node.left):  # type: ignore[arg-type]
                    continue
                for tb in inside:
                    if tb > ta and self.satisfies(Segment.interval(tb, seg.end), node.right):  # type: ignore[arg-type]
                        return True
            return False
        if isinstance(node, DirectlyFollows):
            for ta in self.span(seg):
                if ta == seg.end:
                    continue
                tb = self.es.successor(ta)
                if tb is None or tb > seg.end:  # type: ignore[operator]
                    continue
                if self.satisfies(Segment.interval(seg.start, ta), node.left) and self.satisfies(  # type: ignore[arg-type]
                    Segment.interval(tb, seg.end), node.right  # type: ignore[arg-type]
                ):
                    return True
            return False
        if isinstance(node, Star):
            for ta in self.span(seg):
                if not self.satisfies(Segment.interval(seg.start, ta), node.inner):  # type: ignore[arg-type]
                    continue
                if ta == seg.end:
                    return True
                rest = Segment.interval(self.es.successor(ta), seg.end)  # type: ignore[arg-type]
                if self.satisfies(rest, node):
                    return True
            return False
        raise TypeError(f"not a pattern formula: {node!r}")


def oracle_satisfying_segments(
    pattern: CompiledPattern, es: EventSet, bound: int = DEFAULT_ORACLE_BOUND
) -> MatchResult:
    """Exhaustive re-computation of satisfying_segments for small cases.

    Checks every candidate segment (empty included) against the satisfaction
    clauses by trying all sub-segment splits. Refuses event sets larger than
    ``bound``.
    """
    if len(es) > bound:
        raise OracleBoundExceeded(f"event set has {len(es)} events, oracle bound is {bound}")
    oracle = _Oracle(pattern, es)
    candidates = [EMPTY_SEGMENT, *enumerate_segments(es)]
    return MatchResult(frozenset(s for s in candidates if oracle.satisfies(s, pattern.formula)))

import random

import pytest

from sccq.ast import (
    AnyEvent,
    AttrEqAttr,
    AttrEqConst,
    BehaviourDef,
    BehaviourMatch,
    BehaviourRef,
    DirectlyFollows,
    Identifier,
    Literal,
    NotExpr,
    OrExpr,
    SimpleMatch,
    Star,
    matches_empty,
)
from sccq.errors import OracleBoundExceeded, UnboundBehaviourName, UnknownAttribute
from sccq.eventlog import EMPTY_SEGMENT, Event, EventLog, Segment, cases, event_sets
from sccq.gen import random_event_log, random_pattern
from sccq.matcher import (
    compile_pattern,
    case_satisfies,
    event_matches_identifier,
    oracle_satisfying_segments,
    pattern_select,
    satisfying_segments,
)
from sccq.parser import parse_pattern


def simple(text, attribute="event_name", schema=("event_name",)):
    return compile_pattern(SimpleMatch(attribute, parse_pattern(text)), schema)


def segs(pattern, es):
    return {str(s) for s in satisfying_segments(pattern, es).segments}


def test_four_event_fixture_sets(four_event_log):
    es = event_sets(four_event_log)[0]
    assert segs(simple("'e2' ~> 'e4'"), es) == {"(20,90)"}
    assert segs(simple("ANY ~> 'e4'"), es) == {"(10,90)", "(20,90)", "(30,90)"}
    assert segs(simple("START ('e1' -> 'e2')"), es) == {"(10,20)"}
    assert segs(simple("'e1' -> ('e2' ~> 'e4')*"), es) == {"(10,90)"}
    assert segs(simple("('e2' ~> 'e4')*"), es) == {"empty", "(20,90)"}


def test_minimal_presentation_order(four_event_log):
    es = event_sets(four_event_log)[0]
    result = satisfying_segments(simple("ANY ~> 'e4'"), es)
    assert result.ordered()[0] == Segment.interval(30, 90)


def test_any_and_identifier_are_single_event(four_event_log):
    es = event_sets(four_event_log)[0]
    assert segs(simple("ANY"), es) == {"(10,10)", "(20,20)", "(30,30)", "(90,90)"}
    assert segs(simple("'e3'"), es) == {"(30,30)"}
    assert segs(simple("'zz'"), es) == set()


def test_follows_requires_strictly_later_start(four_event_log):
    es = event_sets(four_event_log)[0]
    # same event cannot be both endpoints
    assert segs(simple("'e2' ~> 'e2'"), es) == set()
    assert segs(simple("ANY ~> ANY"), es) == {
        "(10,20)", "(10,30)", "(10,90)", "(20,30)", "(20,90)", "(30,90)",
    }


def test_directly_follows_contiguity(four_event_log):
    es = event_sets(four_event_log)[0]
    assert segs(simple("'e1' -> 'e2'"), es) == {"(10,20)"}
    assert segs(simple("'e1' -> 'e3'"), es) == set()  # e2 lies between
    assert segs(simple("'e3' -> 'e4'"), es) == {"(30,90)"}  # gaps in time are fine


def test_star_contiguous_concatenation():
    log = EventLog(
        ("event_name",),
        tuple(Event(f"e{i}", "c", i * 10, (("event_name", v),)) for i, v in enumerate("ababa", 1)),
    )
    es = event_sets(log)[0]
    # 'a' at 10,30,50; 'b' at 20,40
    one = simple("('a' -> 'b')*")
    assert segs(one, es) == {"empty", "(10,20)", "(30,40)", "(10,40)"}
    assert segs(simple("'a'*"), es) == {"empty", "(10,10)", "(30,30)", "(50,50)"}


def test_star_composition_needs_nonempty_witnesses(four_event_log):
    es = event_sets(four_event_log)[0]
    # the star alone matches the empty segment, but as a composition operand
    # it must contribute a nonempty stretch
    assert segs(simple("'e1' -> 'zz'*"), es) == set()
    assert segs(simple("'zz'* ~> 'e4'"), es) == set()


def test_start_end_filters(four_event_log):
    es = event_sets(four_event_log)[0]
    assert segs(simple("START (ANY)"), es) == {"(10,10)"}
    assert segs(simple("ANY END"), es) == {"(90,90)"}
    assert segs(simple("START (ANY ~> ANY) END"), es) == {"(10,90)"}
    # the empty segment never passes an endpoint filter
    assert segs(simple("START ('zz'*)"), es) == set()
    assert segs(simple("'zz'* END"), es) == set()


def test_matches_empty_only_for_star():
    assert matches_empty(Star(Identifier(Literal("a"))))
    assert not matches_empty(parse_pattern("'a' ~> 'b'*"))
    assert not matches_empty(parse_pattern("START ('a'*)"))


def test_identifier_or_not_semantics(four_event_log):
    es = event_sets(four_event_log)[0]
    assert segs(simple("'e1' OR 'e4'"), es) == {"(10,10)", "(90,90)"}
    assert segs(simple("NOT ('e1')"), es) == {"(20,20)", "(30,30)", "(90,90)"}
    assert segs(simple("NOT (NOT ('e1'))"), es) == {"(10,10)"}
    assert segs(simple("NOT ('e1' OR 'e4')"), es) == {"(20,20)", "(30,30)"}


def test_null_attribute_matches_negation_only():
    log = EventLog(("a",), (Event("e1", "c", 1, (("a", None),)),))
    pattern = compile_pattern(SimpleMatch("a", parse_pattern("'x'")), ("a",))
    ev = log.events[0]
    assert not event_matches_identifier(Literal("x"), ev, pattern)
    assert event_matches_identifier(NotExpr(Literal("x")), ev, pattern)


def test_behaviour_patterns(quotes_log):
    cond = BehaviourMatch(
        (BehaviourDef("w", (AttrEqConst("status", "WIP"),)),),
        DirectlyFollows(Identifier(BehaviourRef("w")), Identifier(BehaviourRef("w"))),
    )
    compiled = compile_pattern(cond, quotes_log.schema)
    by_cid = {es.cid: es for es in event_sets(quotes_log)}
    assert segs(compiled, by_cid["0001"]) == {"(1675160180724,1675220315296)"}
    assert segs(compiled, by_cid["0002"]) == {"(1675213914098,1675282027657)"}


def test_behaviour_conjunction_and_attr_eq_attr():
    log = EventLog(
        ("a", "b"),
        (
            Event("e1", "c", 1, (("a", "x"), ("b", "x"))),
            Event("e2", "c", 2, (("a", "x"), ("b", "y"))),
            Event("e3", "c", 3, (("a", None), ("b", None))),
        ),
    )
    cond = BehaviourMatch(
        (BehaviourDef("same", (AttrEqAttr("a", "b"),)),),
        Identifier(BehaviourRef("same")),
    )
    compiled = compile_pattern(cond, log.schema)
    # null = null is not a match
    assert segs(compiled, event_sets(log)[0]) == {"(1,1)"}


def test_compile_errors(quotes_log):
    with pytest.raises(UnknownAttribute, match="nope"):
        compile_pattern(SimpleMatch("nope", parse_pattern("ANY")), quotes_log.schema)
    with pytest.raises(UnboundBehaviourName, match="outside a BEHAVIOUR"):
        compile_pattern(
            SimpleMatch("event_name", Identifier(BehaviourRef("p"))), quotes_log.schema
        )
    with pytest.raises(UnboundBehaviourName, match="must be behaviour names"):
        compile_pattern(
            BehaviourMatch(
                (BehaviourDef("p", (AttrEqConst("status", "NEW"),)),),
                Identifier(Literal("x")),
            ),
            quotes_log.schema,
        )
    with pytest.raises(UnknownAttribute, match="behaviour 'p'"):
        compile_pattern(
            BehaviourMatch(
                (BehaviourDef("p", (AttrEqConst("nope", "1"),)),),
                Identifier(BehaviourRef("p")),
            ),
            quotes_log.schema,
        )
    with pytest.raises(UnboundBehaviourName, match="'q'"):
        compile_pattern(
            BehaviourMatch(
                (BehaviourDef("p", (AttrEqConst("status", "NEW"),)),),
                Identifier(BehaviourRef("q")),
            ),
            quotes_log.schema,
        )


def test_pattern_select_case_closure(quotes_log):
    selected = pattern_select(simple("'Send quote'", schema=quotes_log.schema), quotes_log)
    assert cases(selected) == frozenset({"0002"})
    assert [e.eid for e in selected.events] == ["e0002", "e0004", "e0006", "e0007"]

    follows = simple("'Review request' ~> 'Send quote'", schema=quotes_log.schema)
    assert [e.eid for e in pattern_select(follows, quotes_log).events] == [
        "e0002", "e0004", "e0006", "e0007",
    ]

    everything = pattern_select(simple("ANY", schema=quotes_log.schema), quotes_log)
    assert len(everything.events) == 7

    nothing = pattern_select(simple("'zz'", schema=quotes_log.schema), quotes_log)
    assert nothing.events == ()


def test_pattern_select_star_keeps_all_cases(quotes_log):
    # a star pattern is satisfied by the empty segment, hence by every case
    selected = pattern_select(simple("'zz'*", schema=quotes_log.schema), quotes_log)
    assert selected == quotes_log


def test_case_satisfies_empty_event_set():
    es = event_sets(EventLog(("a",), ()))
    assert es == []  # no cases at all
    log = EventLog(("a",), (Event("e", "c", 1, (("a", "v"),)),))
    assert case_satisfies(compile_pattern(SimpleMatch("a", Star(Identifier(Literal("q")))), ("a",)),
                          event_sets(log)[0])


def test_oracle_bound():
    log = random_event_log(random.Random(1), cases=1, max_events=5, schema=("event_name",))
    es = event_sets(log)[0]
    pattern = simple("ANY")
    with pytest.raises(OracleBoundExceeded):
        oracle_satisfying_segments(pattern, es, bound=len(es) - 1)
    result = oracle_satisfying_segments(pattern, es, bound=len(es))
    assert result.segments == satisfying_segments(pattern, es).segments


def test_oracle_agrees_on_seeded_batch():
    rng = random.Random(5)
    for _ in range(60):
        log = random_event_log(rng, cases=1, max_events=7, schema=("event_name",), values=("a", "b", "c"))
        pattern = compile_pattern(
            SimpleMatch("event_name", random_pattern(rng, depth=3, values=("a", "b", "c"))),
            log.schema,
        )
        es = event_sets(log)[0]
        assert (
            oracle_satisfying_segments(pattern, es).segments
            == satisfying_segments(pattern, es).segments
        )


def test_match_result_interface(four_event_log):
    es = event_sets(four_event_log)[0]
    result = satisfying_segments(simple("('e2' ~> 'e4')*"), es)
    assert result.satisfied
    assert result.ordered()[0] is EMPTY_SEGMENT
    empty = satisfying_segments(simple("'zz'"), es)
    assert not empty.satisfied and empty.ordered() == []

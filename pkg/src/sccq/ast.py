"""Abstract syntax for queries and temporal patterns.

All nodes are frozen dataclasses, so structural equality and hashing come
for free; the parser round-trip tests rely on that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# --- identifier expressions (the leaf level of patterns) ------------------

@dataclass(frozen=True)
class Literal:
    """A quoted attribute value, e.g. 'Send quote'."""

    value: str


@dataclass(frozen=True)
class BehaviourRef:
    """A name bound by a BEHAVIOUR definition."""

    name: str


@dataclass(frozen=True)
class OrExpr:
    left: "IdentifierExpr"
    right: "IdentifierExpr"


@dataclass(frozen=True)
class NotExpr:
    inner: "IdentifierExpr"


IdentifierExpr = Union[Literal, BehaviourRef, OrExpr, NotExpr]


# --- pattern formulas ------------------------------------------------------

@dataclass(frozen=True)
class Identifier:
    """An identifier expression used as a pattern: matches single events."""

    expr: IdentifierExpr


@dataclass(frozen=True)
class AnyEvent:
    """ANY: matches every single event."""


@dataclass(frozen=True)
class Follows:
    """left ~> right: right eventually follows left."""

    left: "PatternFormula"
    right: "PatternFormula"


@dataclass(frozen=True)
class DirectlyFollows:
    """left -> right: right follows left with no event in between."""

    left: "PatternFormula"
    right: "PatternFormula"


@dataclass(frozen=True)
class Star:
    """inner*: the empty segment or one-or-more contiguous repetitions."""

    inner: "PatternFormula"


@dataclass(frozen=True)
class Start:
    """START (inner): constrains the match to begin at the case's first event."""

    inner: "PatternFormula"


@dataclass(frozen=True)
class End:
    """(inner) END: constrains the match to end at the case's last event."""

    inner: "PatternFormula"


PatternFormula = Union[Identifier, AnyEvent, Follows, DirectlyFollows, Star, Start, End]


def matches_empty(formula: PatternFormula) -> bool:
    """True iff the empty segment satisfies the formula (i.e. it is a star)."""
    return isinstance(formula, Star)


# --- query conditions ------------------------------------------------------

@dataclass(frozen=True)
class AttrEqAttr:
    """column = column"""

    left: str
    right: str


@dataclass(frozen=True)
class AttrEqConst:
    """column = constant; the constant keeps its written form (int or str)."""

    attr: str
    value: str | int


@dataclass(frozen=True)
class SimpleMatch:
    """attribute MATCHES (pattern); the pattern's identifiers are literals."""

    attribute: str
    pattern: PatternFormula


@dataclass(frozen=True)
class BehaviourDef:
    """conjunct AND conjunct ... AS name"""

    name: str
    conjuncts: tuple[AttrEqAttr | AttrEqConst, ...]


@dataclass(frozen=True)
class BehaviourMatch:
    """BEHAVIOUR defs MATCHES (pattern); identifiers are behaviour names."""

    behaviours: tuple[BehaviourDef, ...]
    pattern: PatternFormula


Condition = Union[AttrEqAttr, AttrEqConst, SimpleMatch, BehaviourMatch]


@dataclass(frozen=True)
class Query:
    projection: tuple[str, ...]
    source: str
    conditions: tuple[Condition, ...]

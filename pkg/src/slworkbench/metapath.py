"""Metapath strategies over a selected triple at mixed granularity.

A strategy fixes each of the three slots of its anchor triple at Low (the
concrete entity/relation) or High (the entity's type class, or any
relation). The eight L/H combinations form a granularity lattice whose
counts drive the Modifier view's Primary and Secondary bars; applying a
strategy deletes every matching triple.
"""

from __future__ import annotations

import weakref
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .kg import EntityType, KnowledgeGraph, Triple

ALL_EDGE = "All_edge"

Level = Literal["L", "H"]

# Slot order is source-relation-target throughout.
PATTERNS = (
    "L-L-L",
    "L-L-H",
    "L-H-L",
    "L-H-H",
    "H-L-L",
    "H-L-H",
    "H-H-L",
    "H-H-H",
)

ONE_LOW = ("L-H-H", "H-L-H", "H-H-L")
TWO_LOW = ("L-L-H", "L-H-L", "H-L-L")


def parse_pattern(pattern: str) -> tuple[Level, Level, Level]:
    parts = tuple(pattern.split("-"))
    if len(parts) != 3 or any(p not in ("L", "H") for p in parts):
        raise ValueError(f"bad granularity pattern {pattern!r}")
    return parts  # type: ignore[return-value]


def low_slots(pattern: str) -> tuple[int, ...]:
    return tuple(i for i, lv in enumerate(parse_pattern(pattern)) if lv == "L")


def flip(pattern: str, slot: int, to: Level) -> str:
    parts = list(parse_pattern(pattern))
    parts[slot] = to
    return "-".join(parts)


@dataclass(frozen=True)
class GranularitySlot:
    level: Level
    low_value: str
    high_value: str

    @property
    def value(self) -> str:
        return self.low_value if self.level == "L" else self.high_value


@dataclass(frozen=True)
class MetapathStrategy:
    source: GranularitySlot
    relation: GranularitySlot
    target: GranularitySlot
    anchor: Triple

    @property
    def pattern(self) -> str:
        return "-".join(s.level for s in (self.source, self.relation, self.target))

    def with_pattern(self, pattern: str) -> "MetapathStrategy":
        s, r, t = parse_pattern(pattern)
        return MetapathStrategy(
            GranularitySlot(s, self.source.low_value, self.source.high_value),
            GranularitySlot(r, self.relation.low_value, self.relation.high_value),
            GranularitySlot(t, self.target.low_value, self.target.high_value),
            self.anchor,
        )

    def to_json(self) -> dict:
        return {"anchor": self.anchor.as_dict(), "pattern": self.pattern}


def strategy_from_anchor(
    kg: KnowledgeGraph, anchor: Triple, pattern: str = "L-L-L"
) -> MetapathStrategy:
    """Formulate a strategy from a selected triple.

    High classes are the anchor endpoints' entity types and the universal
    relation class for the middle slot.
    """
    s, r, t = parse_pattern(pattern)
    return MetapathStrategy(
        GranularitySlot(s, anchor.head, kg.etype(anchor.head).value),
        GranularitySlot(r, anchor.relation, ALL_EDGE),
        GranularitySlot(t, anchor.tail, kg.etype(anchor.tail).value),
        anchor,
    )


def strategy_from_json(kg: KnowledgeGraph, payload: dict) -> MetapathStrategy:
    a = payload["anchor"]
    anchor = Triple(a["head"], a["relation"], a["tail"])
    return strategy_from_anchor(kg, anchor, payload["pattern"])


# -- counting indexes ------------------------------------------------------


class MatchIndex:
    """Type/relation aggregate counters for one graph version.

    Gives O(1) lattice counts for the patterns whose endpoints are both
    High; the remaining patterns scan one adjacency list.
    """

    def __init__(self, kg: KnowledgeGraph):
        self.version = kg.version
        self.pair_counts: Counter = Counter()  # (htype, rel, ttype) -> n
        self.type_counts: Counter = Counter()  # (htype, ttype) -> n
        self.by_relation: dict[str, list[Triple]] = defaultdict(list)
        etype = kg.entities
        for t in kg.triples():
            ht = etype[t.head].etype.value
            tt = etype[t.tail].etype.value
            self.pair_counts[(ht, t.relation, tt)] += 1
            self.type_counts[(ht, tt)] += 1
            self.by_relation[t.relation].append(t)


# weak keys: index entries die with their graph, and can never be confused
# across graphs the way a recycled id() would be
_index_cache: "weakref.WeakKeyDictionary[KnowledgeGraph, tuple[int, MatchIndex]]" = (
    weakref.WeakKeyDictionary()
)


def index_for(kg: KnowledgeGraph) -> MatchIndex:
    hit = _index_cache.get(kg)
    if hit is None or hit[0] != kg.version:
        idx = MatchIndex(kg)
        _index_cache[kg] = (kg.version, idx)
        return idx
    return hit[1]


def _slot_filters(kg: KnowledgeGraph, strategy: MetapathStrategy, pattern: str):
    s, r, t = parse_pattern(pattern)
    a = strategy.anchor
    h_type = strategy.source.high_value
    t_type = strategy.target.high_value

    def head_ok(x: str) -> bool:
        return x == a.head if s == "L" else kg.entities[x].etype.value == h_type

    def rel_ok(x: str) -> bool:
        return x == a.relation if r == "L" else True

    def tail_ok(x: str) -> bool:
        return x == a.tail if t == "L" else kg.entities[x].etype.value == t_type

    return head_ok, rel_ok, tail_ok


def matches(
    strategy: MetapathStrategy, kg: KnowledgeGraph, pattern: str | None = None
) -> frozenset[Triple]:
    """Triples matched by the strategy read at the given pattern.

    Low slots pin the anchor's concrete value; High endpoint slots admit any
    entity of the anchor endpoint's type; a High relation slot admits any
    relation.
    """
    pattern = pattern or strategy.pattern
    s, r, t = parse_pattern(pattern)
    head_ok, rel_ok, tail_ok = _slot_filters(kg, strategy, pattern)
    a = strategy.anchor
    if s == "L":
        pool = kg.out_triples(a.head)
    elif t == "L":
        pool = kg.in_triples(a.tail)
    elif r == "L":
        pool = index_for(kg).by_relation.get(a.relation, ())
    else:
        pool = kg.triples()
    return frozenset(
        x for x in pool if head_ok(x.head) and rel_ok(x.relation) and tail_ok(x.tail)
    )


def count_matches(
    strategy: MetapathStrategy, kg: KnowledgeGraph, pattern: str
) -> int:
    s, r, t = parse_pattern(pattern)
    a = strategy.anchor
    if s == "H" and t == "H":
        idx = index_for(kg)
        h_type = strategy.source.high_value
        t_type = strategy.target.high_value
        if r == "L":
            return idx.pair_counts[(h_type, a.relation, t_type)]
        return idx.type_counts[(h_type, t_type)]
    if pattern == "L-L-L":
        return 1 if kg.has_triple(a) else 0
    return len(matches(strategy, kg, pattern))


# -- lattice report --------------------------------------------------------


@dataclass
class PrimaryBar:
    total: int  # count(H-H-H)
    segments: dict[str, int]  # the three 1-Low counts


@dataclass
class SecondaryBar:
    rule: int
    height: int
    # rule 1: the two 2-Low children of the single-Low selection, as
    # (pattern, count, fraction-of-selection), linked as dashed candidates.
    # rule 2: the selection's count against each of its two 1-Low parents.
    parts: list[dict]


@dataclass
class LatticeReport:
    pattern: str
    counts: dict[str, int]
    primary_bar: PrimaryBar
    secondary_bar: SecondaryBar | None

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "counts": dict(self.counts),
            "primary_bar": {
                "total": self.primary_bar.total,
                "segments": dict(self.primary_bar.segments),
            },
            "secondary_bar": None
            if self.secondary_bar is None
            else {
                "rule": self.secondary_bar.rule,
                "height": self.secondary_bar.height,
                "parts": list(self.secondary_bar.parts),
            },
        }


def _secondary_bar(pattern: str, counts: dict[str, int]) -> SecondaryBar | None:
    lows = low_slots(pattern)
    if len(lows) == 1:
        shared = lows[0]
        children = sorted(
            p for p in TWO_LOW if shared in low_slots(p)
        )
        height = counts[pattern]
        parts = [
            {
                "pattern": c,
                "count": counts[c],
                "fraction": counts[c] / height if height else 0.0,
                "dashed": True,
            }
            for c in children
        ]
        return SecondaryBar(rule=1, height=height, parts=parts)
    if len(lows) == 2:
        sel = counts[pattern]
        parts = []
        for slot in lows:
            parent = flip(pattern, slot, "H")
            parts.append(
                {
                    "parent": parent,
                    "count": counts[parent],
                    "fraction": sel / counts[parent] if counts[parent] else 0.0,
                }
            )
        return SecondaryBar(rule=2, height=sel, parts=parts)
    return None


def lattice_report(strategy: MetapathStrategy, kg: KnowledgeGraph) -> LatticeReport:
    """All eight lattice counts plus the two granularity bars.

    The Primary bar is the highest-granularity count with the three 1-Low
    counts as sub-segments; the Secondary bar follows the connecting rule
    for the strategy's own pattern (one or two Low slots).
    """
    counts = {p: count_matches(strategy, kg, p) for p in PATTERNS}
    primary = PrimaryBar(
        total=counts["H-H-H"], segments={p: counts[p] for p in ONE_LOW}
    )
    return LatticeReport(
        pattern=strategy.pattern,
        counts=counts,
        primary_bar=primary,
        secondary_bar=_secondary_bar(strategy.pattern, counts),
    )


# -- endpoint statistics ---------------------------------------------------


@dataclass
class SlotStats:
    slot: str
    entity_counts: dict[str, int]  # entities of the slot's class with count >= 1
    histogram: list[dict]  # [{lo, hi, count}], log10-spaced bins
    boxplot: dict  # min/q1/median/q3/max
    current: int  # the anchor entity's own count

    def to_json(self) -> dict:
        return {
            "slot": self.slot,
            "histogram": self.histogram,
            "boxplot": self.boxplot,
            "current": self.current,
        }


def _log_bins(values: list[int], n_bins: int = 10) -> list[dict]:
    if not values:
        return []
    vmax = max(values)
    if vmax <= 1:
        return [{"lo": 1.0, "hi": 1.0, "count": len(values)}]
    edges = np.logspace(0.0, np.log10(vmax), n_bins + 1)
    edges[0], edges[-1] = 1.0, float(vmax)  # logspace endpoints can drift
    hist, _ = np.histogram(np.asarray(values, dtype=float), bins=edges)
    return [
        {"lo": float(edges[i]), "hi": float(edges[i + 1]), "count": int(hist[i])}
        for i in range(n_bins)
    ]


def slot_stats(
    strategy: MetapathStrategy, slot: str, kg: KnowledgeGraph
) -> SlotStats:
    """Per-entity match counts for one endpoint slot.

    Each entity of the slot's High class is counted against the strategy
    with that slot pinned to the entity and the other two slots High
    (type-constrained by the anchor).
    """
    if slot not in ("source", "target"):
        raise ValueError(f"slot must be source or target, got {slot!r}")
    h_type = strategy.source.high_value
    t_type = strategy.target.high_value
    counts: dict[str, int] = {}
    if slot == "source":
        wanted = h_type
        for ent in kg.entities.values():
            if ent.etype.value != wanted:
                continue
            n = sum(
                1
                for t in kg.out_triples(ent.id)
                if kg.entities[t.tail].etype.value == t_type
            )
            if n:
                counts[ent.id] = n
        current = counts.get(strategy.anchor.head, 0)
    else:
        wanted = t_type
        for ent in kg.entities.values():
            if ent.etype.value != wanted:
                continue
            n = sum(
                1
                for t in kg.in_triples(ent.id)
                if kg.entities[t.head].etype.value == h_type
            )
            if n:
                counts[ent.id] = n
        current = counts.get(strategy.anchor.tail, 0)
    values = sorted(counts.values())
    if values:
        q = np.percentile(np.asarray(values, dtype=float), [0, 25, 50, 75, 100])
        box = {
            "min": float(q[0]),
            "q1": float(q[1]),
            "median": float(q[2]),
            "q3": float(q[3]),
            "max": float(q[4]),
        }
    else:
        box = {"min": 0.0, "q1": 0.0, "median": 0.0, "q3": 0.0, "max": 0.0}
    return SlotStats(
        slot=slot,
        entity_counts=counts,
        histogram=_log_bins(values),
        boxplot=box,
        current=current,
    )


# -- application -----------------------------------------------------------


@dataclass
class StrategyOutcome:
    strategy: MetapathStrategy
    matched: int


@dataclass
class ApplyReport:
    outcomes: list[StrategyOutcome]
    total_before: int
    total_deleted: int
    fraction_deleted: float
    new_version: int
    deleted_triples: list[Triple]

    def to_json(self) -> dict:
        return {
            "strategies": [
                {**o.strategy.to_json(), "matched": o.matched} for o in self.outcomes
            ],
            "total_before": self.total_before,
            "total_deleted": self.total_deleted,
            "fraction_deleted": self.fraction_deleted,
            "new_version": self.new_version,
        }


def apply_strategies(
    strategies: list[MetapathStrategy], kg: KnowledgeGraph
) -> ApplyReport:
    """Delete the union of all matched triples (inverse pairs included).

    Strategies are re-evaluated against the graph as it stands now, not as
    it stood at formulation time; the deleted fraction uses the triple
    count before deletion as denominator.
    """
    total_before = len(kg)
    union: set[Triple] = set()
    outcomes = []
    for strat in strategies:
        m = matches(strat, kg)
        outcomes.append(StrategyOutcome(strat, len(m)))
        union |= m
    if union:
        report = kg.delete_triples(sorted(union))
        deleted = report.deleted
        version = report.new_version
        deleted_triples = report.deleted_triples
    else:
        deleted = 0
        version = kg.version
        deleted_triples = []
    return ApplyReport(
        outcomes=outcomes,
        total_before=total_before,
        total_deleted=deleted,
        fraction_deleted=deleted / total_before if total_before else 0.0,
        new_version=version,
        deleted_triples=deleted_triples,
    )

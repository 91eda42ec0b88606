"""Directed heterogeneous knowledge graph of genes, GO terms and pathways.

Triples are the atomic facts. The graph supports ingestion from flat TSV
files, ego-network queries, atomic triple deletion with inverse pairing,
and snapshot/restore for rollback. Concurrency: many readers, one writer.
"""

from __future__ import annotations

import hashlib
import json
import threading
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, NamedTuple


class EntityType(str, Enum):
    GENE = "Gene"
    BP = "BP"
    MF = "MF"
    CC = "CC"
    PATHWAY = "Pathway"


ENTITY_TYPES = {t.value: t for t in EntityType}

# Relations treated as symmetric at query time: a triple (a, r, b) with
# r in this set is traversable from b as well, without a stored inverse.
SYMMETRIC_RELATIONS = frozenset({"SL_GsG"})

INVERSE_SUFFIX = "_inv"


@dataclass(frozen=True)
class Entity:
    id: str
    etype: EntityType
    name: str


@dataclass
class RelationType:
    id: str
    inverse_of: str | None = None


class Triple(NamedTuple):
    head: str
    relation: str
    tail: str

    def as_dict(self) -> dict:
        return {"head": self.head, "relation": self.relation, "tail": self.tail}


@dataclass
class DiseaseMapping:
    disease_id: str
    name: str
    gene_ids: set[str] = field(default_factory=set)


class GraphError(Exception):
    pass


class IngestError(GraphError):
    pass


class UnknownEntityError(GraphError):
    pass


class UnknownVersionError(GraphError):
    pass


class RWLock:
    """Reader-writer lock with writer preference."""

    def __init__(self):
        self._cond = threading.Condition()
        self._readers = 0
        self._writer = False
        self._writers_waiting = 0

    def acquire_read(self):
        with self._cond:
            while self._writer or self._writers_waiting:
                self._cond.wait()
            self._readers += 1

    def release_read(self):
        with self._cond:
            self._readers -= 1
            if self._readers == 0:
                self._cond.notify_all()

    def acquire_write(self):
        with self._cond:
            self._writers_waiting += 1
            while self._writer or self._readers:
                self._cond.wait()
            self._writers_waiting -= 1
            self._writer = True

    def release_write(self):
        with self._cond:
            self._writer = False
            self._cond.notify_all()

    class _ReadGuard:
        def __init__(self, lock):
            self.lock = lock

        def __enter__(self):
            self.lock.acquire_read()

        def __exit__(self, *exc):
            self.lock.release_read()

    class _WriteGuard:
        def __init__(self, lock):
            self.lock = lock

        def __enter__(self):
            self.lock.acquire_write()

        def __exit__(self, *exc):
            self.lock.release_write()

    def read(self):
        return RWLock._ReadGuard(self)

    def write(self):
        return RWLock._WriteGuard(self)


@dataclass
class DeletionReport:
    requested: int
    deleted: int
    skipped: int
    new_version: int
    deleted_triples: list[Triple]


@dataclass
class IngestReport:
    entity_count: int
    relation_count: int
    triple_count: int
    disease_count: int


class EgoSubgraph(NamedTuple):
    center: str
    rings: list[dict[str, list[str]]]  # ring k -> {etype value: sorted entity ids}
    transitions: list[list[Triple]]  # transitions[k] = triples between ring k and k+1


class KnowledgeGraph:
    def __init__(self, symmetric_relations: Iterable[str] = SYMMETRIC_RELATIONS):
        self.entities: dict[str, Entity] = {}
        self.relations: dict[str, RelationType] = {}
        self.symmetric_relations = set(symmetric_relations)
        self._triples: set[Triple] = set()
        self._out: dict[str, set[Triple]] = defaultdict(set)
        self._in: dict[str, set[Triple]] = defaultdict(set)
        self.version = 0
        self._snapshots: dict[int, frozenset[Triple]] = {}
        self._lock = RWLock()

    # -- construction ----------------------------------------------------

    def add_entity(self, eid: str, etype: EntityType | str, name: str) -> Entity:
        if isinstance(etype, str):
            if etype not in ENTITY_TYPES:
                raise GraphError(f"unknown entity type {etype!r}")
            etype = ENTITY_TYPES[etype]
        if eid in self.entities:
            raise GraphError(f"duplicate entity id {eid!r}")
        if not name:
            raise GraphError(f"entity {eid!r} has empty name")
        ent = Entity(eid, etype, name)
        self.entities[eid] = ent
        return ent

    def add_relation(self, rid: str, inverse_of: str | None = None) -> RelationType:
        rel = self.relations.get(rid)
        if rel is None:
            rel = RelationType(rid, inverse_of)
            self.relations[rid] = rel
        elif inverse_of is not None:
            if rel.inverse_of is not None and rel.inverse_of != inverse_of:
                raise GraphError(
                    f"relation {rid!r} has conflicting inverses "
                    f"{rel.inverse_of!r} and {inverse_of!r}"
                )
            rel.inverse_of = inverse_of
        return rel

    def _add_triple_unlocked(self, head: str, relation: str, tail: str) -> Triple:
        if head not in self.entities:
            raise UnknownEntityError(f"unknown head entity {head!r}")
        if tail not in self.entities:
            raise UnknownEntityError(f"unknown tail entity {tail!r}")
        if relation not in self.relations:
            self.add_relation(relation)
        t = Triple(head, relation, tail)
        if t in self._triples:
            raise GraphError(f"duplicate triple {t}")
        self._triples.add(t)
        self._out[head].add(t)
        self._in[tail].add(t)
        return t

    def add_triple(self, head: str, relation: str, tail: str) -> Triple:
        with self._lock.write():
            t = self._add_triple_unlocked(head, relation, tail)
            self.version += 1
            return t

    def add_triples(self, rows: Iterable[tuple[str, str, str]]) -> int:
        """Bulk insert under one lock and one version bump."""
        with self._lock.write():
            n = 0
            for head, relation, tail in rows:
                self._add_triple_unlocked(head, relation, tail)
                n += 1
            self.version += 1
            return n

    def link_inverses(self, explicit: dict[str, str] | None = None):
        """Pair inverse relations by the `_inv` suffix convention.

        Explicit pairs override the convention. Pairing is made symmetric;
        conflicting assignments raise.
        """
        explicit = dict(explicit or {})
        for rid in list(self.relations):
            if rid.endswith(INVERSE_SUFFIX) and rid not in explicit:
                base = rid[: -len(INVERSE_SUFFIX)]
                if base in self.relations:
                    explicit.setdefault(rid, base)
        for rid, inv in explicit.items():
            if rid not in self.relations:
                raise GraphError(f"inverse declared for unknown relation {rid!r}")
            if inv not in self.relations:
                raise GraphError(f"unknown inverse relation {inv!r} for {rid!r}")
            self.add_relation(rid, inverse_of=inv)
            self.add_relation(inv, inverse_of=rid)

    # -- queries ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self._triples)

    def has_triple(self, t: Triple) -> bool:
        with self._lock.read():
            return t in self._triples

    def triples(self) -> frozenset[Triple]:
        with self._lock.read():
            return frozenset(self._triples)

    def out_triples(self, head: str) -> frozenset[Triple]:
        with self._lock.read():
            return frozenset(self._out.get(head, ()))

    def in_triples(self, tail: str) -> frozenset[Triple]:
        with self._lock.read():
            return frozenset(self._in.get(tail, ()))

    def etype(self, eid: str) -> EntityType:
        ent = self.entities.get(eid)
        if ent is None:
            raise UnknownEntityError(f"unknown entity {eid!r}")
        return ent.etype

    def inverse_of(self, relation_id: str) -> str | None:
        rel = self.relations.get(relation_id)
        return rel.inverse_of if rel else None

    def genes(self) -> list[Entity]:
        return [e for e in self.entities.values() if e.etype is EntityType.GENE]

    def ego_subgraph(self, center: str, max_hops: int) -> EgoSubgraph:
        """Layered neighborhood of a gene, both edge directions traversed.

        Ring k holds entities first reached at hop k; rings are disjoint.
        Transition k lists the triples joining ring k to ring k+1.
        """
        if center not in self.entities:
            raise UnknownEntityError(f"unknown entity {center!r}")
        if self.entities[center].etype is not EntityType.GENE:
            raise GraphError(f"ego center {center!r} is not a Gene")
        if max_hops not in (1, 2):
            raise GraphError(f"max_hops must be 1 or 2, got {max_hops}")
        with self._lock.read():
            seen = {center: 0}
            frontier = [center]
            ring_members: list[list[str]] = [[center]]
            transitions: list[list[Triple]] = []
            for hop in range(1, max_hops + 1):
                nxt: list[str] = []
                edges: list[Triple] = []
                for node in frontier:
                    for t in sorted(self._out.get(node, ())) + sorted(
                        self._in.get(node, ())
                    ):
                        other = t.tail if t.head == node else t.head
                        if other not in seen:
                            seen[other] = hop
                            nxt.append(other)
                        if seen[other] == hop:
                            edges.append(t)
                ring_members.append(sorted(set(nxt)))
                transitions.append(sorted(set(edges)))
                frontier = ring_members[-1]
            rings = []
            for members in ring_members:
                grouped: dict[str, list[str]] = defaultdict(list)
                for eid in members:
                    grouped[self.entities[eid].etype.value].append(eid)
                rings.append({k: sorted(v) for k, v in sorted(grouped.items())})
            return EgoSubgraph(center, rings, transitions)

    # -- mutation --------------------------------------------------------

    def delete_triples(self, matching: Iterable[Triple]) -> DeletionReport:
        """Delete the given triples plus their paired inverse triples.

        Missing triples are skipped idempotently and reported. Atomic with
        respect to readers.
        """
        requested = list(matching)
        with self._lock.write():
            to_delete: set[Triple] = set()
            skipped = 0
            for t in requested:
                if t in self._triples:
                    to_delete.add(t)
                else:
                    skipped += 1
            for t in list(to_delete):
                inv = self.inverse_of(t.relation)
                if inv is not None:
                    paired = Triple(t.tail, inv, t.head)
                    if paired in self._triples:
                        to_delete.add(paired)
            for t in to_delete:
                self._triples.discard(t)
                self._out[t.head].discard(t)
                self._in[t.tail].discard(t)
            self.version += 1
            return DeletionReport(
                requested=len(requested),
                deleted=len(to_delete),
                skipped=skipped,
                new_version=self.version,
                deleted_triples=sorted(to_delete),
            )

    def snapshot(self) -> int:
        with self._lock.read():
            self._snapshots[self.version] = frozenset(self._triples)
            return self.version

    def restore(self, version: int) -> int:
        """Reset the triple set to a snapshotted state under a new version."""
        with self._lock.write():
            if version not in self._snapshots:
                raise UnknownVersionError(f"no snapshot for version {version}")
            stored = self._snapshots[version]
            self._triples = set(stored)
            self._out = defaultdict(set)
            self._in = defaultdict(set)
            for t in self._triples:
                self._out[t.head].add(t)
                self._in[t.tail].add(t)
            self.version += 1
            return self.version

    def check_integrity(self):
        """Referential integrity and index consistency; raises on violation."""
        with self._lock.read():
            for t in self._triples:
                if t.head not in self.entities or t.tail not in self.entities:
                    raise GraphError(f"dangling triple {t}")
                if t.relation not in self.relations:
                    raise GraphError(f"triple {t} uses unknown relation")
            indexed_out = set().union(*self._out.values()) if self._out else set()
            indexed_in = set().union(*self._in.values()) if self._in else set()
            if indexed_out != self._triples or indexed_in != self._triples:
                raise GraphError("adjacency indexes out of sync with triple set")

    def copy(self) -> "KnowledgeGraph":
        """Independent deep copy (used to freeze training inputs)."""
        with self._lock.read():
            kg = KnowledgeGraph(self.symmetric_relations)
            kg.entities = dict(self.entities)
            kg.relations = {
                rid: RelationType(r.id, r.inverse_of) for rid, r in self.relations.items()
            }
            kg._triples = set(self._triples)
            for t in kg._triples:
                kg._out[t.head].add(t)
                kg._in[t.tail].add(t)
            kg.version = self.version
            return kg


# -- TSV ingestion -------------------------------------------------------


def _tsv_rows(path: Path):
    """Yield (line_number, fields) for non-comment, non-blank TSV lines."""
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line.split("\t")


def ingest(
    entities_file: str | Path,
    triples_file: str | Path,
    diseases_file: str | Path | None = None,
) -> tuple[KnowledgeGraph, IngestReport, dict[str, DiseaseMapping]]:
    """Load a knowledge graph from canonical TSV exports.

    entities.tsv: id<TAB>etype<TAB>name
    triples.tsv:  head<TAB>relation<TAB>tail[<TAB>inverse_relation]
    diseases.tsv: disease_id<TAB>disease_name<TAB>gene_id

    Inverse relations pair by the `_inv` suffix; the optional fourth triple
    column declares an explicit inverse and overrides the convention.
    Duplicate triples are rejected with a count.
    """
    kg = KnowledgeGraph()
    entities_file = Path(entities_file)
    triples_file = Path(triples_file)
    for lineno, fields in _tsv_rows(entities_file):
        if len(fields) != 3:
            raise IngestError(
                f"{entities_file.name} line {lineno}: expected 3 fields, got {len(fields)}"
            )
        eid, etype, name = fields
        try:
            kg.add_entity(eid, etype, name)
        except GraphError as e:
            raise IngestError(f"{entities_file.name} line {lineno}: {e}") from e

    explicit_inverses: dict[str, str] = {}
    duplicates = 0
    for lineno, fields in _tsv_rows(triples_file):
        if len(fields) not in (3, 4):
            raise IngestError(
                f"{triples_file.name} line {lineno}: expected 3 or 4 fields, got {len(fields)}"
            )
        head, relation, tail = fields[:3]
        if len(fields) == 4 and fields[3]:
            declared = explicit_inverses.setdefault(relation, fields[3])
            if declared != fields[3]:
                raise IngestError(
                    f"{triples_file.name} line {lineno}: relation {relation!r} "
                    f"declares conflicting inverses {declared!r} and {fields[3]!r}"
                )
        try:
            kg._add_triple_unlocked(head, relation, tail)
        except UnknownEntityError as e:
            raise IngestError(f"{triples_file.name} line {lineno}: {e}") from e
        except GraphError:
            duplicates += 1
    if duplicates:
        raise IngestError(f"{triples_file.name}: {duplicates} duplicate triple(s) rejected")
    kg.link_inverses(explicit_inverses)

    diseases: dict[str, DiseaseMapping] = {}
    if diseases_file is not None:
        diseases_file = Path(diseases_file)
        for lineno, fields in _tsv_rows(diseases_file):
            if len(fields) != 3:
                raise IngestError(
                    f"{diseases_file.name} line {lineno}: expected 3 fields, got {len(fields)}"
                )
            did, name, gene_id = fields
            if gene_id not in kg.entities:
                raise IngestError(
                    f"{diseases_file.name} line {lineno}: unknown gene {gene_id!r}"
                )
            if kg.entities[gene_id].etype is not EntityType.GENE:
                raise IngestError(
                    f"{diseases_file.name} line {lineno}: {gene_id!r} is not a Gene"
                )
            diseases.setdefault(did, DiseaseMapping(did, name)).gene_ids.add(gene_id)

    kg.version = 1
    report = IngestReport(
        entity_count=len(kg.entities),
        relation_count=len(kg.relations),
        triple_count=len(kg),
        disease_count=len(diseases),
    )
    return kg, report, diseases


# -- snapshot persistence ------------------------------------------------


def triples_tsv(triples: Iterable[Triple]) -> str:
    return "".join(f"{t.head}\t{t.relation}\t{t.tail}\n" for t in sorted(triples))


def write_snapshot(kg: KnowledgeGraph, root: str | Path) -> Path:
    """Persist the current triple set under snapshots/<version>/."""
    root = Path(root)
    out = root / str(kg.version)
    out.mkdir(parents=True, exist_ok=True)
    body = triples_tsv(kg.triples())
    (out / "triples.tsv").write_text(body, encoding="utf-8")
    manifest = {
        "version": kg.version,
        "entity_count": len(kg.entities),
        "relation_count": len(kg.relations),
        "triple_count": len(kg),
        "sha256": hashlib.sha256(body.encode("utf-8")).hexdigest(),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return out

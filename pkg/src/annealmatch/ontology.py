"""Ontology model: typed entities, labels, subsumption and property signatures.

Two input formats are understood:

* a fixed subset of OWL in RDF/XML (``owl:Class``, ``owl:ObjectProperty``,
  ``owl:DatatypeProperty``, ``rdfs:subClassOf`` to named classes,
  ``rdfs:domain``, ``rdfs:range`` and ``rdfs:label``);
* a small JSON interchange format, written by :func:`serialize_ontology`::

    {
      "id": "cmt",
      "entities": [{"iri": "http://x.org/cmt#Paper", "kind": "Class",
                    "labels": ["paper"]}, ...],
      "subclass_of": [["<child iri>", "<parent iri>"], ...],
      "domain": [["<property iri>", "<class iri>"], ...],
      "range": [["<property iri>", "<class or datatype iri>"], ...]
    }

Everything else in an RDF/XML document (restrictions, unions, imports,
anonymous classes, equivalence axioms) is skipped and counted in the
:class:`ParseReport` attached to the loaded ontology.
"""
from __future__ import annotations

import enum
import graphlib
import json
import logging
import re
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping
from urllib.parse import urljoin

from .errors import CyclicHierarchy, EmptyOntology, KindMismatch, MalformedInput, UnknownEntity

logger = logging.getLogger(__name__)

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"
XML_BASE = "{http://www.w3.org/XML/1998/namespace}base"


class EntityKind(str, enum.Enum):
    CLASS = "Class"
    OBJECT_PROPERTY = "ObjectProperty"
    DATA_PROPERTY = "DataProperty"

    @property
    def is_property(self) -> bool:
        return self is not EntityKind.CLASS


class OntologyFormat(str, enum.Enum):
    OWL_RDF_XML = "owl-rdfxml"
    JSON = "json"


@dataclass(frozen=True)
class EntityRef:
    iri: str
    kind: EntityKind

    def __post_init__(self):
        if not self.iri:
            raise ValueError("entity IRI must be non-empty")


@dataclass
class ParseReport:
    classes: int = 0
    object_properties: int = 0
    data_properties: int = 0
    implicit_classes: int = 0
    skipped: Counter = field(default_factory=Counter)

    @property
    def skipped_axioms(self) -> int:
        return sum(self.skipped.values())

    def summary(self) -> str:
        reasons = ", ".join(f"{k}={v}" for k, v in sorted(self.skipped.items()))
        return (
            f"{self.classes} classes, {self.object_properties} object properties, "
            f"{self.data_properties} data properties loaded; "
            f"{self.skipped_axioms} axioms skipped" + (f" ({reasons})" if reasons else "")
        )


@dataclass(frozen=True)
class Ontology:
    """Immutable entity store for one input ontology.

    All maps are keyed by IRI string. ``subclass_of`` holds direct
    superclasses only; ``prop_range`` holds classes for object properties
    and datatype IRIs for data properties.
    """

    id: str
    entities: Mapping[str, EntityRef]
    labels: Mapping[str, tuple[str, ...]]
    subclass_of: Mapping[str, frozenset[str]]
    prop_domain: Mapping[str, frozenset[str]]
    prop_range: Mapping[str, frozenset[str]]
    report: ParseReport = field(default_factory=ParseReport, compare=False, repr=False)

    @classmethod
    def build(
        cls,
        id: str,
        entities: Iterable[EntityRef],
        labels: Mapping[str, Iterable[str]] | None = None,
        subclass_of: Mapping[str, Iterable[str]] | None = None,
        prop_domain: Mapping[str, Iterable[str]] | None = None,
        prop_range: Mapping[str, Iterable[str]] | None = None,
        report: ParseReport | None = None,
    ) -> "Ontology":
        """Validate the invariants and freeze the maps."""
        ents: dict[str, EntityRef] = {}
        for e in entities:
            if e.iri in ents and ents[e.iri].kind is not e.kind:
                raise MalformedInput(f"entity {e.iri} declared with two kinds")
            ents.setdefault(e.iri, e)
        if not any(e.kind is EntityKind.CLASS for e in ents.values()):
            raise EmptyOntology(f"ontology {id!r} declares no classes")

        def _check(iri, kinds, what):
            if iri not in ents:
                raise MalformedInput(f"{what} references undeclared entity {iri}")
            if ents[iri].kind not in kinds:
                raise MalformedInput(f"{what}: {iri} is a {ents[iri].kind.value}")

        sub: dict[str, frozenset[str]] = {}
        for child, parents in (subclass_of or {}).items():
            parents = frozenset(parents)
            _check(child, {EntityKind.CLASS}, "subClassOf")
            for p in parents:
                _check(p, {EntityKind.CLASS}, "subClassOf")
            if parents:
                sub[child] = parents
        try:
            graphlib.TopologicalSorter(sub).prepare()
        except graphlib.CycleError as exc:
            raise CyclicHierarchy(f"subclass cycle in {id!r}: {exc.args[1]}") from None

        props = {EntityKind.OBJECT_PROPERTY, EntityKind.DATA_PROPERTY}
        dom: dict[str, frozenset[str]] = {}
        for p, classes in (prop_domain or {}).items():
            _check(p, props, "domain")
            classes = frozenset(classes)
            for c in classes:
                _check(c, {EntityKind.CLASS}, "domain")
            if classes:
                dom[p] = classes
        rng: dict[str, frozenset[str]] = {}
        for p, targets in (prop_range or {}).items():
            _check(p, props, "range")
            targets = frozenset(targets)
            if ents[p].kind is EntityKind.OBJECT_PROPERTY:
                for c in targets:
                    _check(c, {EntityKind.CLASS}, "range")
            if targets:
                rng[p] = targets

        labs = {}
        for iri, ls in (labels or {}).items():
            if iri not in ents:
                raise MalformedInput(f"label for undeclared entity {iri}")
            ls = tuple(ls)
            if ls:
                labs[iri] = ls

        if report is None:
            report = ParseReport()
        report.classes = sum(e.kind is EntityKind.CLASS for e in ents.values())
        report.object_properties = sum(e.kind is EntityKind.OBJECT_PROPERTY for e in ents.values())
        report.data_properties = sum(e.kind is EntityKind.DATA_PROPERTY for e in ents.values())
        return cls(id, ents, labs, sub, dom, rng, report)

    def entity(self, iri: str) -> EntityRef:
        try:
            return self.entities[iri]
        except KeyError:
            raise UnknownEntity(iri) from None

    def of_kind(self, kind: EntityKind) -> list[EntityRef]:
        return sorted((e for e in self.entities.values() if e.kind is kind), key=lambda e: e.iri)

    @property
    def classes(self) -> list[EntityRef]:
        return self.of_kind(EntityKind.CLASS)

    @property
    def object_properties(self) -> list[EntityRef]:
        return self.of_kind(EntityKind.OBJECT_PROPERTY)

    @property
    def data_properties(self) -> list[EntityRef]:
        return self.of_kind(EntityKind.DATA_PROPERTY)

    @cached_property
    def subclasses(self) -> Mapping[str, frozenset[str]]:
        """Direct children of every class that has any."""
        children: dict[str, set[str]] = {}
        for child, parents in self.subclass_of.items():
            for p in parents:
                children.setdefault(p, set()).add(child)
        return {k: frozenset(v) for k, v in children.items()}

    @cached_property
    def level(self) -> Mapping[str, int]:
        """Longest path from a root; every parent has a strictly smaller level."""
        out: dict[str, int] = {}
        order = graphlib.TopologicalSorter(self.subclass_of).static_order()
        for c in order:
            out[c] = 1 + max((out[p] for p in self.subclass_of.get(c, ())), default=-1)
        for e in self.entities.values():
            if e.kind is EntityKind.CLASS:
                out.setdefault(e.iri, 0)
        return out

    def __len__(self):
        return len(self.entities)


def _check_kind(ontology: Ontology, e: EntityRef, kinds) -> EntityRef:
    stored = ontology.entity(e.iri)
    if stored.kind not in kinds:
        raise KindMismatch(f"{e.iri} is a {stored.kind.value}")
    return stored


def local_name(iri: str) -> str:
    """Fragment after '#', else the last non-empty path segment."""
    if "#" in iri:
        frag = iri.rsplit("#", 1)[1]
        if frag:
            return frag
        iri = iri.rsplit("#", 1)[0]
    segments = [s for s in re.split(r"[/:]", iri) if s]
    return segments[-1] if segments else iri


def entity_name(ontology: Ontology, e: EntityRef) -> str:
    """First declared ``rdfs:label`` of ``e``, or its IRI local name."""
    ontology.entity(e.iri)
    labels = ontology.labels.get(e.iri)
    if labels:
        return labels[0]
    return local_name(e.iri)


def superclasses(ontology: Ontology, c: EntityRef) -> frozenset[EntityRef]:
    _check_kind(ontology, c, {EntityKind.CLASS})
    return frozenset(ontology.entities[p] for p in ontology.subclass_of.get(c.iri, ()))


def property_signature(ontology: Ontology, p: EntityRef) -> tuple[frozenset[str], frozenset[str]]:
    """Declared (domains, ranges) of a property, as IRI sets."""
    _check_kind(ontology, p, {EntityKind.OBJECT_PROPERTY, EntityKind.DATA_PROPERTY})
    return (
        ontology.prop_domain.get(p.iri, frozenset()),
        ontology.prop_range.get(p.iri, frozenset()),
    )


# --------------------------------------------------------------------- parsing

_CLASS_TYPES = {OWL + "Class", RDFS + "Class"}
_OBJECT_TYPES = {
    OWL + t
    for t in (
        "ObjectProperty",
        "TransitiveProperty",
        "SymmetricProperty",
        "AsymmetricProperty",
        "InverseFunctionalProperty",
        "ReflexiveProperty",
        "IrreflexiveProperty",
    )
}
_DATA_TYPES = {OWL + "DatatypeProperty"}
_EDGE_PREDICATES = {RDFS + "subClassOf", RDFS + "domain", RDFS + "range"}
_UNSUPPORTED_PREDICATES = {
    OWL + "imports",
    OWL + "equivalentClass",
    OWL + "disjointWith",
    OWL + "equivalentProperty",
    OWL + "inverseOf",
    RDFS + "subPropertyOf",
    OWL + "unionOf",
    OWL + "intersectionOf",
}
_TOP = {OWL + "Thing", RDFS + "Resource"}
_LITERAL_RANGES = {RDFS + "Literal", RDF + "PlainLiteral", RDF + "XMLLiteral"}


def _split_tag(tag: str) -> str:
    return tag[1:].replace("}", "", 1) if tag.startswith("{") else tag


def _local(tag: str) -> str:
    return re.split(r"[#/]", tag)[-1]


class _RdfXmlReader:
    def __init__(self, root: ET.Element):
        self.base = root.get(XML_BASE, "")
        self.kinds: dict[str, EntityKind] = {}
        self.labels: dict[str, list[str]] = {}
        self.edges: list[tuple[str, str, str]] = []
        self.report = ParseReport()

    def resolve(self, ref: str) -> str:
        if re.match(r"^[A-Za-z][A-Za-z0-9+.\-]*:", ref):
            return ref
        if ref.startswith("#"):
            return self.base.split("#", 1)[0] + ref
        return urljoin(self.base, ref)

    def subject(self, elem: ET.Element) -> str | None:
        about = elem.get(f"{{{RDF}}}about")
        if about is not None:
            return self.resolve(about)
        ident = elem.get(f"{{{RDF}}}ID")
        if ident is not None:
            return self.base.split("#", 1)[0] + "#" + ident
        return None

    def declare(self, iri: str, types: set[str]) -> None:
        if iri in _TOP:
            return
        if types & _CLASS_TYPES:
            kind = EntityKind.CLASS
        elif types & _OBJECT_TYPES:
            kind = EntityKind.OBJECT_PROPERTY
        elif types & _DATA_TYPES:
            kind = EntityKind.DATA_PROPERTY
        else:
            return
        self.kinds.setdefault(iri, kind)

    def node(self, elem: ET.Element) -> str | None:
        tag = _split_tag(elem.tag)
        subj = self.subject(elem)
        if tag == OWL + "Ontology":
            if subj and not self.base:
                self.base = subj
            for child in elem:
                if _split_tag(child.tag) == OWL + "imports":
                    self.report.skipped["imports"] += 1
            return subj
        types = set() if tag == RDF + "Description" else {tag}
        for child in elem:
            if _split_tag(child.tag) == RDF + "type":
                res = child.get(f"{{{RDF}}}resource")
                if res:
                    types.add(self.resolve(res))
        if subj is not None:
            self.declare(subj, types)
        for child in elem:
            self.property(subj, child)
        return subj

    def property(self, subj: str | None, elem: ET.Element) -> None:
        pred = _split_tag(elem.tag)
        if pred == RDF + "type":
            return
        if pred == RDFS + "label":
            text = (elem.text or "").strip()
            if subj is not None and text:
                self.labels.setdefault(subj, []).append(text)
            return
        if pred in _UNSUPPORTED_PREDICATES:
            # inside anonymous nodes the enclosing axiom is counted by the caller
            if subj is not None:
                self.report.skipped[_local(pred)] += 1
            return
        if pred not in _EDGE_PREDICATES:
            return
        obj = elem.get(f"{{{RDF}}}resource")
        if obj is not None:
            obj = self.resolve(obj)
        else:
            nested = list(elem)
            if len(nested) == 1:
                obj = self.node(nested[0])
            if obj is None:
                what = _local(_split_tag(nested[0].tag)) if nested else "blank node"
                if nested and any(_split_tag(c.tag) in _UNSUPPORTED_PREDICATES for c in nested[0]):
                    what = next(
                        _local(_split_tag(c.tag))
                        for c in nested[0]
                        if _split_tag(c.tag) in _UNSUPPORTED_PREDICATES
                    )
                self.report.skipped[what] += 1
                return
        if subj is None:
            self.report.skipped["anonymous subject"] += 1
            return
        self.edges.append((subj, pred, obj))

    def ontology(self, id: str) -> Ontology:
        sub: dict[str, set[str]] = {}
        dom: dict[str, set[str]] = {}
        rng: dict[str, set[str]] = {}

        def as_class(iri: str) -> bool:
            kind = self.kinds.get(iri)
            if kind is None:
                self.kinds[iri] = EntityKind.CLASS
                self.report.implicit_classes += 1
                return True
            return kind is EntityKind.CLASS

        for s, p, o in self.edges:
            if p == RDFS + "subClassOf":
                if o in _TOP:
                    continue
                if s == o:
                    continue
                if as_class(s) and as_class(o):
                    sub.setdefault(s, set()).add(o)
                else:
                    self.report.skipped["subClassOf kind clash"] += 1
                continue
            kind = self.kinds.get(s)
            if kind is None or not kind.is_property:
                self.report.skipped["undeclared property"] += 1
                continue
            if p == RDFS + "domain":
                if o in _TOP:
                    continue
                if as_class(o):
                    dom.setdefault(s, set()).add(o)
                else:
                    self.report.skipped["domain kind clash"] += 1
            elif kind is EntityKind.OBJECT_PROPERTY:
                if o in _TOP:
                    continue
                if o.startswith(XSD) or o in _LITERAL_RANGES or not as_class(o):
                    self.report.skipped["range kind clash"] += 1
                else:
                    rng.setdefault(s, set()).add(o)
            else:
                rng.setdefault(s, set()).add(o)

        entities = [EntityRef(iri, kind) for iri, kind in self.kinds.items()]
        labels = {iri: ls for iri, ls in self.labels.items() if iri in self.kinds}
        return Ontology.build(id, entities, labels, sub, dom, rng, self.report)


def _parse_rdfxml(data: bytes, id: str) -> Ontology:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedInput(f"RDF/XML syntax error: {exc}") from None
    reader = _RdfXmlReader(root)
    if _split_tag(root.tag) == RDF + "RDF":
        # the ontology header fixes the base for relative IRIs, so read it first
        nodes = sorted(root, key=lambda e: _split_tag(e.tag) != OWL + "Ontology")
        for elem in nodes:
            reader.node(elem)
    else:
        reader.node(root)
    return reader.ontology(id or local_name(reader.base or "ontology"))


def _parse_json(data: bytes, id: str) -> Ontology:
    try:
        doc = json.loads(data.decode("utf-8"))
        entities = [EntityRef(e["iri"], EntityKind(e["kind"])) for e in doc["entities"]]
        labels = {e["iri"]: list(e.get("labels", ())) for e in doc["entities"]}
        edges = {}
        for key in ("subclass_of", "domain", "range"):
            grouped: dict[str, list[str]] = {}
            for a, b in doc.get(key, ()):
                grouped.setdefault(a, []).append(b)
            edges[key] = grouped
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"JSON interchange error: {exc}") from None
    return Ontology.build(
        doc.get("id") or id or "ontology",
        entities,
        labels,
        edges["subclass_of"],
        edges["domain"],
        edges["range"],
    )


def parse_ontology(data: bytes, format: OntologyFormat | str, id: str = "") -> Ontology:
    """Parse an ontology document.

    Raises :class:`MalformedInput`, :class:`CyclicHierarchy` or
    :class:`EmptyOntology`. The parse report is logged at INFO level and
    kept on ``ontology.report``.
    """
    format = OntologyFormat(format)
    if format is OntologyFormat.JSON:
        onto = _parse_json(data, id)
    else:
        onto = _parse_rdfxml(data, id)
    logger.info("ontology %s: %s", onto.id, onto.report.summary())
    return onto


def load_ontology(path: str | Path, id: str = "") -> Ontology:
    """Read an ontology file, picking the format from the suffix."""
    path = Path(path)
    fmt = OntologyFormat.JSON if path.suffix.lower() == ".json" else OntologyFormat.OWL_RDF_XML
    return parse_ontology(path.read_bytes(), fmt, id or path.stem)


def serialize_ontology(ontology: Ontology) -> bytes:
    """Deterministic JSON interchange encoding (inverse of ``parse_ontology``)."""
    doc = {
        "id": ontology.id,
        "entities": [
            {"iri": e.iri, "kind": e.kind.value, "labels": list(ontology.labels.get(e.iri, ()))}
            for e in sorted(ontology.entities.values(), key=lambda e: e.iri)
        ],
        "subclass_of": sorted([c, p] for c, ps in ontology.subclass_of.items() for p in ps),
        "domain": sorted([p, c] for p, cs in ontology.prop_domain.items() for c in cs),
        "range": sorted([p, c] for p, cs in ontology.prop_range.items() for c in cs),
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")

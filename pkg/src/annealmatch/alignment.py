"""Alignment format (level 0) reading and writing.

Only ``Cell`` elements with ``entity1``, ``entity2``, ``relation`` and
``measure`` are understood, which is what OAEI reference alignments use.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from .errors import DuplicateCell, MalformedInput

ALIGN_NS = "http://knowledgeweb.semanticweb.org/heterogeneity/alignment"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"


@dataclass(frozen=True, order=True)
class Correspondence:
    entity1: str
    entity2: str
    relation: str = "="
    measure: float = 1.0

    def __post_init__(self):
        if not self.entity1 or not self.entity2:
            raise ValueError("correspondence entities must be non-empty IRIs")
        if not 0.0 <= self.measure <= 1.0:
            raise ValueError(f"measure {self.measure} outside [0, 1]")


@dataclass
class Alignment:
    correspondences: list[Correspondence] = field(default_factory=list)
    onto1: str = ""
    onto2: str = ""

    def __post_init__(self):
        seen = set()
        for c in self.correspondences:
            key = (c.entity1, c.entity2)
            if key in seen:
                raise DuplicateCell(f"duplicate cell {c.entity1} -> {c.entity2}")
            seen.add(key)

    def __len__(self):
        return len(self.correspondences)

    def __iter__(self):
        return iter(self.correspondences)

    def sorted(self) -> "Alignment":
        return Alignment(sorted(self.correspondences), self.onto1, self.onto2)

    def pairs(self, relation: str | None = None) -> set[tuple[str, str]]:
        return {
            (c.entity1, c.entity2)
            for c in self.correspondences
            if relation is None or c.relation == relation
        }


def _onto_block(tag: str, iri: str) -> str:
    if not iri:
        return f"  <{tag}><Ontology/></{tag}>\n"
    return f"  <{tag}>\n    <Ontology rdf:about={quoteattr(iri)}/>\n  </{tag}>\n"


def write_alignment(a: Alignment) -> bytes:
    """Serialise ``a`` as Alignment-format RDF/XML, cells sorted by entity IRIs."""
    out = [
        '<?xml version="1.0" encoding="utf-8"?>\n',
        f'<rdf:RDF xmlns="{ALIGN_NS}"\n',
        f'         xmlns:rdf="{RDF_NS}"\n',
        '         xmlns:xsd="http://www.w3.org/2001/XMLSchema#">\n',
        "<Alignment>\n",
        "  <xml>yes</xml>\n",
        "  <level>0</level>\n",
        "  <type>11</type>\n",
        _onto_block("onto1", a.onto1),
        _onto_block("onto2", a.onto2),
    ]
    for c in sorted(a.correspondences, key=lambda c: (c.entity1, c.entity2)):
        out.append(
            "  <map>\n"
            "    <Cell>\n"
            f"      <entity1 rdf:resource={quoteattr(c.entity1)}/>\n"
            f"      <entity2 rdf:resource={quoteattr(c.entity2)}/>\n"
            f"      <relation>{escape(c.relation)}</relation>\n"
            f'      <measure rdf:datatype="http://www.w3.org/2001/XMLSchema#float">{c.measure:.6f}</measure>\n'
            "    </Cell>\n"
            "  </map>\n"
        )
    out.append("</Alignment>\n</rdf:RDF>\n")
    return "".join(out).encode("utf-8")


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _resource(elem: ET.Element) -> str | None:
    res = elem.get(f"{{{RDF_NS}}}resource")
    if res is None:
        # some producers nest an rdf:Description or put the IRI in the text
        for child in elem:
            res = child.get(f"{{{RDF_NS}}}about")
            if res:
                break
        else:
            res = (elem.text or "").strip() or None
    return res


def _onto_iri(elem: ET.Element | None) -> str:
    if elem is None:
        return ""
    for child in elem.iter():
        about = child.get(f"{{{RDF_NS}}}about")
        if about:
            return about
    return (elem.text or "").strip()


def read_alignment(data: bytes) -> Alignment:
    """Parse an Alignment-format document.

    Missing ``measure`` defaults to 1.0 and missing ``relation`` to "=".
    Raises :class:`MalformedInput` or :class:`DuplicateCell`.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedInput(f"alignment XML syntax error: {exc}") from None
    align = next((e for e in root.iter() if _local(e.tag) == "Alignment"), None)
    if align is None:
        raise MalformedInput("no Alignment element found")
    onto1 = _onto_iri(next((e for e in align if _local(e.tag) == "onto1"), None))
    onto2 = _onto_iri(next((e for e in align if _local(e.tag) == "onto2"), None))
    cells = []
    for cell in align.iter():
        if _local(cell.tag) != "Cell":
            continue
        fields = {_local(child.tag): child for child in cell}
        if "entity1" not in fields or "entity2" not in fields:
            raise MalformedInput("Cell without entity1/entity2")
        e1 = _resource(fields["entity1"])
        e2 = _resource(fields["entity2"])
        if not e1 or not e2:
            raise MalformedInput("Cell entity without IRI")
        relation = "="
        if "relation" in fields and (fields["relation"].text or "").strip():
            relation = fields["relation"].text.strip()
        measure = 1.0
        if "measure" in fields and (fields["measure"].text or "").strip():
            try:
                measure = float(fields["measure"].text)
            except ValueError:
                raise MalformedInput(f"bad measure {fields['measure'].text!r}") from None
        try:
            cells.append(Correspondence(e1, e2, relation, measure))
        except ValueError as exc:
            raise MalformedInput(str(exc)) from None
    return Alignment(cells, onto1, onto2)


def load_alignment(path: str | Path) -> Alignment:
    return read_alignment(Path(path).read_bytes())


def save_alignment(a: Alignment, path: str | Path) -> None:
    Path(path).write_bytes(write_alignment(a))

"""In-memory semantic network: objects, attribute trees and typed relation edges."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from . import graph
from .errors import (
    DuplicateAttribute,
    DuplicateObject,
    InvalidAttribute,
    InvalidName,
    UnknownObject,
    UnknownSource,
)

XML_WHITESPACE = " \t\n\r"

# XML 1.0 Char production minus the characters that attribute-value
# normalisation would rewrite (tab, newline, carriage return).
_NAME_CHARS = re.compile("[\u0020-\ud7ff\ue000-\ufffd\U00010000-\U0010ffff]*")
# Text values may hold tabs and newlines; CR is dropped by XML line-end handling.
_VALUE_CHARS = re.compile("[\t\n\u0020-\ud7ff\ue000-\ufffd\U00010000-\U0010ffff]*")
_LABEL = re.compile(r"[a-z][a-z0-9-]*")

PREDEFINED_LABELS = ("part-of", "has-part", "kind-of", "super-of", "same-as", "opposite-of")
CONTAINS = "contains"


def check_name(text, what: str = "object name") -> str:
    if not isinstance(text, str):
        raise InvalidName(f"{what} must be a string, got {type(text).__name__}")
    if not text.strip(XML_WHITESPACE):
        raise InvalidName(f"{what} must not be empty")
    if text != text.strip(XML_WHITESPACE):
        raise InvalidName(f"{what} {text!r} has leading or trailing whitespace")
    if not _NAME_CHARS.fullmatch(text):
        raise InvalidName(f"{what} {text!r} contains characters not allowed in XML attributes")
    return text


@dataclass(frozen=True)
class RelationKind:
    """ISA, AKO, or a named relation label.

    Labels are case-insensitive on input and stored lowercase; ``kind-of`` is
    an alias of AKO.
    """

    label: str

    def __post_init__(self):
        if not isinstance(self.label, str):
            raise InvalidName("relation label must be a string")
        label = self.label.lower()
        if label == "kind-of":
            label = "ako"
        if not _LABEL.fullmatch(label):
            raise InvalidName(f"invalid relation label {self.label!r}")
        object.__setattr__(self, "label", label)

    @property
    def inherits(self) -> bool:
        return self.label in ("isa", "ako")

    def __str__(self) -> str:
        return self.label


ISA = RelationKind("isa")
AKO = RelationKind("ako")


@dataclass(frozen=True)
class AttributeTree:
    """A named attribute with an optional scalar and ordered sub-attributes.

    The scalar is trimmed of XML whitespace and an empty string counts as
    absent; at least one of value/children must remain.
    """

    name: str
    value: Optional[str] = None
    children: Tuple["AttributeTree", ...] = ()

    def __post_init__(self):
        check_name(self.name, "attribute name")
        value = self.value
        if value is not None:
            if not isinstance(value, str):
                raise InvalidAttribute(f"value of attribute {self.name!r} must be text")
            if not _VALUE_CHARS.fullmatch(value):
                raise InvalidAttribute(
                    f"value of attribute {self.name!r} contains characters not allowed in XML text")
            value = value.strip(XML_WHITESPACE) or None
        children = tuple(self.children)
        for child in children:
            if not isinstance(child, AttributeTree):
                raise InvalidAttribute(f"children of {self.name!r} must be attribute trees")
        _check_unique(children, f"attribute {self.name!r}")
        if value is None and not children:
            raise InvalidAttribute(f"attribute {self.name!r} has neither a value nor sub-attributes")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "children", children)

    def child(self, name: str) -> Optional["AttributeTree"]:
        for c in self.children:
            if c.name == name:
                return c
        return None

    def size(self) -> int:
        """Number of attribute nodes in this tree, including itself."""
        return 1 + sum(c.size() for c in self.children)


def _check_unique(attrs: Sequence[AttributeTree], where: str) -> None:
    seen = set()
    for a in attrs:
        if a.name in seen:
            raise DuplicateAttribute(f"duplicate attribute {a.name!r} in {where}")
        seen.add(a.name)


def attr(name: str, value: Optional[str] = None, *children: AttributeTree) -> AttributeTree:
    """Shorthand constructor: ``attr("grain", None, attr("color", "yellow"))``."""
    return AttributeTree(name, value, tuple(children))


@dataclass(frozen=True)
class RelationEdge:
    source: str
    kind: RelationKind
    target: str


@dataclass
class ObjectNode:
    name: str
    attributes: List[AttributeTree] = field(default_factory=list)
    edges: List[RelationEdge] = field(default_factory=list)
    stub: bool = False

    def find_attr(self, path: Sequence[str]) -> Optional[AttributeTree]:
        if not path:
            return None
        node = None
        level: Sequence[AttributeTree] = self.attributes
        for step in path:
            node = next((a for a in level if a.name == step), None)
            if node is None:
                return None
            level = node.children
        return node


@dataclass(frozen=True)
class Finding:
    level: str  # ERROR | WARN | INFO
    code: str
    message: str
    objects: Tuple[str, ...] = ()

    def render(self) -> str:
        return f"{self.level}\t{self.code}\t{self.message}"


@dataclass
class ValidationReport:
    findings: List[Finding] = field(default_factory=list)
    strict: bool = False

    @property
    def errors(self) -> List[Finding]:
        return [f for f in self.findings if f.level == "ERROR"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def __len__(self) -> int:
        return len(self.findings)

    def __iter__(self) -> Iterator[Finding]:
        return iter(self.findings)


class KnowledgeBase:
    """Objects keyed by name, kept in declaration order.

    Build it single-threaded through :meth:`add_object` and
    :meth:`add_relation`; afterwards treat it as read-only.
    """

    def __init__(self):
        self.objects: Dict[str, ObjectNode] = {}
        self.warnings: List[Finding] = []

    # dicts keep insertion order, which is the declaration order
    @property
    def declaration_order(self) -> List[str]:
        return list(self.objects)

    def __len__(self) -> int:
        return len(self.objects)

    def __contains__(self, name) -> bool:
        return name in self.objects

    def __iter__(self) -> Iterator[ObjectNode]:
        return iter(self.objects.values())

    def __repr__(self) -> str:
        return f"<KnowledgeBase objects={len(self.objects)} stubs={self.stub_count}>"

    @property
    def object_count(self) -> int:
        return len(self.objects)

    @property
    def stub_count(self) -> int:
        return sum(1 for o in self.objects.values() if o.stub)

    def get(self, name: str) -> ObjectNode:
        try:
            return self.objects[name]
        except (KeyError, TypeError):
            raise UnknownObject(f"unknown object {name!r}") from None

    def add_object(self, name: str, attributes: Sequence[AttributeTree] = ()) -> str:
        check_name(name)
        attributes = list(attributes)
        for a in attributes:
            if not isinstance(a, AttributeTree):
                raise InvalidAttribute(f"attributes of {name!r} must be attribute trees")
        _check_unique(attributes, f"object {name!r}")
        existing = self.objects.get(name)
        if existing is not None:
            if not existing.stub:
                raise DuplicateObject(f"object {name!r} is already defined")
            existing.attributes = attributes
            existing.stub = False
            return name
        self.objects[name] = ObjectNode(name, attributes)
        return name

    def add_relation(self, source: str, kind, target: str) -> RelationEdge:
        if not isinstance(kind, RelationKind):
            kind = RelationKind(kind)
        node = self.objects.get(source) if isinstance(source, str) else None
        if node is None:
            raise UnknownSource(f"relation source {source!r} does not exist")
        if node.stub:
            # stubs stay edge-free; define the object first
            raise UnknownSource(f"relation source {source!r} is only a stub")
        check_name(target)
        if target not in self.objects:
            self.objects[target] = ObjectNode(target, stub=True)
            self.warnings.append(Finding(
                "WARN", "stub-object",
                f"object {target!r} referenced by {source!r} is not defined", (target,)))
        edge = RelationEdge(source, kind, target)
        node.edges.append(edge)
        return edge

    def get_local_attr(self, name: str, path: Sequence[str]) -> Optional[AttributeTree]:
        return self.get(name).find_attr(list(path))

    def neighbors(self, name: str, kind: Optional[RelationKind] = None) -> List[str]:
        if kind is not None and not isinstance(kind, RelationKind):
            kind = RelationKind(kind)
        return [e.target for e in self.get(name).edges if kind is None or e.kind == kind]

    def edges(self) -> Iterator[RelationEdge]:
        for node in self.objects.values():
            yield from node.edges

    def adjacency(self, inheritance_only: bool = False) -> Dict[str, List[str]]:
        return {
            name: [e.target for e in node.edges if not inheritance_only or e.kind.inherits]
            for name, node in self.objects.items()
        }


def new_kb() -> KnowledgeBase:
    return KnowledgeBase()


def validate(kb: KnowledgeBase, strict: bool = False) -> ValidationReport:
    """Report stubs, self-loops and relation cycles.

    Everything is a warning or informational unless ``strict`` is set, which
    turns undefined (stub) objects into errors.
    """
    report = ValidationReport(strict=strict)
    stub_level = "ERROR" if strict else "WARN"
    for node in kb:
        if node.stub:
            report.findings.append(Finding(
                stub_level, "stub-object",
                f"object {node.name!r} is referenced but never defined", (node.name,)))
    for edge in kb.edges():
        if edge.source == edge.target:
            report.findings.append(Finding(
                "INFO", "self-loop",
                f"object {edge.source!r} relates to itself ({edge.kind})", (edge.source,)))
    for comp in graph.cyclic_components(kb.adjacency()):
        if len(comp) > 1:
            report.findings.append(Finding(
                "INFO", "cycle", "relation cycle through " + ", ".join(comp), tuple(comp)))
    return report

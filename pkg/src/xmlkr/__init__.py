"""Semantic networks stored as XML, with ISA/AKO inheritance and a small query language."""

from .codec import (
    Flat,
    Nested,
    canonical_equal,
    load,
    parse_document,
    serialize,
    serialize_flat,
    serialize_nested,
)
from .errors import (
    DocumentError,
    DuplicateAttribute,
    DuplicateObject,
    InvalidAttribute,
    InvalidName,
    InvalidStructure,
    KnowledgeBaseError,
    MalformedXml,
    QuerySyntaxError,
    UnknownObject,
    UnknownRootVersion,
    UnknownSource,
    XmlkrError,
)
from .inference import ResolvedValue, ancestors, instances_of, is_a, resolve_attr
from .model import (
    AKO,
    ISA,
    AttributeTree,
    Finding,
    KnowledgeBase,
    ObjectNode,
    RelationEdge,
    RelationKind,
    ValidationReport,
    attr,
    new_kb,
    validate,
)
from .query import QueryResult, execute, parse_query, run_query, to_text

__version__ = "0.1.0"

__all__ = [
    "Flat",
    "Nested",
    "canonical_equal",
    "load",
    "parse_document",
    "serialize",
    "serialize_flat",
    "serialize_nested",
    "DocumentError",
    "DuplicateAttribute",
    "DuplicateObject",
    "InvalidAttribute",
    "InvalidName",
    "InvalidStructure",
    "KnowledgeBaseError",
    "MalformedXml",
    "QuerySyntaxError",
    "UnknownObject",
    "UnknownRootVersion",
    "UnknownSource",
    "XmlkrError",
    "AKO",
    "ISA",
    "AttributeTree",
    "Finding",
    "KnowledgeBase",
    "ObjectNode",
    "RelationEdge",
    "RelationKind",
    "ValidationReport",
    "attr",
    "new_kb",
    "validate",
    "ResolvedValue",
    "ancestors",
    "instances_of",
    "is_a",
    "resolve_attr",
    "QueryResult",
    "execute",
    "parse_query",
    "run_query",
    "to_text",
    "__version__",
]

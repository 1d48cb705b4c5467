"""Exception hierarchy shared by the knowledge base, codec, query and CLI layers."""

from __future__ import annotations


class XmlkrError(Exception):
    """Base class. Errors raised while reading text carry a 1-based line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def at(self, line: int, column: int) -> "XmlkrError":
        if self.line is None:
            self.line = line
            self.column = column
        return self

    @property
    def has_position(self) -> bool:
        return self.line is not None and self.column is not None

    def __str__(self) -> str:
        if self.has_position:
            return f"{self.message} (line {self.line}, column {self.column})"
        return self.message


class KnowledgeBaseError(XmlkrError):
    pass


class InvalidName(KnowledgeBaseError, ValueError):
    pass


class InvalidAttribute(KnowledgeBaseError, ValueError):
    pass


class DuplicateObject(KnowledgeBaseError):
    pass


class DuplicateAttribute(KnowledgeBaseError):
    pass


class UnknownObject(KnowledgeBaseError, LookupError):
    pass


class UnknownSource(UnknownObject):
    pass


class DocumentError(XmlkrError):
    pass


class MalformedXml(DocumentError):
    pass


class UnknownRootVersion(DocumentError):
    pass


class InvalidStructure(DocumentError):
    """Well-formed XML that does not follow the XMLKR element grammar."""


class QuerySyntaxError(XmlkrError):
    def __init__(self, message: str, offset: int, text: str, expected=()):
        line = text.count("\n", 0, offset) + 1
        column = offset - (text.rfind("\n", 0, offset) + 1) + 1
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        if self.expected:
            message = f"{message}; expected one of: {', '.join(self.expected)}"
        super().__init__(message, line, column)

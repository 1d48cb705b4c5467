import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xmlkr.errors import MalformedXml
from xmlkr.xmlreader import escape_text, read_xml


def test_reads_elements_attributes_text():
    root = read_xml(b'<?xml version="1.0" encoding="UTF-8"?>\n<a x="1" y=\'two\'><b>hi &amp; bye</b><c/></a>')
    assert root.tag == "a" and root.attrs == {"x": "1", "y": "two"}
    b, c = root.elements
    assert b.text == "hi & bye" and c.children == []
    assert (b.line, b.column) == (2, 18)


def test_comments_and_bom_are_skipped():
    root = read_xml("\ufeff<!-- lead --><r><!-- in --></r><!-- tail -->\n")
    assert root.tag == "r" and root.children == []


def test_crlf_and_attribute_whitespace_normalised():
    root = read_xml('<r a="x\ty\nz">l1\r\nl2\rl3</r>')
    assert root.attrs["a"] == "x y z"
    assert root.text == "l1\nl2\nl3"


@pytest.mark.parametrize("doc, line, column, fragment", [
    ("", 1, 1, "no root"),
    ("   \n  ", 2, 3, "no root"),
    ("text", 1, 1, "before the root"),
    ("<a>", 1, 4, "unclosed element <a>"),
    ("<a></b>", 1, 4, "does not match"),
    ("<a/><b/>", 1, 5, "after the root"),
    ("<a x='1' x='2'/>", 1, 10, "duplicate attribute"),
    ("<a x=1/>", 1, 6, "quoted"),
    ("<a x='<'/>", 1, 7, "'<'"),
    ("<a>&nbsp;</a>", 1, 4, "entity"),
    ("<a>&#65;</a>", 1, 4, "entity"),
    ("<a>& </a>", 1, 4, "entity"),
    ("<a><![CDATA[x]]></a>", 1, 4, "CDATA"),
    ("<!DOCTYPE a><a/>", 1, 1, "DTD"),
    ("<a><?pi x?></a>", 1, 4, "processing"),
    ("<a>\n<!-- x -- y --></a>", 2, 8, "'--'"),
    ("<a>\n  <!-- open", 2, 3, "unterminated comment"),
    ("<a>]]></a>", 1, 4, "']]>'"),
    ("<a>\x01</a>", 1, 4, "U+0001"),
    ("<?xml version='1.0' encoding='latin-1'?><a/>", 1, 31, "encoding"),
    ("<?xml nonsense?><a/>", 1, 1, "declaration"),
    ("<a b", 1, 5, "expected '='"),
    ("<a ", 1, 4, "unterminated start tag"),
    ("<1a/>", 1, 2, "element name"),
    ("</a>", 1, 1, "unexpected end tag"),
])
def test_errors_carry_positions(doc, line, column, fragment):
    with pytest.raises(MalformedXml) as info:
        read_xml(doc)
    err = info.value
    assert (err.line, err.column) == (line, column), str(err)
    assert fragment in err.message


def test_invalid_utf8_position():
    with pytest.raises(MalformedXml) as info:
        read_xml(b"<a>\n  \xc3\x28</a>")
    assert (info.value.line, info.value.column) == (2, 3)


def test_deep_nesting_is_iterative():
    depth = 5000
    root = read_xml("<a>" * depth + "</a>" * depth)
    node, count = root, 1
    while node.elements:
        node = node.elements[0]
        count += 1
    assert count == depth


# text safe for XML character data, minus CR (which XML normalises away)
xml_text = st.text(
    st.characters(blacklist_categories=("Cs",), blacklist_characters="\r\ufffe\uffff",
                  min_codepoint=0x9).filter(lambda c: c in "\t\n" or ord(c) >= 0x20),
    max_size=40)


@settings(max_examples=300, deadline=None)
@given(xml_text)
def test_escape_round_trip_agrees_with_stdlib(text):
    doc = f"<r>{escape_text(text)}</r>"
    assert read_xml(doc).text == text
    assert (ET.fromstring(doc).text or "") == text

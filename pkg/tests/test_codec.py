import random
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kbgen import random_kb
from xmlkr import (
    AKO,
    ISA,
    DuplicateAttribute,
    DuplicateObject,
    Flat,
    InvalidAttribute,
    InvalidStructure,
    MalformedXml,
    Nested,
    RelationKind,
    UnknownObject,
    UnknownRootVersion,
    attr,
    canonical_equal,
    new_kb,
    parse_document,
    serialize,
    serialize_flat,
    serialize_nested,
)

DATA = Path(__file__).parent / "data"


def loop_kb():
    kb = new_kb()
    for a, b in [("A", "B"), ("B", "C"), ("C", "A")]:
        kb.add_object(a)
        kb.add_relation(a, "linked-to", b)
    return kb


def test_parse_persia():
    kb, warnings = parse_document((DATA / "persia.xmlkr").read_bytes())
    assert kb.declaration_order == ["Persia", "Car"]
    assert kb.get_local_attr("Persia", ["color"]).value == "White"
    assert kb.neighbors("Persia", ISA) == ["Car"]
    assert kb.get("Car").stub
    assert [w.code for w in warnings] == ["stub-object"]


def test_parse_empty_document():
    kb, warnings = parse_document('<xmlkr version="1.0"/>')
    assert len(kb) == 0 and warnings == []


def test_parse_flat_loop():
    kb, warnings = parse_document((DATA / "loop.xmlkr").read_text())
    assert canonical_equal(kb, loop_kb())
    assert [w.code for w in warnings] == ["cycle"]
    assert warnings[0].objects == ("A", "B", "C")


def test_nested_attributes_and_value_with_children():
    doc = """<xmlkr version="1.0">
      <object name="bird">
        <attr name="grain">seed
          <attr name="color">yellow</attr>
        </attr>
      </object>
    </xmlkr>"""
    kb, _ = parse_document(doc)
    grain = kb.get_local_attr("bird", ["grain"])
    assert grain.value == "seed"
    assert kb.get_local_attr("bird", ["grain", "color"]).value == "yellow"


def test_inline_definitions_and_contains():
    kb, _ = parse_document((DATA / "cli_corpus" / "18_nested_inline.xmlkr").read_bytes())
    assert kb.declaration_order == ["Tweety", "bird", "animal", "beak"]
    assert [(e.kind.label, e.target) for e in kb.get("Tweety").edges] == [
        ("isa", "bird"), ("contains", "beak")]
    assert kb.neighbors("bird", AKO) == ["animal"]
    assert kb.neighbors("animal") == ["Tweety"]
    assert kb.get("animal").edges[0].kind == RelationKind("part-of")
    assert not any(node.stub for node in kb)


def test_reencountered_open_object_is_a_reference():
    doc = """<xmlkr version="1.0">
      <object name="A"><object name="B"><object name="A"/></object></object>
    </xmlkr>"""
    kb, _ = parse_document(doc)
    assert kb.neighbors("A") == ["B"] and kb.neighbors("B") == ["A"]
    bad = doc.replace('<object name="A"/>', '<object name="A"><attr name="x">1</attr></object>')
    with pytest.raises(DuplicateObject) as info:
        parse_document(bad)
    assert info.value.line == 2


def test_kind_of_is_ako_and_labels_lowercased():
    kb, _ = parse_document('<xmlkr version="1.0"><object name="r">'
                           '<rel kind="Kind-Of" ref="m"/><rel kind="SAME-AS" ref="s"/></object></xmlkr>')
    assert [e.kind for e in kb.get("r").edges] == [AKO, RelationKind("same-as")]
    assert '<ako ref="m"/>' in serialize_flat(kb)


@pytest.mark.parametrize("doc, error, line, column", [
    ('<xmlkr version="2.0"/>', UnknownRootVersion, 1, 1),
    ("<xmlkr/>", UnknownRootVersion, 1, 1),
    ('<kb version="1.0"/>', InvalidStructure, 1, 1),
    ('<xmlkr version="1.0">\n <object/>\n</xmlkr>', InvalidStructure, 2, 2),
    ('<xmlkr version="1.0">\n <object name=" "/>\n</xmlkr>', InvalidStructure, 2, 2),
    ('<xmlkr version="1.0">\n <object name="a" id="x"/>\n</xmlkr>', InvalidStructure, 2, 2),
    ('<xmlkr version="1.0">\n <attr name="a">1</attr>\n</xmlkr>', InvalidStructure, 2, 2),
    ('<xmlkr version="1.0">\n <object name="a">\n  <isa/>\n </object>\n</xmlkr>', InvalidStructure, 3, 3),
    ('<xmlkr version="1.0">\n <object name="a">\n  <isa ref="b"><ref name="c"/></isa>\n </object>\n</xmlkr>',
     InvalidStructure, 3, 3),
    ('<xmlkr version="1.0">\n <object name="a">\n  <rel ref="b"/>\n </object>\n</xmlkr>', InvalidStructure, 3, 3),
    ('<xmlkr version="1.0">\n <object name="a">\n  <rel kind="no way" ref="b"/>\n </object>\n</xmlkr>',
     InvalidStructure, 3, 3),
    ('<xmlkr version="1.0">\n <object name="a">\n  <attr name="x"/>\n </object>\n</xmlkr>', InvalidAttribute, 3, 3),
    ('<xmlkr version="1.0">\n <object name="a">\n  <attr name="x"><isa ref="b"/></attr>\n </object>\n</xmlkr>',
     InvalidStructure, 3, 18),
    ('<xmlkr version="1.0">\n <object name="a"/>\n <object name="a"/>\n</xmlkr>', DuplicateObject, 3, 2),
    ('<xmlkr version="1.0">\n <object name="a">\n  <attr name="g"><attr name="c">1</attr>'
     '<attr name="c">2</attr></attr>\n </object>\n</xmlkr>', DuplicateAttribute, 3, 3),
    ('<xmlkr version="1.0">\n <object name="a">\n  <attr name="x">1</attr>\n  <attr name="x">1</attr>'
     '\n </object>\n</xmlkr>', DuplicateAttribute, 4, 3),
    ('<xmlkr version="1.0">hello</xmlkr>', InvalidStructure, 1, 22),
    ('<xmlkr version="1.0"><object name="a">', MalformedXml, 1, 39),
])
def test_parse_errors_are_positioned(doc, error, line, column):
    with pytest.raises(error) as info:
        parse_document(doc)
    assert (info.value.line, info.value.column) == (line, column), str(info.value)


def test_serialize_flat_loop_shape():
    out = serialize_flat(loop_kb())
    root = ET.fromstring(out)
    assert [o.get("name") for o in root.findall("object")] == ["A", "B", "C"]
    assert len(root.findall("object/rel")) == 3
    assert out == (DATA / "golden" / "loop.flat.xmlkr").read_text()


def test_serialize_empty_kb():
    assert serialize_flat(new_kb()) == '<xmlkr version="1.0"/>\n'


def test_stubs_are_not_written_but_come_back():
    kb, _ = parse_document((DATA / "persia.xmlkr").read_bytes())
    out = serialize_flat(kb)
    assert 'name="Car"' not in out
    again, _ = parse_document(out)
    assert canonical_equal(kb, again)


def test_escaping():
    kb = new_kb()
    kb.add_object('a<&>"\'', [attr("v", 'x < y & "z" \'w\'')])
    kb.add_relation('a<&>"\'', "same-as", "b&c")
    out = serialize_flat(kb)
    assert "&lt;&amp;&gt;&quot;&apos;" in out
    tree = ET.fromstring(out)
    assert tree.find("object").get("name") == 'a<&>"\''
    again, _ = parse_document(out)
    assert canonical_equal(kb, again)


def test_nested_loop_from_a():
    out = serialize_nested(loop_kb(), "A")
    assert out == (DATA / "golden" / "loop.nested-A.xmlkr").read_text()
    root = ET.fromstring(out)
    c = root.find(".//object[@name='C']")
    assert c.find(".//ref").get("name") == "A"
    assert len(root.findall(".//object")) == 3


def test_nested_single_object():
    kb = new_kb()
    kb.add_object("solo", [attr("x", "1")])
    out = serialize_nested(kb, "solo")
    assert "<ref" not in out
    assert out == serialize_flat(kb)


def test_nested_unknown_root():
    with pytest.raises(UnknownObject):
        serialize_nested(new_kb(), "nope")
    with pytest.raises(UnknownObject):
        serialize(new_kb(), Nested("nope"))


def test_nested_stub_root_and_unreachable_objects():
    kb, _ = parse_document((DATA / "persia.xmlkr").read_bytes())
    kb.add_object("Lonely", [attr("mood", "blue")])
    out = serialize_nested(kb, "Car")
    assert out == serialize_flat(kb)
    out = serialize_nested(kb, "Persia")
    again, _ = parse_document(out)
    assert canonical_equal(kb, again)


def test_nested_diamond_defines_shared_target_once():
    kb = new_kb()
    kb.add_object("top")
    kb.add_relation("top", ISA, "left")
    kb.add_relation("top", ISA, "right")
    kb.add_object("left")
    kb.add_relation("left", AKO, "base")
    kb.add_object("right")
    kb.add_relation("right", AKO, "base")
    kb.add_object("base", [attr("legs", "4")])
    out = serialize_nested(kb, "top")
    root = ET.fromstring(out)
    assert len(root.findall(".//object[@name='base']")) == 1
    assert "<ref" not in out
    again, _ = parse_document(out)
    assert canonical_equal(kb, again)


def test_nested_deep_chain_does_not_recurse():
    kb = new_kb()
    n = 3000
    for i in range(n):
        kb.add_object(f"n{i}")
        kb.add_relation(f"n{i}", AKO, f"n{i + 1}")
    kb.add_object(f"n{n}")
    out = serialize_nested(kb, "n0")
    again, _ = parse_document(out)
    assert canonical_equal(kb, again)


def ref_violations(document: str):
    """Walk the output with the stdlib parser: every <ref> must name an object
    element enclosing it. Returns the offending names."""
    bad = []

    def walk(el, path):
        if el.tag == "object":
            path = path + [el.get("name")]
        if el.tag == "ref" and el.get("name") not in path:
            bad.append(el.get("name"))
        for child in el:
            walk(child, path)

    walk(ET.fromstring(document), [])
    return bad


def random_dag(rng, n):
    kb = new_kb()
    names = [f"d{i}" for i in range(n)]
    for i, name in enumerate(names):
        kb.add_object(name, [attr("i", str(i))] if rng.random() < 0.5 else [])
    for i, name in enumerate(names):
        later = names[i + 1:]
        for target in rng.sample(later, min(len(later), rng.randint(0, 3))):
            kb.add_relation(name, rng.choice([ISA, AKO, RelationKind("part-of")]), target)
    return kb


@pytest.mark.parametrize("seed", range(40))
def test_nested_dag_has_no_refs(seed):
    rng = random.Random(seed)
    kb = random_dag(rng, rng.randint(1, 30))
    for root in kb.declaration_order:
        out = serialize_nested(kb, root)
        assert ref_violations(out) == []
        assert "<ref" not in out
        again, _ = parse_document(out)
        assert canonical_equal(kb, again)


@pytest.mark.parametrize("seed", range(40))
def test_nested_refs_only_close_cycles_on_path(seed):
    rng = random.Random(1000 + seed)
    kb = random_kb(rng, max_objects=30, force_cycle=True)
    for root in kb.declaration_order[:5]:
        out = serialize_nested(kb, root)
        assert ref_violations(out) == []
        root_el = ET.fromstring(out)
        defined = [o.get("name") for o in root_el.iter("object")]
        assert len(defined) == len(set(defined)) == len(kb) - kb.stub_count


def test_canonical_equal_is_order_sensitive():
    a = new_kb()
    a.add_object("x")
    a.add_relation("x", ISA, "p")
    a.add_relation("x", ISA, "q")
    b = new_kb()
    b.add_object("x")
    b.add_relation("x", ISA, "q")
    b.add_relation("x", ISA, "p")
    assert canonical_equal(a, a)
    assert not canonical_equal(a, b)
    c = new_kb()
    c.add_object("x", [attr("k", "v")])
    c.add_relation("x", ISA, "p")
    c.add_relation("x", ISA, "q")
    assert not canonical_equal(a, c)


def test_flat_order_ignores_declaration_order():
    # Y is referenced first, defined last, and only then points at X
    doc = """<xmlkr version="1.0">
      <object name="W"><isa ref="Y"/></object>
      <object name="Z"/>
      <object name="X"/>
      <object name="Y"><ako ref="X"/></object>
    </xmlkr>"""
    kb, _ = parse_document(doc)
    assert kb.declaration_order == ["W", "Y", "Z", "X"]
    once = serialize_flat(kb)
    assert [o.get("name") for o in ET.fromstring(once).findall("object")] == ["W", "X", "Y", "Z"]
    assert serialize_flat(parse_document(once)[0]) == once
    # the same content declared in another order exports identically
    kb2 = new_kb()
    kb2.add_object("Z")
    kb2.add_object("Y")
    kb2.add_relation("Y", AKO, "X")
    kb2.add_object("X")
    kb2.add_object("W")
    kb2.add_relation("W", ISA, "Y")
    assert serialize_flat(kb2) == once


def test_serialize_dispatch():
    kb = loop_kb()
    assert serialize(kb) == serialize(kb, Flat()) == serialize_flat(kb)
    assert serialize(kb, Nested("B")) == serialize_nested(kb, "B")


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_round_trips(seed, cyclic):
    rng = random.Random(seed)
    kb = random_kb(rng, max_objects=25, force_cycle=cyclic)
    flat = serialize_flat(kb)
    again, _ = parse_document(flat.encode("utf-8"))
    assert canonical_equal(again, kb)
    assert serialize_flat(again) == flat
    written = [o.get("name") for o in ET.fromstring(flat).findall("object")]
    assert written == sorted(n for n in kb.declaration_order if not kb.get(n).stub)
    root = rng.choice(kb.declaration_order)
    nested, _ = parse_document(serialize_nested(kb, root))
    assert canonical_equal(nested, kb)

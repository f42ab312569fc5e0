"""File grammars: algebra, certificate, witness, reference tables."""

from fractions import Fraction

import pytest

from jsdeg.exact import MPoly, parse_poly
from jsdeg.formats import (
    AlgebraValidationError,
    FileFormatError,
    canonicalize_coordinate_poly,
    expand_printed_equation,
    latex_tokens,
    load_catalogue,
    parse_algebra_file,
    parse_certificate_file,
    parse_reference_table,
    parse_witness_file,
    serialize_algebra,
    serialize_certificate,
)

IDEM = """\
# idempotent on one even generator
id (1,0)_idem
type 1 0
prod e1 e1 = 1 e1
"""


def test_parse_algebra_minimal():
    entry = parse_algebra_file(IDEM, "idem.alg")
    assert entry.id == "(1,0)_idem"
    assert entry.structure.entry(1, 1, 1) == MPoly.one()


def test_supercommutative_completion():
    text = "type 2 2\nprod f1 f2 = 1 e1\n"
    entry = parse_algebra_file(text, "t.alg")
    assert entry.structure.entry(3, 4, 1) == MPoly.one()
    assert entry.structure.entry(4, 3, 1) == MPoly.const(-1)


def test_unknown_basis_element_rejected():
    with pytest.raises(FileFormatError) as err:
        parse_algebra_file("type 3 1\nprod e1 e9 = 1 e1\n", "bad.alg")
    assert err.value.line == 2


def test_grading_violation_rejected():
    # even * even cannot land on the odd part
    with pytest.raises(FileFormatError):
        parse_algebra_file("type 1 1\nprod e1 e1 = 1 f1\n", "bad.alg")


def test_identity_violation_reported_with_list():
    text = "type 2 0\nprod e1 e1 = 1 e2\nprod e2 e2 = 1 e1\n"
    with pytest.raises(AlgebraValidationError) as err:
        parse_algebra_file(text, "nonjordan.alg")
    assert err.value.violations
    # without validation the entry still parses
    entry = parse_algebra_file(text, "nonjordan.alg", validate=False)
    assert entry.structure.entry(1, 1, 2) == MPoly.one()


def test_parametric_algebra():
    text = "type 1 1\nparam gamma\nprod e1 e1 = gamma e1\n"
    entry = parse_algebra_file(text, "param.alg", validate=False)
    assert entry.structure.parameters == ("gamma",)
    assert entry.structure.entry(1, 1, 1) == MPoly.variable("gamma")
    with pytest.raises(FileFormatError):
        parse_algebra_file("type 1 1\nprod e1 e1 = gamma e1\n", "undeclared.alg")


def test_algebra_roundtrip():
    text = "type 2 1\nprod e1 e1 = 1 e1\nprod e1 f1 = 1/2 f1\nprod e2 e2 = 1 e1\n"
    entry = parse_algebra_file(text, "rt.alg", validate=False)
    again = parse_algebra_file(serialize_algebra(entry), "rt2.alg", validate=False)
    assert again.structure == entry.structure
    assert again.id == entry.id


def test_load_catalogue(tmp_path):
    (tmp_path / "a.alg").write_text(IDEM)
    (tmp_path / "b.alg").write_text("id (1,0)_zero\ntype 1 0\n")
    cat = load_catalogue(tmp_path)
    assert set(cat) == {"(1,0)_idem", "(1,0)_zero"}
    (tmp_path / "c.alg").write_text(IDEM)
    with pytest.raises(FileFormatError):
        load_catalogue(tmp_path)


CERT = """\
pair (2,2) 20, 38 !-> 47
src c_{22}^1 = c_{34}^1 = 0
eq c22^1
eq c34^1
"""


def test_parse_certificate():
    cf = parse_certificate_file(CERT, "s20_38_t47.cert")
    assert cf.mtype == (2, 2)
    assert cf.sources == ("20", "38")
    assert cf.targets == ("47",)
    assert cf.pairs == [("20", "47"), ("38", "47")]
    assert len(cf.closed_set.equations) == 2
    assert cf.closed_set.name == "s20_38_t47"


def test_certificate_roundtrip():
    cf = parse_certificate_file(CERT, "s20_38_t47.cert")
    text = serialize_certificate(cf)
    again = parse_certificate_file(text, "s20_38_t47.cert")
    assert again.closed_set.equations == cf.closed_set.equations
    assert again.sources == cf.sources and again.targets == cf.targets
    assert again.src_texts == cf.src_texts


def test_certificate_mixed_index_canonicalization():
    cf = parse_certificate_file("pair (3,1) 1 !-> 2\neq c21^2 + c11^1\n", "c.cert")
    assert cf.closed_set.equations[0] == parse_poly("c12^2 + c11^1")


def test_certificate_odd_square_variable_collapses():
    # c44^1 is legal syntax for type (3,1) but names the zero coordinate;
    # it vanishes from the equation
    cf = parse_certificate_file("pair (3,1) 1 !-> 2\neq c44^1 + c11^1\n", "c.cert")
    assert cf.closed_set.equations[0] == parse_poly("c11^1")
    # an equation that is nothing but the zero coordinate collapses entirely
    with pytest.raises(FileFormatError):
        parse_certificate_file("pair (3,1) 1 !-> 2\neq c44^1\n", "c.cert")


def test_certificate_grading_violation():
    with pytest.raises(FileFormatError):
        parse_certificate_file("pair (3,1) 1 !-> 2\neq c14^2\n", "c.cert")


def test_certificate_needs_equations():
    with pytest.raises(FileFormatError):
        parse_certificate_file("pair (3,1) 1 !-> 2\n", "c.cert")


def test_certificate_field_line():
    ok = "pair (1,0) 1 !-> 2\nfield rational\neq c11^1\n"
    assert parse_certificate_file(ok, "c.cert").closed_set.equations
    with pytest.raises(FileFormatError):
        parse_certificate_file(ok.replace("rational", "real"), "c.cert")


def test_certificate_constant_term_rejected():
    with pytest.raises(FileFormatError):
        parse_certificate_file("pair (1,0) 1 !-> 2\neq c11^1 - 1\n", "c.cert")


def test_latex_tokens_strip_macros():
    toks = latex_tokens(r"c_{12}^3 = 2\,c_{13}^{2}")
    kinds = [t[0] for t in toks]
    assert ("c", 1, 2, 3) in toks
    assert ("c", 1, 3, 2) in toks
    assert kinds.count("op") >= 1


def test_expand_printed_equation_chain():
    polys = expand_printed_equation(r"c_{11}^2 = c_{12}^3 = 0", (3, 1))
    # two members against the last: c11^2 - 0 and c12^3 - 0
    assert parse_poly("c11^2") in polys
    assert parse_poly("c12^3") in polys
    assert len(polys) == 2


def test_expand_printed_equation_arithmetic():
    polys = expand_printed_equation(r"c_{22}^2 = 2c_{23}^3", (2, 2))
    assert polys == [parse_poly("c22^2 - 2*c23^3")]


def test_parse_witness_file():
    text = "type 1 1\nsource id:a\ntarget id:b\neven 1 1 = t^-1\nodd 1 1 = 1 + t\n"
    wf = parse_witness_file(text, "w.wit")
    assert wf.mtype == (1, 1)
    g = wf.to_change()
    assert g.domain == "laurent"
    with pytest.raises(FileFormatError):
        parse_witness_file("type 1 1\neven 1 1 = t\n", "w.wit")
    # refs optional only on request (for plain change files)
    wf2 = parse_witness_file("type 1 1\neven 1 1 = 2\nodd 1 1 = 1\n", "c.chg", require_refs=False)
    assert wf2.source_ref is None


def test_witness_entry_out_of_range():
    with pytest.raises(FileFormatError):
        parse_witness_file("type 1 1\nsource id:a\ntarget id:b\neven 2 1 = t\n", "w.wit")


TABLE = """\
table (1,1)
pairs (a,b); (a,c)
row a !-> b, c
c_{11}^1 = 0
"""


def test_parse_reference_table():
    tb = parse_reference_table(TABLE, "t.txt")
    assert tb.mtype == (1, 1)
    assert tb.statement_pairs == (("a", "b"), ("a", "c"))
    assert len(tb.rows) == 1
    assert tb.rows[0].sources == ("a",)
    assert tb.rows[0].printed_equations == (r"c_{11}^1 = 0",)

"""File formats.

Four line-oriented grammars, all UTF-8 with '#' comments:

algebra files      `type M N`, optional `id`, `source`, `param` lines, then
                   `prod B1 B2 = COEF B3 [+ COEF B3 ...]` with basis names
                   e1..eM, f1..fN.  Unlisted products are zero and the
                   supercommutative mirror of every listed product is filled
                   in automatically.

certificate files  `pair (M,N) SRC[,SRC...] !-> TGT[,TGT...]`, then `eq POLY`
                   lines in cIJ^K coordinates.  Optional `src` lines keep the
                   equations exactly as printed in the reference tables
                   (chained equalities allowed), an optional `note` line
                   carries free text, and a reserved `field` line must say
                   `rational` if present.

witness files      `type M N`, `source REF`, `target REF`, then block entries
                   `even R C = LAURENT` / `odd R C = LAURENT` (entries not
                   listed are zero).  REF is either `id:LABEL`, resolved in a
                   catalogue, or a path to an algebra file.

reference tables   `table (M,N)`, `pairs (a,b); (c,d); ...` lines, then
                   `row SRC[,SRC...] !-> TGT[,TGT...]` headers followed by
                   one printed equation (chain) per line.

Printed equations use a small LaTeX-like dialect (`c_{12}^3`, implicit
multiplication, chained `=`).  They are tokenized, compared token-by-token
in tests, and expanded into canonical polynomials: every member of a chain
minus its last member.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .action import BasisChange
from .certificate import ClosedSet
from .exact import LaurentPoly, MPoly, PolyParseError, parse_laurent, parse_poly, structure_var, structure_var_indices
from .superalgebra import (
    SuperStructure,
    canonical_index,
    check_jordan_superidentity,
    check_supercommutativity,
    grading_ok,
)


class FileFormatError(ValueError):
    """Syntax or semantic error in an input file, with a line number."""

    def __init__(self, name: str, line: int, message: str):
        super().__init__(f"{name}:{line}: {message}")
        self.file = name
        self.line = line
        self.reason = message


class AlgebraValidationError(FileFormatError):
    """The completed table violates supercommutativity or the structure
    identity; carries the violation list."""

    def __init__(self, name: str, violations):
        self.violations = tuple(violations)
        kinds = {type(v).__name__ for v in self.violations}
        super().__init__(name, 0, f"{len(self.violations)} identity violation(s): {', '.join(sorted(kinds))}")


def _lines(text: str):
    """(lineno, stripped payload) for non-empty non-comment lines."""
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body


# ---------------------------------------------------------------------------
# Algebra files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogueEntry:
    id: str
    structure: SuperStructure
    source_note: str = ""


_TYPE_RE = re.compile(r"^type\s+(\d+)\s+(\d+)$")
_PROD_RE = re.compile(r"^prod\s+([ef]\d+)\s+([ef]\d+)\s*=\s*(.+)$")


def _basis_index(name: str, m: int, n: int, fname: str, lineno: int) -> int:
    kind, num = name[0], int(name[1:])
    if kind == "e":
        if not 1 <= num <= m:
            raise FileFormatError(fname, lineno, f"basis element {name} out of range for type ({m},{n})")
        return num
    if not 1 <= num <= n:
        raise FileFormatError(fname, lineno, f"basis element {name} out of range for type ({m},{n})")
    return m + num


def _split_terms(text: str):
    """Split a sum at top-level + and - (parentheses respected), keeping
    each sign with its chunk."""
    chunks = []
    depth = 0
    cur = ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and cur.strip():
            chunks.append(cur)
            cur = ch
            continue
        cur += ch
    if cur.strip():
        chunks.append(cur)
    return chunks


def parse_algebra_file(text: str, name: str = "<algebra>", validate: bool = True) -> CatalogueEntry:
    """Parse and validate one algebra file into a catalogue entry."""
    mtype = None
    entry_id = None
    source_note = ""
    params: list[str] = []
    prods: dict[tuple[int, int], tuple[int, str]] = {}
    entries: dict[tuple[int, int, int], MPoly] = {}
    for lineno, body in _lines(text):
        if body.startswith("id "):
            entry_id = body[3:].strip()
            continue
        if body.startswith("source "):
            source_note = body[7:].strip()
            continue
        mt = _TYPE_RE.match(body)
        if mt:
            if mtype is not None:
                raise FileFormatError(name, lineno, "duplicate type line")
            mtype = (int(mt.group(1)), int(mt.group(2)))
            continue
        if body.startswith("param "):
            if mtype is None:
                raise FileFormatError(name, lineno, "param before type")
            pname = body[6:].strip()
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9]*", pname) or pname[0] in "ef":
                raise FileFormatError(name, lineno, f"bad parameter name {pname!r}")
            if pname in params:
                raise FileFormatError(name, lineno, f"duplicate parameter {pname!r}")
            params.append(pname)
            continue
        mp = _PROD_RE.match(body)
        if mp:
            if mtype is None:
                raise FileFormatError(name, lineno, "prod before type")
            m, n = mtype
            i = _basis_index(mp.group(1), m, n, name, lineno)
            j = _basis_index(mp.group(2), m, n, name, lineno)
            if (i, j) in prods:
                raise FileFormatError(name, lineno, f"duplicate product {mp.group(1)} {mp.group(2)}")
            prods[(i, j)] = (lineno, body)
            for chunk in _split_terms(mp.group(3)):
                parts = chunk.rsplit(None, 1)
                if len(parts) != 2 or not re.fullmatch(r"[ef]\d+", parts[1]):
                    raise FileFormatError(name, lineno, f"expected 'COEF BASIS' in {chunk.strip()!r}")
                coef_text, basis = parts
                k = _basis_index(basis, m, n, name, lineno)
                try:
                    coef = parse_poly(coef_text)
                except PolyParseError as exc:
                    raise FileFormatError(name, lineno, f"bad coefficient {coef_text.strip()!r}: {exc}") from exc
                stray = [v for v in coef.vars if v not in params]
                if stray:
                    raise FileFormatError(name, lineno, f"undeclared parameter(s) {', '.join(stray)}")
                if not grading_ok(m, n, i, j, k):
                    if not coef.is_zero():
                        raise FileFormatError(
                            name, lineno,
                            f"grading violation: {mp.group(1)} {mp.group(2)} cannot produce {basis}")
                    continue
                if coef.is_zero():
                    continue
                prev = entries.get((i, j, k), MPoly.zero())
                entries[(i, j, k)] = prev + coef
            continue
        raise FileFormatError(name, lineno, f"unrecognized line {body!r}")
    if mtype is None:
        raise FileFormatError(name, 0, "missing type line")
    J = SuperStructure(mtype[0], mtype[1], entries, parameters=tuple(params), complete=True)
    if validate:
        violations = list(check_supercommutativity(J)) + list(check_jordan_superidentity(J))
        if violations:
            raise AlgebraValidationError(name, violations)
    stem = Path(name).stem if name not in ("<algebra>", "") else name
    return CatalogueEntry(entry_id or stem, J, source_note)


def serialize_algebra(entry: CatalogueEntry) -> str:
    """Inverse of parse_algebra_file up to formatting: canonical products
    only, coefficients printed exactly."""
    J = entry.structure
    out = [f"id {entry.id}"]
    if entry.source_note:
        out.append(f"source {entry.source_note}")
    out.append(f"type {J.m} {J.n}")
    for p in J.parameters:
        out.append(f"param {p}")
    dim = J.m + J.n

    def basis_name(i: int) -> str:
        return f"e{i}" if i <= J.m else f"f{i - J.m}"

    for i in range(1, dim + 1):
        for j in range(i, dim + 1):
            terms = []
            for k in range(1, dim + 1):
                c = J.entry(i, j, k)
                if c.is_zero():
                    continue
                txt = c.to_text(surface=False)
                if " " in txt:
                    txt = f"({txt})"
                terms.append(f"{txt} {basis_name(k)}")
            if terms:
                out.append(f"prod {basis_name(i)} {basis_name(j)} = " + " + ".join(terms))
    return "\n".join(out) + "\n"


def load_catalogue(path: str | Path, validate: bool = True) -> dict[str, CatalogueEntry]:
    """All *.alg files of a directory, keyed by entry id."""
    path = Path(path)
    if not path.is_dir():
        raise FileNotFoundError(f"catalogue directory not found: {path}")
    out: dict[str, CatalogueEntry] = {}
    for f in sorted(path.glob("*.alg")):
        entry = parse_algebra_file(f.read_text(), str(f), validate=validate)
        if entry.id in out:
            raise FileFormatError(str(f), 0, f"duplicate catalogue id {entry.id!r}")
        out[entry.id] = entry
    return out


# ---------------------------------------------------------------------------
# Canonicalization of coordinate polynomials
# ---------------------------------------------------------------------------


def canonicalize_coordinate_poly(p: MPoly, mtype: tuple[int, int]) -> MPoly:
    """Rewrite a polynomial in cIJ^K variables over the canonical
    coordinates: indices swapped to i <= j with the supercommutativity sign,
    odd diagonal variables replaced by zero.  Raises on grading violations
    and on variables that are not structure coordinates."""
    m, n = mtype
    dim = m + n
    bindings: dict[str, MPoly] = {}
    for v in p.vars:
        t = structure_var_indices(v)
        if t is None:
            raise ValueError(f"{v} is not a structure coordinate")
        i, j, k = t
        if not all(1 <= x <= dim for x in (i, j, k)):
            raise ValueError(f"{v}: index out of range for type ({m},{n})")
        if not grading_ok(m, n, i, j, k):
            raise ValueError(f"{v}: grading violation for type ({m},{n})")
        sign, canon = canonical_index(m, n, i, j, k)
        if canon is None:
            bindings[v] = MPoly.zero()
        elif canon != (i, j, k) or sign != 1:
            bindings[v] = MPoly.variable(structure_var(*canon)) * sign
    return p.substitute(bindings) if bindings else p


# ---------------------------------------------------------------------------
# Printed (LaTeX-like) equations
# ---------------------------------------------------------------------------

_LATEX_NOISE = re.compile(r"\\[A-Za-z]+|\\.|[{}]|\s")
_LATEX_TOKEN = re.compile(
    r"c_?(?P<pi>\d)(?P<pj>\d)\^(?P<pk>\d)"
    r"|(?P<num>\d+(?:/\d+)?)"
    r"|(?P<name>[A-Za-z]+)"
    r"|(?P<op>[+\-=()^*])"
)


def latex_tokens(text: str) -> tuple:
    """Normalized token stream of a printed equation.  Structure constants
    become ('c', i, j, k), numbers ('n', text), names ('v', text) and
    operators ('op', ch); whitespace, braces and LaTeX size macros are
    dropped, so c_{12}^3, c_{12}^{3} and c12^3 all read the same."""
    cleaned = _LATEX_NOISE.sub("", text)
    out = []
    pos = 0
    while pos < len(cleaned):
        mm = _LATEX_TOKEN.match(cleaned, pos)
        if not mm:
            raise ValueError(f"cannot tokenize printed equation at {cleaned[pos:pos+12]!r}")
        pos = mm.end()
        if mm.group("pi"):
            out.append(("c", int(mm.group("pi")), int(mm.group("pj")), int(mm.group("pk"))))
        elif mm.group("num"):
            out.append(("n", mm.group("num")))
        elif mm.group("name"):
            out.append(("v", mm.group("name")))
        elif mm.group("op"):
            out.append(("op", mm.group("op")))
    return tuple(out)


def _tokens_to_plain(tokens) -> str:
    """Rebuild a token run as input for parse_poly, making the implicit
    multiplication of the printed form explicit."""
    atoms_left = {"c", "n", "v"}
    parts: list[str] = []
    prev = None
    for tok in tokens:
        kind = tok[0]
        if kind == "c":
            text = f"c{tok[1]}{tok[2]}^{tok[3]}"
        elif kind in ("n", "v"):
            text = tok[1]
        else:
            text = tok[1]
        starts_atom = kind in atoms_left or text == "("
        ends_atom = prev is not None and (prev[0] in atoms_left or prev[1] == ")")
        if starts_atom and ends_atom:
            parts.append("*")
        parts.append(text)
        prev = (kind, text)
    return "".join(parts)


def expand_printed_equation(text: str, mtype: tuple[int, int]) -> list[MPoly]:
    """Canonical polynomials of a printed (possibly chained) equation:
    each chain member minus the last member."""
    tokens = latex_tokens(text)
    members: list[list] = [[]]
    for tok in tokens:
        if tok == ("op", "="):
            members.append([])
        else:
            members[-1].append(tok)
    if len(members) < 2:
        raise ValueError(f"printed equation has no '=': {text!r}")
    polys = []
    for member in members:
        if not member:
            raise ValueError(f"empty chain member in {text!r}")
        polys.append(canonicalize_coordinate_poly(parse_poly(_tokens_to_plain(member)), mtype))
    last = polys[-1]
    return [p - last for p in polys[:-1]]


# ---------------------------------------------------------------------------
# Certificate files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CertificateFile:
    name: str
    mtype: tuple[int, int]
    sources: tuple[str, ...]
    targets: tuple[str, ...]
    closed_set: ClosedSet
    eq_texts: tuple[str, ...]
    src_texts: tuple[str, ...] = ()
    note: str = ""

    @property
    def pairs(self) -> list[tuple[str, str]]:
        return [(s, t) for s in self.sources for t in self.targets]


_PAIR_RE = re.compile(r"^pair\s+\((\d+)\s*,\s*(\d+)\)\s+(.+?)\s*!->\s*(.+)$")
_LABEL_RE = re.compile(r"^[A-Za-z0-9]\w*$")


def _id_list(text: str, fname: str, lineno: int) -> tuple[str, ...]:
    labels = [x.strip() for x in text.split(",")]
    for lab in labels:
        if not _LABEL_RE.match(lab):
            raise FileFormatError(fname, lineno, f"bad structure label {lab!r}")
    if len(set(labels)) != len(labels):
        raise FileFormatError(fname, lineno, "repeated structure label")
    return tuple(labels)


def parse_certificate_file(text: str, name: str = "<certificate>") -> CertificateFile:
    """Parse one certificate file; equations are canonicalized and must
    individually constrain something and vanish at the zero structure."""
    mtype = None
    sources: tuple[str, ...] = ()
    targets: tuple[str, ...] = ()
    eqs: list[MPoly] = []
    eq_texts: list[str] = []
    src_texts: list[str] = []
    note = ""
    for lineno, body in _lines(text):
        mp = _PAIR_RE.match(body)
        if mp:
            if mtype is not None:
                raise FileFormatError(name, lineno, "duplicate pair line")
            mtype = (int(mp.group(1)), int(mp.group(2)))
            sources = _id_list(mp.group(3), name, lineno)
            targets = _id_list(mp.group(4), name, lineno)
            continue
        if body.startswith("field"):
            value = body[5:].strip()
            if value != "rational":
                raise FileFormatError(name, lineno, f"unsupported field {value!r} (only rational)")
            continue
        if body.startswith("note "):
            note = body[5:].strip()
            continue
        if body.startswith("src "):
            if mtype is None:
                raise FileFormatError(name, lineno, "src before pair line")
            src_texts.append(body[4:].strip())
            continue
        if body.startswith("eq "):
            if mtype is None:
                raise FileFormatError(name, lineno, "eq before pair line")
            raw = body[3:].strip()
            try:
                p = parse_poly(raw)
            except PolyParseError as exc:
                raise FileFormatError(name, lineno, f"malformed polynomial: {exc}") from exc
            try:
                p = canonicalize_coordinate_poly(p, mtype)
            except ValueError as exc:
                raise FileFormatError(name, lineno, str(exc)) from exc
            if p.is_zero():
                raise FileFormatError(name, lineno, "equation is identically zero after canonicalization")
            if p.constant_term():
                raise FileFormatError(name, lineno, "equation has a nonzero constant term")
            eqs.append(p)
            eq_texts.append(raw)
            continue
        raise FileFormatError(name, lineno, f"unrecognized line {body!r}")
    if mtype is None:
        raise FileFormatError(name, 0, "missing pair line")
    if not eqs:
        raise FileFormatError(name, 0, "empty equation list (certificates must constrain something)")
    stem = Path(name).stem if name not in ("<certificate>", "") else name
    closed = ClosedSet(stem, mtype, tuple(eqs))
    return CertificateFile(stem, mtype, sources, targets, closed, tuple(eq_texts), tuple(src_texts), note)


def serialize_certificate(cf: CertificateFile) -> str:
    m, n = cf.mtype
    out = [f"pair ({m},{n}) {', '.join(cf.sources)} !-> {', '.join(cf.targets)}"]
    if cf.note:
        out.append(f"note {cf.note}")
    for s in cf.src_texts:
        out.append(f"src {s}")
    for t in cf.eq_texts:
        out.append(f"eq {t}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Reference tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    sources: tuple[str, ...]
    targets: tuple[str, ...]
    printed_equations: tuple[str, ...]

    def pairs(self) -> list[tuple[str, str]]:
        return [(s, t) for s in self.sources for t in self.targets]


@dataclass(frozen=True)
class ReferenceTable:
    name: str
    mtype: tuple[int, int]
    statement_pairs: tuple[tuple[str, str], ...]
    rows: tuple[TableRow, ...]


_TABLE_RE = re.compile(r"^table\s+\((\d+)\s*,\s*(\d+)\)$")
_ROW_RE = re.compile(r"^row\s+(.+?)\s*!->\s*(.+)$")
_PAIRS_ITEM_RE = re.compile(r"\(\s*([A-Za-z0-9]\w*)\s*,\s*([A-Za-z0-9]\w*)\s*\)")


def parse_reference_table(text: str, name: str = "<table>") -> ReferenceTable:
    mtype = None
    pairs: list[tuple[str, str]] = []
    rows: list[TableRow] = []
    current: tuple[tuple[str, ...], tuple[str, ...]] | None = None
    current_eqs: list[str] = []

    def close_row(lineno):
        nonlocal current, current_eqs
        if current is not None:
            if not current_eqs:
                raise FileFormatError(name, lineno, "table row has no equations")
            rows.append(TableRow(current[0], current[1], tuple(current_eqs)))
        current, current_eqs = None, []

    for lineno, body in _lines(text):
        mt = _TABLE_RE.match(body)
        if mt:
            if mtype is not None:
                raise FileFormatError(name, lineno, "duplicate table line")
            mtype = (int(mt.group(1)), int(mt.group(2)))
            continue
        if body.startswith("pairs"):
            found = _PAIRS_ITEM_RE.findall(body[5:])
            if not found:
                raise FileFormatError(name, lineno, "no (source,target) items on pairs line")
            pairs.extend(found)
            continue
        mr = _ROW_RE.match(body)
        if mr:
            close_row(lineno)
            current = (_id_list(mr.group(1), name, lineno), _id_list(mr.group(2), name, lineno))
            continue
        if current is None:
            raise FileFormatError(name, lineno, f"unrecognized line {body!r}")
        current_eqs.append(body)
    close_row(0)
    if mtype is None:
        raise FileFormatError(name, 0, "missing table line")
    if len(set(pairs)) != len(pairs):
        raise FileFormatError(name, 0, "repeated statement pair")
    return ReferenceTable(Path(name).stem, mtype, tuple(pairs), tuple(rows))


# ---------------------------------------------------------------------------
# Witness files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessFile:
    name: str
    mtype: tuple[int, int]
    source_ref: str | None
    target_ref: str | None
    even: dict[tuple[int, int], LaurentPoly] = field(default_factory=dict)
    odd: dict[tuple[int, int], LaurentPoly] = field(default_factory=dict)

    def to_change(self) -> BasisChange:
        """The curve as a basis change with Laurent entries (a t-free file
        gives a constant change, usable for plain orbit moves)."""
        m, n = self.mtype
        ev = [[self.even.get((r, c), 0) for c in range(1, m + 1)] for r in range(1, m + 1)]
        od = [[self.odd.get((r, c), 0) for c in range(1, n + 1)] for r in range(1, n + 1)]
        return BasisChange.make(m, n, ev, od, domain="laurent")


_ENTRY_RE = re.compile(r"^(even|odd)\s+(\d+)\s+(\d+)\s*=\s*(.+)$")


def parse_witness_file(text: str, name: str = "<witness>", require_refs: bool = True) -> WitnessFile:
    mtype = None
    source_ref = target_ref = None
    even: dict[tuple[int, int], LaurentPoly] = {}
    odd: dict[tuple[int, int], LaurentPoly] = {}
    for lineno, body in _lines(text):
        mt = _TYPE_RE.match(body)
        if mt:
            mtype = (int(mt.group(1)), int(mt.group(2)))
            continue
        if body.startswith("source "):
            source_ref = body[7:].strip()
            continue
        if body.startswith("target "):
            target_ref = body[7:].strip()
            continue
        me = _ENTRY_RE.match(body)
        if me:
            if mtype is None:
                raise FileFormatError(name, lineno, "entry before type line")
            block = even if me.group(1) == "even" else odd
            size = mtype[0] if me.group(1) == "even" else mtype[1]
            r, c = int(me.group(2)), int(me.group(3))
            if not (1 <= r <= size and 1 <= c <= size):
                raise FileFormatError(name, lineno, f"{me.group(1)} entry ({r},{c}) out of range")
            if (r, c) in block:
                raise FileFormatError(name, lineno, f"duplicate {me.group(1)} entry ({r},{c})")
            try:
                block[(r, c)] = parse_laurent(me.group(4))
            except PolyParseError as exc:
                raise FileFormatError(name, lineno, f"bad curve entry: {exc}") from exc
            continue
        raise FileFormatError(name, lineno, f"unrecognized line {body!r}")
    if mtype is None:
        raise FileFormatError(name, 0, "missing type line")
    if require_refs and (source_ref is None or target_ref is None):
        raise FileFormatError(name, 0, "witness needs source and target lines")
    return WitnessFile(Path(name).stem, mtype, source_ref, target_ref, even, odd)


# ---------------------------------------------------------------------------
# Shipped data
# ---------------------------------------------------------------------------

DATA_DIR = Path(__file__).parent / "data"


def shipped_certificate_paths() -> list[Path]:
    return sorted((DATA_DIR / "certificates").glob("*/*.cert"))


def load_shipped_certificates() -> list[CertificateFile]:
    return [parse_certificate_file(p.read_text(), str(p)) for p in shipped_certificate_paths()]


def shipped_table_paths() -> list[Path]:
    return sorted((DATA_DIR / "tables").glob("*.txt"))


def load_shipped_tables() -> list[ReferenceTable]:
    return [parse_reference_table(p.read_text(), str(p)) for p in shipped_table_paths()]

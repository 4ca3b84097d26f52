"""Expression grammar and the JSON system / report formats.

Expression grammar::

    expr    := term (('+' | '-') term)*
    term    := unary ('*' unary)*
    unary   := '-' unary | power
    power   := atom ('^' INT)*
    atom    := NUMBER | jet | '(' expr ')'
    jet     := IDENT ("'"+ | '^(' INT ')')?
    NUMBER  := INT ('/' INT)?

Implicit multiplication is rejected.  ``t`` denotes the generator of ``Q(t)``
and is reserved over ``Q``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Collection, Dict, List, Optional

from .diffpoly import FIELD_GENERATOR, DiffPoly, JetVar

FORMAT_VERSION = 1
FIELDS = ("Q", "Q(t)")


class ParseError(ValueError):
    """Malformed expression, with the 0-based character offset of the problem."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


class SystemFormatError(ValueError):
    """The system document violates the input contract."""


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<ident>[a-zA-Z][a-zA-Z0-9_]*)
  | (?P<op>[-+*^()'])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, names: Collection[str], field: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.names = set(names)
        self.field = field

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.pos, self.text)

    def expect(self, value: str):
        if self.tok.value != value or self.tok.kind != "op":
            self.error(f"expected {value!r}")
        return self.advance()

    def parse(self) -> DiffPoly:
        if self.tok.kind == "end":
            self.error("empty expression")
        p = self.expr()
        if self.tok.kind != "end":
            if self.tok.kind in ("ident", "num") or self.tok.value == "(":
                self.error("implicit multiplication is not allowed")
            self.error(f"unexpected {self.tok.value!r}")
        return p

    def expr(self) -> DiffPoly:
        p = self.term()
        while self.tok.kind == "op" and self.tok.value in "+-":
            op = self.advance().value
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> DiffPoly:
        p = self.unary()
        while self.tok.kind == "op" and self.tok.value == "*":
            self.advance()
            p = p * self.unary()
        return p

    def unary(self) -> DiffPoly:
        if self.tok.kind == "op" and self.tok.value == "-":
            self.advance()
            return -self.unary()
        return self.power()

    def power(self) -> DiffPoly:
        base = self.atom()
        while self.tok.kind == "op" and self.tok.value == "^":
            caret = self.advance()
            t = self.tok
            if t.kind == "op" and t.value == "-":
                self.error("negative exponent", t)
            if t.kind == "op" and t.value == "(":
                self.error("derivative suffix '^(k)' applies only to variables", caret)
            if t.kind != "num":
                self.error("exponent must be a non-negative integer", t)
            if "/" in t.value:
                self.error("non-integer exponent", t)
            self.advance()
            base = base ** int(t.value)
        return base

    def atom(self) -> DiffPoly:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return DiffPoly.const(Fraction(t.value))
        if t.kind == "op" and t.value == "(":
            self.advance()
            p = self.expr()
            self.expect(")")
            return p
        if t.kind == "ident":
            return self.jet()
        if t.kind == "end":
            self.error("unexpected end of expression")
        self.error(f"unexpected {t.value!r}")

    def jet(self) -> DiffPoly:
        t = self.advance()
        name = t.value
        if name == FIELD_GENERATOR:
            if self.field != "Q(t)":
                self.error("'t' is reserved for the field generator of Q(t)", t)
            if self.tok.value == "'" or self._derivative_suffix_ahead():
                self.error("malformed derivative suffix: 't' is not a differential variable", self.tok)
            return DiffPoly.var(FIELD_GENERATOR)
        if name not in self.names:
            self.error(f"unknown identifier {name!r}", t)
        deriv = 0
        if self.tok.kind == "op" and self.tok.value == "'":
            while self.tok.kind == "op" and self.tok.value == "'":
                self.advance()
                deriv += 1
        elif self._derivative_suffix_ahead():
            self.advance()  # ^
            lp = self.advance()  # (
            k = self.tok
            if k.kind != "num" or "/" in k.value:
                self.error("malformed derivative suffix", k if k.kind != "end" else lp)
            self.advance()
            if self.tok.value != ")":
                self.error("malformed derivative suffix: expected ')'")
            self.advance()
            deriv = int(k.value)
            if self.tok.kind == "op" and self.tok.value == "'":
                self.error("malformed derivative suffix: mixed notations")
        return DiffPoly.var(name, deriv)

    def _derivative_suffix_ahead(self) -> bool:
        return (
            self.tok.kind == "op"
            and self.tok.value == "^"
            and self.toks[self.i + 1].kind == "op"
            and self.toks[self.i + 1].value == "("
        )


def parse_expression(text: str, names: Collection[str], field: str = "Q") -> DiffPoly:
    """Parse ``text`` into an expanded :class:`DiffPoly` over the declared ``names``."""
    if field not in FIELDS:
        raise ValueError(f"unknown field tag {field!r}")
    return _Parser(text, names, field).parse()


def serialize(p: DiffPoly, order: Optional[Dict[str, int]] = None) -> str:
    return p.to_str(order)


# ----------------------------------------------------------------------
# system documents


def load_system(document: Any):
    """Build a validated :class:`~daeindex.sysmodel.DAESystem` from a JSON document.

    ``document`` may be a parsed mapping or a JSON string.
    """
    from .sysmodel import DAESystem

    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SystemFormatError(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(document, dict):
        raise SystemFormatError("system document must be a JSON object")
    if document.get("format_version") != FORMAT_VERSION:
        raise SystemFormatError(f"\"format_version\": {FORMAT_VERSION} is required")
    field = document.get("field", "Q")
    if field not in FIELDS:
        raise SystemFormatError(f"field must be one of {FIELDS}, got {field!r}")
    x_names = _name_list(document, "x", required=False)
    u_names = _name_list(document, "u", required=True)
    if not u_names:
        raise SystemFormatError("\"u\" must be nonempty")
    f_src = _str_list(document, "f")
    g_src = _str_list(document, "g")
    if len(f_src) != len(x_names):
        raise SystemFormatError(f"length mismatch: {len(x_names)} x-variables but {len(f_src)} f-expressions")
    declared = list(x_names) + list(u_names)
    if len(set(declared)) != len(declared):
        dup = sorted({v for v in declared if declared.count(v) > 1})
        raise SystemFormatError(f"duplicate names: {dup}")
    if FIELD_GENERATOR in declared:
        raise SystemFormatError("'t' is reserved and cannot name a variable")
    f = [_parse_field(src, declared, field, f"f[{i}]") for i, src in enumerate(f_src)]
    for i, p in enumerate(f):
        if any(v.deriv >= 1 for v in p.variables()):
            raise SystemFormatError(f"derivative in f: f[{i}] = {f_src[i]!r} must have jet order 0")
    g = [_parse_field(src, declared, field, f"g[{i}]") for i, src in enumerate(g_src)]
    for i, p in enumerate(g):
        bad = [v for v in p.variables() if v.base in x_names and v.deriv >= 1]
        if bad:
            raise SystemFormatError(f"g[{i}] contains a derivative of an x-variable ({bad[0]})")
    sys = DAESystem(
        field=field,
        x_names=tuple(x_names),
        u_names=tuple(u_names),
        f=tuple(f),
        g=tuple(g),
        name=str(document.get("name", "")),
    )
    return sys.validate()


def load_system_file(path) -> "Any":
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return load_system(text)


def system_document(sys) -> Dict[str, Any]:
    """Inverse of :func:`load_system` for systems without parameters."""
    if sys.parameter_names:
        raise ValueError("localized systems have no document form")
    order = sys.variable_order()
    doc: Dict[str, Any] = {"format_version": FORMAT_VERSION}
    if sys.name:
        doc["name"] = sys.name
    doc.update(
        {
            "field": sys.field,
            "x": list(sys.x_names),
            "u": list(sys.u_names),
            "f": [p.to_str(order) for p in sys.f],
            "g": [p.to_str(order) for p in sys.g],
        }
    )
    return doc


def _name_list(doc, key, required):
    if key not in doc:
        if required:
            raise SystemFormatError(f"missing key {key!r}")
        return []
    val = doc[key]
    if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
        raise SystemFormatError(f"{key!r} must be a list of names")
    for v in val:
        if not re.fullmatch(r"[a-zA-Z][a-zA-Z0-9_]*", v):
            raise SystemFormatError(f"invalid variable name {v!r}")
    return val


def _str_list(doc, key):
    val = doc.get(key, [])
    if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
        raise SystemFormatError(f"{key!r} must be a list of expression strings")
    return val


def _parse_field(src, names, field, label):
    try:
        return parse_expression(src, names, field)
    except ParseError as exc:
        raise SystemFormatError(f"{label}: {exc}") from exc


# ----------------------------------------------------------------------
# report documents


def emit_report(report) -> str:
    """Canonical JSON text for an :class:`~daeindex.report.AnalysisReport`."""
    return json.dumps(report.to_dict(), indent=2) + "\n"


def load_report(text: str):
    from .report import AnalysisReport

    return AnalysisReport.from_dict(json.loads(text))

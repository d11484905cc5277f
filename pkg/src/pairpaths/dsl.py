"""Text format for schemes.

::

    # comment
    scheme "a" {
      wing minus {
        splitter 1 ratio 1/sqrt2      # amplitude reflectance r
        splitter 2 intensity 0.5      # intensity R, stored as r = sqrt(R)
        phase ab 0                    # radians
      }
      wing plus = minus
      annihilate { (a-, a+) -> P ; (b-, b+) -> Q }
    }

Omitted splitters are 50/50, omitted phases 0. Layout is free; newlines are
plain whitespace.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

from .circuit import (
    SQRT_HALF,
    AnnihilationRule,
    BeamSplitter,
    PhaseSettings,
    Scheme,
    WingCircuit,
    validate,
)
from .state import Path

FILE_SUFFIX = ".scm.txt"


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 0


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    severity: str
    message: str

    def __str__(self):
        return f"{self.span.line}:{self.span.column}: {self.severity}: {self.message}"


class DSLError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class _Abort(Exception):
    pass


@dataclass(frozen=True)
class _Token:
    kind: str  # ident, number, string, punct, eof
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>->|[{}(),;=+\-/])
""", re.VERBOSE)

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _tokenize(text: str):
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            ch = text[pos]
            raise DSLError([ParseDiagnostic(
                SourceSpan(line, col, 1), "error", f"unexpected character {ch!r}")])
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(_Token(kind, m.group(), SourceSpan(line, col, m.end() - pos)))
        pos = m.end()
    tokens.append(_Token("eof", "", SourceSpan(line, pos - line_start + 1, 0)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.diagnostics: list[ParseDiagnostic] = []

    # token helpers

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, span: SourceSpan, message: str, fatal: bool = False):
        self.diagnostics.append(ParseDiagnostic(span, "error", message))
        if fatal:
            raise _Abort

    def warn(self, span: SourceSpan, message: str):
        self.diagnostics.append(ParseDiagnostic(span, "warning", message))

    def _describe(self, t: _Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def expect(self, text: str) -> _Token:
        t = self.tok
        if t.text != text or t.kind not in ("punct", "ident"):
            self.error(t.span, f"expected {text!r}, found {self._describe(t)}", fatal=True)
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> _Token:
        t = self.tok
        if t.kind != kind:
            self.error(t.span, f"expected {what}, found {self._describe(t)}", fatal=True)
        return self.advance()

    # grammar

    def number(self) -> tuple[float, SourceSpan]:
        start = self.tok.span
        sign = 1.0
        if self.tok.text in ("-", "+") and self.tok.kind == "punct":
            sign = -1.0 if self.advance().text == "-" else 1.0
        value = self._atom()
        if self.tok.text == "/" and self.tok.kind == "punct":
            self.advance()
            denom_span = self.tok.span
            if self.tok.kind == "ident" and self.tok.text == "sqrt2":
                # x/sqrt2 is evaluated as x*sqrt(0.5), the correctly rounded 1/sqrt2
                self.advance()
                value = value * SQRT_HALF
            else:
                denom = self._atom()
                if denom == 0.0:
                    self.error(denom_span, "division by zero", fatal=True)
                value = value / denom
        end = self.tokens[self.i - 1].span
        length = end.column + end.length - start.column if end.line == start.line else start.length
        return sign * value, SourceSpan(start.line, start.column, length)

    def _atom(self) -> float:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return float(t.text)
        if t.kind == "ident" and t.text == "sqrt2":
            self.advance()
            return math.sqrt(2)
        if t.kind == "ident" and t.text == "pi":
            self.advance()
            return math.pi
        self.error(t.span, f"expected number, found {self._describe(t)}", fatal=True)

    def document(self) -> Scheme | None:
        t = self.tok
        if t.kind == "eof":
            self.error(SourceSpan(1, 1, 0), "missing scheme block", fatal=True)
        if t.text != "scheme":
            self.error(t.span, f"unknown keyword {t.text!r}" if t.kind == "ident"
                       else f"expected 'scheme', found {self._describe(t)}", fatal=True)
        scheme = self.scheme_block()
        if self.tok.kind != "eof":
            self.error(self.tok.span, f"unexpected {self._describe(self.tok)} after scheme block",
                       fatal=True)
        return scheme

    def scheme_block(self) -> Scheme | None:
        head = self.advance()
        name_tok = self.expect_kind("string", "scheme name string")
        name = json.loads(name_tok.text)
        self.expect("{")
        wings: dict[str, WingCircuit] = {}
        wing_spans: dict[str, SourceSpan] = {}
        rules: list[AnnihilationRule] = []
        seen_annihilate = False
        while self.tok.text != "}" or self.tok.kind != "punct":
            t = self.tok
            if t.kind == "eof":
                self.error(t.span, "unterminated scheme block", fatal=True)
            if t.kind == "ident" and t.text == "wing":
                self.wing_block(wings, wing_spans)
            elif t.kind == "ident" and t.text == "annihilate":
                if seen_annihilate:
                    self.error(t.span, "duplicate annihilate block")
                seen_annihilate = True
                rules.extend(self.annihilate_block(rules))
            elif t.kind == "ident":
                self.error(t.span, f"unknown keyword {t.text!r}", fatal=True)
            else:
                self.error(t.span, f"expected 'wing' or 'annihilate', found {self._describe(t)}",
                           fatal=True)
        self.advance()
        for side in ("minus", "plus"):
            if side not in wings:
                self.error(head.span, f"missing wing {side}")
        if not seen_annihilate:
            self.warn(head.span, "no annihilate block; the pair never annihilates")
        if any(d.severity == "error" for d in self.diagnostics):
            return None
        scheme = Scheme(name, wings["minus"], wings["plus"], tuple(rules))
        for problem in validate(scheme):
            self.error(head.span, problem)
        return scheme

    def wing_block(self, wings, wing_spans):
        self.advance()
        side_tok = self.tok
        if side_tok.kind != "ident" or side_tok.text not in ("minus", "plus"):
            self.error(side_tok.span, f"expected 'minus' or 'plus', found {self._describe(side_tok)}",
                       fatal=True)
        self.advance()
        side = side_tok.text
        if side in wings:
            prev = wing_spans[side]
            self.error(side_tok.span, f"duplicate wing {side} (first defined at {prev.line}:{prev.column})")
        if self.tok.text == "=" and self.tok.kind == "punct":
            self.advance()
            src = self.tok
            if src.kind != "ident" or src.text not in ("minus", "plus"):
                self.error(src.span, f"expected 'minus' or 'plus', found {self._describe(src)}",
                           fatal=True)
            self.advance()
            if src.text == side:
                self.error(src.span, f"wing {side} cannot copy itself", fatal=True)
            if src.text not in wings:
                self.error(src.span, f"wing {src.text} is not defined yet", fatal=True)
            circuit = wings[src.text]
        else:
            circuit = self.wing_body()
        wings.setdefault(side, circuit)
        wing_spans.setdefault(side, side_tok.span)

    def wing_body(self) -> WingCircuit:
        self.expect("{")
        splitters: dict[int, BeamSplitter] = {}
        phases: dict[str, float] = {}
        while not (self.tok.kind == "punct" and self.tok.text == "}"):
            t = self.tok
            if t.kind == "eof":
                self.error(t.span, "unterminated wing block", fatal=True)
            if t.kind == "ident" and t.text == "splitter":
                self.advance()
                idx_tok = self.expect_kind("number", "splitter index 1, 2 or 3")
                if idx_tok.text not in ("1", "2", "3"):
                    self.error(idx_tok.span, f"splitter index must be 1, 2 or 3, got {idx_tok.text}")
                mode = self.tok
                if mode.kind != "ident" or mode.text not in ("ratio", "intensity"):
                    self.error(mode.span, f"expected 'ratio' or 'intensity', found {self._describe(mode)}",
                               fatal=True)
                self.advance()
                value, span = self.number()
                if not (0.0 <= value <= 1.0):
                    self.error(span, f"ratio {value:g} outside [0, 1]")
                    continue
                idx = int(idx_tok.text) if idx_tok.text in ("1", "2", "3") else None
                if idx in splitters:
                    self.error(idx_tok.span, f"duplicate splitter {idx}")
                elif idx is not None:
                    splitters[idx] = (BeamSplitter.from_intensity(value) if mode.text == "intensity"
                                      else BeamSplitter(value))
            elif t.kind == "ident" and t.text == "phase":
                self.advance()
                which = self.tok
                if which.kind != "ident" or which.text not in ("ab", "cd"):
                    self.error(which.span, f"expected 'ab' or 'cd', found {self._describe(which)}",
                               fatal=True)
                self.advance()
                value, span = self.number()
                if not math.isfinite(value):
                    self.error(span, "phase must be finite")
                elif which.text in phases:
                    self.error(which.span, f"duplicate phase {which.text}")
                else:
                    phases[which.text] = value
            elif t.kind == "ident":
                self.error(t.span, f"unknown keyword {t.text!r}", fatal=True)
            else:
                self.error(t.span, f"expected 'splitter' or 'phase', found {self._describe(t)}",
                           fatal=True)
        self.advance()
        return WingCircuit(
            splitters.get(1, BeamSplitter()),
            splitters.get(2, BeamSplitter()),
            splitters.get(3, BeamSplitter()),
            PhaseSettings(**phases),
        )

    def _path(self, sign: str) -> tuple[Path, SourceSpan]:
        t = self.tok
        if t.kind != "ident" or t.text.upper() not in Path.__members__ or t.text.upper() == "IN":
            self.error(t.span, f"expected path name, found {self._describe(t)}", fatal=True)
        self.advance()
        path = Path[t.text.upper()]
        self.expect(sign)
        if path not in (Path.A, Path.B):
            self.error(t.span, "annihilation rule outside stage-1 paths")
        return path, t.span

    def annihilate_block(self, existing):
        self.advance()
        self.expect("{")
        labels = {r.label for r in existing}
        pairs = {(r.minus, r.plus) for r in existing}
        rules = []
        while not (self.tok.kind == "punct" and self.tok.text == "}"):
            if self.tok.kind == "eof":
                self.error(self.tok.span, "unterminated annihilate block", fatal=True)
            if self.tok.kind == "punct" and self.tok.text in (";", ","):
                self.advance()
                continue
            open_tok = self.expect("(")
            m_path, _ = self._path("-")
            self.expect(",")
            p_path, _ = self._path("+")
            self.expect(")")
            self.expect("->")
            lab = self.tok
            if lab.kind == "ident":
                label = lab.text
            elif lab.kind == "string":
                label = json.loads(lab.text)
            else:
                self.error(lab.span, f"expected gamma label, found {self._describe(lab)}", fatal=True)
            self.advance()
            if label in labels:
                self.error(lab.span, f"duplicate gamma label {label!r}")
            elif (m_path, p_path) in pairs:
                self.error(open_tok.span, f"duplicate annihilation pair ({m_path.value}-, {p_path.value}+)")
            elif m_path in (Path.A, Path.B) and p_path in (Path.A, Path.B):
                rules.append(AnnihilationRule(m_path, p_path, label))
            labels.add(label)
            pairs.add((m_path, p_path))
        self.advance()
        return rules


def parse_with_diagnostics(text) -> tuple[Scheme | None, list[ParseDiagnostic]]:
    """Parse ``text`` (str or bytes); never raises on bad input."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            line = bytes(text[:exc.start]).count(b"\n") + 1
            return None, [ParseDiagnostic(SourceSpan(line, 1, 1), "error", "invalid encoding")]
    try:
        parser = _Parser(text)
    except DSLError as exc:
        return None, exc.diagnostics
    try:
        scheme = parser.document()
    except _Abort:
        scheme = None
    except (ValueError, OverflowError, RecursionError) as exc:
        parser.error(parser.tok.span, str(exc))
        scheme = None
    if any(d.severity == "error" for d in parser.diagnostics):
        scheme = None
    return scheme, parser.diagnostics


def parse(text) -> Scheme:
    scheme, diagnostics = parse_with_diagnostics(text)
    if scheme is None:
        raise DSLError([d for d in diagnostics if d.severity == "error"])
    return scheme


def load(path) -> Scheme:
    with open(path, "rb") as fh:
        return parse(fh.read())


# --- rendering --------------------------------------------------------------

def format_number(x: float) -> str:
    """Shortest text that parses back to exactly ``x``."""
    if x == SQRT_HALF:
        return "1/sqrt2"
    if x == 0:
        return "0"
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _render_label(label: str) -> str:
    keywords = {"scheme", "wing", "annihilate", "splitter", "phase"}
    if _IDENT_RE.match(label) and label not in keywords:
        return label
    return json.dumps(label)


def _render_wing(w: WingCircuit) -> list[str]:
    lines = [f"    splitter {k} ratio {format_number(w.splitter(k).r)}" for k in (1, 2, 3)]
    lines.append(f"    phase ab {format_number(w.phases.ab)}")
    lines.append(f"    phase cd {format_number(w.phases.cd)}")
    return lines


def render(s: Scheme) -> str:
    """Canonical text for ``s``: both wings spelled out, rules sorted by path pair."""
    out = [f"scheme {json.dumps(s.name)} {{"]
    out.append("  wing minus {")
    out.extend(_render_wing(s.minus))
    out.append("  }")
    if s.plus == s.minus:
        out.append("  wing plus = minus")
    else:
        out.append("  wing plus {")
        out.extend(_render_wing(s.plus))
        out.append("  }")
    out.append("  annihilate {")
    for rule in s.rules:
        out.append(f"    ({rule.minus.value}-, {rule.plus.value}+) -> {_render_label(rule.label)} ;")
    out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"


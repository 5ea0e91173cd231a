"""Text syntax for formulas, models, sequents and proof scripts.

Formula grammar (EBNF, normative copy in docs/grammar.md):

    formula     = binder | implication
    binder      = ("mu" | "nu") ident "." formula
    implication = disjunction [ "->" formula ]
    disjunction = conjunction { "|" conjunction }
    conjunction = unary { "&" unary }
    unary       = "~" unary | "[" ident "]" unary | "<" ident ">" unary
                | primary | binder
    primary     = "ff" | "tt" | ident | "(" formula ")"

"->" is right-associative; "~", "[a]" and "<a>" bind tightest; a binder
extends as far right as possible.  "tt", "&", "|", "<a>" and "nu" are
macros expanded at parse time, so parsed trees contain core
constructors only.  An identifier names a bound variable when an
enclosing binder binds it, a declared variable when listed in the
`variables` argument (or a script's `vars` header), and an atomic
proposition otherwise.

Models are JSON documents with fields `states`, `props`, `trans`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .kernel import Sequent, sequent
from .semantics import TransitionSystem
from .session import (
    Assumption,
    BoxI,
    FfE,
    FfI,
    ImpE,
    Intro,
    KRule,
    MuE,
    MuI,
    NotI,
    Qed,
    Raa,
    Tactic,
    Undo,
    Weaken,
)
from .syntax import (
    ActionId,
    Atom,
    AtomicId,
    Box,
    Ff,
    Imp,
    Mu,
    Not,
    Preformula,
    Var,
    Variable,
    WfFormula,
    atoms_in,
    diamond,
    free_vars,
    fresh,
    mk_wf,
    nu,
    subst,
    tt,
)

KEYWORDS = frozenset({"mu", "nu", "ff", "tt"})
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class SourceSpan:
    """Half-open [start, end) offset range; line/column are 1-based."""

    start: int
    end: int
    line: int
    column: int

    def __repr__(self) -> str:
        return f"SourceSpan({self.start}..{self.end}, line {self.line}, col {self.column})"


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan, expected: frozenset = frozenset()):
        self.span = span
        self.expected = expected
        super().__init__(f"{message} (line {span.line}, column {span.column})")


class UndeclaredState(ParseError):
    def __init__(self, state: str, where: str, span: SourceSpan):
        self.state = state
        super().__init__(f"undeclared state {state!r} referenced by {where}", span)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


_PUNCT = [
    ("|-", "TURNSTILE"),
    ("->", "ARROW"),
    ("~", "TILDE"),
    ("&", "AMP"),
    ("|", "PIPE"),
    ("[", "LBRACK"),
    ("]", "RBRACK"),
    ("<", "LANGLE"),
    (">", "RANGLE"),
    ("(", "LPAREN"),
    (")", "RPAREN"),
    (".", "DOT"),
    (",", "COMMA"),
]


def _tokenize(text: str, base_offset: int = 0, base_line: int = 1, base_column: int = 1) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    line, col = base_line, base_column
    n = len(text)

    def span(start_i: int, end_i: int, start_line: int, start_col: int) -> SourceSpan:
        return SourceSpan(base_offset + start_i, base_offset + end_i, start_line, start_col)

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":  # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(_Token("IDENT", m.group(), span(i, m.end(), line, col)))
            col += m.end() - i
            i = m.end()
            continue
        for lit, kind in _PUNCT:
            if text.startswith(lit, i):
                tokens.append(_Token(kind, lit, span(i, i + len(lit), line, col)))
                i += len(lit)
                col += len(lit)
                break
        else:
            raise ParseError(
                f"unexpected character {c!r}", span(i, i + 1, line, col)
            )
    tokens.append(_Token("EOF", "", span(n, n, line, col)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], variables: frozenset):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables
        self.scope: list[str] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                f"expected {what}, found {tok.text or 'end of input'!r}",
                tok.span,
                frozenset({what}),
            )
        return self.take()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.text == word

    # grammar productions ---------------------------------------------------

    def formula(self) -> Preformula:
        if self.at_keyword("mu") or self.at_keyword("nu"):
            return self.binder()
        return self.implication()

    def binder(self) -> Preformula:
        head = self.take()
        name_tok = self.expect("IDENT", "bound variable name")
        if name_tok.text in KEYWORDS:
            raise ParseError(
                f"{name_tok.text!r} is reserved and cannot bind", name_tok.span
            )
        self.expect("DOT", "'.'")
        self.scope.append(name_tok.text)
        try:
            body = self.formula()
        finally:
            self.scope.pop()
        x = Variable(name_tok.text)
        return Mu(x, body) if head.text == "mu" else nu(x, body)

    def implication(self) -> Preformula:
        left = self.disjunction()
        if self.peek().kind == "ARROW":
            self.take()
            return Imp(left, self.formula())
        return left

    def disjunction(self) -> Preformula:
        out = self.conjunction()
        while self.peek().kind == "PIPE":
            self.take()
            out = Imp(Not(out), self.conjunction())
        return out

    def conjunction(self) -> Preformula:
        out = self.unary()
        while self.peek().kind == "AMP":
            self.take()
            out = Not(Imp(out, Not(self.unary())))
        return out

    def unary(self) -> Preformula:
        tok = self.peek()
        if tok.kind == "TILDE":
            self.take()
            return Not(self.unary())
        if tok.kind == "LBRACK":
            self.take()
            act = self.expect("IDENT", "action name")
            self.expect("RBRACK", "']'")
            return Box(ActionId(act.text), self.unary())
        if tok.kind == "LANGLE":
            self.take()
            act = self.expect("IDENT", "action name")
            self.expect("RANGLE", "'>'")
            return diamond(ActionId(act.text), self.unary())
        if self.at_keyword("mu") or self.at_keyword("nu"):
            return self.binder()
        return self.primary()

    def primary(self) -> Preformula:
        tok = self.peek()
        if tok.kind == "LPAREN":
            self.take()
            inner = self.formula()
            self.expect("RPAREN", "')'")
            return inner
        if tok.kind == "IDENT":
            self.take()
            if tok.text == "ff":
                return Ff()
            if tok.text == "tt":
                return tt()
            if tok.text in ("mu", "nu"):
                raise ParseError(f"misplaced {tok.text!r}", tok.span)
            if tok.text in self.scope or tok.text in self.variables:
                return Var(Variable(tok.text))
            return Atom(AtomicId(tok.text))
        raise ParseError(
            f"expected a formula, found {tok.text or 'end of input'!r}",
            tok.span,
            frozenset({"formula"}),
        )


def parse_formula(
    text: str,
    variables: Iterable[str] = (),
    *,
    _base: tuple[int, int, int] = (0, 1, 1),
) -> Preformula:
    """Parse a preformula (no well-formedness gate; compose with mk_wf)."""
    parser = _Parser(_tokenize(text, *_base), frozenset(variables))
    result = parser.formula()
    tail = parser.peek()
    if tail.kind != "EOF":
        raise ParseError(f"unexpected trailing input {tail.text!r}", tail.span)
    return result


def parse_sequent(
    text: str,
    variables: Iterable[str] = (),
    *,
    _base: tuple[int, int, int] = (0, 1, 1),
) -> Sequent:
    """Parse `hyp, ..., hyp |- conclusion` (hypotheses optional)."""
    tokens = _tokenize(text, *_base)
    parser = _Parser(tokens, frozenset(variables))
    hyps: list[Preformula] = []
    if parser.peek().kind != "TURNSTILE":
        hyps.append(parser.formula())
        while parser.peek().kind == "COMMA":
            parser.take()
            hyps.append(parser.formula())
    parser.expect("TURNSTILE", "'|-'")
    concl = parser.formula()
    tail = parser.peek()
    if tail.kind != "EOF":
        raise ParseError(f"unexpected trailing input {tail.text!r}", tail.span)
    return sequent([mk_wf(h) for h in hyps], mk_wf(concl))


# ----------------------------------------------------------------- printing

def _printable(name: str, what: str) -> str:
    if not _IDENT_RE.fullmatch(name) or name in KEYWORDS:
        raise ValueError(f"cannot print {what} named {name!r}")
    return name


def _atom_names(phi: Preformula) -> frozenset:
    return frozenset(a.name for a in atoms_in(phi))


def _print(phi: Preformula, level: int, rightmost: bool) -> str:
    if isinstance(phi, Atom):
        return _printable(phi.prop.name, "atomic proposition")
    if isinstance(phi, Ff):
        return "ff"
    if isinstance(phi, Var):
        return _printable(phi.var.name, "variable")
    if isinstance(phi, Not):
        return "~" + _print(phi.body, 2, rightmost)
    if isinstance(phi, Box):
        act = _printable(phi.action.name, "action")
        return f"[{act}] " + _print(phi.body, 2, rightmost)
    if isinstance(phi, Imp):
        if level >= 2:
            return "(" + _print(phi.left, 2, False) + " -> " + _print(phi.right, 1, True) + ")"
        return _print(phi.left, 2, False) + " -> " + _print(phi.right, 1, rightmost)
    if isinstance(phi, Mu):
        x, body = phi.var, phi.body
        clashes = _atom_names(body) | KEYWORDS
        if x.name in clashes or not _IDENT_RE.fullmatch(x.name):
            avoid = {Variable(n) for n in clashes} | free_vars(body) | {x}
            z = fresh(avoid)
            body = subst(body, x, Var(z))
            x = z
        inner = f"mu {x.name} . " + _print(body, 0, True)
        if level >= 1 and not rightmost:
            return "(" + inner + ")"
        return inner
    raise TypeError(f"not a preformula: {phi!r}")


def print_formula(phi: Preformula) -> str:
    """Minimal-parenthesization text; parse_formula inverts it up to alpha.

    Free identifiers must be lexable (and no name may serve as both an
    atom and a free variable); bound variables are renamed as needed.
    """
    clash = {v.name for v in free_vars(phi)} & _atom_names(phi)
    if clash:
        raise ValueError(
            f"cannot print: {sorted(clash)} name(s) used as both atom and free variable"
        )
    return _print(phi, 0, True)


def print_sequent(seq: Sequent) -> str:
    from .syntax import _canonical

    hyps = sorted(seq.hyps, key=lambda h: _canonical(h.prp))
    left = ", ".join(print_formula(h.prp) for h in hyps)
    right = print_formula(seq.concl.prp)
    return f"{left} |- {right}" if left else f"|- {right}"


# ------------------------------------------------------------------- models

def _whole_span(text: str) -> SourceSpan:
    return SourceSpan(0, len(text), 1, 1)


def _name_span(text: str, name: str) -> SourceSpan:
    at = text.find(f'"{name}"')
    if at < 0:
        return _whole_span(text)
    line = text.count("\n", 0, at) + 1
    column = at - (text.rfind("\n", 0, at) + 1) + 1
    return SourceSpan(at, at + len(name) + 2, line, column)


def _string_list(doc, key: str, text: str) -> list[str]:
    value = doc.get(key, [])
    if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
        raise ParseError(f"field {key!r} must be a list of strings", _whole_span(text))
    return value


def parse_model(text: str) -> TransitionSystem:
    """Parse a JSON model document with fields states/props/trans."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        span = SourceSpan(e.pos, min(e.pos + 1, len(text)), e.lineno, e.colno)
        raise ParseError(f"invalid model JSON: {e.msg}", span) from e
    if not isinstance(doc, dict):
        raise ParseError("model document must be a JSON object", _whole_span(text))
    states = _string_list(doc, "states", text)
    if not states:
        raise ParseError("a model needs a nonempty states list", _whole_span(text))
    if len(set(states)) != len(states):
        raise ParseError("duplicate state names", _whole_span(text))
    declared = set(states)

    props_doc = doc.get("props", {})
    trans_doc = doc.get("trans", {})
    if not isinstance(props_doc, dict) or not isinstance(trans_doc, dict):
        raise ParseError("fields 'props' and 'trans' must be objects", _whole_span(text))

    props = {}
    for name, ss in props_doc.items():
        if not isinstance(ss, list) or not all(isinstance(s, str) for s in ss):
            raise ParseError(f"prop {name!r} must map to a list of states", _whole_span(text))
        for s in ss:
            if s not in declared:
                raise UndeclaredState(s, f"prop {name!r}", _name_span(text, s))
        props[AtomicId(name)] = frozenset(ss)

    trans = {}
    for act, row in trans_doc.items():
        if not isinstance(row, dict):
            raise ParseError(f"action {act!r} must map states to successor lists", _whole_span(text))
        out = {}
        for src, targets in row.items():
            if src not in declared:
                raise UndeclaredState(src, f"action {act!r}", _name_span(text, src))
            if not isinstance(targets, list) or not all(isinstance(t, str) for t in targets):
                raise ParseError(
                    f"successors of {src!r} under {act!r} must be a list of states",
                    _whole_span(text),
                )
            for t in targets:
                if t not in declared:
                    raise UndeclaredState(t, f"action {act!r} from {src!r}", _name_span(text, t))
            out[src] = frozenset(targets)
        trans[ActionId(act)] = out

    return TransitionSystem(tuple(states), props, trans)


def print_model(ts: TransitionSystem) -> str:
    doc = {
        "states": list(ts.states),
        "props": {p.name: sorted(ss) for p, ss in sorted(ts.props.items())},
        "trans": {
            a.name: {s: sorted(ts.succ(a, s)) for s in ts.states if ts.succ(a, s)}
            for a in sorted(ts.trans)
        },
    }
    return json.dumps(doc, indent=2) + "\n"


# ------------------------------------------------------------------ tactics

_NULLARY_TACTICS = {
    "assumption": Assumption,
    "intro": Intro,
    "raa": Raa,
    "not_i": NotI,
    "ff_e": FfE,
    "box_i": BoxI,
    "mu_i": MuI,
    "undo": Undo,
    "qed": Qed,
}
_FORMULA_TACTICS = {"ff_i": FfI, "imp_e": ImpE, "k": KRule, "mu_e": MuE}


def parse_tactic(
    text: str,
    variables: Iterable[str] = (),
    *,
    _base: tuple[int, int, int] = (0, 1, 1),
) -> Tactic:
    """Parse one tactic invocation: a name plus an optional formula argument."""
    tokens = _tokenize(text, *_base)
    head = tokens[0]
    if head.kind != "IDENT":
        raise ParseError(
            f"expected a tactic name, found {head.text or 'end of input'!r}", head.span
        )
    name = head.text.lower()
    rest = tokens[1:]

    if name in _NULLARY_TACTICS:
        if rest[0].kind != "EOF":
            raise ParseError(f"tactic {name!r} takes no argument", rest[0].span)
        return _NULLARY_TACTICS[name]()

    if name in _FORMULA_TACTICS:
        if rest[0].kind == "EOF":
            raise ParseError(f"tactic {name!r} needs a formula argument", rest[0].span)
        parser = _Parser(rest, frozenset(variables))
        arg = parser.formula()
        tail = parser.peek()
        if tail.kind != "EOF":
            raise ParseError(f"unexpected trailing input {tail.text!r}", tail.span)
        return _FORMULA_TACTICS[name](mk_wf(arg))

    if name == "weaken":
        parser = _Parser(rest, frozenset(variables))
        kept: list[WfFormula] = []
        if parser.peek().kind != "EOF":
            kept.append(mk_wf(parser.formula()))
            while parser.peek().kind == "COMMA":
                parser.take()
                kept.append(mk_wf(parser.formula()))
        tail = parser.peek()
        if tail.kind != "EOF":
            raise ParseError(f"unexpected trailing input {tail.text!r}", tail.span)
        return Weaken(tuple(kept))

    raise ParseError(f"unknown tactic {head.text!r}", head.span)


def format_tactic(tactic: Tactic) -> str:
    """Canonical script text for a tactic (inverse of parse_tactic)."""
    if isinstance(tactic, Weaken):
        if not tactic.argument:
            return "weaken"
        return "weaken " + ", ".join(print_formula(h.prp) for h in tactic.argument)
    if tactic.needs_argument:
        return f"{tactic.name} " + print_formula(tactic.argument.prp)
    return tactic.name


# ------------------------------------------------------------ proof scripts

@dataclass(frozen=True)
class ScriptStep:
    tactic: Tactic
    text: str
    line: int


@dataclass(frozen=True)
class ProofScript:
    """A named claim plus the ordered tactics meant to prove it."""

    name: str
    variables: frozenset
    claim: Sequent
    steps: tuple

    @property
    def tactics(self) -> tuple:
        return tuple(s.tactic for s in self.steps)


_LEMMA_RE = re.compile(r"^\s*lemma\s+([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)$")
_VARS_RE = re.compile(r"^\s*vars\s+(.*)$")


def _line_span(offset: int, line_no: int, line: str) -> SourceSpan:
    return SourceSpan(offset, offset + len(line), line_no, 1)


def parse_scripts(text: str) -> list[ProofScript]:
    """Parse a script file: an optional `vars` header, then lemma blocks."""
    scripts: list[ProofScript] = []
    variables: set[str] = set()
    current: Optional[dict] = None
    offset = 0

    def finish() -> None:
        nonlocal current
        if current is not None:
            scripts.append(
                ProofScript(
                    current["name"],
                    frozenset(variables),
                    current["claim"],
                    tuple(current["steps"]),
                )
            )
            current = None

    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        line_offset = offset
        offset += len(line) + 1
        if not stripped:
            continue

        m = _VARS_RE.match(stripped)
        if m:
            if current is not None:
                raise ParseError(
                    "vars must come before lemma blocks", _line_span(line_offset, line_no, line)
                )
            names = [n for chunk in m.group(1).split(",") for n in chunk.split()]
            for n in names:
                if not _IDENT_RE.fullmatch(n) or n in KEYWORDS:
                    raise ParseError(
                        f"bad variable name {n!r}", _line_span(line_offset, line_no, line)
                    )
            variables.update(names)
            continue

        m = _LEMMA_RE.match(stripped)
        if m:
            finish()
            name, seq_text = m.groups()
            seq_offset = line_offset + line.index(seq_text) if seq_text in line else line_offset
            claim = parse_sequent(
                seq_text,
                variables,
                _base=(seq_offset, line_no, seq_offset - line_offset + 1),
            )
            current = {"name": name, "claim": claim, "steps": []}
            continue

        if current is None:
            raise ParseError(
                f"expected a lemma header, found {stripped!r}",
                _line_span(line_offset, line_no, line),
            )

        indent = len(line) - len(line.lstrip())
        tactic = parse_tactic(
            stripped, variables, _base=(line_offset + indent, line_no, indent + 1)
        )
        if isinstance(tactic, Qed):
            finish()
        else:
            current["steps"].append(ScriptStep(tactic, stripped, line_no))

    finish()
    return scripts


def parse_script(text: str) -> ProofScript:
    """Parse a single-lemma script (the first lemma of the text)."""
    scripts = parse_scripts(text)
    if not scripts:
        raise ParseError("no lemma found", _whole_span(text))
    return scripts[0]


def format_script(script: ProofScript) -> str:
    """Canonical script text accepted by parse_scripts and the batch checker."""
    lines = []
    if script.variables:
        lines.append("vars " + " ".join(sorted(script.variables)))
    lines.append(f"lemma {script.name} : {print_sequent(script.claim)}")
    for step in script.steps:
        lines.append("  " + format_tactic(step.tactic))
    lines.append("qed")
    return "\n".join(lines) + "\n"

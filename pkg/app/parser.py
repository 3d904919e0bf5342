# app/parser.py
"""Concrete ASCII syntax for formulas: tokenizer, recursive-descent parser, printer.

Propositions, loosest to tightest:  ->  (right-assoc),  |,  &,  prefix ! <p> [p] fix( ) Fix( )
Programs, loosest to tightest:      +,  ^ and - (left-assoc),  ;,  postfix *
Tie "p ~ q" is an atomic proposition whose operands are full programs; it does not nest.
"#" starts a comment running to the end of the line.
"""
import logging
from dataclasses import dataclass

from app.errors import ParseError
from app.logic import (
    And, Atom, AtomicProg, BigFix, Box, Diamond, Diff, FixP, IfThenElse, Implies, Inter,
    Not, Or, Program, Proposition, Seq, Skip, Star, Test, Tie, TruthConst, Union, WhileDo,
)

logger = logging.getLogger(__name__)

KEYWORDS = {"true", "false", "skip", "fix", "Fix", "if", "then", "else", "fi", "while", "do", "od"}
SYMBOLS = ["->", "!", "&", "|", "<", ">", "[", "]", "(", ")", "~", ";", "+", "^", "-", "*", "?"]

# Tokens that may begin a program (and therefore a tie).
PROGRAM_START = {"IDENT", "skip", "?", "(", "if", "while"}


@dataclass(frozen=True)
class SourceText:
    text: str
    origin: str = "<inline>"


@dataclass(frozen=True)
class Token:
    kind: str  # "IDENT", "EOF", or the keyword / symbol text itself
    text: str
    line: int
    column: int


def tokenize(src: SourceText) -> list[Token]:
    text = src.text
    tokens: list[Token] = []
    idx = 0
    line, column = 1, 1

    def advance(count: int = 1):
        nonlocal idx, line, column
        for _ in range(count):
            if text[idx] == "\n":
                line += 1
                column = 1
            else:
                column += 1
            idx += 1

    while idx < len(text):
        c = text[idx]
        if c.isspace():
            advance()
            continue
        if c == "#":
            while idx < len(text) and text[idx] != "\n":
                advance()
            continue
        if (c.isascii() and c.isalpha()) or c == "_":
            end = idx
            while end < len(text) and text[end].isascii() and (text[end].isalnum() or text[end] == "_"):
                end += 1
            word = text[idx:end]
            kind = word if word in KEYWORDS else "IDENT"
            tokens.append(Token(kind, word, line, column))
            advance(end - idx)
            continue
        for symbol in SYMBOLS:
            if text.startswith(symbol, idx):
                tokens.append(Token(symbol, symbol, line, column))
                advance(len(symbol))
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, column, origin=src.origin)
    tokens.append(Token("EOF", "", line, column))
    return tokens


class _Parser:
    def __init__(self, src: SourceText):
        self.src = src
        self.tokens = tokenize(src)
        self.pos = 0
        # Memo for tie attempts: position -> (result or None, position after).
        self._tie_memo: dict[int, tuple[Tie | None, int]] = {}

    # --- Token helpers ---
    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def at(self, *kinds: str) -> bool:
        return self.current.kind in kinds

    def error(self, expected) -> ParseError:
        token = self.current
        found = "end of input" if token.kind == "EOF" else repr(token.text)
        return ParseError(f"unexpected {found}", token.line, token.column,
                          frozenset(expected), origin=self.src.origin)

    def expect(self, kind: str) -> Token:
        if not self.at(kind):
            raise self.error({kind})
        token = self.current
        self.pos += 1
        return token

    def finish(self):
        if not self.at("EOF"):
            raise self.error({"end of input"})

    # --- Propositions ---
    def prop(self) -> Proposition:
        left = self.disjunction()
        if self.at("->"):
            self.pos += 1
            return Implies(left, self.prop())
        return left

    def disjunction(self) -> Proposition:
        left = self.conjunction()
        while self.at("|"):
            self.pos += 1
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Proposition:
        left = self.unary()
        while self.at("&"):
            self.pos += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Proposition:
        token = self.current
        if token.kind == "!":
            self.pos += 1
            return Not(self.unary())
        if token.kind == "<":
            self.pos += 1
            program = self.program()
            self.expect(">")
            return Diamond(program, self.unary())
        if token.kind == "[":
            self.pos += 1
            program = self.program()
            self.expect("]")
            return Box(program, self.unary())
        if token.kind in ("fix", "Fix"):
            self.pos += 1
            self.expect("(")
            program = self.program()
            self.expect(")")
            return FixP(program) if token.kind == "fix" else BigFix(program)
        return self.primary()

    def primary(self) -> Proposition:
        tie = self.try_tie()
        if tie is not None:
            return tie
        token = self.current
        if token.kind == "true":
            self.pos += 1
            return TruthConst(True)
        if token.kind == "false":
            self.pos += 1
            return TruthConst(False)
        if token.kind == "IDENT":
            self.pos += 1
            return Atom(token.text)
        if token.kind == "(":
            self.pos += 1
            inner = self.prop()
            self.expect(")")
            return inner
        raise self.error({"true", "false", "identifier", "(", "!", "<", "[", "fix", "Fix"})

    def try_tie(self) -> Tie | None:
        """Read "program ~ program" here, or leave the position untouched."""
        if self.current.kind not in PROGRAM_START:
            return None
        start = self.pos
        if start in self._tie_memo:
            tie, after = self._tie_memo[start]
            if tie is not None:
                self.pos = after
            return tie
        tie = None
        committed = False
        try:
            left = self.program()
            if self.at("~"):
                self.pos += 1
                committed = True
                tie = Tie(left, self.program())
        except ParseError:
            if committed:
                raise
            tie = None
        if tie is not None and self.at("~"):
            raise self.error({"end of tie (ties do not chain)"})
        after = self.pos
        self._tie_memo[start] = (tie, after)
        if tie is None:
            self.pos = start
        return tie

    # --- Programs ---
    def program(self) -> Program:
        left = self.inter_diff()
        while self.at("+"):
            self.pos += 1
            left = Union(left, self.inter_diff())
        return left

    def inter_diff(self) -> Program:
        left = self.sequence()
        while self.at("^", "-"):
            kind = self.current.kind
            self.pos += 1
            right = self.sequence()
            left = Inter(left, right) if kind == "^" else Diff(left, right)
        return left

    def sequence(self) -> Program:
        left = self.postfix()
        while self.at(";"):
            self.pos += 1
            left = Seq(left, self.postfix())
        return left

    def postfix(self) -> Program:
        body = self.program_primary()
        while self.at("*"):
            self.pos += 1
            body = Star(body)
        return body

    def program_primary(self) -> Program:
        token = self.current
        if token.kind == "IDENT":
            self.pos += 1
            return AtomicProg(token.text)
        if token.kind == "skip":
            self.pos += 1
            return Skip()
        if token.kind == "?":
            self.pos += 1
            self.expect("(")
            condition = self.prop()
            self.expect(")")
            return Test(condition)
        if token.kind == "(":
            self.pos += 1
            inner = self.program()
            self.expect(")")
            return inner
        if token.kind == "if":
            self.pos += 1
            condition = self.prop()
            self.expect("then")
            then_branch = self.program()
            self.expect("else")
            else_branch = self.program()
            self.expect("fi")
            return IfThenElse(condition, then_branch, else_branch)
        if token.kind == "while":
            self.pos += 1
            condition = self.prop()
            self.expect("do")
            body = self.program()
            self.expect("od")
            return WhileDo(condition, body)
        raise self.error({"identifier", "skip", "?", "(", "if", "while"})


def _as_source(src) -> SourceText:
    return src if isinstance(src, SourceText) else SourceText(src)


def parse_prop(src) -> Proposition:
    """Parse a whole proposition; trailing input is an error."""
    source = _as_source(src)
    parser = _Parser(source)
    result = parser.prop()
    parser.finish()
    logger.debug(f"Parsed proposition from {source.origin}")
    return result


def parse_program(src) -> Program:
    source = _as_source(src)
    parser = _Parser(source)
    result = parser.program()
    parser.finish()
    return result


# --- Printer ---

# Proposition levels
_IMP, _OR, _AND, _PREFIX = 1, 2, 3, 4
# Program levels
_CHOICE, _INTER, _SEQ, _STAR, _ATOMIC = 1, 2, 3, 4, 5


def _wrap(text: str, own: int, context: int) -> str:
    return f"({text})" if own < context else text


def _prop(f: Proposition, context: int) -> str:
    match f:
        case TruthConst(value=v):
            return "true" if v else "false"
        case Atom(name=name):
            return name
        case Not(operand=x):
            return "!" + _prop(x, _PREFIX)
        case And(left=l, right=r):
            return _wrap(f"{_prop(l, _AND)} & {_prop(r, _PREFIX)}", _AND, context)
        case Or(left=l, right=r):
            return _wrap(f"{_prop(l, _OR)} | {_prop(r, _AND)}", _OR, context)
        case Implies(left=l, right=r):
            return _wrap(f"{_prop(l, _OR)} -> {_prop(r, _IMP)}", _IMP, context)
        case Diamond(program=p, body=b):
            return f"<{_prog(p, _CHOICE)}>{_prop(b, _PREFIX)}"
        case Box(program=p, body=b):
            return f"[{_prog(p, _CHOICE)}]{_prop(b, _PREFIX)}"
        case FixP(program=p):
            return f"fix({_prog(p, _CHOICE)})"
        case BigFix(program=p):
            return f"Fix({_prog(p, _CHOICE)})"
        case Tie(left=l, right=r):
            return f"{_prog(l, _CHOICE)} ~ {_prog(r, _CHOICE)}"
    raise TypeError(f"Not a proposition: {f!r}")


def _prog(p: Program, context: int) -> str:
    match p:
        case AtomicProg(name=name):
            return name
        case Skip():
            return "skip"
        case Test(condition=c):
            return f"?({_prop(c, _IMP)})"
        case Seq(first=l, second=r):
            return _wrap(f"{_prog(l, _SEQ)};{_prog(r, _STAR)}", _SEQ, context)
        case Union(left=l, right=r):
            return _wrap(f"{_prog(l, _CHOICE)} + {_prog(r, _INTER)}", _CHOICE, context)
        case Inter(left=l, right=r):
            return _wrap(f"{_prog(l, _INTER)} ^ {_prog(r, _SEQ)}", _INTER, context)
        case Diff(left=l, right=r):
            return _wrap(f"{_prog(l, _INTER)} - {_prog(r, _SEQ)}", _INTER, context)
        case Star(body=b):
            return _prog(b, _STAR) + "*"
        case IfThenElse(condition=c, then_branch=t, else_branch=e):
            return f"if {_prop(c, _IMP)} then {_prog(t, _CHOICE)} else {_prog(e, _CHOICE)} fi"
        case WhileDo(condition=c, body=b):
            return f"while {_prop(c, _IMP)} do {_prog(b, _CHOICE)} od"
    raise TypeError(f"Not a program: {p!r}")


def print_prop(f: Proposition) -> str:
    return _prop(f, _IMP)


def print_program(p: Program) -> str:
    return _prog(p, _CHOICE)

"""Driver specification strings for the command line.

Grammar::

    spec      := named | simple | piecewise
    named     := "example1" | "marshall" | "example2" | "circle-example"
    simple    := kind ":" numbers ["@" horizon]
    piecewise := "piecewise:[" spec (";" spec)* "]@" edge ("," edge)*

    constant:c            linear:m[,c0]          monomial:a,t0,beta
    sqrtcircle:A,B        polynomial:c0,c1,...   sine:A[,omega[,phase]]
    marshall-tail         (Marshall driver after its vertical phase)

Piecewise edges list the interior breakpoints followed by the horizon T; the
first piece starts at 0.  Errors carry the 1-based column of the offending
character.
"""
from __future__ import annotations

from . import drivers, examples
from .errors import DriverDomainError, DriverSpecError

NAMED = {
    "example1": lambda: examples.example1_driver(),
    "marshall": lambda: examples.example1_driver(),
    "example2": lambda: examples.circle_example()[0],
    "circle-example": lambda: examples.circle_example()[0],
}

SIMPLE = {
    "constant": (drivers.constant, 1, 1),
    "linear": (drivers.linear, 1, 2),
    "monomial": (drivers.monomial, 3, 3),
    "sqrtcircle": (drivers.sqrt_circle, 2, 2),
    "polynomial": (None, 1, 11),
    "sine": (drivers.sine, 1, 3),
}


class _Parser:
    def __init__(self, text):
        self.text = text
        self.i = 0

    def fail(self, msg, at=None):
        raise DriverSpecError(msg, self.text, (self.i if at is None else at) + 1)

    def peek(self):
        return self.text[self.i] if self.i < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.fail(f"expected {ch!r}")
        self.i += 1

    def word(self):
        start = self.i
        while self.peek() and (self.peek().isalnum() or self.peek() in "-_"):
            self.i += 1
        if self.i == start:
            self.fail("expected a driver kind")
        return self.text[start:self.i], start

    def number(self):
        start = self.i
        while self.peek() and self.peek() not in ",;@[]":
            self.i += 1
        tok = self.text[start:self.i].strip()
        try:
            return float(tok)
        except ValueError:
            self.fail(f"bad number {tok!r}", start)

    def numbers(self):
        out = [self.number()]
        while self.peek() == ",":
            self.i += 1
            out.append(self.number())
        return out

    def spec(self, horizon=None):
        kind, start = self.word()
        if kind in NAMED:
            return NAMED[kind]()
        if kind == "marshall-tail":
            h = 0.15
            if self.peek() == "@":
                self.i += 1
                h = self.number()
            return self._build(drivers.marshall_tail, [], h, start)
        if kind == "piecewise":
            return self.piecewise(start)
        if kind not in SIMPLE:
            self.fail(f"unknown driver kind {kind!r}", start)
        self.expect(":")
        arg_at = self.i
        args = self.numbers()
        fn, lo, hi = SIMPLE[kind]
        if not lo <= len(args) <= hi:
            self.fail(f"{kind} takes {lo}..{hi} numbers, got {len(args)}", arg_at)
        if self.peek() == "@":
            self.i += 1
            horizon = self.number()
        if kind == "polynomial":
            return self._build(drivers.polynomial, [args], horizon, start)
        return self._build(fn, args, horizon, start)

    def _build(self, fn, args, horizon, start):
        try:
            if horizon is None:
                return fn(*args)
            return fn(*args, horizon=horizon)
        except (DriverDomainError, ValueError) as exc:
            self.fail(str(exc), start)

    def piecewise(self, start):
        self.expect(":")
        self.expect("[")
        starts = [self.i]
        pieces_text = []
        depth = 0
        begin = self.i
        while True:
            ch = self.peek()
            if not ch:
                self.fail("unterminated piece list")
            if ch == "[":
                depth += 1
            elif ch == "]":
                if depth == 0:
                    pieces_text.append((begin, self.i))
                    self.i += 1
                    break
                depth -= 1
            elif ch == ";" and depth == 0:
                pieces_text.append((begin, self.i))
                begin = self.i + 1
                starts.append(begin)
            self.i += 1
        self.expect("@")
        edges = [0.0] + self.numbers()
        if len(edges) != len(pieces_text) + 1:
            self.fail(f"{len(pieces_text)} pieces need {len(pieces_text)} edges "
                      f"(breakpoints then T)")
        pieces = []
        for (a, b), lo_t, hi_t in zip(pieces_text, edges, edges[1:]):
            sub = _Parser(self.text[:b])
            sub.i = a
            piece = sub.spec(horizon=hi_t - lo_t)
            if sub.i != b:
                sub.fail("unexpected trailing characters in piece")
            pieces.append(piece)
        try:
            return drivers.piecewise(pieces, edges)
        except (DriverDomainError, ValueError) as exc:
            self.fail(str(exc), start)


def parse_driver(text: str) -> drivers.Driver:
    """Parse a driver specification; raises DriverSpecError with a column."""
    text = text.strip()
    if not text:
        raise DriverSpecError("empty driver specification", text, 1)
    p = _Parser(text)
    d = p.spec()
    if p.i != len(text):
        p.fail("unexpected trailing characters")
    return d

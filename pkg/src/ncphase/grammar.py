"""Text form of symbols, bivectors and complex matrices.

Symbol grammar::

    poly   := ['-'] term (('+' | '-') term)*
    term   := coeff ['*' factor ('*' factor)*] | factor ('*' factor)*
    coeff  := number ['i'] | '(' number ('+' | '-') number 'i' ')'
    factor := name ['^' integer]        name in x1..xn, p1..pn

Example: ``(0+2i)*x1^2*p1 - 3*x2``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .algebra import Bivector, PhasePoly


class InputFormatError(ValueError):
    """Malformed textual input."""


class SymbolSyntaxError(InputFormatError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col


class UnknownGeneratorError(InputFormatError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SymbolSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, names: tuple[str, ...]):
        self.text = text
        self.names = names
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind=None, text=None) -> _Tok:
        tok = self.peek()
        if (kind and tok.kind != kind) or (text and tok.text != text):
            want = text or kind
            got = tok.text or "end of input"
            raise SymbolSyntaxError(f"expected {want}, got {got!r}", self.text, tok.pos)
        self.i += 1
        return tok

    def fail(self, msg):
        raise SymbolSyntaxError(msg, self.text, self.peek().pos)

    def poly(self) -> PhasePoly:
        out = PhasePoly.zero(self.names)
        sign = 1.0
        if self.peek().text in "+-" and self.peek().kind == "op":
            sign = -1.0 if self.take().text == "-" else 1.0
        out = out + self.term() * sign
        while self.peek().kind == "op" and self.peek().text in "+-":
            sign = -1.0 if self.take().text == "-" else 1.0
            out = out + self.term() * sign
        if self.peek().kind != "end":
            self.fail(f"unexpected {self.peek().text!r}")
        return out

    def term(self) -> PhasePoly:
        tok = self.peek()
        coeff = 1 + 0j
        factors: list[PhasePoly] = []
        if tok.kind == "num" or tok.text == "(":
            coeff = self.coeff()
        elif tok.kind == "name" and tok.text == "i":
            self.take()
            coeff = 1j
        else:
            factors.append(self.factor())
        while self.peek().text == "*":
            self.take()
            factors.append(self.factor())
        out = PhasePoly.constant(self.names, coeff)
        for f in factors:
            out = out * f
        return out

    def number(self) -> float:
        return float(self.take("num").text)

    def coeff(self) -> complex:
        if self.peek().text == "(":
            self.take()
            re_sign = 1.0
            if self.peek().text in "+-" and self.peek().kind == "op":
                re_sign = -1.0 if self.take().text == "-" else 1.0
            re_part = re_sign * self.number()
            if self.peek().text == "i":
                self.take()
                value = complex(0, re_part)
            else:
                op = self.peek()
                if op.text not in "+-" or op.kind != "op":
                    self.fail("expected '+' or '-' in complex coefficient")
                self.take()
                im_part = self.number() * (-1.0 if op.text == "-" else 1.0)
                self.take("name", "i")
                value = complex(re_part, im_part)
            self.take("op", ")")
            return value
        value = self.number()
        if self.peek().kind == "name" and self.peek().text == "i":
            self.take()
            return complex(0, value)
        return complex(value)

    def factor(self) -> PhasePoly:
        tok = self.take("name")
        if tok.text not in self.names:
            raise UnknownGeneratorError(
                f"unknown generator {tok.text!r} (known: {', '.join(self.names)}) "
                f"at column {tok.pos + 1}"
            )
        power = 1
        if self.peek().text == "^":
            self.take()
            ptok = self.take("num")
            if not ptok.text.isdigit():
                raise SymbolSyntaxError("exponent must be a non-negative integer", self.text, ptok.pos)
            power = int(ptok.text)
        return PhasePoly.generator(self.names, tok.text, power)


def parse_symbol(text: str, names) -> PhasePoly:
    """Parse ``text`` into a :class:`PhasePoly` over ``names``."""
    if isinstance(names, Bivector):
        names = names.names
    return _Parser(text, tuple(names)).poly()


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def format_complex(z: complex) -> str:
    """``re+imi`` form used in reports, e.g. ``0+0.5i``."""
    z = complex(z)
    re_, im = z.real + 0.0, z.imag + 0.0
    sign = "-" if np.signbit(im) else "+"
    return f"{_fmt_real(re_)}{sign}{_fmt_real(abs(im))}i"


def render(f: PhasePoly) -> str:
    if not len(f):
        return "0"
    parts = []
    for exps, c in f.items():
        mono = "*".join(
            name if k == 1 else f"{name}^{k}" for name, k in zip(f.names, exps) if k
        )
        if c.imag == 0:
            neg = c.real < 0
            mag = abs(c.real)
            coeff = "" if (mag == 1 and mono) else _fmt_real(mag)
        else:
            neg = False
            coeff = f"({format_complex(c)})"
        body = "*".join(s for s in (coeff, mono) if s)
        parts.append(("-" if neg else "+", body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def parse_complex(token: str) -> complex:
    """Accepts ``1.5``, ``2i``, ``1-2i``, ``1+2j`` and ``re,im``."""
    token = token.strip()
    try:
        if "," in token:
            re_, im = token.split(",")
            return complex(float(re_), float(im))
        t = token.replace("i", "j")
        if t.endswith("j") and t[:-1] in ("", "+", "-"):
            t = t[:-1] + "1j"
        return complex(t)
    except ValueError:
        raise InputFormatError(f"not a complex number: {token!r}") from None


def parse_bivector(text: str, names=None) -> Bivector:
    """``n`` followed by the n(n-1)/2 upper-triangle entries, row-major."""
    tokens = text.replace(",", " ").split()
    try:
        n = int(tokens[0])
        return Bivector.from_upper(n, [float(t) for t in tokens[1:]], names)
    except (IndexError, ValueError) as exc:
        raise InputFormatError(f"bad bivector {text!r}: {exc}") from None


def parse_matrix(text: str) -> np.ndarray:
    """Whitespace-separated complex entries, one row per line."""
    rows = [
        [parse_complex(tok) for tok in line.split()]
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise InputFormatError("matrix rows are empty or ragged")
    return np.array(rows, dtype=complex)

"""Input grammar for Lagrangian densities and forms.

Coordinates are x1..xn; fiber fields are named identifiers mapped to
sigma = 1..m in roster order (u, v, w by default).  Jet subscripts take
index digits (u_12) or the letter aliases x,y,z for 1,2,3 (u_xy).  The
scalar operators are + - * / ^ with ^ binding tightest, then * and /,
then the wedge /\\, then + and -.  Form atoms are dx1.., w(u,J), dy(u,J),
ds, and ds(i,..); dy atoms are rewritten into the contact basis on exit.
"""

from __future__ import annotations

import re

from . import symexpr
from .forms import Context, Form, ds_block, to_contact_basis
from .lepage import Lagrangian
from .printers import field_name
from .symexpr import Scalar


class InputSyntaxError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class OrderViolation(Exception):
    """A jet coordinate exceeds the declared order."""


class UnknownIdentifier(Exception):
    """An identifier is neither a coordinate, a field, nor a form atom."""


_TOKEN = re.compile(r"""
    (?P<WEDGE>/\\)
  | (?P<NUMBER>\d+)
  | (?P<IDENT>[A-Za-z][A-Za-z0-9]*(?:_[A-Za-z0-9]+)?)
  | (?P<OP>[+\-*/^(),])
  | (?P<WS>\s+)
""", re.VERBOSE)

_ALIASES = {'x': 1, 'y': 2, 'z': 3}


def default_fields(m: int):
    return tuple(field_name(sigma) for sigma in range(1, m + 1))


def _tokenize(text: str):
    tokens = []
    pos = 0
    line = 1
    linestart = 0
    while pos < len(text):
        mo = _TOKEN.match(text, pos)
        if mo is None:
            raise InputSyntaxError(f"unexpected character {text[pos]!r}",
                                   line, pos - linestart + 1)
        kind = mo.lastgroup
        value = mo.group()
        if kind == 'WS':
            line += value.count("\n")
            if "\n" in value:
                linestart = mo.end() - len(value.rsplit("\n", 1)[-1])
        else:
            tokens.append((kind if kind != 'OP' else value, value,
                           line, mo.start() - linestart + 1))
        pos = mo.end()
    tokens.append(('END', '', line, pos - linestart + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: Context, order: int, fields):
        self.ctx = ctx
        self.order = order
        self.fields = tuple(fields) if fields else default_fields(ctx.m)
        if len(self.fields) != ctx.m:
            raise ValueError(f"{ctx.m} field names needed, got {len(self.fields)}")
        self.tokens = _tokenize(text)
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise InputSyntaxError(f"expected {kind!r}, found {tok[1]!r}",
                                   tok[2], tok[3])
        return tok

    def error(self, message):
        tok = self.peek()
        raise InputSyntaxError(message, tok[2], tok[3])

    # -- grammar -----------------------------------------------------------

    def parse(self):
        value = self.expression()
        if self.peek()[0] != 'END':
            self.error(f"trailing input starting at {self.peek()[1]!r}")
        return value

    def expression(self):
        value = self.wedge_term()
        while self.peek()[0] in ('+', '-'):
            op = self.next()[0]
            rhs = self.wedge_term()
            rhs = rhs if op == '+' else _negate(rhs)
            value = _add(self, value, rhs)
        return value

    def wedge_term(self):
        value = self.product()
        while self.peek()[0] == 'WEDGE':
            self.next()
            value = _wedge(self, value, self.product())
        return value

    def product(self):
        value = self.unary()
        while self.peek()[0] in ('*', '/'):
            op = self.next()[0]
            rhs = self.unary()
            value = _multiply(self, value, rhs) if op == '*' else _divide(self, value, rhs)
        return value

    def unary(self):
        if self.peek()[0] in ('+', '-'):
            op = self.next()[0]
            value = self.unary()
            return value if op == '+' else _negate(value)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == '^':
            self.next()
            tok = self.expect('NUMBER')
            if isinstance(base, Form):
                self.error("cannot raise a form to a power")
            return base ** int(tok[1])
        return base

    def atom(self):
        tok = self.next()
        kind, value = tok[0], tok[1]
        if kind == 'NUMBER':
            return symexpr.rational(int(value))
        if kind == '(':
            inner = self.expression()
            self.expect(')')
            return inner
        if kind == 'IDENT':
            return self.identifier(tok)
        raise InputSyntaxError(f"unexpected token {value!r}", tok[2], tok[3])

    # -- identifiers ---------------------------------------------------------

    def identifier(self, tok):
        name = tok[1]
        if name == 'ds':
            return self.ds_atom()
        if name in ('w', 'dy') and self.peek()[0] == '(':
            return self.omega_atom(name == 'dy')
        if re.fullmatch(r"dx[0-9]+", name):
            i = int(name[2:])
            if not 1 <= i <= self.ctx.n:
                raise UnknownIdentifier(f"dx{i}: base index out of range 1..{self.ctx.n}")
            return Form(self.ctx, {(('dx', i),): Scalar.one()})
        if re.fullmatch(r"x[0-9]+", name):
            i = int(name[1:])
            if not 1 <= i <= self.ctx.n:
                raise UnknownIdentifier(f"x{i}: base index out of range 1..{self.ctx.n}")
            return symexpr.x(i)
        base, _, sub = name.partition('_')
        if base in self.fields:
            sigma = self.fields.index(base) + 1
            J = self.subscript(sub, tok) if sub else ()
            if len(J) > self.order:
                raise OrderViolation(
                    f"{name}: jet order {len(J)} exceeds declared order {self.order}")
            return symexpr.y(sigma, *J)
        raise UnknownIdentifier(f"unknown identifier {name!r}")

    def subscript(self, sub: str, tok):
        J = []
        for ch in sub:
            if ch.isdigit():
                i = int(ch)
            elif ch in _ALIASES:
                i = _ALIASES[ch]
            else:
                raise InputSyntaxError(f"bad jet subscript character {ch!r}",
                                       tok[2], tok[3])
            if not 1 <= i <= self.ctx.n:
                raise UnknownIdentifier(
                    f"jet index {i} out of range 1..{self.ctx.n}")
            J.append(i)
        return tuple(J)

    def ds_atom(self):
        if self.peek()[0] != '(':
            return ds_block(self.ctx, ())
        self.next()
        block = []
        while True:
            tok = self.expect('NUMBER')
            i = int(tok[1])
            if not 1 <= i <= self.ctx.n:
                raise UnknownIdentifier(f"ds index {i} out of range 1..{self.ctx.n}")
            block.append(i)
            if self.peek()[0] == ',':
                self.next()
                continue
            break
        self.expect(')')
        return ds_block(self.ctx, tuple(block))

    def omega_atom(self, is_dy: bool):
        self.expect('(')
        tok = self.expect('IDENT')
        if tok[1] not in self.fields:
            raise UnknownIdentifier(f"unknown field {tok[1]!r}")
        sigma = self.fields.index(tok[1]) + 1
        J = ()
        if self.peek()[0] == ',':
            self.next()
            sub = self.next()
            if sub[0] not in ('NUMBER', 'IDENT'):
                raise InputSyntaxError("expected jet subscript", sub[2], sub[3])
            J = self.subscript(sub[1], sub)
            if len(J) > self.order + (1 if not is_dy else 0):
                raise OrderViolation(
                    f"contact index {sub[1]}: order {len(J)} exceeds the working order")
        self.expect(')')
        kind = 'dy' if is_dy else 'w'
        return Form(self.ctx, {((kind, sigma, tuple(sorted(J))),): Scalar.one()})


# -- operations on mixed scalar/form values ------------------------------------


def _negate(v):
    return v.scale(-1) if isinstance(v, Form) else -v


def _add(p, a, b):
    if isinstance(a, Form) != isinstance(b, Form):
        if isinstance(a, Form) and not a.terms:
            return b
        if isinstance(b, Form) and not b.terms:
            return a
        a0 = a if isinstance(a, Form) else Form.from_scalar(p.ctx, a)
        b0 = b if isinstance(b, Form) else Form.from_scalar(p.ctx, b)
        return a0 + b0
    if isinstance(a, Form):
        return a + b
    return a + b


def _multiply(p, a, b):
    if isinstance(a, Form) and isinstance(b, Form):
        p.error("use /\\ to multiply forms")
    if isinstance(a, Form):
        return a.scale(b)
    if isinstance(b, Form):
        return b.scale(a)
    return a * b


def _divide(p, a, b):
    if isinstance(b, Form):
        p.error("cannot divide by a form")
    if isinstance(a, Form):
        return a.scale(Scalar.one() / b)
    return a / b


def _wedge(p, a, b):
    from .forms import wedge as form_wedge
    a0 = a if isinstance(a, Form) else Form.from_scalar(p.ctx, a)
    b0 = b if isinstance(b, Form) else Form.from_scalar(p.ctx, b)
    return form_wedge(a0, b0)


# -- public entry points ---------------------------------------------------------


def parse_scalar(text: str, ctx: Context, order: int, fields=None) -> Scalar:
    value = _Parser(text, ctx, order, fields).parse()
    if isinstance(value, Form):
        raise InputSyntaxError("expected a scalar expression, found a form", 1, 1)
    return value


def parse_lagrangian(text: str, ctx: Context, order: int, fields=None) -> Lagrangian:
    return Lagrangian(ctx, order, parse_scalar(text, ctx, order, fields))


def parse_form(text: str, ctx: Context, order: int | None = None, fields=None) -> Form:
    order = order if order is not None else ctx.r
    value = _Parser(text, ctx, order, fields).parse()
    if not isinstance(value, Form):
        value = Form.from_scalar(ctx, value)
    if any(cov[0] == 'dy' for w in value.terms for cov in w):
        return to_contact_basis(value.ctx, list(value.terms.items()))
    return value

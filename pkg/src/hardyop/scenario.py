"""Scenario documents: ``key = value`` lines describing one analysis run.

Function expressions use a prefix grammar::

    expr   := number | "z" | name "(" args ")"
    number := real or complex literal, e.g. 0.5, -0.3+0.4j, 2j

    poly(c0, c1, ...)           polynomial c0 + c1 z + ...
    rational([n0, ...], [d0, ...])
    blaschke(a1, a2, ...)       finite Blaschke product
    kernel(a[, p])              k_a^{1/p} (p defaults to 1)
    cauchy(w)                   1/(1 - conj(w) z)
    pow(f, n)                   f**n
    mul(x, y, ...)              product; numeric arguments become a scalar factor
    add(x, y, ...)              sum
    compose(f, g)               f ∘ g
    dilate(f, r)                f(r z)

Keys ``u``, ``phi``, ``p`` and ``q`` are required, ``name`` is optional and
every field of :class:`~hardyop.estimators.AnalysisConfig` may be overridden.
``p`` and ``q`` accept ``inf``. ``#`` starts a comment.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field

from . import funcspace as fs
from .errors import ParseError, ValidationError
from .estimators import AnalysisConfig

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?
        (?:j|[+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?j)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>[()\[\],])
    """,
    re.VERBOSE,
)

_CONFIG_FIELDS = {f.name: f for f in dataclasses.fields(AnalysisConfig)}
_REQUIRED = ("u", "phi", "p", "q")
_KNOWN = set(_REQUIRED) | {"name"} | set(_CONFIG_FIELDS)


class _Parser:
    def __init__(self, text: str, line: int = 1, col0: int = 1):
        self.line = line
        self.col0 = col0
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                self.error(f"unexpected character {text[pos]!r}", pos)
            if m.lastgroup != "ws":
                self.toks.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.toks.append(("end", "", len(text)))
        self.i = 0

    def error(self, msg, pos=None):
        if pos is None:
            pos = self.toks[self.i][2]
        raise ParseError(msg, self.line, self.col0 + pos)

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            self.error(f"expected {want!r}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def finish(self):
        if self.peek()[0] != "end":
            self.error(f"unexpected trailing {self.peek()[1]!r}")

    # Expressions evaluate to either a complex number or a DiscFunction.
    def expr(self):
        kind, val, pos = self.peek()
        if kind == "number":
            self.take()
            return complex(val)
        if kind == "ident":
            self.take()
            if val == "z":
                return fs.identity()
            if self.peek()[1] != "(":
                self.error(f"unknown symbol {val!r}", pos)
            return self.call(val, pos)
        self.error(f"unexpected {val or 'end of input'!r}")

    def args(self):
        self.take("punct", "(")
        out = []
        if self.peek()[1] != ")":
            while True:
                out.append((self.peek()[2], self.expr_or_list()))
                if self.peek()[1] == ",":
                    self.take()
                    continue
                break
        self.take("punct", ")")
        return out

    def expr_or_list(self):
        if self.peek()[1] == "[":
            self.take()
            items = []
            if self.peek()[1] != "]":
                while True:
                    items.append(self.number())
                    if self.peek()[1] == ",":
                        self.take()
                        continue
                    break
            self.take("punct", "]")
            return items
        return self.expr()

    def number(self):
        kind, val, _ = self.peek()
        if kind != "number":
            self.error(f"expected a number, found {val or 'end of input'!r}")
        self.take()
        return complex(val)

    def call(self, name, pos):
        args = self.args()

        def nums(lo=0):
            for p, a in args[lo:]:
                if not isinstance(a, complex):
                    self.error("expected a numeric argument", p)
            return [a for _, a in args[lo:]]

        def fn(k):
            p, a = args[k]
            if isinstance(a, list):
                self.error("unexpected list", p)
            return fs.constant(a) if isinstance(a, complex) else a

        def arity(*allowed):
            if len(args) not in allowed:
                self.error(f"{name}() takes {' or '.join(map(str, allowed))} argument(s), got {len(args)}", pos)

        def real(k):
            p, a = args[k]
            if not isinstance(a, complex) or a.imag != 0:
                self.error("expected a real number", p)
            return a.real

        try:
            if name == "poly":
                return fs.polynomial(nums())
            if name == "rational":
                arity(2)
                for p, a in args:
                    if not isinstance(a, list):
                        self.error("rational() takes two coefficient lists", p)
                return fs.rational(args[0][1], args[1][1])
            if name == "blaschke":
                return fs.blaschke(nums())
            if name == "kernel":
                arity(1, 2)
                (a,) = nums()[:1]
                return fs.kernel_power(a, real(1) if len(args) == 2 else 1.0)
            if name == "cauchy":
                arity(1)
                return fs.cauchy(nums()[0])
            if name == "pow":
                arity(2)
                n = real(1)
                if n != int(n) or n < 0:
                    self.error("pow() exponent must be a non-negative integer", args[1][0])
                return fs.power(fn(0), int(n))
            if name == "compose":
                arity(2)
                return fs.compose(fn(0), fn(1))
            if name == "dilate":
                arity(2)
                return fs.radial_dilation(fn(0), real(1))
            if name == "add":
                if not args:
                    self.error("add() needs arguments", pos)
                return fs.add(*[fn(k) for k in range(len(args))])
            if name == "mul":
                if not args:
                    self.error("mul() needs arguments", pos)
                scalar = 1 + 0j
                funcs = []
                n_scalars = 0
                for k, (p, a) in enumerate(args):
                    if isinstance(a, complex):
                        scalar *= a
                        n_scalars += 1
                    else:
                        funcs.append(fn(k))
                if not funcs:
                    return fs.constant(scalar)
                body = fs.mul(*funcs)
                return fs.scalar_multiple(scalar, body) if n_scalars else body
        except ValidationError as err:
            raise ValidationError(f"line {self.line}: {err}") from err
        self.error(f"unknown function {name!r}", pos)


def parse_expression(text: str, line: int = 1, col: int = 1) -> fs.DiscFunction:
    """Parse a function expression; numbers become constant functions."""
    p = _Parser(text, line, col)
    val = p.expr()
    p.finish()
    if isinstance(val, list):
        p.error("a list is not a function", 0)
    return fs.constant(val) if isinstance(val, complex) else val


@dataclass(frozen=True)
class Scenario:
    """One ``(u, φ, p, q)`` instance with its analysis settings."""

    name: str
    u: fs.DiscFunction
    phi: fs.SelfMap
    p: fs.Exponent
    q: fs.Exponent
    config: AnalysisConfig = field(default_factory=AnalysisConfig)

    def with_overrides(self, **kw) -> "Scenario":
        return dataclasses.replace(self, config=dataclasses.replace(self.config, **kw))


def _config_value(key, raw, line, col):
    default = _CONFIG_FIELDS[key].default
    try:
        if isinstance(default, tuple):
            return tuple(int(x) for x in raw.split(",") if x.strip())
        if isinstance(default, bool):
            if raw.lower() not in ("true", "false"):
                raise ValueError(raw)
            return raw.lower() == "true"
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError:
        raise ParseError(f"invalid value {raw!r} for {key}", line, col) from None


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document.

    Raises
    ------
    ParseError
        On syntax errors, unknown or duplicate keys, and missing required keys.
    ValidationError
        When values parse but are invalid, e.g. ``phi`` is not a self-map.
    """
    seen = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise ParseError("expected 'key = value'", ln, col)
        key_part, val_part = body.split("=", 1)
        key = key_part.strip()
        kcol = len(key_part) - len(key_part.lstrip()) + 1
        if key not in _KNOWN:
            raise ParseError(f"unknown key {key!r}", ln, kcol)
        if key in seen:
            raise ParseError(f"duplicate key {key!r}", ln, kcol)
        vcol = len(key_part) + 2 + (len(val_part) - len(val_part.lstrip()))
        value = val_part.strip()
        if not value:
            raise ParseError(f"missing value for {key!r}", ln, vcol)
        seen[key] = (value, ln, vcol)
    for key in _REQUIRED:
        if key not in seen:
            raise ParseError(f"missing required key {key!r}", max(1, len(text.splitlines())), 1)

    u = parse_expression(*seen["u"])
    phi_fn = parse_expression(*seen["phi"])
    phi = fs.SelfMap(phi_fn)
    exps = {}
    for key in ("p", "q"):
        value, ln, col = seen[key]
        try:
            exps[key] = fs.as_exponent(value)
        except (ValueError, ValidationError):
            raise ParseError(f"invalid exponent {value!r}", ln, col) from None
    overrides = {k: _config_value(k, v[0], v[1], v[2]) for k, v in seen.items() if k in _CONFIG_FIELDS}
    config = AnalysisConfig(**overrides)
    name = seen.get("name", ("unnamed",))[0]
    return Scenario(name, u, phi, exps["p"], exps["q"], config)


def serialize(s: Scenario) -> str:
    """Canonical text form; ``parse_scenario(serialize(s)) == s``."""
    lines = [f"name = {s.name}", f"u = {s.u.to_expr()}", f"phi = {s.phi.to_expr()}",
             f"p = {s.p}", f"q = {s.q}"]
    default = AnalysisConfig()
    for f in dataclasses.fields(AnalysisConfig):
        v = getattr(s.config, f.name)
        if v != getattr(default, f.name):
            text = ", ".join(map(str, v)) if isinstance(v, tuple) else repr(v) if isinstance(v, float) else str(v)
            lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())

"""Exact arithmetic: sparse multivariate polynomials over Q and Laurent
polynomials in a distinguished curve parameter.

A polynomial carries its own ordered tuple of variable names and a dict
mapping exponent tuples to nonzero `fractions.Fraction` coefficients.
Binary operations unify variable sets by name, so values built in different
contexts mix freely.  Normal form: variables sorted by name, no zero
coefficients, no variable that appears in no term.  The zero polynomial has
no variables and no terms.  Values are treated as immutable.

Laurent polynomials map integer powers of the parameter t to polynomial
coefficients; the t -> 0 limit of one is its t^0 coefficient when no
negative power survives, and None ("no limit", a result, not an error)
otherwise.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Scalar = Fraction

ScalarLike = Union[Fraction, int]


def _as_fraction(c: ScalarLike) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"not an exact scalar: {c!r}")


class MPoly:
    """Multivariate polynomial with Fraction coefficients."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, variables: tuple[str, ...] = (), terms: Mapping[tuple[int, ...], Fraction] | None = None):
        vars_, terms_ = _normalize(tuple(variables), dict(terms or {}))
        object.__setattr__(self, "vars", vars_)
        object.__setattr__(self, "terms", terms_)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("MPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, c: ScalarLike) -> "MPoly":
        c = _as_fraction(c)
        return _raw((), {(): c} if c else {})

    @classmethod
    def variable(cls, name: str) -> "MPoly":
        return _raw((name,), {(1,): Fraction(1)})

    @classmethod
    def zero(cls) -> "MPoly":
        return _ZERO

    @classmethod
    def one(cls) -> "MPoly":
        return _ONE

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.vars

    def constant_value(self) -> Fraction:
        if self.vars:
            raise ValueError(f"not a constant: {self}")
        return self.terms.get((), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "MPoly":
        return _raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __add__(self, other) -> "MPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        vars_, a, b = _align(self, other)
        out = dict(a)
        for e, c in b.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MPoly(vars_, out)

    __radd__ = __add__

    def __sub__(self, other) -> "MPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if not c:
                return _ZERO
            return _raw(self.vars, {e: k * c for e, k in self.terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        if not self.terms or not other.terms:
            return _ZERO
        vars_, a, b = _align(self, other)
        out: dict[tuple[int, ...], Fraction] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, Fraction(0)) + ca * cb
                if s:
                    out[e] = s
                else:
                    del out[e]
        return MPoly(vars_, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"polynomial power must be a nonnegative integer: {n!r}")
        result = _ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- structure ---------------------------------------------------------

    def substitute(self, bindings: Mapping[str, "MPoly | ScalarLike"]) -> "MPoly":
        """Replace variables by polynomials; unbound variables stay."""
        if not self.terms:
            return _ZERO
        bound: dict[str, MPoly] = {}
        for name, val in bindings.items():
            bound[name] = val if isinstance(val, MPoly) else MPoly.const(val)
        if not any(v in bound for v in self.vars):
            return self
        total = _ZERO
        for exps, coeff in self.terms.items():
            term = MPoly.const(coeff)
            for name, e in zip(self.vars, exps):
                if not e:
                    continue
                base = bound.get(name)
                if base is None:
                    base = MPoly.variable(name)
                term = term * base ** e
            total = total + term
        return total

    def evaluate(self, point: Mapping[str, ScalarLike]) -> Fraction:
        missing = [v for v in self.vars if v not in point]
        if missing:
            raise KeyError(f"unbound variables in evaluation: {missing}")
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            val = coeff
            for name, e in zip(self.vars, exps):
                if e:
                    val *= _as_fraction(point[name]) ** e
            total += val
        return total

    # -- identity ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.vars, tuple(sorted(self.terms.items()))))
            object.__setattr__(self, "_hash", h)
        return h

    # -- text --------------------------------------------------------------

    def to_text(self, surface: bool = True) -> str:
        """Canonical text form; `surface` renders c_I_J_K as cIJ^K."""
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)
        chunks: list[str] = []
        for exps, coeff in items:
            factors = []
            for name, e in zip(self.vars, exps):
                if not e:
                    continue
                v = _surface_name(name) if surface else name
                if e == 1:
                    factors.append(v)
                elif "^" in v:
                    factors.append(f"({v})^{e}")
                else:
                    factors.append(f"{v}^{e}")
            mono = "*".join(factors)
            if not mono:
                body = str(abs(coeff))
            elif abs(coeff) == 1:
                body = mono
            else:
                body = f"{abs(coeff)}*{mono}"
            sign = "-" if coeff < 0 else "+"
            chunks.append((sign, body))
        first_sign, first_body = chunks[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in chunks[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"MPoly({self.to_text(surface=False)})"


def _raw(vars_: tuple[str, ...], terms: dict[tuple[int, ...], Fraction]) -> MPoly:
    """Construct without re-normalizing (caller guarantees normal form)."""
    p = object.__new__(MPoly)
    object.__setattr__(p, "vars", vars_)
    object.__setattr__(p, "terms", terms)
    object.__setattr__(p, "_hash", None)
    return p


def _normalize(vars_: tuple[str, ...], terms: dict) -> tuple[tuple[str, ...], dict]:
    if len(set(vars_)) != len(vars_):
        raise ValueError(f"duplicate variable names in {vars_}")
    clean = {}
    for exps, coeff in terms.items():
        exps = tuple(exps)
        if len(exps) != len(vars_):
            raise ValueError(f"exponent tuple {exps} does not match variables {vars_}")
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in {exps}")
        coeff = _as_fraction(coeff)
        if coeff:
            clean[exps] = clean.get(exps, Fraction(0)) + coeff
    clean = {e: c for e, c in clean.items() if c}
    if not clean:
        return (), {}
    used = [i for i in range(len(vars_)) if any(e[i] for e in clean)]
    order = sorted(used, key=lambda i: vars_[i])
    if [vars_[i] for i in order] != list(vars_):
        new_vars = tuple(vars_[i] for i in order)
        if len(set(new_vars)) != len(new_vars):
            raise ValueError(f"duplicate variable names in {vars_}")
        clean = {tuple(e[i] for i in order): c for e, c in clean.items()}
        return new_vars, clean
    return vars_, clean


def _coerce(x) -> "MPoly":
    if isinstance(x, MPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return MPoly.const(x)
    return NotImplemented


def _align(a: MPoly, b: MPoly):
    if a.vars == b.vars:
        return a.vars, a.terms, b.terms
    vars_ = tuple(sorted(set(a.vars) | set(b.vars)))
    return vars_, _remap(a, vars_), _remap(b, vars_)


def _remap(p: MPoly, vars_: tuple[str, ...]) -> dict:
    if p.vars == vars_:
        return p.terms
    pos = {v: i for i, v in enumerate(vars_)}
    out = {}
    zero = [0] * len(vars_)
    for exps, coeff in p.terms.items():
        e = zero.copy()
        for name, k in zip(p.vars, exps):
            e[pos[name]] = k
        out[tuple(e)] = coeff
    return out


_ZERO = _raw((), {})
_ONE = _raw((), {(): Fraction(1)})

_CSURFACE = re.compile(r"^c_(\d)_(\d)_(\d)$")


def _surface_name(name: str) -> str:
    m = _CSURFACE.match(name)
    if m:
        i, j, k = m.groups()
        return f"c{i}{j}^{k}"
    return name


def structure_var(i: int, j: int, k: int) -> str:
    """Internal variable name for the structure constant c_ij^k."""
    return f"c_{i}_{j}_{k}"


def structure_var_indices(name: str) -> tuple[int, int, int] | None:
    m = _CSURFACE.match(name)
    if not m:
        return None
    return tuple(int(g) for g in m.groups())  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Laurent polynomials in t with MPoly coefficients
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Finite sum of t^k * p_k with integer k (possibly negative)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, MPoly | ScalarLike] | None = None):
        clean: dict[int, MPoly] = {}
        for k, p in (terms or {}).items():
            p = p if isinstance(p, MPoly) else MPoly.const(p)
            if p:
                prev = clean.get(k)
                p = prev + p if prev is not None else p
                if p:
                    clean[k] = p
                else:
                    clean.pop(k, None)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def from_mpoly(cls, p: MPoly | ScalarLike) -> "LaurentPoly":
        return cls({0: p})

    @classmethod
    def t_power(cls, k: int, coeff: MPoly | ScalarLike = 1) -> "LaurentPoly":
        return cls({k: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def order(self) -> int | None:
        """Smallest power of t present; None for the zero element."""
        if not self.terms:
            return None
        return min(self.terms)

    def coeff(self, k: int) -> MPoly:
        return self.terms.get(k, _ZERO)

    def leading_coeff(self) -> MPoly:
        o = self.order()
        return _ZERO if o is None else self.terms[o]

    def limit(self) -> MPoly | None:
        """t -> 0 limit: the t^0 coefficient, or None when a negative
        power survives (no finite limit)."""
        o = self.order()
        if o is None:
            return _ZERO
        if o < 0:
            return None
        return self.coeff(0)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -p for k, p in self.terms.items()})

    def __add__(self, other) -> "LaurentPoly":
        other = _coerce_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for k, p in other.terms.items():
            s = out.get(k, _ZERO) + p
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return LaurentPoly(out)

    __radd__ = __add__

    def __sub__(self, other) -> "LaurentPoly":
        other = _coerce_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        other = _coerce_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "LaurentPoly":
        other = _coerce_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[int, MPoly] = {}
        for ka, pa in self.terms.items():
            for kb, pb in other.terms.items():
                k = ka + kb
                s = out.get(k, _ZERO) + pa * pb
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"laurent power must be a nonnegative integer: {n!r}")
        result = LaurentPoly.from_mpoly(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = _coerce_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def to_text(self, surface: bool = True) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            p = self.terms[k]
            body = p.to_text(surface)
            if k == 0:
                parts.append(body)
            else:
                tpow = "t" if k == 1 else f"t^{k}"
                if body == "1":
                    parts.append(tpow)
                elif body == "-1":
                    parts.append(f"-{tpow}")
                elif "+" in body or " - " in body or body.startswith("-"):
                    parts.append(f"({body})*{tpow}")
                else:
                    parts.append(f"{body}*{tpow}")
        out = parts[0]
        for part in parts[1:]:
            if part.startswith("-"):
                out += f" - {part[1:]}"
            else:
                out += f" + {part}"
        return out

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"LaurentPoly({self.to_text(surface=False)})"


def _coerce_laurent(x) -> "LaurentPoly":
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, MPoly):
        return LaurentPoly.from_mpoly(x)
    if isinstance(x, (int, Fraction)):
        return LaurentPoly.from_mpoly(MPoly.const(x))
    return NotImplemented


def laurent_limit(p: LaurentPoly) -> MPoly | None:
    """t -> 0 limit of a Laurent polynomial (None = no finite limit)."""
    return p.limit()


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class PolyParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} (column {pos + 1} in {text!r})")
        self.pos = pos


_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<cvar>c(?P<ci>\d)(?P<cj>\d)\^(?P<ck>\d))"
    r"|(?P<number>\d+(?:/\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*^()])"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    src = text.replace("−", "-").replace("·", "*")
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise PolyParseError(f"unexpected character {src[pos]!r}", text, pos)
        if m.group("cvar"):
            i, j, k = m.group("ci"), m.group("cj"), m.group("ck")
            tokens.append(("name", structure_var(int(i), int(j), int(k)), pos))
        elif m.group("number"):
            tokens.append(("number", m.group(), pos))
        elif m.group("name"):
            tokens.append(("name", m.group(), pos))
        elif m.group("op"):
            tokens.append(("op", m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    """Recursive descent for `term (+|- term)*` with * products, ^ powers
    and parentheses.  Produces LaurentPoly when a t-name is given, else
    MPoly."""

    def __init__(self, text: str, t_name: str | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.t_name = t_name

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise PolyParseError(f"expected {op!r}, found {val!r}", self.text, pos)

    def parse(self):
        value = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolyParseError(f"unexpected trailing {val!r}", self.text, pos)
        return value

    def expr(self):
        negate = False
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            negate = val == "-"
        value = self.term()
        if negate:
            value = -value
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                value = value - rhs if val == "-" else value + rhs
            else:
                return value

    def term(self):
        value = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                value = value * self.factor()
            else:
                return value

    def factor(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            exp = self.exponent()
            if exp >= 0:
                return base ** exp
            # negative powers only exist for the laurent parameter itself
            if isinstance(base, LaurentPoly) and set(base.terms) == {1} and base.coeff(1) == _ONE:
                return LaurentPoly.t_power(exp)
            _, _, pos = self.peek()
            raise PolyParseError(f"negative exponent {exp} on a non-parameter base", self.text, pos)
        return base

    def exponent(self) -> int:
        kind, val, pos = self.take()
        sign = 1
        if kind == "op" and val == "-":
            sign = -1
            kind, val, pos = self.take()
        if kind != "number" or "/" in val:
            raise PolyParseError(f"expected integer exponent, found {val!r}", self.text, pos)
        return sign * int(val)

    def atom(self):
        kind, val, pos = self.take()
        if kind == "number":
            c = MPoly.const(Fraction(val))
            return LaurentPoly.from_mpoly(c) if self.t_name is not None else c
        if kind == "name":
            if self.t_name is not None and val == self.t_name:
                return LaurentPoly.t_power(1)
            v = MPoly.variable(val)
            return LaurentPoly.from_mpoly(v) if self.t_name is not None else v
        if kind == "op" and val == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        raise PolyParseError(f"unexpected {val!r}", self.text, pos)


def parse_poly(text: str) -> MPoly:
    """Parse polynomial text like `2*c11^1 - 3/2*c12^2*c13^3`."""
    return _Parser(text, None).parse()


def parse_laurent(text: str, t_name: str = "t") -> LaurentPoly:
    """Parse Laurent polynomial text like `t^-1 + 2*t*x`; `t_name` is the
    only base allowed a negative exponent."""
    return _Parser(text, t_name).parse()

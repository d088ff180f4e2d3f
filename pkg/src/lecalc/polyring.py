"""Sparse multivariate polynomials over the rationals.

A polynomial is an immutable map from exponent tuples to nonzero
``Fraction`` coefficients, tied to a :class:`Ring` that fixes the variable
names and the default monomial order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from .errors import InputError, ParseError

Exp = tuple[int, ...]
Scalar = Union[int, Fraction]


# --------------------------------------------------------------------------
# monomial orders


def _degrevlex_key(e: Exp) -> tuple:
    return (sum(e), tuple(-x for x in reversed(e)))


@dataclass(frozen=True)
class MonomialOrder:
    """A total order on exponent vectors, given by a sort key (larger key = larger monomial)."""

    name: str
    key: Callable[[Exp], tuple] = field(compare=False, hash=False, repr=False)

    def __str__(self) -> str:
        return self.name


LEX = MonomialOrder("lex", lambda e: e)
DEGREVLEX = MonomialOrder("degrevlex", _degrevlex_key)


def block_order(k: int) -> MonomialOrder:
    """Elimination order: degrevlex on the first ``k`` variables, ties broken by degrevlex on the rest."""
    if k < 0:
        raise ValueError("block size must be non-negative")

    def key(e: Exp) -> tuple:
        return (_degrevlex_key(e[:k]), _degrevlex_key(e[k:]))

    return MonomialOrder(f"block({k})", key)


def order_from_name(name: str) -> MonomialOrder:
    if name == "lex":
        return LEX
    if name == "degrevlex":
        return DEGREVLEX
    m = re.fullmatch(r"block\((\d+)\)", name)
    if m:
        return block_order(int(m.group(1)))
    raise InputError(f"unknown monomial order {name!r}")


# --------------------------------------------------------------------------
# rings

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Ring:
    names: tuple[str, ...]
    order: MonomialOrder = DEGREVLEX

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise InputError(f"duplicate variable names in {self.names}")
        for n in self.names:
            if not _IDENT.fullmatch(n):
                raise InputError(f"invalid variable name {n!r}")

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown variable {name!r}") from None

    def with_order(self, order: MonomialOrder) -> "Ring":
        return Ring(self.names, order)

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c: Scalar) -> "Poly":
        return Poly(self, {(0,) * self.nvars: Fraction(c)})

    def var(self, which: Union[int, str]) -> "Poly":
        i = self.index(which) if isinstance(which, str) else which
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): Fraction(1)})

    def gens(self) -> list["Poly"]:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exp: Sequence[int], coeff: Scalar = 1) -> "Poly":
        if len(exp) != self.nvars:
            raise ValueError("exponent length does not match ring")
        return Poly(self, {tuple(exp): Fraction(coeff)})

    def parse(self, text: str) -> "Poly":
        return parse_poly(text, self)


# --------------------------------------------------------------------------
# polynomials


class Poly:
    """Immutable sparse polynomial. ``terms`` must not be mutated after construction."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Exp, Scalar], *, _trusted: bool = False):
        self.ring = ring
        if _trusted:
            self.terms = terms
        else:
            n = ring.nvars
            clean: dict[Exp, Fraction] = {}
            for e, c in terms.items():
                if len(e) != n:
                    raise ValueError(f"monomial {e} does not have {n} exponents")
                c = Fraction(c)
                if c:
                    clean[tuple(e)] = c
            self.terms = clean
        self._hash = None

    # -- basic queries

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.ring.nvars, Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def sorted_terms(self, order: MonomialOrder | None = None) -> list[tuple[Exp, Fraction]]:
        key = (order or self.ring.order).key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder | None = None) -> tuple[Exp, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = (order or self.ring.order).key
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def leading_monomial(self, order: MonomialOrder | None = None) -> Exp:
        return self.leading_term(order)[0]

    def leading_coeff(self, order: MonomialOrder | None = None) -> Fraction:
        return self.leading_term(order)[1]

    def monic(self, order: MonomialOrder | None = None) -> "Poly":
        if not self.terms:
            return self
        return self * (1 / self.leading_coeff(order))

    # -- arithmetic

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring.names != self.ring.names:
                raise ValueError("polynomials live in different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.ring, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.ring, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ring.zero()
            c = Fraction(other)
            return Poly(self.ring, {e: v * c for e, v in self.terms.items()}, _trusted=True)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exp, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.ring, {e: c for e, c in out.items() if c}, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_term(self, exp: Exp, coeff: Fraction) -> "Poly":
        return Poly(
            self.ring,
            {tuple(a + b for a, b in zip(e, exp)): c * coeff for e, c in self.terms.items()},
            _trusted=True,
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring.names == other.ring.names and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring.names, frozenset(self.terms.items())))
        return self._hash

    # -- calculus and substitution

    def diff(self, i: int) -> "Poly":
        return partial_derivative(self, i)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= Fraction(x) ** k
            total += v
        return total

    def substitute(self, images: Sequence["Poly"], target: Ring | None = None) -> "Poly":
        """Replace variable ``i`` by ``images[i]`` (all images in ``target``)."""
        if len(images) != self.ring.nvars:
            raise ValueError("need one image per variable")
        target = target or (images[0].ring if images else self.ring)
        powers: list[dict[int, Poly]] = [{0: target.one()} for _ in images]

        def power(i: int, k: int) -> Poly:
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        out = target.zero()
        for e, c in self.terms.items():
            t = target.const(c)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            out = out + t
        return out

    def change_ring(self, ring: Ring) -> "Poly":
        """Reinterpret in a ring with the same variables (e.g. a different order)."""
        if ring.nvars != self.ring.nvars:
            raise ValueError("variable count mismatch")
        return Poly(ring, self.terms, _trusted=True)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r}, ring={self.ring.names})"


def partial_derivative(f: Poly, var_index: int) -> Poly:
    if not 0 <= var_index < f.ring.nvars:
        raise IndexError(f"variable index {var_index} out of range for {f.ring.nvars} variables")
    out: dict[Exp, Fraction] = {}
    for e, c in f.terms.items():
        k = e[var_index]
        if k:
            ne = list(e)
            ne[var_index] = k - 1
            out[tuple(ne)] = c * k
    return Poly(f.ring, out, _trusted=True)


def jacobian(f: Poly) -> list[Poly]:
    return [partial_derivative(f, i) for i in range(f.ring.nvars)]


# --------------------------------------------------------------------------
# formatting and parsing


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(f: Poly, order: MonomialOrder | None = None) -> str:
    if not f.terms:
        return "0"
    parts: list[str] = []
    for e, c in f.sorted_terms(order):
        factors = []
        for name, k in zip(f.ring.names, e):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not factors:
            body = _format_coeff(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = _format_coeff(a) + "*" + "*".join(factors)
        parts.append((sign, body))
    s0, b0 = parts[0]
    out = ("-" if s0 == "-" else "") + b0
    for s, b in parts[1:]:
        out += f" {s} {b}"
    return out


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("var", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch.isspace():
                pos = m.end()
                continue
            if ch not in "+-*/^":
                raise ParseError(f"unexpected character {ch!r}", m.start(3), text)
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: Ring):
        self.text = text
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2], self.text)

    def expression(self) -> Poly:
        terms: dict[Exp, Fraction] = {}
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        while True:
            e, c = self.term()
            terms[e] = terms.get(e, 0) + sign * c
            tok = self.peek()
            if tok[0] == "end":
                break
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                sign = -1 if tok[1] == "-" else 1
                continue
            self.fail("expected '+', '-' or end of input")
        return Poly(self.ring, terms)

    def term(self) -> tuple[Exp, Fraction]:
        exp = [0] * self.ring.nvars
        coeff = Fraction(1)
        tok = self.peek()
        if tok[0] == "int":
            coeff = self.coefficient()
            if not (self.peek()[0] == "op" and self.peek()[1] == "*"):
                return tuple(exp), coeff
            self.take()
        self.factor(exp)
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            self.factor(exp)
        return tuple(exp), coeff

    def coefficient(self) -> Fraction:
        num = int(self.take()[1])
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "/":
            self.take()
            den_tok = self.peek()
            if den_tok[0] != "int":
                self.fail("expected denominator")
            self.take()
            den = int(den_tok[1])
            if den == 0:
                raise ParseError("zero denominator", den_tok[2], self.text)
            return Fraction(num, den)
        return Fraction(num)

    def factor(self, exp: list[int]) -> None:
        tok = self.peek()
        if tok[0] != "var":
            self.fail("expected a variable")
        self.take()
        if tok[1] not in self.ring.names:
            raise ParseError(f"unknown variable {tok[1]!r}", tok[2], self.text)
        idx = self.ring.names.index(tok[1])
        k = 1
        nxt = self.peek()
        if nxt[0] == "op" and nxt[1] == "^":
            self.take()
            ktok = self.peek()
            if ktok[0] != "int" or int(ktok[1]) == 0:
                self.fail("expected a positive integer exponent")
            self.take()
            k = int(ktok[1])
        exp[idx] += k


def parse_poly(text: str, ring: Ring) -> Poly:
    """Parse ``text`` such as ``"3/2*x^2*y - y + 1"`` into a polynomial of ``ring``.

    Constant terms without a variable factor are accepted as well.
    """
    if not text.strip():
        raise ParseError("empty polynomial", 0, text)
    return _Parser(text, ring).expression()


# --------------------------------------------------------------------------
# linear algebra helpers and coordinate changes

Matrix = Sequence[Sequence[Scalar]]


def determinant(matrix: Matrix) -> Fraction:
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise InputError("matrix is not square")
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            if a[r][col]:
                factor = a[r][col] / p
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return det


def rank(rows: Sequence[Sequence[Scalar]]) -> int:
    a = [[Fraction(x) for x in row] for row in rows]
    if not a:
        return 0
    ncols = len(a[0])
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(a)) if a[i][col]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        p = a[r][col]
        for i in range(len(a)):
            if i != r and a[i][col]:
                f = a[i][col] / p
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return r


def linear_change(f: Poly, matrix: Matrix) -> Poly:
    """Compose ``f`` with the linear substitution x_i -> sum_j matrix[i][j] x_j."""
    n = f.ring.nvars
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise InputError(f"coordinate matrix must be {n}x{n}")
    if determinant(matrix) == 0:
        raise InputError("coordinate matrix is singular")
    gens = f.ring.gens()
    images = []
    for row in matrix:
        img = f.ring.zero()
        for c, g in zip(row, gens):
            if c:
                img = img + g * Fraction(c)
        images.append(img)
    return f.substitute(images, f.ring)


def homogenize(f: Poly, new_var: str, position: int | None = None) -> Poly:
    """Homogenize with a fresh variable inserted at ``position`` (default: last)."""
    names = list(f.ring.names)
    pos = len(names) if position is None else position
    names.insert(pos, new_var)
    ring = Ring(tuple(names), f.ring.order)
    deg = f.total_degree()
    out = {}
    for e, c in f.terms.items():
        ne = list(e)
        ne.insert(pos, deg - sum(e))
        out[tuple(ne)] = c
    return Poly(ring, out, _trusted=True)


def dehomogenize(f: Poly, var_index: int, value: Scalar = 1) -> Poly:
    """Set variable ``var_index`` to ``value`` and drop it from the ring."""
    n = f.ring.nvars
    if not 0 <= var_index < n:
        raise IndexError(f"variable index {var_index} out of range")
    names = f.ring.names[:var_index] + f.ring.names[var_index + 1 :]
    ring = Ring(names, f.ring.order)
    v = Fraction(value)
    out: dict[Exp, Fraction] = {}
    for e, c in f.terms.items():
        ne = e[:var_index] + e[var_index + 1 :]
        out[ne] = out.get(ne, 0) + c * v ** e[var_index]
    return Poly(ring, out)


def poly_divide_exact(f: Poly, g: Poly) -> Poly:
    """Return q with f = q*g, raising ValueError when g does not divide f."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    order = f.ring.order
    ge, gc = g.leading_term(order)
    rem = dict(f.terms)
    quot: dict[Exp, Fraction] = {}
    key = order.key
    while rem:
        e = max(rem, key=key)
        c = rem[e]
        if any(a < b for a, b in zip(e, ge)):
            raise ValueError("polynomial does not divide exactly")
        qe = tuple(a - b for a, b in zip(e, ge))
        qc = c / gc
        quot[qe] = qc
        for te, tc in g.terms.items():
            m = tuple(a + b for a, b in zip(te, qe))
            v = rem.get(m, 0) - tc * qc
            if v:
                rem[m] = v
            else:
                rem.pop(m, None)
    return Poly(f.ring, quot, _trusted=True)


def as_polys(ring: Ring, items: Iterable[Union[Poly, str, Scalar]]) -> list[Poly]:
    out = []
    for it in items:
        if isinstance(it, Poly):
            out.append(it)
        elif isinstance(it, str):
            out.append(parse_poly(it, ring))
        else:
            out.append(ring.const(it))
    return out

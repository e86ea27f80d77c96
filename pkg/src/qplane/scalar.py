"""Exact coefficient arithmetic for the quantum-plane engine.

All coefficients live in the field Q(i)(s) of rational functions in the
formal variable s over the Gaussian rationals, optionally multiplied by a
Laurent monomial in auxiliary central symbols (``rho`` for the squared
sphere radius).  The deformation parameter is always q = s^2, so that
half-integer powers of q are ordinary powers of s.

Canonical form of a :class:`Scalar`:

* numerator and denominator are coprime polynomials in s over Q(i),
* the denominator is monic,
* zero is (0, 1) with an empty auxiliary monomial,
* auxiliary exponents are sorted by symbol name.

Structural equality of canonical forms is field equality, so zero-testing
is a dictionary lookup away everywhere else in the engine.
"""

from __future__ import annotations

from fractions import Fraction


class ScalarError(ValueError):
    """Arithmetic error in the coefficient field (pole, zero division, ...)."""


class ParseError(ScalarError):
    """Syntax error, carries the offending position."""

    def __init__(self, message, pos):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

class GaussRational:
    """A number a + b*i with a, b rational, stored in lowest terms."""

    __slots__ = ("re", "im", "_hash")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)
        self._hash = None

    @staticmethod
    def _wrap(re: Fraction, im: Fraction) -> "GaussRational":
        # internal fast constructor: operands are Fractions already
        out = GaussRational.__new__(GaussRational)
        out.re = re
        out.im = im
        out._hash = None
        return out

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.re, self.im))
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, GaussRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        return GaussRational._wrap(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return GaussRational._wrap(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return GaussRational._wrap(-self.re, -self.im)

    def __mul__(self, other):
        return GaussRational._wrap(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ScalarError("division by zero")
        return GaussRational._wrap(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * other.inverse()

    def __repr__(self):
        return f"GaussRational({self.re!r}, {self.im!r})"

    def __str__(self):
        re, im = self.re, self.im
        if not im:
            return str(re)
        if not re:
            if im == 1:
                return "i"
            if im == -1:
                return "-i"
            return f"{im}*i"
        # mixed values are parenthesised so they can sit inside a product
        sign = "+" if im > 0 else "-"
        mag = abs(im)
        istr = "i" if mag == 1 else f"{mag}*i"
        return f"({re}{sign}{istr})"


GR_ZERO = GaussRational(0)
GR_ONE = GaussRational(1)
GR_I = GaussRational(0, 1)


def _gr_sqrt(value: GaussRational):
    """Square root of a Gaussian rational inside Q(i), or None."""

    def _frac_sqrt(f):
        if f < 0:
            return None
        p, q = f.numerator, f.denominator
        rp, rq = _isqrt(p), _isqrt(q)
        if rp is None or rq is None:
            return None
        return Fraction(rp, rq)

    def _isqrt(n):
        r = int(n ** 0.5)
        for cand in (r - 1, r, r + 1, r + 2):
            if cand >= 0 and cand * cand == n:
                return cand
        return None

    c, d = value.re, value.im
    if not d:
        r = _frac_sqrt(c)
        if r is not None:
            return GaussRational(r)
        r = _frac_sqrt(-c)
        if r is not None:
            return GaussRational(0, r)
        return None
    # (a+bi)^2 = c+di: a^2 = (c + |z|)/2 with |z| = sqrt(c^2+d^2)
    norm = _frac_sqrt(c * c + d * d)
    if norm is None:
        return None
    a2 = (c + norm) / 2
    a = _frac_sqrt(a2)
    if a is None or not a:
        return None
    b = d / (2 * a)
    return GaussRational(a, b)


# ---------------------------------------------------------------------------
# Polynomials in s over the Gaussian rationals
# ---------------------------------------------------------------------------
# A polynomial is a tuple of GaussRational coefficients in ascending degree
# with a nonzero last entry; () is the zero polynomial.

def poly_trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return tuple(coeffs)


POLY_ZERO = ()
POLY_ONE = (GR_ONE,)
POLY_S = (GR_ZERO, GR_ONE)


def poly_add(a, b):
    n = max(len(a), len(b))
    out = []
    for k in range(n):
        x = a[k] if k < len(a) else GR_ZERO
        y = b[k] if k < len(b) else GR_ZERO
        out.append(x + y)
    return poly_trim(out)


def poly_neg(a):
    return tuple(-c for c in a)


def poly_sub(a, b):
    return poly_add(a, poly_neg(b))


def poly_mul(a, b):
    if not a or not b:
        return POLY_ZERO
    out = [GR_ZERO] * (len(a) + len(b) - 1)
    for j, x in enumerate(a):
        if not x:
            continue
        for k, y in enumerate(b):
            if y:
                out[j + k] = out[j + k] + x * y
    return poly_trim(out)


def poly_scale(a, c):
    if not c:
        return POLY_ZERO
    return tuple(x * c for x in a)


def poly_divmod(a, b):
    if not b:
        raise ScalarError("polynomial division by zero")
    rem = list(a)
    quot = [GR_ZERO] * max(0, len(a) - len(b) + 1)
    inv_lead = b[-1].inverse()
    for shift in range(len(a) - len(b), -1, -1):
        c = rem[shift + len(b) - 1] * inv_lead
        if not c:
            continue
        quot[shift] = c
        for k, y in enumerate(b):
            rem[shift + k] = rem[shift + k] - c * y
    return poly_trim(quot), poly_trim(rem)


def poly_gcd(a, b):
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if not a:
        return POLY_ZERO
    return poly_scale(a, a[-1].inverse())  # monic


def poly_eval(a, x: GaussRational):
    acc = GR_ZERO
    for c in reversed(a):
        acc = acc * x + c
    return acc


def poly_str(a):
    if not a:
        return "0"
    parts = []
    for e in range(len(a) - 1, -1, -1):
        c = a[e]
        if not c:
            continue
        if e == 0:
            term = str(c)
        else:
            svar = "s" if e == 1 else f"s^{e}"
            if c == GR_ONE:
                term = svar
            elif c == -GR_ONE:
                term = f"-{svar}"
            else:
                term = f"{c}*{svar}"
        if parts and not term.startswith("-"):
            parts.append("+ " + term)
        elif parts:
            parts.append("- " + term[1:])
        else:
            parts.append(term)
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Scalar: element of Q(i)(s) times a Laurent monomial in auxiliary symbols
# ---------------------------------------------------------------------------

class Scalar:
    """Canonical reduced rational function in s with an auxiliary monomial."""

    __slots__ = ("num", "den", "aux", "_hash")

    def __init__(self, num, den=POLY_ONE, aux=(), _canonical=False):
        if _canonical:
            self.num, self.den, self.aux = num, den, aux
        else:
            num, den, aux = _canonicalize(num, den, aux)
            self.num, self.den, self.aux = num, den, aux
        self._hash = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rational(value) -> "Scalar":
        return Scalar((GaussRational(value),) if Fraction(value) else POLY_ZERO)

    @staticmethod
    def from_gauss(value: GaussRational) -> "Scalar":
        return Scalar((value,) if value else POLY_ZERO)

    # -- canonical-form queries ---------------------------------------------

    def is_zero(self):
        return not self.num

    def is_one(self):
        return self.num == POLY_ONE and self.den == POLY_ONE and not self.aux

    def is_constant(self):
        """Free of s (auxiliary monomial allowed)."""
        return len(self.num) <= 1 and self.den == POLY_ONE

    def constant_value(self) -> GaussRational:
        if not self.is_constant() or self.aux:
            raise ScalarError(f"not a plain constant: {self}")
        return self.num[0] if self.num else GR_ZERO

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den, self.aux))
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            return NotImplemented
        return (
            self.num == other.num
            and self.den == other.den
            and self.aux == other.aux
        )

    def __bool__(self):
        return bool(self.num)

    # -- field operations ----------------------------------------------------

    def __add__(self, other):
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.aux != other.aux:
            raise ScalarError(
                "cannot add scalars with different auxiliary monomials: "
                f"{self} and {other}"
            )
        if self.den == POLY_ONE and other.den == POLY_ONE:
            num = poly_add(self.num, other.num)
            if not num:
                return ZERO
            return Scalar(num, POLY_ONE, self.aux, _canonical=True)
        num = poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den))
        den = poly_mul(self.den, other.den)
        return Scalar(num, den, self.aux)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Scalar(poly_neg(self.num), self.den, self.aux, _canonical=True)

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return ZERO
        num = poly_mul(self.num, other.num)
        aux = _aux_mul(self.aux, other.aux)
        if self.den == POLY_ONE and other.den == POLY_ONE:
            return Scalar(num, POLY_ONE, aux, _canonical=True)
        den = poly_mul(self.den, other.den)
        return Scalar(num, den, aux)

    def inverse(self):
        if self.is_zero():
            raise ScalarError("division by zero")
        aux = tuple((sym, -e) for sym, e in self.aux)
        return Scalar(self.den, self.num, aux)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, e: int):
        if e == 0:
            return ONE
        base = self if e > 0 else self.inverse()
        out = ONE
        for _ in range(abs(e)):
            out = out * base
        return out

    # -- specialization -------------------------------------------------------

    def specialize(self, sp: "Specialization") -> "Scalar":
        """Evaluate at s = sp.value; auxiliary monomial is preserved."""
        dv = poly_eval(self.den, sp.value)
        if not dv:
            raise ScalarError(f"pole at s = {sp.value}: {self}")
        nv = poly_eval(self.num, sp.value)
        val = nv / dv
        return Scalar((val,) if val else POLY_ZERO, POLY_ONE, self.aux if val else ())

    # -- printing --------------------------------------------------------------

    def __str__(self):
        return scalar_str(self)

    def __repr__(self):
        return f"Scalar({scalar_str(self)!r})"


def _aux_mul(a, b):
    exps = dict(a)
    for sym, e in b:
        exps[sym] = exps.get(sym, 0) + e
    return tuple(sorted((sym, e) for sym, e in exps.items() if e))


def _canonicalize(num, den, aux):
    num = poly_trim(num)
    den = poly_trim(den)
    if not den:
        raise ScalarError("zero denominator")
    if not num:
        return POLY_ZERO, POLY_ONE, ()
    aux = tuple(sorted((s, e) for s, e in aux if e))
    if den == POLY_ONE:
        return num, den, aux
    if not any(den[:-1]):
        # monomial denominator c*s^k: cancel the s-valuation directly
        v = 0
        while not num[v]:
            v += 1
        shift = min(v, len(den) - 1)
        if shift:
            num = num[shift:]
            den = den[shift:]
    else:
        g = poly_gcd(num, den)
        if len(g) > 1:
            num, _ = poly_divmod(num, g)
            den, _ = poly_divmod(den, g)
    lead = den[-1]
    if lead != GR_ONE:
        inv = lead.inverse()
        num = poly_scale(num, inv)
        den = poly_scale(den, inv)
    return num, den, aux


ZERO = Scalar(POLY_ZERO)
ONE = Scalar(POLY_ONE)
S = Scalar(POLY_S)
Q = S * S
I = Scalar((GR_I,))
MINUS_ONE = Scalar((-GR_ONE,))


def from_int(n) -> Scalar:
    return Scalar.from_rational(n)


def aux_symbol(name: str, exponent: int = 1) -> Scalar:
    return Scalar(POLY_ONE, POLY_ONE, ((name, exponent),))


def s_power(e: int) -> Scalar:
    """s^e as a Scalar, e may be negative."""
    if e >= 0:
        return Scalar(poly_trim([GR_ZERO] * e + [GR_ONE]))
    return Scalar(POLY_ONE, poly_trim([GR_ZERO] * (-e) + [GR_ONE]))


def q_power(e: int) -> Scalar:
    return s_power(2 * e)


def field_ops(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Named field operations: op is one of add, sub, mul, div."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ScalarError(f"unknown field operation {op!r}")


class Specialization:
    """Exact substitution s -> value, value a nonzero Gaussian rational."""

    __slots__ = ("value",)

    def __init__(self, value: GaussRational):
        if not value:
            raise ScalarError("specialization value must be nonzero")
        self.value = value

    @staticmethod
    def from_q(q_value: GaussRational) -> "Specialization":
        """Resolve s = q^(1/2) inside Q(i); prefers i over -i and 1 over -1."""
        root = _gr_sqrt(q_value)
        if root is None:
            raise ScalarError(f"q value {q_value} has no square root in Q(i)")
        if root.re < 0 or (root.re == 0 and root.im < 0):
            root = -root
        return Specialization(root)

    def __eq__(self, other):
        return isinstance(other, Specialization) and self.value == other.value

    def __hash__(self):
        return hash(("Specialization", self.value))

    def __str__(self):
        return f"s={self.value}"


# ---------------------------------------------------------------------------
# Canonical printing
# ---------------------------------------------------------------------------

def _den_monomial_degree(den):
    """Degree k if den == s^k, else None."""
    if den[-1] != GR_ONE:
        return None
    for c in den[:-1]:
        if c:
            return None
    return len(den) - 1


def scalar_str(x: Scalar) -> str:
    if x.is_zero():
        return "0"
    k = _den_monomial_degree(x.den)
    if k is not None:
        body = _laurent_str(x.num, -k)
    else:
        num = poly_str(x.num)
        den = poly_str(x.den)
        if len(x.num) > 1:
            num = f"({num})"
        body = f"{num}/({den})"
    if x.aux and (" " in body or "/" in body):
        body = f"({body})"
    for sym, e in x.aux:
        aux = sym if e == 1 else f"{sym}^{e}"
        if body == "1":
            body = aux
        elif body == "-1":
            body = f"-{aux}"
        else:
            body = f"{body}*{aux}"
    return body


def _laurent_str(num, shift):
    parts = []
    for e in range(len(num) - 1, -1, -1):
        c = num[e]
        if not c:
            continue
        deg = e + shift
        if deg == 0:
            term = str(c)
        else:
            svar = "s" if deg == 1 else f"s^{deg}"
            if c == GR_ONE:
                term = svar
            elif c == -GR_ONE:
                term = f"-{svar}"
            else:
                term = f"{c}*{svar}"
        if parts and not term.startswith("-"):
            parts.append("+ " + term)
        elif parts:
            parts.append("- " + term[1:])
        else:
            parts.append(term)
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------
# expr   := term (("+"|"-") term)*
# term   := factor (("*"|"/") factor)*
# factor := atom ("^" signed_int)?
# atom   := rational | "i" | "s" | "q" | "rho" | "(" expr ")" | "-" factor
# rational := int ("/" int)?

class _Tokens:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch):
        if not self.take(ch):
            raise ParseError(f"expected {ch!r}", self.pos)

    def take_int(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected integer", self.pos)
        return int(self.text[start:self.pos])

    def take_signed_int(self):
        neg = self.take("-")
        n = self.take_int()
        return -n if neg else n

    def take_word(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        return self.text[start:self.pos]


def parse_scalar(text: str) -> Scalar:
    """Parse a scalar expression; q is read as s^2."""
    toks = _Tokens(text)
    value = _parse_expr(toks)
    toks.skip_ws()
    if toks.pos != len(text):
        raise ParseError("trailing input", toks.pos)
    return value


def _parse_expr(toks):
    value = _parse_term(toks)
    while True:
        if toks.take("+"):
            value = value + _parse_term(toks)
        elif toks.take("-"):
            value = value - _parse_term(toks)
        else:
            return value


def _parse_term(toks):
    value = _parse_factor(toks)
    while True:
        if toks.take("*"):
            value = value * _parse_factor(toks)
        elif toks.take("/"):
            pos = toks.pos
            rhs = _parse_factor(toks)
            if rhs.is_zero():
                raise ParseError("division by zero", pos)
            value = value / rhs
        else:
            return value


def _parse_factor(toks):
    atom = _parse_atom(toks)
    if toks.take("^"):
        e = toks.take_signed_int()
        if e < 0 and atom.is_zero():
            raise ParseError("zero to a negative power", toks.pos)
        atom = atom ** e
    return atom


def _parse_atom(toks):
    ch = toks.peek()
    if ch == "(":
        toks.take("(")
        value = _parse_expr(toks)
        toks.expect(")")
        return value
    if ch == "-":
        toks.take("-")
        return -_parse_factor(toks)
    if ch.isdigit():
        n = toks.take_int()
        if toks.peek() == "/":
            # lookahead: rational only when a digit follows the slash
            save = toks.pos
            toks.take("/")
            if toks.peek().isdigit():
                d = toks.take_int()
                if d == 0:
                    raise ParseError("zero denominator", toks.pos)
                return Scalar.from_rational(Fraction(n, d))
            toks.pos = save
        return Scalar.from_rational(n)
    word = toks.take_word()
    if word == "i":
        return I
    if word == "s":
        return S
    if word == "q":
        return Q
    if word == "rho":
        return aux_symbol("rho")
    raise ParseError(f"unexpected token {word or ch!r}", toks.pos)

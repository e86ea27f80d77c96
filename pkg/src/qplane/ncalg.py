"""Noncommutative algebra of coordinates, differentials and derivatives.

Elements are finite linear combinations of words over three kinds of
generators (coordinate x_i, differential xi_i = dx_i, derivative d_i) with
scalar coefficients.  A plane's matrices determine a rewrite system whose
rules always rewrite a two-letter pattern to a combination of strictly
smaller words; normal forms sort every word into coordinate block,
differential block, derivative block.

Termination measure, compared lexicographically per rewrite step:
(kind-inversion count, total degree, graded-lex rank).  Kind-inversion
count drops on every exchange rule, degree drops on the inhomogeneous
delta and quotient summands, and graded-lex rank drops on the same-kind
reordering rules because derivation pivots on the largest monomial.

Confluence is not assumed: ``confluence_selftest`` reduces random words
and all three-letter overlaps under two strategies and reports mismatches.
"""

from __future__ import annotations

import random

from . import scalar
from .linalg import LegMatrix, identity, rref_rows
from .scalar import Scalar, ScalarError

COORD = 0
DIFF = 1
DERIV = 2


class NcalgError(ValueError):
    pass


# A generator is a pair (kind, index) with index 1-based; a word is a tuple
# of generators.

def gen(kind: int, index: int):
    return (kind, index)


def kind_inversions(word) -> int:
    """Number of letter pairs whose kinds are out of normal order."""
    inv = 0
    for a in range(len(word)):
        ka = word[a][0]
        for b in range(a + 1, len(word)):
            if ka > word[b][0]:
                inv += 1
    return inv


class AlgebraElement:
    """Finite map word -> scalar with no stored zero coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for w, c in terms.items():
                if not c.is_zero():
                    self.terms[w] = c

    @staticmethod
    def zero() -> "AlgebraElement":
        return AlgebraElement()

    @staticmethod
    def unit(c: Scalar = scalar.ONE) -> "AlgebraElement":
        return AlgebraElement({(): c})

    @staticmethod
    def from_word(word, c: Scalar = scalar.ONE) -> "AlgebraElement":
        return AlgebraElement({tuple(word): c})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            if w in out:
                s = out[w] + c
                if s.is_zero():
                    del out[w]
                else:
                    out[w] = s
            else:
                out[w] = c
        el = AlgebraElement()
        el.terms = out
        return el

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        el = AlgebraElement()
        el.terms = {w: -c for w, c in self.terms.items()}
        return el

    def scale(self, c: Scalar) -> "AlgebraElement":
        if c.is_zero():
            return AlgebraElement()
        el = AlgebraElement()
        el.terms = {w: v * c for w, v in self.terms.items()}
        return el

    def concat(self, other: "AlgebraElement") -> "AlgebraElement":
        """Free (unreduced) product."""
        out = AlgebraElement()
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                if w in out.terms:
                    s = out.terms[w] + c
                    if s.is_zero():
                        del out.terms[w]
                    else:
                        out.terms[w] = s
                elif not c.is_zero():
                    out.terms[w] = c
        return out

    def kinds(self):
        return {g[0] for w in self.terms for g in w}

    def is_pure(self, kind: int) -> bool:
        return all(g[0] == kind for w in self.terms for g in w)

    def max_degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def coefficient(self, word) -> Scalar:
        return self.terms.get(tuple(word), scalar.ZERO)

    def __repr__(self):
        return f"AlgebraElement({len(self.terms)} terms)"


class RewriteRule:
    """lhs two-generator pattern -> rhs element of strictly smaller words."""

    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs, rhs: AlgebraElement):
        self.lhs = lhs
        self.rhs = rhs

    @property
    def inhomogeneous(self) -> AlgebraElement:
        """Degree-lowering part of the right-hand side (delta or quotient term)."""
        out = AlgebraElement()
        out.terms = {w: c for w, c in self.rhs.terms.items() if len(w) < 2}
        return out

    def __repr__(self):
        return f"RewriteRule({self.lhs})"


class RewriteSystem:
    """Derived rule set for one plane; immutable after construction."""

    def __init__(self, dimension, generator_names, ranks, degree_cap=16,
                 debug=False):
        self.dimension = dimension
        self.generator_names = tuple(generator_names)
        # ranks[index-1] = position of that generator in the monomial order
        self.ranks = tuple(ranks)
        self.degree_cap = degree_cap
        self.debug = debug
        self.rules = {}
        self.quotient_rule = None
        self._caches = {"leftmost": {}, "rightmost": {}}

    # -- ordering ----------------------------------------------------------

    def gen_key(self, g):
        return (g[0], self.ranks[g[1] - 1])

    def word_key(self, word):
        return (len(word), tuple(self.gen_key(g) for g in word))

    def measure(self, word):
        return (kind_inversions(word), len(word), self.word_key(word))

    def generators(self, kinds=(COORD, DIFF, DERIV)):
        return [gen(k, i) for k in kinds for i in range(1, self.dimension + 1)]

    def gen_name(self, g):
        base = self.generator_names[g[1] - 1]
        if g[0] == COORD:
            return base
        if g[0] == DIFF:
            return f"d({base})"
        return f"D({base})"

    # -- construction ------------------------------------------------------

    def add_rule(self, lhs, rhs: AlgebraElement, quotient=False):
        lhs = tuple(lhs)
        lm = self.measure(lhs)
        for w in rhs.terms:
            if self.measure(w) >= lm:
                raise NcalgError(
                    f"rule {self._fmt_word(lhs)} -> {element_str(rhs, self)} "
                    f"does not decrease the termination measure at word "
                    f"{self._fmt_word(w)}"
                )
        rule = RewriteRule(lhs, rhs)
        self.rules[lhs] = rule
        if quotient:
            self.quotient_rule = rule
        self._caches = {"leftmost": {}, "rightmost": {}}

    def renormalize_rules(self):
        """Re-reduce every rhs under the full system until stable."""
        for _ in range(8):
            changed = False
            for lhs, rule in list(self.rules.items()):
                nf = self.normal_form(rule.rhs)
                if nf != rule.rhs:
                    self.rules[lhs] = RewriteRule(lhs, nf)
                    changed = True
            self._caches = {"leftmost": {}, "rightmost": {}}
            if not changed:
                return
        raise NcalgError("rule renormalization did not stabilize")

    def _fmt_word(self, word):
        return "*".join(self.gen_name(g) for g in word) or "1"

    # -- reduction ---------------------------------------------------------

    def _find_redex(self, word, strategy):
        rng = range(len(word) - 1)
        if strategy == "rightmost":
            rng = reversed(rng)
        for k in rng:
            if (word[k], word[k + 1]) in self.rules:
                return k
        return None

    def reduce_word(self, word, strategy="leftmost") -> AlgebraElement:
        word = tuple(word)
        if len(word) > self.degree_cap:
            raise NcalgError(
                f"word of degree {len(word)} exceeds the cap {self.degree_cap}"
            )
        cache = self._caches[strategy]
        hit = cache.get(word)
        if hit is not None:
            return hit
        k = self._find_redex(word, strategy)
        if k is None:
            result = AlgebraElement.from_word(word)
        else:
            rule = self.rules[(word[k], word[k + 1])]
            if self.debug:
                base = self.measure(word)
            prefix, suffix = word[:k], word[k + 2:]
            result = AlgebraElement()
            for w, c in rule.rhs.terms.items():
                nxt = prefix + w + suffix
                if self.debug:
                    assert self.measure(nxt) < base, (word, nxt)
                result = result + self.reduce_word(nxt, strategy).scale(c)
        cache[word] = result
        return result

    def normal_form(self, e: AlgebraElement, strategy="leftmost") -> AlgebraElement:
        out = AlgebraElement()
        for w, c in e.terms.items():
            out = out + self.reduce_word(w, strategy).scale(c)
        return out


# ---------------------------------------------------------------------------
# Rule derivation
# ---------------------------------------------------------------------------

def build_rewrite_system(plane) -> RewriteSystem:
    """Derive the five rule families from a plane's B, C, D, F matrices.

    ``plane`` needs: dimension, generator_names, monomial_ranks, and the
    LegMatrix attributes b, c, d, f; optionally quotient_central (a pure
    coordinate AlgebraElement) and quotient_symbol for the sphere-type
    central quotient.
    """
    sys = RewriteSystem(plane.dimension, plane.generator_names,
                        plane.monomial_ranks)
    n = plane.dimension
    e = identity(n, 2)
    _add_reordering_rules(sys, e - plane.b, COORD)
    _add_reordering_rules(sys, e + plane.d, DIFF)
    _add_exchange_rules(sys, plane.c, plane.d)
    if getattr(plane, "quotient_central", None) is not None:
        _add_quotient_rule(sys, plane.quotient_central, plane.quotient_symbol)
        sys.renormalize_rules()
    return sys


def _add_reordering_rules(sys: RewriteSystem, relation_matrix: LegMatrix,
                          kind: int):
    """Rules from relation rows M . (g x g) = 0, pivoting on largest words."""
    n = sys.dimension
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    words = [(gen(kind, i), gen(kind, j)) for i, j in pairs]
    order = sorted(range(len(words)), key=lambda t: sys.word_key(words[t]),
                   reverse=True)
    rows = []
    for i, j in pairs:
        row = [relation_matrix.at((i, j), pairs[t]) for t in order]
        rows.append(row)
    reduced, pivots = rref_rows(rows)
    for r, pivot_col in enumerate(pivots):
        lhs = words[order[pivot_col]]
        rhs = AlgebraElement()
        for c in range(pivot_col + 1, len(order)):
            v = reduced[r][c]
            if not v.is_zero():
                rhs = rhs + AlgebraElement.from_word(words[order[c]], -v)
        sys.add_rule(lhs, rhs)


def _add_exchange_rules(sys: RewriteSystem, c_matrix: LegMatrix,
                        d_matrix: LegMatrix):
    n = sys.dimension
    rng = range(1, n + 1)
    # xi_a x_b -> D^{ab}_{ij} x_i xi_j   (inversion of x1 xi2 = C12 xi1 x2)
    for a in rng:
        for b in rng:
            rhs = AlgebraElement()
            for i in rng:
                for j in rng:
                    v = d_matrix.at((a, b), (i, j))
                    if not v.is_zero():
                        rhs = rhs + AlgebraElement.from_word(
                            (gen(COORD, i), gen(DIFF, j)), v)
            sys.add_rule((gen(DIFF, a), gen(COORD, b)), rhs)
    # d_k x_i -> delta_k^i + C^{ij}_{kl} x_l d_j
    for k in rng:
        for i in rng:
            rhs = AlgebraElement()
            if i == k:
                rhs = rhs + AlgebraElement.unit()
            for j in rng:
                for l in rng:
                    v = c_matrix.at((i, j), (k, l))
                    if not v.is_zero():
                        rhs = rhs + AlgebraElement.from_word(
                            (gen(COORD, l), gen(DERIV, j)), v)
            sys.add_rule((gen(DERIV, k), gen(COORD, i)), rhs)
    # d_k xi_i -> D^{ij}_{kl} xi_l d_j
    for k in rng:
        for i in rng:
            rhs = AlgebraElement()
            for j in rng:
                for l in rng:
                    v = d_matrix.at((i, j), (k, l))
                    if not v.is_zero():
                        rhs = rhs + AlgebraElement.from_word(
                            (gen(DIFF, l), gen(DERIV, j)), v)
            sys.add_rule((gen(DERIV, k), gen(DIFF, i)), rhs)


def _add_quotient_rule(sys: RewriteSystem, central: AlgebraElement,
                       symbol: str):
    """Quotient by (central element = symbol), derived in the plane's field."""
    nf = sys.normal_form(central)
    rel = nf - AlgebraElement.unit(scalar.aux_symbol(symbol))
    if rel.is_zero():
        raise NcalgError("central element already equals the quotient symbol")
    lead = max(rel.terms, key=sys.word_key)
    if len(lead) != 2:
        raise NcalgError(f"quotient lead monomial {lead} is not quadratic")
    c = rel.terms[lead]
    rest = AlgebraElement()
    rest.terms = {w: v for w, v in rel.terms.items() if w != lead}
    sys.add_rule(lead, rest.scale(-(c.inverse())), quotient=True)


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------

def normal_form(e: AlgebraElement, sys: RewriteSystem) -> AlgebraElement:
    return sys.normal_form(e)


def multiply(a: AlgebraElement, b: AlgebraElement, sys: RewriteSystem
             ) -> AlgebraElement:
    return sys.normal_form(a.concat(b))


def derivative_action(i: int, f: AlgebraElement, sys: RewriteSystem
                      ) -> AlgebraElement:
    """Function part of moving d_i through a pure-coordinate element."""
    moved = _move_derivative(i, f, sys)
    out = AlgebraElement()
    out.terms = {w: c for w, c in moved.terms.items()
                 if all(g[0] != DERIV for g in w)}
    return out


def transport(i: int, f: AlgebraElement, sys: RewriteSystem):
    """Homogeneous part: d_i f = action + sum_j h_j d_j; returns {j: h_j}."""
    moved = _move_derivative(i, f, sys)
    table = {}
    for w, c in moved.terms.items():
        positions = [k for k, g in enumerate(w) if g[0] == DERIV]
        if not positions:
            continue
        if positions != [len(w) - 1]:
            raise NcalgError(f"unexpected derivative placement in {w}")
        j = w[-1][1]
        table.setdefault(j, AlgebraElement())
        table[j] = table[j] + AlgebraElement.from_word(w[:-1], c)
    return {j: h for j, h in table.items() if not h.is_zero()}


def _move_derivative(i, f, sys):
    if not f.is_pure(COORD):
        raise NcalgError("derivative requires a pure-coordinate element")
    deriv = AlgebraElement.from_word((gen(DERIV, i),))
    return sys.normal_form(deriv.concat(f))


def is_central(e: AlgebraElement, sys: RewriteSystem) -> bool:
    """True iff e commutes with every coordinate generator."""
    for g in sys.generators(kinds=(COORD,)):
        x = AlgebraElement.from_word((g,))
        if not sys.normal_form(e.concat(x) - x.concat(e)).is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# Confluence self-test
# ---------------------------------------------------------------------------

class ConfluenceReport:
    def __init__(self, samples, overlaps, mismatches):
        self.samples = samples
        self.overlaps = overlaps
        self.mismatches = mismatches

    @property
    def ok(self):
        return not self.mismatches

    def __repr__(self):
        status = "ok" if self.ok else f"{len(self.mismatches)} mismatches"
        return (f"ConfluenceReport(samples={self.samples}, "
                f"overlaps={self.overlaps}, {status})")


def confluence_selftest(sys: RewriteSystem, sample_count=200, max_degree=5,
                        seed=0) -> ConfluenceReport:
    """Reduce random and overlap words with two strategies, diff the results."""
    rng = random.Random(seed)
    gens = sys.generators()
    mismatches = []

    def check(word):
        left = sys.reduce_word(word, "leftmost")
        right = sys.reduce_word(word, "rightmost")
        if left != right:
            mismatches.append((word, left, right))

    overlap_count = 0
    for g1 in gens:
        for g2 in gens:
            for g3 in gens:
                check((g1, g2, g3))
                overlap_count += 1
    for _ in range(sample_count):
        length = rng.randint(1, max_degree)
        word = tuple(rng.choice(gens) for _ in range(length))
        check(word)
    return ConfluenceReport(sample_count, overlap_count, mismatches)


# ---------------------------------------------------------------------------
# Optional derivative-derivative relations
# ---------------------------------------------------------------------------

def derive_deriv_deriv_conventions(sys: RewriteSystem, f_matrix: LegMatrix):
    """Try index conventions for (E - F)-based derivative exchange relations.

    The printed exchange relation is degenerate, so each candidate reading
    is derived and kept only when every d.d.x overlap reduces confluently.
    Returns a list of (convention name, rules dict, passes) triples.
    """
    n = sys.dimension
    e = identity(n, 2)
    m = e - f_matrix
    conventions = {
        "rows": lambda i, j, k, l: m.at((i, j), (k, l)),
        "rows_flipped": lambda i, j, k, l: m.at((i, j), (l, k)),
        "columns": lambda i, j, k, l: m.at((k, l), (i, j)),
        "columns_flipped": lambda i, j, k, l: m.at((l, k), (i, j)),
    }
    results = []
    for name, entry in conventions.items():
        trial = _system_with_deriv_rules(sys, entry)
        if trial is None:
            results.append((name, None, False))
            continue
        ok = _deriv_overlaps_confluent(trial)
        results.append((name, {lhs: trial.rules[lhs] for lhs in trial.rules
                               if lhs[0][0] == DERIV and lhs[1][0] == DERIV},
                        ok))
    return results


def _system_with_deriv_rules(base: RewriteSystem, entry):
    n = base.dimension
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    words = [(gen(DERIV, i), gen(DERIV, j)) for i, j in pairs]
    order = sorted(range(len(words)), key=lambda t: base.word_key(words[t]),
                   reverse=True)
    rows = []
    for i, j in pairs:
        rows.append([entry(i, j, *pairs[t]) for t in order])
    reduced, pivots = rref_rows(rows)
    trial = RewriteSystem(base.dimension, base.generator_names, base.ranks,
                          base.degree_cap)
    trial.rules = dict(base.rules)
    trial.quotient_rule = base.quotient_rule
    try:
        for r, pivot_col in enumerate(pivots):
            lhs = words[order[pivot_col]]
            rhs = AlgebraElement()
            for c in range(pivot_col + 1, len(order)):
                v = reduced[r][c]
                if not v.is_zero():
                    rhs = rhs + AlgebraElement.from_word(words[order[c]], -v)
            trial.add_rule(lhs, rhs)
    except NcalgError:
        return None
    return trial


def _deriv_overlaps_confluent(sys: RewriteSystem) -> bool:
    derivs = sys.generators(kinds=(DERIV,))
    coords = sys.generators(kinds=(COORD,))
    for d1 in derivs:
        for d2 in derivs:
            for x in coords:
                word = (d1, d2, x)
                if sys.reduce_word(word, "leftmost") != \
                        sys.reduce_word(word, "rightmost"):
                    return False
    return True


# ---------------------------------------------------------------------------
# Element grammar
# ---------------------------------------------------------------------------
# expr := term (("+"|"-") term)* ; term := factor ("*" factor)* ;
# factor := atom ("^" int)? ;
# atom := scalar-atom | generator | "d(" name ")" | "D(" name ")"
#       | "(" expr ")" | "-" factor .

RESERVED_NAMES = {"i", "s", "q", "rho", "d", "D"}


def parse_element(text: str, sys: RewriteSystem) -> AlgebraElement:
    """Parse an element in the plane's generator names (free, unreduced)."""
    parser = _ElementParser(text, sys)
    value = parser.parse_expr()
    parser.skip_ws()
    if parser.pos != len(text):
        raise ScalarError(f"trailing input at position {parser.pos}: {text!r}")
    return value


class _ElementParser:
    def __init__(self, text, sys):
        self.text = text
        self.pos = 0
        self.sys = sys
        # longest-first so that "x+" wins over a bare "x" prefix
        self.names = sorted(
            ((name, idx + 1) for idx, name in enumerate(sys.generator_names)),
            key=lambda t: -len(t[0]),
        )

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, token):
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def expect(self, token):
        if not self.take(token):
            raise ScalarError(f"expected {token!r} at position {self.pos}")

    def match_generator(self):
        self.skip_ws()
        for name, idx in self.names:
            if self.text.startswith(name, self.pos):
                self.pos += len(name)
                return idx
        return None

    def parse_expr(self):
        value = self.parse_term()
        while True:
            if self.take("+"):
                value = value + self.parse_term()
            elif self.take("-"):
                value = value - self.parse_term()
            else:
                return value

    def parse_term(self):
        value = self.parse_factor()
        while True:
            if self.take("*"):
                value = value.concat(self.parse_factor())
            elif self.take("/"):
                rhs = self.parse_factor()
                if not _is_scalar_element(rhs):
                    raise ScalarError("can only divide by scalar factors")
                value = value.scale(rhs.coefficient(()).inverse())
            else:
                return value

    def parse_factor(self):
        atom = self.parse_atom()
        if self.take("^"):
            self.skip_ws()
            neg = self.take("-")
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == start:
                raise ScalarError(f"expected exponent at position {self.pos}")
            e = int(self.text[start:self.pos])
            if neg:
                if not _is_scalar_element(atom):
                    raise ScalarError("negative powers only on scalar factors")
                return AlgebraElement.unit(atom.coefficient(()) ** (-e))
            out = AlgebraElement.unit()
            for _ in range(e):
                out = out.concat(atom)
            return out
        return atom

    def parse_atom(self):
        ch = self.peek()
        if ch == "(":
            self.take("(")
            value = self.parse_expr()
            self.expect(")")
            return value
        if ch == "-":
            self.take("-")
            return -self.parse_factor()
        # differentials and derivatives before generic name matching
        for prefix, kind in (("d(", DIFF), ("D(", DERIV)):
            self.skip_ws()
            if self.text.startswith(prefix, self.pos):
                self.pos += len(prefix)
                idx = self.match_generator()
                if idx is None:
                    raise ScalarError(
                        f"unknown generator name at position {self.pos}")
                self.expect(")")
                return AlgebraElement.from_word((gen(kind, idx),))
        idx = self.match_generator()
        if idx is not None:
            return AlgebraElement.from_word((gen(COORD, idx),))
        # fall back to the scalar grammar for one atom
        toks = scalar._Tokens(self.text)
        toks.pos = self.pos
        value = scalar._parse_atom(toks)
        self.pos = toks.pos
        return AlgebraElement.unit(value)


def _is_scalar_element(e: AlgebraElement) -> bool:
    return set(e.terms) <= {()}


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def element_str(e: AlgebraElement, sys: RewriteSystem) -> str:
    """Canonical printing: words ascending in the plane's monomial order."""
    if e.is_zero():
        return "0"
    parts = []
    for w in sorted(e.terms, key=sys.word_key):
        c = e.terms[w]
        cstr = str(c)
        wstr = "*".join(sys.gen_name(g) for g in w)
        if not w:
            term = f"({cstr})" if " " in cstr else cstr
        elif cstr == "1":
            term = wstr
        elif cstr == "-1":
            term = f"-{wstr}"
        else:
            if " " in cstr:
                cstr = f"({cstr})"
            term = f"{cstr} * {wstr}"
        if parts and not term.startswith("-"):
            parts.append("+ " + term)
        elif parts:
            parts.append("- " + term[1:])
        else:
            parts.append(term)
    return " ".join(parts)

"""Exact arithmetic for Laurent polynomials and rational expressions.

Everything is computed over the rationals with arbitrary precision; there
are no floats anywhere.  Variables live in a shared VariableTable whose
first entry is always the formal parameter q.  Exponents may be negative
(Laurent monomials are first class citizens).

The normal form of a RationalExpression keeps the denominator free of
monomial content and monic in its lexicographically leading term, and
collapses numerator/denominator pairs that differ by a constant times a
monomial.  No multivariate gcd is ever attempted; equality of expressions
is decided by cross multiplication.
"""

from __future__ import annotations

from fractions import Fraction
import json
import re


class AlgebraError(Exception):
    pass


class TableMismatchError(AlgebraError):
    pass


class ZeroDenominatorError(AlgebraError):
    pass


class ZeroDivisionExpressionError(ZeroDenominatorError):
    pass


class SubstitutionPoleError(AlgebraError):
    pass


class PoleAtQZeroError(AlgebraError):
    def __init__(self, valuation, message=None):
        self.valuation = valuation
        super().__init__(message or "q-valuation %d is negative" % valuation)


class SeriesCoefficientError(AlgebraError):
    """A q-series coefficient failed to be a Laurent polynomial."""


class InvariantViolationError(AlgebraError):
    pass


class ParseError(AlgebraError):
    pass


def _coeff(c):
    """Normalize a coefficient to int when exact, Fraction otherwise."""
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return int(c)
        return c
    return c


class VariableTable:
    """Ordered list of variable names; index 0 is always "q"."""

    __slots__ = ("names", "_index")

    def __init__(self, names):
        names = tuple(names)
        if not names or names[0] != "q":
            raise AlgebraError("variable table must start with q")
        if len(set(names)) != len(names):
            raise AlgebraError("duplicate variable names")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    def __eq__(self, other):
        return isinstance(other, VariableTable) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __len__(self):
        return len(self.names)

    def __repr__(self):
        return "VariableTable%r" % (self.names,)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise AlgebraError("unknown variable %r" % name)

    def has(self, name):
        return name in self._index


def check_same_table(a, b):
    if a.table != b.table:
        raise TableMismatchError(
            "expressions use different variable tables: %r vs %r"
            % (a.table.names, b.table.names))


def _mono_text(table, exps):
    parts = []
    for i, e in enumerate(exps):
        if e == 0:
            continue
        if e == 1:
            parts.append(table.names[i])
        else:
            parts.append("%s^%d" % (table.names[i], e))
    return "*".join(parts)


class Polynomial:
    """Laurent polynomial: dict from exponent tuples to nonzero rationals."""

    __slots__ = ("table", "terms")

    def __init__(self, table, terms=None):
        self.table = table
        self.terms = terms if terms is not None else {}

    @classmethod
    def zero(cls, table):
        return cls(table, {})

    @classmethod
    def const(cls, table, c):
        c = _coeff(c)
        if c == 0:
            return cls(table, {})
        return cls(table, {(0,) * len(table): c})

    @classmethod
    def monomial(cls, table, exps, c=1):
        c = _coeff(c)
        if c == 0:
            return cls(table, {})
        exps = tuple(exps)
        if len(exps) != len(table):
            raise AlgebraError("exponent vector has wrong length")
        return cls(table, {exps: c})

    @classmethod
    def variable(cls, table, name, power=1):
        exps = [0] * len(table)
        exps[table.index(name)] = power
        return cls.monomial(table, tuple(exps))

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        """Return the constant value if this is a constant, else None."""
        if not self.terms:
            return 0
        if len(self.terms) == 1:
            (exps, c), = self.terms.items()
            if not any(exps):
                return c
        return None

    def as_monomial(self):
        """Return (exps, coeff) if the polynomial has a single term, else None."""
        if len(self.terms) == 1:
            (exps, c), = self.terms.items()
            return exps, c
        return None

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0], reverse=True)

    def leading(self):
        """Leading (exps, coeff) in descending lexicographic order."""
        if not self.terms:
            raise AlgebraError("zero polynomial has no leading term")
        exps = max(self.terms)
        return exps, self.terms[exps]

    def __eq__(self, other):
        return (isinstance(other, Polynomial)
                and self.table == other.table and self.terms == other.terms)

    def __hash__(self):
        raise TypeError("Polynomial is mutable in spirit; not hashable")

    def __neg__(self):
        return Polynomial(self.table, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        check_same_table(self, other)
        if len(self.terms) < len(other.terms):
            small, big = self.terms, other.terms
        else:
            small, big = other.terms, self.terms
        out = dict(big)
        for e, c in small.items():
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = _coeff(s)
        return Polynomial(self.table, out)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c):
        c = _coeff(c)
        if c == 0:
            return Polynomial.zero(self.table)
        if c == 1:
            return self
        return Polynomial(self.table, {e: _coeff(k * c) for e, k in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scaled(other)
        check_same_table(self, other)
        if not self.terms or not other.terms:
            return Polynomial.zero(self.table)
        if len(self.terms) > len(other.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, 0) + ca * cb
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = _coeff(s)
        return Polynomial(self.table, out)

    __rmul__ = __mul__

    def shifted(self, exps):
        """Multiply by the monomial with exponent vector exps."""
        if not any(exps):
            return self
        return Polynomial(
            self.table,
            {tuple(a + b for a, b in zip(e, exps)): c for e, c in self.terms.items()})

    def content_monomial(self):
        """Componentwise minimum exponent vector over all terms."""
        if not self.terms:
            raise AlgebraError("zero polynomial has no content")
        it = iter(self.terms)
        mins = list(next(it))
        for e in it:
            for i, x in enumerate(e):
                if x < mins[i]:
                    mins[i] = x
        return tuple(mins)

    def q_valuation(self):
        """Minimum q-exponent over all terms (None for the zero polynomial)."""
        if not self.terms:
            return None
        return min(e[0] for e in self.terms)

    def max_q_exponent(self):
        if not self.terms:
            return None
        return max(e[0] for e in self.terms)

    def q_slice(self, k):
        """Polynomial of terms with q-exponent k, with the q-exponent set to 0."""
        out = {}
        for e, c in self.terms.items():
            if e[0] == k:
                out[(0,) + e[1:]] = c
        return Polynomial(self.table, out)

    def permuted(self, perm):
        return Polynomial(
            self.table, {perm.apply_exps(e): c for e, c in self.terms.items()})

    def substituted(self, target_table, bindings):
        """Substitute variables by scalar multiples of monomials.

        bindings maps a variable index of self.table to a pair
        (coefficient, exponent vector over target_table).  Unbound
        variables must map to a variable of the same name in the target.
        """
        n_t = len(target_table)
        cache = {}

        def binding_for(i):
            hit = cache.get(i)
            if hit is None:
                if i in bindings:
                    hit = bindings[i]
                else:
                    exps = [0] * n_t
                    exps[target_table.index(self.table.names[i])] = 1
                    hit = (1, tuple(exps))
                cache[i] = hit
            return hit

        out = {}
        for e, c in self.terms.items():
            coeff = c
            acc = [0] * n_t
            for i, power in enumerate(e):
                if power == 0:
                    continue
                bc, bexps = binding_for(i)
                if bc != 1:
                    coeff = coeff * (Fraction(bc) ** power)
                for j, x in enumerate(bexps):
                    if x:
                        acc[j] += x * power
            key = tuple(acc)
            s = out.get(key, 0) + coeff
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = _coeff(s)
        return Polynomial(target_table, out)

    def evaluate(self, values):
        """Full evaluation at a point; values is a list of nonzero Fractions."""
        total = Fraction(0)
        for e, c in self.terms.items():
            v = Fraction(c)
            for i, p in enumerate(e):
                if p:
                    v *= Fraction(values[i]) ** p
            total += v
        return total

    def text(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = _mono_text(self.table, exps)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append("%s*%s" % (c, mono))
        return " + ".join(parts)

    def __repr__(self):
        return "Poly(%s)" % self.text()


def poly_one(table):
    return Polynomial.const(table, 1)


def poly_var(table, name, power=1):
    exps = [0] * len(table)
    exps[table.index(name)] = power
    return Polynomial.monomial(table, tuple(exps))


def exact_div(a, b):
    """Exact division of Laurent polynomials; returns None when not divisible."""
    if b.is_zero():
        raise ZeroDivisionExpressionError("division by zero polynomial")
    if a.is_zero():
        return Polynomial.zero(a.table)
    check_same_table(a, b)
    ca = a.content_monomial()
    cb = b.content_monomial()
    aa = a.shifted(tuple(-x for x in ca))
    bb = b.shifted(tuple(-x for x in cb))
    shift = tuple(x - y for x, y in zip(ca, cb))
    blead_e, blead_c = bb.leading()
    quot = {}
    rem = dict(aa.terms)
    while rem:
        rlead_e = max(rem)
        t = tuple(x - y for x, y in zip(rlead_e, blead_e))
        if any(x < 0 for x in t):
            return None
        c = _coeff(Fraction(rem[rlead_e], 1) / blead_c)
        quot[t] = c
        for e, k in bb.terms.items():
            key = tuple(x + y for x, y in zip(e, t))
            s = rem.get(key, 0) - c * k
            if s == 0:
                rem.pop(key, None)
            else:
                rem[key] = _coeff(s)
    q = Polynomial(a.table, quot)
    if any(shift):
        q = q.shifted(shift)
    return q


class Permutation:
    """Bijection on a subset of table variables, identity elsewhere.

    mapping is a dict from variable index to variable index; it must be a
    bijection of its key set onto itself (as a set of table positions).
    """

    __slots__ = ("table", "mapping")

    def __init__(self, table, mapping):
        keys = set(mapping)
        vals = set(mapping.values())
        if keys != vals:
            raise AlgebraError("permutation images must equal its domain")
        self.table = table
        self.mapping = dict(mapping)

    @classmethod
    def of_positions(cls, table, var_indices, images):
        """var_indices[k] is sent to var_indices[images[k]]."""
        if sorted(images) != list(range(len(var_indices))):
            raise AlgebraError("images must be a permutation of positions")
        return cls(table, {var_indices[k]: var_indices[images[k]]
                           for k in range(len(var_indices))})

    def apply_exps(self, exps):
        out = list(exps)
        for src, dst in self.mapping.items():
            out[dst] = exps[src]
        return tuple(out)

    def __repr__(self):
        return "Permutation(%r)" % (self.mapping,)


class RationalExpression:
    """Quotient of Laurent polynomials in normal form.

    Invariants: denominator is nonzero, has no monomial content, and its
    lexicographically leading coefficient is 1.  If numerator and
    denominator agree up to a constant times a monomial the expression is
    stored with denominator 1.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _normalized=False):
        if den is None:
            den = poly_one(num.table)
        if _normalized:
            self.num = num
            self.den = den
            return
        check_same_table(num, den)
        if den.is_zero():
            raise ZeroDenominatorError("zero denominator")
        if num.is_zero():
            self.num = num
            self.den = poly_one(num.table)
            return
        content = den.content_monomial()
        if any(content):
            den = den.shifted(tuple(-x for x in content))
            num = num.shifted(tuple(-x for x in content))
        lead_c = den.leading()[1]
        if lead_c != 1:
            inv = Fraction(1, 1) / lead_c
            den = den.scaled(inv)
            num = num.scaled(inv)
        collapsed = _try_collapse(num, den)
        if collapsed is not None:
            num, den = collapsed
        self.num = num
        self.den = den

    @property
    def table(self):
        return self.num.table

    @classmethod
    def from_const(cls, table, c):
        return cls(Polynomial.const(table, c), _normalized=False)

    @classmethod
    def one(cls, table):
        return cls(poly_one(table), _normalized=False)

    @classmethod
    def zero(cls, table):
        return cls(Polynomial.zero(table), _normalized=False)

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.den.is_constant() == 1 and self.num.is_constant() == 1

    def den_is_one(self):
        return self.den.is_constant() == 1

    def constant_value(self):
        """Return the constant (int or Fraction) if the expression is one, else None."""
        if self.den.is_constant() == 1:
            return self.num.is_constant()
        return None

    def __neg__(self):
        return RationalExpression(-self.num, self.den, _normalized=True)

    def __add__(self, other):
        other = _as_rx(other, self.table)
        check_same_table(self.num, other.num)
        if self.den.terms == other.den.terms:
            return RationalExpression(self.num + other.num, self.den)
        return RationalExpression(
            self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_rx(other, self.table)
        return self + (-other)

    def __rsub__(self, other):
        return _as_rx(other, self.table) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalExpression(self.num.scaled(other), self.den)
        check_same_table(self.num, other.num)
        return RationalExpression(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDenominatorError("division by zero constant")
            return RationalExpression(self.num, self.den.scaled(other))
        check_same_table(self.num, other.num)
        if other.num.is_zero():
            raise ZeroDenominatorError("division by zero expression")
        return RationalExpression(self.num * other.den, self.den * other.num)

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDenominatorError("inverse of zero")
        return RationalExpression(self.den, self.num)

    def equals(self, other):
        other = _as_rx(other, self.table)
        check_same_table(self.num, other.num)
        if self.num.terms == other.num.terms and self.den.terms == other.den.terms:
            return True
        left = self.num * other.den
        right = other.num * self.den
        return left.terms == right.terms

    def permuted(self, perm):
        return RationalExpression(self.num.permuted(perm), self.den.permuted(perm))

    def substituted(self, target_table, bindings):
        num = self.num.substituted(target_table, bindings)
        den = self.den.substituted(target_table, bindings)
        if den.is_zero():
            raise SubstitutionPoleError("substitution sends denominator to zero")
        return RationalExpression(num, den)

    def evaluate(self, values):
        d = self.den.evaluate(values)
        if d == 0:
            raise SubstitutionPoleError("denominator vanishes at evaluation point")
        return self.num.evaluate(values) / d

    def q_valuation(self):
        """Exact q-adic valuation (None for the zero expression)."""
        if self.num.is_zero():
            return None
        return self.num.q_valuation() - self.den.q_valuation()

    def q_laurent_series(self, through_order):
        """Laurent expansion in q around 0, exact, through q^through_order.

        Returns (valuation, coeffs) where coeffs[k] is the
        RationalExpression coefficient of q^(valuation + k); the
        coefficients contain no q.
        """
        if self.num.is_zero():
            return 0, [RationalExpression.zero(self.table)
                       for _ in range(through_order + 1)]
        vn = self.num.q_valuation()
        vd = self.den.q_valuation()
        val = vn - vd
        num = self.num.shifted((-vn,) + (0,) * (len(self.table) - 1))
        den = self.den.shifted((-vd,) + (0,) * (len(self.table) - 1))
        count = through_order - val + 1
        if count <= 0:
            return val, []
        nmax = num.max_q_exponent()
        n_sl = {k: num.q_slice(k) for k in range(0, min(nmax, count - 1) + 1)}
        d_sl = {k: den.q_slice(k) for k in range(0, min(den.max_q_exponent(), count - 1) + 1)}
        d0 = RationalExpression(d_sl[0])
        coeffs = []
        for k in range(count):
            acc = RationalExpression(n_sl.get(k, Polynomial.zero(self.table)))
            for j in range(k):
                dk = d_sl.get(k - j)
                if dk is None or coeffs[j].is_zero():
                    continue
                acc = acc - coeffs[j] * RationalExpression(dk)
            coeffs.append(acc / d0)
        return val, coeffs

    def q_series(self, order):
        """Exact power series in q through q^order, as a Laurent polynomial.

        The coefficients must come out as Laurent polynomials in the other
        variables; a negative q-valuation raises PoleAtQZeroError and a
        non-polynomial coefficient raises SeriesCoefficientError.
        """
        val, coeffs = self.q_laurent_series(order)
        if self.num.is_zero():
            return Polynomial.zero(self.table)
        if val < 0:
            raise PoleAtQZeroError(val)
        out = Polynomial.zero(self.table)
        for k, c in enumerate(coeffs):
            if c.is_zero():
                continue
            p = exact_div(c.num, c.den)
            if p is None:
                raise SeriesCoefficientError(
                    "coefficient of q^%d is not a Laurent polynomial" % (val + k))
            out = out + p.shifted((val + k,) + (0,) * (len(self.table) - 1))
        return out

    def text(self):
        if self.den.is_constant() == 1:
            return self.num.text()
        return "(%s) / (%s)" % (self.num.text(), self.den.text())

    def json_obj(self):
        return {
            "vars": list(self.table.names),
            "num": [list(e) + [str(Fraction(c))] for e, c in self.num.sorted_terms()],
            "den": [list(e) + [str(Fraction(c))] for e, c in self.den.sorted_terms()],
        }

    def __repr__(self):
        return "Rx(%s)" % self.text()


def _as_rx(v, table):
    if isinstance(v, RationalExpression):
        return v
    if isinstance(v, (int, Fraction)):
        return RationalExpression.from_const(table, v)
    raise AlgebraError("cannot coerce %r to an expression" % (v,))


def _try_collapse(num, den):
    """Collapse num/den to (c*mono, 1) when num equals c*mono*den."""
    if len(num.terms) != len(den.terms):
        return None
    ns = num.sorted_terms()
    ds = den.sorted_terms()
    shift = tuple(a - b for a, b in zip(ns[0][0], ds[0][0]))
    ratio = Fraction(ns[0][1], 1) / ds[0][1]
    for (ne, nc), (de, dc) in zip(ns[1:], ds[1:]):
        if tuple(a - b for a, b in zip(ne, de)) != shift:
            return None
        if Fraction(nc, 1) / dc != ratio:
            return None
    mono = Polynomial.monomial(num.table, shift, ratio)
    return mono, poly_one(num.table)


# ---------------------------------------------------------------------------
# Factored terms: scalar * monomial * product of canonical bases^exponents.
# Sums of factored terms assemble over the union denominator, which keeps
# intermediate expression sizes close to the final answer.
# ---------------------------------------------------------------------------

def _canonical_base(poly):
    """Split poly as coeff * monomial * base with base content free and monic.

    Returns (coeff, mono_exps, base) where base is None when poly is a
    single term (a pure monomial).
    """
    if poly.is_zero():
        raise AlgebraError("zero polynomial cannot be a factor")
    mono = poly.as_monomial()
    if mono is not None:
        return mono[1], mono[0], None
    content = poly.content_monomial()
    base = poly.shifted(tuple(-x for x in content)) if any(content) else poly
    lc = base.leading()[1]
    if lc != 1:
        base = base.scaled(Fraction(1, 1) / lc)
        return lc, content, base
    return 1, content, base


def _base_key(base):
    return tuple((e, str(Fraction(c))) for e, c in base.sorted_terms())


class FactoredTerm:
    """coeff * X^mono * prod(base^exp); bases are canonical polynomials."""

    __slots__ = ("table", "coeff", "mono", "factors")

    def __init__(self, table, coeff=1, mono=None, factors=None):
        self.table = table
        self.coeff = _coeff(coeff)
        self.mono = mono if mono is not None else (0,) * len(table)
        self.factors = factors if factors is not None else {}

    @classmethod
    def one(cls, table):
        return cls(table)

    def copy(self):
        return FactoredTerm(self.table, self.coeff, self.mono, dict(self.factors))

    def is_zero(self):
        return self.coeff == 0

    def times_scalar(self, c):
        out = self.copy()
        out.coeff = _coeff(out.coeff * c)
        return out

    def times_mono(self, exps):
        out = self.copy()
        out.mono = tuple(a + b for a, b in zip(out.mono, exps))
        return out

    def times_poly(self, poly, exp=1):
        """Multiply by poly^exp; poly is canonicalized into the factor list."""
        if exp == 0:
            return self
        coeff, mono, base = _canonical_base(poly)
        out = self.copy()
        if coeff != 1:
            c = Fraction(coeff) ** exp
            out.coeff = _coeff(Fraction(out.coeff) * c)
        if any(mono):
            out.mono = tuple(a + b * exp for a, b in zip(out.mono, mono))
        if base is not None:
            key = _base_key(base)
            prev = out.factors.get(key)
            if prev is None:
                out.factors[key] = (base, exp)
            else:
                e = prev[1] + exp
                if e == 0:
                    del out.factors[key]
                else:
                    out.factors[key] = (prev[0], e)
        return out

    def times_term(self, other):
        out = self.copy()
        out.coeff = _coeff(Fraction(out.coeff) * other.coeff)
        out.mono = tuple(a + b for a, b in zip(out.mono, other.mono))
        for base, exp in other.factors.values():
            prev_key = _base_key(base)
            prev = out.factors.get(prev_key)
            if prev is None:
                out.factors[prev_key] = (base, exp)
            else:
                e = prev[1] + exp
                if e == 0:
                    del out.factors[prev_key]
                else:
                    out.factors[prev_key] = (prev[0], e)
        return out

    def negate(self):
        return self.times_scalar(-1)

    def inverted(self):
        if self.coeff == 0:
            raise ZeroDenominatorError("inverse of zero term")
        out = FactoredTerm(self.table, _coeff(Fraction(1, 1) / self.coeff),
                           tuple(-e for e in self.mono),
                           {k: (b, -e) for k, (b, e) in self.factors.items()})
        return out

    def permuted(self, perm):
        out = FactoredTerm(self.table, self.coeff, perm.apply_exps(self.mono), {})
        for base, exp in self.factors.values():
            pb = base.permuted(perm)
            coeff, mono, nb = _canonical_base(pb)
            if coeff != 1:
                out.coeff = _coeff(Fraction(out.coeff) * Fraction(coeff) ** exp)
            if any(mono):
                out.mono = tuple(a + b * exp for a, b in zip(out.mono, mono))
            if nb is not None:
                key = _base_key(nb)
                prev = out.factors.get(key)
                if prev is None:
                    out.factors[key] = (nb, exp)
                else:
                    e = prev[1] + exp
                    if e == 0:
                        del out.factors[key]
                    else:
                        out.factors[key] = (nb, e)
        return out

    def value(self):
        num = Polynomial.monomial(self.table, self.mono, self.coeff)
        den = poly_one(self.table)
        for key in sorted(self.factors):
            base, exp = self.factors[key]
            if exp > 0:
                for _ in range(exp):
                    num = num * base
            else:
                for _ in range(-exp):
                    den = den * base
        return RationalExpression(num, den)

    def sorted_factors(self):
        return [self.factors[k] for k in sorted(self.factors)]

    def text(self):
        # for display, re-anchor each base at its lex-smallest term so that
        # factors read like the original products (e.g. 1 - L^-1*q)
        coeff = self.coeff
        mono = list(self.mono)
        pieces = []
        for base, exp in self.sorted_factors():
            s_exps = min(base.terms)
            cs = base.terms[s_exps]
            disp = base
            if cs != 1 or any(s_exps):
                disp = base.scaled(Fraction(1, 1) / cs).shifted(
                    tuple(-x for x in s_exps))
                coeff = _coeff(coeff * Fraction(cs) ** exp)
                mono = [a + b * exp for a, b in zip(mono, s_exps)]
            pieces.append((disp, exp))
        head = Polynomial.monomial(self.table, tuple(mono), coeff).text()
        parts = [] if head == "1" else [head]
        for disp, exp in pieces:
            if exp == 1:
                parts.append("(%s)" % disp.text())
            else:
                parts.append("(%s)^%d" % (disp.text(), exp))
        if not parts:
            return "1"
        return "*".join(parts)

    def __repr__(self):
        return "FactoredTerm(%s)" % self.text()


def sum_factored(terms, table=None):
    """Assemble an exact sum of factored terms over the union denominator."""
    terms = [t for t in terms if not t.is_zero()]
    if not terms:
        if table is None:
            raise AlgebraError("cannot sum an empty list without a table")
        return RationalExpression.zero(table)
    table = terms[0].table
    den_exp = {}
    bases = {}
    for t in terms:
        for key, (base, exp) in t.factors.items():
            if exp < 0:
                bases[key] = base
                den_exp[key] = max(den_exp.get(key, 0), -exp)
    den = poly_one(table)
    for key in sorted(den_exp):
        for _ in range(den_exp[key]):
            den = den * bases[key]
    num = Polynomial.zero(table)
    for t in terms:
        part = Polynomial.monomial(table, t.mono, t.coeff)
        for key in sorted(set(t.factors) | set(den_exp)):
            e = t.factors[key][1] if key in t.factors else 0
            target = e + den_exp.get(key, 0)
            if target < 0:
                raise AlgebraError("internal: union denominator too small")
            base = t.factors[key][0] if key in t.factors else bases[key]
            for _ in range(target):
                part = part * base
        num = num + part
    return RationalExpression(num, den)


def factored_sums_equal(terms_a, terms_b, table=None):
    """Exact equality of two sums of factored terms via a single assembly."""
    diff = list(terms_a) + [t.negate() for t in terms_b]
    return sum_factored(diff, table).is_zero()


# ---------------------------------------------------------------------------
# Text and JSON parsing for the canonical serialization.
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(r"^(-?\d+(?:/\d+)?)$")


def parse_polynomial(text, table):
    text = text.strip()
    if text == "0":
        return Polynomial.zero(table)
    out = Polynomial.zero(table)
    for raw in text.split(" + "):
        raw = raw.strip()
        if not raw:
            raise ParseError("empty term in %r" % text)
        coeff = Fraction(1)
        factors = raw.split("*")
        start = 0
        m = _TERM_RE.match(factors[0])
        if m:
            coeff = Fraction(m.group(1))
            start = 1
        elif factors[0].startswith("-"):
            coeff = Fraction(-1)
            factors[0] = factors[0][1:]
        exps = [0] * len(table)
        for f in factors[start:]:
            if "^" in f:
                name, _, p = f.partition("^")
                try:
                    power = int(p)
                except ValueError:
                    raise ParseError("bad exponent in %r" % f)
            else:
                name, power = f, 1
            if not table.has(name):
                raise ParseError("unknown variable %r" % name)
            exps[table.index(name)] += power
        out = out + Polynomial.monomial(table, tuple(exps), coeff)
    return out


def parse_expression(text, table):
    text = text.strip()
    if text.startswith("(") and ") / (" in text and text.endswith(")"):
        i = text.index(") / (")
        num_s = text[1:i]
        den_s = text[i + 5:-1]
        return RationalExpression(parse_polynomial(num_s, table),
                                  parse_polynomial(den_s, table))
    return RationalExpression(parse_polynomial(text, table))


def expression_from_json(obj):
    table = VariableTable(obj["vars"])
    def poly(rows):
        p = Polynomial.zero(table)
        for row in rows:
            exps = tuple(int(x) for x in row[:-1])
            p = p + Polynomial.monomial(table, exps, Fraction(row[-1]))
        return p
    return RationalExpression(poly(obj["num"]), poly(obj["den"]))


def expression_to_json_text(rx, indent=None):
    return json.dumps(rx.json_obj(), indent=indent, sort_keys=False)

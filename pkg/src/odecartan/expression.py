"""Canonical rational functions over a chart.

An ``Expression`` is a reduced fraction of expanded polynomials with
integer coefficients of coprime content and a positive-leading-coefficient
denominator.  Differentiation treats jet symbols formally: the partial of
``A`` with multi-index ``I`` by a coordinate in its argument list is the
symbol with multi-index ``I + (coord,)``; by any other coordinate it is
zero.  Expressions are immutable and safe to share between threads.
"""

from fractions import Fraction

from .errors import (
    ChartError,
    SingularEvaluationError,
    SingularSubstitutionError,
)
from .poly import Poly, poly_gcd

_ZERO = Fraction(0)


class Expression:
    __slots__ = ("num", "den", "chart", "table")

    def __init__(self, num, den, chart, table, _normalized=False):
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        if not _normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self.chart = chart
        self.table = table

    # -- constructors ---------------------------------------------------

    @classmethod
    def number(cls, value, chart, table):
        return cls(Poly.const(Fraction(value)), Poly.const(1), chart, table)

    @classmethod
    def coordinate(cls, name, chart, table):
        return cls(Poly.var(chart.sym(name)), Poly.const(1), chart, table)

    @classmethod
    def from_sym(cls, sym, chart, table):
        if sym.is_coordinate:
            chart.axis(sym.name)
        else:
            for a in sym.args:
                chart.axis(a)
        return cls(Poly.var(sym), Poly.const(1), chart, table)

    def _wrap(self, num, den, normalized=False):
        return Expression(num, den, self.chart, self.table, _normalized=normalized)

    def with_value(self, value):
        return Expression.number(value, self.chart, self.table)

    # -- predicates -----------------------------------------------------

    @property
    def is_zero(self):
        return self.num.is_zero

    @property
    def is_rational_constant(self):
        return self.num.is_const and self.den.is_const

    def const_value(self):
        if not self.is_rational_constant:
            raise ValueError("expression is not a rational constant")
        return self.num.const_value() / self.den.const_value()

    def __eq__(self, other):
        if not isinstance(other, Expression):
            if isinstance(other, (int, Fraction)):
                other = self.with_value(other)
            else:
                return NotImplemented
        if self.num == other.num and self.den == other.den:
            return True
        return (self.num * other.den - other.num * self.den).is_zero

    def __hash__(self):
        return hash((self.num, self.den))

    def symbols(self):
        return self.num.symbols() | self.den.symbols()

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Expression):
            if other.chart is not self.chart:
                raise ChartError(
                    f"operands on different charts: {self.chart.name} vs {other.chart.name}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return self.with_value(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.den == other.den:
            return self._wrap(self.num + other.num, self.den)
        g = poly_gcd(self.den, other.den)
        if g.is_const:
            return self._wrap(self.num * other.den + other.num * self.den, self.den * other.den)
        db = other.den.exact_div(g)
        da = self.den.exact_div(g)
        return self._wrap(self.num * db + other.num * da, self.den * db)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.num, self.den, normalized=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return self.with_value(0)
        return self._wrap(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("division by zero expression")
        return self._wrap(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        return other / self

    def __pow__(self, n):
        if n == 0:
            return self.with_value(1)
        if n < 0:
            if self.is_zero:
                raise ZeroDivisionError("negative power of zero")
            return self._wrap(self.den ** (-n), self.num ** (-n))
        return self._wrap(self.num ** n, self.den ** n)

    # -- calculus ----------------------------------------------------------

    def _total_deriv_poly(self, poly, coord):
        """d(poly)/d(coord) with the jet chain rule, as a polynomial."""
        coord_sym = self.chart.sym(coord)
        out = poly.deriv(coord_sym)
        for s in poly.symbols():
            if not s.is_coordinate and coord in s.args:
                out = out + poly.deriv(s) * Poly.var(s.derived(coord))
        return out

    def differentiate(self, coord):
        """Formal partial derivative along a chart coordinate."""
        self.chart.axis(coord)
        dn = self._total_deriv_poly(self.num, coord)
        dd = self._total_deriv_poly(self.den, coord)
        if dd.is_zero:
            return self._wrap(dn, self.den)
        return self._wrap(dn * self.den - self.num * dd, self.den * self.den)

    # -- substitution and evaluation ----------------------------------------

    def on_chart(self, chart):
        """Reinterpret on a chart containing every coordinate in use."""
        if chart is self.chart:
            return self
        for s in self.symbols():
            if s.is_coordinate:
                chart.axis(s.name)
            else:
                for a in s.args:
                    chart.axis(a)
        return Expression(self.num, self.den, chart, self.table, _normalized=True)

    def substitute(self, mapping, target_chart=None):
        """Simultaneous substitution of coordinates by expressions.

        ``mapping`` sends coordinate names of this chart to expressions on
        ``target_chart`` (defaults to this chart).  Jet symbols pass
        through untouched, so any coordinate appearing in a present jet
        symbol's arguments must either be unmapped or map to itself.
        """
        target = target_chart or self.chart
        for name in mapping:
            self.chart.axis(name)
        images = {}
        for name, image in mapping.items():
            if isinstance(image, (int, Fraction)):
                image = Expression.number(image, target, self.table)
            if image.chart is not target:
                raise ChartError("substituted expression lives on the wrong chart")
            images[name] = image
        for s in self.symbols():
            if s.is_coordinate:
                if s.name not in images:
                    target.axis(s.name)
            else:
                for a in s.args:
                    img = images.get(a)
                    if img is not None and img != Expression.coordinate(a, target, self.table):
                        raise ChartError(
                            f"cannot substitute {a!r}: it is an argument of {s.name!r}"
                        )
        num = _subst_poly(self.num, images, target, self.table)
        den = _subst_poly(self.den, images, target, self.table)
        if den.is_zero:
            raise SingularSubstitutionError("denominator vanishes identically after substitution")
        return num / den

    def evaluate(self, point):
        """Exact rational value at an assignment ``{rendered name: Fraction}``."""
        num = _eval_poly(self.num, point)
        den = _eval_poly(self.den, point)
        if den == 0:
            raise SingularEvaluationError("denominator vanishes at the point")
        return num / den

    # -- rendering -----------------------------------------------------------

    def render(self):
        """Canonical text in the input grammar (re-parseable)."""
        if self.num.is_zero:
            return "0"
        num = _render_poly(self.num)
        if self.den.is_const and self.den.const_value() == 1:
            return num
        den = _render_poly(self.den)
        if len(self.num) > 1:
            num = f"({num})"
        if _needs_parens_as_denominator(self.den):
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"Expression({self.render()})"


def _normalize(num, den):
    if num.is_zero:
        return num, Poly.const(1)
    m = num.mono_content()
    if m:
        dm = den.mono_content()
        from .poly import mono_gcd

        g = mono_gcd(m, dm)
        if g:
            num = num.div_mono(g)
            den = den.div_mono(g)
    if not den.is_const and len(den) > 1 and len(num) > 1:
        g = poly_gcd(num, den)
        if not g.is_const:
            num = num.exact_div(g)
            den = den.exact_div(g)
    # scale so both polynomials are integral with coprime contents and the
    # denominator's leading coefficient is positive
    cn = num.content()
    cd = den.content()
    red = Fraction(cn, cd)
    num = num.scale(red.numerator / cn)
    den = den.scale(red.denominator / cd)
    _, lc = den.leading()
    if lc < 0:
        num = num.scale(-1)
        den = den.scale(-1)
    return num, den


def _subst_poly(poly, images, target, table):
    zero = Expression.number(0, target, table)
    acc = zero
    cache = {}
    for mono, coeff in poly.terms.items():
        term = Expression.number(coeff, target, table)
        for s, e in mono:
            key = (s.key, e)
            factor = cache.get(key)
            if factor is None:
                if s.is_coordinate and s.name in images:
                    factor = images[s.name] ** e
                else:
                    factor = Expression.from_sym(s, target, table) ** e
                cache[key] = factor
            term = term * factor
        acc = acc + term
    return acc


def _eval_poly(poly, point):
    total = _ZERO
    for mono, coeff in poly.terms.items():
        v = Fraction(coeff)
        for s, e in mono:
            name = s.render()
            if name not in point:
                raise SingularEvaluationError(f"symbol {name!r} has no assigned value")
            v *= Fraction(point[name]) ** e
        total += v
    return total


def _render_mono(mono):
    return "*".join(s.render() + (f"^{e}" if e > 1 else "") for s, e in mono)


def _render_poly(poly):
    if poly.is_zero:
        return "0"
    parts = []
    for mono, coeff in poly.sorted_terms():
        mono_txt = _render_mono(mono)
        mag = abs(coeff)
        if not mono_txt:
            body = str(mag)
        elif mag == 1:
            body = mono_txt
        else:
            body = f"{mag}*{mono_txt}"
        if not parts:
            parts.append(body if coeff > 0 else f"-{body}")
        else:
            parts.append(f" + {body}" if coeff > 0 else f" - {body}")
    return "".join(parts)


def _needs_parens_as_denominator(poly):
    if len(poly) > 1:
        return True
    ((mono, coeff),) = poly.terms.items()
    if not mono:
        return False  # bare integer
    if coeff != 1:
        return True
    return len(mono) > 1 or mono[0][1] > 1

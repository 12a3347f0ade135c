"""Sparse multivariate polynomials with exact rational coefficients.

Monomials are tuples of ``(Sym, exponent)`` pairs sorted by the global
symbol order; the term order everywhere is graded lexicographic.  The
expanded form is canonical, so the zero test is decisive.  Full GCD
reduction is a size optimization with a configurable term budget;
correctness of equality never depends on it.
"""

from fractions import Fraction
from math import gcd as int_gcd

from . import config

ONE_MONO = ()


def mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        s1, e1 = m1[i]
        s2, e2 = m2[j]
        if s1.key == s2.key:
            out.append((s1, e1 + e2))
            i += 1
            j += 1
        elif s1.key < s2.key:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def mono_div(m1, m2):
    """Exact monomial quotient, or None when m2 does not divide m1."""
    if not m2:
        return m1
    out = []
    i = j = 0
    while j < len(m2):
        if i >= len(m1):
            return None
        s1, e1 = m1[i]
        s2, e2 = m2[j]
        if s1.key == s2.key:
            if e1 < e2:
                return None
            if e1 > e2:
                out.append((s1, e1 - e2))
            i += 1
            j += 1
        elif s1.key < s2.key:
            out.append(m1[i])
            i += 1
        else:
            return None
    out.extend(m1[i:])
    return tuple(out)


def mono_gcd(m1, m2):
    out = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        s1, e1 = m1[i]
        s2, e2 = m2[j]
        if s1.key == s2.key:
            out.append((s1, min(e1, e2)))
            i += 1
            j += 1
        elif s1.key < s2.key:
            i += 1
        else:
            j += 1
    return tuple(out)


def mono_degree(m):
    return sum(e for _, e in m)


def mono_cmp(m1, m2):
    """Graded-lex comparison; smaller symbol key dominates in the lex step."""
    d1 = mono_degree(m1)
    d2 = mono_degree(m2)
    if d1 != d2:
        return -1 if d1 < d2 else 1
    i = j = 0
    while i < len(m1) and j < len(m2):
        s1, e1 = m1[i]
        s2, e2 = m2[j]
        if s1.key == s2.key:
            if e1 != e2:
                return 1 if e1 > e2 else -1
            i += 1
            j += 1
        elif s1.key < s2.key:
            return 1
        else:
            return -1
    if i < len(m1):
        return 1
    if j < len(m2):
        return -1
    return 0


class _MonoKey:
    __slots__ = ("m",)

    def __init__(self, m):
        self.m = m

    def __lt__(self, other):
        return mono_cmp(self.m, other.m) < 0


class Poly:
    """Immutable expanded polynomial: ``{monomial: nonzero Fraction}``."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = terms

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def const(cls, value):
        value = Fraction(value)
        return cls({ONE_MONO: value} if value else {})

    @classmethod
    def var(cls, sym, exp=1):
        if exp == 0:
            return cls.const(1)
        return cls({((sym, exp),): Fraction(1)})

    # -- predicates and views ------------------------------------------

    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def const_value(self):
        return self.terms.get(ONE_MONO, Fraction(0))

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def symbols(self):
        out = set()
        for m in self.terms:
            for s, _ in m:
                out.add(s)
        return out

    def total_degree(self):
        return max((mono_degree(m) for m in self.terms), default=0)

    def leading(self):
        """Leading (graded-lex greatest) term as ``(monomial, coeff)``."""
        m = max(self.terms, key=_MonoKey)
        return m, self.terms[m]

    def sorted_terms(self, reverse=True):
        return sorted(self.terms.items(), key=lambda kv: _MonoKey(kv[0]), reverse=reverse)

    # -- ring operations -----------------------------------------------

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly(out)

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not self.terms or not other.terms:
            return Poly.zero()
        if len(other.terms) > len(self.terms):
            self, other = other, self
        out = {}
        for m2, c2 in other.terms.items():
            for m1, c1 in self.terms.items():
                m = mono_mul(m1, m2)
                c = c1 * c2
                s = out.get(m)
                if s is None:
                    out[m] = c
                else:
                    s = s + c
                    if s:
                        out[m] = s
                    else:
                        del out[m]
        return Poly(out)

    def scale(self, value):
        if not value:
            return Poly.zero()
        return Poly({m: c * value for m, c in self.terms.items()})

    def mul_mono(self, mono, coeff=Fraction(1)):
        return Poly({mono_mul(m, mono): c * coeff for m, c in self.terms.items()})

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- calculus -------------------------------------------------------

    def deriv(self, sym):
        """Formal partial derivative with respect to a single symbol."""
        out = {}
        for m, c in self.terms.items():
            for i, (s, e) in enumerate(m):
                if s.key == sym.key:
                    if e == 1:
                        nm = m[:i] + m[i + 1:]
                    else:
                        nm = m[:i] + ((s, e - 1),) + m[i + 1:]
                    nc = c * e
                    acc = out.get(nm)
                    out[nm] = nc if acc is None else acc + nc
                    if out[nm] == 0:
                        del out[nm]
                    break
        return Poly(out)

    # -- structure ------------------------------------------------------

    def content(self):
        """Positive rational c with self/c integral, coprime coefficients."""
        num = 0
        den = 1
        for c in self.terms.values():
            num = int_gcd(num, c.numerator)
            den = den * c.denominator // int_gcd(den, c.denominator)
        if num == 0:
            return Fraction(1)
        return Fraction(num, den)

    def mono_content(self):
        it = iter(self.terms)
        try:
            g = next(it)
        except StopIteration:
            return ONE_MONO
        for m in it:
            if not g:
                return ONE_MONO
            g = mono_gcd(g, m)
        return g

    def div_mono(self, mono):
        if not mono:
            return self
        return Poly({mono_div(m, mono): c for m, c in self.terms.items()})

    def degree_in(self, sym):
        d = 0
        for m in self.terms:
            for s, e in m:
                if s.key == sym.key:
                    d = max(d, e)
                    break
        return d

    def coeffs_in(self, sym):
        """View as univariate in ``sym``: ``{exp: Poly in the other symbols}``."""
        out = {}
        for m, c in self.terms.items():
            e = 0
            rest = m
            for i, (s, k) in enumerate(m):
                if s.key == sym.key:
                    e = k
                    rest = m[:i] + m[i + 1:]
                    break
            bucket = out.setdefault(e, {})
            acc = bucket.get(rest)
            bucket[rest] = c if acc is None else acc + c
        return {e: Poly({m: c for m, c in bucket.items() if c}) for e, bucket in out.items()}

    @staticmethod
    def from_coeffs_in(sym, coeffs):
        out = Poly.zero()
        for e, p in coeffs.items():
            out = out + (p.mul_mono(((sym, e),)) if e else p)
        return out

    def exact_div(self, other):
        """Exact quotient self/other, or None when the division is inexact."""
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero:
            return Poly.zero()
        if other.is_const:
            return self.scale(1 / other.const_value())
        if len(other.terms) == 1:
            ((om, oc),) = other.terms.items()
            out = {}
            for m, c in self.terms.items():
                qm = mono_div(m, om)
                if qm is None:
                    return None
                out[qm] = c / oc
            return Poly(out)
        lm, lc = other.leading()
        rem = self
        quot = {}
        while not rem.is_zero:
            rm, rc = rem.leading()
            qm = mono_div(rm, lm)
            if qm is None:
                return None
            qc = rc / lc
            quot[qm] = qc
            rem = rem + other.mul_mono(qm, -qc)
        return Poly(quot)

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        bits = []
        for m, c in self.sorted_terms():
            mono = "*".join(s.render() + (f"^{e}" if e > 1 else "") for s, e in m)
            bits.append(f"{c}{'*' + mono if mono else ''}")
        return "Poly(" + " + ".join(bits) + ")"


def poly_gcd(a, b):
    """Primitive multivariate GCD (positive leading coefficient).

    Gives up (returns 1) beyond the configured term budget; callers only
    ever use the result to cancel common factors, so 1 is always sound.
    """
    if a.is_zero and b.is_zero:
        return Poly.const(1)
    if a.is_zero:
        return _make_primitive(b)
    if b.is_zero:
        return _make_primitive(a)
    if a.is_const or b.is_const:
        return Poly.const(1)
    if len(a) == 1 or len(b) == 1:
        g = mono_gcd(a.mono_content(), b.mono_content())
        return Poly({g: Fraction(1)})
    budget = config.GCD_TERM_BUDGET
    if len(a) > budget or len(b) > budget:
        return Poly.const(1)
    common = {s.key for s in a.symbols()} & {s.key for s in b.symbols()}
    if not common:
        return Poly.const(1)
    sym = min(
        (s for s in a.symbols() if s.key in common),
        key=lambda s: min(a.degree_in(s), b.degree_in(s)),
    )
    return _gcd_recursive(a, b, sym)


def _make_primitive(p):
    if p.is_zero:
        return p
    p = p.div_mono(p.mono_content()).scale(1 / p.content())
    _, lc = p.leading()
    if lc < 0:
        p = p.scale(-1)
    return p


def _content_in(coeffs):
    g = Poly.zero()
    for p in coeffs.values():
        g = poly_gcd(g, p)
        if g.is_const:
            return Poly.const(1)
    return g


def _prem(a, b, sym):
    """Pseudo-remainder of a by b in the main variable ``sym``."""
    ca = a.coeffs_in(sym)
    cb = b.coeffs_in(sym)
    da = max(ca)
    db = max(cb)
    lb = cb[db]
    rem = ca
    d = da
    while rem and d >= db:
        lr = rem.get(d)
        if lr is None or lr.is_zero:
            rem.pop(d, None)
            d = max(rem, default=-1)
            continue
        # rem <- lb*rem - lr*b*x^(d-db)
        new = {}
        for e, p in rem.items():
            new[e] = p * lb
        for e, p in cb.items():
            shift = e + d - db
            q = new.get(shift, Poly.zero()) - p * lr
            new[shift] = q
        new.pop(d, None)
        rem = {e: p for e, p in new.items() if not p.is_zero}
        d = max(rem, default=-1)
    return Poly.from_coeffs_in(sym, rem)


def _max_coeff_bits(p):
    return max(
        (abs(c.numerator).bit_length() + c.denominator.bit_length() for c in p.terms.values()),
        default=0,
    )


def _strip_content(p, sym):
    """Primitive part in the main variable: rational and polynomial content."""
    c = p.content()
    if c != 1:
        p = p.scale(1 / c)
    pc = _content_in(p.coeffs_in(sym))
    if not pc.is_const:
        p = p.exact_div(pc)
    return p


def _gcd_recursive(a, b, sym):
    a_syms = {s.key for s in a.symbols()}
    b_syms = {s.key for s in b.symbols()}
    if sym.key not in a_syms or sym.key not in b_syms:
        # main variable missing from one side: gcd divides its content
        side = a if sym.key not in a_syms else b
        other = b if side is a else a
        return poly_gcd(_content_in(other.coeffs_in(sym)), side)
    cont_a = _content_in(a.coeffs_in(sym))
    cont_b = _content_in(b.coeffs_in(sym))
    cont = poly_gcd(cont_a, cont_b)
    pa = _strip_content(a, sym)
    pb = _strip_content(b, sym)
    if pa.degree_in(sym) < pb.degree_in(sym):
        pa, pb = pb, pa
    budget = config.GCD_TERM_BUDGET
    while not pb.is_zero:
        # coefficient blowup means this instance is not worth reducing;
        # giving up is always sound (callers just skip the cancellation)
        if len(pa) > 4 * budget or len(pb) > 4 * budget:
            return Poly.const(1)
        if _max_coeff_bits(pa) > 8192 or _max_coeff_bits(pb) > 8192:
            return Poly.const(1)
        r = _prem(pa, pb, sym)
        if r.is_zero:
            pa = pb
            break
        pa, pb = pb, _strip_content(r, sym)
        if pb.degree_in(sym) == 0 and not pb.is_zero:
            return _make_primitive(cont)
    return _make_primitive(cont * _make_primitive(pa))


def poly_lcm(a, b):
    if a.is_zero or b.is_zero:
        return Poly.zero()
    g = poly_gcd(a, b)
    q = b.exact_div(g) if not g.is_const else b
    return a * q

"""The 6-manifold picture: invariant coframe, structure invariants, the
Einstein-reduction conditions, the cubic family and its invariants.

Everything here hangs off a third-order right-hand side F(x, y, p, q) with
F_qq not identically zero.  The invariant coframe is constructed in the
chart (x, y, p, q, alpha, gamma); its six exterior derivatives must fit a
fixed quadratic pattern whose thirteen scalar coefficients a..s are the
fiber-preserving invariants of the ODE.  The fit is overdetermined and is
verified slot by slot, which also polices the coframe construction itself.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ChartError,
    DegenerateOdeError,
    FamilyRejectionError,
    StructureConsistencyError,
)
from .expression import Expression
from .forms import Coframe, DifferentialForm
from .symbols import J2_CHART, M_ADAPTED_CHART, P_CHART

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)
SIXTH = Fraction(1, 6)

FLAT_ODE_TEXT = "3/2*q^2/p"

STRUCTURE_NAMES = ("a", "b", "c", "e", "f", "g", "h", "k", "l", "m", "n", "r", "s")

# Coframe positions: 0..3 the four horizontal forms, 4..5 the two
# connection forms.
_T1, _T2, _T3, _T4, _G1, _G2 = range(6)


class OdeProblem:
    """A third-order ODE right-hand side with the nondegeneracy F_qq ≠ 0.

    Inputs are expected in the normal form in which the second-derivative
    coefficient has no additive shift in p (sigma = 0); the toolkit checks
    and rejects rather than transforms (see ``family_detect``).
    """

    sigma_normal_form_assumed = True

    def __init__(self, rhs, table):
        if rhs.chart is not J2_CHART:
            rhs = rhs.on_chart(J2_CHART)
        fqq = rhs.differentiate("q").differentiate("q")
        if fqq.is_zero:
            raise DegenerateOdeError("F_qq is identically zero")
        self.F = rhs
        self.Fqq = fqq
        self.table = table
        self._cache = {}

    @property
    def family_form_detected(self):
        def probe():
            try:
                family_detect(self)
                return True
            except FamilyRejectionError:
                return False

        return self._memo("family_form_detected", probe)

    def _memo(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    def coframe(self):
        return self._memo("coframe", lambda: invariant_coframe(self))

    def structure(self):
        return self._memo("structure", lambda: structure_functions(self))

    def tau(self):
        return self._memo("tau", lambda: tau_basis(self.coframe()))


def invariant_K(prob):
    """The scalar K built from the first and second partials of F."""
    F = prob.F
    Fq = F.differentiate("q")
    p = Expression.coordinate("p", F.chart, prob.table)
    q = Expression.coordinate("q", F.chart, prob.table)
    return (
        SIXTH
        * (
            Fq.differentiate("x")
            + p * Fq.differentiate("y")
            + q * Fq.differentiate("p")
            + F * F.differentiate("q").differentiate("q")
        )
        - Fraction(1, 9) * Fq * Fq
        - HALF * F.differentiate("p")
    )


def base_coframe(prob, chart=J2_CHART):
    """The four contact forms of the ODE on the second jet space."""
    table = prob.table
    F = prob.F.on_chart(chart)
    dx = DifferentialForm.d_coord(chart, table, "x")
    dy = DifferentialForm.d_coord(chart, table, "y")
    dp = DifferentialForm.d_coord(chart, table, "p")
    dq = DifferentialForm.d_coord(chart, table, "q")
    p = Expression.coordinate("p", chart, table)
    q = Expression.coordinate("q", chart, table)
    return (
        dy - dx.scale(p),
        dp - dx.scale(q),
        dq - dx.scale(F),
        dx,
    )


def invariant_coframe(prob, printed_display=False):
    """The six invariant 1-forms on the chart (x, y, p, q, alpha, gamma).

    Two display readings of the third form and the first connection form
    circulate; only one satisfies the structure-equation pattern, and the
    consistency check in ``structure_functions`` is the arbiter.  The
    default implements the reading that passes:

      * the third form carries the square of F_qq in its prefactor and
        groups the middle coefficient as (gamma - F_q/3);
      * the first connection form ends in  d(alpha)/alpha - gamma dx.

    ``printed_display=True`` builds the other reading (F_qq unsquared,
    (gamma - 1/3)F_q, and a -(gamma/alpha) d(alpha) tail); it exists so the
    tests can demonstrate that it fails the consistency check.
    """
    table = prob.table
    chart = P_CHART
    F = prob.F.on_chart(chart)
    w1, w2, w3, w4 = base_coframe(prob, chart)
    dalpha = DifferentialForm.d_coord(chart, table, "alpha")
    dgamma = DifferentialForm.d_coord(chart, table, "gamma")
    alpha = Expression.coordinate("alpha", chart, table)
    gamma = Expression.coordinate("gamma", chart, table)

    Fq = F.differentiate("q")
    Fp = F.differentiate("p")
    Fqq = Fq.differentiate("q")
    Fqy = Fq.differentiate("y")
    Fqqq = Fqq.differentiate("q")
    Fqqp = Fqq.differentiate("p")
    Fqqy = Fqq.differentiate("y")
    K = invariant_K(prob).on_chart(chart)
    Kq = K.differentiate("q")
    Kp = K.differentiate("p")

    theta1 = w1.scale(alpha)
    theta2 = (w2 + w1.scale(gamma)).scale(SIXTH * Fqq)

    if printed_display:
        theta3_prefactor = Fqq / (36 * alpha)
        theta3_mid = (gamma - THIRD) * Fq
    else:
        theta3_prefactor = Fqq * Fqq / (36 * alpha)
        theta3_mid = gamma - THIRD * Fq
    theta3 = (
        w3 + w2.scale(theta3_mid) + w1.scale(HALF * gamma * gamma + K)
    ).scale(theta3_prefactor)

    theta4 = w4.scale(6 * alpha / Fqq)

    omega1_w1 = (
        -Fqqq * gamma * gamma
        + (Fraction(2, 3) * Fqqq * Fq + THIRD * Fqq * Fqq + 2 * Fqqp) * gamma
        + Fqq * Kq
        + 2 * Fqqq * K
        - 2 * Fqqy
    ) / Fqq
    if printed_display:
        omega1 = w1.scale(omega1_w1) - dalpha.scale(gamma / alpha)
    else:
        omega1 = w1.scale(omega1_w1) - w4.scale(gamma) + dalpha.scale(1 / alpha)

    omega2 = (
        w4.scale(-(SIXTH / alpha) * Fqq * (HALF * gamma * gamma + THIRD * Fq * gamma + K))
        + w2.scale(
            (SIXTH / alpha)
            * (-HALF * Fqqq * gamma * gamma + (THIRD * Fqqq * Fq + Fqqp) * gamma + Fqqq * K - Fqqy)
        )
        + w1.scale(
            (SIXTH / alpha)
            * (
                -HALF * Fqqq * gamma ** 3
                + (SIXTH * Fqq * Fqq + THIRD * Fqqq * Fq + Fqqp) * gamma * gamma
                + (Fqq * Kq - Fqqy + Fqqq * K) * gamma
                - THIRD * Fqq * Fqy
                - Fqq * Kp
                - THIRD * Fqq * Fq * Kq
                + THIRD * Fqq * Fqq * K
            )
        )
        + dgamma.scale(SIXTH * Fqq / alpha)
    )

    return Coframe([theta1, theta2, theta3, theta4, omega1, omega2])


# Expected pattern of the coframe differentials: for each of the six
# exterior derivatives, the coefficient of basis_i ∧ basis_j (i < j) is an
# affine function  const + Σ mult · invariant.  Slots not listed are zero.
_AFFINE = lambda const=0, **mults: (Fraction(const), {k: Fraction(v) for k, v in mults.items()})

STRUCTURE_PATTERN = {
    0: {
        (_T1, _G1): _AFFINE(-1),
        (_T2, _T4): _AFFINE(-1),
    },
    1: {
        (_T1, _G2): _AFFINE(-1),
        (_T2, _T3): _AFFINE(a=-1),
        (_T2, _T4): _AFFINE(b=-1),
        (_T3, _T4): _AFFINE(-1),
    },
    2: {
        (_T2, _G2): _AFFINE(-1),
        (_T3, _G1): _AFFINE(1),
        (_T2, _T3): _AFFINE(-2, c=2),
        (_T1, _T4): _AFFINE(e=-1),
        (_T3, _T4): _AFFINE(b=-2),
    },
    3: {
        (_T4, _G1): _AFFINE(-1),
        (_T1, _T4): _AFFINE(f=-1),
        (_T2, _T4): _AFFINE(2, c=-1),
        (_T3, _T4): _AFFINE(a=-1),
    },
    4: {
        (_T1, _G2): _AFFINE(2, c=-2),
        (_T4, _G2): _AFFINE(1),
        (_T1, _T2): _AFFINE(g=1),
        (_T1, _T3): _AFFINE(h=1),
        (_T1, _T4): _AFFINE(k=1),
        (_T2, _T4): _AFFINE(f=-1),
    },
    5: {
        (_G1, _G2): _AFFINE(-1),
        (_T3, _G2): _AFFINE(a=1),
        (_T4, _G2): _AFFINE(b=1),
        (_T1, _T2): _AFFINE(l=1),
        (_T1, _T3): _AFFINE(m=1),
        (_T1, _T4): _AFFINE(n=1),
        (_T2, _T3): _AFFINE(r=1),
        (_T2, _T4): _AFFINE(s=1),
        (_T3, _T4): _AFFINE(f=-1),
    },
}

# Slot that defines each invariant during extraction (equation, slot, solver)
_DEFINING_SLOTS = {
    "a": (1, (_T2, _T3), lambda v: -v),
    "b": (1, (_T2, _T4), lambda v: -v),
    "c": (3, (_T2, _T4), lambda v: 2 - v),
    "e": (2, (_T1, _T4), lambda v: -v),
    "f": (3, (_T1, _T4), lambda v: -v),
    "g": (4, (_T1, _T2), lambda v: v),
    "h": (4, (_T1, _T3), lambda v: v),
    "k": (4, (_T1, _T4), lambda v: v),
    "l": (5, (_T1, _T2), lambda v: v),
    "m": (5, (_T1, _T3), lambda v: v),
    "n": (5, (_T1, _T4), lambda v: v),
    "r": (5, (_T2, _T3), lambda v: v),
    "s": (5, (_T2, _T4), lambda v: v),
}


@dataclass(frozen=True)
class StructureFunctions:
    """The thirteen scalar invariants, as expressions on the 6-chart."""

    a: Expression
    b: Expression
    c: Expression
    e: Expression
    f: Expression
    g: Expression
    h: Expression
    k: Expression
    l: Expression
    m: Expression
    n: Expression
    r: Expression
    s: Expression

    def as_dict(self):
        return {name: getattr(self, name) for name in STRUCTURE_NAMES}

    def all_zero(self):
        return all(getattr(self, name).is_zero for name in STRUCTURE_NAMES)


def expand_coframe_derivatives(cf):
    """Expansion tables of d(form_i) in the coframe 2-form basis."""
    return [cf.expand_2(f.exterior_derivative()) for f in cf.forms]


def structure_functions(prob, coframe=None, expansions=None):
    """Extract a..s and verify the full overdetermined pattern.

    Raises StructureConsistencyError when any of the ninety coefficient
    slots disagrees with the pattern; a mismatch means the coframe in use
    does not satisfy its defining structure equations.
    """
    cf = coframe if coframe is not None else prob.coframe()
    tables = expansions if expansions is not None else expand_coframe_derivatives(cf)
    zero = Expression.number(0, cf.chart, cf.table)

    values = {}
    for name, (eq, slot, solve) in _DEFINING_SLOTS.items():
        values[name] = solve(tables[eq].get(slot, zero))

    mismatches = []
    for eq in range(6):
        pattern = STRUCTURE_PATTERN[eq]
        for i in range(6):
            for j in range(i + 1, 6):
                actual = tables[eq].get((i, j), zero)
                const, mults = pattern.get((i, j), (Fraction(0), {}))
                expected = zero + const
                for name, mult in mults.items():
                    expected = expected + mult * values[name]
                residual = actual - expected
                if not residual.is_zero:
                    mismatches.append(((eq, i, j), residual))
    if mismatches:
        (eq, i, j), res = mismatches[0]
        raise StructureConsistencyError(
            f"{len(mismatches)} slot(s) off the structure pattern; first: "
            f"equation {eq}, slot ({i},{j}), residual {res.render()}"
        )
    return StructureFunctions(**values)


@dataclass(frozen=True)
class TauBasis:
    """The null-adapted basis: four horizontal forms and two connection forms."""

    forms: tuple  # (tau1, tau2, tau3, tau4, gamma1, gamma2)

    @property
    def taus(self):
        return self.forms[:4]

    @property
    def gammas(self):
        return self.forms[4:]

    def coframe(self):
        return Coframe(list(self.forms))


def tau_basis(cf):
    """Constant-coefficient change of basis to the null-adapted coframe."""
    th1, th2, th3, th4, om1, om2 = cf.forms
    return TauBasis(
        (
            th1.scale(2) + th4,
            om2,
            om2 + th3.scale(2),
            th4,
            om1,
            om1 + th2.scale(2),
        )
    )


def tau_from_theta_residuals(cf, tau):
    """Round trip tau-basis -> original coframe; all residuals must vanish."""
    t1, t2, t3, t4, g1, g2 = tau.forms
    th1, th2, th3, th4, om1, om2 = cf.forms
    return [
        (t1 - t4).scale(HALF) - th1,
        (g2 - g1).scale(HALF) - th2,
        (t3 - t2).scale(HALF) - th3,
        t4 - th4,
        g1 - om1,
        t2 - om2,
    ]


@dataclass(frozen=True)
class ConditionVerdict:
    name: str
    residual: Expression

    @property
    def holds(self):
        return self.residual.is_zero


@dataclass(frozen=True)
class ConditionReport:
    """The ten scalar conditions under which the coframe differentials
    reduce to a metric connection with horizontal curvature."""

    verdicts: tuple

    @property
    def all_hold(self):
        return all(v.holds for v in self.verdicts)

    def as_dict(self):
        return {v.name: v for v in self.verdicts}


def check_einstein_conditions(sf):
    named = [
        ("c = 0", sf.c),
        ("l = 0", sf.l),
        ("r = 0", sf.r),
        ("s = 0", sf.s),
        ("m = 0", sf.m),
        ("a = 0", sf.a),
        ("g = 0", sf.g),
        ("f + b = 0", sf.f + sf.b),
        ("b = 0", sf.b),
        ("h = 0", sf.h),
    ]
    return ConditionReport(tuple(ConditionVerdict(n, r) for n, r in named))


# -- the cubic family -------------------------------------------------------


@dataclass(frozen=True)
class FamilyData:
    """Right-hand side of the reducible form
    (3/2) q^2/p + A(x,y) p^3 + C(x,y) p^2 + B(x,y) p."""

    problem: OdeProblem
    A: Expression
    B: Expression
    C: Expression

    def coefficients_on(self, chart):
        return (
            self.A.on_chart(chart),
            self.B.on_chart(chart),
            self.C.on_chart(chart),
        )


def _depends_on(e, *coords):
    return any(not e.differentiate(c).is_zero for c in coords)


def family_detect(prob):
    """Match F against the reducible cubic form, or raise with a reason.

    Detection is syntactic on the canonical form; an additive shift
    sigma(x,y) in the denominator p + sigma is reported, never removed.
    """
    F = prob.F
    table = prob.table
    q = Expression.coordinate("q", J2_CHART, table)
    p = Expression.coordinate("p", J2_CHART, table)

    S = prob.Fqq
    if _depends_on(S, "q"):
        raise FamilyRejectionError(
            FamilyRejectionError.WRONG_Q_DEPENDENCE,
            "F is not quadratic in q",
        )
    shift = 3 / S - p
    if not shift.is_zero:
        if _depends_on(shift, "p", "q"):
            raise FamilyRejectionError(
                FamilyRejectionError.WRONG_Q_DEPENDENCE,
                "the q^2 coefficient is not 3/(2p)",
            )
        raise FamilyRejectionError(
            FamilyRejectionError.SIGMA_TERM_PRESENT,
            f"sigma = {shift.render()} has not been normalized away",
        )
    linear = F.differentiate("q") - S * q
    if not linear.is_zero:
        raise FamilyRejectionError(
            FamilyRejectionError.WRONG_Q_DEPENDENCE,
            "a term linear in q is present",
        )
    R = F - Fraction(3, 2) * q * q / p

    A = SIXTH * R.differentiate("p").differentiate("p").differentiate("p")
    if _depends_on(A, "p", "q"):
        raise FamilyRejectionError(
            FamilyRejectionError.COEFFICIENT_DEPENDS_ON_PQ,
            "the cubic coefficient depends on p or q",
        )
    C = HALF * (R.differentiate("p").differentiate("p") - 6 * A * p)
    if _depends_on(C, "p", "q"):
        raise FamilyRejectionError(
            FamilyRejectionError.COEFFICIENT_DEPENDS_ON_PQ,
            "the quadratic coefficient depends on p or q",
        )
    B = R.differentiate("p") - 3 * A * p * p - 2 * C * p
    if _depends_on(B, "p", "q"):
        raise FamilyRejectionError(
            FamilyRejectionError.COEFFICIENT_DEPENDS_ON_PQ,
            "the linear coefficient depends on p or q",
        )
    if not (R - (A * p ** 3 + C * p * p + B * p)).is_zero:
        raise FamilyRejectionError(
            FamilyRejectionError.COEFFICIENT_DEPENDS_ON_PQ,
            "a remainder term outside A p^3 + C p^2 + B p is present",
        )
    return FamilyData(prob, A, B, C)


def adapted_chart_map(table):
    """Substitution realizing the re-coordinatization gamma = z p,
    q = p (t - z p) of the 6-chart."""
    z = Expression.coordinate("z", M_ADAPTED_CHART, table)
    t = Expression.coordinate("t", M_ADAPTED_CHART, table)
    p = Expression.coordinate("p", M_ADAPTED_CHART, table)
    return {"gamma": z * p, "q": p * (t - z * p)}


def to_adapted(obj, table):
    """Pull a P-chart expression or form over to the adapted chart."""
    mapping = adapted_chart_map(table)
    if isinstance(obj, DifferentialForm):
        return obj.pullback(mapping, M_ADAPTED_CHART)
    return obj.substitute(mapping, M_ADAPTED_CHART)


@dataclass(frozen=True)
class KneInvariants:
    """The three surviving invariants of the cubic family, on the adapted
    chart where their closed forms live."""

    k: Expression
    n: Expression
    e: Expression

    def as_dict(self):
        return {"k": self.k, "n": self.n, "e": self.e}

    def all_zero(self):
        return self.k.is_zero and self.n.is_zero and self.e.is_zero


def family_invariants(fd):
    """Closed forms of k, n, e in the coordinates (x, y, z, t, alpha, p)."""
    table = fd.problem.table
    chart = M_ADAPTED_CHART
    A, B, C = fd.coefficients_on(chart)
    alpha = Expression.coordinate("alpha", chart, table)
    p = Expression.coordinate("p", chart, table)
    z = Expression.coordinate("z", chart, table)
    t = Expression.coordinate("t", chart, table)
    k = -C / (4 * alpha ** 2 * p)
    n = (C.differentiate("y") - z * C - 2 * A.differentiate("x")) / (8 * alpha ** 3 * p)
    e = HALF * n + (t * C + 2 * B.differentiate("y") - C.differentiate("x")) / (
        16 * alpha ** 3 * p * p
    )
    return KneInvariants(k, n, e)


def family_invariants_residuals(fd, sf=None):
    """Closed forms minus the general extraction, pulled to the adapted
    chart; all three must vanish."""
    sf = sf if sf is not None else fd.problem.structure()
    table = fd.problem.table
    kne = family_invariants(fd)
    return {
        "k": to_adapted(sf.k, table) - kne.k,
        "n": to_adapted(sf.n, table) - kne.n,
        "e": to_adapted(sf.e, table) - kne.e,
    }


# -- full and reduced differential tables -----------------------------------

# Exact transcription of the closed-form differentials of the tau basis for
# arbitrary admissible F.  Entries: (affine coefficient, left, right) for
# coefficient · basis_left ∧ basis_right.
APPENDIX_TABLE = {
    _T1: [
        (_AFFINE(1), _G1, _T1),
        (_AFFINE(c=HALF), _G1, _T4),
        (_AFFINE(c=-HALF), _G2, _T4),
        (_AFFINE(f=HALF), _T4, _T1),
        (_AFFINE(a=-HALF), _T4, _T2),
        (_AFFINE(a=HALF), _T4, _T3),
    ],
    _T2: [
        (_AFFINE(l=Fraction(1, 4)), _G1, _T1),
        (_AFFINE(-1, r=Fraction(1, 4)), _G1, _T2),
        (_AFFINE(r=Fraction(-1, 4)), _G1, _T3),
        (_AFFINE(l=Fraction(-1, 4), s=-HALF), _G1, _T4),
        (_AFFINE(l=Fraction(-1, 4)), _G2, _T1),
        (_AFFINE(r=Fraction(-1, 4)), _G2, _T2),
        (_AFFINE(r=Fraction(1, 4)), _G2, _T3),
        (_AFFINE(l=Fraction(1, 4), s=HALF), _G2, _T4),
        (_AFFINE(m=Fraction(1, 4)), _T2, _T1),
        (_AFFINE(m=Fraction(-1, 4)), _T3, _T1),
        (_AFFINE(n=-HALF), _T4, _T1),
        (_AFFINE(a=HALF), _T3, _T2),
        (_AFFINE(m=Fraction(1, 4), f=-HALF, b=1), _T4, _T2),
        (_AFFINE(f=HALF, m=Fraction(-1, 4)), _T4, _T3),
    ],
    _T3: [
        (_AFFINE(l=Fraction(1, 4)), _G1, _T1),
        (_AFFINE(c=1, r=Fraction(1, 4)), _G1, _T2),
        (_AFFINE(c=-1, r=Fraction(-1, 4)), _G1, _T3),
        (_AFFINE(l=Fraction(-1, 4), s=-HALF), _G1, _T4),
        # sign forced by the structure equations (mirrors the second row's
        # -l/4 entry); see tests/test_cartan.py::test_appendix_is_derived
        (_AFFINE(l=Fraction(-1, 4)), _G2, _T1),
        (_AFFINE(c=-1, r=Fraction(-1, 4)), _G2, _T2),
        (_AFFINE(-1, c=1, r=Fraction(1, 4)), _G2, _T3),
        (_AFFINE(l=Fraction(1, 4), s=HALF), _G2, _T4),
        (_AFFINE(m=Fraction(1, 4)), _T2, _T1),
        (_AFFINE(m=Fraction(-1, 4)), _T3, _T1),
        (_AFFINE(e=1, n=-HALF), _T4, _T1),
        (_AFFINE(a=HALF), _T3, _T2),
        (_AFFINE(m=Fraction(1, 4), b=-1, f=-HALF), _T4, _T2),
        (_AFFINE(b=2, f=HALF, m=Fraction(-1, 4)), _T4, _T3),
    ],
    _T4: [
        (_AFFINE(c=HALF), _G1, _T4),
        (_AFFINE(1, c=-HALF), _G2, _T4),
        (_AFFINE(f=HALF), _T4, _T1),
        (_AFFINE(a=-HALF), _T4, _T2),
        (_AFFINE(a=HALF), _T4, _T3),
    ],
    _G1: [
        (_AFFINE(g=Fraction(1, 4)), _G1, _T1),
        (_AFFINE(f=HALF, g=Fraction(-1, 4)), _G1, _T4),
        (_AFFINE(g=Fraction(-1, 4)), _G2, _T1),
        (_AFFINE(g=Fraction(1, 4), f=-HALF), _G2, _T4),
        (_AFFINE(-1, h=Fraction(1, 4), c=1), _T2, _T1),
        (_AFFINE(h=Fraction(-1, 4)), _T3, _T1),
        (_AFFINE(k=-HALF), _T4, _T1),
        (_AFFINE(h=Fraction(1, 4), c=1), _T4, _T2),
        (_AFFINE(h=Fraction(-1, 4)), _T4, _T3),
    ],
    _G2: [
        (_AFFINE(g=Fraction(1, 4)), _G1, _T1),
        (_AFFINE(a=-HALF), _G1, _T2),
        (_AFFINE(a=HALF), _G1, _T3),
        (_AFFINE(b=1, f=HALF, g=Fraction(-1, 4)), _G1, _T4),
        (_AFFINE(g=Fraction(-1, 4)), _G2, _T1),
        (_AFFINE(a=HALF), _G2, _T2),
        (_AFFINE(a=-HALF), _G2, _T3),
        (_AFFINE(g=Fraction(1, 4), b=-1, f=-HALF), _G2, _T4),
        (_AFFINE(h=Fraction(1, 4), c=1), _T2, _T1),
        (_AFFINE(h=Fraction(-1, 4)), _T3, _T1),
        (_AFFINE(k=-HALF), _T4, _T1),
        (_AFFINE(h=Fraction(1, 4), c=1), _T4, _T2),
        (_AFFINE(1, h=Fraction(-1, 4)), _T4, _T3),
    ],
}

# Differentials once the ten reduction conditions hold.
REDUCED_TABLE = {
    _T1: [(_AFFINE(1), _G1, _T1)],
    _T2: [(_AFFINE(-1), _G1, _T2), (_AFFINE(n=HALF), _T1, _T4)],
    _T3: [(_AFFINE(-1), _G2, _T3), (_AFFINE(n=HALF, e=-1), _T1, _T4)],
    _T4: [(_AFFINE(1), _G2, _T4)],
    _G1: [(_AFFINE(1), _T1, _T2), (_AFFINE(k=HALF), _T1, _T4)],
    _G2: [(_AFFINE(k=HALF), _T1, _T4), (_AFFINE(-1), _T3, _T4)],
}

# Differentials of the maximally symmetric model (all invariants zero),
# exhibiting the product Lie-algebra structure.
FLAT_TABLE = {
    _T1: [(_AFFINE(1), _G1, _T1)],
    _T2: [(_AFFINE(-1), _G1, _T2)],
    _T3: [(_AFFINE(-1), _G2, _T3)],
    _T4: [(_AFFINE(1), _G2, _T4)],
    _G1: [(_AFFINE(1), _T1, _T2)],
    _G2: [(_AFFINE(1), _T4, _T3)],
}


def _table_rhs(table_rows, tau, sf_values):
    chart = tau.forms[0].chart
    symtable = tau.forms[0].table
    zero_expr = Expression.number(0, chart, symtable)
    out = DifferentialForm.zero(chart, symtable, 2)
    for (const, mults), left, right in table_rows:
        coeff = zero_expr + const
        for name, mult in mults.items():
            coeff = coeff + mult * sf_values[name]
        if coeff.is_zero:
            continue
        out = out + tau.forms[left].wedge(tau.forms[right]).scale(coeff)
    return out


def differential_residuals(tau, table, sf=None):
    """d(basis_i) minus the tabulated right-hand side, for each basis form.

    ``sf`` supplies the invariant values; pass None for an all-zero table
    (the flat case).  Works on whichever chart the tau forms live on.
    """
    chart = tau.forms[0].chart
    symtable = tau.forms[0].table
    zero = Expression.number(0, chart, symtable)
    values = {name: zero for name in STRUCTURE_NAMES}
    if sf is not None:
        for name, v in sf.as_dict().items():
            if v.chart is not chart:
                raise ChartError("invariant values must live on the tau chart")
            values[name] = v
    out = []
    for i in range(6):
        rhs = _table_rhs(table[i], tau, values)
        out.append(tau.forms[i].exterior_derivative() - rhs)
    return out


def verify_appendix(prob, sf=None, tau=None):
    """Residuals of the six closed-form differentials for arbitrary F."""
    sf = sf if sf is not None else prob.structure()
    tau = tau if tau is not None else prob.tau()
    return differential_residuals(tau, APPENDIX_TABLE, sf)

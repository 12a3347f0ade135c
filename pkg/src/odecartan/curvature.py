"""Tensor calculus on the 4-manifold quotient.

Index conventions, frozen here and validated by the tests against the
structure-equation picture:

    Christoffel   G^i_jk = 1/2 g^il (d_j g_lk + d_k g_lj - d_l g_jk)
    Riemann       R^i_jkl = d_k G^i_lj - d_l G^i_kj + G^i_km G^m_lj - G^i_lm G^m_kj
    Ricci         Ric_ij = R^k_ikj
    Weyl          trace correction with 1/2 and 1/6 in four dimensions

The quotient metric of the cubic family is split signature with unit
determinant, Einstein with cosmological constant -1.
"""

from dataclasses import dataclass
from fractions import Fraction

from .cartan import HALF, TauBasis, adapted_chart_map
from .errors import ChartError, SingularEvaluationError
from .expression import Expression
from .forms import DifferentialForm
from .linalg import invert_matrix
from .symbols import METRIC_CHART, M_ADAPTED_CHART

DIM = 4


class Metric4:
    """Symmetric nondegenerate metric on the chart (x, y, z, t)."""

    __slots__ = ("chart", "table", "g", "ginv", "det")

    def __init__(self, components, table):
        chart = METRIC_CHART
        for i in range(DIM):
            for j in range(DIM):
                if not (components[i][j] - components[j][i]).is_zero:
                    raise ChartError("metric components must be symmetric")
        self.chart = chart
        self.table = table
        self.g = [[components[i][j] for j in range(DIM)] for i in range(DIM)]
        self.ginv, self.det = invert_matrix(self.g)

    def evaluate(self, point):
        return [[self.g[i][j].evaluate(point) for j in range(DIM)] for i in range(DIM)]

    def evaluate_inverse(self, point):
        return [[self.ginv[i][j].evaluate(point) for j in range(DIM)] for i in range(DIM)]

    def signature_at(self, point):
        """(positive, negative) inertia from leading principal minors.

        Requires every leading minor to be nonzero at the point (Jacobi's
        criterion); raises otherwise.
        """
        gp = self.evaluate(point)
        minors = [Fraction(1)]
        for k in range(1, DIM + 1):
            minors.append(_frac_det([row[:k] for row in gp[:k]]))
        if any(m == 0 for m in minors[1:]):
            raise SingularEvaluationError("a leading principal minor vanishes at the point")
        changes = sum(1 for i in range(DIM) if minors[i] * minors[i + 1] < 0)
        return DIM - changes, changes


def _frac_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = Fraction(0)
    sign = 1
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total += sign * m[0][j] * _frac_det(minor)
        sign = -sign
    return total


def family_metric(fd):
    """The quotient metric of the cubic family on (x, y, z, t);
    the quadratic coefficient C drops out entirely."""
    table = fd.problem.table
    chart = METRIC_CHART
    A, B, _ = fd.coefficients_on(chart)
    z = Expression.coordinate("z", chart, table)
    t = Expression.coordinate("t", chart, table)
    zero = Expression.number(0, chart, table)
    one = Expression.number(1, chart, table)
    g = [[zero for _ in range(DIM)] for _ in range(DIM)]
    g[0][0] = -(t * t + 2 * B)
    g[0][3] = g[3][0] = one
    g[1][1] = 2 * A - z * z
    g[1][2] = g[2][1] = one
    return Metric4(g, table)


@dataclass(frozen=True)
class ProjectabilityReport:
    """Evidence that the degenerate bilinear form on the 6-space descends
    to the displayed quotient metric."""

    vertical_residuals: tuple   # components along d(alpha), d(p)
    invariance_residuals: tuple  # alpha- and p-derivatives of all components
    match_residuals: tuple       # 4x4 block minus the displayed metric

    @property
    def projects(self):
        return all(
            r.is_zero
            for group in (self.vertical_residuals, self.invariance_residuals, self.match_residuals)
            for r in group
        )


def tilde_metric_components(fd):
    """The bilinear form 2 tau1 tau2 + 2 tau3 tau4 on the adapted 6-chart."""
    prob = fd.problem
    tau = adapted_tau(prob)
    n = M_ADAPTED_CHART.dim
    zero = Expression.number(0, M_ADAPTED_CHART, prob.table)

    def comp(form, axis):
        return form.comps.get((axis,), zero)

    t1, t2, t3, t4 = tau.forms[:4]
    out = [[zero for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            out[a][b] = (
                comp(t1, a) * comp(t2, b)
                + comp(t2, a) * comp(t1, b)
                + comp(t3, a) * comp(t4, b)
                + comp(t4, a) * comp(t3, b)
            )
    return out


def adapted_tau(prob):
    """Tau basis pulled over to the chart (x, y, z, t, alpha, p), cached."""

    def build():
        mapping = adapted_chart_map(prob.table)
        return TauBasis(tuple(f.pullback(mapping, M_ADAPTED_CHART) for f in prob.tau().forms))

    return prob._memo("adapted_tau", build)


def metric_from_family(fd):
    """Displayed quotient metric plus the projectability evidence."""
    prob = fd.problem
    table = prob.table
    gt = tilde_metric_components(fd)
    n = M_ADAPTED_CHART.dim
    vertical_axes = (M_ADAPTED_CHART.axis("alpha"), M_ADAPTED_CHART.axis("p"))

    vertical = []
    for a in range(n):
        for b in range(n):
            if a in vertical_axes or b in vertical_axes:
                vertical.append(gt[a][b])
    invariance = []
    for a in range(n):
        for b in range(a, n):
            invariance.append(gt[a][b].differentiate("alpha"))
            invariance.append(gt[a][b].differentiate("p"))

    metric = family_metric(fd)
    match = []
    for i in range(DIM):
        for j in range(DIM):
            displayed = metric.g[i][j].on_chart(M_ADAPTED_CHART)
            match.append(gt[i][j] - displayed)

    report = ProjectabilityReport(tuple(vertical), tuple(invariance), tuple(match))
    return metric, report


@dataclass(frozen=True)
class CurvatureTensors:
    christoffel: tuple   # [i][j][k] upper, lower, lower (symmetric in j,k)
    riemann_up: tuple    # [i][j][k][l]
    riemann_down: tuple  # [i][j][k][l]
    ricci: tuple         # [i][j]
    scalar: Expression
    weyl_down: tuple     # [i][j][k][l]


def curvature_tensors(metric):
    g = metric.g
    ginv = metric.ginv
    zero = Expression.number(0, metric.chart, metric.table)
    coords = metric.chart.coords

    dg = [
        [[g[i][j].differentiate(coords[k]) for k in range(DIM)] for j in range(DIM)]
        for i in range(DIM)
    ]

    chr_ = [[[zero for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)]
    for i in range(DIM):
        for j in range(DIM):
            for k in range(j, DIM):
                acc = zero
                for l in range(DIM):
                    if ginv[i][l].is_zero:
                        continue
                    acc = acc + ginv[i][l] * (dg[l][k][j] + dg[l][j][k] - dg[j][k][l])
                val = HALF * acc
                chr_[i][j][k] = val
                chr_[i][k][j] = val

    dchr = [
        [
            [[chr_[i][j][k].differentiate(coords[m]) for m in range(DIM)] for k in range(DIM)]
            for j in range(DIM)
        ]
        for i in range(DIM)
    ]

    riem = [[[[zero for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)]
    for i in range(DIM):
        for j in range(DIM):
            for k in range(DIM):
                for l in range(k + 1, DIM):
                    acc = dchr[i][l][j][k] - dchr[i][k][j][l]
                    for m in range(DIM):
                        acc = acc + chr_[i][k][m] * chr_[m][l][j] - chr_[i][l][m] * chr_[m][k][j]
                    riem[i][j][k][l] = acc
                    riem[i][j][l][k] = -acc

    riem_down = [
        [
            [
                [
                    sum((g[i][m] * riem[m][j][k][l] for m in range(DIM) if not g[i][m].is_zero), zero)
                    for l in range(DIM)
                ]
                for k in range(DIM)
            ]
            for j in range(DIM)
        ]
        for i in range(DIM)
    ]

    ricci = [[zero for _ in range(DIM)] for _ in range(DIM)]
    for i in range(DIM):
        for j in range(DIM):
            acc = zero
            for k in range(DIM):
                acc = acc + riem[k][i][k][j]
            ricci[i][j] = acc

    scalar = zero
    for i in range(DIM):
        for j in range(DIM):
            if not ginv[i][j].is_zero:
                scalar = scalar + ginv[i][j] * ricci[i][j]

    weyl = [[[[zero for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)]
    sixth_scalar = scalar * Fraction(1, 6)
    for i in range(DIM):
        for j in range(DIM):
            for k in range(DIM):
                for l in range(k + 1, DIM):
                    acc = (
                        riem_down[i][j][k][l]
                        - HALF
                        * (
                            g[i][k] * ricci[j][l]
                            - g[i][l] * ricci[j][k]
                            + g[j][l] * ricci[i][k]
                            - g[j][k] * ricci[i][l]
                        )
                        + sixth_scalar * (g[i][k] * g[j][l] - g[i][l] * g[j][k])
                    )
                    weyl[i][j][k][l] = acc
                    weyl[i][j][l][k] = -acc

    return CurvatureTensors(
        christoffel=_freeze(chr_),
        riemann_up=_freeze(riem),
        riemann_down=_freeze(riem_down),
        ricci=_freeze(ricci),
        scalar=scalar,
        weyl_down=_freeze(weyl),
    )


def _freeze(nested):
    if isinstance(nested, list):
        return tuple(_freeze(x) for x in nested)
    return nested


def einstein_residual(metric, tensors=None, cosmological=Fraction(-1)):
    """Ric_ij - Lambda g_ij; identically zero for the family metrics at
    Lambda = -1."""
    if tensors is None:
        tensors = curvature_tensors(metric)
    return tuple(
        tuple(tensors.ricci[i][j] - cosmological * metric.g[i][j] for j in range(DIM))
        for i in range(DIM)
    )


def first_bianchi_residuals(tensors):
    out = []
    for i in range(DIM):
        for j in range(DIM):
            for k in range(DIM):
                for l in range(DIM):
                    out.append(
                        tensors.riemann_down[i][j][k][l]
                        + tensors.riemann_down[i][k][l][j]
                        + tensors.riemann_down[i][l][j][k]
                    )
    return out


def weyl_trace_residuals(metric, tensors):
    """All contractions of the Weyl tensor with the inverse metric."""
    zero = Expression.number(0, metric.chart, metric.table)
    out = []
    for j in range(DIM):
        for l in range(DIM):
            acc = zero
            for i in range(DIM):
                for k in range(DIM):
                    if not metric.ginv[i][k].is_zero:
                        acc = acc + metric.ginv[i][k] * tensors.weyl_down[i][j][k][l]
            out.append(acc)
    return out

"""Pointwise 4-metric evaluation, hypersurface pullback, and 3-data geometry.

Conventions fixed here and inherited everywhere else:

* metric signature (-, +, +, +); coordinate 0 is the time-like chart
  coordinate (t or u) and future orientation means n_0 < 0 for the covariant
  unit normal;
* the second fundamental form of a slice with embedding Phi and future unit
  normal n is  h_ab = -n_alpha (d_a d_b Phi^alpha
  + Gamma^alpha_{beta gamma} d_a Phi^beta d_b Phi^gamma),
  which makes the unit hyperboloid t = sqrt(1 + r^2) in flat spacetime carry
  h = +g in the associated orthonormal frame;
* frame components of curvature are stored as
  riem[i][j][k][l] = < e_i, R(e_k, e_l) e_j >  with
  R(X, Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y],
  so constant curvature -1 gives riem = -(g_ik g_jl - g_il g_jk).

Frame vectors live on the 3-chart (r, theta, psi) as F[i][a] with
e_i = F[i][a] d_a; the pullback lifts them through the embedding differential.
Connection and curvature of 3-data are computed in frame components via the
Koszul formula with structure coefficients rather than chart Christoffels.
"""

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import jets
from .errors import DomainError
from .jets import Jet, djet, inv3, inv4, trunc1, value

__all__ = [
    "SpacetimePoint", "Metric4Evaluator", "Embedding", "FrameField",
    "InitialData", "ConstraintQuantities",
    "euclidean_frame", "hyperboloid_frame",
    "christoffel4", "ricci_tensor", "pullback_initial_data",
    "curvature3", "constraint_quantities", "rigidity_residual",
    "frame_geometry",
]


def _perms4():
    out = []
    for p in itertools.permutations(range(4)):
        sign = 1
        q = list(p)
        for i in range(4):
            while q[i] != i:
                j = q[i]
                q[i], q[j] = q[j], q[i]
                sign = -sign
        out.append((p, float(sign)))
    return out


_PERM4 = _perms4()


@dataclass(frozen=True)
class SpacetimePoint:
    chart: str
    coords: tuple  # x^0..x^3


def _coords_of(point):
    if isinstance(point, SpacetimePoint):
        return list(point.coords)
    return list(point)


def _d1(x, a):
    """First-derivative-of-jet as an order-1 jet; constants differentiate to 0."""
    if isinstance(x, Jet):
        return djet(x, a)
    return 0.0


def _grad(x, a):
    """Leaf value of the a-th first derivative (0 for constants)."""
    if isinstance(x, Jet):
        return value(x.d[a])
    return 0.0


def _jf(x):
    """Jet value one level down (identity on plain numbers)."""
    return x.f if isinstance(x, Jet) else x


def _jd(x, a):
    """Raw a-th first-derivative entry (0 for plain numbers)."""
    return x.d[a] if isinstance(x, Jet) else 0.0


def _jdd(x, a, b):
    return x.dd[a][b] if isinstance(x, Jet) else 0.0


@dataclass
class Metric4Evaluator:
    """Pure map from chart coordinates to the symmetric matrix g_{ab}.

    ``fn`` must be written in generic arithmetic (operators plus the
    admbondi.jets elementary functions) so that jet seeding yields exact
    first and second coordinate derivatives.
    """

    fn: Callable
    chart: str
    name: str
    domain: Optional[Callable] = None  # raises DomainError on bad coords

    def _check(self, coords):
        if self.domain is not None:
            self.domain([value(c) for c in coords])

    def components(self, point):
        coords = _coords_of(point)
        self._check(coords)
        g = self.fn(coords)
        return np.array([[value(g[a][b]) for b in range(4)] for a in range(4)])

    def jets(self, coords, order=1):
        """4x4 nested list of Jets over the four chart coordinates."""
        coords = list(coords)
        self._check(coords)
        return self.fn(jets.seed(coords, order=order))

    def first_derivs(self, point):
        """dg[c][a][b] = d_c g_{ab} at the point."""
        g = self.jets(_coords_of(point), order=1)
        return np.array([[[_grad(g[a][b], c) for b in range(4)]
                          for a in range(4)] for c in range(4)])

    def second_derivs(self, point):
        g = self.jets(_coords_of(point), order=2)
        return np.array([[[[value(g[a][b].dd[c][d]) if isinstance(g[a][b], Jet)
                            else 0.0 for b in range(4)]
                           for a in range(4)] for d in range(4)] for c in range(4)])

    def signature_ok(self, point):
        ev = np.linalg.eigvalsh(self.components(point))
        return bool(ev[0] < 0 and np.all(ev[1:] > 0))


@dataclass
class Embedding:
    """Map from the 3-chart (r, theta, psi) into a spacetime chart."""

    fn: Callable
    chart: str
    name: str

    def map(self, coords3):
        return [value(x) for x in self.fn(list(coords3))]

    def jets(self, coords3, order=2):
        return self.fn(jets.seed(list(coords3), order=order))


@dataclass
class FrameField:
    """Three vector fields on the 3-chart: e_i = components(c)[i][a] d_a."""

    components: Callable
    kind: str


def euclidean_frame():
    """The Cartesian coordinate frame d/dx^i written in polar coordinates."""
    def comp(c):
        r, th, ps = c
        st, ct = jets.sin(th), jets.cos(th)
        sp, cp = jets.sin(ps), jets.cos(ps)
        return [
            [st * cp, ct * cp / r, -1.0 * sp / (r * st)],
            [st * sp, ct * sp / r, cp / (r * st)],
            [ct, -1.0 * st / r, 0.0],
        ]
    return FrameField(comp, "euclidean")


def hyperboloid_frame():
    """Orthonormal frame of the hyperbolic background metric."""
    def comp(c):
        r, th, _ = c
        return [
            [jets.sqrt(1.0 + r * r), 0.0, 0.0],
            [0.0, 1.0 / r, 0.0],
            [0.0, 0.0, 1.0 / (r * jets.sin(th))],
        ]
    return FrameField(comp, "hyperboloid")


@dataclass
class ConstraintQuantities:
    mu: np.ndarray          # energy density
    varpi: np.ndarray       # momentum density, shape (3, ...)
    sigma: np.ndarray       # antisymmetry current, shape (3, ...)


@dataclass
class InitialData:
    """Evaluators of frame components g(e_i, e_j), p(e_i, e_j) on the 3-chart.

    ``gp`` must be generic over jet level; it returns a pair of 3x3 nested
    lists.  p need not be symmetric.
    """

    gp: Callable
    frame: FrameField
    symmetric_p: bool
    name: str = "data"

    def values(self, coords3):
        G, P = self.gp(list(coords3))
        g = np.array([[value(G[i][j]) for j in range(3)] for i in range(3)])
        p = np.array([[value(P[i][j]) for j in range(3)] for i in range(3)])
        return g, p

    def jets(self, coords3, order=2):
        return self.gp(jets.seed(list(coords3), order=order))


# ---------------------------------------------------------------------------
# 4D Christoffel symbols and curvature
# ---------------------------------------------------------------------------

def _christoffel_from(ginv, dg):
    """Gamma^a_{bc} from the inverse metric and dg[c][a][b] = d_c g_{ab}."""
    gam = [[[None] * 4 for _ in range(4)] for _ in range(4)]
    for b in range(4):
        for c in range(b, 4):
            col = [dg[b][d][c] + dg[c][d][b] - dg[d][b][c] for d in range(4)]
            for a in range(4):
                e = 0.5 * (ginv[a][0] * col[0] + ginv[a][1] * col[1]
                           + ginv[a][2] * col[2] + ginv[a][3] * col[3])
                gam[a][b][c] = e
                gam[a][c][b] = e
    return gam


def _det4_values(g):
    m = [[value(g[a][b]) for b in range(4)] for a in range(4)]
    s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1]
    s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2]
    s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3]
    s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2]
    s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3]
    s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3]
    c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3]
    c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3]
    c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2]
    c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3]
    c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2]
    c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1]
    return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0


def christoffel4(metric, point):
    """Levi-Civita connection coefficients Gamma^a_{bc} at a point."""
    coords = _coords_of(point)
    gj = metric.jets(coords, order=1)
    g = [[_jf(gj[a][b]) for b in range(4)] for a in range(4)]
    det = _det4_values(g)
    if np.any(np.abs(det) < 1e-14):
        raise DomainError(f"metric degenerate at {coords}")
    ginv = inv4(g)
    dg = [[[_grad(gj[a][b], c) for b in range(4)] for a in range(4)]
          for c in range(4)]
    gam = _christoffel_from([[value(x) for x in row] for row in ginv], dg)
    return np.array(gam)


def ricci_tensor(metric, point):
    """Ricci tensor from exact second derivatives of the metric."""
    coords = _coords_of(point)
    gj = metric.jets(coords, order=2)
    g = [[value(_jf(gj[a][b])) for b in range(4)] for a in range(4)]
    ginv = inv4(g)
    dg = [[[value(_jd(gj[a][b], c)) for b in range(4)] for a in range(4)]
          for c in range(4)]
    ddg = [[[[value(_jdd(gj[a][b], c, d)) for b in range(4)] for a in range(4)]
            for d in range(4)] for c in range(4)]
    dginv = [[[None] * 4 for _ in range(4)] for _ in range(4)]
    for m in range(4):
        tmp = [[sum(ginv[a][c] * dg[m][c][d] for c in range(4)) for d in range(4)]
               for a in range(4)]
        for a in range(4):
            for b in range(4):
                dginv[m][a][b] = -sum(tmp[a][d] * ginv[d][b] for d in range(4))
    gam = _christoffel_from(ginv, dg)
    dgam = [[[[None] * 4 for _ in range(4)] for _ in range(4)] for _ in range(4)]
    for m in range(4):
        for b in range(4):
            for c in range(b, 4):
                col0 = [dg[b][d][c] + dg[c][d][b] - dg[d][b][c] for d in range(4)]
                col1 = [ddg[m][b][d][c] + ddg[m][c][d][b] - ddg[m][d][b][c]
                        for d in range(4)]
                for a in range(4):
                    e = 0.5 * sum(dginv[m][a][d] * col0[d] + ginv[a][d] * col1[d]
                                  for d in range(4))
                    dgam[m][a][b][c] = e
                    dgam[m][a][c][b] = e
    ric = [[None] * 4 for _ in range(4)]
    for s in range(4):
        for n in range(s, 4):
            e = 0.0
            for m in range(4):
                e = e + dgam[m][m][n][s] - dgam[n][m][m][s]
                for lam in range(4):
                    e = e + gam[m][m][lam] * gam[lam][n][s] \
                        - gam[m][n][lam] * gam[lam][m][s]
            ric[s][n] = e
            ric[n][s] = e
    return np.array(ric)


# ---------------------------------------------------------------------------
# Pullback of (g, h) to a spacelike slice
# ---------------------------------------------------------------------------

def pullback_initial_data(metric, emb, frame, validate=True, name=None):
    """Induced metric and second fundamental form of an embedded slice.

    Returns an InitialData whose evaluator runs the whole chain (embedding
    jets, metric jets, normal, covariant Hessian) in generic arithmetic, so
    chart derivatives of the produced frame components are again exact.
    """
    if emb.chart != metric.chart:
        raise DomainError(
            f"embedding targets chart {emb.chart!r} but metric uses {metric.chart!r}")

    def gp(coords3):
        ej = emb.jets(coords3, order=2)
        phi = [_jf(e) for e in ej]
        dphi = [[_jd(ej[a], i) for i in range(3)] for a in range(4)]
        ddphi = [[[_jdd(ej[a], i, j) for j in range(3)] for i in range(3)]
                 for a in range(4)]
        metric._check(phi)
        gj = metric.fn(jets.seed(phi, order=1))
        g4 = [[_jf(gj[a][b]) for b in range(4)] for a in range(4)]
        dg4 = [[[_jd(gj[a][b], c) for b in range(4)] for a in range(4)]
               for c in range(4)]
        ginv = inv4(g4)
        gam = _christoffel_from(ginv, dg4)

        # conormal via the signed cross product of the coordinate tangents
        N = [0.0, 0.0, 0.0, 0.0]
        for (a, b, c, d), s in _PERM4:
            N[a] = N[a] + s * dphi[b][0] * dphi[c][1] * dphi[d][2]
        nn = 0.0
        for a in range(4):
            for b in range(4):
                nn = nn + ginv[a][b] * N[a] * N[b]
        if np.any(value(nn) >= 0.0):
            raise DomainError("slice is not spacelike (conormal fails to be timelike)")
        scale = 1.0 / jets.sqrt(0.0 - nn)
        flip = np.where(value(N[0]) > 0.0, -1.0, 1.0)  # future: n_0 < 0
        n = [N[a] * scale * flip for a in range(4)]

        # induced metric and covariant Hessian in chart directions
        g3 = [[None] * 3 for _ in range(3)]
        h3 = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(i, 3):
                acc = 0.0
                hac = 0.0
                for a in range(4):
                    hess = ddphi[a][i][j]
                    for b in range(4):
                        acc = acc + g4[a][b] * dphi[a][i] * dphi[b][j]
                        for c in range(4):
                            hess = hess + gam[a][b][c] * dphi[b][i] * dphi[c][j]
                    hac = hac + n[a] * hess
                g3[i][j] = acc
                g3[j][i] = acc
                h3[i][j] = 0.0 - hac
                h3[j][i] = h3[i][j]

        if validate:
            m = [[value(g3[i][j]) for j in range(3)] for i in range(3)]
            d1 = m[0][0]
            d2 = m[0][0] * m[1][1] - m[0][1] * m[1][0]
            d3 = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                  - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                  + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
            if np.any(d1 <= 0) or np.any(d2 <= 0) or np.any(d3 <= 0):
                raise DomainError("induced metric is not positive definite")

        F = frame.components(coords3)
        gf = [[None] * 3 for _ in range(3)]
        hf = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(i, 3):
                ga = 0.0
                ha = 0.0
                for a in range(3):
                    for b in range(3):
                        fab = F[i][a] * F[j][b]
                        ga = ga + fab * g3[a][b]
                        ha = ha + fab * h3[a][b]
                gf[i][j] = ga
                gf[j][i] = ga
                hf[i][j] = ha
                hf[j][i] = ha
        return gf, hf

    return InitialData(gp, frame, True,
                       name or f"pullback[{metric.name};{emb.name}]")


# ---------------------------------------------------------------------------
# Frame geometry of 3-data: connection, curvature, constraints
# ---------------------------------------------------------------------------

def frame_geometry(data, coords3):
    """Connection, curvature and covariant derivatives of (g, p) in the frame.

    Koszul formula in the (generally non-holonomic) frame:
    2 g(nabla_i e_j, e_l) = e_i g_jl + e_j g_il - e_l g_ij
    + g([e_i,e_j], e_l) - g([e_i,e_l], e_j) - g([e_j,e_l], e_i).
    """
    cj = jets.seed(list(coords3), order=2)
    G, P = data.gp(cj)
    F = data.frame.components(cj)
    F1 = [[trunc1(F[i][a]) for a in range(3)] for i in range(3)]
    Fv = np.array([[value(F[i][a]) + np.zeros(np.shape(value(cj[0].f)))
                    for a in range(3)] for i in range(3)])
    Finv1 = inv3(F1)

    # structure coefficients [e_i, e_j] = C^k_{ij} e_k, kept to first order
    C1 = [[[0.0] * 3 for _ in range(3)] for _ in range(3)]
    for i in range(3):
        for j in range(i + 1, 3):
            com = [0.0, 0.0, 0.0]
            for b in range(3):
                acc = 0.0
                for a in range(3):
                    acc = acc + F1[i][a] * _d1(F[j][b], a) \
                        - F1[j][a] * _d1(F[i][b], a)
                com[b] = acc
            for k in range(3):
                e = sum(com[b] * Finv1[b][k] for b in range(3))
                C1[i][j][k] = e
                C1[j][i][k] = -1.0 * e

    G1 = [[trunc1(G[i][j]) if isinstance(G[i][j], Jet) else G[i][j]
           for j in range(3)] for i in range(3)]
    ginv1 = inv3(G1)

    def ddir(k, X):
        """Frame-directional derivative e_k(X), kept to first order."""
        return sum(F1[k][a] * _d1(X, a) for a in range(3))

    Dg1 = [[[ddir(k, G[i][j]) for j in range(3)] for i in range(3)]
           for k in range(3)]

    om_low = [[[None] * 3 for _ in range(3)] for _ in range(3)]
    for i in range(3):
        for j in range(3):
            for l in range(3):
                e = Dg1[i][j][l] + Dg1[j][i][l] - Dg1[l][i][j]
                for k in range(3):
                    e = e + C1[i][j][k] * G1[k][l] \
                        - C1[i][l][k] * G1[k][j] - C1[j][l][k] * G1[k][i]
                om_low[l][i][j] = 0.5 * e
    om1 = [[[sum(ginv1[m][l] * om_low[l][i][j] for l in range(3))
             for j in range(3)] for i in range(3)] for m in range(3)]

    leaf = np.shape(value(cj[0].f))
    omv = np.array([[[value(om1[m][i][j]) + np.zeros(leaf) for j in range(3)]
                     for i in range(3)] for m in range(3)])
    Cv = np.array([[[value(C1[i][j][k]) + np.zeros(leaf) for k in range(3)]
                    for j in range(3)] for i in range(3)])
    gv = np.array([[value(G[i][j]) + np.zeros(leaf) for j in range(3)]
                   for i in range(3)])
    pv = np.array([[value(P[i][j]) + np.zeros(leaf) for j in range(3)]
                   for i in range(3)])
    ginv_v = np.array([[value(ginv1[i][j]) + np.zeros(leaf) for j in range(3)]
                       for i in range(3)])

    # e_k omega^m_{ij}, from the first-order parts of the omega jets
    Dom = np.zeros((3, 3, 3, 3) + leaf)
    for k in range(3):
        for m in range(3):
            for i in range(3):
                for j in range(3):
                    Dom[k, m, i, j] = sum(Fv[k][a] * _grad(om1[m][i][j], a)
                                          for a in range(3))

    # covariant derivative of p: (nabla_k p)_{ij}
    nabla_p = np.zeros((3, 3, 3) + leaf)
    for k in range(3):
        for i in range(3):
            for j in range(3):
                e = sum(Fv[k][a] * _grad(P[i][j], a) for a in range(3))
                for m in range(3):
                    e = e - omv[m][k][i] * pv[m][j] - omv[m][k][j] * pv[i][m]
                nabla_p[k, i, j] = e

    # curvature: R(e_i, e_j) e_q = Rup[l, q, i, j] e_l
    Rup = np.zeros((3, 3, 3, 3) + leaf)
    for l in range(3):
        for q in range(3):
            for i in range(3):
                for j in range(3):
                    e = Dom[i, l, j, q] - Dom[j, l, i, q]
                    for m in range(3):
                        e = e + omv[l][i][m] * omv[m][j][q] \
                            - omv[l][j][m] * omv[m][i][q] \
                            - Cv[i][j][m] * omv[l][m][q]
                    Rup[l, q, i, j] = e
    riem = np.einsum("pl...,lqij...->pqij...", gv, Rup)
    scalar = np.einsum("ik...,jl...,ijkl...->...", ginv_v, ginv_v, riem)

    return {
        "g": gv, "p": pv, "ginv": ginv_v, "F": Fv,
        "C": Cv, "omega": omv, "nabla_p": nabla_p,
        "riem": riem, "scalar": scalar,
    }


def curvature3(data, coords3):
    """Frame Riemann components and scalar curvature of the 3-data."""
    b = frame_geometry(data, coords3)
    return b["riem"], b["scalar"]


def metric_compatibility_residual(data, coords3):
    """Max frame component of nabla g; vanishes for the Koszul connection."""
    b = frame_geometry(data, coords3)
    cj = jets.seed(list(coords3), order=2)
    G, _ = data.gp(cj)
    leaf = np.shape(value(cj[0].f))
    Fv, om = b["F"], b["omega"]
    worst = 0.0
    for k in range(3):
        for i in range(3):
            for j in range(3):
                e = sum(Fv[k][a] * _grad(G[i][j], a) for a in range(3)) \
                    + np.zeros(leaf)
                for m in range(3):
                    e = e - om[m][k][i] * b["g"][m][j] - om[m][k][j] * b["g"][i][m]
                worst = np.maximum(worst, np.max(np.abs(e)))
    return float(worst)


def constraint_quantities(data, coords3):
    """Energy density mu, momentum density varpi_j, antisymmetry current
    sigma_j, built with the Levi-Civita connection of g."""
    b = frame_geometry(data, coords3)
    gi, p, np_ = b["ginv"], b["p"], b["nabla_p"]
    trp = np.einsum("ij...,ij...->...", gi, p)
    pupup = np.einsum("ia...,jb...,ij...,ab...->...", gi, gi, p, p)
    mu = 0.5 * (b["scalar"] + trp * trp - pupup)
    varpi = np.einsum("ai...,aji...->j...", gi, np_) \
        - np.einsum("ab...,jab...->j...", gi, np_)
    q = np_ - np.swapaxes(np_, 1, 2)
    sigma = 2.0 * np.einsum("aj...,aji...->i...", gi, q)
    if data.symmetric_p:
        sigma = np.zeros_like(sigma)
    return ConstraintQuantities(mu, varpi, sigma)


def rigidity_residual(data, coords3):
    """Norms of the three equality-case identities: the Gauss-type curvature
    identity, the Codazzi-type first-derivative identity, and the divergence
    of the antisymmetric part of p."""
    b = frame_geometry(data, coords3)
    p, gi, np_ = b["p"], b["ginv"], b["nabla_p"]
    t1 = b["riem"] + np.einsum("ik...,jl...->ijkl...", p, p) \
        - np.einsum("il...,jk...->ijkl...", p, p)
    r1 = np.sqrt(np.sum(t1 * t1, axis=(0, 1, 2, 3)))
    t2 = np_ - np.swapaxes(np_, 0, 1)
    r2 = np.sqrt(np.sum(t2 * t2, axis=(0, 1, 2)))
    q = np_ - np.swapaxes(np_, 1, 2)
    t3 = np.einsum("aj...,aji...->i...", gi, q)
    r3 = np.sqrt(np.sum(t3 * t3, axis=0))
    return r1, r2, r3

"""Catalog of exact metrics, the truncated radiating metric, and slice
embeddings.

All component functions are written in generic arithmetic so they can be
evaluated on jets.  Asymptotic series of the radiating metric are truncated
after their last displayed term; the truncation is guarded by ``r_min``.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import jets
from .errors import DomainError
from .geometry import Embedding, Metric4Evaluator, ricci_tensor
from .jets import cos, cosh, exp as gexp, sin, sinh, sqrt

__all__ = [
    "KerrParameters", "SliceSpec",
    "minkowski", "schwarzschild", "kerr", "bondi_metric", "bondi_functions",
    "hyperboloid_embedding", "bondi_slice_embedding", "t_const_embedding",
    "ricci_residual",
]


@dataclass(frozen=True)
class KerrParameters:
    """Mass and angular momentum per unit mass, geometric units."""

    m: float
    a: float

    def __post_init__(self):
        if self.m <= 0:
            raise DomainError(f"mass must be positive, got {self.m}")


def _sym4(entries):
    """Fill a symmetric 4x4 nested list from a dict of upper-triangle parts."""
    g = [[0.0] * 4 for _ in range(4)]
    for (a, b), v in entries.items():
        g[a][b] = v
        if a != b:
            g[b][a] = v
    return g


def minkowski(chart="polar"):
    """Flat spacetime in a cartesian, polar, or retarded chart."""
    if chart == "cartesian":
        def fn(c):
            return _sym4({(0, 0): -1.0, (1, 1): 1.0, (2, 2): 1.0, (3, 3): 1.0})
        return Metric4Evaluator(fn, "cartesian", "minkowski-cartesian")
    if chart == "polar":
        def fn(c):
            _, r, th, _ = c
            r2 = r * r
            return _sym4({(0, 0): -1.0, (1, 1): 1.0, (2, 2): r2,
                          (3, 3): r2 * sin(th) ** 2})
        return Metric4Evaluator(fn, "polar", "minkowski-polar", domain=_positive_r)
    if chart == "retarded":
        def fn(c):
            _, r, th, _ = c
            r2 = r * r
            return _sym4({(0, 0): -1.0, (0, 1): -1.0, (2, 2): r2,
                          (3, 3): r2 * sin(th) ** 2})
        return Metric4Evaluator(fn, "retarded", "minkowski-retarded", domain=_positive_r)
    raise DomainError(f"unknown Minkowski chart {chart!r}")


def _positive_r(coords):
    if np.any(np.asarray(coords[1]) <= 0.0):
        raise DomainError("r must be positive")


def schwarzschild(m, chart="static"):
    """Vacuum black-hole exterior, static or retarded chart; requires r > 2m."""
    if m <= 0:
        raise DomainError(f"mass must be positive, got {m}")

    def domain(coords):
        if np.any(np.asarray(coords[1]) <= 2.0 * m):
            raise DomainError(f"r must exceed 2m = {2.0 * m}")

    if chart == "static":
        def fn(c):
            _, r, th, _ = c
            f = 1.0 - 2.0 * m / r
            r2 = r * r
            return _sym4({(0, 0): -1.0 * f, (1, 1): 1.0 / f, (2, 2): r2,
                          (3, 3): r2 * sin(th) ** 2})
        return Metric4Evaluator(fn, "polar", f"schwarzschild(m={m})", domain=domain)
    if chart == "retarded":
        def fn(c):
            _, r, th, _ = c
            f = 1.0 - 2.0 * m / r
            r2 = r * r
            return _sym4({(0, 0): -1.0 * f, (0, 1): -1.0, (2, 2): r2,
                          (3, 3): r2 * sin(th) ** 2})
        return Metric4Evaluator(fn, "retarded", f"schwarzschild-retarded(m={m})",
                                domain=domain)
    raise DomainError(f"unknown Schwarzschild chart {chart!r}")


def kerr(params):
    """Rotating vacuum exterior in Boyer-Lindquist-type coordinates.

    Components: Sigma = r^2 + a^2 cos^2(theta), Delta = r^2 - 2 m r + a^2,
    g_tt = -(1 - 2mr/Sigma), g_tpsi = -2 m a r sin^2(theta)/Sigma,
    g_rr = Sigma/Delta, g_thth = Sigma,
    g_psipsi = (r^2 + a^2 + 2 m r a^2 sin^2(theta)/Sigma) sin^2(theta).
    """
    m, a = params.m, params.a

    def domain(coords):
        r = np.asarray(coords[1])
        if np.any(r <= 0.0) or np.any(r * r - 2.0 * m * r + a * a <= 0.0):
            raise DomainError("point outside the exterior region (Delta <= 0)")

    def fn(c):
        _, r, th, _ = c
        st2 = sin(th) ** 2
        sigma = r * r + a * a * cos(th) ** 2
        delta = r * r - 2.0 * m * r + a * a
        return _sym4({
            (0, 0): -1.0 * (1.0 - 2.0 * m * r / sigma),
            (0, 3): -2.0 * m * a * r * st2 / sigma,
            (1, 1): sigma / delta,
            (2, 2): sigma,
            (3, 3): (r * r + a * a + 2.0 * m * r * a * a * st2 / sigma) * st2,
        })

    return Metric4Evaluator(fn, "polar", f"kerr(m={m},a={a})", domain=domain)


# ---------------------------------------------------------------------------
# Truncated radiating metric
# ---------------------------------------------------------------------------

def _news_block(exp, u, th, ps):
    """News potentials with their angular first derivatives, via inner jets."""
    nu, nth, nps = jets.seed([u, th, ps], order=1)
    cj = exp.c(nu, nth, nps)
    dj = exp.d(nu, nth, nps)

    def parts(x):
        if isinstance(x, jets.Jet):
            return x.f, x.d[1], x.d[2]
        return x, 0.0, 0.0

    return parts(cj), parts(dj)


def _assemble_six(exp, u, r, th, ps):
    """The six metric functions at (u, r, theta, psi), truncated."""
    (c, c2, c3), (d, d2, d3) = _news_block(exp, u, th, ps)
    ct = cos(th) / sin(th)
    cs = 1.0 / sin(th)
    l = c2 + 2.0 * c * ct + d3 * cs
    lbar = d2 + 2.0 * d * ct - c3 * cs
    Nv = exp.N(u, th, ps)
    Pv = exp.P(u, th, ps)
    p = 2.0 * Nv + 3.0 * (c * c2 + d * d2) + 4.0 * (c * c + d * d) * ct \
        - 2.0 * (c3 * d - c * d3) * cs
    pbar = 2.0 * Pv + 2.0 * (c2 * d - c * d2) + 3.0 * (c * c3 + d * d3) * cs
    r2 = r * r
    r3 = r2 * r
    gam = c / r + (exp.C(u, th, ps) - c ** 3 / 6.0 - 1.5 * c * d * d) / r3
    dlt = d / r + (exp.H(u, th, ps) + 0.5 * c * c * d - d ** 3 / 6.0) / r3
    beta = -0.25 * (c * c + d * d) / r2
    U = -1.0 * l / r2 + p / r3
    W = -1.0 * lbar / r2 + pbar / r3
    V = -1.0 * r + 2.0 * exp.M(u, th, ps)
    return beta, gam, dlt, U, V, W


def bondi_functions(exp):
    """Callables (u, r, theta, psi) -> (beta, gamma, delta, U, V, W)."""
    def fns(u, r, th, ps):
        return _assemble_six(exp, u, r, th, ps)
    return fns


def default_r_min(exp):
    sc, sd = exp.sup_news_estimate()
    return 5.0 * max(1.0, sc, sd)


def bondi_metric(exp, r_min=None):
    """Radiating metric assembled from the truncated expansions.

    With vanishing news and constant mass aspect it reduces exactly to the
    retarded black-hole metric.  Evaluation below r_min is rejected: the
    truncated series only represent the asymptotic regime.
    """
    rmin = default_r_min(exp) if r_min is None else float(r_min)

    def domain(coords):
        if np.any(np.asarray(coords[1]) < rmin):
            raise DomainError(f"r below r_min = {rmin} for the truncated metric")

    def fn(c):
        u, r, th, ps = c
        beta, gam, dlt, U, V, W = _assemble_six(exp, u, r, th, ps)
        e2b = gexp(2.0 * beta)
        e2g = gexp(2.0 * gam)
        ch = cosh(2.0 * dlt)
        sh = sinh(2.0 * dlt)
        st = sin(th)
        r2 = r * r
        guu = (V / r) * e2b + r2 * ch * (e2g * U * U + W * W / e2g) \
            + 2.0 * r2 * U * W * sh
        return _sym4({
            (0, 0): guu,
            (0, 1): -1.0 * e2b,
            (0, 2): -1.0 * r2 * (e2g * U * ch + W * sh),
            (0, 3): -1.0 * r2 * (W * ch / e2g + U * sh) * st,
            (2, 2): r2 * e2g * ch,
            (2, 3): r2 * sh * st,
            (3, 3): r2 * ch * st * st / e2g,
        })

    name = f"bondi[{getattr(exp, 'name', 'expansion')}]"
    ev = Metric4Evaluator(fn, "retarded", name, domain=domain)
    ev.r_min = rmin
    return ev


# ---------------------------------------------------------------------------
# Slice embeddings
# ---------------------------------------------------------------------------

def t_const_embedding(t0=0.0, chart="polar"):
    """The time-symmetric slice t = t0 of a static chart."""
    def fn(c):
        r, th, ps = c
        return [t0 + 0.0 * r, r, th, ps]
    return Embedding(fn, chart, f"t={t0}")


def hyperboloid_embedding():
    """The unit hyperboloid t = sqrt(1 + r^2) in a static polar chart."""
    def fn(c):
        r, th, ps = c
        return [sqrt(1.0 + r * r), r, th, ps]
    return Embedding(fn, "polar", "hyperboloid")


@dataclass
class SliceSpec:
    """Asymptotically null slice of a retarded chart.

    u = u0 + sqrt(1+r^2) - r + (c^2+d^2)|_{u0} / (12 r^3) + a3(theta,psi)/r^4.
    The difference sqrt(1+r^2) - r is evaluated as 1/(sqrt(1+r^2) + r) to
    avoid catastrophic cancellation at large radius.
    """

    u0: float = 0.0
    a3: Optional[Callable] = None   # a3(theta, psi), generic; None means 0
    r_min: float = 1.0


def bondi_slice_embedding(spec, exp):
    u0 = float(spec.u0)
    a3 = spec.a3

    def fn(c):
        r, th, ps = c
        cu = exp.c(u0, th, ps)
        du = exp.d(u0, th, ps)
        corr = (cu * cu + du * du) / (12.0 * r ** 3)
        if a3 is not None:
            corr = corr + a3(th, ps) / r ** 4
        u = u0 + 1.0 / (sqrt(1.0 + r * r) + r) + corr
        return [u, r, th, ps]

    return Embedding(fn, "retarded", f"null-slice(u0={u0})")


# ---------------------------------------------------------------------------
# Vacuum sanity gate
# ---------------------------------------------------------------------------

def ricci_residual(metric, point):
    """Frobenius norm of the Ricci tensor in unit-coordinate scaling.

    Components are normalised by sqrt(|g_aa| |g_bb|) so the residual is
    comparable across charts with r^2-scaled angular coordinates.
    """
    ric = ricci_tensor(metric, point)
    g = metric.components(point)
    s = np.sqrt(np.abs(np.diag(g)))
    s = np.where(s == 0.0, 1.0, s)
    hat = ric / np.outer(s, s)
    return float(np.sqrt(np.sum(hat * hat)))

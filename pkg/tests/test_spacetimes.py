"""Catalog metrics: displayed components, degenerations, vacuum residuals."""

import numpy as np
import pytest

from admbondi.errors import DomainError
from admbondi.spacetimes import (KerrParameters, SliceSpec, bondi_functions,
                                 bondi_metric, bondi_slice_embedding,
                                 hyperboloid_embedding, kerr, minkowski,
                                 ricci_residual, schwarzschild)


class StaticNews:
    """Minimal expansion stub: constant news, constant aspects."""

    name = "stub"

    def __init__(self, c=0.0, d=0.0, M=0.0, N=0.0, P=0.0, C=0.0, H=0.0):
        self._c, self._d = c, d
        self._M, self._N, self._P, self._C, self._H = M, N, P, C, H

    def c(self, u, th, ps):
        import admbondi.jets as jx
        return self._c * jx.sin(th) ** 2 + 0.0 * u

    def d(self, u, th, ps):
        return self._d + 0.0 * u

    def M(self, u, th, ps):
        return self._M + 0.0 * u

    def N(self, u, th, ps):
        return self._N + 0.0 * u

    def P(self, u, th, ps):
        return self._P + 0.0 * u

    def C(self, u, th, ps):
        return self._C + 0.0 * u

    def H(self, u, th, ps):
        return self._H + 0.0 * u

    def sup_news_estimate(self):
        return abs(self._c), abs(self._d)


def rand_points(rng, n, rlo, rhi):
    return [(0.3, rng.uniform(rlo, rhi), rng.uniform(0.4, 2.7),
             rng.uniform(0.0, 6.2)) for _ in range(n)]


def test_minkowski_polar_display():
    g = minkowski("polar")
    r, th = 3.2, 1.1
    m = g.components([0.0, r, th, 2.0])
    assert m[0, 0] == -1.0 and m[1, 1] == 1.0
    assert m[2, 2] == pytest.approx(r * r)
    assert m[3, 3] == pytest.approx(r * r * np.sin(th) ** 2)


def test_minkowski_retarded_display():
    g = minkowski("retarded")
    m = g.components([0.0, 2.0, 1.0, 0.0])
    assert m[0, 0] == -1.0 and m[0, 1] == -1.0 and m[1, 1] == 0.0


def test_minkowski_flat_everywhere(rng):
    for chart in ("cartesian", "polar", "retarded"):
        g = minkowski(chart)
        for pt in rand_points(rng, 5, 1.0, 10.0):
            pt = list(pt)
            if chart == "cartesian":
                pt = list(rng.normal(size=4))
            assert ricci_residual(g, pt) <= 1e-9


def test_schwarzschild_static_display():
    m = 1.3
    g = schwarzschild(m, "static")
    r = 7.0
    comp = g.components([0.0, r, 1.0, 0.0])
    assert comp[0, 0] == pytest.approx(-(1 - 2 * m / r))
    assert comp[1, 1] == pytest.approx(1.0 / (1 - 2 * m / r))


def test_schwarzschild_retarded_display():
    g = schwarzschild(1.0, "retarded")
    comp = g.components([0.0, 9.0, 1.2, 0.1])
    assert comp[0, 1] == -1.0
    assert comp[0, 0] == pytest.approx(-(1 - 2.0 / 9.0))


def test_schwarzschild_vacuum(rng):
    g = schwarzschild(1.0, "static")
    for pt in rand_points(rng, 8, 3.0, 40.0):
        assert ricci_residual(g, list(pt)) <= 1e-8
    gr = schwarzschild(1.0, "retarded")
    for pt in rand_points(rng, 8, 3.0, 40.0):
        assert ricci_residual(gr, list(pt)) <= 1e-8


def test_schwarzschild_horizon_rejected():
    g = schwarzschild(1.0)
    with pytest.raises(DomainError):
        g.components([0.0, 1.9, 1.0, 0.0])


def test_schwarzschild_mass_to_zero_is_minkowski(rng):
    g = schwarzschild(1e-14, "static")
    flat = minkowski("polar")
    for pt in rand_points(rng, 5, 1.0, 10.0):
        assert np.allclose(g.components(list(pt)), flat.components(list(pt)),
                           atol=1e-12)


def test_kerr_reduces_to_schwarzschild(rng):
    g0 = kerr(KerrParameters(1.0, 0.0))
    gs = schwarzschild(1.0, "static")
    for pt in rand_points(rng, 8, 3.0, 30.0):
        assert np.allclose(g0.components(list(pt)), gs.components(list(pt)),
                           atol=1e-14)


def test_kerr_cross_term_value():
    m, a = 1.0, 0.7
    g = kerr(KerrParameters(m, a))
    r, th = 10.0, np.pi / 2
    comp = g.components([0.0, r, th, 0.3])
    sigma = r * r
    assert comp[0, 3] == pytest.approx(-2 * m * a * r / sigma, rel=1e-14)


def test_kerr_vacuum(rng):
    g = kerr(KerrParameters(1.0, 0.5))
    for pt in rand_points(rng, 6, 4.0, 25.0):
        assert ricci_residual(g, list(pt)) <= 1e-6


def test_kerr_interior_rejected():
    g = kerr(KerrParameters(1.0, 0.5))
    with pytest.raises(DomainError):
        g.components([0.0, 1.0, 1.0, 0.0])
    with pytest.raises(DomainError):
        KerrParameters(-1.0, 0.2)


def test_kerr_lorentzian_signature(rng):
    g = kerr(KerrParameters(1.0, 0.9))
    for pt in rand_points(rng, 6, 3.0, 20.0):
        assert g.signature_ok(list(pt))


def test_bondi_reduces_to_schwarzschild_retarded(rng):
    exp = StaticNews(M=1.0)
    gb = bondi_metric(exp, r_min=4.0)
    gs = schwarzschild(1.0, "retarded")
    for pt in rand_points(rng, 8, 5.0, 60.0):
        assert np.allclose(gb.components(list(pt)), gs.components(list(pt)),
                           atol=1e-12)
    comp = gb.components([0.0, 10.0, 1.0, 0.0])
    assert comp[0, 0] == pytest.approx(-(1 - 2.0 / 10.0), rel=1e-14)


def test_bondi_r_min_guard():
    exp = StaticNews(c=0.3, M=1.0)
    gb = bondi_metric(exp)
    assert gb.r_min == pytest.approx(5.0)
    with pytest.raises(DomainError):
        gb.components([0.0, 2.0, 1.0, 0.0])


def test_bondi_theta_coefficient_leading_order():
    # g_thth = r^2 (1 + 2c/r + O(1/r^2))
    exp = StaticNews(c=0.2, M=1.0)
    gb = bondi_metric(exp, r_min=4.0)
    th, ps = 1.1, 0.4
    c = 0.2 * np.sin(th) ** 2
    rem = []
    for r in (50.0, 100.0, 200.0, 400.0):
        comp = gb.components([0.0, r, th, ps])
        rem.append(abs(comp[2, 2] / r ** 2 - 1.0 - 2 * c / r))
    slope = np.polyfit(np.log([50, 100, 200, 400]), np.log(rem), 1)[0]
    assert slope <= -1.9


def test_bondi_dudtheta_coefficient_leading_order():
    # coefficient of du dtheta tends to l = c_,2 + 2 c cot + d_,3 csc
    exp = StaticNews(c=0.2, M=1.0)
    gb = bondi_metric(exp, r_min=4.0)
    th, ps = 1.1, 0.4
    c2 = 0.2 * 2 * np.sin(th) * np.cos(th)
    l = c2 + 2 * (0.2 * np.sin(th) ** 2) / np.tan(th)
    rem = []
    for r in (50.0, 100.0, 200.0, 400.0):
        comp = gb.components([0.0, r, th, ps])
        rem.append(abs(comp[0, 2] - l))
    slope = np.polyfit(np.log([50, 100, 200, 400]), np.log(rem), 1)[0]
    assert slope <= -0.9
    assert rem[-1] <= abs(l)  # leading value is l itself


def test_bondi_static_news_vacuum_decay(rng):
    # static news, constant aspects: the only Einstein violation is the
    # series truncation, which decays at least like r^-3.5 in the scaled norm
    exp = StaticNews(c=0.25, d=0.0, M=1.0)
    gb = bondi_metric(exp, r_min=4.0)
    radii = np.array([30.0, 60.0, 120.0, 240.0])
    th, ps = 1.2, 0.7
    res = np.array([ricci_residual(gb, [0.0, r, th, ps]) for r in radii])
    slope = np.polyfit(np.log(radii), np.log(res), 1)[0]
    assert slope <= -3.5


def test_bondi_functions_truncation():
    exp = StaticNews(c=0.1, M=2.0)
    fns = bondi_functions(exp)
    beta, gam, dlt, U, V, W = fns(0.0, 10.0, np.pi / 2, 0.0)
    c = 0.1
    assert gam == pytest.approx(c / 10.0 + (-c**3 / 6.0) / 1000.0, rel=1e-13)
    assert beta == pytest.approx(-c * c / 400.0, rel=1e-13)
    assert V == pytest.approx(-10.0 + 4.0)
    assert dlt == 0.0 and W == 0.0


def test_hyperboloid_embedding_origin_limit():
    emb = hyperboloid_embedding()
    t, r, th, ps = emb.map([1e-8, 1.0, 0.0])
    assert t == pytest.approx(1.0, abs=1e-12)


def test_bondi_slice_embedding_values():
    exp = StaticNews(c=0.0, M=1.0)
    emb = bondi_slice_embedding(SliceSpec(u0=3.0), exp)
    u, r, th, ps = emb.map([10.0, 1.0, 0.5])
    assert u == pytest.approx(3.0 + np.sqrt(101.0) - 10.0, rel=1e-12)

    class UnitNews(StaticNews):
        def c(self, u, th, ps):
            return 1.0 + 0.0 * u
    emb2 = bondi_slice_embedding(SliceSpec(u0=0.0), UnitNews())
    u2 = emb2.map([10.0, 1.0, 0.5])[0]
    base = np.sqrt(101.0) - 10.0
    assert u2 - base == pytest.approx(1.0 / 12000.0, rel=1e-10)


def test_catalog_metrics_symmetric_and_lorentzian(rng):
    metrics = [minkowski("polar"), schwarzschild(1.0, "static"),
               kerr(KerrParameters(1.0, 0.5)),
               bondi_metric(StaticNews(c=0.1, M=1.0), r_min=4.0)]
    for g in metrics:
        for pt in rand_points(rng, 3, 6.0, 20.0):
            comp = g.components(list(pt))
            assert np.allclose(comp, comp.T)
            assert g.signature_ok(list(pt))


def test_metric_first_derivs_match_fd(rng):
    # dual-number first derivatives vs central differences
    metrics = [minkowski("polar"), schwarzschild(1.0, "static"),
               schwarzschild(1.0, "retarded"), kerr(KerrParameters(1.0, 0.6)),
               bondi_metric(StaticNews(c=0.15, M=1.0), r_min=4.0)]
    h = 1e-5
    for g in metrics:
        for pt in rand_points(rng, 4, 6.0, 20.0):
            pt = list(pt)
            dg = g.first_derivs(pt)
            for c in range(4):
                up = list(pt); up[c] += h
                dn = list(pt); dn[c] -= h
                ref = (g.components(up) - g.components(dn)) / (2 * h)
                scale = 1.0 + np.abs(dg[c])
                assert np.max(np.abs(dg[c] - ref) / scale) <= 1e-6, (g.name, c)


def test_embedding_first_derivs_match_fd(rng):
    exp = StaticNews(c=0.2, M=1.0)
    embs = [hyperboloid_embedding(),
            bondi_slice_embedding(SliceSpec(u0=1.0), exp)]
    h = 1e-6
    for emb in embs:
        for _ in range(25):
            pt = [rng.uniform(3.0, 40.0), rng.uniform(0.4, 2.7),
                  rng.uniform(0.0, 6.2)]
            ej = emb.jets(pt, order=2)
            for a in range(3):
                up = list(pt); up[a] += h
                dn = list(pt); dn[a] -= h
                ref = (np.array(emb.map(up)) - np.array(emb.map(dn))) / (2 * h)
                got = np.array([ej[i].d[a] if hasattr(ej[i], "d") else 0.0
                                for i in range(4)])
                scale = 1.0 + np.abs(got)
                assert np.max(np.abs(got - ref) / scale) <= 1e-6, emb.name


def test_spacetime_point_record():
    from admbondi.geometry import SpacetimePoint
    g = schwarzschild(1.0, "static")
    pt = SpacetimePoint("polar", (0.0, 8.0, 1.1, 0.3))
    assert np.allclose(g.components(pt), g.components([0.0, 8.0, 1.1, 0.3]))


def test_metric_second_derivs_match_fd(rng):
    g = schwarzschild(1.0, "static")
    h = 1e-4
    for _ in range(5):
        pt = [0.0, rng.uniform(5.0, 20.0), rng.uniform(0.5, 2.6),
              rng.uniform(0.0, 6.2)]
        dd = g.second_derivs(pt)
        for c in range(4):
            for e in range(4):
                up = list(pt); up[c] += h; up[e] += h
                um = list(pt); um[c] += h; um[e] -= h
                dm = list(pt); dm[c] -= h; dm[e] += h
                dd2 = list(pt); dd2[c] -= h; dd2[e] -= h
                ref = (g.components(up) - g.components(um)
                       - g.components(dm) + g.components(dd2)) / (4 * h * h)
                scale = 1.0 + np.abs(dd[c][e])
                assert np.max(np.abs(dd[c][e] - ref) / scale) <= 1e-5, (c, e)

"""Command-line runner.

Subcommands:
    adm           charges at spatial infinity + decay/DEC/positivity checks
    null          charges of the asymptotically null slice + order gate
    bondi-evolve  mass-loss trajectory (CSV) + monotonicity margins
    bondi-slice   induced slice data: consistency fit + slice charges
    verify        the full acceptance battery
    converge      grid/ladder refinement study

Configuration is nested-section key-value text::

    preset = schwarzschild
    [parameters]
    mass = 1.0
    [grid]
    n_theta = 48
    n_psi = 96
    [ladder]
    radii = 10, 20, 40, 80

Unknown sections or keys are rejected with the offending line.  Flags
override config values.  CHARGES_THREADS caps ladder parallelism; reports
are byte-identical for identical configs apart from the metadata block.
"""

import argparse
import logging
import sys

import numpy as np

from .errors import ConfigError, DomainError
from .reports import ChargeReport, CheckResult, write_json
from .scenarios import (ADM_PRESETS, ScenarioConfig, make_a3, make_adm_data,
                        make_expansion)

log = logging.getLogger(__name__)

# (section, key) -> (attribute, parser)
_FLOAT = float
_INT = int
_BOOL = lambda s: s.strip().lower() in ("1", "true", "yes", "on")
_FLOATS = lambda s: tuple(float(x) for x in s.replace(",", " ").split())

_SCHEMA = {
    ("", "preset"): ("preset", str.strip),
    ("parameters", "mass"): ("mass", _FLOAT),
    ("parameters", "spin"): ("spin", _FLOAT),
    ("parameters", "amplitude"): ("amplitude", _FLOAT),
    ("parameters", "amplitude_d"): ("amplitude_d", _FLOAT),
    ("parameters", "news_zero_u"): ("news_zero_u", _FLOAT),
    ("parameters", "mass_aspect"): ("mass_aspect", str.strip),
    ("parameters", "a3_amplitude"): ("a3_amplitude", _FLOAT),
    ("grid", "n_theta"): ("n_theta", _INT),
    ("grid", "n_psi"): ("n_psi", _INT),
    ("ladder", "radii"): ("radii", _FLOATS),
    ("slice", "u0"): ("u0", _FLOAT),
    ("evolution", "u_start"): ("u_start", _FLOAT),
    ("evolution", "u_end"): ("u_end", _FLOAT),
    ("evolution", "du"): ("du", _FLOAT),
    ("checks", "tolerance_scale"): ("tolerance_scale", _FLOAT),
    ("checks", "strict"): ("strict", _BOOL),
}


def parse_config(text, strict=True):
    """Parse nested-section key-value text into a ScenarioConfig.

    Returns (config, provenance) where provenance records, per field, whether
    it came from the file or from a default.
    """
    cfg = ScenarioConfig()
    seen = set()
    table = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            known = {s for s, _ in _SCHEMA} | {"news_table"}
            if strict and section not in known:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip().lower()
        val = val.strip()
        if section == "news_table":
            table[key] = val
            continue
        spec = _SCHEMA.get((section, key))
        if spec is None:
            if strict:
                raise ConfigError(f"line {lineno}: unknown key {key!r} in "
                                  f"section [{section or 'top level'}]")
            continue
        attr, conv = spec
        try:
            setattr(cfg, attr, conv(val))
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}")
        seen.add(attr)

    if table:
        cfg.news_table = _parse_news_table(table)
        seen.add("news_table")
    provenance = {f: ("config" if f in seen else "default")
                  for f in ("preset", "mass", "spin", "amplitude", "amplitude_d",
                            "news_zero_u", "mass_aspect", "a3_amplitude",
                            "n_theta", "n_psi", "radii", "u0", "u_start",
                            "u_end", "du", "tolerance_scale", "news_table")}
    for f, src in provenance.items():
        if src == "default":
            log.debug("config: %s defaulted", f)
    cfg.defaulted_fields = tuple(f for f, s in provenance.items()
                                 if s == "default")
    cfg.validate()
    return cfg, provenance


def _parse_news_table(table):
    if "u_grid" not in table:
        raise ConfigError("news_table needs a u_grid row")
    out = {"u_grid": _FLOATS(table["u_grid"])}
    for key, val in table.items():
        if key == "u_grid":
            continue
        parts = key.split("_")
        if len(parts) != 3 or parts[0] not in ("c",):
            raise ConfigError(
                f"news_table keys look like c_<l>_<m>, got {key!r}")
        l, m = int(parts[1]), int(parts[2])
        out[(l, m)] = _FLOATS(val)
        if len(out[(l, m)]) != len(out["u_grid"]):
            raise ConfigError(f"news_table row {key} length mismatch")
    return out


def _apply_flags(cfg, args):
    if args.ntheta:
        cfg.n_theta = args.ntheta
    if args.npsi:
        cfg.n_psi = args.npsi
    if args.radii:
        cfg.radii = tuple(float(x) for x in args.radii.split(","))
    if args.u0 is not None:
        cfg.u0 = args.u0
    if args.u1 is not None:
        cfg.u_end = args.u1
    if args.du is not None:
        cfg.du = args.du
    if args.tolerance_scale is not None:
        cfg.tolerance_scale = args.tolerance_scale
    cfg.validate()
    return cfg


def _grid_of(cfg):
    from .sphere import build_grid
    return build_grid(cfg.n_theta, cfg.n_psi)


def _default_radii(cfg, kind):
    if cfg.radii:
        return tuple(cfg.radii)
    if kind == "null" and cfg.preset == "minkowski":
        # deviations are exactly zero; small radii keep the roundoff floor
        # (which grows like r^2) below the exact-zero threshold
        return (0.5, 1.0, 2.0, 4.0)
    return {"adm": (10.0, 20.0, 40.0, 80.0),
            "null": (30.0, 45.0, 70.0, 110.0, 170.0),
            "slice": (50.0, 100.0, 200.0, 400.0, 800.0)}[kind]


def _known_mass(cfg):
    return 0.0 if cfg.preset == "minkowski" else cfg.mass


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_adm(cfg):
    from .adm import adm_energy_momentum, check_af_decay, check_dec_flat, \
        check_pmt_flat
    scale = cfg.tolerance_scale
    data = make_adm_data(cfg)
    radii = _default_radii(cfg, "adm")
    ch = adm_energy_momentum(data, radii, _grid_of(cfg))
    decay = check_af_decay(data, radii)
    rng = np.random.default_rng(0)
    pts = [rng.uniform(radii[0] / 2.0, radii[-1] / 2.0, size=10),
           rng.uniform(0.4, 2.7, size=10), rng.uniform(0.0, 6.2, size=10)]
    dec = check_dec_flat(data, pts)
    pmt = check_pmt_flat(ch)
    m0 = _known_mass(cfg)
    checks = [
        CheckResult("adm.energy_matches_preset_mass",
                    abs(ch.E - m0) <= max(1e-2 * m0, 1e-9) * scale,
                    ch.E - m0, max(1e-2 * m0, 1e-9) * scale),
        CheckResult("adm.momentum_small",
                    float(np.max(np.abs(ch.P))) <= 1e-4 * scale,
                    float(np.max(np.abs(ch.P))), 1e-4 * scale),
        CheckResult("adm.decay_orders_ok",
                    all(v["ok"] for v in decay.values()),
                    min((v["fit"].exponent if not v["fit"].exact else np.inf)
                        - v["required"] for v in decay.values()), 0.3),
        CheckResult("adm.dec_margin", float(np.min(dec)) >= -1e-5 * scale,
                    float(np.min(dec)), 1e-5 * scale),
        CheckResult("adm.pmt_margin", pmt >= -1e-6 * scale, pmt, 1e-6 * scale),
    ]
    report = ChargeReport(
        scenario=cfg.preset, kind="adm",
        charges={"E": ch.E, "P": list(ch.P)},
        samples={"E": list(ch.energy.samples),
                 "P": [list(m.samples) for m in ch.momentum],
                 "radii": list(radii)},
        residuals={"E": ch.energy.residual,
                   "P": [m.residual for m in ch.momentum]},
        dec_min_margin=float(np.min(dec)), pmt_margin=pmt,
        decay_exponents={k: (v["fit"].exponent if not v["fit"].exact else "exact")
                         for k, v in decay.items()},
        checks=tuple(checks))
    return report, None


def _slice_data(cfg):
    from .geometry import hyperboloid_frame, pullback_initial_data
    from .spacetimes import hyperboloid_embedding, minkowski
    from .bondi import induced_slice_data
    if cfg.preset == "minkowski":
        return pullback_initial_data(minkowski("polar"),
                                     hyperboloid_embedding(),
                                     hyperboloid_frame())
    exp = make_expansion(cfg)
    return induced_slice_data(exp, u0=cfg.u0, a3=make_a3(cfg))


def cmd_null(cfg):
    from .nullcharges import check_dec_null, check_pmt_null, null_energy_momentum
    scale = cfg.tolerance_scale
    data = _slice_data(cfg)
    radii = _default_radii(cfg, "null")
    ch = null_energy_momentum(data, radii, _grid_of(cfg))
    pmt = check_pmt_null(ch)
    pts = [np.array([max(20.0, radii[0]), 1.5 * max(20.0, radii[0])]),
           np.array([1.1, 2.0]), np.array([0.4, 3.2])]
    dec = check_dec_null(data, pts)
    finite = [f.exponent for f in ch.decay_orders.values() if not f.exact]
    slowest = min(finite) if finite else np.inf
    checks = [
        CheckResult("null.order_gate", slowest >= ch.tau_gate or not finite,
                    float(slowest if finite else np.inf), ch.tau_gate,
                    "fitted orders above 3/2 gate"),
        CheckResult("null.not_diverging", not ch.diverging(),
                    float(ch.diverging()), 0.0),
        CheckResult("null.dec_margin", float(np.min(dec)) >= -1e-4 * scale,
                    float(np.min(dec)), 1e-4 * scale),
        CheckResult("null.pmt_margin", pmt >= -1e-4 * scale, pmt, 1e-4 * scale),
    ]
    report = ChargeReport(
        scenario=cfg.preset, kind="null",
        charges={"E": list(ch.E_values()),
                 "P": [list(r) for r in ch.P_values()],
                 "margins": list(ch.margins())},
        samples={"E0": list(ch.E[0].samples), "radii": list(radii)},
        residuals={"E": [f.residual for f in ch.E]},
        dec_min_margin=float(np.min(dec)), pmt_margin=pmt,
        decay_exponents={k: (v.exponent if not v.exact else "exact")
                         for k, v in ch.decay_orders.items()},
        checks=tuple(checks))
    return report, None


def cmd_bondi_evolve(cfg):
    from .bondi import (bondi_energy_momentum, evolve_energy_momentum,
                        flux_holder_margin, mass_aspect_field,
                        mass_loss_margin, trajectory_csv)
    scale = cfg.tolerance_scale
    exp = make_expansion(cfg)
    grid = _grid_of(cfg)
    m0 = bondi_energy_momentum(mass_aspect_field(exp, cfg.u_start, grid))
    traj = evolve_energy_momentum(m0, exp, cfg.u_start, cfg.u_end, cfg.du, grid)
    dmax = mass_loss_margin(traj)
    holder = flux_holder_margin(traj.flux)
    checks = [
        CheckResult("evolve.margin_nonincreasing", dmax <= 1e-9 * scale,
                    dmax, 1e-9 * scale),
        CheckResult("evolve.mass_nonincreasing", traj.mass_monotone,
                    float(np.max(np.diff(traj.m[:, 0]))), 1e-9 * scale),
        CheckResult("evolve.flux_holder_chain", holder >= -1e-12 * scale,
                    holder, 1e-12 * scale),
    ]
    report = ChargeReport(
        scenario=cfg.preset, kind="bondi",
        charges={"m_start": list(traj.m[0]), "m_end": list(traj.m[-1])},
        samples={"u": [float(traj.u[0]), float(traj.u[-1])],
                 "n_samples": len(traj.u)},
        residuals={}, pmt_margin=float(traj.margin[-1]),
        checks=tuple(checks))
    return report, trajectory_csv(traj)


def cmd_bondi_slice(cfg):
    from .bondi import expansion_consistency
    from .nullcharges import check_pmt_null, null_energy_momentum
    scale = cfg.tolerance_scale
    exp = make_expansion(cfg)
    a3 = make_a3(cfg)
    radii = _default_radii(cfg, "slice")
    rep = expansion_consistency(exp, u0=cfg.u0, a3=a3, radii=radii)
    worst, worst_name = np.inf, "exact"
    for name, fit in rep.items():
        if not fit.exact and fit.exponent < worst:
            worst, worst_name = fit.exponent, name
    data = _slice_data(cfg)
    ch = null_energy_momentum(data, _default_radii(cfg, "null"), _grid_of(cfg))
    pmt = check_pmt_null(ch)
    checks = [
        CheckResult("slice.expansion_consistency", worst >= 3.3,
                    float(worst), 3.3, f"slowest component {worst_name}"),
        CheckResult("slice.pmt_margin", pmt >= -1e-4 * scale, pmt,
                    1e-4 * scale),
    ]
    report = ChargeReport(
        scenario=cfg.preset, kind="null",
        charges={"E": list(ch.E_values()), "margins": list(ch.margins())},
        samples={"consistency_radii": list(radii)},
        residuals={},
        pmt_margin=pmt,
        decay_exponents={k: (v.exponent if not v.exact else "exact")
                         for k, v in rep.items()},
        checks=tuple(checks))
    return report, None


def cmd_verify(cfg):
    from .verify import run_verification
    results, elapsed = run_verification(cfg.tolerance_scale, echo=print)
    report = ChargeReport(scenario="battery", kind="verify",
                          charges={}, samples={"elapsed_s": elapsed},
                          checks=tuple(results))
    return report, None


def cmd_converge(cfg):
    from .adm import adm_energy_momentum
    scale = cfg.tolerance_scale
    if cfg.preset not in ADM_PRESETS:
        raise ConfigError(f"converge expects one of {ADM_PRESETS}")
    data = make_adm_data(cfg)
    radii = list(_default_radii(cfg, "adm"))
    from .sphere import build_grid
    coarse = adm_energy_momentum(data, radii, build_grid(cfg.n_theta, cfg.n_psi))
    fine = adm_energy_momentum(data, radii,
                               build_grid(2 * cfg.n_theta, 2 * cfg.n_psi))
    longer = adm_energy_momentum(data, radii + [2.0 * radii[-1]],
                                 build_grid(cfg.n_theta, cfg.n_psi))
    dg = abs(fine.E - coarse.E)
    dl = abs(longer.E - coarse.E)
    checks = [
        CheckResult("converge.grid_refinement",
                    dg <= max(coarse.energy.residual, 1e-12) * scale, dg,
                    max(coarse.energy.residual, 1e-12) * scale),
        CheckResult("converge.ladder_extension",
                    dl <= max(10.0 * coarse.energy.residual, 1e-10) * scale,
                    dl, max(10.0 * coarse.energy.residual, 1e-10) * scale),
    ]
    rows = ["quantity,coarse,fine,delta",
            f"E,{coarse.E:.17e},{fine.E:.17e},{dg:.17e}",
            f"E_ladder,{coarse.E:.17e},{longer.E:.17e},{dl:.17e}"]
    report = ChargeReport(
        scenario=cfg.preset, kind="adm",
        charges={"E_coarse": coarse.E, "E_fine": fine.E, "E_longer": longer.E},
        samples={"radii": radii}, residuals={"E": coarse.energy.residual},
        checks=tuple(checks))
    return report, "\n".join(rows) + "\n"


_COMMANDS = {
    "adm": cmd_adm,
    "null": cmd_null,
    "bondi-evolve": cmd_bondi_evolve,
    "bondi-slice": cmd_bondi_slice,
    "verify": cmd_verify,
    "converge": cmd_converge,
}


def build_parser():
    ap = argparse.ArgumentParser(
        prog="admbondi",
        description="energy-momentum charges at spatial and null infinity")
    ap.add_argument("subcommand", choices=sorted(_COMMANDS))
    ap.add_argument("--config", help="path to a nested-section config file")
    ap.add_argument("--out", help="write the JSON report here")
    ap.add_argument("--csv", help="write tabular output (trajectory/study) here")
    ap.add_argument("--preset", help="scenario preset when no config is given")
    ap.add_argument("--ntheta", type=int)
    ap.add_argument("--npsi", type=int)
    ap.add_argument("--radii", help="comma-separated radius ladder")
    ap.add_argument("--u0", type=float)
    ap.add_argument("--u1", type=float)
    ap.add_argument("--du", type=float)
    ap.add_argument("--strict", action="store_true",
                    help="reject unknown config keys (default)")
    ap.add_argument("--tolerance-scale", type=float, dest="tolerance_scale")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            with open(args.config) as f:
                cfg, provenance = parse_config(f.read(), strict=True)
        else:
            cfg, provenance = ScenarioConfig(), {}
            cfg.defaulted_fields = ("all",)
        if args.preset:
            cfg.preset = args.preset
        cfg = _apply_flags(cfg, args)
        report, table = _COMMANDS[args.subcommand](cfg)
    except (ConfigError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    body = report.as_dict()
    body["config_provenance"] = {k: v for k, v in sorted(provenance.items())}
    if args.out:
        write_json(args.out, body)
    if args.csv and table is not None:
        with open(args.csv, "w") as f:
            f.write(table)
    elif args.csv:
        print("note: this subcommand produces no tabular output",
              file=sys.stderr)

    for c in report.checks:
        print(c.line())
    failing = [c.name for c in report.checks if not c.passed]
    if failing:
        print(f"FAILED checks: {', '.join(failing)}", file=sys.stderr)
        return 1
    print(f"all {len(report.checks)} checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())

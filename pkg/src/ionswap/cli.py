"""Command-line front end: scenario configs in, reports/CSV out.

Config files are TOML.  All frequencies in config files are ordinary MHz
(converted x 2*pi on ingest), fields in gauss, mirror budgets in ppm,
lengths in mm.  Complex couplings may be given as [re, im] pairs.

Subcommands: outcome | sweep | optimize | tables | oracle-check.
Exit codes: 0 ok, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import ions, model, optimize, oracle
from .params import (
    MHZ,
    MU_B_OVER_HBAR,
    CavityParams,
    ConfigError,
    DriveSettings,
    JointQubitState,
    LambdaSystem,
    SingularConfigError,
)

FMT = "%.8e"  # scientific, 9 significant digits


def _fmt(x: float) -> str:
    return FMT % x


def _as_complex(v, field: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(v[0], v[1])
    raise ConfigError(f"{field}: expected number or [re, im] pair, got {v!r}")


def _load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}")


def _build_system_cavity(cfg: dict) -> tuple[LambdaSystem, CavityParams]:
    has_preset = "preset" in cfg
    has_system = "system" in cfg
    if has_preset == has_system:
        raise ConfigError("config must contain exactly one of [preset] or [system]")
    if has_preset:
        p = cfg["preset"]
        bundle = ions.preset(
            p.get("ion", ""),
            p.get("flavor", "conventional"),
            p.get("mode_phase", "absorbed"),
        )
        system = bundle.system
        cavity = bundle.cavity
    else:
        s = cfg["system"]
        try:
            system = LambdaSystem(
                g_down=_as_complex(s["g_down_mhz"], "system.g_down_mhz") * MHZ,
                g_up=_as_complex(s["g_up_mhz"], "system.g_up_mhz") * MHZ,
                gamma=float(s["gamma_mhz"]) * MHZ,
                m_down=float(s.get("m_down", -1.0)),
                m_up=float(s.get("m_up", 1.0)),
                m_e=float(s.get("m_e", 0.0)),
                lande_lower=float(s.get("lande_lower", 1.0)),
                lande_upper=float(s.get("lande_upper", 0.0)),
            )
        except KeyError as exc:
            raise ConfigError(f"[system] missing required key {exc.args[0]}")
        cavity = None
    if "mirrors" in cfg:
        m = cfg["mirrors"]
        if "length_mm" in m:
            length = float(m["length_mm"]) * 1e-3
        elif "length_um" in m:
            length = float(m["length_um"]) * 1e-6
        else:
            raise ConfigError("[mirrors] needs length_mm or length_um")
        geom = ions.cavity_from_mirrors(
            ions.MirrorSpec(
                length=length,
                t1_ppm=float(m["t1_ppm"]),
                t2_plus_loss_ppm=float(m["t2_plus_loss_ppm"]),
            )
        )
        cavity = geom.cavity
    if "cavity" in cfg:
        c = cfg["cavity"]
        base = cavity
        kappa_ex = (
            float(c["kappa_ex_mhz"]) * MHZ
            if "kappa_ex_mhz" in c
            else (base.kappa_ex if base else None)
        )
        kappa_i = (
            float(c["kappa_i_mhz"]) * MHZ
            if "kappa_i_mhz" in c
            else (base.kappa_i if base else 0.0)
        )
        if kappa_ex is None:
            raise ConfigError("[cavity] needs kappa_ex_mhz")
        cavity = CavityParams(kappa_ex=kappa_ex, kappa_i=kappa_i)
    if cavity is None:
        raise ConfigError("no cavity given: add [cavity], [mirrors], or a preset")
    return system, cavity


def _build_drive(cfg: dict) -> DriveSettings:
    d = cfg.get("drive", {})
    return DriveSettings(
        delta_c=float(d.get("delta_c_mhz", 0.0)) * MHZ,
        delta_a=float(d.get("delta_a_mhz", 0.0)) * MHZ,
        b_field=float(d.get("b_gauss", 0.0)),
        kappa_s=float(d.get("kappa_s_mhz", 0.0)) * MHZ,
    )


def _build_sampler(cfg: dict, args) -> model.SamplerSpec | None:
    s = dict(cfg.get("sampler", {}))
    if args.samples is not None:
        s["count"] = args.samples
    if args.mode is not None:
        s["mode"] = args.mode
    if args.seed is not None:
        s["seed"] = args.seed
    if not s:
        return None
    return model.SamplerSpec(
        mode=s.get("mode", "haar"),
        count=int(s.get("count", 10_000)),
        seed=int(s.get("seed", 0)),
    )


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def cmd_outcome(args) -> int:
    cfg = _load_config(args.config)
    system, cavity = _build_system_cavity(cfg)
    drive = _build_drive(cfg)
    dets = model.effective_detunings(drive, system)
    sampler = _build_sampler(cfg, args)
    printed = False
    if "state" in cfg:
        st = cfg["state"]
        state = JointQubitState(
            alpha=_as_complex(st.get("alpha", 1.0), "state.alpha"),
            beta=_as_complex(st.get("beta", 0.0), "state.beta"),
            alpha_p=_as_complex(st.get("alpha_p", 1.0), "state.alpha_p"),
            beta_p=_as_complex(st.get("beta_p", 0.0), "state.beta_p"),
        )
        out = model.gate_outcome(state, system, cavity, dets)
        print(f"P_D        = {_fmt(out.p_dark)}")
        print(f"P_B        = {_fmt(out.p_bright)}")
        fid = "undefined" if out.fidelity is None else _fmt(out.fidelity)
        print(f"fidelity   = {fid}")
        print(f"efficiency = {_fmt(out.efficiency)}")
        printed = True
    if sampler is not None:
        agg = model.average_gate_outcome(system, cavity, drive, sampler)
        print(f"n_states            = {agg.n_states}")
        print(f"mean_fidelity       = {_fmt(agg.mean_fidelity)}")
        print(f"sigma_fidelity      = {_fmt(agg.sigma_fidelity)}")
        print(f"heralded_fidelity   = {_fmt(agg.heralded_fidelity)}")
        print(f"mean_efficiency     = {_fmt(agg.mean_efficiency)}")
        print(f"mean_P_D            = {_fmt(agg.mean_p_dark)}")
        print(f"mean_P_B            = {_fmt(agg.mean_p_bright)}")
        printed = True
    if not printed:
        raise ConfigError("outcome needs a [state] and/or [sampler] section")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    system, cavity = _build_system_cavity(cfg)
    sw = cfg.get("sweep", {})
    try:
        lo = float(sw["kappa_ex_min_mhz"]) * MHZ
        hi = float(sw["kappa_ex_max_mhz"]) * MHZ
        points = int(sw.get("points", 25))
    except KeyError as exc:
        raise ConfigError(f"[sweep] missing required key {exc.args[0]}")
    if points < 1 or hi < lo:
        raise ConfigError("[sweep] needs points >= 1 and max >= min")
    if sw.get("spacing", "linear") == "log":
        values = np.geomspace(lo, hi, points)
    else:
        values = np.linspace(lo, hi, points)
    sampler = _build_sampler(cfg, args) or model.SamplerSpec()
    branch = args.branch or sw.get("branch", "plus")
    rows = optimize.sweep_coupling(
        system,
        cavity.kappa_i,
        values,
        sampler,
        optimize=bool(sw.get("optimize", True)),
        branch=branch,
    )
    header = [
        "kappa_ex_mhz",
        "delta_c_mhz",
        "delta_a_mhz",
        "b_gauss",
        "mean_fidelity",
        "mean_efficiency",
        "heralded_fidelity",
        "mean_fidelity_unopt",
        "mean_efficiency_unopt",
        "heralded_fidelity_unopt",
    ]
    data = [
        (
            p.kappa_ex / MHZ,
            p.delta_c / MHZ,
            p.delta_a / MHZ,
            p.b_field,
            p.mean_fidelity,
            p.mean_efficiency,
            p.heralded_fidelity,
            p.mean_fidelity_0,
            p.mean_efficiency_0,
            p.heralded_fidelity_0,
        )
        for p in rows
    ]
    out_path = args.out or cfg.get("output", {}).get("path")
    if out_path is None:
        raise ConfigError("sweep needs --out PATH (or [output] path)")
    _write_csv(out_path, header, data)
    print(f"wrote {len(data)} rows to {out_path}")
    return 0


def cmd_optimize(args) -> int:
    cfg = _load_config(args.config)
    system, cavity = _build_system_cavity(cfg)
    opt = cfg.get("optimize", {})

    def bound(key, default):
        v = opt.get(key)
        if v is None:
            return default
        if not (isinstance(v, list) and len(v) == 2):
            raise ConfigError(f"[optimize] {key} must be a [lo, hi] pair")
        return (float(v[0]), float(v[1]))

    kt = cavity.kappa_t
    dc = bound("delta_c_mhz", (-10 * kt / MHZ, 10 * kt / MHZ))
    da = bound("delta_a_mhz", (-15 * system.gamma / MHZ, 15 * system.gamma / MHZ))
    bf = bound("b_gauss", (0.0, 0.0))
    bounds = optimize.OptimizationBounds(
        delta_c=(dc[0] * MHZ, dc[1] * MHZ),
        delta_a=(da[0] * MHZ, da[1] * MHZ),
        b_field=bf,
    )
    sampler = _build_sampler(cfg, args) or model.SamplerSpec(count=2000)
    res = optimize.optimize_asymmetric(
        system,
        cavity,
        bounds,
        sampler,
        grid_points=int(opt.get("grid_points", 21)),
        n_starts=int(opt.get("n_starts", 5)),
    )
    print(f"delta_c_opt_mhz   = {_fmt(res.delta_c / MHZ)}")
    print(f"delta_a_opt_mhz   = {_fmt(res.delta_a / MHZ)}")
    print(f"b_opt_gauss       = {_fmt(res.b_field)}")
    print(f"mean_fidelity     = {_fmt(res.mean_fidelity)}")
    print(f"mean_efficiency   = {_fmt(res.mean_efficiency)}")
    print(f"baseline_fidelity = {_fmt(res.baseline_fidelity)}")
    print(f"converged         = {res.converged}")
    print(f"n_evaluations     = {res.n_evaluations}")
    out_path = args.out or cfg.get("output", {}).get("path")
    if out_path is not None:
        drive = DriveSettings(
            delta_c=res.delta_c, delta_a=res.delta_a, b_field=res.b_field
        )
        agg = model.average_gate_outcome(system, cavity, drive, sampler)
        rows = [
            (agg.bin_edges[i], agg.bin_edges[i + 1], float(agg.histogram[i]))
            for i in range(len(agg.histogram))
        ]
        _write_csv(out_path, ["bin_left", "bin_right", "count"], rows)
        print(f"wrote fidelity histogram to {out_path}")
    return 0


def cmd_tables(args) -> int:
    print("Landmark working points (symmetric systems)")
    print("=" * 74)
    cases = [
        ("Yb171 conventional", ions.preset("Yb171", "conventional")),
        ("Yb171 fiber", ions.preset("Yb171", "fiber")),
    ]
    for label, b in cases:
        lm = optimize.landmark_parameters(b.system, b.cavity.kappa_i)
        print(f"\n{label}: kappa_i = {b.cavity.kappa_i / MHZ:.4g} MHz, "
              f"C_i = {lm.c_i:.3f}")
        print(f"  kappa_1 / kappa_2 / kappa_3 (MHz) : "
              f"{lm.kappa_1 / MHZ:.4g} / {lm.kappa_2 / MHZ:.4g} / {lm.kappa_3 / MHZ:.4g}")
        print(f"  delta_c_1 (MHz), delta_a_1 (MHz)  : "
              f"{lm.delta_c_1 / MHZ:.4g}, {lm.delta_a_1 / MHZ:.4g}")
        print(f"  eta_2, fidelity_3, eta_3          : "
              f"{lm.eta_2:.3f}, {lm.fidelity_3:.3f}, {lm.eta_3:.3f}")
    print("\nCavity catalog")
    print("=" * 74)
    for ion, flavor in ions.available_presets():
        b = ions.preset(ion, flavor)
        geom = ions.cavity_from_mirrors(b.mirrors)
        c_t = optimize.resonant_cooperativity(b.system, b.cavity.kappa_t)
        tau = ions.gate_time_estimate(b.cavity.kappa_t, c_t, b.system.gamma)
        print(f"\n{ion} {flavor}: {b.ion.transition} @ {b.ion.wavelength_nm} nm")
        print(f"  mirrors: l = {b.mirrors.length * 1e3:.3g} mm, "
              f"T1 = {b.mirrors.t1_ppm:.0f} ppm, T2+L = {b.mirrors.t2_plus_loss_ppm:.0f} ppm")
        print(f"  finesse {geom.finesse:.3g} (quoted {b.finesse_quoted:.3g}); "
              f"kappa_ex = {geom.cavity.kappa_ex / MHZ:.4g} MHz "
              f"(quoted {b.cavity.kappa_ex / MHZ:.4g}), "
              f"kappa_i = {geom.cavity.kappa_i / MHZ:.4g} MHz "
              f"(quoted {b.cavity.kappa_i / MHZ:.4g})")
        print(f"  g_down, g_up = {abs(b.system.g_down) / MHZ:.4g}, "
              f"{abs(b.system.g_up) / MHZ:.4g} MHz; C_t = {c_t:.3f}; "
              f"gate time ~ {tau * 1e9:.3g} ns")
        if b.ion.purcell_rate is not None:
            ratio = ions.postselected_efficiency(
                1.0, b.ion.purcell_rate, b.ion.gamma_other
            )
            print(f"  post-selection survival = {ratio:.3f} "
                  f"(Gamma = {b.ion.purcell_rate / MHZ:.3g} MHz, "
                  f"gamma_other = {b.ion.gamma_other / MHZ:.3g} MHz)")
    return 0


def cmd_oracle_check(args) -> int:
    cfg = _load_config(args.config) if args.config else {}
    oc = cfg.get("oracle", {})
    cases = int(oc.get("cases", 100))
    seed = args.seed if args.seed is not None else int(oc.get("seed", 0))
    ks_factor = float(oc.get("ks_factor", 200.0))
    tol_p = float(oc.get("tol_p", 1e-4))
    tol_cons = float(oc.get("tol_cons", 1e-6))
    if ks_factor < 100.0:
        print(
            "warning: kappa_s > kappa_t/100 violates the slow-pulse regime; "
            "closed-form comparison is not expected to hold",
            file=sys.stderr,
        )
    rng = np.random.default_rng(seed)
    max_dp = 0.0
    max_cons = 0.0
    for k in range(cases):
        kt = 1.0
        kex = rng.uniform(0.6, 0.95) * kt
        cavity = CavityParams(kappa_ex=kex, kappa_i=kt - kex)
        symmetric = k % 2 == 0
        g_mag = rng.uniform(0.3, 2.0)
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        g_down = g_mag * phase
        g_up = g_down if symmetric else rng.uniform(0.3, 2.0) * np.exp(
            1j * rng.uniform(0, 2 * np.pi)
        )
        system = LambdaSystem(
            g_down=g_down,
            g_up=g_up,
            gamma=rng.uniform(0.3, 3.0),
            m_down=-1.5,
            m_up=0.5,
            m_e=-0.5,
            lande_lower=0.8,
            lande_upper=2.0 / 3.0,
        )
        drive = DriveSettings(
            delta_c=rng.uniform(-2, 2),
            delta_a=rng.uniform(-2, 2),
            # field chosen so the Zeeman shifts are O(0.1-1) in kappa_t units
            b_field=rng.uniform(0.1, 1.0) / (MU_B_OVER_HBAR * 0.8),
            kappa_s=kt / ks_factor,
        )
        dets = model.effective_detunings(drive, system)
        state = JointQubitState.from_angles(
            rng.uniform(0, np.pi),
            rng.uniform(0, 2 * np.pi),
            rng.uniform(0, np.pi),
            rng.uniform(0, 2 * np.pi),
        )
        traj = oracle.integrate_amplitudes(state, system, cavity, dets, drive.kappa_s)
        rep = oracle.time_domain_probabilities(
            traj, complex(state.alpha_p), complex(state.beta_p)
        )
        out = model.gate_outcome(state, system, cavity, dets)
        max_dp = max(max_dp, abs(rep.p_dark - out.p_dark), abs(rep.p_bright - out.p_bright))
        max_cons = max(max_cons, rep.conservation_residual)
    ok_p = max_dp < tol_p
    ok_c = max_cons < tol_cons
    print(f"cases                = {cases} (kappa_s = kappa_t/{ks_factor:g})")
    print(f"max |P| deviation    = {_fmt(max_dp)} (tol {_fmt(tol_p)}): "
          f"{'PASS' if ok_p else 'FAIL'}")
    print(f"max conservation res = {_fmt(max_cons)} (tol {_fmt(tol_cons)}): "
          f"{'PASS' if ok_c else 'FAIL'}")
    if not ok_p:
        print(
            "note: the closed form is the slow-pulse limit; its deviation is "
            "first order in kappa_s/kappa_t (rerun with oracle.ks_factor "
            "raised to see the linear convergence)",
            file=sys.stderr,
        )
    return 0 if (ok_p and ok_c) else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ionswap",
        description="Photon-ion SWAP gate design toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, needs_cfg in (
        ("outcome", cmd_outcome, True),
        ("sweep", cmd_sweep, True),
        ("optimize", cmd_optimize, True),
        ("tables", cmd_tables, False),
        ("oracle-check", cmd_oracle_check, False),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_cfg, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--mode", choices=["haar", "grid"], default=None)
        p.add_argument("--branch", choices=["plus", "minus"], default=None)
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, oracle.StepSizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SingularConfigError, oracle.NonFiniteAmplitudeError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
